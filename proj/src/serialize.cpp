#include "dsieve/serialize.hpp"

#include <openssl/evp.h>

#include <iomanip>
#include <sstream>

#include "dsieve/errors.hpp"
#include "dsieve/rational.hpp"

namespace dsieve {

std::string sha256_hex(const std::string& text) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  std::ostringstream os;
  os << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) os << std::setw(2) << static_cast<int>(digest[i]);
  return os.str();
}

std::string schedule_fingerprint(const Schedule& s, std::int64_t N) {
  std::ostringstream os;
  os << "eta=" << to_string(s.eta) << "\npreset=" << s.info.preset << '\n';
  for (const auto& [k, v] : s.info.params) os << k << '=' << v << '\n';
  const ScheduleTable tab = tabulate(s, N);
  for (std::int64_t n = 1; n <= N; ++n) os << n << ' ' << tab.h[n] << ' ' << to_string(tab.delta[n]) << '\n';
  return sha256_hex(os.str());
}

Json to_json(const TermEnclosure& t) {
  if (t.exact()) return Json{{"exact", to_string(t.lower)}};
  return Json{{"lower", to_string(t.lower)}, {"upper", to_string(t.upper)}, {"precision", t.precision},
              {"value_approx", to_decimal(t.lower)}};
}

Json to_json(const GrowthReport& r) {
  Json j{{"verdict", to_string(r.verdict)}};
  if (r.first_violation) {
    j["first_violation"] = *r.first_violation;
    j["violated_side"] = r.violated_side;
  }
  Json fitted = Json::array();
  for (const auto& f : r.fitted) fitted.push_back(to_string(f));
  j["fitted"] = fitted;
  return j;
}

Json to_json(const ScheduleInfo& info) {
  Json j{{"preset", info.preset}, {"params", info.params}};
  if (info.constant_h) j["h_const"] = *info.constant_h;
  if (info.constant_delta) j["delta_const"] = to_string(*info.constant_delta);
  return j;
}

Json to_json(const CheckpointChain& c) { return Json(c.nodes); }

Json to_json(const ConditionReport& r) {
  Json results = Json::array();
  for (const auto& c : r.results) {
    Json e{{"name", c.name}, {"verdict", to_string(c.verdict)}, {"checked", c.checked}};
    if (c.first_failing) e["first_failing"] = *c.first_failing;
    if (!c.lhs.empty()) {
      e["lhs"] = c.lhs;
      e["relation"] = c.relation;
      e["rhs"] = c.rhs;
    }
    results.push_back(std::move(e));
  }
  Json j{{"mode", r.mode == CheckMode::chain ? "chain" : "universal"},
         {"all_pass", r.all_pass()},
         {"block_limit", to_string(r.block_limit)},
         {"initial_limit", to_string(r.initial_limit)},
         {"conditions", results}};
  if (const ConditionResult* b = r.binding()) j["binding"] = b->name;
  return j;
}

Json to_json(const SieveTrace& t) {
  Json cps = Json::array();
  for (const auto& c : t.checkpoints)
    cps.push_back({{"n", c.n},
                   {"level", c.level},
                   {"cells", to_string(c.cells)},
                   {"runs", c.runs},
                   {"measure", to_string(c.measure)},
                   {"measure_approx", to_decimal(c.measure)},
                   {"bound", to_string(c.bound)},
                   {"within", c.within}});
  Json overlaps = Json::array();
  for (const auto& o : t.overlaps)
    overlaps.push_back({{"n", o.n},
                        {"frozen_at", o.frozen_at},
                        {"ratio", to_string(o.ratio)},
                        {"limit", to_string(o.limit)},
                        {"within", o.within},
                        {"proven_limit", to_string(o.proven_limit)},
                        {"within_proven", o.within_proven}});
  Json blocks = Json::array();
  for (const auto& b : t.blocks)
    blocks.push_back({{"from", b.from},
                      {"to", b.to},
                      {"ratio", to_string(b.ratio)},
                      {"limit", to_string(b.limit)},
                      {"within", b.within},
                      {"proven_limit", to_string(b.proven_limit)},
                      {"within_proven", b.within_proven}});
  Json covers = Json::array();
  for (const auto& c : t.covers)
    covers.push_back({{"n", c.n},
                      {"level", c.level},
                      {"measure", to_string(c.measure)},
                      {"limit", to_string(c.limit)},
                      {"within", c.within}});
  return Json{{"checkpoints", cps},
              {"overlaps", overlaps},
              {"blocks", blocks},
              {"covers", covers},
              {"initial", {{"measure", to_string(t.initial_measure)},
                           {"bound", to_string(t.initial_bound)},
                           {"within", t.initial_within}}},
              {"final_measure", to_string(t.final_measure)},
              {"final_measure_approx", to_decimal(t.final_measure)},
              {"theorem_bound", to_string(t.theorem_bound)},
              {"survivor_level", t.survivors.level()},
              {"survivor_cells", to_string(t.survivors.count())},
              {"survivor_runs", t.survivors.runs().size()},
              {"all_within", t.all_within()},
              {"all_proven", t.all_proven()}};
}

Json to_json(const MarginReport& r, bool with_records) {
  Json j{{"verdict", to_string(r.verdict)},
         {"min_margin", to_string(r.min_margin)},
         {"min_margin_approx", to_decimal(r.min_margin)},
         {"min_at", r.min_at},
         {"checked", r.margins.size()}};
  if (r.first_failure) j["first_failure"] = *r.first_failure;
  if (with_records) {
    Json recs = Json::array();
    for (const auto& m : r.margins)
      recs.push_back({{"n", m.n}, {"distance", to_string(m.distance)}, {"delta", to_string(m.delta)}, {"ok", m.ok}});
    j["records"] = recs;
  }
  return j;
}

Json to_json(const Certificate& c) {
  Json stages = Json::array();
  for (const auto& s : c.stages) {
    Json e{{"n", s.n}, {"level", s.level}, {"cell", to_string(s.cell)}, {"survivors", to_string(s.survivors)}};
    if (s.guaranteed != 0) e["guaranteed"] = to_string(s.guaranteed);
    stages.push_back(std::move(e));
  }
  return Json{{"alpha", to_string(c.alpha)},
              {"alpha_dyadic", to_string(c.numerator) + "/2^" + std::to_string(c.bits)},
              {"alpha_approx", to_decimal(c.alpha)},
              {"binary", c.binary_expansion()},
              {"bits", c.bits},
              {"stages", stages},
              {"schedule", {{"preset", c.schedule_preset}, {"params", c.schedule_params}}},
              {"nodes_explored", c.nodes_explored},
              {"backtracks", c.backtracks},
              {"margins", to_json(c.margins)}};
}

Json to_json(const SeriesReport& r) {
  Json j{{"nu", to_string(r.nu)}, {"verdict", to_string(r.verdict)}, {"family", r.family}, {"terms", r.terms.size()}};
  if (r.closed_ratio_lower) {
    j["closed_ratio_lower"] = to_string(*r.closed_ratio_lower);
    j["closed_ratio_upper"] = to_string(*r.closed_ratio_upper);
    j["closed_ratio_approx"] = to_decimal(*r.closed_ratio_upper);
  }
  if (r.k0) {
    j["certificate"] = {{"k0", *r.k0}, {"q", to_string(*r.q)}, {"q_approx", to_decimal(*r.q)},
                        {"tail_bound", to_string(*r.tail_bound)}};
  }
  if (!r.terms.empty()) {
    j["partial_sum_upper"] = to_string(r.terms.back().partial_upper);
    j["partial_sum_approx"] = to_decimal(r.terms.back().partial_upper);
  }
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

Json to_json(const DimensionReport& r) {
  Json probes = Json::array();
  for (const auto& p : r.probes) probes.push_back({{"nu", to_string(p.nu)}, {"verdict", to_string(p.verdict)}});
  Json inconclusive = Json::array();
  for (const auto& nu : r.inconclusive) inconclusive.push_back(to_string(nu));
  return Json{{"nu_star", to_string(r.nu_star)},
              {"nu_star_approx", to_decimal(r.nu_star)},
              {"nu_upper", to_string(r.nu_upper)},
              {"epsilon", to_string(r.epsilon)},
              {"probes", probes},
              {"inconclusive", inconclusive}};
}

Json to_json(const IntervalUnion& u, std::size_t max_pieces) {
  Json pairs = Json::array();
  Json closed = Json::array();
  const std::size_t shown = std::min(max_pieces, u.size());
  for (std::size_t i = 0; i < shown; ++i) {
    pairs.push_back({to_string(u.lower(i)), to_string(u.upper(i))});
    const Piece& p = u.pieces()[i];
    if (p.lo_closed || p.hi_closed) closed.push_back({{"index", i}, {"lo_closed", p.lo_closed}, {"hi_closed", p.hi_closed}});
  }
  Json j{{"measure", to_string(u.measure())},
         {"measure_approx", to_decimal(u.measure())},
         {"components", u.size()},
         {"intervals", pairs},
         {"closed_endpoints", closed}};
  if (shown < u.size()) j["truncated"] = true;
  return j;
}

Json to_json(const Comparison& c) {
  Json j{{"contained", c.contained},
         {"exact_measure", to_string(c.exact_measure)},
         {"sieve_measure", to_string(c.sieve_measure)},
         {"slack", to_string(c.slack)},
         {"slack_approx", to_decimal(c.slack)}};
  if (c.bad_cell) j["bad_cell"] = to_string(*c.bad_cell);
  if (c.bad_n) {
    j["bad_n"] = *c.bad_n;
    j["bad_a"] = to_string(*c.bad_a);
  }
  return j;
}

}  // namespace dsieve
