#include "dsieve/sieve.hpp"

#include <algorithm>
#include <memory>
#include <set>
#include <sstream>

#include "dsieve/errors.hpp"
#include "dsieve/rational.hpp"

namespace dsieve {

namespace {

void check_delta(const mpq_class& delta, const char* where) {
  if (delta <= 0 || delta > mpq_class(1, 2))
    throw ParameterError(std::string(where) + ": delta must lie in (0, 1/2], got " + to_string(delta));
}

std::string violation_message(const ConditionReport& report) {
  const ConditionResult* r = report.binding();
  std::ostringstream os;
  os << "schedule hypotheses not met: condition " << r->name << " is " << to_string(r->verdict);
  if (r->first_failing) os << " at n=" << *r->first_failing;
  if (!r->lhs.empty()) os << " (" << r->lhs << ' ' << r->relation << ' ' << r->rhs << " required)";
  return os.str();
}

void require_conditions(const SequenceSpec& spec, const Schedule& schedule, const CheckpointChain& chain,
                        unsigned precision) {
  const ConditionReport report = check_conditions(spec, schedule, chain, CheckMode::chain, precision);
  if (!report.all_pass()) throw ConditionViolated(violation_message(report));
}

/// Levels l_1..l_N, index 0 unused.
std::vector<unsigned> levels(Sequence& seq, const ScheduleTable& tab) {
  std::vector<unsigned> lv(static_cast<std::size_t>(tab.size()) + 1, 0);
  for (std::int64_t v = 1; v <= tab.size(); ++v) {
    lv[v] = level(seq, v, tab.delta[v]);
    if (v > 1 && lv[v] < lv[v - 1])
      throw InternalBoundBreach("dyadic level decreased at n=" + std::to_string(v));
  }
  return lv;
}

mpq_class delta_sum(const ScheduleTable& tab, std::int64_t from, std::int64_t to) {
  mpq_class s = 0;
  for (std::int64_t v = from; v <= to; ++v) s += tab.delta[v];
  return s;
}

/// Survivors after processing indices 1..to, starting from the whole grid.
RunSet initial_block(Sequence& seq, const ScheduleTable& tab, const std::vector<unsigned>& lv, std::int64_t to) {
  RunSet s = RunSet::full(lv[1]);
  for (std::int64_t v = 1; v <= to; ++v) {
    s = s.refined(lv[v]);
    const TermEnclosure t = seq.at(v);
    s = s.minus(exclusion_cover(t, tab.delta[v], lv[v]));
  }
  return s;
}

/// Survivors of indices from+1..to inside one cell at level l_from.
RunSet local_block(Sequence& seq, const ScheduleTable& tab, const std::vector<unsigned>& lv, std::int64_t from,
                   std::int64_t to, const mpz_class& cell) {
  RunSet s = RunSet::from_runs(lv[from], {{cell, cell}});
  for (std::int64_t v = from + 1; v <= to && !s.empty(); ++v) {
    s = s.refined(lv[v]);
    const CellRun window{s.runs().front().first, s.runs().back().last};
    const TermEnclosure t = seq.at(v);
    s = s.minus(exclusion_cover(t, tab.delta[v], lv[v], window));
  }
  return s;
}

class Cursor {
 public:
  Cursor(RunSet candidates, PickPolicy policy, unsigned long seed)
      : cand_(std::move(candidates)), policy_(policy), rng_(gmp_randinit_default) {
    rng_.seed(seed);
    mid_ = (cand_.count() - 1) / 2;
  }

  const RunSet& candidates() const { return cand_; }
  const mpz_class& current() const { return current_; }

  bool next() {
    if (issued_ >= cand_.count()) return false;
    switch (policy_) {
      case PickPolicy::leftmost: {
        const CellRun& r = cand_.runs()[run_];
        current_ = r.first + offset_;
        if (current_ == r.last) {
          ++run_;
          offset_ = 0;
        } else {
          ++offset_;
        }
        break;
      }
      case PickPolicy::middle: {
        mpz_class idx;
        do {
          if (step_ % 2 == 1)
            idx = mid_ + (step_ + 1) / 2;
          else
            idx = mid_ - step_ / 2;
          ++step_;
        } while (idx < 0 || idx >= cand_.count());
        current_ = *cand_.nth_cell(idx);
        break;
      }
      case PickPolicy::random: {
        mpz_class idx;
        do {
          idx = rng_.get_z_range(cand_.count());
        } while (!tried_.insert(idx).second);
        current_ = *cand_.nth_cell(idx);
        break;
      }
    }
    ++issued_;
    return true;
  }

 private:
  RunSet cand_;
  PickPolicy policy_;
  gmp_randclass rng_;
  mpz_class issued_ = 0;
  mpz_class current_;
  std::size_t run_ = 0;
  mpz_class offset_ = 0;
  mpz_class mid_;
  mpz_class step_ = 0;
  std::set<mpz_class> tried_;
};

}  // namespace

unsigned level(const TermEnclosure& t, const mpq_class& delta) {
  check_delta(delta, "level");
  if (t.lower < 1) throw ParameterError("level: term must be >= 1, got " + to_string(t.lower));
  const mpq_class two_delta = 2 * delta;
  const long lo = floor_log2(mpq_class(t.lower / two_delta));
  if (!t.exact() && floor_log2(mpq_class(t.upper / two_delta)) != lo)
    throw PrecisionCeiling("level: term enclosure straddles a power of two");
  return static_cast<unsigned>(lo);
}

unsigned level(Sequence& seq, std::int64_t n, const mpq_class& delta) {
  for (;;) {
    try {
      return level(seq.at(n), delta);
    } catch (const PrecisionCeiling&) {
      seq.raise_precision();
    }
  }
}

RunSet exclusion_cover(const TermEnclosure& t, const mpq_class& delta, unsigned l, const std::optional<CellRun>& window) {
  check_delta(delta, "exclusion_cover");
  if (t.lower <= 0) throw ParameterError("exclusion_cover: term must be positive");
  const mpz_class grid = pow2_int(l);
  mpz_class w0 = 0;
  mpz_class w1 = grid - 1;
  if (window) {
    w0 = std::max(w0, window->first);
    w1 = std::min(w1, window->last);
  }
  RunSet::Builder out(l);
  if (w0 > w1) return std::move(out).finish();

  mpz_class a = 0;
  mpz_class a_max = ceil_of(t.upper);
  if (window) {
    const mpz_class lo_a = ceil_of(mpq_class(mpq_class(w0, grid) * t.lower - delta));
    const mpz_class hi_a = floor_of(mpq_class(mpq_class(w1 + 1, grid) * t.upper + delta));
    if (lo_a > a) a = lo_a;
    if (hi_a < a_max) a_max = hi_a;
  }

  // Right end of the cover of E(a): floor((a + d) 2^l / t_lo).
  // Left end: ceil((a - d) 2^l / t_hi) - 1, or 0 for a = 0.
  // Numerators advance by a constant step per a over a fixed denominator.
  const mpz_class& dn = delta.get_num();
  const mpz_class& dd = delta.get_den();
  const mpz_class scale_r = grid * t.lower.get_den();
  const mpz_class den_r = dd * t.lower.get_num();
  const mpz_class step_r = dd * scale_r;
  mpz_class num_r = (a * dd + dn) * scale_r;
  const mpz_class scale_l = grid * t.upper.get_den();
  const mpz_class den_l = dd * t.upper.get_num();
  const mpz_class step_l = dd * scale_l;
  mpz_class num_l = (a * dd - dn) * scale_l;

  mpz_class lo, hi;
  for (; a <= a_max; ++a, num_r += step_r, num_l += step_l) {
    mpz_fdiv_q(hi.get_mpz_t(), num_r.get_mpz_t(), den_r.get_mpz_t());
    if (a == 0) {
      lo = 0;
    } else {
      mpz_cdiv_q(lo.get_mpz_t(), num_l.get_mpz_t(), den_l.get_mpz_t());
      lo -= 1;
    }
    if (lo < w0) lo = w0;
    if (hi > w1) hi = w1;
    if (lo <= hi) out.add(lo, hi);
  }
  return std::move(out).finish();
}

bool SieveTrace::all_within() const {
  if (!initial_within) return false;
  auto ok = [](const auto& v) { return std::all_of(v.begin(), v.end(), [](const auto& r) { return r.within; }); };
  return ok(checkpoints) && ok(overlaps) && ok(blocks) && ok(covers);
}

bool SieveTrace::all_proven() const {
  if (!initial_within) return false;
  auto ok = [](const auto& v) { return std::all_of(v.begin(), v.end(), [](const auto& r) { return r.within; }); };
  auto proven = [](const auto& v) {
    return std::all_of(v.begin(), v.end(), [](const auto& r) { return r.within_proven; });
  };
  return ok(checkpoints) && ok(covers) && proven(overlaps) && proven(blocks);
}

SieveTrace run_sieve_full(const SequenceSpec& spec, const Schedule& schedule, const CheckpointChain& chain,
                          const SieveOptions& options) {
  spec.validate();
  require_conditions(spec, schedule, chain, options.precision);

  const std::int64_t N = chain.top();
  const ScheduleTable tab = tabulate(schedule, N);
  Sequence seq(spec, options.precision);
  const std::vector<unsigned> lv = levels(seq, tab);

  std::set<std::int64_t> frozen_needed;
  for (std::int64_t v = 1; v <= N; ++v)
    if (v > tab.h[v]) frozen_needed.insert(v - tab.h[v]);
  std::map<std::int64_t, RunSet> frozen;

  SieveTrace trace;
  std::string first_breach;
  auto breach = [&](const std::string& what) {
    if (first_breach.empty()) first_breach = what;
  };

  std::size_t k = 0;
  RunSet s = RunSet::full(lv[1]);
  for (std::int64_t v = 1; v <= N; ++v) {
    const TermEnclosure t = seq.at(v);
    const mpq_class& d = tab.delta[v];
    s = s.refined(lv[v]);
    const RunSet cover = exclusion_cover(t, d, lv[v]);

    CoverRecord cr;
    cr.n = v;
    cr.level = lv[v];
    cr.measure = cover.measure();
    cr.limit = (t.lower >= 2 ? 16 : 24) * d;
    cr.within = cr.measure <= cr.limit;
    if (!cr.within) breach("cover measure " + to_string(cr.measure) + " > " + to_string(cr.limit) + " at n=" + std::to_string(v));
    trace.covers.push_back(std::move(cr));

    if (v > tab.h[v]) {
      const std::int64_t m = v - tab.h[v];
      const RunSet& frozen_s = frozen.at(m);
      const mpq_class mu = frozen_s.measure();
      if (mu > 0) {
        OverlapRecord o;
        o.n = v;
        o.frozen_at = m;
        o.ratio = frozen_s.refined(lv[v]).intersect(cover).measure() / mu;
        o.limit = 4 * d;
        o.within = o.ratio <= o.limit;
        o.proven_limit = 8 * d;
        o.within_proven = o.ratio <= o.proven_limit;
        if (!o.within_proven)
          breach("overlap ratio " + to_string(o.ratio) + " > " + to_string(o.proven_limit) + " at n=" + std::to_string(v));
        trace.overlaps.push_back(std::move(o));
      }
      // Frozen sets older than the smallest gap still ahead are no longer needed.
      while (!frozen.empty() && frozen.begin()->first < m) frozen.erase(frozen.begin());
    }

    s = s.minus(cover);
    if (frozen_needed.count(v)) frozen.emplace(v, s);

    if (k < chain.nodes.size() && v == chain.nodes[k]) {
      CheckpointRecord c;
      c.n = v;
      c.level = lv[v];
      c.cells = s.count();
      c.runs = s.runs().size();
      c.measure = s.measure();
      c.bound = pow(schedule.eta, k + 1);
      c.within = c.measure >= c.bound;
      if (k == 0) {
        trace.initial_measure = c.measure;
        trace.initial_bound = 1 - 16 * delta_sum(tab, 1, v);
        trace.initial_within = trace.initial_measure >= trace.initial_bound;
        if (!trace.initial_within)
          breach("initial block measure " + to_string(trace.initial_measure) + " < " + to_string(trace.initial_bound));
      } else {
        const CheckpointRecord& prev = trace.checkpoints.back();
        BlockRecord b;
        b.from = prev.n;
        b.to = v;
        b.ratio = prev.measure > 0 ? mpq_class(c.measure / prev.measure) : mpq_class(0);
        const mpq_class inner = delta_sum(tab, prev.n + 1, v - 1);
        b.limit = 1 - 4 / schedule.eta * inner;
        b.within = b.ratio >= b.limit;
        b.proven_limit = 1 - 8 / schedule.eta * inner;
        b.within_proven = b.ratio >= b.proven_limit;
        if (!b.within_proven)
          breach("block ratio " + to_string(b.ratio) + " < " + to_string(b.proven_limit) + " over (" + std::to_string(b.from) +
                 ", " + std::to_string(b.to) + "]");
        trace.blocks.push_back(std::move(b));
      }
      if (!c.within)
        throw InternalBoundBreach("checkpoint measure " + to_string(c.measure) + " < " + to_string(c.bound) +
                                  " at n=" + std::to_string(v));
      trace.checkpoints.push_back(std::move(c));
      ++k;
    }
  }

  trace.final_measure = s.measure();
  trace.theorem_bound = pow(schedule.eta, chain.nodes.size());
  trace.survivors = std::move(s);
  if (options.strict && !first_breach.empty()) throw InternalBoundBreach(first_breach);
  return trace;
}

std::string Certificate::binary_expansion() const {
  std::string digits = numerator.get_str(2);
  if (digits.size() < bits) digits.insert(0, bits - digits.size(), '0');
  return "0." + digits;
}

Certificate extract_witness(const SequenceSpec& spec, const Schedule& schedule, const CheckpointChain& chain,
                            const PathOptions& options) {
  spec.validate();
  if (options.require_conditions) require_conditions(spec, schedule, chain, options.precision);

  const std::int64_t N = chain.top();
  const ScheduleTable tab = tabulate(schedule, N);
  Sequence seq(spec, options.precision);
  const std::vector<unsigned> lv = levels(seq, tab);
  const std::size_t K = chain.blocks();

  std::uint64_t frames_made = 0;
  auto seed_for = [&] { return options.seed + 0x9E3779B97F4A7C15ULL * frames_made++; };

  std::vector<std::unique_ptr<Cursor>> frames;
  frames.push_back(std::make_unique<Cursor>(initial_block(seq, tab, lv, chain.nodes[0]), options.pick, seed_for()));

  Certificate cert;
  while (!frames.empty()) {
    Cursor& f = *frames.back();
    if (!f.next()) {
      frames.pop_back();
      if (!frames.empty()) ++cert.backtracks;
      continue;
    }
    const std::size_t k = frames.size() - 1;
    if (k == K) break;
    if (++cert.nodes_explored > options.max_nodes)
      throw BudgetExceeded("path search exceeded " + std::to_string(options.max_nodes) + " nodes");
    RunSet children = local_block(seq, tab, lv, chain.nodes[k], chain.nodes[k + 1], f.current());
    if (!children.empty()) frames.push_back(std::make_unique<Cursor>(std::move(children), options.pick, seed_for()));
  }
  if (frames.empty())
    throw SearchExhausted("every branch of the path search died before n=" + std::to_string(N));

  for (std::size_t k = 0; k <= K; ++k) {
    PathStage st;
    st.n = chain.nodes[k];
    st.level = lv[st.n];
    st.cell = frames[k]->current();
    st.survivors = frames[k]->candidates().count();
    if (k > 0) st.guaranteed = schedule.eta * pow2(static_cast<long>(lv[st.n]) - lv[chain.nodes[k - 1]]);
    cert.stages.push_back(std::move(st));
  }
  const PathStage& last = cert.stages.back();
  cert.numerator = 2 * last.cell + 1;
  cert.bits = last.level + 1;
  cert.alpha = mpq_class(cert.numerator, pow2_int(cert.bits));
  cert.alpha.canonicalize();
  cert.schedule_preset = schedule.info.preset;
  cert.schedule_params = schedule.info.params;

  cert.margins = verify_certificate(spec, cert.alpha, [&](std::int64_t n) { return tab.delta[n]; }, N, options.precision);
  if (cert.margins.verdict == Verdict::undecidable)
    throw PrecisionCeiling("witness margin undecidable at n=" + std::to_string(*cert.margins.first_failure));
  if (cert.margins.verdict == Verdict::fail)
    throw InternalBoundBreach("witness fails its margin at n=" + std::to_string(*cert.margins.first_failure));
  return cert;
}

MarginReport verify_certificate(const SequenceSpec& spec, const mpq_class& alpha,
                                const std::function<mpq_class(std::int64_t)>& delta, std::int64_t N,
                                unsigned precision) {
  spec.validate();
  if (alpha < 0 || alpha > 1) throw ParameterError("verify_certificate: alpha must lie in [0, 1]");
  if (N < 1) throw ParameterError("verify_certificate: N must be >= 1");
  const mpq_class half(1, 2);
  Sequence seq(spec, precision);
  MarginReport rep;
  rep.margins.reserve(static_cast<std::size_t>(N));
  bool failed = false;
  bool undecided = false;
  for (std::int64_t n = 1; n <= N; ++n) {
    MarginRecord rec;
    rec.n = n;
    rec.delta = delta(n);
    for (;;) {
      const TermEnclosure t = seq.at(n);
      mpq_class hi_dist;
      if (t.exact()) {
        rec.distance = dist_to_int(mpq_class(t.lower * alpha));
        hi_dist = rec.distance;
      } else {
        const mpq_class x_lo = t.lower * alpha;
        const mpq_class x_hi = t.upper * alpha;
        const mpq_class d_lo = dist_to_int(x_lo);
        const mpq_class d_hi = dist_to_int(x_hi);
        rec.distance = ceil_of(x_lo) <= x_hi ? mpq_class(0) : std::min(d_lo, d_hi);
        hi_dist = ceil_of(mpq_class(x_lo - half)) + half <= x_hi ? half : std::max(d_lo, d_hi);
      }
      if (rec.distance > rec.delta) break;
      rec.ok = false;
      if (hi_dist <= rec.delta) {
        failed = true;
        break;
      }
      try {
        seq.raise_precision();
        rec.ok = true;
      } catch (const PrecisionCeiling&) {
        undecided = true;
        break;
      }
    }
    if (!rec.ok && !rep.first_failure) rep.first_failure = n;
    if (n == 1 || rec.distance < rep.min_margin) {
      rep.min_margin = rec.distance;
      rep.min_at = n;
    }
    rep.margins.push_back(std::move(rec));
  }
  rep.verdict = failed ? Verdict::fail : undecided ? Verdict::undecidable : Verdict::pass;
  return rep;
}

}  // namespace dsieve
