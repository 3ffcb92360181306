#include "dsieve/schedule.hpp"

#include <algorithm>
#include <memory>

#include "dsieve/errors.hpp"
#include "dsieve/rational.hpp"

namespace dsieve {

Schedule constant_schedule(std::int64_t h, const mpq_class& delta, const mpq_class& eta) {
  if (h < 1) throw ParameterError("constant h must be >= 1");
  if (!(delta > 0)) throw ParameterError("delta must be positive");
  if (!(eta > 0 && eta < 1)) throw ParameterError("eta must lie in (0,1)");
  Schedule s;
  s.h = [h](std::int64_t) { return h; };
  s.delta = [delta](std::int64_t) { return delta; };
  s.eta = eta;
  s.info.preset = "constant";
  s.info.params = {{"h", std::to_string(h)}, {"delta", to_string(delta)}, {"eta", to_string(eta)}};
  s.info.constant_h = h;
  s.info.constant_delta = delta;
  return s;
}

Schedule tabulated_schedule(std::vector<std::int64_t> h, std::vector<mpq_class> delta, const mpq_class& eta, ScheduleInfo info) {
  if (h.size() != delta.size()) throw ParameterError("tabulated schedule: h and delta differ in length");
  auto hs = std::make_shared<const std::vector<std::int64_t>>(std::move(h));
  auto ds = std::make_shared<const std::vector<mpq_class>>(std::move(delta));
  Schedule s;
  s.h = [hs](std::int64_t n) {
    if (n < 1 || static_cast<std::size_t>(n) > hs->size())
      throw ParameterError("schedule tabulated only for n <= " + std::to_string(hs->size()));
    return (*hs)[static_cast<std::size_t>(n - 1)];
  };
  s.delta = [ds](std::int64_t n) {
    if (n < 1 || static_cast<std::size_t>(n) > ds->size())
      throw ParameterError("schedule tabulated only for n <= " + std::to_string(ds->size()));
    return (*ds)[static_cast<std::size_t>(n - 1)];
  };
  s.eta = eta;
  s.info = std::move(info);
  return s;
}

ScheduleTable tabulate(const Schedule& s, std::int64_t n_max) {
  ScheduleTable t;
  t.h.assign(static_cast<std::size_t>(n_max + 1), 0);
  t.delta.assign(static_cast<std::size_t>(n_max + 1), 0);
  for (std::int64_t n = 1; n <= n_max; ++n) {
    const auto i = static_cast<std::size_t>(n);
    t.h[i] = s.h(n);
    t.delta[i] = s.delta(n);
    if (t.h[i] < 1) throw ParameterError("h(" + std::to_string(n) + ") < 1");
    if (!(t.delta[i] > 0)) throw ParameterError("delta(" + std::to_string(n) + ") must be positive");
  }
  return t;
}

CheckpointChain build_chain(const Schedule& s, std::int64_t N) {
  if (N < 1) throw ParameterError("chain top N must be >= 1");
  CheckpointChain chain;
  chain.nodes.push_back(N);
  std::int64_t n = N;
  while (true) {
    const std::int64_t hn = s.h(n);
    if (hn < 1) throw ParameterError("malformed h: h(" + std::to_string(n) + ") = " + std::to_string(hn));
    const std::int64_t next = n - hn;
    if (next < 1) break;
    chain.nodes.push_back(next);
    n = next;
  }
  std::reverse(chain.nodes.begin(), chain.nodes.end());
  return chain;
}

// ---------------------------------------------------------------------------

bool ConditionReport::all_pass() const {
  return std::all_of(results.begin(), results.end(), [](const ConditionResult& r) { return r.verdict == Verdict::pass; });
}

const ConditionResult& ConditionReport::get(const std::string& name) const {
  for (const auto& r : results)
    if (r.name == name) return r;
  throw ParameterError("no condition named " + name);
}

const ConditionResult* ConditionReport::binding() const {
  for (const auto& r : results)
    if (r.verdict != Verdict::pass) return &r;
  return nullptr;
}

namespace {

// Certified t_n * delta(m) >= t_m, i.e. t_n / t_m >= 1/delta(m).
Tri growth_holds(Sequence& seq, std::int64_t n, std::int64_t m, const mpq_class& delta_m) {
  while (true) {
    const mpq_class top_lo = seq.at(n).lower;
    const mpq_class top_hi = seq.at(n).upper;
    const TermEnclosure& base = seq.at(m);
    if (top_lo * delta_m >= base.upper) return Tri::yes;
    if (top_hi * delta_m < base.lower) return Tri::no;
    try {
      seq.raise_precision();
    } catch (const PrecisionCeiling&) {
      return Tri::unknown;
    }
  }
}

void fail(ConditionResult& r, Verdict v, std::int64_t at, std::string lhs, std::string rhs) {
  if (r.verdict != Verdict::pass) return;
  r.verdict = v;
  r.first_failing = at;
  r.lhs = std::move(lhs);
  r.rhs = std::move(rhs);
}

}  // namespace

ConditionReport check_conditions(const SequenceSpec& spec, const Schedule& schedule, const CheckpointChain& chain,
                                 CheckMode mode, unsigned precision) {
  if (chain.nodes.empty()) throw ParameterError("empty checkpoint chain");
  const mpq_class& eta = schedule.eta;
  if (!(eta > 0 && eta < 1)) throw ParameterError("eta must lie in (0,1)");
  const std::int64_t N = chain.top();
  const ScheduleTable tab = tabulate(schedule, N);
  for (std::size_t k = 0; k + 1 < chain.nodes.size(); ++k) {
    const std::int64_t next = chain.nodes[k + 1];
    if (next - tab.h[static_cast<std::size_t>(next)] != chain.nodes[k])
      throw ParameterError("chain does not satisfy n_k = n_{k+1} - h(n_{k+1}) at k=" + std::to_string(k));
  }

  ConditionReport report;
  report.mode = mode;
  report.block_limit = (1 - eta) * eta / 4;
  report.initial_limit = (1 - eta) / 16;

  std::vector<mpq_class> prefix(static_cast<std::size_t>(N + 1), 0);
  for (std::int64_t v = 1; v <= N; ++v)
    prefix[static_cast<std::size_t>(v)] = prefix[static_cast<std::size_t>(v - 1)] + tab.delta[static_cast<std::size_t>(v)];
  auto P = [&](std::int64_t v) -> const mpq_class& { return prefix[static_cast<std::size_t>(v)]; };
  auto H = [&](std::int64_t n) { return tab.h[static_cast<std::size_t>(n)]; };
  auto D = [&](std::int64_t n) -> const mpq_class& { return tab.delta[static_cast<std::size_t>(n)]; };

  // growth
  ConditionResult growth{"growth", Verdict::pass, {}, {}, {}, ">=", 0};
  Sequence seq(spec, precision);
  auto check_growth_at = [&](std::int64_t n) {
    const std::int64_t m = n - H(n);
    ++growth.checked;
    const Tri ok = growth_holds(seq, n, m, D(m));
    if (ok == Tri::yes || growth.verdict != Verdict::pass) return;
    std::string rhs;
    try {
      rhs = std::to_string(growth_index(seq, m, 1 / D(m), 1'000'000));
    } catch (const BudgetExceeded&) {
      rhs = ">1000000";
    } catch (const Error&) {
      rhs = "unavailable";
    }
    fail(growth, ok == Tri::no ? Verdict::fail : Verdict::undecidable, n, std::to_string(H(n)), rhs);
  };

  ConditionResult block{"block-sum", Verdict::pass, {}, {}, {}, "<=", 0};
  ConditionResult initial{"initial-sum", Verdict::pass, {}, {}, {}, "<=", 0};

  if (mode == CheckMode::chain) {
    for (std::size_t k = 1; k < chain.nodes.size(); ++k) check_growth_at(chain.nodes[k]);
    for (std::size_t k = 0; k + 1 < chain.nodes.size(); ++k) {
      const mpq_class s = P(chain.nodes[k + 1] - 1) - P(chain.nodes[k]);
      ++block.checked;
      if (s > report.block_limit) fail(block, Verdict::fail, chain.nodes[k + 1], to_string(s), to_string(report.block_limit));
    }
    ++initial.checked;
    const std::int64_t n0 = chain.nodes.front();
    if (P(n0) > report.initial_limit) fail(initial, Verdict::fail, n0, to_string(P(n0)), to_string(report.initial_limit));
  } else {
    for (std::int64_t n = 1; n <= N; ++n) {
      if (n > H(n)) {
        check_growth_at(n);
        const mpq_class s = P(n - 1) - P(n - H(n));
        ++block.checked;
        if (s > report.block_limit) fail(block, Verdict::fail, n, to_string(s), to_string(report.block_limit));
      } else {
        ++initial.checked;
        if (P(n) > report.initial_limit) fail(initial, Verdict::fail, n, to_string(P(n)), to_string(report.initial_limit));
      }
    }
  }

  ConditionResult gap{"monotone-gap", Verdict::pass, {}, {}, {}, ">=", 0};
  std::optional<std::int64_t> last_gap;
  for (std::int64_t n = 1; n <= N; ++n) {
    if (n <= H(n)) continue;
    ++gap.checked;
    const std::int64_t g = n - H(n);
    if (last_gap && g < *last_gap) fail(gap, Verdict::fail, n, std::to_string(g), std::to_string(*last_gap));
    last_gap = g;
  }

  ConditionResult mono{"monotone-delta", Verdict::pass, {}, {}, {}, "<=", 0};
  for (std::int64_t n = 1; n < N; ++n) {
    ++mono.checked;
    if (D(n + 1) > D(n)) fail(mono, Verdict::fail, n + 1, to_string(D(n + 1)), to_string(D(n)));
  }

  report.results = {growth, block, initial, gap, mono};
  return report;
}

// ---------------------------------------------------------------------------

namespace {

// floor(x) for an expression evaluated at increasing precision until decided.
std::int64_t certified_floor(const std::function<RealInterval(unsigned)>& eval) {
  for (unsigned p = kDefaultPrecision; p <= kMaxPrecision; p *= 2) {
    const RealInterval x = eval(p);
    const mpz_class lo = floor_of(x.lower());
    if (lo == floor_of(x.upper())) return lo.get_si();
  }
  throw PrecisionCeiling("floor undecidable at the precision ceiling");
}

}  // namespace

Schedule sublacunary_schedule(const mpq_class& beta, const mpq_class& eta, const mpq_class& c1, const mpq_class& c2) {
  if (beta < 0 || beta >= 1) throw ParameterError("sublacunary schedule needs beta in [0,1)");
  if (!(eta > 0 && eta < 1)) throw ParameterError("eta must lie in (0,1)");
  if (!(c1 > 0) || !(c2 > 0)) throw ParameterError("c1 and c2 must be positive");
  Schedule s;
  s.h = [beta, c1, c2](std::int64_t n) {
    const std::int64_t f = certified_floor([&](unsigned p) {
      const RealInterval x = RealInterval::of(mpq_class(n) + c2, p);
      return RealInterval::of(c1, p) * RealInterval::of(static_cast<long>(n), p).pow(beta) * x.log();
    });
    return std::max<std::int64_t>(1, f);
  };
  const mpq_class numerator = (1 - beta) * (1 - eta) * eta;
  s.delta = [beta, c1, c2, numerator](std::int64_t n) {
    const unsigned p = kDefaultPrecision;
    const RealInterval x = RealInterval::of(mpq_class(n) + c2, p);
    const RealInterval d = RealInterval::of(numerator, p) / (RealInterval::of(32 * c1, p) * x.pow(beta) * x.log());
    return round_up_dyadic(d.upper(), kDeltaBits);
  };
  s.eta = eta;
  s.info.preset = "example-a";
  s.info.params = {{"beta", to_string(beta)}, {"eta", to_string(eta)}, {"c1", to_string(c1)}, {"c2", to_string(c2)}};
  return s;
}

Schedule preset_example_a(const SublacunaryParams& params, const SequenceSpec& spec, std::int64_t n_probe,
                          ConstantSearch budget) {
  if (params.beta < 0 || params.beta >= 1) throw ParameterError("example-a schedule requires 0 <= beta < 1");
  if (!(params.gamma > 0)) throw ParameterError("example-a schedule requires gamma > 0");
  if (!(params.eta > 0 && params.eta < 1)) throw ParameterError("eta must lie in (0,1)");
  if (n_probe < 1) throw ParameterError("probe range must be >= 1");

  const GrowthReport growth = verify_growth_class(spec, SublacunaryClass{params.gamma, params.beta}, 1, n_probe);
  if (growth.verdict != Verdict::pass)
    throw ParameterError("sequence is not certified sublacunary(gamma=" + to_string(params.gamma) + ", beta=" +
                         to_string(params.beta) + ") at n=" + std::to_string(growth.first_violation.value_or(0)));

  std::string binding = "none";
  for (unsigned i = 0; i <= budget.max_c1_doublings; ++i) {
    const mpq_class c1 = pow2(static_cast<long>(i));
    for (unsigned j = 1; j <= budget.max_c2_doublings; ++j) {
      const mpq_class c2 = pow2(static_cast<long>(j));
      Schedule s = sublacunary_schedule(params.beta, params.eta, c1, c2);
      const CheckpointChain chain = build_chain(s, n_probe);
      const ConditionReport report = check_conditions(spec, s, chain, CheckMode::universal);
      if (report.all_pass()) {
        s.info.params["gamma"] = to_string(params.gamma);
        s.info.params["n_probe"] = std::to_string(n_probe);
        return s;
      }
      binding = report.binding()->name;
    }
  }
  throw ParameterError("no (c1, c2) within the doubling budget passes; binding condition: " + binding);
}

// ---------------------------------------------------------------------------

DeltaShape shape_constant() {
  return {"const", [](std::int64_t, unsigned p) { return RealInterval::of(1L, p); }};
}

DeltaShape shape_inv_sqrt_log() {
  return {"inv-sqrt-log", [](std::int64_t n, unsigned p) {
            const RealInterval one = RealInterval::of(1L, p);
            return one / (RealInterval::of(n + 1, p).sqrt() * RealInterval::of(n + 2, p).log());
          }};
}

DeltaShape shape_inv_log() {
  return {"inv-log", [](std::int64_t n, unsigned p) { return RealInterval::of(1L, p) / RealInterval::of(n + 2, p).log(); }};
}

DeltaShape shape_inv_pow_log(const mpq_class& beta) {
  return {"inv-pow-log:" + to_string(beta), [beta](std::int64_t n, unsigned p) {
            return RealInterval::of(1L, p) / (RealInterval::of(n + 1, p).pow(beta) * RealInterval::of(n + 2, p).log());
          }};
}

namespace {

std::vector<mpq_class> shape_upper(const DeltaShape& shape, std::int64_t N) {
  std::vector<mpq_class> g(static_cast<std::size_t>(N));
  for (std::int64_t n = 1; n <= N; ++n) {
    g[static_cast<std::size_t>(n - 1)] = shape.g(n, kDefaultPrecision).upper();
    if (!(g[static_cast<std::size_t>(n - 1)] > 0)) throw ParameterError("delta shape must be positive");
  }
  return g;
}

Schedule kappa_schedule_from(Sequence& seq, const DeltaShape& shape, const std::vector<mpq_class>& g_upper,
                             const mpq_class& kappa, const mpq_class& eta) {
  const auto N = static_cast<std::int64_t>(g_upper.size());
  std::vector<mpq_class> delta(g_upper.size());
  for (std::size_t i = 0; i < g_upper.size(); ++i) {
    delta[i] = round_up_dyadic(kappa * g_upper[i], kDeltaBits);
    // Both candidates dominate kappa*g(n) for a non-increasing g.
    if (i > 0 && delta[i - 1] < delta[i]) delta[i] = delta[i - 1];
  }
  auto D = [&](std::int64_t m) -> const mpq_class& { return delta[static_cast<std::size_t>(m - 1)]; };

  std::vector<std::int64_t> h(g_upper.size());
  std::int64_t m = 0;
  for (std::int64_t n = 1; n <= N; ++n) {
    while (m + 1 < n && growth_holds(seq, n, m + 1, D(m + 1)) == Tri::yes) ++m;
    h[static_cast<std::size_t>(n - 1)] = m >= 1 ? n - m : n;
  }

  ScheduleInfo info;
  info.preset = "custom-kappa";
  info.params = {{"kappa", to_string(kappa)}, {"shape", shape.name}, {"eta", to_string(eta)}, {"N", std::to_string(N)}};
  return tabulated_schedule(std::move(h), std::move(delta), eta, std::move(info));
}

}  // namespace

Schedule kappa_schedule(const SequenceSpec& spec, const DeltaShape& shape, const mpq_class& kappa, const mpq_class& eta,
                        std::int64_t N) {
  if (N < 1) throw ParameterError("N must be >= 1");
  if (!(kappa > 0)) throw ParameterError("kappa must be positive");
  if (!(eta > 0 && eta < 1)) throw ParameterError("eta must lie in (0,1)");
  Sequence seq(spec);
  return kappa_schedule_from(seq, shape, shape_upper(shape, N), kappa, eta);
}

Schedule autotune_kappa(const SequenceSpec& spec, const DeltaShape& shape, const mpq_class& eta, std::int64_t N) {
  if (N < 1) throw ParameterError("N must be >= 1");
  if (!(eta > 0 && eta < 1)) throw ParameterError("eta must lie in (0,1)");
  Sequence seq(spec);
  const std::vector<mpq_class> g = shape_upper(shape, N);
  std::string binding = "none";
  for (long m = 0; m <= 64; ++m) {
    const mpq_class kappa = pow2(-m);
    Schedule s = kappa_schedule_from(seq, shape, g, kappa, eta);
    const ConditionReport report = check_conditions(spec, s, build_chain(s, N), CheckMode::universal);
    if (report.all_pass()) return s;
    binding = report.binding()->name;
  }
  throw ParameterError("no kappa >= 2^-64 passes for shape " + shape.name + "; binding condition: " + binding);
}

}  // namespace dsieve
