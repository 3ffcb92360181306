#include "dsieve/dimension.hpp"

#include <algorithm>
#include <sstream>

#include "dsieve/errors.hpp"
#include "dsieve/rational.hpp"

namespace dsieve {

namespace {

struct Closed {
  RealInterval ratio;
  std::string family;
};

std::vector<RealInterval> eggleston_terms(const EgglestonData& d, const mpq_class& nu, std::size_t k_max, unsigned p) {
  std::vector<RealInterval> out;
  mpq_class prev_width = 1;
  for (std::size_t k = 1; k <= std::min(k_max, d.stages.size()); ++k) {
    const EgglestonStage& s = d.stages[k - 1];
    const RealInterval num = RealInterval::of(mpq_class(prev_width / s.width), p);
    const RealInterval den = RealInterval::of(mpq_class(s.count), p) * RealInterval::of(s.width, p).pow(nu);
    out.push_back(num / den);
    prev_width = s.width;
  }
  return out;
}

RealInterval chain_x(Sequence& seq, const Schedule& schedule, std::int64_t n, unsigned p) {
  const TermEnclosure t = seq.at(n);
  const mpq_class d = schedule.delta(n);
  return RealInterval::hull(mpq_class(t.lower / d), mpq_class(t.upper / d), p);
}

std::vector<RealInterval> chain_terms(const ChainSource& c, const mpq_class& nu, std::size_t k_max, unsigned p) {
  std::vector<RealInterval> out;
  Sequence seq(c.spec, p);
  const std::size_t K = std::min(k_max, c.chain.blocks());
  if (K == 0) return out;
  RealInterval x_prev = chain_x(seq, c.schedule, c.chain.nodes[0], p);
  for (std::size_t k = 1; k <= K; ++k) {
    const RealInterval x = chain_x(seq, c.schedule, c.chain.nodes[k], p);
    const RealInterval eta_k = RealInterval::of(pow(c.schedule.eta, k), p);
    out.push_back(x.pow(nu) / (x_prev * eta_k));
    x_prev = x;
  }
  return out;
}

std::optional<Closed> closed_ratio(const SeriesSource& source, const mpq_class& nu, unsigned p) {
  if (const auto* e = std::get_if<EgglestonData>(&source)) {
    if (!e->family) return std::nullopt;
    return Closed{RealInterval::of(mpq_class(e->family->sigma), p).pow(nu) / RealInterval::of(mpq_class(e->family->m), p),
                  "eggleston-geometric"};
  }
  const auto& c = std::get<ChainSource>(source);
  const auto* g = std::get_if<Geometric>(&c.spec.kind);
  if (!g || !c.schedule.info.constant_h || !c.schedule.info.constant_delta) return std::nullopt;
  const std::int64_t h = *c.schedule.info.constant_h;
  for (std::size_t k = 1; k < c.chain.nodes.size(); ++k)
    if (c.chain.nodes[k] - c.chain.nodes[k - 1] != h) return std::nullopt;
  const mpq_class step = pow(g->ratio, static_cast<unsigned long>(h));
  return Closed{RealInterval::of(step, p).pow(mpq_class(nu - 1)) / RealInterval::of(c.schedule.eta, p),
                "stationary-chain"};
}

}  // namespace

bool EgglestonData::well_formed() const {
  mpq_class prev_width = 1;
  mpz_class prev_count = 1;
  for (const auto& s : stages) {
    if (s.width <= 0 || s.width >= prev_width) return false;
    if (s.children < 1 || s.count != prev_count * s.children) return false;
    prev_width = s.width;
    prev_count = s.count;
  }
  return true;
}

EgglestonData eggleston_geometric(const mpz_class& sigma, const mpz_class& m, std::size_t stages) {
  if (sigma < 2 || m < 1) throw ParameterError("eggleston_geometric: need sigma >= 2 and m >= 1");
  EgglestonData d;
  d.family = GeometricFamily{sigma, m};
  mpq_class width = 1;
  mpz_class count = 1;
  for (std::size_t k = 1; k <= stages; ++k) {
    width /= sigma;
    count *= m;
    d.stages.push_back({width, count, m});
  }
  return d;
}

EgglestonData harvest(const Certificate& cert) {
  EgglestonData d;
  mpz_class count = 1;
  for (const auto& st : cert.stages) {
    count *= st.survivors;
    d.stages.push_back({pow2(-static_cast<long>(st.level)), count, st.survivors});
  }
  return d;
}

std::string to_string(SeriesVerdict v) {
  switch (v) {
    case SeriesVerdict::convergent:
      return "certified-convergent";
    case SeriesVerdict::divergent:
      return "certified-divergent";
    case SeriesVerdict::inconclusive:
      break;
  }
  return "inconclusive";
}

SeriesReport series_terms(const SeriesSource& source, const mpq_class& nu, std::size_t k_max, unsigned precision) {
  if (nu <= 0 || nu > 1) throw ParameterError("series_terms: nu must lie in (0, 1], got " + to_string(nu));
  if (const auto* e = std::get_if<EgglestonData>(&source); e && !e->well_formed())
    throw ParameterError("series_terms: Eggleston data is not a nested construction");

  SeriesReport rep;
  rep.nu = nu;
  const std::vector<RealInterval> raw = std::holds_alternative<EgglestonData>(source)
                                            ? eggleston_terms(std::get<EgglestonData>(source), nu, k_max, precision)
                                            : chain_terms(std::get<ChainSource>(source), nu, k_max, precision);
  mpq_class sum_lo = 0, sum_hi = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    SeriesTerm t;
    t.k = i + 1;
    t.lower = raw[i].lower();
    t.upper = raw[i].upper();
    if (i > 0) {
      t.ratio_lower = t.lower / rep.terms.back().upper;
      t.ratio_upper = t.upper / rep.terms.back().lower;
    }
    sum_lo += t.lower;
    sum_hi += t.upper;
    t.partial_lower = sum_lo;
    t.partial_upper = sum_hi;
    rep.terms.push_back(std::move(t));
  }

  const std::optional<Closed> closed = closed_ratio(source, nu, precision);
  if (!closed) {
    rep.family = "none";
    rep.note = "no closed-form ratio bound for this source; diagnostics only";
    return rep;
  }
  rep.family = closed->family;
  rep.closed_ratio_lower = closed->ratio.lower();
  rep.closed_ratio_upper = closed->ratio.upper();
  if (rep.terms.empty()) {
    rep.note = "no terms computed";
    return rep;
  }
  if (*rep.closed_ratio_lower >= 1) {
    rep.verdict = SeriesVerdict::divergent;
    rep.note = "term ratio >= 1 from k = 1, terms bounded below by term_1";
    return rep;
  }
  if (*rep.closed_ratio_upper >= 1) {
    rep.note = "closed-form ratio enclosure contains 1";
    return rep;
  }
  mpq_class q = *rep.closed_ratio_upper;
  for (const auto& t : rep.terms)
    if (t.ratio_upper && *t.ratio_upper > q) q = *t.ratio_upper;
  if (q >= 1) {
    rep.note = "evaluated ratios reach 1 within enclosure width";
    return rep;
  }
  rep.verdict = SeriesVerdict::convergent;
  rep.k0 = 1;
  rep.q = q;
  const SeriesTerm& first = rep.terms.front();
  rep.tail_bound = first.partial_upper + first.upper * q / (1 - q);
  return rep;
}

DimensionReport dimension_lower_bound(const SeriesSource& source, const mpq_class& epsilon, std::size_t k_max,
                                      unsigned precision) {
  if (epsilon < pow2(-20) || epsilon >= 1) throw ParameterError("dimension_lower_bound: epsilon must lie in [2^-20, 1)");
  DimensionReport rep;
  rep.epsilon = epsilon;
  auto probe = [&](const mpq_class& nu) {
    const SeriesVerdict v = series_terms(source, nu, k_max, precision).verdict;
    rep.probes.push_back({nu, v});
    if (v == SeriesVerdict::inconclusive) rep.inconclusive.push_back(nu);
    return v;
  };
  mpq_class lo = 0, hi = 1;
  if (probe(hi) == SeriesVerdict::convergent) {
    rep.nu_star = rep.nu_upper = 1;
    return rep;
  }
  while (hi - lo > epsilon) {
    const mpq_class mid = (lo + hi) / 2;
    if (probe(mid) == SeriesVerdict::convergent)
      lo = mid;
    else
      hi = mid;
  }
  rep.nu_star = lo;
  rep.nu_upper = hi;
  return rep;
}

std::string series_csv(const SeriesReport& report) {
  std::ostringstream os;
  os << "k,term,ratio,partial_sum\n";
  for (const auto& t : report.terms) {
    os << t.k << ',' << to_decimal(mpq_class((t.lower + t.upper) / 2), 20) << ',';
    if (t.ratio_lower) os << to_decimal(mpq_class((*t.ratio_lower + *t.ratio_upper) / 2), 20);
    os << ',' << to_decimal(mpq_class((t.partial_lower + t.partial_upper) / 2), 20) << '\n';
  }
  return os.str();
}

}  // namespace dsieve
