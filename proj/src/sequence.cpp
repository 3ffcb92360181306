#include "dsieve/sequence.hpp"

#include <algorithm>
#include <sstream>

#include "dsieve/errors.hpp"
#include "dsieve/rational.hpp"

namespace dsieve {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

unsigned bit_length(std::int64_t n) {
  unsigned b = 0;
  while (n > 0) {
    ++b;
    n >>= 1;
  }
  return b;
}

// Enclosure relative width must not exceed 2^-p.
void check_width(const TermEnclosure& t, std::int64_t n) {
  if (t.exact()) return;
  if ((t.upper - t.lower) * pow2(static_cast<long>(t.precision)) > t.lower)
    throw InternalBoundBreach("enclosure of t_" + std::to_string(n) + " wider than 2^-" + std::to_string(t.precision));
}

TermEnclosure from_interval(const RealInterval& r, unsigned precision) {
  return TermEnclosure{r.lower(), r.upper(), precision};
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    case Verdict::undecidable:
      return "undecidable";
  }
  return "?";
}

void SequenceSpec::validate() const {
  std::visit(overloaded{
                 [](const ExplicitList& s) {
                   if (s.terms.empty()) throw ParameterError("explicit sequence has no terms");
                   if (s.terms.front() < 1) throw ParameterError("explicit sequence needs t_1 >= 1");
                   for (std::size_t i = 1; i < s.terms.size(); ++i)
                     if (!(s.terms[i] > s.terms[i - 1]))
                       throw ParameterError("explicit sequence is not strictly increasing at n=" + std::to_string(i + 1));
                 },
                 [](const Geometric& s) {
                   if (!(s.ratio > 1)) throw ParameterError("geometric ratio must exceed 1");
                   if (s.first < 1) throw ParameterError("geometric first term must be >= 1");
                 },
                 [](const Affine& s) {
                   if (!(s.slope > 0)) throw ParameterError("affine slope must be positive");
                   if (s.slope + s.offset < 1) throw ParameterError("affine sequence needs t_1 >= 1");
                 },
                 [](const Sublacunary& s) {
                   if (!(s.gamma > 0)) throw ParameterError("sublacunary gamma must be positive");
                   if (s.beta < 0 || s.beta >= 1) throw ParameterError("sublacunary beta must lie in [0,1)");
                   if (s.first < 1) throw ParameterError("sublacunary first term must be >= 1");
                 },
                 [](const Subexponential& s) {
                   if (s.beta <= 0 || s.beta >= 1) throw ParameterError("subexponential beta must lie in (0,1)");
                   if (!(s.scale > 0)) throw ParameterError("subexponential scale must be positive");
                   if (certainly_ge(RealInterval::of(s.scale) * RealInterval::of(1L).exp(), mpq_class(1)) != Tri::yes)
                     throw ParameterError("subexponential sequence needs t_1 = scale*e >= 1");
                 },
                 [](const SmoothNumbers& s) {
                   if (s.primes.empty()) throw ParameterError("smooth-number generator needs at least one prime");
                   for (std::size_t i = 0; i < s.primes.size(); ++i) {
                     if (s.primes[i] < 2) throw ParameterError("smooth-number generators must be >= 2");
                     if (i > 0 && s.primes[i] <= s.primes[i - 1])
                       throw ParameterError("smooth-number generators must be strictly increasing");
                   }
                 },
             },
             kind);
}

bool SequenceSpec::exact() const {
  return !std::holds_alternative<Sublacunary>(kind) && !std::holds_alternative<Subexponential>(kind);
}

std::string SequenceSpec::kind_name() const {
  return std::visit(overloaded{
                        [](const ExplicitList&) { return std::string("explicit"); },
                        [](const Geometric&) { return std::string("geometric"); },
                        [](const Affine&) { return std::string("affine"); },
                        [](const Sublacunary&) { return std::string("sublacunary"); },
                        [](const Subexponential&) { return std::string("subexponential"); },
                        [](const SmoothNumbers&) { return std::string("smooth"); },
                    },
                    kind);
}

std::string SequenceSpec::describe() const {
  std::ostringstream os;
  os << kind_name() << '(';
  std::visit(overloaded{
                 [&](const ExplicitList& s) { os << "count=" << s.terms.size(); },
                 [&](const Geometric& s) { os << "q=" << to_string(s.ratio) << ",t1=" << to_string(s.first); },
                 [&](const Affine& s) { os << "slope=" << to_string(s.slope) << ",offset=" << to_string(s.offset); },
                 [&](const Sublacunary& s) {
                   os << "gamma=" << to_string(s.gamma) << ",beta=" << to_string(s.beta) << ",t1=" << to_string(s.first);
                 },
                 [&](const Subexponential& s) { os << "beta=" << to_string(s.beta) << ",scale=" << to_string(s.scale); },
                 [&](const SmoothNumbers& s) {
                   os << "primes=";
                   for (std::size_t i = 0; i < s.primes.size(); ++i) os << (i ? "," : "") << s.primes[i];
                 },
             },
             kind);
  os << ')';
  return os.str();
}

// ---------------------------------------------------------------------------

SmoothGenerator::SmoothGenerator(std::vector<unsigned long> primes) : primes_(std::move(primes)) {
  cursor_.assign(primes_.size(), 0);
  candidate_.reserve(primes_.size());
  for (unsigned long p : primes_) candidate_.emplace_back(p);
}

const mpz_class& SmoothGenerator::next() {
  if (out_.empty()) {
    out_.emplace_back(1);
    return out_.back();
  }
  const mpz_class smallest = *std::min_element(candidate_.begin(), candidate_.end());
  out_.push_back(smallest);
  for (std::size_t i = 0; i < primes_.size(); ++i) {
    if (candidate_[i] == smallest) {
      ++cursor_[i];
      candidate_[i] = out_[cursor_[i]] * primes_[i];
    }
  }
  return out_.back();
}

std::vector<mpz_class> smooth_terms(SmoothCount limit, const std::vector<unsigned long>& primes) {
  SequenceSpec{SmoothNumbers{primes}}.validate();
  SmoothGenerator gen(primes);
  while (gen.produced() < limit.count) gen.next();
  return gen.values();
}

std::vector<mpz_class> smooth_terms(SmoothBound limit, const std::vector<unsigned long>& primes) {
  SequenceSpec{SmoothNumbers{primes}}.validate();
  SmoothGenerator gen(primes);
  std::vector<mpz_class> out;
  if (limit.bound < 1) return out;
  while (true) {
    const mpz_class& v = gen.next();
    if (v > limit.bound) break;
    out.push_back(v);
  }
  return out;
}

// ---------------------------------------------------------------------------

Sequence::Sequence(SequenceSpec spec, unsigned precision) : spec_(std::move(spec)), precision_(precision) {
  spec_.validate();
  if (precision_ < 32) throw ParameterError("precision must be at least 32 bits");
  if (precision_ > kMaxPrecision) throw PrecisionCeiling("requested precision above ceiling");
  exact_ = spec_.exact();
  if (const auto* s = std::get_if<SmoothNumbers>(&spec_.kind)) smooth_.emplace(s->primes);
}

void Sequence::raise_precision() {
  if (precision_ * 2 > kMaxPrecision)
    throw PrecisionCeiling("comparison undecidable at " + std::to_string(precision_) + " bits for " + spec_.describe());
  precision_ *= 2;
  if (!exact_) {
    cache_.clear();
    running_.reset();
  }
}

const TermEnclosure& Sequence::at(std::int64_t n) {
  if (n < 1) throw ParameterError("sequence index must be >= 1");
  if (static_cast<std::size_t>(n) > cache_.size()) extend_to(n);
  return cache_[static_cast<std::size_t>(n - 1)];
}

void Sequence::extend_to(std::int64_t n) {
  const auto target = static_cast<std::size_t>(n);
  std::visit(overloaded{
                 [&](const ExplicitList& s) {
                   if (target > s.terms.size())
                     throw ParameterError("explicit sequence has only " + std::to_string(s.terms.size()) + " terms; t_" +
                                          std::to_string(n) + " requested");
                   while (cache_.size() < target) {
                     const mpq_class& t = s.terms[cache_.size()];
                     cache_.push_back({t, t, precision_});
                   }
                 },
                 [&](const Geometric& s) {
                   while (cache_.size() < target) {
                     mpq_class t = cache_.empty() ? s.first : mpq_class(cache_.back().lower * s.ratio);
                     cache_.push_back({t, t, precision_});
                   }
                 },
                 [&](const Affine& s) {
                   while (cache_.size() < target) {
                     mpq_class t = s.slope * static_cast<long>(cache_.size() + 1) + s.offset;
                     cache_.push_back({t, t, precision_});
                   }
                 },
                 [&](const Sublacunary& s) {
                   const unsigned w = precision_ + 96;
                   if (!running_) running_ = RealInterval::of(s.first, w);
                   const RealInterval one = RealInterval::of(1L, w);
                   const RealInterval gamma = RealInterval::of(s.gamma, w);
                   while (cache_.size() < target) {
                     if (!cache_.empty()) {
                       const auto k = static_cast<long>(cache_.size());  // step k -> k+1
                       const RealInterval factor = one + gamma * RealInterval::of(k, w).pow(-s.beta);
                       running_ = *running_ * factor;
                     }
                     cache_.push_back(from_interval(*running_, precision_));
                     check_width(cache_.back(), static_cast<std::int64_t>(cache_.size()));
                   }
                 },
                 [&](const Subexponential& s) {
                   while (cache_.size() < target) {
                     const auto k = static_cast<std::int64_t>(cache_.size() + 1);
                     const unsigned w = precision_ + 64 + bit_length(k);
                     const RealInterval t = RealInterval::of(s.scale, w) * RealInterval::of(static_cast<long>(k), w).pow(s.beta).exp();
                     cache_.push_back(from_interval(t, precision_));
                     check_width(cache_.back(), k);
                   }
                 },
                 [&](const SmoothNumbers&) {
                   while (smooth_->produced() < target) smooth_->next();
                   while (cache_.size() < target) {
                     mpq_class t(smooth_->values()[cache_.size()]);
                     cache_.push_back({t, t, precision_});
                   }
                 },
             },
             spec_.kind);
}

TermEnclosure term(const SequenceSpec& spec, std::int64_t n, unsigned precision) {
  Sequence seq(spec, precision);
  return seq.at(n);
}

// ---------------------------------------------------------------------------

std::int64_t growth_index(Sequence& seq, std::int64_t n, const mpq_class& tau, std::int64_t max_steps) {
  if (n < 1) throw ParameterError("growth index needs n >= 1");
  // Strict increase gives t_{n+1}/t_n > 1 >= tau.
  if (tau <= 1) return 1;
  for (std::int64_t k = 1; k <= max_steps; ++k) {
    while (true) {
      const mpq_class base_hi = seq.at(n).upper;
      const mpq_class base_lo = seq.at(n).lower;
      const TermEnclosure& later = seq.at(n + k);
      if (later.lower >= tau * base_hi) return k;
      if (later.upper < tau * base_lo) break;
      seq.raise_precision();
    }
  }
  throw BudgetExceeded("growth index search exceeded " + std::to_string(max_steps) + " steps");
}

std::int64_t growth_index(const SequenceSpec& spec, std::int64_t n, const mpq_class& tau) {
  Sequence seq(spec);
  return growth_index(seq, n, tau);
}

// ---------------------------------------------------------------------------

namespace {

GrowthReport verify_sublacunary(const SequenceSpec& spec, const SublacunaryClass& cls, std::int64_t lo, std::int64_t hi,
                                unsigned precision) {
  GrowthReport report;
  if (cls.beta < 0 || cls.beta >= 1) throw ParameterError("sublacunary class needs beta in [0,1)");
  if (!(cls.gamma > 0)) throw ParameterError("sublacunary class needs gamma > 0");

  // The generator's own ratio is exactly 1 + gamma_s n^-beta_s, which dominates
  // any class with gamma <= gamma_s and beta >= beta_s.
  if (const auto* s = std::get_if<Sublacunary>(&spec.kind); s && s->gamma >= cls.gamma && s->beta <= cls.beta) {
    const RealInterval scale = RealInterval::of(static_cast<long>(lo), precision).pow(cls.beta - s->beta);
    report.fitted.push_back(s->gamma * scale.lower());
    return report;
  }

  Sequence seq(spec, precision);
  std::optional<mpq_class> fitted;
  for (std::int64_t n = lo; n <= hi; ++n) {
    while (true) {
      const unsigned w = seq.precision() + 32;
      const TermEnclosure a = seq.at(n);
      const TermEnclosure& b = seq.at(n + 1);
      const mpq_class ratio_lo = b.lower / a.upper;
      const mpq_class ratio_hi = b.upper / a.lower;
      const RealInterval npow = RealInterval::of(static_cast<long>(n), w).pow(cls.beta);
      const RealInterval rhs = RealInterval::of(1L, w) + RealInterval::of(cls.gamma, w) / npow;
      const Tri ok = certainly_ge(RealInterval::hull(ratio_lo, ratio_hi, w), rhs);
      if (ok == Tri::unknown && seq.precision() * 2 <= kMaxPrecision) {
        seq.raise_precision();
        continue;
      }
      // Largest gamma certified at this n: (ratio_lo - 1) * n^beta, rounded down.
      const mpq_class g = (ratio_lo - 1) * (ratio_lo >= 1 ? npow.lower() : npow.upper());
      if (!fitted || g < *fitted) fitted = g;
      if (ok != Tri::yes && report.verdict == Verdict::pass) {
        report.verdict = ok == Tri::no ? Verdict::fail : Verdict::undecidable;
        report.first_violation = n;
        report.violated_side = "ratio";
      }
      break;
    }
  }
  if (fitted) report.fitted.push_back(*fitted);
  return report;
}

GrowthReport verify_subexponential(const SequenceSpec& spec, const SubexponentialClass& cls, std::int64_t lo,
                                   std::int64_t hi, unsigned precision) {
  GrowthReport report;
  if (cls.beta <= 0 || cls.beta >= 1) throw ParameterError("subexponential class needs beta in (0,1)");
  Sequence seq(spec, precision);
  std::optional<mpq_class> fit_lo, fit_hi;
  for (std::int64_t n = lo; n <= hi; ++n) {
    while (true) {
      const unsigned w = seq.precision() + 64 + bit_length(n);
      const TermEnclosure& t = seq.at(n);
      const RealInterval e = RealInterval::of(static_cast<long>(n), w).pow(cls.beta).exp();
      const RealInterval r = RealInterval::hull(t.lower, t.upper, w) / e;
      const Tri lower_ok = cls.gamma1 ? certainly_ge(r, *cls.gamma1) : Tri::yes;
      const Tri upper_ok = cls.gamma2 ? certainly_le(r, *cls.gamma2) : Tri::yes;
      if ((lower_ok == Tri::unknown || upper_ok == Tri::unknown) && seq.precision() * 2 <= kMaxPrecision) {
        seq.raise_precision();
        continue;
      }
      if (!fit_lo || r.lower() < *fit_lo) fit_lo = r.lower();
      if (!fit_hi || r.upper() > *fit_hi) fit_hi = r.upper();
      if (report.verdict == Verdict::pass) {
        for (auto [ok, side] : {std::pair{lower_ok, "lower"}, std::pair{upper_ok, "upper"}}) {
          if (ok == Tri::yes) continue;
          report.verdict = ok == Tri::no ? Verdict::fail : Verdict::undecidable;
          report.first_violation = n;
          report.violated_side = side;
          break;
        }
      }
      break;
    }
  }
  if (fit_lo) report.fitted = {*fit_lo, *fit_hi};
  return report;
}

}  // namespace

GrowthReport verify_growth_class(const SequenceSpec& spec, const GrowthClass& cls, std::int64_t n_lo, std::int64_t n_hi,
                                 unsigned precision) {
  if (n_lo < 1 || n_hi < n_lo) throw ParameterError("growth check range must satisfy 1 <= n_lo <= n_hi");
  return std::visit(overloaded{
                        [&](const SublacunaryClass& c) { return verify_sublacunary(spec, c, n_lo, n_hi, precision); },
                        [&](const SubexponentialClass& c) { return verify_subexponential(spec, c, n_lo, n_hi, precision); },
                    },
                    cls);
}

}  // namespace dsieve
