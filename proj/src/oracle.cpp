#include "dsieve/oracle.hpp"

#include <algorithm>
#include <utility>

#include "dsieve/errors.hpp"
#include "dsieve/rational.hpp"

namespace dsieve {

namespace {

using Segment = std::pair<mpz_class, mpz_class>;

mpz_class lcm(const mpz_class& a, const mpz_class& b) {
  mpz_class r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

/// Scaled integer x * den; x must have a denominator dividing den.
mpz_class scaled(const mpq_class& x, const mpz_class& den) { return x.get_num() * (den / x.get_den()); }

}  // namespace

IntervalUnion::IntervalUnion(mpz_class denominator, std::vector<Piece> pieces)
    : den_(std::move(denominator)), pieces_(std::move(pieces)) {
  if (den_ <= 0) throw ParameterError("IntervalUnion denominator must be positive");
}

IntervalUnion IntervalUnion::unit() { return IntervalUnion(1, {{0, 1, true, true}}); }

mpq_class IntervalUnion::lower(std::size_t i) const {
  mpq_class q(pieces_.at(i).lo, den_);
  q.canonicalize();
  return q;
}

mpq_class IntervalUnion::upper(std::size_t i) const {
  mpq_class q(pieces_.at(i).hi, den_);
  q.canonicalize();
  return q;
}

mpq_class IntervalUnion::measure() const {
  mpz_class total = 0;
  for (const auto& p : pieces_) total += p.hi - p.lo;
  mpq_class q(total, den_);
  q.canonicalize();
  return q;
}

bool IntervalUnion::contains_closed(const mpq_class& lo, const mpq_class& hi) const {
  if (lo > hi) return true;
  const mpq_class lo_s = lo * den_;
  const mpq_class hi_s = hi * den_;
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), lo_s,
                             [](const mpq_class& x, const Piece& p) { return x < p.lo; });
  if (it == pieces_.begin()) return false;
  --it;
  const bool lo_ok = it->lo_closed ? lo_s >= it->lo : lo_s > it->lo;
  const bool hi_ok = it->hi_closed ? hi_s <= it->hi : hi_s < it->hi;
  return lo_ok && hi_ok;
}

IntervalUnion IntervalUnion::rescaled(const mpz_class& den) const {
  if (den == den_) return *this;
  const mpz_class f = den / den_;
  IntervalUnion out(den, pieces_);
  for (auto& p : out.pieces_) {
    p.lo *= f;
    p.hi *= f;
  }
  return out;
}

IntervalUnion IntervalUnion::subtract(const mpq_class& lo, const mpq_class& hi) const {
  if (lo > hi) return *this;
  const IntervalUnion base = rescaled(lcm(lcm(den_, lo.get_den()), hi.get_den()));
  const mpz_class e_lo = scaled(lo, base.den_);
  const mpz_class e_hi = scaled(hi, base.den_);
  std::vector<Piece> out;
  out.reserve(base.pieces_.size() + 1);
  for (const auto& p : base.pieces_) {
    const bool left_of = p.hi < e_lo || (p.hi == e_lo && !p.hi_closed);
    const bool right_of = p.lo > e_hi || (p.lo == e_hi && !p.lo_closed);
    if (left_of || right_of) {
      out.push_back(p);
      continue;
    }
    if (p.lo < e_lo) out.push_back({p.lo, e_lo, p.lo_closed, false});
    if (p.hi > e_hi) out.push_back({e_hi, p.hi, false, p.hi_closed});
  }
  return IntervalUnion(base.den_, std::move(out));
}

bool IntervalUnion::well_formed() const {
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const Piece& p = pieces_[i];
    if (p.lo < 0 || p.hi > den_) return false;
    if (p.lo > p.hi || (p.lo == p.hi && !(p.lo_closed && p.hi_closed))) return false;
    if (i > 0) {
      const Piece& q = pieces_[i - 1];
      if (p.lo < q.hi || (p.lo == q.hi && (p.lo_closed || q.hi_closed))) return false;
    }
  }
  return true;
}

bool operator==(const IntervalUnion& a, const IntervalUnion& b) {
  if (a.pieces_.size() != b.pieces_.size()) return false;
  for (std::size_t i = 0; i < a.pieces_.size(); ++i) {
    const Piece& p = a.pieces_[i];
    const Piece& q = b.pieces_[i];
    if (p.lo_closed != q.lo_closed || p.hi_closed != q.hi_closed) return false;
    if (p.lo * b.den_ != q.lo * a.den_ || p.hi * b.den_ != q.hi * a.den_) return false;
  }
  return true;
}

IntervalUnion exact_bad_set(const SequenceSpec& spec, const DeltaFn& delta, std::int64_t N, std::size_t budget) {
  spec.validate();
  if (!spec.exact()) throw ParameterError("exact_bad_set: the oracle only accepts exact rational sequences");
  if (N < 1) throw ParameterError("exact_bad_set: N must be >= 1");

  Sequence seq(spec);
  std::vector<mpq_class> t(static_cast<std::size_t>(N) + 1), d(static_cast<std::size_t>(N) + 1);
  mpz_class den = 1;
  mpz_class total = 0;
  for (std::int64_t n = 1; n <= N; ++n) {
    t[n] = seq.at(n).lower;
    d[n] = delta(n);
    if (d[n] <= 0) throw ParameterError("exact_bad_set: delta(" + std::to_string(n) + ") must be positive");
    den = lcm(den, d[n].get_den() * t[n].get_num());
    total += ceil_of(t[n]) + 1;
    if (total > budget) throw BudgetExceeded("exact_bad_set: more than " + std::to_string(budget) + " exclusions");
  }

  // Union of the closed exclusions in units of 1/den, clipped to [0, den].
  std::vector<Segment> cur, next;
  for (std::int64_t n = 1; n <= N; ++n) {
    const mpz_class& tn = t[n].get_num();
    const mpz_class& td = t[n].get_den();
    const mpz_class& dn = d[n].get_num();
    const mpz_class& dd = d[n].get_den();
    const mpz_class m = den / (dd * tn);
    const mpz_class step = dd * td * m;
    mpz_class lo = -dn * td * m;
    mpz_class hi = dn * td * m;
    const mpz_class a_max = ceil_of(t[n]);

    next.clear();
    next.reserve(cur.size() + static_cast<std::size_t>(a_max.get_ui()) + 1);
    auto push = [&](const mpz_class& s, const mpz_class& e) {
      const mpz_class& s_c = s < 0 ? mpz_class(0) : s;
      const mpz_class& e_c = e > den ? den : e;
      if (s_c > e_c) return;
      if (!next.empty() && s_c <= next.back().second) {
        if (e_c > next.back().second) next.back().second = e_c;
      } else {
        next.emplace_back(s_c, e_c);
      }
    };
    std::size_t i = 0;
    for (mpz_class a = 0; a <= a_max; ++a, lo += step, hi += step) {
      while (i < cur.size() && cur[i].first <= lo) {
        push(cur[i].first, cur[i].second);
        ++i;
      }
      push(lo, hi);
    }
    for (; i < cur.size(); ++i) push(cur[i].first, cur[i].second);
    cur.swap(next);
  }

  std::vector<Piece> pieces;
  pieces.reserve(cur.size() + 1);
  mpz_class at = 0;
  bool at_closed = true;
  for (const auto& [s, e] : cur) {
    if (s > at) pieces.push_back({at, s, at_closed, false});
    at = e;
    at_closed = false;
  }
  if (at < den) pieces.push_back({at, den, at_closed, true});
  return IntervalUnion(den, std::move(pieces));
}

Comparison compare_with_sieve(const IntervalUnion& exact, const RunSet& survivors,
                              const std::optional<OracleInstance>& instance) {
  Comparison c;
  c.exact_measure = exact.measure();
  c.sieve_measure = survivors.measure();
  c.slack = c.exact_measure - c.sieve_measure;
  const mpz_class grid = pow2_int(survivors.level());
  for (const auto& r : survivors.runs()) {
    mpq_class lo(r.first, grid), hi(r.last + 1, grid);
    lo.canonicalize();
    hi.canonicalize();
    if (exact.contains_closed(lo, hi)) continue;
    // Locate the first offending cell of the run.
    for (mpz_class cell = r.first; cell <= r.last; ++cell) {
      mpq_class cl(cell, grid), ch(cell + 1, grid);
      cl.canonicalize();
      ch.canonicalize();
      if (!exact.contains_closed(cl, ch)) {
        c.bad_cell = cell;
        break;
      }
    }
    c.contained = false;
    break;
  }
  if (c.contained || !instance) return c;

  mpq_class cl(*c.bad_cell, grid), ch(*c.bad_cell + 1, grid);
  cl.canonicalize();
  ch.canonicalize();
  Sequence seq(instance->spec);
  for (std::int64_t n = 1; n <= instance->N && !c.bad_n; ++n) {
    const mpq_class t = seq.at(n).lower;
    const mpq_class d = instance->delta(n);
    mpz_class a = ceil_of(mpq_class(cl * t - d));
    if (a < 0) a = 0;
    const mpz_class a_end = std::min(floor_of(mpq_class(ch * t + d)), ceil_of(t));
    for (; a <= a_end; ++a) {
      const mpq_class e_lo = (a - d) / t;
      const mpq_class e_hi = (a + d) / t;
      if (e_lo <= ch && e_hi >= cl) {
        c.bad_n = n;
        c.bad_a = a;
        break;
      }
    }
  }
  return c;
}

}  // namespace dsieve
