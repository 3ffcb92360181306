#include "dsieve/run_set.hpp"

#include <algorithm>

#include "dsieve/errors.hpp"
#include "dsieve/rational.hpp"

namespace dsieve {

RunSet RunSet::full(unsigned level) {
  RunSet s(level);
  s.runs_.push_back({0, pow2_int(level) - 1});
  s.count_ = pow2_int(level);
  return s;
}

RunSet RunSet::from_runs(unsigned level, std::vector<CellRun> runs) {
  std::sort(runs.begin(), runs.end(), [](const CellRun& a, const CellRun& b) { return a.first < b.first; });
  Builder b(level);
  for (auto& r : runs) b.add(std::move(r.first), std::move(r.last));
  return std::move(b).finish();
}

RunSet::Builder::Builder(unsigned level) : level_(level), max_cell_(pow2_int(level) - 1) {}

void RunSet::Builder::add(mpz_class first, mpz_class last) {
  if (first < 0) first = 0;
  if (last > max_cell_) last = max_cell_;
  if (first > last) return;
  if (!runs_.empty()) {
    CellRun& back = runs_.back();
    if (first < back.first) throw ParameterError("RunSet::Builder requires non-decreasing run starts");
    if (first <= back.last + 1) {
      if (last > back.last) back.last = std::move(last);
      return;
    }
  }
  runs_.push_back({std::move(first), std::move(last)});
}

RunSet RunSet::Builder::finish() && {
  RunSet s(level_);
  s.runs_ = std::move(runs_);
  for (const auto& r : s.runs_) s.count_ += r.last - r.first + 1;
  return s;
}

mpq_class RunSet::measure() const {
  mpq_class m(count_, pow2_int(level_));
  m.canonicalize();
  return m;
}

bool RunSet::contains(const mpz_class& cell) const {
  auto it = std::upper_bound(runs_.begin(), runs_.end(), cell, [](const mpz_class& c, const CellRun& r) { return c < r.first; });
  if (it == runs_.begin()) return false;
  --it;
  return cell <= it->last;
}

std::optional<mpz_class> RunSet::nth_cell(const mpz_class& index) const {
  if (index < 0) return std::nullopt;
  mpz_class remaining = index;
  for (const auto& r : runs_) {
    const mpz_class len = r.last - r.first + 1;
    if (remaining < len) return mpz_class(r.first + remaining);
    remaining -= len;
  }
  return std::nullopt;
}

RunSet RunSet::refined(unsigned new_level) const {
  if (new_level < level_) throw ParameterError("refine to a coarser level");
  if (new_level == level_) return *this;
  const unsigned long d = new_level - level_;
  RunSet out(new_level);
  out.runs_.reserve(runs_.size());
  for (const auto& r : runs_) {
    CellRun c;
    mpz_mul_2exp(c.first.get_mpz_t(), r.first.get_mpz_t(), d);
    mpz_class end = r.last + 1;
    mpz_mul_2exp(c.last.get_mpz_t(), end.get_mpz_t(), d);
    c.last -= 1;
    out.runs_.push_back(std::move(c));
  }
  mpz_mul_2exp(out.count_.get_mpz_t(), count_.get_mpz_t(), d);
  return out;
}

RunSet RunSet::minus(const RunSet& other) const {
  if (other.level_ != level_) throw ParameterError("RunSet level mismatch in subtract");
  RunSet out(level_);
  out.runs_.reserve(runs_.size());
  auto cut = other.runs_.begin();
  const auto cut_end = other.runs_.end();
  mpz_class start, stop;
  for (const auto& r : runs_) {
    start = r.first;
    stop = r.last;
    while (cut != cut_end && cut->last < start) ++cut;
    auto c = cut;
    bool alive = true;
    while (c != cut_end && c->first <= stop) {
      if (c->first > start) out.runs_.push_back({start, c->first - 1});
      if (c->last >= stop) {
        alive = false;
        break;
      }
      start = c->last + 1;
      ++c;
    }
    if (alive) out.runs_.push_back({start, stop});
  }
  for (const auto& r : out.runs_) out.count_ += r.last - r.first + 1;
  return out;
}

RunSet RunSet::intersect(const RunSet& other) const {
  if (other.level_ != level_) throw ParameterError("RunSet level mismatch in intersect");
  RunSet out(level_);
  auto a = runs_.begin();
  auto b = other.runs_.begin();
  while (a != runs_.end() && b != other.runs_.end()) {
    const mpz_class& lo = a->first > b->first ? a->first : b->first;
    const mpz_class& hi = a->last < b->last ? a->last : b->last;
    if (lo <= hi) out.runs_.push_back({lo, hi});
    if (a->last < b->last)
      ++a;
    else
      ++b;
  }
  for (const auto& r : out.runs_) out.count_ += r.last - r.first + 1;
  return out;
}

bool RunSet::well_formed() const {
  const mpz_class max_cell = pow2_int(level_) - 1;
  mpz_class total = 0;
  for (std::size_t i = 0; i < runs_.size(); ++i) {
    const auto& r = runs_[i];
    if (r.first < 0 || r.last > max_cell || r.first > r.last) return false;
    if (i > 0 && r.first <= runs_[i - 1].last + 1) return false;
    total += r.last - r.first + 1;
  }
  return total == count_;
}

RunSet refine(const RunSet& s, unsigned new_level) { return s.refined(new_level); }
RunSet subtract(const RunSet& survivors, const RunSet& cover) { return survivors.minus(cover); }
mpq_class measure(const RunSet& s) { return s.measure(); }

}  // namespace dsieve
