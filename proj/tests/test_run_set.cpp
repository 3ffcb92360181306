#include <doctest.h>

#include <vector>

#include "dsieve/run_set.hpp"
#include "support.hpp"

using namespace dsieve;

namespace {

using Bits = std::vector<bool>;

Bits to_bits(const RunSet& s) {
  Bits b(std::size_t{1} << s.level(), false);
  for (const auto& r : s.runs())
    for (mpz_class c = r.first; c <= r.last; ++c) b[c.get_ui()] = true;
  return b;
}

RunSet random_set(testing::Gen& gen, unsigned level) {
  const std::int64_t top = (std::int64_t{1} << level) - 1;
  std::vector<CellRun> runs;
  const std::int64_t k = gen.integer(0, 6);
  for (std::int64_t i = 0; i < k; ++i) {
    const std::int64_t a = gen.integer(0, top);
    runs.push_back({a, std::min(top, a + gen.integer(0, 5))});
  }
  return RunSet::from_runs(level, runs);
}

}  // namespace

TEST_CASE("construction and measure") {
  const RunSet f = RunSet::full(3);
  CHECK(f.count() == 8);
  CHECK(f.measure() == 1);
  CHECK(f.runs().size() == 1);
  const RunSet s = RunSet::from_runs(4, {{5, 6}, {0, 1}, {7, 8}, {2, 2}, {14, 40}});
  CHECK(s.well_formed());
  CHECK(s.runs() == std::vector<CellRun>{{0, 2}, {5, 8}, {14, 15}});
  CHECK(s.measure() == mpq_class(9, 16));
  CHECK(measure(s) == s.measure());
  CHECK(s.contains(7));
  CHECK_FALSE(s.contains(4));
  CHECK(s.nth_cell(3) == mpz_class(5));
  CHECK_FALSE(s.nth_cell(9).has_value());
}

TEST_CASE("refinement scales runs") {
  const RunSet s = RunSet::from_runs(2, {{1, 1}, {3, 3}});
  const RunSet r = refine(s, 4);
  CHECK(r.runs() == std::vector<CellRun>{{4, 7}, {12, 15}});
  CHECK(r.measure() == s.measure());
}

TEST_CASE("builder merges adjacent runs") {
  RunSet::Builder b(5);
  b.add(0, 3);
  b.add(4, 6);
  b.add(5, 9);
  b.add(20, 40);
  const RunSet s = std::move(b).finish();
  CHECK(s.runs() == std::vector<CellRun>{{0, 9}, {20, 31}});
  CHECK(s.well_formed());
}

TEST_CASE("set operations agree with a bitset oracle") {
  testing::Gen gen(41);
  for (int round = 0; round < 300; ++round) {
    const unsigned level = static_cast<unsigned>(gen.integer(1, 6));
    const RunSet a = random_set(gen, level);
    const RunSet b = random_set(gen, level);
    const Bits ba = to_bits(a), bb = to_bits(b);
    Bits diff(ba.size()), inter(ba.size());
    for (std::size_t i = 0; i < ba.size(); ++i) {
      diff[i] = ba[i] && !bb[i];
      inter[i] = ba[i] && bb[i];
    }
    const RunSet d = subtract(a, b), x = a.intersect(b);
    CHECK(d.well_formed());
    CHECK(x.well_formed());
    CHECK(to_bits(d) == diff);
    CHECK(to_bits(x) == inter);
    CHECK(d.count() + x.count() == a.count());

    const unsigned up = level + static_cast<unsigned>(gen.integer(0, 3));
    const RunSet r = a.refined(up);
    CHECK(r.well_formed());
    CHECK(r.measure() == a.measure());
    const Bits br = to_bits(r);
    for (std::size_t i = 0; i < br.size(); ++i) CHECK(br[i] == ba[i >> (up - level)]);
  }
}

TEST_CASE("nth_cell enumerates in order") {
  testing::Gen gen(42);
  for (int round = 0; round < 100; ++round) {
    const RunSet s = random_set(gen, 6);
    const Bits b = to_bits(s);
    std::size_t idx = 0;
    for (std::size_t c = 0; c < b.size(); ++c) {
      if (!b[c]) continue;
      CHECK(s.nth_cell(idx) == mpz_class(c));
      ++idx;
    }
    CHECK(mpz_class(idx) == s.count());
  }
}
