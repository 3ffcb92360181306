#include <doctest.h>

#include <cmath>

#include "dsieve/dimension.hpp"
#include "dsieve/errors.hpp"
#include "dsieve/rational.hpp"
#include "support.hpp"

using namespace dsieve;

namespace {

ChainSource toy_source(const mpq_class& eta = mpq_class(1, 2), std::int64_t N = 60) {
  const Schedule s = testing::toy_schedule(mpq_class(1, 256), eta);
  return {testing::toy_spec(), s, build_chain(s, N)};
}

}  // namespace

TEST_CASE("geometric Eggleston data") {
  const EgglestonData d = eggleston_geometric(4, 2, 5);
  CHECK(d.well_formed());
  CHECK(d.stages[2].width == mpq_class(1, 64));
  CHECK(d.stages[2].count == 8);
  CHECK_THROWS_AS(eggleston_geometric(1, 2, 3), ParameterError);
  EgglestonData broken = d;
  broken.stages[1].count = 5;
  CHECK_FALSE(broken.well_formed());
  CHECK_THROWS_AS(series_terms(broken, mpq_class(1, 2), 5), ParameterError);
}

TEST_CASE("Eggleston terms below the critical exponent") {
  const SeriesReport r = series_terms(eggleston_geometric(4, 2, 30), mpq_class(2, 5), 30);
  REQUIRE(r.terms.size() == 30);
  // term_k = 4 * 2^(-k/5), so term_k^5 = 1024 * 2^-k.
  for (const auto& t : r.terms) {
    const mpq_class want = 1024 * pow2(-static_cast<long>(t.k));
    CHECK(pow(t.lower, 5) <= want);
    CHECK(pow(t.upper, 5) >= want);
    CHECK(t.upper - t.lower < pow2(-100));
  }
  CHECK(r.verdict == SeriesVerdict::convergent);
  CHECK(r.family == "eggleston-geometric");
  CHECK(r.k0 == std::size_t{1});
  const double ratio = std::pow(2.0, -0.2);
  const double sum = 4 * ratio / (1 - ratio);
  REQUIRE(r.tail_bound.has_value());
  CHECK(r.tail_bound->get_d() >= sum * (1 - 1e-12));
  CHECK(r.tail_bound->get_d() <= sum * (1 + 1e-9));
  CHECK(r.terms.back().partial_upper <= *r.tail_bound);
}

TEST_CASE("Eggleston terms above the critical exponent") {
  const SeriesReport r = series_terms(eggleston_geometric(4, 2, 20), mpq_class(3, 5), 20);
  CHECK(r.verdict == SeriesVerdict::divergent);
  CHECK(*r.closed_ratio_lower > 1);
  CHECK_FALSE(r.tail_bound.has_value());
}

TEST_CASE("critical exponent gives constant terms") {
  // sigma^nu / m is exactly 1 at nu = 1/2, so every term equals 4.
  const SeriesReport r = series_terms(eggleston_geometric(4, 2, 20), mpq_class(1, 2), 20);
  CHECK(r.verdict == SeriesVerdict::divergent);
  CHECK(r.terms.back().lower <= 4);
  CHECK(r.terms.back().upper >= 4);
  const DimensionReport d = dimension_lower_bound(eggleston_geometric(4, 2, 40), pow2(-12), 40);
  CHECK(d.nu_star < mpq_class(1, 2));
  CHECK(d.nu_star >= mpq_class(1, 2) - pow2(-12));
  CHECK(d.nu_upper - d.nu_star <= pow2(-12));
  CHECK(d.inconclusive.empty());
}

TEST_CASE("bisection brackets log m / log sigma") {
  testing::Gen gen(71);
  for (int round = 0; round < 25; ++round) {
    const long sigma = static_cast<long>(gen.integer(3, 40));
    const long m = static_cast<long>(gen.integer(2, sigma - 1));
    const double truth = std::log(static_cast<double>(m)) / std::log(static_cast<double>(sigma));
    const mpq_class eps = pow2(-gen.integer(4, 16));
    const DimensionReport d = dimension_lower_bound(eggleston_geometric(sigma, m, 30), eps, 30);
    CHECK(d.nu_star.get_d() <= truth + 1e-12);
    CHECK(d.nu_upper.get_d() >= truth - 1e-12);
    CHECK(d.nu_upper - d.nu_star <= eps);
    for (const auto& p : d.probes)
      if (p.verdict == SeriesVerdict::convergent) CHECK(p.nu.get_d() < truth + 1e-12);
  }
}

TEST_CASE("toy chain series") {
  const SeriesReport r = series_terms(toy_source(), mpq_class(1, 2), 10);
  CHECK(r.family == "stationary-chain");
  // eta^-1 (4^5)^(nu-1) at nu = 1/2.
  CHECK(*r.closed_ratio_lower <= mpq_class(1, 16));
  CHECK(*r.closed_ratio_upper >= mpq_class(1, 16));
  CHECK(r.verdict == SeriesVerdict::convergent);
  for (const auto& t : r.terms)
    if (t.ratio_lower) {
      CHECK(*t.ratio_lower <= mpq_class(1, 16));
      CHECK(*t.ratio_upper >= mpq_class(1, 16));
    }
  // Critical exponent solves 1024^(1 - nu) = 2, i.e. nu = 9/10.
  const DimensionReport d = dimension_lower_bound(toy_source(), pow2(-10), 10);
  CHECK(d.nu_star <= mpq_class(9, 10));
  CHECK(d.nu_star >= mpq_class(9, 10) - pow2(-10));
}

TEST_CASE("larger eta never lowers the bound") {
  mpq_class prev = 0;
  for (const mpq_class eta : {mpq_class(1, 8), mpq_class(1, 4), mpq_class(1, 2), mpq_class(3, 4)}) {
    const DimensionReport d = dimension_lower_bound(toy_source(eta), pow2(-10), 10);
    CHECK(d.nu_star >= prev);
    prev = d.nu_star;
  }
}

TEST_CASE("non-stationary sources stay inconclusive") {
  const SequenceSpec spec = testing::smooth();
  const Schedule s = autotune_kappa(spec, shape_inv_sqrt_log(), mpq_class(1, 2), 300);
  const ChainSource src{spec, s, build_chain(s, 300)};
  const SeriesReport r = series_terms(src, mpq_class(1, 2), 50);
  CHECK(r.verdict == SeriesVerdict::inconclusive);
  CHECK(r.family == "none");
  CHECK_FALSE(r.terms.empty());
  const DimensionReport d = dimension_lower_bound(src, pow2(-6), 50);
  CHECK(d.nu_star == 0);
  CHECK(d.inconclusive.size() == d.probes.size());
}

TEST_CASE("argument checks") {
  CHECK_THROWS_AS(series_terms(eggleston_geometric(4, 2, 3), 0, 3), ParameterError);
  CHECK_THROWS_AS(series_terms(eggleston_geometric(4, 2, 3), mpq_class(3, 2), 3), ParameterError);
  CHECK_THROWS_AS(dimension_lower_bound(eggleston_geometric(4, 2, 3), pow2(-21), 3), ParameterError);
}

TEST_CASE("series csv layout") {
  const std::string csv = series_csv(series_terms(eggleston_geometric(4, 2, 3), mpq_class(2, 5), 3));
  CHECK(csv.rfind("k,term,ratio,partial_sum\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(csv.find("\n1,") != std::string::npos);
}

TEST_CASE("harvested path data is a nested construction") {
  const Schedule s = testing::toy_schedule();
  const Certificate cert = extract_witness(testing::toy_spec(), s, build_chain(s, 20));
  const EgglestonData d = harvest(cert);
  CHECK(d.well_formed());
  CHECK(d.stages.size() == cert.stages.size());
  CHECK_FALSE(d.family.has_value());
  const SeriesReport r = series_terms(d, mpq_class(1, 2), 10);
  CHECK(r.verdict == SeriesVerdict::inconclusive);
}
