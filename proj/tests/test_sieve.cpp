#include <doctest.h>

#include <set>

#include "dsieve/errors.hpp"
#include "dsieve/rational.hpp"
#include "dsieve/sieve.hpp"
#include "support.hpp"

using namespace dsieve;

namespace {

TermEnclosure exact_term(const mpq_class& t) { return {t, t}; }

std::set<long> cells_of(const RunSet& s) {
  std::set<long> out;
  for (const auto& r : s.runs())
    for (mpz_class c = r.first; c <= r.last; ++c) out.insert(c.get_si());
  return out;
}

/// Cells of level l whose closed interval meets some closed E(a), by direct test.
std::set<long> cover_by_definition(const mpq_class& t, const mpq_class& delta, unsigned l) {
  std::set<long> out;
  const mpz_class a_max = ceil_of(t);
  const long grid = 1L << l;
  for (long c = 0; c < grid; ++c) {
    const mpq_class lo(c, grid), hi(c + 1, grid);
    for (mpz_class a = 0; a <= a_max; ++a) {
      if ((a - delta) / t <= hi && (a + delta) / t >= lo) {
        out.insert(c);
        break;
      }
    }
  }
  return out;
}

struct Instance {
  SequenceSpec spec;
  Schedule schedule;
  std::int64_t N;
};

/// Random geometric instance whose constant schedule passes every chain condition.
Instance passing_instance(testing::Gen& gen) {
  for (;;) {
    const mpq_class q = gen.integer(2, 6);
    const std::int64_t h = gen.integer(1, 4);
    const mpq_class delta = pow2(-gen.integer(4, 9));
    const mpq_class eta = gen.rational(mpq_class(1, 4), mpq_class(3, 4), 4);
    const std::int64_t N = gen.integer(1, 6);
    Instance in{testing::geometric(q, q), constant_schedule(h, delta, eta), N};
    const CheckpointChain c = build_chain(in.schedule, N);
    if (check_conditions(in.spec, in.schedule, c).all_pass()) return in;
  }
}

}  // namespace

TEST_CASE("level examples") {
  CHECK(level(exact_term(4), mpq_class(1, 8)) == 4);
  CHECK(level(exact_term(mpq_class(1) << 20), mpq_class(1, 256)) == 27);
  CHECK(level(exact_term(3), mpq_class(1, 2)) == 1);
  CHECK(level(exact_term(7), mpq_class(1, 64)) == 7);
  CHECK_THROWS_AS(level(TermEnclosure{mpq_class(15, 2), mpq_class(17, 2)}, mpq_class(1, 2)), PrecisionCeiling);
  CHECK_THROWS_AS(level(exact_term(4), mpq_class(3, 4)), ParameterError);
  Sequence seq(SequenceSpec{Subexponential{mpq_class(1, 2), 1}});
  // t_4 = e^2 = 7.389..., t/(2 * 1/16) = 59.1 gives level 5.
  CHECK(level(seq, 4, mpq_class(1, 16)) == 5);
}

TEST_CASE("cover examples") {
  CHECK(cells_of(exclusion_cover(exact_term(4), mpq_class(1, 8), 4)) == std::set<long>{0, 3, 4, 7, 8, 11, 12, 15});
  CHECK(cells_of(exclusion_cover(exact_term(7), mpq_class(1, 64), 7, CellRun{30, 40})) == std::set<long>{36});
  CHECK(exclusion_cover(exact_term(2), mpq_class(1, 4), 2).count() == 4);
  CHECK(exclusion_cover(exact_term(4), mpq_class(1, 8), 4, CellRun{5, 6}).empty());
}

TEST_CASE("cover equals the set of cells meeting an exclusion") {
  testing::Gen gen(51);
  for (int round = 0; round < 150; ++round) {
    const mpq_class t = gen.rational(1, 60, 12);
    const mpq_class delta = gen.rational(mpq_class(1, 200), mpq_class(1, 2), 200);
    if (!(delta > 0)) continue;
    const unsigned l = static_cast<unsigned>(gen.integer(0, 9));
    const RunSet c = exclusion_cover(exact_term(t), delta, l);
    CHECK(c.well_formed());
    CHECK(cells_of(c) == cover_by_definition(t, delta, l));
  }
}

TEST_CASE("windowed cover is the full cover clipped") {
  testing::Gen gen(52);
  for (int round = 0; round < 150; ++round) {
    const mpq_class t = gen.rational(1, 500, 8);
    const mpq_class delta = pow2(-gen.integer(2, 10));
    const unsigned l = level(exact_term(t), delta);
    const long top = (1L << l) - 1;
    const long a = static_cast<long>(gen.integer(0, top));
    const long b = std::min(top + 3, a + static_cast<long>(gen.integer(0, 40)));
    const RunSet full = exclusion_cover(exact_term(t), delta, l);
    const RunSet win = exclusion_cover(exact_term(t), delta, l, CellRun{a, b});
    CHECK(win == full.intersect(RunSet::from_runs(l, {{a, b}})));
  }
}

TEST_CASE("cover measure stays within 16 delta at the sieve level") {
  testing::Gen gen(53);
  for (int round = 0; round < 200; ++round) {
    const mpq_class t = gen.rational(2, 5000, 16);
    const mpq_class delta = gen.rational(mpq_class(1, 4096), mpq_class(1, 2), 4096);
    if (!(delta > 0)) continue;
    const unsigned l = level(exact_term(t), delta);
    CHECK(exclusion_cover(exact_term(t), delta, l).measure() <= 16 * delta);
  }
}

TEST_CASE("enclosed term widens the cover") {
  const TermEnclosure wide{mpq_class(63, 8), mpq_class(65, 8)};
  const mpq_class delta(1, 32);
  const unsigned l = 6;
  const RunSet c = exclusion_cover(wide, delta, l);
  for (const mpq_class t : {mpq_class(63, 8), mpq_class(8), mpq_class(65, 8)})
    CHECK(exclusion_cover(exact_term(t), delta, l).minus(c).empty());
}

TEST_CASE("toy sieve run") {
  const Schedule s = testing::toy_schedule();
  const SieveTrace tr = run_sieve_full(testing::toy_spec(), s, build_chain(s, 10));
  CHECK(tr.all_within());
  REQUIRE(tr.checkpoints.size() == 2);
  CHECK(tr.checkpoints[0].n == 5);
  CHECK(tr.checkpoints[1].n == 10);
  CHECK(tr.initial_measure == mpq_class(15363, 16384));
  CHECK(tr.initial_bound == mpq_class(11, 16));
  CHECK(tr.final_measure == mpq_class(14798457, 16777216));
  CHECK(tr.theorem_bound == mpq_class(1, 4));
  REQUIRE(tr.blocks.size() == 1);
  CHECK(tr.blocks[0].ratio == mpq_class(548091, 582656));
  CHECK(tr.blocks[0].limit == mpq_class(7, 8));
  mpq_class worst = 0;
  for (const auto& o : tr.overlaps) worst = std::max(worst, o.ratio);
  CHECK(worst == mpq_class(1, 64));
  CHECK(tr.covers.size() == 10);
  CHECK(tr.survivors.level() == 27);
  CHECK(tr.survivors.measure() == tr.final_measure);
}

TEST_CASE("toy sieve with a single block") {
  const Schedule s = testing::toy_schedule();
  const SieveTrace tr = run_sieve_full(testing::toy_spec(), s, build_chain(s, 5));
  CHECK(tr.checkpoints.size() == 1);
  CHECK(tr.blocks.empty());
  CHECK(tr.theorem_bound == mpq_class(1, 2));
  CHECK(tr.final_measure == tr.initial_measure);
}

TEST_CASE("sieve refuses schedules that fail the hypotheses") {
  const Schedule s = testing::toy_schedule(mpq_class(1, 16));
  CHECK_THROWS_AS(run_sieve_full(testing::toy_spec(), s, build_chain(s, 10)), ConditionViolated);
}

TEST_CASE("proven bounds hold on passing instances") {
  testing::Gen gen(54);
  for (int round = 0; round < 40; ++round) {
    const Instance in = passing_instance(gen);
    const SieveTrace tr = run_sieve_full(in.spec, in.schedule, build_chain(in.schedule, in.N), {false});
    CHECK(tr.all_proven());
    for (const auto& o : tr.overlaps) CHECK(o.ratio <= 8 * in.schedule.delta(o.n));
    CHECK(tr.final_measure >= tr.theorem_bound);
    for (const auto& c : tr.checkpoints) CHECK(c.measure >= c.bound);
    CHECK(tr.survivors.well_formed());
  }
}

TEST_CASE("nominal overlap limit can be exceeded") {
  // t_4 / 2^l_4 = 1296/16384 lies between 2 delta and 4 delta.
  const SequenceSpec spec = testing::geometric(6, 6);
  const Schedule s = constant_schedule(3, mpq_class(1, 32), mpq_class(1, 2));
  const CheckpointChain chain = build_chain(s, 4);
  REQUIRE(check_conditions(spec, s, chain).all_pass());
  const SieveTrace tr = run_sieve_full(spec, s, chain);
  REQUIRE(tr.overlaps.size() == 1);
  const OverlapRecord& o = tr.overlaps[0];
  CHECK(o.n == 4);
  CHECK(o.ratio == mpq_class(237, 1664));
  CHECK(o.limit == mpq_class(1, 8));
  CHECK_FALSE(o.within);
  CHECK(o.proven_limit == mpq_class(1, 4));
  CHECK(o.within_proven);
  CHECK_FALSE(tr.all_within());
  CHECK(tr.all_proven());
  CHECK(tr.final_measure >= tr.theorem_bound);
}

TEST_CASE("toy witness") {
  const Schedule s = testing::toy_schedule();
  const CheckpointChain chain = build_chain(s, 20);
  const Certificate cert = extract_witness(testing::toy_spec(), s, chain);
  CHECK(cert.margins.verdict == Verdict::pass);
  CHECK(cert.stages.size() == chain.nodes.size());
  CHECK(cert.bits == cert.stages.back().level + 1);
  CHECK(cert.alpha == mpq_class(cert.numerator, pow2_int(cert.bits)));
  CHECK(cert.binary_expansion().size() == cert.bits + 2);
  // Independent margin check over the exact terms 4^n.
  mpq_class t = 1;
  for (std::int64_t n = 1; n <= 20; ++n) {
    t *= 4;
    CHECK(dist_to_int(mpq_class(t * cert.alpha)) > mpq_class(1, 256));
  }
  for (std::size_t k = 1; k < cert.stages.size(); ++k) {
    const PathStage& a = cert.stages[k - 1];
    const PathStage& b = cert.stages[k];
    CHECK((b.cell >> (b.level - a.level)) == a.cell);
    CHECK(b.survivors >= b.guaranteed);
  }
}

TEST_CASE("pick policies are deterministic and sound") {
  const Schedule s = testing::toy_schedule();
  const CheckpointChain chain = build_chain(s, 15);
  for (const PickPolicy p : {PickPolicy::leftmost, PickPolicy::middle, PickPolicy::random}) {
    PathOptions o;
    o.pick = p;
    o.seed = 7;
    const Certificate a = extract_witness(testing::toy_spec(), s, chain, o);
    const Certificate b = extract_witness(testing::toy_spec(), s, chain, o);
    CHECK(a.alpha == b.alpha);
    CHECK(a.margins.verdict == Verdict::pass);
  }
  PathOptions left, mid;
  mid.pick = PickPolicy::middle;
  CHECK(extract_witness(testing::toy_spec(), s, chain, left).alpha < extract_witness(testing::toy_spec(), s, chain, mid).alpha);
}

TEST_CASE("path search on a hopeless instance") {
  const SequenceSpec spec = testing::geometric(2, 2);
  const Schedule s = constant_schedule(1, mpq_class(1, 4), mpq_class(1, 2));
  PathOptions o;
  o.require_conditions = false;
  CHECK_THROWS_AS(extract_witness(spec, s, build_chain(s, 6), o), SearchExhausted);
  CHECK_THROWS_AS(extract_witness(spec, s, build_chain(s, 6)), ConditionViolated);
}

TEST_CASE("node budget") {
  const Schedule s = testing::toy_schedule();
  PathOptions o;
  o.max_nodes = 1;
  CHECK_THROWS_AS(extract_witness(testing::toy_spec(), s, build_chain(s, 20), o), BudgetExceeded);
}

TEST_CASE("certificate verification examples") {
  const SequenceSpec doubling = testing::geometric(2, 2);
  const auto quarter = [](std::int64_t) { return mpq_class(1, 4); };
  const MarginReport good = verify_certificate(doubling, mpq_class(1, 3), quarter, 30);
  CHECK(good.verdict == Verdict::pass);
  CHECK(good.min_margin == mpq_class(1, 3));
  CHECK(good.margins.size() == 30);
  const MarginReport bad = verify_certificate(doubling, mpq_class(3, 8), quarter, 5);
  CHECK(bad.verdict == Verdict::fail);
  // 2*3/8 = 3/4 is 1/4 from 1: not strictly above delta.
  CHECK(bad.first_failure == 1);
  CHECK_THROWS_AS(verify_certificate(doubling, mpq_class(3, 2), quarter, 5), ParameterError);
  const SequenceSpec sub{Subexponential{mpq_class(1, 2), 1}};
  const MarginReport enclosed = verify_certificate(sub, mpq_class(1, 7), [](std::int64_t) { return mpq_class(1, 1000); }, 3);
  // e^sqrt3/7 = 0.8075 is the closest to an integer.
  CHECK(enclosed.verdict == Verdict::pass);
  CHECK(enclosed.min_margin > mpq_class(19, 100));
  CHECK(enclosed.min_at == 3);
}
