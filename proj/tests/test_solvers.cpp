#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "sumrate/errors.hpp"
#include "sumrate/polytope.hpp"
#include "sumrate/solvers.hpp"

using namespace sumrate;

namespace {

ChannelInstance two_user_symmetric() {
  ChannelInstance c;
  c.gains.resize(2, 2);
  c.gains << 1.0, 0.1, 0.1, 1.0;
  c.noise = VectorXd::Constant(2, 0.1);
  c.caps = VectorXd::Ones(2);
  c.weights = VectorXd::Constant(2, 0.5);
  return c;
}

ChannelInstance random_channel(oracle::Rng& rng, Index n) {
  ChannelInstance c;
  c.gains.resize(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      c.gains(i, j) = (i == j) ? rng.uniform(0.5, 1.5) : rng.uniform(0.01, 0.3);
  c.noise.resize(n);
  c.caps.resize(n);
  c.weights.resize(n);
  for (Index l = 0; l < n; ++l) {
    c.noise[l] = rng.uniform(0.01, 0.2);
    c.caps[l] = rng.uniform(0.5, 2.0);
    c.weights[l] = rng.uniform(0.1, 1.0);
  }
  c.weights /= c.weights.sum();
  return c;
}

double value_at(const ChannelInstance& c, const VectorXd& p) {
  return oracle::sum_rate(c.weights, oracle::sir_from_gains(c.gains, c.noise, c.snr_gap, p));
}

bool within_box(const ChannelInstance& c, const VectorXd& p) {
  return (p.array() >= 0.0).all() && (p.array() <= c.caps.array()).all();
}

}  // namespace

TEST_CASE("KKT classification") {
  const Problem pr = Problem::from(two_user_symmetric());
  const KktResult at_caps = kkt_classify(pr, VectorXd::Ones(2));
  CHECK(at_caps.satisfied);
  CHECK(at_caps.sets.at_cap == std::vector<Index>{0, 1});
  CHECK(at_caps.residual == 0.0);

  const KktResult at_zero = kkt_classify(pr, VectorXd::Zero(2));
  CHECK_FALSE(at_zero.satisfied);
  CHECK(at_zero.sets.at_zero == std::vector<Index>{0, 1});
  CHECK(at_zero.residual > 0.0);

  const KktResult inside = kkt_classify(pr, VectorXd::Constant(2, 0.5));
  CHECK_FALSE(inside.satisfied);
  CHECK(inside.sets.interior == std::vector<Index>{0, 1});
  CHECK(inside.residual == doctest::Approx(inside.gradient.cwiseAbs().maxCoeff()));
  CHECK_THROWS_AS(kkt_classify(pr, VectorXd::Constant(2, 1.5)), DomainError);
}

TEST_CASE("gradient solver on the two-user symmetric channel") {
  const ChannelInstance c = two_user_symmetric();
  const Problem pr = Problem::from(c);
  const SolverReport r = solve_gradient(pr, VectorXd::Constant(2, 0.3));
  CHECK(r.algorithm == "gradient");
  CHECK(r.kkt_satisfied);
  CHECK(r.termination == Termination::kKktSatisfied);
  CHECK(r.objective_value == doctest::Approx(std::log(6.0)).epsilon(1e-12));
  CHECK((r.power - VectorXd::Ones(2)).norm() == 0.0);
  CHECK(r.bounds.lower <= r.objective_value + 1e-12);
  CHECK(r.objective_value <= r.bounds.upper);
}

TEST_CASE("gradient ascent is monotone and stays in the box: property sweep") {
  oracle::Rng rng(41);
  for (int i = 0; i < 40; ++i) {
    const Index n = rng.index(2, 6);
    ChannelInstance c = random_channel(rng, n);
    c.snr_gap = rng.uniform(1.0, 2.0);
    const Problem pr = Problem::from(c);
    VectorXd p0(n);
    for (Index l = 0; l < n; ++l) p0[l] = rng.uniform(0.0, c.caps[l]);
    const SolverReport r = solve_gradient(pr, p0);
    for (std::size_t k = 1; k < r.trace.size(); ++k) CHECK(r.trace[k] >= r.trace[k - 1]);
    CHECK(within_box(c, r.power));
    CHECK(r.objective_value == doctest::Approx(value_at(c, r.power)).epsilon(1e-12));
    CHECK(r.objective_value >= value_at(c, p0) - 1e-12);
    if (r.termination == Termination::kKktSatisfied) CHECK(r.kkt_residual <= 1e-7);
    CHECK(r.active_sets.at_cap.size() + r.active_sets.interior.size() +
              r.active_sets.at_zero.size() ==
          static_cast<std::size_t>(n));
  }
}

TEST_CASE("single-weight problem puts the other user to zero") {
  ChannelInstance c = two_user_symmetric();
  c.weights << 1.0, 0.0;
  const Problem pr = Problem::from(c);
  const SolverReport r = solve_gradient_multistart(pr);
  CHECK(r.power[0] == 1.0);
  CHECK(r.power[1] == 0.0);
  CHECK(r.objective_value == doctest::Approx(std::log(11.0)).epsilon(1e-12));
  CHECK(r.kkt_satisfied);
}

TEST_CASE("multistart is deterministic in its seed") {
  oracle::Rng rng(42);
  const Problem pr = Problem::from(random_channel(rng, 4));
  MultiStartOptions o;
  o.seed = 9;
  const SolverReport a = solve_gradient_multistart(pr, o);
  const SolverReport b = solve_gradient_multistart(pr, o);
  CHECK(a.power == b.power);
  CHECK(a.iterations == b.iterations);
  o.starts = 0;
  CHECK_THROWS_AS(solve_gradient_multistart(pr, o), DomainError);
}

TEST_CASE("polytope construction") {
  const Problem pr = Problem::from(two_user_symmetric());
  PolytopeOptions o;
  o.grid = {2, 2};
  const Polytope poly = build_polytope(pr, o);
  CHECK(poly.dimension() == 2);
  CHECK(poly.box_high()[0] == doctest::Approx(std::log(10.0)).epsilon(1e-14));
  CHECK(poly.box_low()[1] == -poly.floor_depth());
  CHECK(poly.floor_depth() == doctest::Approx(std::log(0.2) + 10.0));
  CHECK(poly.anchors().size() == 3);
  // The all-caps corner log gamma = log 5 carries one hyperplane per user.
  const VectorXd corner = VectorXd::Constant(2, std::log(5.0));
  Index at_corner = 0;
  for (const Hyperplane& h : poly.hyperplanes())
    if ((h.anchor - corner).norm() <= 1e-9) ++at_corner;
  CHECK(at_corner == 2);
  CHECK(poly.hyperplanes().size() == poly.hyperplane_user().size());
  CHECK(poly.max_violation(corner) <= 1e-9);

  o.floor_depth = std::log(0.2);
  CHECK_THROWS_AS(build_polytope(pr, o), PreconditionError);
  o.floor_depth.reset();
  o.grid = {2};
  CHECK_THROWS_AS(build_polytope(pr, o), DomainError);
  o.grid = {1, 3};
  CHECK_THROWS_AS(build_polytope(pr, o), DomainError);
}

TEST_CASE("polytope contains the achievable log-SIR set: property sweep") {
  oracle::Rng rng(43);
  for (int i = 0; i < 20; ++i) {
    const Index n = rng.index(2, 4);
    const ChannelInstance c = random_channel(rng, n);
    const Problem pr = Problem::from(c);
    const Polytope poly = build_polytope(pr);
    for (const Hyperplane& h : poly.hyperplanes()) {
      for (Index u = 0; u < n; ++u) CHECK(h.normal[u] >= 0.0);
    }
    for (int k = 0; k < 100; ++k) {
      VectorXd p(n);
      for (Index l = 0; l < n; ++l) p[l] = rng.uniform(0.001, 1.0) * c.caps[l];
      const VectorXd xi =
          oracle::sir_from_gains(c.gains, c.noise, 1.0, p).array().log().matrix();
      CHECK(poly.max_violation(xi) <= 1e-9);
      CHECK(log_constraint_radius(pr, xi) <= 1e-9);
    }
    // Retraction lands on the boundary of the region.
    VectorXd xi(n);
    for (Index l = 0; l < n; ++l) xi[l] = rng.uniform(0.0, 3.0);
    CHECK(std::abs(log_constraint_radius(pr, retract_to_boundary(pr, xi))) <= 1e-9);
  }
}

TEST_CASE("boundary cuts tighten the polytope") {
  oracle::Rng rng(44);
  const ChannelInstance c = random_channel(rng, 3);
  const Problem pr = Problem::from(c);
  PolytopeOptions o;
  o.grid = {2, 2, 2};
  Polytope poly = build_polytope(pr, o);
  const std::size_t before = poly.hyperplanes().size();
  const VectorXd zeta = retract_to_boundary(pr, VectorXd::Constant(3, 1.0));
  CHECK(add_boundary_cuts(poly, pr, zeta) >= 1);
  CHECK(poly.hyperplanes().size() > before);
  CHECK(poly.as_lp().G.rows() == static_cast<Index>(poly.hyperplanes().size()));
  // The retracted point is on the new cut.
  CHECK(std::abs(poly.max_violation(zeta)) <= 1e-9);
}

TEST_CASE("linearized and LP methods on the two-user symmetric channel") {
  const Problem pr = Problem::from(two_user_symmetric());
  const Polytope poly = build_polytope(pr);

  const SolverReport lin = solve_linearized(pr, poly);
  CHECK(lin.algorithm == "linearized");
  CHECK(lin.objective_value == doctest::Approx(std::log(6.0)).epsilon(1e-9));
  CHECK(lin.kkt_satisfied);
  REQUIRE(lin.polytope_upper);
  CHECK(*lin.polytope_upper >= lin.objective_value - 1e-12);
  for (std::size_t k = 1; k < lin.trace.size(); ++k) CHECK(lin.trace[k] >= lin.trace[k - 1]);

  const SolverReport lp = solve_lp_relax(pr, poly);
  CHECK(lp.algorithm == "lp");
  REQUIRE(lp.lp_value);
  CHECK(lp.objective_value <= std::log(6.0) + 1e-12);
  CHECK((lp.power.array() <= 1.0).all());
  CHECK((lp.power.array() >= 0.0).all());

  CHECK_THROWS_AS(solve_linearized(pr, poly, VectorXd::Constant(2, 5.0)), DomainError);
}

TEST_CASE("linearized never falls below its start: property sweep") {
  oracle::Rng rng(45);
  for (int i = 0; i < 10; ++i) {
    const Index n = rng.index(2, 4);
    const ChannelInstance c = random_channel(rng, n);
    const Problem pr = Problem::from(c);
    const Polytope poly = build_polytope(pr);
    LinearizedOptions o;
    o.compute_upper = n <= 3;
    const SolverReport r = solve_linearized(pr, poly, o);
    CHECK(within_box(c, r.power));
    CHECK(r.objective_value == doctest::Approx(value_at(c, r.power)).epsilon(1e-12));
    CHECK(r.objective_value >= r.trace.front() - 1e-12);
    if (r.polytope_upper) CHECK(*r.polytope_upper >= r.objective_value - 1e-9);
    const SolverReport g = solve_gradient_multistart(pr);
    CHECK(std::abs(r.objective_value - g.objective_value) <= 1e-3);
  }
}

TEST_CASE("grid oracle") {
  SUBCASE("two-user symmetric optimum at the caps") {
    const Problem pr = Problem::from(two_user_symmetric());
    const OracleResult o = oracle_grid(pr);
    CHECK(o.best_value == doctest::Approx(std::log(6.0)).epsilon(1e-12));
    CHECK((o.best_power - VectorXd::Ones(2)).norm() <= 1e-12);
    CHECK(o.grid_resolution == 201);
  }
  SUBCASE("threads do not change the answer") {
    oracle::Rng rng(46);
    const Problem pr = Problem::from(random_channel(rng, 3));
    OracleOptions a;
    a.resolution = 41;
    a.threads = 1;
    OracleOptions b = a;
    b.threads = 4;
    const OracleResult ra = oracle_grid(pr, a);
    const OracleResult rb = oracle_grid(pr, b);
    CHECK(ra.best_value == rb.best_value);
    CHECK(ra.best_power == rb.best_power);
  }
  SUBCASE("local solvers reach the grid optimum on two users") {
    oracle::Rng rng(47);
    for (int i = 0; i < 10; ++i) {
      const ChannelInstance c = random_channel(rng, 2);
      const Problem pr = Problem::from(c);
      const OracleResult o = oracle_grid(pr);
      CHECK(o.best_value == doctest::Approx(value_at(c, o.best_power)).epsilon(1e-12));
      CHECK(solve_gradient_multistart(pr).objective_value >= o.best_value - 1e-6);
    }
  }
  SUBCASE("cost guards") {
    oracle::Rng rng(48);
    OracleOptions o;
    CHECK_THROWS_AS(oracle_grid(Problem::from(random_channel(rng, 5)), o),
                    PreconditionError);
    o.resolution = 10;
    CHECK_THROWS_AS(oracle_grid(Problem::from(random_channel(rng, 2)), o),
                    PreconditionError);
    o.resolution = 201;
    o.max_points = 1e3;
    CHECK_THROWS_AS(oracle_grid(Problem::from(random_channel(rng, 2)), o),
                    PreconditionError);
  }
}
