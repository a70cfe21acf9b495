#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "sumrate/channel.hpp"
#include "sumrate/errors.hpp"

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

}  // namespace

TEST_CASE("two-user symmetric channel") {
  const Problem pr = Problem::from(two_user_symmetric());
  MatrixXd f(2, 2);
  f << 0.0, 0.1, 0.1, 0.0;
  CHECK((pr.m.F - f).norm() <= 1e-15);
  CHECK((pr.m.v - VectorXd::Constant(2, 0.1)).norm() <= 1e-15);
  CHECK((pr.m.F_tilde - MatrixXd::Constant(2, 2, 0.1)).norm() <= 1e-15);
  CHECK((pr.m.gamma_bar - VectorXd::Constant(2, 10.0)).norm() <= 1e-12);
  // B_1 adds v / cap to the first column.
  MatrixXd b0(2, 2);
  b0 << 0.1, 0.1, 0.2, 0.0;
  CHECK((pr.m.B[0] - b0).norm() <= 1e-15);

  const VectorXd gamma = sir_of_power(pr, VectorXd::Ones(2));
  CHECK(gamma[0] == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(gamma[1] == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(objective(pr.weights, gamma) == doctest::Approx(std::log(6.0)).epsilon(1e-14));
  const VectorXd g = objective_gradient_p(pr, VectorXd::Ones(2));
  CHECK(g[0] == doctest::Approx(0.25 / 1.2).epsilon(1e-12));
  CHECK(g[1] == doctest::Approx(0.25 / 1.2).epsilon(1e-12));

  const RegionMembership r = in_achievable_region(pr, gamma);
  CHECK(r.inside);
  CHECK(r.active_set == std::vector<Index>{0, 1});
  CHECK_FALSE(in_achievable_region(pr, VectorXd::Constant(2, 5.1)).inside);
  CHECK(in_achievable_region(pr, VectorXd::Constant(2, 4.0)).active_set.empty());
}

TEST_CASE("channel validation") {
  ChannelInstance c = two_user_symmetric();
  SUBCASE("nonpositive gain") { c.gains(0, 1) = 0.0; }
  SUBCASE("non-square gains") { c.gains = MatrixXd::Ones(2, 3); }
  SUBCASE("single user") {
    c.gains = MatrixXd::Ones(1, 1);
    c.noise = VectorXd::Ones(1);
    c.caps = VectorXd::Ones(1);
    c.weights = VectorXd::Ones(1);
  }
  SUBCASE("zero noise") { c.noise[1] = 0.0; }
  SUBCASE("negative cap") { c.caps[0] = -1.0; }
  SUBCASE("weights not summing to one") { c.weights[0] = 0.6; }
  SUBCASE("negative weight") { c.weights << 1.5, -0.5; }
  SUBCASE("gap below one") { c.snr_gap = 0.5; }
  CHECK_THROWS_AS(Problem::from(c), DomainError);
}

TEST_CASE("argument checks on channel functions") {
  const Problem pr = Problem::from(two_user_symmetric());
  CHECK_THROWS_AS(sir_of_power(pr, VectorXd::Ones(3)), DomainError);
  CHECK_THROWS_AS(sir_of_power(pr, (VectorXd(2) << 1, -1).finished()), DomainError);
  CHECK_THROWS_AS(power_of_sir(pr, VectorXd::Constant(2, 10.0)), InfeasibleError);
  CHECK_THROWS_AS(noiseless_sir(pr, (VectorXd(2) << 1, 0).finished()), DomainError);
  CHECK_THROWS_AS(objective_log(pr.weights, (VectorXd(2) << 1, 0).finished()),
                  DomainError);
}

TEST_CASE("power and SIR maps invert each other: property sweep") {
  oracle::Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const Index n = rng.index(2, 8);
    ChannelInstance c = random_channel(rng, n);
    c.snr_gap = rng.uniform(1.0, 3.0);
    const Problem pr = Problem::from(c);
    VectorXd p(n);
    for (Index l = 0; l < n; ++l) p[l] = rng.uniform(0.0, c.caps[l]);

    const VectorXd gamma = sir_of_power(pr, p);
    const VectorXd expect = oracle::sir_from_gains(c.gains, c.noise, c.snr_gap, p);
    CHECK((gamma - expect).lpNorm<Eigen::Infinity>() <=
          1e-12 * std::max(1.0, expect.lpNorm<Eigen::Infinity>()));

    const VectorXd back = power_of_sir(pr, gamma);
    CHECK((back - p).lpNorm<Eigen::Infinity>() <= 1e-10);
    const VectorXd iter = oracle::power_by_iteration(pr.m.F, pr.m.v, gamma);
    CHECK((back - iter).lpNorm<Eigen::Infinity>() <= 1e-10);

    // Radii match B_l built by hand; a cap binds exactly when radius is one.
    const VectorXd radii = constraint_radii(pr, gamma);
    for (Index l = 0; l < n; ++l) {
      MatrixXd b = pr.m.F;
      b.col(l) += pr.m.v / c.caps[l];
      const double want = oracle::rho(gamma.asDiagonal() * b);
      CHECK(oracle::rel_err(radii[l], want) <= 1e-10);
      // Below the cap exactly when the radius is below one.
      CHECK((radii[l] < 1.0) == (p[l] < c.caps[l]));
    }
  }
}

TEST_CASE("region membership at the cap corner") {
  oracle::Rng rng(12);
  for (int i = 0; i < 30; ++i) {
    const Index n = rng.index(2, 6);
    const ChannelInstance c = random_channel(rng, n);
    const Problem pr = Problem::from(c);
    VectorXd p = c.caps;
    const Index off = rng.index(0, n - 1);
    p[off] *= 0.5;
    const RegionMembership r = in_achievable_region(pr, sir_of_power(pr, p));
    CHECK(r.inside);
    CHECK(static_cast<Index>(r.active_set.size()) == n - 1);
    CHECK(std::find(r.active_set.begin(), r.active_set.end(), off) == r.active_set.end());
  }
}

TEST_CASE("noiseless SIR is scale invariant") {
  oracle::Rng rng(13);
  for (int i = 0; i < 30; ++i) {
    const Index n = rng.index(2, 6);
    const Problem pr = Problem::from(random_channel(rng, n));
    VectorXd p(n);
    for (Index l = 0; l < n; ++l) p[l] = rng.uniform(0.1, 1.0);
    const VectorXd beta = noiseless_sir(pr, p);
    CHECK((noiseless_sir(pr, 7.5 * p) - beta).lpNorm<Eigen::Infinity>() <=
          1e-12 * beta.lpNorm<Eigen::Infinity>());
    CHECK((beta.array() > sir_of_power(pr, p).array()).all());
  }
}

TEST_CASE("Jacobian and gradient match finite differences") {
  oracle::Rng rng(14);
  for (int i = 0; i < 50; ++i) {
    const Index n = rng.index(2, 6);
    const ChannelInstance c = random_channel(rng, n);
    const Problem pr = Problem::from(c);
    VectorXd p(n);
    for (Index l = 0; l < n; ++l) p[l] = rng.uniform(0.1, 1.0) * c.caps[l];
    const VectorXd step = VectorXd::Constant(n, 1e-6);

    const MatrixXd jac = sir_jacobian(pr, p);
    for (Index k = 0; k < n; ++k) {
      const auto gamma_k = [&](const VectorXd& x) {
        return oracle::sir_from_gains(c.gains, c.noise, 1.0, x)[k];
      };
      const VectorXd fd = oracle::central_difference(gamma_k, p, step);
      CHECK((jac.row(k).transpose() - fd).lpNorm<Eigen::Infinity>() <=
            1e-5 * std::max(1.0, fd.lpNorm<Eigen::Infinity>()));
    }
    const auto phi = [&](const VectorXd& x) {
      return oracle::sum_rate(c.weights, oracle::sir_from_gains(c.gains, c.noise, 1.0, x));
    };
    const VectorXd fd = oracle::central_difference(phi, p, step);
    CHECK((objective_gradient_p(pr, p) - fd).lpNorm<Eigen::Infinity>() <=
          1e-6 * std::max(1.0, fd.lpNorm<Eigen::Infinity>()));
  }
}

TEST_CASE("multitone stacking") {
  oracle::Rng rng(15);
  const ChannelInstance c = random_channel(rng, 3);

  SUBCASE("one tone reproduces the single-tone problem exactly") {
    MultiToneInstance mt;
    mt.users = 3;
    mt.tones = 1;
    mt.gains = {c.gains};
    mt.noise = {c.noise};
    mt.caps = c.caps;
    mt.weights = c.weights;
    const StackedChannel s = stack_multitone(mt);
    const Problem pr = Problem::from(c);
    CHECK(s.block_diagonal);
    CHECK(s.problem.is_box());
    CHECK(s.problem.m.F == pr.m.F);
    CHECK(s.problem.m.v == pr.m.v);
    CHECK(s.problem.m.F_tilde == pr.m.F_tilde);
    CHECK(s.problem.weights == pr.weights);
    for (Index l = 0; l < 3; ++l) CHECK(s.problem.m.B[l] == pr.m.B[l]);
  }

  SUBCASE("two tones are block diagonal with split weights") {
    const ChannelInstance d = random_channel(rng, 3);
    MultiToneInstance mt;
    mt.users = 3;
    mt.tones = 2;
    mt.gains = {c.gains, d.gains};
    mt.noise = {c.noise, d.noise};
    mt.caps = c.caps;
    mt.weights = c.weights;
    const StackedChannel s = stack_multitone(mt);
    const Problem& pr = s.problem;
    CHECK(s.block_diagonal);
    CHECK_FALSE(pr.is_box());
    REQUIRE(pr.slots() == 6);
    // Slot l*2 + k belongs to user l on tone k.
    const Problem p0 = Problem::from(c);
    for (Index l = 0; l < 3; ++l) {
      CHECK(pr.owner[l * 2] == l);
      CHECK(pr.weights[l * 2 + 1] == doctest::Approx(c.weights[l] / 2));
      CHECK(pr.m.v[l * 2] == doctest::Approx(p0.m.v[l]));
      for (Index j = 0; j < 3; ++j) {
        CHECK(pr.m.F(l * 2, j * 2) == doctest::Approx(p0.m.F(l, j)));
        CHECK(pr.m.F(l * 2, j * 2 + 1) == 0.0);
      }
    }
    CHECK(pr.weights.sum() == doctest::Approx(1.0));
  }

  SUBCASE("explicit cross-tone interference clears the block flag") {
    MultiToneInstance mt;
    mt.users = 2;
    mt.tones = 2;
    mt.gains = {c.gains.topLeftCorner(2, 2), c.gains.topLeftCorner(2, 2)};
    mt.noise = {c.noise.head(2), c.noise.head(2)};
    mt.caps = c.caps.head(2);
    mt.weights = VectorXd::Constant(2, 0.5);
    MatrixXd f = MatrixXd::Constant(4, 4, 0.05);
    f.diagonal().setZero();
    mt.interference = f;
    CHECK_FALSE(stack_multitone(mt).block_diagonal);
    f(0, 0) = 0.1;
    mt.interference = f;
    CHECK_THROWS_AS(stack_multitone(mt), DomainError);
  }
}
