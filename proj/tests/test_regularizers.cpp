#include <doctest.h>

#include <cmath>

#include "bealab/flows.hpp"
#include "bealab/regularizers.hpp"
#include "bealab/rng.hpp"
#include "oracles.hpp"

using namespace bealab;

TEST_CASE("modified_loss_sgd: n=1 has no alignment term") {
  Problem p = make_scalar_quadratic();
  BatchSchedule s = single_batch_schedule(p);
  ParamVector theta{1.0};
  RegularizerBreakdown r = modified_loss_sgd(p, theta, s, 0.1, theta);
  CHECK(r.alignment_term == 0.0);
  CHECK(r.total == doctest::Approx(0.5 + 0.1 / 4.0).epsilon(1e-15));
}

TEST_CASE("modified_loss_sgd: worked two-batch value 0.55") {
  Problem p = oracles::two_center_problem();
  BatchSchedule s = oracles::two_center_schedule(p);
  ParamVector theta{1.0};
  RegularizerBreakdown r = modified_loss_sgd(p, theta, s, 0.1, theta);
  CHECK(r.base_loss == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(r.norm_term == doctest::Approx(0.0));
  CHECK(r.alignment_term == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(r.total == doctest::Approx(0.55).epsilon(1e-14));
}

TEST_CASE("modified_loss_sgd: matches the symbolic oracle") {
  std::vector<oracles::Quad1D> b{{1.5, -1.0}, {0.5, 0.5}, {2.0, 1.0},
                                 {1.0, -0.25}};
  std::vector<Matrix> mats;
  std::vector<ParamVector> centers;
  for (const auto& q : b) {
    Matrix m(1, 1);
    m.at(0, 0) = q.a;
    mats.push_back(m);
    centers.push_back(ParamVector{q.c});
  }
  Problem p = make_quadratic_explicit(mats, centers);
  BatchSchedule s;
  for (int i = 0; i < 4; ++i) s.batches.push_back(Batch{i, {p.pool()[i]}});
  const double h = 0.0625;
  for (double theta : {-0.5, 0.3, 1.2}) {
    for (double anchor : {-0.2, 0.9}) {
      auto expected = oracles::quad1d_modified_loss(b, theta, anchor, h);
      RegularizerBreakdown got = modified_loss_sgd(
          p, ParamVector{theta}, s, h, ParamVector{anchor});
      CHECK(got.base_loss == doctest::Approx(expected.base).epsilon(1e-13));
      CHECK(got.norm_term == doctest::Approx(expected.norm).epsilon(1e-13));
      CHECK(got.alignment_term ==
            doctest::Approx(expected.align).epsilon(1e-13));
      CHECK(got.total == doctest::Approx(expected.total).epsilon(1e-13));
    }
  }
}

TEST_CASE("modified_loss_sgd: identical batches collapse the double sum") {
  Problem p = make_scalar_quadratic();
  for (int n : {2, 4}) {
    BatchSchedule s = make_fullbatch_schedule(p, n);
    const double h = 0.1, theta = 0.7, anchor = 0.4;
    RegularizerBreakdown r =
        modified_loss_sgd(p, ParamVector{theta}, s, h, ParamVector{anchor});
    // E + (nh/4) g(θ)² − h(n−1)/2 · g(θ) g(anchor), g(x) = x on ½θ²
    const double expected = 0.5 * theta * theta +
                            n * h / 4.0 * theta * theta -
                            h * (n - 1) / 2.0 * theta * anchor;
    CHECK(r.total == doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("modified_loss_sgd: n=2 alignment is the single dot product") {
  Problem p = make_quadratic(2, 6, 31);
  BatchSchedule s = make_schedule(p, 2, 3, 32);
  ParamVector theta{0.3, -0.8}, anchor{0.1, 0.4};
  const double h = 0.125;
  RegularizerBreakdown r = modified_loss_sgd(p, theta, s, h, anchor);
  const double expected =
      -(h / 2.0) * grad(p, theta, s.batches[1])
                       .dot(grad(p, anchor, s.batches[0]));
  CHECK(r.alignment_term == expected);
}

TEST_CASE("modified_loss_igr: hand value and h=0") {
  Problem p = make_scalar_quadratic();
  BatchSchedule s = single_batch_schedule(p);
  RegularizerBreakdown r = modified_loss_igr(p, ParamVector{1.0}, s, 0.1);
  CHECK(r.total == doctest::Approx(0.525).epsilon(1e-15));
  RegularizerBreakdown r0 = modified_loss_igr(p, ParamVector{1.0}, s, 0.0);
  CHECK(r0.total == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(r0.norm_term == 0.0);
}

TEST_CASE("modified_loss_igr: FD gradient reproduces the igr field") {
  Problem p = make_logistic(2, 8, 3);
  BatchSchedule s = single_batch_schedule(p);
  const double h = 0.1;
  VectorField f = igr_flow(p, s, h);
  for (const ParamVector& pt : oracles::random_points(5, 2, 400)) {
    ParamVector fd = oracles::fd_scalar_gradient(
        [&](const ParamVector& x) { return modified_loss_igr(p, x, s, h).total; },
        pt);
    CHECK((f.eval(pt) + fd).norm() <= 1e-5);
  }
}

TEST_CASE("expected_shuffled_loss: n=1 equals the modified loss exactly") {
  Problem p = make_quadratic(2, 4, 33);
  BatchSchedule s = single_batch_schedule(p);
  ParamVector theta{0.2, 0.5}, anchor{-0.1, 0.3};
  RegularizerBreakdown direct = modified_loss_sgd(p, theta, s, 0.1, anchor);
  RegularizerBreakdown brute = expected_shuffled_loss(
      p, theta, s, 0.1, anchor, ExpectationMethod::brute_force);
  RegularizerBreakdown closed = expected_shuffled_loss(
      p, theta, s, 0.1, anchor, ExpectationMethod::closed_form);
  CHECK(brute.total == direct.total);
  CHECK(closed.total == doctest::Approx(direct.total).epsilon(1e-15));
}

TEST_CASE("expected_shuffled_loss: brute force matches the closed form") {
  Problem quad = make_quadratic(3, 12, 34);
  Problem logi = make_logistic(3, 12, 34);
  for (const Problem* p : {&quad, &logi}) {
    for (int n : {2, 3, 4}) {
      BatchSchedule s = make_schedule(*p, n, 3, 35);
      ParamVector theta{0.4, -0.2, 0.1}, anchor{0.0, 0.3, -0.5};
      RegularizerBreakdown closed = expected_shuffled_loss(
          *p, theta, s, 0.1, anchor, ExpectationMethod::closed_form);
      RegularizerBreakdown brute = expected_shuffled_loss(
          *p, theta, s, 0.1, anchor, ExpectationMethod::brute_force);
      CHECK(std::abs(closed.total - brute.total) <= 1e-10);
      CHECK(std::abs(closed.alignment_term - brute.alignment_term) <= 1e-10);
    }
  }
}

TEST_CASE("expected_shuffled_loss: FD-only gradients still agree to 1e-6") {
  Problem p0 = make_logistic(2, 8, 36);
  // strip the analytic gradient so both methods run through grad_fd
  Problem p(p0.descriptor(), p0.pool(),
            [p0](const ParamVector& t, const Example& ex) {
              return p0.example_loss(t, ex);
            });
  BatchSchedule s = make_schedule(p, 3, 2, 37);
  ParamVector theta{0.3, -0.4}, anchor{0.2, 0.2};
  RegularizerBreakdown closed = expected_shuffled_loss(
      p, theta, s, 0.1, anchor, ExpectationMethod::closed_form);
  RegularizerBreakdown brute = expected_shuffled_loss(
      p, theta, s, 0.1, anchor, ExpectationMethod::brute_force);
  CHECK(std::abs(closed.total - brute.total) <= 1e-6);
}

TEST_CASE("expected_shuffled_loss: permutation invariance for equal batches") {
  Problem p = make_quadratic(2, 4, 38);
  BatchSchedule s = make_fullbatch_schedule(p, 3);
  ParamVector theta{0.7, -0.1}, anchor{0.2, 0.9};
  RegularizerBreakdown direct = modified_loss_sgd(p, theta, s, 0.1, anchor);
  RegularizerBreakdown brute = expected_shuffled_loss(
      p, theta, s, 0.1, anchor, ExpectationMethod::brute_force);
  RegularizerBreakdown closed = expected_shuffled_loss(
      p, theta, s, 0.1, anchor, ExpectationMethod::closed_form);
  CHECK(std::abs(brute.total - direct.total) <= 1e-14);
  CHECK(std::abs(closed.total - direct.total) <= 1e-12);
}

TEST_CASE("expected_shuffled_loss: brute force rejects n > 6") {
  Problem p = make_quadratic(2, 8, 39);
  BatchSchedule s = make_schedule(p, 7, 1, 40);
  CHECK_THROWS_AS(
      expected_shuffled_loss(p, ParamVector(2, 0.0), s, 0.1,
                             ParamVector(2, 0.0),
                             ExpectationMethod::brute_force),
      std::invalid_argument);
}

TEST_CASE("breakdown: total is the sum of its parts") {
  Problem p = make_logistic(3, 9, 41);
  Rng rng(42);
  for (int trial = 0; trial < 10; ++trial) {
    BatchSchedule s = make_schedule(p, 3, 2, rng.next_u64());
    ParamVector theta = rng.uniform_vec(3, -1.0, 1.0);
    ParamVector anchor = rng.uniform_vec(3, -1.0, 1.0);
    RegularizerBreakdown r = modified_loss_sgd(p, theta, s, 0.1, anchor);
    CHECK(std::abs(r.total - (r.base_loss + r.norm_term + r.alignment_term)) <=
          1e-12);
  }
}

TEST_CASE("game_modified_losses: h=0 returns the raw losses") {
  Game g = make_quadratic_game(2, 2, 11, false);
  ParamVector phi{0.3, 0.1}, theta{-0.2, 0.5};
  GamePoint anchor{ParamVector{0.0, 0.0}, ParamVector{0.0, 0.0}};
  GameLossPair r = game_modified_losses(g, phi, theta, 0.0, anchor);
  CHECK(r.phi.total == g.loss_phi(phi, theta));
  CHECK(r.theta.total == g.loss_theta(phi, theta));
}

TEST_CASE("game_modified_losses: zero-sum flips the interaction sign") {
  const std::uint64_t seed = 50;
  Game zs = make_zero_sum_quadratic_pair(2, 2, seed);
  Game cp = make_common_payoff_quadratic(2, 2, seed);
  ParamVector phi{0.4, -0.3}, theta{0.2, 0.6};
  GamePoint anchor{ParamVector{0.1, 0.1}, ParamVector{-0.2, 0.3}};
  const double h = 0.1;
  GameLossPair rz = game_modified_losses(zs, phi, theta, h, anchor);
  GameLossPair rc = game_modified_losses(cp, phi, theta, h, anchor);
  CHECK(rz.phi.alignment_term ==
        doctest::Approx(-rc.phi.alignment_term).epsilon(1e-12));

  // the anchored identity behind the flip
  ParamVector gtp = zs.grad_theta_E_phi(phi, theta);
  ParamVector gtt = zs.grad_theta_E_theta(phi, theta);
  ParamVector gtt_anchor = zs.grad_theta_E_theta(anchor.phi, anchor.theta);
  CHECK(gtp.dot(gtt_anchor) ==
        doctest::Approx(-gtt.dot(gtt_anchor)).epsilon(1e-12));
}

TEST_CASE("game_modified_losses: FD gradients reproduce the anchored flow") {
  Game quad = make_quadratic_game(2, 2, 11, false);
  const double h = 0.1;
  GamePoint anchor{ParamVector{0.3, -0.1}, ParamVector{0.2, 0.4}};
  GameFieldPair flow = game_anchored_flow(quad, h, anchor);
  Rng rng(52);
  for (int i = 0; i < 5; ++i) {
    ParamVector phi = rng.uniform_vec(2, -1.0, 1.0);
    ParamVector theta = rng.uniform_vec(2, -1.0, 1.0);
    GamePoint field = flow.eval(phi, theta);
    ParamVector fd_phi = oracles::fd_scalar_gradient(
        [&](const ParamVector& x) {
          return game_modified_losses(quad, x, theta, h, anchor).phi.total;
        },
        phi);
    ParamVector fd_theta = oracles::fd_scalar_gradient(
        [&](const ParamVector& x) {
          return game_modified_losses(quad, phi, x, h, anchor).theta.total;
        },
        theta);
    CHECK((field.phi + fd_phi).norm() <= 1e-5);
    CHECK((field.theta + fd_theta).norm() <= 1e-5);
  }
}

TEST_CASE("gan_interaction_coeffs: half-confidence grid gives 4 in both modes") {
  for (CoeffMode m : {CoeffMode::non_saturating, CoeffMode::saturating}) {
    CoeffMatrix c = gan_interaction_coeffs({0.5}, {0.5}, m);
    CHECK(c.at(0, 0) == doctest::Approx(4.0).epsilon(1e-15));
  }
}

TEST_CASE("gan_interaction_coeffs: exact reciprocal products on a random grid") {
  Rng rng(53);
  std::vector<double> cur, prev;
  for (int i = 0; i < 8; ++i) {
    cur.push_back(rng.uniform(0.05, 0.95));
    prev.push_back(rng.uniform(0.05, 0.95));
  }
  CoeffMatrix ns = gan_interaction_coeffs(cur, prev, CoeffMode::non_saturating);
  CoeffMatrix sat = gan_interaction_coeffs(cur, prev, CoeffMode::saturating);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) {
      CHECK(ns.at(i, j) == 1.0 / ((1.0 - cur[i]) * prev[j]));
      CHECK(sat.at(i, j) == 1.0 / ((1.0 - cur[i]) * (1.0 - prev[j])));
      CHECK(ns.at(i, j) > 0.0);
      CHECK(sat.at(i, j) > 0.0);
    }
}

TEST_CASE("gan_interaction_coeffs: monotone in current confidence") {
  std::vector<double> cur;
  for (int i = 1; i <= 12; ++i) cur.push_back(i / 13.0);
  CoeffMatrix c = gan_interaction_coeffs(cur, {0.4}, CoeffMode::non_saturating);
  for (std::size_t i = 1; i < cur.size(); ++i)
    CHECK(c.at(i, 0) > c.at(i - 1, 0));  // discriminator more fooled, larger
}

TEST_CASE("gan_interaction_coeffs: saturating dominates when the generator won") {
  // d_prev near 1: generator fooled the discriminator at the previous step
  for (double dprev : {0.6, 0.75, 0.9, 0.99}) {
    CoeffMatrix ns =
        gan_interaction_coeffs({0.5}, {dprev}, CoeffMode::non_saturating);
    CoeffMatrix sat =
        gan_interaction_coeffs({0.5}, {dprev}, CoeffMode::saturating);
    CHECK(sat.at(0, 0) > ns.at(0, 0));
  }
}

TEST_CASE("gan_interaction_coeffs: rejects out-of-range probabilities") {
  CHECK_THROWS_AS(gan_interaction_coeffs({0.0}, {0.5},
                                         CoeffMode::non_saturating),
                  std::domain_error);
  CHECK_THROWS_AS(gan_interaction_coeffs({0.5}, {1.0},
                                         CoeffMode::saturating),
                  std::domain_error);
  CHECK_THROWS_AS(gan_interaction_coeffs({}, {0.5},
                                         CoeffMode::non_saturating),
                  std::invalid_argument);
}
