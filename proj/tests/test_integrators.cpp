#include <doctest.h>

#include <cmath>

#include "bealab/flows.hpp"
#include "bealab/integrators.hpp"
#include "bealab/problems.hpp"
#include "oracles.hpp"

using namespace bealab;

namespace {

VectorField exp_decay_field() {
  return VectorField::from_function(1, [](const ParamVector& x) {
    return ParamVector{-x[0]};
  });
}

}  // namespace

TEST_CASE("integrate: linear decay closed form") {
  ParamVector end = integrate(exp_decay_field(), ParamVector{1.0}, 1.0);
  CHECK(std::abs(end[0] - std::exp(-1.0)) <= 1e-9);
}

TEST_CASE("integrate: zero time returns the start bitwise") {
  ParamVector x0{0.123456789, -9.87654321};
  VectorField f = VectorField::from_function(2, [](const ParamVector& x) {
    return ParamVector{x[1], -x[0]};
  });
  ParamVector end = integrate(f, x0, 0.0);
  CHECK(end == x0);
}

TEST_CASE("integrate: igr flow on the unit quadratic has a closed form") {
  Problem p = make_scalar_quadratic();
  const double h = 0.1;
  VectorField f = igr_flow(p, single_batch_schedule(p), h);
  ParamVector end = integrate(f, ParamVector{1.0}, h);
  CHECK(std::abs(end[0] - std::exp(-(1.0 + h / 2.0) * h)) <= 1e-9);
}

TEST_CASE("integrate_pair: zero field is the identity") {
  GameFieldPair zero(
      FlowKind::custom, 0.0, 1, 1,
      [](const ParamVector&, const ParamVector&) {
        return GameFieldParts{
            {ParamVector{0.0}, ParamVector{0.0}, ParamVector{0.0}},
            {ParamVector{0.0}, ParamVector{0.0}, ParamVector{0.0}}};
      },
      nullptr);
  GamePoint start{ParamVector{0.25}, ParamVector{-0.75}};
  GamePoint end = integrate_pair(zero, start, 2.0);
  CHECK(end.phi == start.phi);
  CHECK(end.theta == start.theta);
}

TEST_CASE("integrate_pair: bilinear base flow rotates") {
  Game g = make_bilinear_zero_sum();
  GameFieldPair base = game_bea_flow(g, 0.0);
  GamePoint end = integrate_pair(base, {ParamVector{1.0}, ParamVector{0.0}},
                                 std::acos(-1.0) / 2.0);
  CHECK(std::abs(end.phi[0] - 0.0) <= 1e-7);
  CHECK(std::abs(end.theta[0] - 1.0) <= 1e-7);
}

TEST_CASE("integrate_pair: doubling substeps drops error fourth order") {
  Game g = make_bilinear_zero_sum();
  GameFieldPair base = game_bea_flow(g, 0.0);
  GamePoint start{ParamVector{1.0}, ParamVector{0.0}};
  const double T = 1.0;
  auto endpoint = [&](int substeps) {
    return integrate_pair(base, start, T, IntegratorConfig{substeps});
  };
  GamePoint ref = endpoint(128);
  auto err = [&](const GamePoint& x) {
    return std::sqrt(std::pow(x.phi[0] - ref.phi[0], 2) +
                     std::pow(x.theta[0] - ref.theta[0], 2));
  };
  const double e8 = err(endpoint(8));
  const double e16 = err(endpoint(16));
  CHECK(e16 * 12.0 <= e8);  // ~16x per halving for a 4th-order scheme
}

TEST_CASE("integrate: order-4 self-convergence slope") {
  VectorField f = VectorField::from_function(1, [](const ParamVector& x) {
    return ParamVector{std::sin(x[0]) - 0.5 * x[0]};
  });
  ParamVector x0{0.9};
  const double T = 1.0;
  ParamVector ref = integrate(f, x0, T, IntegratorConfig{256});
  std::vector<double> hs, errs;
  for (int s : {8, 16, 32, 64}) {
    ParamVector end = integrate(f, x0, T, IntegratorConfig{s});
    hs.push_back(1.0 / s);
    errs.push_back(std::abs(end[0] - ref[0]));
  }
  double sxx = 0, sxy = 0, xb = 0, yb = 0;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    xb += std::log(hs[i]) / hs.size();
    yb += std::log(errs[i]) / hs.size();
  }
  for (std::size_t i = 0; i < hs.size(); ++i) {
    sxx += (std::log(hs[i]) - xb) * (std::log(hs[i]) - xb);
    sxy += (std::log(hs[i]) - xb) * (std::log(errs[i]) - yb);
  }
  CHECK(sxy / sxx >= 3.8);
}

TEST_CASE("integrate: time additivity at fixed substep density") {
  Problem p = make_scalar_quadratic();
  const double h = 0.125;
  VectorField f = igr_flow(p, single_batch_schedule(p), h);
  ParamVector x0{1.0};
  ParamVector whole = integrate(f, x0, 4.0 * h);
  ParamVector split = integrate(f, integrate(f, x0, h), 3.0 * h);
  CHECK((whole - split).norm() <= 1e-9);
}

TEST_CASE("integrate: reversible on linear fields") {
  VectorField forward = exp_decay_field();
  VectorField backward = VectorField::from_function(
      1, [](const ParamVector& x) { return ParamVector{x[0]}; });
  ParamVector x0{1.0};
  ParamVector back = integrate(backward, integrate(forward, x0, 1.0), 1.0);
  CHECK(std::abs(back[0] - x0[0]) <= 1e-8);
}

TEST_CASE("integrate: divergence guard reports the failure time") {
  VectorField cubic = VectorField::from_function(1, [](const ParamVector& x) {
    return ParamVector{x[0] * x[0] * x[0]};
  });
  CHECK_THROWS_AS(integrate(cubic, ParamVector{2.0}, 0.5), DivergenceError);
  try {
    integrate(cubic, ParamVector{2.0}, 0.5);
  } catch (const DivergenceError& e) {
    CHECK(e.at_time > 0.0);
    CHECK(e.at_time <= 0.5);
  }
}

TEST_CASE("integrator config validation") {
  CHECK_THROWS_AS(IntegratorConfig{0}.validate(), std::invalid_argument);
  CHECK_THROWS_AS(
      integrate(exp_decay_field(), ParamVector{1.0}, -1.0),
      std::invalid_argument);
}
