#include "bealab/integrators.hpp"

#include <cmath>

namespace bealab {
namespace {

constexpr double kDivergenceNorm = 1e12;

long step_count(double total_time, double h_unit, int substeps_per_h) {
  const double chunks = std::ceil(total_time / h_unit);
  return static_cast<long>(chunks) * substeps_per_h;
}

}  // namespace

ParamVector integrate(const VectorField& field, const ParamVector& initial,
                      double total_time, const IntegratorConfig& cfg) {
  cfg.validate();
  if (total_time < 0.0)
    throw std::invalid_argument("integrate: total_time must be >= 0");
  if (initial.dim() != field.dim())
    throw std::invalid_argument("integrate: initial dim mismatch");
  if (total_time == 0.0) return initial;

  const double h_unit = field.h() > 0.0 ? field.h() : total_time;
  const long steps = step_count(total_time, h_unit, cfg.substeps_per_h);
  const double dt = total_time / static_cast<double>(steps);

  ParamVector x = initial;
  for (long s = 0; s < steps; ++s) {
    ParamVector k1 = field.eval(x);
    ParamVector k2 = field.eval(x + (dt / 2.0) * k1);
    ParamVector k3 = field.eval(x + (dt / 2.0) * k2);
    ParamVector k4 = field.eval(x + dt * k3);
    x.axpy(dt / 6.0, k1);
    x.axpy(dt / 3.0, k2);
    x.axpy(dt / 3.0, k3);
    x.axpy(dt / 6.0, k4);
    if (!x.all_finite() || x.norm() > kDivergenceNorm)
      throw DivergenceError("integrate: state diverged at t = " +
                                std::to_string(dt * static_cast<double>(s + 1)),
                            dt * static_cast<double>(s + 1));
  }
  return x;
}

GamePoint integrate_pair(const GameFieldPair& pair, const GamePoint& start,
                         double total_time, const IntegratorConfig& cfg) {
  cfg.validate();
  if (total_time < 0.0)
    throw std::invalid_argument("integrate_pair: total_time must be >= 0");
  if (start.phi.dim() != pair.dim_phi() || start.theta.dim() != pair.dim_theta())
    throw std::invalid_argument("integrate_pair: start dim mismatch");
  if (total_time == 0.0) return start;

  const double h_unit = pair.h() > 0.0 ? pair.h() : total_time;
  const long steps = step_count(total_time, h_unit, cfg.substeps_per_h);
  const double dt = total_time / static_cast<double>(steps);

  ParamVector phi = start.phi, theta = start.theta;
  for (long s = 0; s < steps; ++s) {
    GamePoint k1 = pair.eval(phi, theta);
    GamePoint k2 = pair.eval(phi + (dt / 2.0) * k1.phi,
                             theta + (dt / 2.0) * k1.theta);
    GamePoint k3 = pair.eval(phi + (dt / 2.0) * k2.phi,
                             theta + (dt / 2.0) * k2.theta);
    GamePoint k4 = pair.eval(phi + dt * k3.phi, theta + dt * k3.theta);
    phi.axpy(dt / 6.0, k1.phi);
    phi.axpy(dt / 3.0, k2.phi);
    phi.axpy(dt / 3.0, k3.phi);
    phi.axpy(dt / 6.0, k4.phi);
    theta.axpy(dt / 6.0, k1.theta);
    theta.axpy(dt / 3.0, k2.theta);
    theta.axpy(dt / 3.0, k3.theta);
    theta.axpy(dt / 6.0, k4.theta);
    const double norm2 = phi.dot(phi) + theta.dot(theta);
    if (!phi.all_finite() || !theta.all_finite() ||
        norm2 > kDivergenceNorm * kDivergenceNorm)
      throw DivergenceError("integrate_pair: state diverged at t = " +
                                std::to_string(dt * static_cast<double>(s + 1)),
                            dt * static_cast<double>(s + 1));
  }
  return GamePoint{phi, theta};
}

}  // namespace bealab
