#include "bealab/optimizers.hpp"

#include <cstdio>
#include <stdexcept>

#include "bealab/integrators.hpp"

namespace bealab {

Trajectory sgd_steps(const Problem& problem, const ParamVector& theta0,
                     double h, const BatchSchedule& schedule,
                     const DerivativeConfig& cfg) {
  if (h <= 0.0) throw std::invalid_argument("sgd_steps: h must be > 0");
  if (schedule.batches.empty())
    throw std::invalid_argument("sgd_steps: empty schedule");
  Trajectory t;
  t.h = h;
  t.schedule_digest = schedule_digest(schedule);
  t.iterates.push_back(theta0);
  ParamVector theta = theta0;
  for (std::size_t step = 0; step < schedule.batches.size(); ++step) {
    theta.axpy(-h, grad(problem, theta, schedule.batches[step], cfg));
    if (!theta.all_finite())
      throw DivergenceError(
          "sgd_steps: non-finite iterate at step " + std::to_string(step + 1),
          static_cast<double>(step + 1));
    t.iterates.push_back(theta);
  }
  return t;
}

GameTrajectory simultaneous_gd(const Game& game, const ParamVector& phi0,
                               const ParamVector& theta0, double h, int n,
                               const DerivativeConfig& cfg) {
  if (h <= 0.0) throw std::invalid_argument("simultaneous_gd: h must be > 0");
  if (n < 1) throw std::invalid_argument("simultaneous_gd: n must be >= 1");
  GameTrajectory t;
  t.h = h;
  t.iterates.push_back(GamePoint{phi0, theta0});
  ParamVector phi = phi0, theta = theta0;
  for (int step = 0; step < n; ++step) {
    GameGrads g = game_grads(game, phi, theta, cfg);
    phi.axpy(-h, g.grad_phi_E_phi);
    theta.axpy(-h, g.grad_theta_E_theta);
    if (!phi.all_finite() || !theta.all_finite())
      throw DivergenceError("simultaneous_gd: non-finite iterate at step " +
                                std::to_string(step + 1),
                            static_cast<double>(step + 1));
    t.iterates.push_back(GamePoint{phi, theta});
  }
  return t;
}

std::string trajectory_csv(const Trajectory& t) {
  std::string out = "step";
  const std::size_t dim = t.iterates.empty() ? 0 : t.iterates[0].dim();
  for (std::size_t i = 0; i < dim; ++i) out += ",p" + std::to_string(i);
  out += "\n";
  char buf[64];
  for (std::size_t s = 0; s < t.iterates.size(); ++s) {
    out += std::to_string(s);
    for (std::size_t i = 0; i < dim; ++i) {
      std::snprintf(buf, sizeof(buf), ",%.17g", t.iterates[s][i]);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

}  // namespace bealab
