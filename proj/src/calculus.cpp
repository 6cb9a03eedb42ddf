#include "bealab/calculus.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bealab {
namespace {

void check_finite_loss(double value, std::size_t component, const char* where) {
  if (!std::isfinite(value))
    throw DifferentiationError(std::string(where) +
                               ": non-finite loss while differencing component " +
                               std::to_string(component));
}

ParamVector game_grad_fd_block(const Game& game, const ParamVector& phi,
                               const ParamVector& theta, bool loss_is_phi,
                               bool wrt_phi, const DerivativeConfig& cfg) {
  const ParamVector& block = wrt_phi ? phi : theta;
  ParamVector out(block.dim());
  for (std::size_t k = 0; k < block.dim(); ++k) {
    const double eps = cfg.fd_step_scale * (1.0 + std::abs(block[k]));
    ParamVector hi = block, lo = block;
    hi[k] += eps;
    lo[k] -= eps;
    const ParamVector& phi_hi = wrt_phi ? hi : phi;
    const ParamVector& phi_lo = wrt_phi ? lo : phi;
    const ParamVector& th_hi = wrt_phi ? theta : hi;
    const ParamVector& th_lo = wrt_phi ? theta : lo;
    const double fp = loss_is_phi ? game.loss_phi(phi_hi, th_hi)
                                  : game.loss_theta(phi_hi, th_hi);
    const double fm = loss_is_phi ? game.loss_phi(phi_lo, th_lo)
                                  : game.loss_theta(phi_lo, th_lo);
    check_finite_loss(fp, k, "game grad_fd");
    check_finite_loss(fm, k, "game grad_fd");
    out[k] = (fp - fm) / (2.0 * eps);
  }
  return out;
}

void accumulate_discrepancy(const ParamVector& analytic, const ParamVector& fd,
                            CheckReport& report, const DerivativeConfig& cfg) {
  for (std::size_t k = 0; k < analytic.dim(); ++k) {
    const double abs_err = std::abs(analytic[k] - fd[k]);
    const double denom = std::abs(fd[k]);
    report.max_abs = std::max(report.max_abs, abs_err);
    if (denom > 0.0) report.max_rel = std::max(report.max_rel, abs_err / denom);
    if (abs_err > std::max(cfg.tolerance_abs, cfg.tolerance_rel * denom))
      report.passed = false;
  }
}

}  // namespace

void DerivativeConfig::validate() const {
  if (fd_step_scale <= 0.0 || tolerance_abs <= 0.0 || tolerance_rel <= 0.0)
    throw std::invalid_argument("DerivativeConfig: fields must be positive");
}

ParamVector grad(const Problem& problem, const ParamVector& params,
                 const Batch& batch, const DerivativeConfig& cfg) {
  if (static_cast<int>(params.dim()) != problem.dim())
    throw std::invalid_argument("grad: params dim mismatch");
  if (!problem.has_analytic_grad()) return grad_fd(problem, params, batch, cfg);
  ParamVector acc(params.dim(), 0.0);
  for (const Example& ex : batch.examples)
    acc += problem.example_grad(params, ex);
  acc *= 1.0 / static_cast<double>(batch.examples.size());
  return acc;
}

ParamVector grad_fd(const Problem& problem, const ParamVector& params,
                    const Batch& batch, const DerivativeConfig& cfg) {
  cfg.validate();
  ParamVector out(params.dim());
  ParamVector work = params;
  for (std::size_t k = 0; k < params.dim(); ++k) {
    const double eps = cfg.fd_step_scale * (1.0 + std::abs(params[k]));
    work[k] = params[k] + eps;
    const double fp = problem.batch_loss(work, batch);
    work[k] = params[k] - eps;
    const double fm = problem.batch_loss(work, batch);
    work[k] = params[k];
    check_finite_loss(fp, k, "grad_fd");
    check_finite_loss(fm, k, "grad_fd");
    out[k] = (fp - fm) / (2.0 * eps);
  }
  return out;
}

ParamVector schedule_grad(const Problem& problem, const ParamVector& params,
                          const BatchSchedule& schedule,
                          const DerivativeConfig& cfg) {
  if (schedule.batches.empty())
    throw std::invalid_argument("schedule_grad: empty schedule");
  ParamVector acc(params.dim(), 0.0);
  for (const Batch& b : schedule.batches) acc += grad(problem, params, b, cfg);
  acc *= 1.0 / static_cast<double>(schedule.batches.size());
  return acc;
}

ParamVector grad_directional_jacobian(const Problem& problem,
                                      const ParamVector& params,
                                      const Batch& batch,
                                      const ParamVector& direction,
                                      const DerivativeConfig& cfg) {
  cfg.validate();
  if (direction.dim() != params.dim())
    throw std::invalid_argument("grad_directional_jacobian: dim mismatch");
  if (params.dim() == 0)
    throw std::invalid_argument("grad_directional_jacobian: zero dimension");
  const double vnorm = direction.norm();
  if (vnorm == 0.0) return ParamVector(params.dim(), 0.0);

  if (problem.has_analytic_hvp()) {
    ParamVector acc(params.dim(), 0.0);
    for (const Example& ex : batch.examples)
      acc += problem.example_hvp(params, ex, direction);
    acc *= 1.0 / static_cast<double>(batch.examples.size());
    return acc;
  }

  const double eps =
      cfg.fd_step_scale * (1.0 + params.norm()) / std::max(vnorm, 1e-12);
  ParamVector hi = params, lo = params;
  hi.axpy(eps, direction);
  lo.axpy(-eps, direction);
  ParamVector gp = grad(problem, hi, batch, cfg);
  ParamVector gm = grad(problem, lo, batch, cfg);
  if (!gp.all_finite() || !gm.all_finite())
    throw DifferentiationError("grad_directional_jacobian: non-finite gradient");
  gp -= gm;
  gp *= 1.0 / (2.0 * eps);
  return gp;
}

ParamVector schedule_directional_jacobian(const Problem& problem,
                                          const ParamVector& params,
                                          const BatchSchedule& schedule,
                                          const ParamVector& direction,
                                          const DerivativeConfig& cfg) {
  if (schedule.batches.empty())
    throw std::invalid_argument("schedule_directional_jacobian: empty schedule");
  ParamVector acc(params.dim(), 0.0);
  for (const Batch& b : schedule.batches)
    acc += grad_directional_jacobian(problem, params, b, direction, cfg);
  acc *= 1.0 / static_cast<double>(schedule.batches.size());
  return acc;
}

GameGrads game_grads(const Game& game, const ParamVector& phi,
                     const ParamVector& theta, const DerivativeConfig& cfg) {
  cfg.validate();
  return GameGrads{game.grad_phi_E_phi(phi, theta),
                   game.grad_theta_E_phi(phi, theta),
                   game.grad_phi_E_theta(phi, theta),
                   game.grad_theta_E_theta(phi, theta)};
}

ParamVector game_mixed_directional(const Game& game, const ParamVector& phi,
                                   const ParamVector& theta, GameSecond which,
                                   const ParamVector& v,
                                   const DerivativeConfig& cfg) {
  cfg.validate();
  const bool along_phi = (which == GameSecond::grad_phi_E_phi_along_phi ||
                          which == GameSecond::grad_theta_E_theta_along_phi);
  const ParamVector& block = along_phi ? phi : theta;
  if (v.dim() != block.dim())
    throw std::invalid_argument("game_mixed_directional: direction dim mismatch");
  const double vnorm = v.norm();
  if (vnorm == 0.0) {
    const bool out_phi = (which == GameSecond::grad_phi_E_phi_along_phi ||
                          which == GameSecond::grad_phi_E_phi_along_theta);
    return ParamVector(out_phi ? phi.dim() : theta.dim(), 0.0);
  }
  if (game.has_analytic_second()) return game.second(phi, theta, which, v);

  const double eps =
      cfg.fd_step_scale * (1.0 + block.norm()) / std::max(vnorm, 1e-12);
  ParamVector hi = block, lo = block;
  hi.axpy(eps, v);
  lo.axpy(-eps, v);
  auto grad_at = [&](const ParamVector& moved) {
    const ParamVector& p = along_phi ? moved : phi;
    const ParamVector& t = along_phi ? theta : moved;
    switch (which) {
      case GameSecond::grad_phi_E_phi_along_phi:
      case GameSecond::grad_phi_E_phi_along_theta:
        return game.grad_phi_E_phi(p, t);
      case GameSecond::grad_theta_E_theta_along_phi:
      case GameSecond::grad_theta_E_theta_along_theta:
        return game.grad_theta_E_theta(p, t);
    }
    throw std::logic_error("unreachable");
  };
  ParamVector gp = grad_at(hi);
  ParamVector gm = grad_at(lo);
  if (!gp.all_finite() || !gm.all_finite())
    throw DifferentiationError("game_mixed_directional: non-finite gradient");
  gp -= gm;
  gp *= 1.0 / (2.0 * eps);
  return gp;
}

nlohmann::json CheckReport::to_json() const {
  return {{"max_abs", max_abs},
          {"max_rel", max_rel},
          {"passed", passed},
          {"points_tested", points_tested}};
}

CheckReport check_gradient(const Problem& problem,
                           const std::vector<ParamVector>& points,
                           const DerivativeConfig& cfg) {
  cfg.validate();
  CheckReport report;
  if (!problem.has_analytic_grad()) return report;
  Batch batch = full_batch(problem);
  for (const ParamVector& p : points) {
    accumulate_discrepancy(grad(problem, p, batch, cfg),
                           grad_fd(problem, p, batch, cfg), report, cfg);
    ++report.points_tested;
  }
  return report;
}

CheckReport check_gradient(const Game& game,
                           const std::vector<GamePoint>& points,
                           const DerivativeConfig& cfg) {
  cfg.validate();
  CheckReport report;
  for (const GamePoint& pt : points) {
    GameGrads g = game_grads(game, pt.phi, pt.theta, cfg);
    accumulate_discrepancy(
        g.grad_phi_E_phi,
        game_grad_fd_block(game, pt.phi, pt.theta, true, true, cfg), report,
        cfg);
    accumulate_discrepancy(
        g.grad_theta_E_phi,
        game_grad_fd_block(game, pt.phi, pt.theta, true, false, cfg), report,
        cfg);
    accumulate_discrepancy(
        g.grad_phi_E_theta,
        game_grad_fd_block(game, pt.phi, pt.theta, false, true, cfg), report,
        cfg);
    accumulate_discrepancy(
        g.grad_theta_E_theta,
        game_grad_fd_block(game, pt.phi, pt.theta, false, false, cfg), report,
        cfg);
    ++report.points_tested;
  }
  return report;
}

}  // namespace bealab
