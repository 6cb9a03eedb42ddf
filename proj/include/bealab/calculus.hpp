// Derivative oracles shared by flows, optimizers, and regularizers: analytic
// paths when the problem provides them, central finite differences otherwise.
// Central (not forward) differences throughout — the downstream order claims
// live at h³ and need second-order-accurate derivatives.
#pragma once

#include <vector>

#include <json.hpp>

#include "bealab/games.hpp"
#include "bealab/linalg.hpp"
#include "bealab/problems.hpp"

namespace bealab {

struct DerivativeConfig {
  double fd_step_scale = 1e-5;
  double tolerance_abs = 1e-6;
  double tolerance_rel = 1e-4;

  void validate() const;
};

class DifferentiationError : public std::runtime_error {
 public:
  explicit DifferentiationError(const std::string& what)
      : std::runtime_error(what) {}
};

// ∇E(θ; X): analytic per-example gradients averaged when available, else
// component-wise central differences with step fd_step_scale·(1+|θ_k|).
ParamVector grad(const Problem& problem, const ParamVector& params,
                 const Batch& batch, const DerivativeConfig& cfg = {});

// Finite-difference path, always available (cross-validation target).
ParamVector grad_fd(const Problem& problem, const ParamVector& params,
                    const Batch& batch, const DerivativeConfig& cfg = {});

// Mean of batch gradients over the schedule ("pooled" gradient).
ParamVector schedule_grad(const Problem& problem, const ParamVector& params,
                          const BatchSchedule& schedule,
                          const DerivativeConfig& cfg = {});

// H(θ; X)·v: analytic HVP when provided, else
// [grad(θ+εv) − grad(θ−εv)] / (2ε) with ε = fd_step_scale·(1+‖θ‖)/max(‖v‖,1e−12).
ParamVector grad_directional_jacobian(const Problem& problem,
                                      const ParamVector& params,
                                      const Batch& batch,
                                      const ParamVector& direction,
                                      const DerivativeConfig& cfg = {});

ParamVector schedule_directional_jacobian(const Problem& problem,
                                          const ParamVector& params,
                                          const BatchSchedule& schedule,
                                          const ParamVector& direction,
                                          const DerivativeConfig& cfg = {});

struct GameGrads {
  ParamVector grad_phi_E_phi;
  ParamVector grad_theta_E_phi;
  ParamVector grad_phi_E_theta;
  ParamVector grad_theta_E_theta;
};

GameGrads game_grads(const Game& game, const ParamVector& phi,
                     const ParamVector& theta,
                     const DerivativeConfig& cfg = {});

// Directional derivative of the selected gradient field, analytic when the
// game carries second derivatives, else central FD on the gradient map.
ParamVector game_mixed_directional(const Game& game, const ParamVector& phi,
                                   const ParamVector& theta, GameSecond which,
                                   const ParamVector& v,
                                   const DerivativeConfig& cfg = {});

struct CheckReport {
  double max_abs = 0.0;
  double max_rel = 0.0;
  bool passed = true;
  int points_tested = 0;

  nlohmann::json to_json() const;
};

// Analytic vs finite-difference discrepancy over the given points; pass iff
// every component satisfies |a−f| <= max(tolerance_abs, tolerance_rel·|f|).
CheckReport check_gradient(const Problem& problem,
                           const std::vector<ParamVector>& points,
                           const DerivativeConfig& cfg = {});

struct GamePoint {
  ParamVector phi;
  ParamVector theta;
};

CheckReport check_gradient(const Game& game,
                           const std::vector<GamePoint>& points,
                           const DerivativeConfig& cfg = {});

}  // namespace bealab
