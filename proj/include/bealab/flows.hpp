// Continuous-time vector fields whose solutions track the discrete optimizers:
// the plain gradient flow, the gradient-norm-corrected flow
//   θ̇ = −∇E − (h/2)·H∇E = −∇(E + (h/4)‖∇E‖²),
// the anchored n-step mini-batch flow
//   θ̇ = −∇E_pooled − (nh/2)·H_pooled∇E_pooled
//        + (h/n)·Σ_{μ=1..n−1} H(θ;X^μ)·Σ_{τ<μ} ∇E(anchor;X^τ),
// and the two-player analogues with self and interaction corrections. Anchor
// gradients are evaluated once at construction and cached as constants, so
// every field is an autonomous ODE. Fields expose their additive
// base/drift/alignment decomposition as part of the public contract.
#pragma once

#include <functional>
#include <memory>
#include <optional>

#include <json.hpp>

#include "bealab/calculus.hpp"
#include "bealab/games.hpp"
#include "bealab/linalg.hpp"
#include "bealab/problems.hpp"

namespace bealab {

enum class FlowKind {
  gradient_flow,
  igr,
  multi_step_sgd,
  multi_step_fullbatch,
  game_bea,
  game_anchored,
  custom,
};

const char* flow_kind_name(FlowKind kind);

struct FieldParts {
  ParamVector base;       // −gradient term
  ParamVector drift;      // h-scaled self/norm correction
  ParamVector alignment;  // h-scaled anchored cross-batch correction

  ParamVector total() const { return base + drift + alignment; }
};

class VectorField {
 public:
  using PartsFn = std::function<FieldParts(const ParamVector&)>;

  VectorField(FlowKind kind, double h, std::size_t dim, PartsFn parts,
              nlohmann::json descriptor,
              std::optional<ParamVector> anchor = std::nullopt);

  ParamVector eval(const ParamVector& params) const;
  FieldParts eval_parts(const ParamVector& params) const;

  FlowKind kind() const { return kind_; }
  double h() const { return h_; }
  std::size_t dim() const { return dim_; }
  const std::optional<ParamVector>& anchor() const { return anchor_; }
  const nlohmann::json& descriptor() const { return descriptor_; }

  static VectorField from_function(
      std::size_t dim, std::function<ParamVector(const ParamVector&)> fn,
      double h = 0.0);

 private:
  FlowKind kind_;
  double h_;
  std::size_t dim_;
  PartsFn parts_;
  nlohmann::json descriptor_;
  std::optional<ParamVector> anchor_;
};

// θ̇ = −∇E(θ; schedule pooled by mean of batch losses)
VectorField gradient_flow(const Problem& problem, const BatchSchedule& schedule,
                          const DerivativeConfig& cfg = {});

// θ̇ = −∇E − (h/2)·H∇E on the pooled schedule
VectorField igr_flow(const Problem& problem, const BatchSchedule& schedule,
                     double h, const DerivativeConfig& cfg = {});

// Anchored n-step field above. With content-identical batches the anchored
// and unanchored correction choices coincide at the anchor and only the
// unanchored one is iteration-independent; the constructor then emits the
// plain norm-corrected flow (kind multi_step_fullbatch), which n full-batch
// steps follow to the same order regardless of n.
VectorField multi_step_sgd_flow(const Problem& problem,
                                const BatchSchedule& schedule, double h,
                                const ParamVector& anchor,
                                const DerivativeConfig& cfg = {});

struct GameFieldParts {
  FieldParts phi;
  FieldParts theta;
};

class GameFieldPair {
 public:
  using PartsFn =
      std::function<GameFieldParts(const ParamVector&, const ParamVector&)>;

  GameFieldPair(FlowKind kind, double h, std::size_t dim_phi,
                std::size_t dim_theta, PartsFn parts, nlohmann::json descriptor,
                std::optional<GamePoint> anchor = std::nullopt);

  GamePoint eval(const ParamVector& phi, const ParamVector& theta) const;
  GameFieldParts eval_parts(const ParamVector& phi,
                            const ParamVector& theta) const;

  FlowKind kind() const { return kind_; }
  double h() const { return h_; }
  std::size_t dim_phi() const { return dim_phi_; }
  std::size_t dim_theta() const { return dim_theta_; }
  const std::optional<GamePoint>& anchor() const { return anchor_; }
  const nlohmann::json& descriptor() const { return descriptor_; }

 private:
  FlowKind kind_;
  double h_;
  std::size_t dim_phi_, dim_theta_;
  PartsFn parts_;
  nlohmann::json descriptor_;
  std::optional<GamePoint> anchor_;
};

// Simultaneous-update corrected flow:
//   φ̇ = −∇_φE_φ − h[ ½·J_φ(∇_φE_φ)∇_φE_φ + ½·J_θ(∇_φE_φ)∇_θE_θ(φ,θ) ]
// and symmetrically for θ. h = 0 gives the plain simultaneous gradient field.
GameFieldPair game_bea_flow(const Game& game, double h,
                            const DerivativeConfig& cfg = {});

// Same correction with the interaction direction frozen at the anchor:
//   φ̇ = −∇_φ[ E_φ + h(¼‖∇_φE_φ‖² + ½·∇_θE_φᵀ∇_θE_θ(anchor)) ],
// the anchor gradients being construction-time constants.
GameFieldPair game_anchored_flow(const Game& game, double h,
                                 const GamePoint& anchor,
                                 const DerivativeConfig& cfg = {});

}  // namespace bealab
