// The modified losses whose negative gradients are the flows module's fields,
// the expectation of the n-step loss over batch shufflings (closed form plus
// a brute-force n! oracle), and the GAN interaction-coefficient matrices.
// Anchors are always explicit arguments and are frozen under differentiation.
#pragma once

#include <vector>

#include <json.hpp>

#include "bealab/calculus.hpp"
#include "bealab/games.hpp"
#include "bealab/problems.hpp"

namespace bealab {

struct RegularizerBreakdown {
  double base_loss = 0.0;
  double norm_term = 0.0;       // coefficient applied
  double alignment_term = 0.0;  // coefficient applied
  double total = 0.0;

  nlohmann::json to_json() const;
};

// Ẽ(θ) = E(θ;pooled) + (nh/4)·‖∇E(θ;pooled)‖²
//        − (h/n)·Σ_{μ=1..n−1} ∇E(θ;X^μ)ᵀ · Σ_{τ<μ} ∇E(anchor;X^τ)
RegularizerBreakdown modified_loss_sgd(const Problem& problem,
                                       const ParamVector& theta,
                                       const BatchSchedule& schedule, double h,
                                       const ParamVector& anchor,
                                       const DerivativeConfig& cfg = {});

// Ẽ(θ) = E(θ;pooled) + (h/4)·‖∇E(θ;pooled)‖², no alignment term.
RegularizerBreakdown modified_loss_igr(const Problem& problem,
                                       const ParamVector& theta,
                                       const BatchSchedule& schedule, double h,
                                       const DerivativeConfig& cfg = {});

enum class ExpectationMethod { closed_form, brute_force };

// Expectation of modified_loss_sgd over all n! batch orders. closed_form:
//   E_pooled + (nh/4)‖∇E_pooled(θ)‖² − (h/2n)·S(θ)ᵀS(anchor)
//            + (h/2n)·Σ_k ∇E(θ;X^k)ᵀ∇E(anchor;X^k),
// with S(·) = Σ_k ∇E(·;X^k) the batch-gradient sum (n × the pooled mean).
// brute_force enumerates permutations and requires n <= 6.
RegularizerBreakdown expected_shuffled_loss(const Problem& problem,
                                            const ParamVector& theta,
                                            const BatchSchedule& schedule,
                                            double h, const ParamVector& anchor,
                                            ExpectationMethod method,
                                            const DerivativeConfig& cfg = {});

struct GameLossPair {
  RegularizerBreakdown phi;    // norm_term = self, alignment_term = interaction
  RegularizerBreakdown theta;
};

// Ẽ_φ = E_φ + h(¼‖∇_φE_φ‖² + ½·∇_θE_φᵀ∇_θE_θ(anchor)), symmetrically for θ.
GameLossPair game_modified_losses(const Game& game, const ParamVector& phi,
                                  const ParamVector& theta, double h,
                                  const GamePoint& anchor,
                                  const DerivativeConfig& cfg = {});

enum class CoeffMode { non_saturating, saturating };

struct CoeffMatrix {
  std::size_t rows = 0, cols = 0;  // rows: current step, cols: previous step
  std::vector<double> entries;     // row-major
  CoeffMode mode = CoeffMode::non_saturating;

  double at(std::size_t i, std::size_t j) const { return entries[i * cols + j]; }
  nlohmann::json to_json() const;
};

// non_saturating: c_ij = 1 / [(1 − d_current_i) · d_prev_j]
// saturating:     c_ij = 1 / [(1 − d_current_i) · (1 − d_prev_j)]
// All probabilities must lie strictly inside (0, 1).
CoeffMatrix gan_interaction_coeffs(const std::vector<double>& d_current,
                                   const std::vector<double>& d_prev,
                                   CoeffMode mode);

}  // namespace bealab
