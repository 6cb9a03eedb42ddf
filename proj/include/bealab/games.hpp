// Two-player differentiable games: losses E_phi(phi, theta) and
// E_theta(phi, theta), each with analytic block gradients and, where cheap,
// analytic directional second derivatives. Immutable after construction.
#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include <json.hpp>

#include "bealab/linalg.hpp"

namespace bealab {

struct GameDescriptor {
  std::string name;
  int dim_phi = 0;
  int dim_theta = 0;
  std::uint64_t seed = 0;
  bool zero_sum = false;
  std::string variant;

  nlohmann::json to_json() const;
};

// Which gradient field is differentiated and along which block the direction
// lives. grad_phi_E_phi_along_theta(v) = J_theta(grad_phi E_phi) · v, etc.
enum class GameSecond {
  grad_phi_E_phi_along_phi,
  grad_phi_E_phi_along_theta,
  grad_theta_E_theta_along_phi,
  grad_theta_E_theta_along_theta,
};

class Game {
 public:
  using ScalarFn = std::function<double(const ParamVector&, const ParamVector&)>;
  using GradFn =
      std::function<ParamVector(const ParamVector&, const ParamVector&)>;
  using SecondFn = std::function<ParamVector(
      const ParamVector&, const ParamVector&, GameSecond, const ParamVector&)>;

  Game(GameDescriptor descriptor, ScalarFn loss_phi, ScalarFn loss_theta,
       GradFn grad_phi_E_phi, GradFn grad_theta_E_phi, GradFn grad_phi_E_theta,
       GradFn grad_theta_E_theta, SecondFn second = nullptr);

  int dim_phi() const { return descriptor_.dim_phi; }
  int dim_theta() const { return descriptor_.dim_theta; }
  const GameDescriptor& descriptor() const { return descriptor_; }

  double loss_phi(const ParamVector& phi, const ParamVector& theta) const;
  double loss_theta(const ParamVector& phi, const ParamVector& theta) const;

  ParamVector grad_phi_E_phi(const ParamVector&, const ParamVector&) const;
  ParamVector grad_theta_E_phi(const ParamVector&, const ParamVector&) const;
  ParamVector grad_phi_E_theta(const ParamVector&, const ParamVector&) const;
  ParamVector grad_theta_E_theta(const ParamVector&, const ParamVector&) const;

  bool has_analytic_second() const { return static_cast<bool>(second_); }
  ParamVector second(const ParamVector& phi, const ParamVector& theta,
                     GameSecond which, const ParamVector& v) const;

 private:
  void check_dims(const ParamVector& phi, const ParamVector& theta) const;

  GameDescriptor descriptor_;
  ScalarFn loss_phi_, loss_theta_;
  GradFn g_pp_, g_tp_, g_pt_, g_tt_;
  SecondFn second_;
};

// E_phi = ½φᵀAφ + φᵀBθ + aᵀφ,  E_theta = ½θᵀCθ + s·θᵀBᵀφ + bᵀθ, with seeded
// SPD A, C and seeded B, a, b, s; zero_sum replaces E_theta by −E_phi exactly.
// All gradients and directional second derivatives analytic.
Game make_quadratic_game(int dim_phi, int dim_theta, std::uint64_t seed,
                         bool zero_sum);

// Explicit-coefficient variant of the above (s ignored when zero_sum).
Game make_quadratic_game_explicit(Matrix A, Matrix B, Matrix C, ParamVector a,
                                  ParamVector b, double s, bool zero_sum,
                                  GameDescriptor descriptor);

// The classic 1-D bilinear zero-sum game E_phi = φθ, E_theta = −φθ.
Game make_bilinear_zero_sum();

// Coefficients of the seeded joint quadratic ½(u−c)ᵀQ(u−c) over stacked
// u = [φ; θ]; shared by make_common_payoff_quadratic and its tests.
struct JointQuadraticCoeffs {
  Matrix q;
  ParamVector center;
};
JointQuadraticCoeffs joint_quadratic_coeffs(int dim_phi, int dim_theta,
                                            std::uint64_t seed);

// Common-payoff game: both players minimize the same joint quadratic
// ½(u−c)ᵀQ(u−c) over stacked u = [φ; θ], Q seeded SPD.
Game make_common_payoff_quadratic(int dim_phi, int dim_theta,
                                  std::uint64_t seed);

// Zero-sum partner of make_common_payoff_quadratic: E_phi the same joint
// quadratic, E_theta its exact negation. Used to contrast interaction signs.
Game make_zero_sum_quadratic_pair(int dim_phi, int dim_theta,
                                  std::uint64_t seed);

enum class GanVariant { non_saturating, saturating };

// One-parameter discriminator D(x;φ)=σ(φx) against a one-parameter generator
// emitting θ, true data pinned at 0:
//   E_phi   = −[log D(0;φ) + log(1−D(θ;φ))] = log 2 + softplus(φθ)
//   E_theta = −log D(θ;φ)    = softplus(−φθ)   (non-saturating)
//   E_theta = +log(1−D(θ;φ)) = −softplus(φθ)   (saturating)
// Both players are minimizers. Analytic gradients; second derivatives are
// left to the finite-difference oracle.
Game make_dirac_gan(GanVariant variant);

double gan_discriminator_prob(const ParamVector& phi, const ParamVector& theta);

}  // namespace bealab
