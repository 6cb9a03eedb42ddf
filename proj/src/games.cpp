#include "bealab/games.hpp"

#include <cmath>
#include <stdexcept>

#include "bealab/rng.hpp"

namespace bealab {
namespace {

double softplus(double t) {
  if (t > 0) return t + std::log1p(std::exp(-t));
  return std::log1p(std::exp(t));
}

double sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

Matrix seeded_spd(std::size_t dim, Rng& rng) {
  Matrix m(dim, dim);
  for (double& x : m.a) x = rng.uniform(-1.0, 1.0);
  Matrix spd(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < dim; ++k) s += m.at(i, k) * m.at(j, k);
      spd.at(i, j) = s;
    }
  for (std::size_t i = 0; i < dim; ++i) spd.at(i, i) += 0.1;
  return spd;
}

}  // namespace

nlohmann::json GameDescriptor::to_json() const {
  return {{"name", name},       {"dim_phi", dim_phi}, {"dim_theta", dim_theta},
          {"seed", seed},       {"zero_sum", zero_sum},
          {"variant", variant}};
}

Game::Game(GameDescriptor descriptor, ScalarFn loss_phi, ScalarFn loss_theta,
           GradFn g_pp, GradFn g_tp, GradFn g_pt, GradFn g_tt, SecondFn second)
    : descriptor_(std::move(descriptor)),
      loss_phi_(std::move(loss_phi)),
      loss_theta_(std::move(loss_theta)),
      g_pp_(std::move(g_pp)),
      g_tp_(std::move(g_tp)),
      g_pt_(std::move(g_pt)),
      g_tt_(std::move(g_tt)),
      second_(std::move(second)) {
  if (descriptor_.dim_phi < 1 || descriptor_.dim_theta < 1)
    throw std::invalid_argument("Game: dims must be >= 1");
}

void Game::check_dims(const ParamVector& phi, const ParamVector& theta) const {
  if (static_cast<int>(phi.dim()) != dim_phi() ||
      static_cast<int>(theta.dim()) != dim_theta())
    throw std::invalid_argument("Game: point dim mismatch");
}

double Game::loss_phi(const ParamVector& phi, const ParamVector& theta) const {
  check_dims(phi, theta);
  return loss_phi_(phi, theta);
}
double Game::loss_theta(const ParamVector& phi, const ParamVector& theta) const {
  check_dims(phi, theta);
  return loss_theta_(phi, theta);
}
ParamVector Game::grad_phi_E_phi(const ParamVector& phi,
                                 const ParamVector& theta) const {
  check_dims(phi, theta);
  return g_pp_(phi, theta);
}
ParamVector Game::grad_theta_E_phi(const ParamVector& phi,
                                   const ParamVector& theta) const {
  check_dims(phi, theta);
  return g_tp_(phi, theta);
}
ParamVector Game::grad_phi_E_theta(const ParamVector& phi,
                                   const ParamVector& theta) const {
  check_dims(phi, theta);
  return g_pt_(phi, theta);
}
ParamVector Game::grad_theta_E_theta(const ParamVector& phi,
                                     const ParamVector& theta) const {
  check_dims(phi, theta);
  return g_tt_(phi, theta);
}

ParamVector Game::second(const ParamVector& phi, const ParamVector& theta,
                         GameSecond which, const ParamVector& v) const {
  if (!second_) throw std::logic_error("Game: no analytic second derivatives");
  check_dims(phi, theta);
  return second_(phi, theta, which, v);
}

Game make_quadratic_game_explicit(Matrix A, Matrix B, Matrix C, ParamVector a,
                                  ParamVector b, double s, bool zero_sum,
                                  GameDescriptor descriptor) {
  const std::size_t dp = a.dim(), dt = b.dim();
  if (A.rows != dp || A.cols != dp || B.rows != dp || B.cols != dt ||
      C.rows != dt || C.cols != dt)
    throw std::invalid_argument("make_quadratic_game_explicit: shape mismatch");

  auto e_phi = [A, B, a](const ParamVector& phi, const ParamVector& theta) {
    return 0.5 * phi.dot(A.mul(phi)) + phi.dot(B.mul(theta)) + a.dot(phi);
  };
  auto gp_of_phi = [A, B, a](const ParamVector& phi, const ParamVector& theta) {
    return A.mul(phi) + B.mul(theta) + a;
  };
  auto gt_of_phi = [B](const ParamVector& phi, const ParamVector&) {
    return B.tmul(phi);
  };

  Game::ScalarFn e_theta;
  Game::GradFn gp_of_theta, gt_of_theta;
  if (zero_sum) {
    e_theta = [e_phi](const ParamVector& phi, const ParamVector& theta) {
      return -e_phi(phi, theta);
    };
    gp_of_theta = [gp_of_phi](const ParamVector& phi, const ParamVector& theta) {
      return -gp_of_phi(phi, theta);
    };
    gt_of_theta = [gt_of_phi](const ParamVector& phi, const ParamVector& theta) {
      return -gt_of_phi(phi, theta);
    };
  } else {
    e_theta = [B, C, b, s](const ParamVector& phi, const ParamVector& theta) {
      return 0.5 * theta.dot(C.mul(theta)) + s * theta.dot(B.tmul(phi)) +
             b.dot(theta);
    };
    gp_of_theta = [B, s](const ParamVector&, const ParamVector& theta) {
      return s * B.mul(theta);
    };
    gt_of_theta = [B, C, b, s](const ParamVector& phi, const ParamVector& theta) {
      return C.mul(theta) + s * B.tmul(phi) + b;
    };
  }

  // Constant Hessian blocks: J_phi(grad_phi E_phi) = A, J_theta(...) = B,
  // J_theta(grad_theta E_theta) = C (or 0 zero-sum), J_phi(...) = s Bᵀ (or −Bᵀ).
  auto second = [A, B, C, s, zero_sum](const ParamVector&, const ParamVector&,
                                       GameSecond which, const ParamVector& v) {
    switch (which) {
      case GameSecond::grad_phi_E_phi_along_phi:
        return A.mul(v);
      case GameSecond::grad_phi_E_phi_along_theta:
        return B.mul(v);
      case GameSecond::grad_theta_E_theta_along_theta:
        return zero_sum ? ParamVector(v.dim(), 0.0) : C.mul(v);
      case GameSecond::grad_theta_E_theta_along_phi:
        return zero_sum ? -B.tmul(v) : s * B.tmul(v);
    }
    throw std::logic_error("unreachable");
  };

  return Game(std::move(descriptor), e_phi, e_theta, gp_of_phi, gt_of_phi,
              gp_of_theta, gt_of_theta, second);
}

Game make_quadratic_game(int dim_phi, int dim_theta, std::uint64_t seed,
                         bool zero_sum) {
  if (dim_phi < 1 || dim_theta < 1)
    throw std::invalid_argument("make_quadratic_game: dims must be >= 1");
  Rng rng(seed);
  Matrix A = seeded_spd(dim_phi, rng);
  Matrix C = seeded_spd(dim_theta, rng);
  Matrix B(dim_phi, dim_theta);
  for (double& x : B.a) x = rng.uniform(-1.0, 1.0);
  ParamVector a = rng.uniform_vec(dim_phi, -1.0, 1.0);
  ParamVector b = rng.uniform_vec(dim_theta, -1.0, 1.0);
  const double s = rng.uniform(-1.0, 1.0);
  GameDescriptor desc{"quadratic_game", dim_phi, dim_theta, seed, zero_sum, ""};
  return make_quadratic_game_explicit(std::move(A), std::move(B), std::move(C),
                                      std::move(a), std::move(b), s, zero_sum,
                                      std::move(desc));
}

Game make_bilinear_zero_sum() {
  Matrix A(1, 1), C(1, 1), B(1, 1);
  B.at(0, 0) = 1.0;
  GameDescriptor desc{"bilinear", 1, 1, 0, true, ""};
  return make_quadratic_game_explicit(A, B, C, ParamVector{0.0},
                                      ParamVector{0.0}, 0.0, true, desc);
}

namespace {

// Shared joint quadratic ½(u−c)ᵀQ(u−c) over u = [φ;θ].
struct JointQuadratic {
  Matrix Q;
  ParamVector c;
  std::size_t dp, dt;

  double value(const ParamVector& phi, const ParamVector& theta) const {
    ParamVector r = stacked(phi, theta) - c;
    return 0.5 * r.dot(Q.mul(r));
  }
  ParamVector grad_block(const ParamVector& phi, const ParamVector& theta,
                         bool phi_block) const {
    ParamVector g = Q.mul(stacked(phi, theta) - c);
    ParamVector out(phi_block ? dp : dt);
    const std::size_t off = phi_block ? 0 : dp;
    for (std::size_t i = 0; i < out.dim(); ++i) out[i] = g[off + i];
    return out;
  }
  // Row block of Q applied to a direction embedded in the named column block.
  ParamVector second_block(bool out_phi, bool along_phi,
                           const ParamVector& v) const {
    ParamVector u(dp + dt, 0.0);
    const std::size_t in_off = along_phi ? 0 : dp;
    for (std::size_t i = 0; i < v.dim(); ++i) u[in_off + i] = v[i];
    ParamVector w = Q.mul(u);
    ParamVector out(out_phi ? dp : dt);
    const std::size_t out_off = out_phi ? 0 : dp;
    for (std::size_t i = 0; i < out.dim(); ++i) out[i] = w[out_off + i];
    return out;
  }
};

JointQuadratic make_joint_quadratic(int dim_phi, int dim_theta,
                                    std::uint64_t seed) {
  JointQuadraticCoeffs coeffs = joint_quadratic_coeffs(dim_phi, dim_theta, seed);
  JointQuadratic jq;
  jq.Q = std::move(coeffs.q);
  jq.c = std::move(coeffs.center);
  jq.dp = static_cast<std::size_t>(dim_phi);
  jq.dt = static_cast<std::size_t>(dim_theta);
  return jq;
}

Game make_joint_quadratic_game(int dim_phi, int dim_theta, std::uint64_t seed,
                               bool negate_theta, GameDescriptor desc) {
  JointQuadratic jq = make_joint_quadratic(dim_phi, dim_theta, seed);
  const double sgn = negate_theta ? -1.0 : 1.0;
  auto e_phi = [jq](const ParamVector& p, const ParamVector& t) {
    return jq.value(p, t);
  };
  auto e_theta = [jq, sgn](const ParamVector& p, const ParamVector& t) {
    return sgn * jq.value(p, t);
  };
  auto g_pp = [jq](const ParamVector& p, const ParamVector& t) {
    return jq.grad_block(p, t, true);
  };
  auto g_tp = [jq](const ParamVector& p, const ParamVector& t) {
    return jq.grad_block(p, t, false);
  };
  auto g_pt = [jq, sgn](const ParamVector& p, const ParamVector& t) {
    return sgn * jq.grad_block(p, t, true);
  };
  auto g_tt = [jq, sgn](const ParamVector& p, const ParamVector& t) {
    return sgn * jq.grad_block(p, t, false);
  };
  auto second = [jq, sgn](const ParamVector&, const ParamVector&,
                          GameSecond which, const ParamVector& v) {
    switch (which) {
      case GameSecond::grad_phi_E_phi_along_phi:
        return jq.second_block(true, true, v);
      case GameSecond::grad_phi_E_phi_along_theta:
        return jq.second_block(true, false, v);
      case GameSecond::grad_theta_E_theta_along_theta:
        return sgn * jq.second_block(false, false, v);
      case GameSecond::grad_theta_E_theta_along_phi:
        return sgn * jq.second_block(false, true, v);
    }
    throw std::logic_error("unreachable");
  };
  return Game(std::move(desc), e_phi, e_theta, g_pp, g_tp, g_pt, g_tt, second);
}

}  // namespace

JointQuadraticCoeffs joint_quadratic_coeffs(int dim_phi, int dim_theta,
                                            std::uint64_t seed) {
  if (dim_phi < 1 || dim_theta < 1)
    throw std::invalid_argument("joint_quadratic_coeffs: dims must be >= 1");
  Rng rng(seed);
  const std::size_t d = static_cast<std::size_t>(dim_phi + dim_theta);
  JointQuadraticCoeffs coeffs;
  coeffs.q = seeded_spd(d, rng);
  coeffs.center = rng.uniform_vec(d, -1.0, 1.0);
  return coeffs;
}

Game make_common_payoff_quadratic(int dim_phi, int dim_theta,
                                  std::uint64_t seed) {
  GameDescriptor desc{"common_payoff_quadratic", dim_phi, dim_theta, seed,
                      false, ""};
  return make_joint_quadratic_game(dim_phi, dim_theta, seed, false, desc);
}

Game make_zero_sum_quadratic_pair(int dim_phi, int dim_theta,
                                  std::uint64_t seed) {
  GameDescriptor desc{"zero_sum_quadratic_pair", dim_phi, dim_theta, seed, true,
                      ""};
  return make_joint_quadratic_game(dim_phi, dim_theta, seed, true, desc);
}

double gan_discriminator_prob(const ParamVector& phi, const ParamVector& theta) {
  return sigmoid(phi[0] * theta[0]);
}

Game make_dirac_gan(GanVariant variant) {
  const bool sat = (variant == GanVariant::saturating);
  auto u = [](const ParamVector& phi, const ParamVector& theta) {
    return phi[0] * theta[0];
  };
  auto e_phi = [u](const ParamVector& p, const ParamVector& t) {
    return std::log(2.0) + softplus(u(p, t));
  };
  // d softplus(u)/du = σ(u); d softplus(−u)/du = −σ(−u) = −(1−σ(u))
  auto g_pp = [u](const ParamVector& p, const ParamVector& t) {
    return ParamVector{sigmoid(u(p, t)) * t[0]};
  };
  auto g_tp = [u](const ParamVector& p, const ParamVector& t) {
    return ParamVector{sigmoid(u(p, t)) * p[0]};
  };
  Game::ScalarFn e_theta;
  Game::GradFn g_pt, g_tt;
  if (sat) {
    e_theta = [u](const ParamVector& p, const ParamVector& t) {
      return -softplus(u(p, t));
    };
    g_pt = [u](const ParamVector& p, const ParamVector& t) {
      return ParamVector{-sigmoid(u(p, t)) * t[0]};
    };
    g_tt = [u](const ParamVector& p, const ParamVector& t) {
      return ParamVector{-sigmoid(u(p, t)) * p[0]};
    };
  } else {
    e_theta = [u](const ParamVector& p, const ParamVector& t) {
      return softplus(-u(p, t));
    };
    g_pt = [u](const ParamVector& p, const ParamVector& t) {
      return ParamVector{-(1.0 - sigmoid(u(p, t))) * t[0]};
    };
    g_tt = [u](const ParamVector& p, const ParamVector& t) {
      return ParamVector{-(1.0 - sigmoid(u(p, t))) * p[0]};
    };
  }
  GameDescriptor desc{"dirac_gan", 1, 1, 0, false,
                      sat ? "saturating" : "non_saturating"};
  return Game(std::move(desc), e_phi, std::move(e_theta), g_pp, g_tp,
              std::move(g_pt), std::move(g_tt));
}

}  // namespace bealab
