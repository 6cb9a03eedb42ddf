#include "bealab/regularizers.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace bealab {
namespace {

RegularizerBreakdown assemble(double base, double norm, double align) {
  return RegularizerBreakdown{base, norm, align, base + norm + align};
}

}  // namespace

nlohmann::json RegularizerBreakdown::to_json() const {
  return {{"base_loss", base_loss},
          {"norm_term", norm_term},
          {"alignment_term", alignment_term},
          {"total", total}};
}

RegularizerBreakdown modified_loss_sgd(const Problem& problem,
                                       const ParamVector& theta,
                                       const BatchSchedule& schedule, double h,
                                       const ParamVector& anchor,
                                       const DerivativeConfig& cfg) {
  if (schedule.batches.empty())
    throw std::invalid_argument("modified_loss_sgd: empty schedule");
  if (h < 0.0) throw std::invalid_argument("modified_loss_sgd: h must be >= 0");
  if (anchor.dim() != theta.dim())
    throw std::invalid_argument("modified_loss_sgd: anchor dim mismatch");
  const double n = static_cast<double>(schedule.size());

  const double base = problem.schedule_loss(theta, schedule);
  ParamVector g = schedule_grad(problem, theta, schedule, cfg);
  const double norm = n * h / 4.0 * g.dot(g);

  double align = 0.0;
  ParamVector anchor_prefix(theta.dim(), 0.0);  // Σ_{τ<μ} ∇E(anchor;X^τ)
  for (std::size_t mu = 1; mu < schedule.size(); ++mu) {
    anchor_prefix += grad(problem, anchor, schedule.batches[mu - 1], cfg);
    align -= h / n *
             grad(problem, theta, schedule.batches[mu], cfg).dot(anchor_prefix);
  }
  return assemble(base, norm, align);
}

RegularizerBreakdown modified_loss_igr(const Problem& problem,
                                       const ParamVector& theta,
                                       const BatchSchedule& schedule, double h,
                                       const DerivativeConfig& cfg) {
  if (schedule.batches.empty())
    throw std::invalid_argument("modified_loss_igr: empty schedule");
  if (h < 0.0) throw std::invalid_argument("modified_loss_igr: h must be >= 0");
  const double base = problem.schedule_loss(theta, schedule);
  ParamVector g = schedule_grad(problem, theta, schedule, cfg);
  return assemble(base, h / 4.0 * g.dot(g), 0.0);
}

RegularizerBreakdown expected_shuffled_loss(const Problem& problem,
                                            const ParamVector& theta,
                                            const BatchSchedule& schedule,
                                            double h, const ParamVector& anchor,
                                            ExpectationMethod method,
                                            const DerivativeConfig& cfg) {
  if (schedule.batches.empty())
    throw std::invalid_argument("expected_shuffled_loss: empty schedule");
  const std::size_t n = schedule.size();

  if (method == ExpectationMethod::brute_force) {
    if (n > 6)
      throw std::invalid_argument(
          "expected_shuffled_loss: brute_force limited to n <= 6");
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    RegularizerBreakdown acc;
    std::size_t count = 0;
    do {
      RegularizerBreakdown one =
          modified_loss_sgd(problem, theta, permuted(schedule, order), h,
                            anchor, cfg);
      acc.base_loss += one.base_loss;
      acc.norm_term += one.norm_term;
      acc.alignment_term += one.alignment_term;
      acc.total += one.total;
      ++count;
    } while (std::next_permutation(order.begin(), order.end()));
    const double inv = 1.0 / static_cast<double>(count);
    return RegularizerBreakdown{acc.base_loss * inv, acc.norm_term * inv,
                                acc.alignment_term * inv, acc.total * inv};
  }

  // Closed form. Each unordered pair (a,b), a≠b, appears after-before with
  // probability ½ under a uniform shuffle, so the expected alignment sum is
  // ½[S(θ)ᵀS(anchor) − Σ_k ∇E(θ;X^k)ᵀ∇E(anchor;X^k)], S the gradient sum.
  const double base = problem.schedule_loss(theta, schedule);
  ParamVector g = schedule_grad(problem, theta, schedule, cfg);
  const double norm = static_cast<double>(n) * h / 4.0 * g.dot(g);

  ParamVector sum_cur(theta.dim(), 0.0), sum_anchor(theta.dim(), 0.0);
  double diag = 0.0;
  for (const Batch& b : schedule.batches) {
    ParamVector gc = grad(problem, theta, b, cfg);
    ParamVector ga = grad(problem, anchor, b, cfg);
    diag += gc.dot(ga);
    sum_cur += gc;
    sum_anchor += ga;
  }
  const double align = -h / (2.0 * static_cast<double>(n)) *
                       (sum_cur.dot(sum_anchor) - diag);
  return assemble(base, norm, align);
}

GameLossPair game_modified_losses(const Game& game, const ParamVector& phi,
                                  const ParamVector& theta, double h,
                                  const GamePoint& anchor,
                                  const DerivativeConfig& cfg) {
  if (h < 0.0)
    throw std::invalid_argument("game_modified_losses: h must be >= 0");
  if (anchor.phi.dim() != phi.dim() || anchor.theta.dim() != theta.dim())
    throw std::invalid_argument("game_modified_losses: anchor dim mismatch");
  GameGrads g = game_grads(game, phi, theta, cfg);
  ParamVector prev_theta_update = game.grad_theta_E_theta(anchor.phi, anchor.theta);
  ParamVector prev_phi_update = game.grad_phi_E_phi(anchor.phi, anchor.theta);

  GameLossPair out;
  out.phi = assemble(game.loss_phi(phi, theta),
                     h / 4.0 * g.grad_phi_E_phi.dot(g.grad_phi_E_phi),
                     h / 2.0 * g.grad_theta_E_phi.dot(prev_theta_update));
  out.theta = assemble(game.loss_theta(phi, theta),
                       h / 4.0 * g.grad_theta_E_theta.dot(g.grad_theta_E_theta),
                       h / 2.0 * g.grad_phi_E_theta.dot(prev_phi_update));
  return out;
}

nlohmann::json CoeffMatrix::to_json() const {
  return {{"rows", rows},
          {"cols", cols},
          {"mode", mode == CoeffMode::non_saturating ? "non_saturating"
                                                     : "saturating"},
          {"entries", entries}};
}

CoeffMatrix gan_interaction_coeffs(const std::vector<double>& d_current,
                                   const std::vector<double>& d_prev,
                                   CoeffMode mode) {
  if (d_current.empty() || d_prev.empty())
    throw std::invalid_argument("gan_interaction_coeffs: empty probability grid");
  auto check = [](double p) {
    if (!(p > 0.0 && p < 1.0))
      throw std::domain_error(
          "gan_interaction_coeffs: probabilities must lie strictly in (0,1)");
  };
  for (double p : d_current) check(p);
  for (double p : d_prev) check(p);

  CoeffMatrix m;
  m.rows = d_current.size();
  m.cols = d_prev.size();
  m.mode = mode;
  m.entries.resize(m.rows * m.cols);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) {
      const double prev = mode == CoeffMode::non_saturating
                              ? d_prev[j]
                              : (1.0 - d_prev[j]);
      m.entries[i * m.cols + j] = 1.0 / ((1.0 - d_current[i]) * prev);
    }
  return m;
}

}  // namespace bealab
