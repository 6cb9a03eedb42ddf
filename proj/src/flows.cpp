#include "bealab/flows.hpp"

#include <cstdio>
#include <iostream>
#include <stdexcept>
#include <vector>

namespace bealab {
namespace {

std::string digest_values(const ParamVector& v) {
  std::uint64_t h = 1469598103934665603ull;
  for (double x : v) {
    const unsigned char* p = reinterpret_cast<const unsigned char*>(&x);
    for (std::size_t i = 0; i < sizeof(double); ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

nlohmann::json field_descriptor(FlowKind kind, double h, std::size_t n,
                                const std::string& anchor_digest,
                                const nlohmann::json& problem_descriptor) {
  return {{"kind", flow_kind_name(kind)},
          {"h", h},
          {"n", n},
          {"anchor_digest", anchor_digest},
          {"problem_descriptor", problem_descriptor}};
}

void warn_on_uneven_batches(const BatchSchedule& schedule, const char* where) {
  for (std::size_t i = 1; i < schedule.batches.size(); ++i)
    if (schedule.batches[i].examples.size() !=
        schedule.batches[0].examples.size()) {
      std::cerr << where
                << ": batch sizes differ; pooling uses the mean of batch "
                   "losses\n";
      return;
    }
}

void require_nonempty(const BatchSchedule& schedule, const char* where) {
  if (schedule.batches.empty())
    throw std::invalid_argument(std::string(where) + ": empty schedule");
}

}  // namespace

const char* flow_kind_name(FlowKind kind) {
  switch (kind) {
    case FlowKind::gradient_flow: return "gradient_flow";
    case FlowKind::igr: return "igr";
    case FlowKind::multi_step_sgd: return "multi_step_sgd";
    case FlowKind::multi_step_fullbatch: return "multi_step_fullbatch";
    case FlowKind::game_bea: return "game_bea";
    case FlowKind::game_anchored: return "game_anchored";
    case FlowKind::custom: return "custom";
  }
  return "unknown";
}

VectorField::VectorField(FlowKind kind, double h, std::size_t dim,
                         PartsFn parts, nlohmann::json descriptor,
                         std::optional<ParamVector> anchor)
    : kind_(kind),
      h_(h),
      dim_(dim),
      parts_(std::move(parts)),
      descriptor_(std::move(descriptor)),
      anchor_(std::move(anchor)) {
  if (h_ < 0.0) throw std::invalid_argument("VectorField: h must be >= 0");
}

FieldParts VectorField::eval_parts(const ParamVector& params) const {
  if (params.dim() != dim_)
    throw std::invalid_argument("VectorField: input dim mismatch");
  return parts_(params);
}

ParamVector VectorField::eval(const ParamVector& params) const {
  return eval_parts(params).total();
}

VectorField VectorField::from_function(
    std::size_t dim, std::function<ParamVector(const ParamVector&)> fn,
    double h) {
  auto parts = [dim, fn = std::move(fn)](const ParamVector& p) {
    return FieldParts{fn(p), ParamVector(dim, 0.0), ParamVector(dim, 0.0)};
  };
  return VectorField(FlowKind::custom, h, dim, parts,
                     field_descriptor(FlowKind::custom, h, 0, "", nullptr));
}

VectorField gradient_flow(const Problem& problem, const BatchSchedule& schedule,
                          const DerivativeConfig& cfg) {
  require_nonempty(schedule, "gradient_flow");
  warn_on_uneven_batches(schedule, "gradient_flow");
  const std::size_t dim = static_cast<std::size_t>(problem.dim());
  auto prob = std::make_shared<const Problem>(problem);
  auto parts = [prob, schedule, cfg, dim](const ParamVector& theta) {
    return FieldParts{-schedule_grad(*prob, theta, schedule, cfg),
                      ParamVector(dim, 0.0), ParamVector(dim, 0.0)};
  };
  return VectorField(FlowKind::gradient_flow, 0.0, dim, parts,
                     field_descriptor(FlowKind::gradient_flow, 0.0,
                                      schedule.size(), "",
                                      problem.descriptor().to_json()));
}

namespace {

// base −g and drift −(coeff·h/2)·H·g on the pooled schedule
FieldParts norm_corrected_parts(const Problem& problem,
                                const BatchSchedule& schedule, double h,
                                double coeff, const ParamVector& theta,
                                const DerivativeConfig& cfg) {
  const std::size_t dim = theta.dim();
  ParamVector g = schedule_grad(problem, theta, schedule, cfg);
  FieldParts parts{-g, ParamVector(dim, 0.0), ParamVector(dim, 0.0)};
  if (h > 0.0) {
    ParamVector hg = schedule_directional_jacobian(problem, theta, schedule, g, cfg);
    parts.drift.axpy(-coeff * h / 2.0, hg);
  }
  return parts;
}

}  // namespace

VectorField igr_flow(const Problem& problem, const BatchSchedule& schedule,
                     double h, const DerivativeConfig& cfg) {
  require_nonempty(schedule, "igr_flow");
  warn_on_uneven_batches(schedule, "igr_flow");
  if (h < 0.0) throw std::invalid_argument("igr_flow: h must be >= 0");
  const std::size_t dim = static_cast<std::size_t>(problem.dim());
  auto prob = std::make_shared<const Problem>(problem);
  auto parts = [prob, schedule, h, cfg](const ParamVector& theta) {
    return norm_corrected_parts(*prob, schedule, h, 1.0, theta, cfg);
  };
  return VectorField(FlowKind::igr, h, dim, parts,
                     field_descriptor(FlowKind::igr, h, schedule.size(), "",
                                      problem.descriptor().to_json()));
}

VectorField multi_step_sgd_flow(const Problem& problem,
                                const BatchSchedule& schedule, double h,
                                const ParamVector& anchor,
                                const DerivativeConfig& cfg) {
  require_nonempty(schedule, "multi_step_sgd_flow");
  warn_on_uneven_batches(schedule, "multi_step_sgd_flow");
  if (h < 0.0) throw std::invalid_argument("multi_step_sgd_flow: h must be >= 0");
  if (static_cast<int>(anchor.dim()) != problem.dim())
    throw std::invalid_argument("multi_step_sgd_flow: anchor dim mismatch");
  const std::size_t dim = static_cast<std::size_t>(problem.dim());
  const std::size_t n = schedule.size();

  if (n == 1 || batches_identical(schedule)) {
    // Full-batch reduction: the iteration-independent choice collapses the
    // correction to the plain (h/2)·H∇E drift, independent of n.
    const FlowKind kind =
        n == 1 ? FlowKind::multi_step_sgd : FlowKind::multi_step_fullbatch;
    auto prob = std::make_shared<const Problem>(problem);
    auto parts = [prob, schedule, h, cfg](const ParamVector& theta) {
      return norm_corrected_parts(*prob, schedule, h, 1.0, theta, cfg);
    };
    return VectorField(kind, h, dim, parts,
                       field_descriptor(kind, h, n, digest_values(anchor),
                                        problem.descriptor().to_json()),
                       anchor);
  }

  // Anchor gradients become construction-time constants: prefix[μ] holds
  // Σ_{τ<μ} ∇E(anchor; X^τ) for μ = 1..n−1.
  std::vector<ParamVector> prefix;
  prefix.reserve(n - 1);
  ParamVector running(dim, 0.0);
  for (std::size_t tau = 0; tau + 1 < n; ++tau) {
    running += grad(problem, anchor, schedule.batches[tau], cfg);
    prefix.push_back(running);
  }

  auto prob = std::make_shared<const Problem>(problem);
  auto parts = [prob, schedule, h, cfg, prefix, n,
                dim](const ParamVector& theta) {
    ParamVector g = schedule_grad(*prob, theta, schedule, cfg);
    FieldParts out{-g, ParamVector(dim, 0.0), ParamVector(dim, 0.0)};
    if (h > 0.0) {
      ParamVector hg =
          schedule_directional_jacobian(*prob, theta, schedule, g, cfg);
      out.drift.axpy(-static_cast<double>(n) * h / 2.0, hg);
      for (std::size_t mu = 1; mu < n; ++mu) {
        ParamVector hv = grad_directional_jacobian(
            *prob, theta, schedule.batches[mu], prefix[mu - 1], cfg);
        out.alignment.axpy(h / static_cast<double>(n), hv);
      }
    }
    return out;
  };
  return VectorField(FlowKind::multi_step_sgd, h, dim, parts,
                     field_descriptor(FlowKind::multi_step_sgd, h, n,
                                      digest_values(anchor),
                                      problem.descriptor().to_json()),
                     anchor);
}

GameFieldPair::GameFieldPair(FlowKind kind, double h, std::size_t dim_phi,
                             std::size_t dim_theta, PartsFn parts,
                             nlohmann::json descriptor,
                             std::optional<GamePoint> anchor)
    : kind_(kind),
      h_(h),
      dim_phi_(dim_phi),
      dim_theta_(dim_theta),
      parts_(std::move(parts)),
      descriptor_(std::move(descriptor)),
      anchor_(std::move(anchor)) {
  if (h_ < 0.0) throw std::invalid_argument("GameFieldPair: h must be >= 0");
}

GameFieldParts GameFieldPair::eval_parts(const ParamVector& phi,
                                         const ParamVector& theta) const {
  if (phi.dim() != dim_phi_ || theta.dim() != dim_theta_)
    throw std::invalid_argument("GameFieldPair: input dim mismatch");
  return parts_(phi, theta);
}

GamePoint GameFieldPair::eval(const ParamVector& phi,
                              const ParamVector& theta) const {
  GameFieldParts p = eval_parts(phi, theta);
  return GamePoint{p.phi.total(), p.theta.total()};
}

namespace {

// Shared assembly for the corrected game fields; the anchored variant swaps
// the interaction directions for frozen anchor gradients.
GameFieldParts game_corrected_parts(const Game& game, double h,
                                    const ParamVector& phi,
                                    const ParamVector& theta,
                                    const ParamVector* inter_dir_phi,
                                    const ParamVector* inter_dir_theta,
                                    const DerivativeConfig& cfg) {
  const std::size_t dp = phi.dim(), dt = theta.dim();
  GameGrads g = game_grads(game, phi, theta, cfg);
  GameFieldParts out{
      {-g.grad_phi_E_phi, ParamVector(dp, 0.0), ParamVector(dp, 0.0)},
      {-g.grad_theta_E_theta, ParamVector(dt, 0.0), ParamVector(dt, 0.0)}};
  if (h > 0.0) {
    ParamVector self_phi = game_mixed_directional(
        game, phi, theta, GameSecond::grad_phi_E_phi_along_phi,
        g.grad_phi_E_phi, cfg);
    ParamVector self_theta = game_mixed_directional(
        game, phi, theta, GameSecond::grad_theta_E_theta_along_theta,
        g.grad_theta_E_theta, cfg);
    out.phi.drift.axpy(-h / 2.0, self_phi);
    out.theta.drift.axpy(-h / 2.0, self_theta);

    const ParamVector& wphi = inter_dir_phi ? *inter_dir_phi : g.grad_theta_E_theta;
    const ParamVector& wtheta = inter_dir_theta ? *inter_dir_theta : g.grad_phi_E_phi;
    ParamVector inter_phi = game_mixed_directional(
        game, phi, theta, GameSecond::grad_phi_E_phi_along_theta, wphi, cfg);
    ParamVector inter_theta = game_mixed_directional(
        game, phi, theta, GameSecond::grad_theta_E_theta_along_phi, wtheta, cfg);
    out.phi.alignment.axpy(-h / 2.0, inter_phi);
    out.theta.alignment.axpy(-h / 2.0, inter_theta);
  }
  return out;
}

}  // namespace

GameFieldPair game_bea_flow(const Game& game, double h,
                            const DerivativeConfig& cfg) {
  if (h < 0.0) throw std::invalid_argument("game_bea_flow: h must be >= 0");
  auto gm = std::make_shared<const Game>(game);
  auto parts = [gm, h, cfg](const ParamVector& phi, const ParamVector& theta) {
    return game_corrected_parts(*gm, h, phi, theta, nullptr, nullptr, cfg);
  };
  return GameFieldPair(FlowKind::game_bea, h,
                       static_cast<std::size_t>(game.dim_phi()),
                       static_cast<std::size_t>(game.dim_theta()), parts,
                       field_descriptor(FlowKind::game_bea, h, 1, "",
                                        game.descriptor().to_json()));
}

GameFieldPair game_anchored_flow(const Game& game, double h,
                                 const GamePoint& anchor,
                                 const DerivativeConfig& cfg) {
  if (h < 0.0) throw std::invalid_argument("game_anchored_flow: h must be >= 0");
  if (static_cast<int>(anchor.phi.dim()) != game.dim_phi() ||
      static_cast<int>(anchor.theta.dim()) != game.dim_theta())
    throw std::invalid_argument("game_anchored_flow: anchor dim mismatch");
  // frozen previous update directions
  ParamVector w_phi = game.grad_theta_E_theta(anchor.phi, anchor.theta);
  ParamVector w_theta = game.grad_phi_E_phi(anchor.phi, anchor.theta);
  auto gm = std::make_shared<const Game>(game);
  auto parts = [gm, h, cfg, w_phi, w_theta](const ParamVector& phi,
                                            const ParamVector& theta) {
    return game_corrected_parts(*gm, h, phi, theta, &w_phi, &w_theta, cfg);
  };
  const std::string digest =
      digest_values(stacked(anchor.phi, anchor.theta));
  return GameFieldPair(FlowKind::game_anchored, h,
                       static_cast<std::size_t>(game.dim_phi()),
                       static_cast<std::size_t>(game.dim_theta()), parts,
                       field_descriptor(FlowKind::game_anchored, h, 1, digest,
                                        game.descriptor().to_json()),
                       anchor);
}

}  // namespace bealab
