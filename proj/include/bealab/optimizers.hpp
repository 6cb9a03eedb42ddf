// The discrete updates under study: mini-batch SGD over an explicit batch
// schedule (full-batch GD is the identical-batch special case) and
// simultaneous gradient descent for two-player games. Gradients always go
// through the calculus oracles so the discrete and continuous sides share
// derivative code exactly.
#pragma once

#include <string>
#include <vector>

#include "bealab/calculus.hpp"
#include "bealab/games.hpp"
#include "bealab/problems.hpp"

namespace bealab {

struct Trajectory {
  std::vector<ParamVector> iterates;  // length n+1 including the start
  double h = 0.0;
  std::string schedule_digest;

  const ParamVector& endpoint() const { return iterates.back(); }
};

// θ ← θ − h·∇E(θ; X^μ), one step per batch in schedule order.
Trajectory sgd_steps(const Problem& problem, const ParamVector& theta0,
                     double h, const BatchSchedule& schedule,
                     const DerivativeConfig& cfg = {});

struct GameTrajectory {
  std::vector<GamePoint> iterates;
  double h = 0.0;

  const GamePoint& endpoint() const { return iterates.back(); }
};

// (φ,θ) ← (φ − h∇_φE_φ, θ − h∇_θE_θ), both gradients at the pre-update pair.
GameTrajectory simultaneous_gd(const Game& game, const ParamVector& phi0,
                               const ParamVector& theta0, double h, int n,
                               const DerivativeConfig& cfg = {});

// CSV: header "step,p0,p1,..." then one row per iterate, 17 significant digits.
std::string trajectory_csv(const Trajectory& t);

}  // namespace bealab
