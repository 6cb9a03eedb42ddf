// Order-of-error measurement: n discrete steps against the matching flow over
// a ladder of learning rates, least-squares slope on (log h, log error), plus
// the batch-order permutation study. Each ladder point is an independent pure
// computation; results are merged in decreasing-h order.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bealab/calculus.hpp"
#include "bealab/flows.hpp"
#include "bealab/games.hpp"
#include "bealab/integrators.hpp"
#include "bealab/problems.hpp"
#include "bealab/regularizers.hpp"

namespace bealab {

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// OLS of log(error) on log(h); needs >= 2 points, all errors positive.
SlopeFit fit_slope(const std::vector<double>& h_values,
                   const std::vector<double>& errors);

struct SlopePoint {
  double h = 0.0;
  double error = 0.0;
  bool valid = true;        // false when a trajectory or integration diverged
  double error_phi = 0.0;   // games only
  double error_theta = 0.0; // games only
  // field decomposition norms at the start point, for reporting
  double base_norm = 0.0;
  double drift_norm = 0.0;
  double alignment_norm = 0.0;
};

struct SlopeReport {
  std::vector<SlopePoint> points;  // decreasing h
  SlopeFit fit;
  nlohmann::json config;

  std::vector<double> valid_h() const;
  std::vector<double> valid_errors() const;
  nlohmann::json to_json() const;
  std::string to_csv() const;
};

// h = 2^-hi_exp .. 2^-lo_exp, halving; bounded below at 2^-12 to stay clear
// of double-precision error floors.
std::vector<double> make_ladder(int hi_exp, int lo_exp);
std::vector<double> parse_ladder(const std::string& spec);

enum class SingleFlowChoice { gradient_flow, igr, multi_step_sgd };
enum class GameFlowChoice { base, game_bea, game_anchored };

const char* single_flow_name(SingleFlowChoice c);
const char* game_flow_name(GameFlowChoice c);

// For each ladder h: run schedule-length discrete SGD steps from theta0,
// integrate the chosen flow (built with this h, anchored at theta0 unless
// overridden) for total time n·h, and record the endpoint distance.
SlopeReport order_check_single(const Problem& problem, const ParamVector& theta0,
                               const BatchSchedule& schedule,
                               SingleFlowChoice flow,
                               const std::vector<double>& ladder,
                               const IntegratorConfig& icfg = {},
                               const DerivativeConfig& dcfg = {},
                               const std::optional<ParamVector>&
                                   anchor_override = std::nullopt);

// One simultaneous GD step per ladder h against the chosen game flow; error
// on the stacked vector, per-player errors recorded alongside.
SlopeReport order_check_game(const Game& game, const ParamVector& phi0,
                             const ParamVector& theta0, GameFlowChoice flow,
                             const std::vector<double>& ladder,
                             const IntegratorConfig& icfg = {},
                             const DerivativeConfig& dcfg = {},
                             const std::optional<GamePoint>& anchor_override =
                                 std::nullopt);

struct PermutationRow {
  std::vector<int> order;
  ParamVector endpoint;
  RegularizerBreakdown loss;  // modified loss at this order's own endpoint
  double dist_to_pooled = 0.0;
};

struct BatchOrderReport {
  std::vector<PermutationRow> rows;
  ParamVector pooled_endpoint;      // n GD steps on the pooled batch
  ParamVector mean_endpoint;        // average over permutations
  RegularizerBreakdown expectation; // closed-form shuffling expectation
  double rank_correlation = 0.0;    // Spearman(alignment, dist_to_pooled)
  nlohmann::json config;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

// Enumerates every order of the schedule (n <= 5): discrete endpoint, the
// modified-loss breakdown evaluated at that endpoint (anchor = theta0), and
// the endpoint distance to the pooled-GD endpoint.
BatchOrderReport batch_order_study(const Problem& problem,
                                   const ParamVector& theta0,
                                   const BatchSchedule& schedule, double h,
                                   const DerivativeConfig& dcfg = {});

double spearman_rank_correlation(const std::vector<double>& a,
                                 const std::vector<double>& b);

}  // namespace bealab
