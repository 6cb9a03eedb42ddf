#include "bealab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "bealab/io.hpp"
#include "bealab/optimizers.hpp"

namespace bealab {
namespace {

constexpr double kMinLadderH = 0x1.0p-12;

void validate_ladder(const std::vector<double>& ladder) {
  if (ladder.size() < 4)
    throw std::invalid_argument("ladder needs at least 4 values");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (ladder[i] < kMinLadderH)
      throw std::invalid_argument("ladder value below 2^-12");
    if (i > 0 && ladder[i] >= ladder[i - 1])
      throw std::invalid_argument("ladder must be strictly decreasing");
  }
}

double stacked_norm(const ParamVector& a, const ParamVector& b) {
  return std::sqrt(a.dot(a) + b.dot(b));
}

}  // namespace

SlopeFit fit_slope(const std::vector<double>& h_values,
                   const std::vector<double>& errors) {
  if (h_values.size() != errors.size())
    throw std::invalid_argument("fit_slope: length mismatch");
  if (h_values.size() < 2)
    throw std::invalid_argument("fit_slope: need at least 2 points");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < h_values.size(); ++i) {
    if (!(h_values[i] > 0.0) || !(errors[i] > 0.0) ||
        !std::isfinite(errors[i]))
      throw std::invalid_argument("fit_slope: values must be positive finite");
    x.push_back(std::log(h_values[i]));
    y.push_back(std::log(errors[i]));
  }
  const double n = static_cast<double>(x.size());
  const double xbar = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double ybar = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - xbar) * (x[i] - xbar);
    sxy += (x[i] - xbar) * (y[i] - ybar);
    syy += (y[i] - ybar) * (y[i] - ybar);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_slope: degenerate h values");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

std::vector<double> SlopeReport::valid_h() const {
  std::vector<double> out;
  for (const SlopePoint& p : points)
    if (p.valid) out.push_back(p.h);
  return out;
}

std::vector<double> SlopeReport::valid_errors() const {
  std::vector<double> out;
  for (const SlopePoint& p : points)
    if (p.valid) out.push_back(p.error);
  return out;
}

nlohmann::json SlopeReport::to_json() const {
  nlohmann::json pts = nlohmann::json::array();
  for (const SlopePoint& p : points)
    pts.push_back({{"h", p.h},
                   {"error", p.error},
                   {"valid", p.valid},
                   {"error_phi", p.error_phi},
                   {"error_theta", p.error_theta},
                   {"base_norm", p.base_norm},
                   {"drift_norm", p.drift_norm},
                   {"alignment_norm", p.alignment_norm}});
  return {{"points", pts},
          {"slope", fit.slope},
          {"intercept", fit.intercept},
          {"r_squared", fit.r_squared},
          {"config", config}};
}

std::string SlopeReport::to_csv() const {
  std::string out =
      "h,error,valid,error_phi,error_theta,base_norm,drift_norm,"
      "alignment_norm\n";
  for (const SlopePoint& p : points) {
    out += fmt17(p.h) + "," + fmt17(p.error) + "," + (p.valid ? "1" : "0") + "," +
           fmt17(p.error_phi) + "," + fmt17(p.error_theta) + "," +
           fmt17(p.base_norm) + "," + fmt17(p.drift_norm) + "," +
           fmt17(p.alignment_norm) + "\n";
  }
  return out;
}

std::vector<double> make_ladder(int hi_exp, int lo_exp) {
  if (hi_exp < 1 || lo_exp <= hi_exp)
    throw std::invalid_argument("make_ladder: need 1 <= hi_exp < lo_exp");
  if (lo_exp > 12)
    throw std::invalid_argument("make_ladder: exponents beyond 12 hit the "
                                "double-precision error floor");
  std::vector<double> ladder;
  for (int e = hi_exp; e <= lo_exp; ++e) ladder.push_back(std::ldexp(1.0, -e));
  return ladder;
}

std::vector<double> parse_ladder(const std::string& spec) {
  // "2^-4..2^-9"
  int hi = 0, lo = 0;
  if (std::sscanf(spec.c_str(), "2^-%d..2^-%d", &hi, &lo) != 2)
    throw std::invalid_argument("parse_ladder: expected form 2^-A..2^-B, got '" +
                                spec + "'");
  if (lo <= hi)
    throw std::invalid_argument(
        "parse_ladder: ladder must decrease (need A < B in 2^-A..2^-B)");
  return make_ladder(hi, lo);
}

const char* single_flow_name(SingleFlowChoice c) {
  switch (c) {
    case SingleFlowChoice::gradient_flow: return "gradient_flow";
    case SingleFlowChoice::igr: return "igr";
    case SingleFlowChoice::multi_step_sgd: return "multi_step_sgd";
  }
  return "unknown";
}

const char* game_flow_name(GameFlowChoice c) {
  switch (c) {
    case GameFlowChoice::base: return "base";
    case GameFlowChoice::game_bea: return "game_bea";
    case GameFlowChoice::game_anchored: return "game_anchored";
  }
  return "unknown";
}

SlopeReport order_check_single(const Problem& problem, const ParamVector& theta0,
                               const BatchSchedule& schedule,
                               SingleFlowChoice flow,
                               const std::vector<double>& ladder,
                               const IntegratorConfig& icfg,
                               const DerivativeConfig& dcfg,
                               const std::optional<ParamVector>& anchor_override) {
  validate_ladder(ladder);
  const std::size_t n = schedule.size();
  const ParamVector anchor = anchor_override.value_or(theta0);

  SlopeReport report;
  for (double h : ladder) {
    SlopePoint pt;
    pt.h = h;
    try {
      VectorField field = [&] {
        switch (flow) {
          case SingleFlowChoice::gradient_flow:
            return gradient_flow(problem, schedule, dcfg);
          case SingleFlowChoice::igr:
            return igr_flow(problem, schedule, h, dcfg);
          case SingleFlowChoice::multi_step_sgd:
            return multi_step_sgd_flow(problem, schedule, h, anchor, dcfg);
        }
        throw std::logic_error("unreachable");
      }();
      FieldParts parts = field.eval_parts(theta0);
      pt.base_norm = parts.base.norm();
      pt.drift_norm = parts.drift.norm();
      pt.alignment_norm = parts.alignment.norm();

      Trajectory discrete = sgd_steps(problem, theta0, h, schedule, dcfg);
      ParamVector flow_end =
          integrate(field, theta0, static_cast<double>(n) * h, icfg);
      pt.error = (discrete.endpoint() - flow_end).norm();
      pt.valid = std::isfinite(pt.error) && pt.error > 0.0;
    } catch (const DivergenceError&) {
      pt.valid = false;
    }
    report.points.push_back(pt);
  }

  std::vector<double> hs = report.valid_h(), errs = report.valid_errors();
  if (hs.size() < 4)
    throw std::invalid_argument(
        "order_check_single: fewer than 4 valid ladder points");
  report.fit = fit_slope(hs, errs);
  report.config = {{"experiment", "order_check_single"},
                   {"flow", single_flow_name(flow)},
                   {"n", n},
                   {"problem", problem.descriptor().to_json()},
                   {"schedule_digest", schedule_digest(schedule)},
                   {"substeps_per_h", icfg.substeps_per_h},
                   {"anchor_overridden", anchor_override.has_value()}};
  return report;
}

SlopeReport order_check_game(const Game& game, const ParamVector& phi0,
                             const ParamVector& theta0, GameFlowChoice flow,
                             const std::vector<double>& ladder,
                             const IntegratorConfig& icfg,
                             const DerivativeConfig& dcfg,
                             const std::optional<GamePoint>& anchor_override) {
  validate_ladder(ladder);
  const GamePoint anchor = anchor_override.value_or(GamePoint{phi0, theta0});

  SlopeReport report;
  for (double h : ladder) {
    SlopePoint pt;
    pt.h = h;
    try {
      GameFieldPair pair = [&] {
        switch (flow) {
          case GameFlowChoice::base:
            return game_bea_flow(game, 0.0, dcfg);
          case GameFlowChoice::game_bea:
            return game_bea_flow(game, h, dcfg);
          case GameFlowChoice::game_anchored:
            return game_anchored_flow(game, h, anchor, dcfg);
        }
        throw std::logic_error("unreachable");
      }();
      GameFieldParts parts = pair.eval_parts(phi0, theta0);
      pt.base_norm = stacked_norm(parts.phi.base, parts.theta.base);
      pt.drift_norm = stacked_norm(parts.phi.drift, parts.theta.drift);
      pt.alignment_norm =
          stacked_norm(parts.phi.alignment, parts.theta.alignment);

      GameTrajectory discrete = simultaneous_gd(game, phi0, theta0, h, 1, dcfg);
      GamePoint flow_end =
          integrate_pair(pair, GamePoint{phi0, theta0}, h, icfg);
      const GamePoint& d = discrete.endpoint();
      pt.error_phi = (d.phi - flow_end.phi).norm();
      pt.error_theta = (d.theta - flow_end.theta).norm();
      pt.error = std::sqrt(pt.error_phi * pt.error_phi +
                           pt.error_theta * pt.error_theta);
      pt.valid = std::isfinite(pt.error) && pt.error > 0.0;
    } catch (const DivergenceError&) {
      pt.valid = false;
    }
    report.points.push_back(pt);
  }

  std::vector<double> hs = report.valid_h(), errs = report.valid_errors();
  if (hs.size() < 4)
    throw std::invalid_argument(
        "order_check_game: fewer than 4 valid ladder points");
  report.fit = fit_slope(hs, errs);
  report.config = {{"experiment", "order_check_game"},
                   {"flow", game_flow_name(flow)},
                   {"game", game.descriptor().to_json()},
                   {"substeps_per_h", icfg.substeps_per_h},
                   {"anchor_overridden", anchor_override.has_value()}};
  return report;
}

double spearman_rank_correlation(const std::vector<double>& a,
                                 const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw std::invalid_argument("spearman: need matched series, length >= 2");
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&v](std::size_t i, std::size_t j) { return v[i] < v[j]; });
    std::vector<double> r(v.size());
    std::size_t i = 0;
    while (i < idx.size()) {  // ties get the average rank
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  std::vector<double> ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double mean = (n + 1.0) / 2.0;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - mean) * (rb[i] - mean);
    saa += (ra[i] - mean) * (ra[i] - mean);
    sbb += (rb[i] - mean) * (rb[i] - mean);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;  // constant series
  return sab / std::sqrt(saa * sbb);
}

nlohmann::json BatchOrderReport::to_json() const {
  nlohmann::json rws = nlohmann::json::array();
  for (const PermutationRow& r : rows)
    rws.push_back({{"order", r.order},
                   {"endpoint", r.endpoint.values()},
                   {"loss", r.loss.to_json()},
                   {"dist_to_pooled", r.dist_to_pooled}});
  return {{"rows", rws},
          {"pooled_endpoint", pooled_endpoint.values()},
          {"mean_endpoint", mean_endpoint.values()},
          {"expectation", expectation.to_json()},
          {"rank_correlation", rank_correlation},
          {"config", config}};
}

std::string BatchOrderReport::to_csv() const {
  std::string out =
      "perm,order,base_loss,norm_term,alignment_term,total,dist_to_pooled\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const PermutationRow& r = rows[i];
    std::string ord;
    for (std::size_t k = 0; k < r.order.size(); ++k) {
      if (k) ord += "-";
      ord += std::to_string(r.order[k]);
    }
    out += std::to_string(i) + "," + ord + "," + fmt17(r.loss.base_loss) + "," +
           fmt17(r.loss.norm_term) + "," + fmt17(r.loss.alignment_term) + "," +
           fmt17(r.loss.total) + "," + fmt17(r.dist_to_pooled) + "\n";
  }
  return out;
}

BatchOrderReport batch_order_study(const Problem& problem,
                                   const ParamVector& theta0,
                                   const BatchSchedule& schedule, double h,
                                   const DerivativeConfig& dcfg) {
  const std::size_t n = schedule.size();
  if (n < 2)
    throw std::invalid_argument("batch_order_study: need n >= 2");
  if (n > 5)
    throw std::invalid_argument("batch_order_study: n > 5 rejected (n!)");

  // Pooled-GD reference: n steps, each on the union of all batches.
  Batch pooled;
  pooled.id = 0;
  for (const Batch& b : schedule.batches)
    pooled.examples.insert(pooled.examples.end(), b.examples.begin(),
                           b.examples.end());
  BatchSchedule pooled_schedule;
  for (std::size_t i = 0; i < n; ++i) {
    Batch copy = pooled;
    copy.id = static_cast<int>(i);
    pooled_schedule.batches.push_back(copy);
  }
  BatchOrderReport report;
  report.pooled_endpoint =
      sgd_steps(problem, theta0, h, pooled_schedule, dcfg).endpoint();

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  ParamVector mean(theta0.dim(), 0.0);
  std::vector<double> aligns, dists;
  do {
    BatchSchedule perm = permuted(schedule, order);
    PermutationRow row;
    row.order = order;
    row.endpoint = sgd_steps(problem, theta0, h, perm, dcfg).endpoint();
    row.loss =
        modified_loss_sgd(problem, row.endpoint, perm, h, theta0, dcfg);
    row.dist_to_pooled = (row.endpoint - report.pooled_endpoint).norm();
    mean += row.endpoint;
    aligns.push_back(row.loss.alignment_term);
    dists.push_back(row.dist_to_pooled);
    report.rows.push_back(std::move(row));
  } while (std::next_permutation(order.begin(), order.end()));

  mean *= 1.0 / static_cast<double>(report.rows.size());
  report.mean_endpoint = mean;
  report.expectation = expected_shuffled_loss(
      problem, theta0, schedule, h, theta0, ExpectationMethod::closed_form, dcfg);
  report.rank_correlation = spearman_rank_correlation(aligns, dists);
  report.config = {{"experiment", "batch_order_study"},
                   {"n", n},
                   {"h", h},
                   {"problem", problem.descriptor().to_json()},
                   {"schedule_digest", schedule_digest(schedule)}};
  return report;
}

}  // namespace bealab
