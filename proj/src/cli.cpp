#include "bealab/cli.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "bealab/harness.hpp"
#include "bealab/io.hpp"
#include "bealab/optimizers.hpp"
#include "bealab/regularizers.hpp"
#include "bealab/rng.hpp"

namespace bealab::cli {
namespace {

using nlohmann::json;

std::uint64_t seed_of(const json& cfg, const char* key, std::uint64_t fallback) {
  if (cfg.contains(key) && cfg[key].is_number())
    return cfg[key].get<std::uint64_t>();
  return fallback;
}

void set_default(json& obj, const char* key, const json& value) {
  if (!obj.contains(key)) obj[key] = value;
}

}  // namespace

Problem problem_from_json(const json& spec) {
  const std::string name = spec.value("name", "quadratic");
  const std::uint64_t seed = seed_of(spec, "seed", 7);
  if (name == "quadratic")
    return make_quadratic(spec.value("dim", 3), spec.value("num_examples", 8),
                          seed);
  if (name == "logistic")
    return make_logistic(spec.value("dim", 3), spec.value("num_examples", 12),
                         seed);
  if (name == "scalar_quadratic") return make_scalar_quadratic();
  throw std::invalid_argument("problem.name: unknown problem '" + name + "'");
}

Game game_from_json(const json& spec) {
  const std::string name = spec.value("name", "bilinear");
  const std::uint64_t seed = seed_of(spec, "seed", 11);
  const int dp = spec.value("dim_phi", 2);
  const int dt = spec.value("dim_theta", 2);
  if (name == "bilinear") return make_bilinear_zero_sum();
  if (name == "quadratic_game")
    return make_quadratic_game(dp, dt, seed, spec.value("zero_sum", false));
  if (name == "common_payoff") return make_common_payoff_quadratic(dp, dt, seed);
  if (name == "zero_sum_pair") return make_zero_sum_quadratic_pair(dp, dt, seed);
  if (name == "dirac_gan") {
    const std::string variant = spec.value("variant", "non_saturating");
    if (variant == "non_saturating")
      return make_dirac_gan(GanVariant::non_saturating);
    if (variant == "saturating") return make_dirac_gan(GanVariant::saturating);
    throw std::invalid_argument("game.variant: unknown variant '" + variant +
                                "'");
  }
  throw std::invalid_argument("game.name: unknown game '" + name + "'");
}

BatchSchedule schedule_from_json(const Problem& problem, const json& spec) {
  const int n = spec.value("n", 1);
  if (n < 1) throw std::invalid_argument("schedule.n: must be >= 1");
  if (spec.value("fullbatch", false)) return make_fullbatch_schedule(problem, n);
  return make_schedule(problem, n, spec.value("batch_size", 2),
                       seed_of(spec, "seed", 5));
}

ParamVector point_from_json(const json& spec, std::size_t dim,
                            std::uint64_t fallback_seed) {
  if (spec.contains("values")) {
    auto vals = spec["values"].get<std::vector<double>>();
    if (vals.size() != dim)
      throw std::invalid_argument("point values: dim mismatch");
    return ParamVector(std::move(vals));
  }
  Rng rng(seed_of(spec, "seed", fallback_seed));
  return rng.uniform_vec(dim, -1.0, 1.0);
}

namespace {

std::optional<ParamVector> resolve_anchor(const json& anchor_spec,
                                          const ParamVector& start) {
  const std::string policy = anchor_spec.value("policy", "start_point");
  if (policy == "start_point") return std::nullopt;  // harness default
  if (policy == "explicit") {
    auto vals = anchor_spec.at("values").get<std::vector<double>>();
    if (vals.size() != start.dim())
      throw std::invalid_argument("anchor.values: dim mismatch");
    return ParamVector(std::move(vals));
  }
  if (policy == "perturbed") {
    Rng rng(seed_of(anchor_spec, "seed", 9));
    ParamVector delta = rng.uniform_vec(start.dim(), -1.0, 1.0);
    const double norm = delta.norm();
    if (norm == 0.0) throw std::invalid_argument("anchor perturbation is zero");
    delta *= anchor_spec.value("norm", 1.0) / norm;
    return start + delta;
  }
  throw std::invalid_argument("anchor.policy: unknown policy '" + policy + "'");
}

std::pair<double, double> band_from_json(const json& band) {
  if (!band.is_array() || band.size() != 2)
    throw std::invalid_argument("band: expected [lo, hi]");
  const double lo = band[0].get<double>(), hi = band[1].get<double>();
  if (!(lo < hi)) throw std::invalid_argument("band: need lo < hi");
  return {lo, hi};
}

int cmd_order_check(const json& cfg, const std::filesystem::path& out) {
  const std::string ladder_spec = cfg.at("ladder").get<std::string>();
  std::vector<double> ladder = parse_ladder(ladder_spec);
  IntegratorConfig icfg{cfg.value("substeps_per_h", 64)};
  DerivativeConfig dcfg;
  const auto [band_lo, band_hi] = band_from_json(cfg.at("band"));
  const std::string flow = cfg.at("flow").get<std::string>();
  const std::string prefix = cfg.value("out_prefix", "order_check");

  SlopeReport report;
  if (cfg.contains("game")) {
    Game game = game_from_json(cfg["game"]);
    ParamVector phi0 = point_from_json(cfg.value("phi0", json::object()),
                                       game.dim_phi(), 3);
    ParamVector theta0 = point_from_json(cfg.value("theta0", json::object()),
                                         game.dim_theta(), 4);
    GameFlowChoice choice;
    if (flow == "base") choice = GameFlowChoice::base;
    else if (flow == "game_bea") choice = GameFlowChoice::game_bea;
    else if (flow == "game_anchored") choice = GameFlowChoice::game_anchored;
    else throw std::invalid_argument("flow: unknown game flow '" + flow + "'");
    std::optional<GamePoint> anchor;
    if (cfg.contains("anchor")) {
      std::optional<ParamVector> a =
          resolve_anchor(cfg["anchor"], stacked(phi0, theta0));
      if (a) {
        ParamVector ap(static_cast<std::size_t>(game.dim_phi()));
        ParamVector at(static_cast<std::size_t>(game.dim_theta()));
        for (std::size_t i = 0; i < ap.dim(); ++i) ap[i] = (*a)[i];
        for (std::size_t i = 0; i < at.dim(); ++i) at[i] = (*a)[ap.dim() + i];
        anchor = GamePoint{ap, at};
      }
    }
    report = order_check_game(game, phi0, theta0, choice, ladder, icfg, dcfg,
                              anchor);
  } else {
    Problem problem = problem_from_json(cfg.at("problem"));
    BatchSchedule schedule = schedule_from_json(problem, cfg.at("schedule"));
    ParamVector theta0 = point_from_json(cfg.value("theta0", json::object()),
                                         problem.dim(), 1);
    SingleFlowChoice choice;
    if (flow == "gradient_flow") choice = SingleFlowChoice::gradient_flow;
    else if (flow == "igr") choice = SingleFlowChoice::igr;
    else if (flow == "multi_step_sgd") choice = SingleFlowChoice::multi_step_sgd;
    else throw std::invalid_argument("flow: unknown flow '" + flow + "'");
    std::optional<ParamVector> anchor;
    if (cfg.contains("anchor")) anchor = resolve_anchor(cfg["anchor"], theta0);
    report = order_check_single(problem, theta0, schedule, choice, ladder, icfg,
                                dcfg, anchor);
  }

  const bool passed = report.fit.slope >= band_lo && report.fit.slope <= band_hi;
  json out_json = {{"run_config", cfg},
                   {"report", report.to_json()},
                   {"band", {band_lo, band_hi}},
                   {"passed", passed}};
  write_text_file(out / (prefix + ".json"), out_json.dump(2) + "\n");
  write_text_file(out / (prefix + ".csv"), report.to_csv());
  std::cout << "order-check " << flow << ": slope=" << fmt17(report.fit.slope)
            << " r2=" << fmt17(report.fit.r_squared) << " band=[" << band_lo
            << "," << band_hi << "] " << (passed ? "PASS" : "FAIL") << "\n";
  return passed ? kExitOk : kExitFail;
}

int cmd_regularizers(const json& cfg, const std::filesystem::path& out) {
  Problem problem = problem_from_json(cfg.at("problem"));
  BatchSchedule schedule = schedule_from_json(problem, cfg.at("schedule"));
  const std::size_t n = schedule.size();
  if (n > 5)
    throw std::invalid_argument("regularizers: n > 5 rejected (n! enumeration)");
  const double h = cfg.value("h", 0.0625);
  ParamVector theta0 =
      point_from_json(cfg.value("theta0", json::object()), problem.dim(), 1);
  DerivativeConfig dcfg;
  const std::string prefix = cfg.value("out_prefix", "regularizers");

  json out_json = {{"run_config", cfg}};

  std::string perm_csv;
  if (n >= 2) {
    BatchOrderReport study =
        batch_order_study(problem, theta0, schedule, h, dcfg);
    perm_csv = study.to_csv();
    out_json["study"] = study.to_json();
  } else {
    Trajectory t = sgd_steps(problem, theta0, h, schedule, dcfg);
    RegularizerBreakdown loss =
        modified_loss_sgd(problem, t.endpoint(), schedule, h, theta0, dcfg);
    perm_csv =
        "perm,order,base_loss,norm_term,alignment_term,total,dist_to_pooled\n";
    perm_csv += "0,0," + fmt17(loss.base_loss) + "," + fmt17(loss.norm_term) +
                "," + fmt17(loss.alignment_term) + "," + fmt17(loss.total) +
                ",0\n";
    out_json["study"] = {{"rows", json::array({loss.to_json()})}};
  }

  RegularizerBreakdown closed = expected_shuffled_loss(
      problem, theta0, schedule, h, theta0, ExpectationMethod::closed_form,
      dcfg);
  RegularizerBreakdown brute = expected_shuffled_loss(
      problem, theta0, schedule, h, theta0, ExpectationMethod::brute_force,
      dcfg);
  std::string exp_csv = "method,base_loss,norm_term,alignment_term,total\n";
  exp_csv += "closed_form," + fmt17(closed.base_loss) + "," +
             fmt17(closed.norm_term) + "," + fmt17(closed.alignment_term) +
             "," + fmt17(closed.total) + "\n";
  exp_csv += "brute_force," + fmt17(brute.base_loss) + "," +
             fmt17(brute.norm_term) + "," + fmt17(brute.alignment_term) + "," +
             fmt17(brute.total) + "\n";
  out_json["expectation"] = {
      {"closed_form", closed.to_json()},
      {"brute_force", brute.to_json()},
      {"abs_diff_total", std::abs(closed.total - brute.total)}};

  write_text_file(out / (prefix + "_permutations.csv"), perm_csv);
  write_text_file(out / (prefix + "_expectation.csv"), exp_csv);
  write_text_file(out / (prefix + ".json"), out_json.dump(2) + "\n");
  std::cout << "regularizers: n=" << n << " |closed-brute|="
            << fmt17(std::abs(closed.total - brute.total)) << "\n";
  return kExitOk;
}

std::vector<double> grid_from_json(const json& cfg) {
  if (cfg.contains("count")) {
    const int count = cfg.value("count", 16);
    if (count < 1) throw std::invalid_argument("grid.count: must be >= 1");
    const double lo = cfg.value("lo", 0.1), hi = cfg.value("hi", 0.9);
    std::vector<double> g(count);
    if (count == 1) {
      g[0] = lo;
    } else {
      for (int i = 0; i < count; ++i)
        g[i] = lo + (hi - lo) * static_cast<double>(i) /
                        static_cast<double>(count - 1);
    }
    return g;
  }
  throw std::invalid_argument("grid: expected {lo, hi, count}");
}

std::string coeff_csv(const CoeffMatrix& m, const std::vector<double>& cur,
                      const std::vector<double>& prev) {
  std::string out = "d_current\\d_prev";
  for (double p : prev) out += "," + fmt17(p);
  out += "\n";
  for (std::size_t i = 0; i < m.rows; ++i) {
    out += fmt17(cur[i]);
    for (std::size_t j = 0; j < m.cols; ++j) out += "," + fmt17(m.at(i, j));
    out += "\n";
  }
  return out;
}

int cmd_gan_coeffs(const json& cfg, const std::filesystem::path& out) {
  const std::string mode = cfg.value("mode", "both");
  if (mode != "non_saturating" && mode != "saturating" && mode != "both")
    throw std::invalid_argument("mode: expected non_saturating|saturating|both");
  const std::string prefix = cfg.value("out_prefix", "gan_coeffs");

  std::vector<double> d_current, d_prev;
  if (cfg.contains("d_current") || cfg.contains("d_prev")) {
    d_current = cfg.value("d_current", std::vector<double>{});
    d_prev = cfg.value("d_prev", std::vector<double>{});
  } else {
    d_current = grid_from_json(cfg.value("grid", json{{"count", 16}}));
    d_prev = d_current;
  }
  if (d_current.empty() || d_prev.empty())
    throw std::invalid_argument("gan-coeffs: empty probability grid");

  json out_json = {{"run_config", cfg}};
  try {
    if (mode == "non_saturating" || mode == "both") {
      CoeffMatrix m =
          gan_interaction_coeffs(d_current, d_prev, CoeffMode::non_saturating);
      write_text_file(out / (prefix + "_non_saturating.csv"),
                      coeff_csv(m, d_current, d_prev));
      out_json["non_saturating"] = m.to_json();
    }
    if (mode == "saturating" || mode == "both") {
      CoeffMatrix m =
          gan_interaction_coeffs(d_current, d_prev, CoeffMode::saturating);
      write_text_file(out / (prefix + "_saturating.csv"),
                      coeff_csv(m, d_current, d_prev));
      out_json["saturating"] = m.to_json();
    }
  } catch (const std::domain_error& e) {
    throw std::invalid_argument(e.what());
  }

  if (cfg.contains("dirac") && cfg["dirac"].is_object()) {
    const json& dj = cfg["dirac"];
    const double h = dj.value("h", 0.1);
    const int steps = dj.value("steps", 8);
    const ParamVector phi0{dj.value("phi0", 1.0)};
    const ParamVector theta0{dj.value("theta0", 1.0)};
    GameTrajectory nonsat = simultaneous_gd(
        make_dirac_gan(GanVariant::non_saturating), phi0, theta0, h, steps);
    GameTrajectory sat = simultaneous_gd(make_dirac_gan(GanVariant::saturating),
                                         phi0, theta0, h, steps);
    std::string csv =
        "step,d_prev_nonsat,d_curr_nonsat,c_nonsat,d_prev_sat,d_curr_sat,"
        "c_sat\n";
    for (int s = 1; s <= steps; ++s) {
      auto row = [&](const GameTrajectory& t, CoeffMode m) {
        const GamePoint& prev = t.iterates[static_cast<std::size_t>(s - 1)];
        const GamePoint& cur = t.iterates[static_cast<std::size_t>(s)];
        const double dp = gan_discriminator_prob(prev.phi, prev.theta);
        const double dc = gan_discriminator_prob(cur.phi, cur.theta);
        const double c = gan_interaction_coeffs({dc}, {dp}, m).at(0, 0);
        return std::make_tuple(dp, dc, c);
      };
      auto [np, nc, ncoef] = row(nonsat, CoeffMode::non_saturating);
      auto [sp, sc, scoef] = row(sat, CoeffMode::saturating);
      csv += std::to_string(s) + "," + fmt17(np) + "," + fmt17(nc) + "," +
             fmt17(ncoef) + "," + fmt17(sp) + "," + fmt17(sc) + "," +
             fmt17(scoef) + "\n";
    }
    write_text_file(out / (prefix + "_dirac.csv"), csv);
  }

  write_text_file(out / (prefix + ".json"), out_json.dump(2) + "\n");
  std::cout << "gan-coeffs: " << d_current.size() << "x" << d_prev.size()
            << " grid, mode=" << mode << "\n";
  return kExitOk;
}

int cmd_check_gradients(const json& cfg, const std::filesystem::path& out) {
  const int npoints = cfg.value("points", 10);
  const std::uint64_t seed = seed_of(cfg, "seed", 4);
  const std::string prefix = cfg.value("out_prefix", "check_gradients");
  DerivativeConfig dcfg;
  Rng rng(seed);

  json rows = json::array();
  bool all_passed = true;
  auto run_problem = [&](const Problem& p) {
    std::vector<ParamVector> pts;
    for (int i = 0; i < npoints; ++i)
      pts.push_back(rng.uniform_vec(p.dim(), -1.0, 1.0));
    CheckReport r = check_gradient(p, pts, dcfg);
    all_passed = all_passed && r.passed;
    json row = r.to_json();
    row["name"] =
        p.descriptor().name +
        (p.descriptor().variant.empty() ? "" : "/" + p.descriptor().variant);
    rows.push_back(row);
  };
  auto run_game = [&](const Game& g) {
    std::vector<GamePoint> pts;
    for (int i = 0; i < npoints; ++i)
      pts.push_back(GamePoint{rng.uniform_vec(g.dim_phi(), -1.0, 1.0),
                              rng.uniform_vec(g.dim_theta(), -1.0, 1.0)});
    CheckReport r = check_gradient(g, pts, dcfg);
    all_passed = all_passed && r.passed;
    json row = r.to_json();
    row["name"] =
        g.descriptor().name +
        (g.descriptor().variant.empty() ? "" : "/" + g.descriptor().variant);
    rows.push_back(row);
  };

  run_problem(make_quadratic(3, 4, 7));
  run_problem(make_scalar_quadratic());
  run_problem(make_logistic(2, 8, 3));
  run_game(make_quadratic_game(2, 2, 11, false));
  run_game(make_quadratic_game(2, 2, 11, true));
  run_game(make_bilinear_zero_sum());
  run_game(make_common_payoff_quadratic(2, 2, 13));
  run_game(make_dirac_gan(GanVariant::non_saturating));
  run_game(make_dirac_gan(GanVariant::saturating));

  json out_json = {{"run_config", cfg},
                   {"checks", rows},
                   {"all_passed", all_passed}};
  write_text_file(out / (prefix + ".json"), out_json.dump(2) + "\n");
  std::cout << "check-gradients: " << rows.size() << " targets, "
            << (all_passed ? "all passed" : "FAILURES") << "\n";
  return all_passed ? kExitOk : kExitFail;
}

}  // namespace

nlohmann::json resolve_config(json cfg) {
  if (!cfg.contains("command"))
    throw std::invalid_argument("config: missing command");
  const std::string command = cfg["command"].get<std::string>();
  const std::uint64_t seed = seed_of(cfg, "seed", 7);
  set_default(cfg, "seed", seed);

  if (command == "order-check") {
    if (!cfg.contains("game")) {
      set_default(cfg, "flow", "igr");
      const bool multi_step = cfg["flow"] == "multi_step_sgd";
      set_default(cfg, "problem", json::object());
      set_default(cfg["problem"], "name", multi_step ? "logistic" : "quadratic");
      set_default(cfg["problem"], "dim", 3);
      set_default(cfg["problem"], "num_examples", multi_step ? 12 : 8);
      set_default(cfg["problem"], "seed", seed);
      set_default(cfg, "schedule", json::object());
      set_default(cfg["schedule"], "n", multi_step ? 3 : 1);
      // distinct mini-batches for the anchored flow, pooled otherwise
      set_default(cfg["schedule"], "fullbatch", !multi_step);
      set_default(cfg["schedule"], "batch_size", 4);
      set_default(cfg["schedule"], "seed", seed + 1);
      set_default(cfg, "theta0", json{{"seed", seed + 2}});
    } else {
      set_default(cfg["game"], "name", "bilinear");
      set_default(cfg["game"], "seed", seed);
      set_default(cfg, "phi0", json{{"seed", seed + 2}});
      set_default(cfg, "theta0", json{{"seed", seed + 3}});
      set_default(cfg, "flow", "game_bea");
    }
    set_default(cfg, "ladder", "2^-4..2^-9");
    set_default(cfg, "substeps_per_h", 64);
    set_default(cfg, "anchor", json{{"policy", "start_point"}});
    const std::string flow = cfg["flow"].get<std::string>();
    const bool second_order = (flow == "gradient_flow" || flow == "base");
    set_default(cfg, "band",
                second_order ? json{1.75, 2.25} : json{2.75, 3.25});
    set_default(cfg, "out_prefix", "order_check");
  } else if (command == "regularizers") {
    set_default(cfg, "problem", json::object());
    set_default(cfg["problem"], "name", "quadratic");
    set_default(cfg["problem"], "dim", 3);
    set_default(cfg["problem"], "num_examples", 12);
    set_default(cfg["problem"], "seed", seed);
    set_default(cfg, "schedule", json::object());
    set_default(cfg["schedule"], "n", 3);
    set_default(cfg["schedule"], "fullbatch", false);
    set_default(cfg["schedule"], "batch_size", 2);
    set_default(cfg["schedule"], "seed", seed + 1);
    set_default(cfg, "theta0", json{{"seed", seed + 2}});
    set_default(cfg, "h", 0.0625);
    set_default(cfg, "out_prefix", "regularizers");
  } else if (command == "gan-coeffs") {
    set_default(cfg, "mode", "both");
    if (!cfg.contains("d_current") && !cfg.contains("d_prev"))
      set_default(cfg, "grid", json{{"lo", 0.1}, {"hi", 0.9}, {"count", 16}});
    set_default(cfg, "out_prefix", "gan_coeffs");
  } else if (command == "check-gradients") {
    set_default(cfg, "points", 10);
    set_default(cfg, "out_prefix", "check_gradients");
  } else {
    throw std::invalid_argument("config: unknown command '" + command + "'");
  }
  return cfg;
}

int run_command(const json& config, const std::string& out_dir) {
  json cfg = resolve_config(config);
  const std::filesystem::path out(out_dir);
  std::filesystem::create_directories(out);
  const std::string command = cfg["command"].get<std::string>();
  if (command == "order-check") return cmd_order_check(cfg, out);
  if (command == "regularizers") return cmd_regularizers(cfg, out);
  if (command == "gan-coeffs") return cmd_gan_coeffs(cfg, out);
  if (command == "check-gradients") return cmd_check_gradients(cfg, out);
  throw std::invalid_argument("config: unknown command '" + command + "'");
}

namespace {

json load_config_file(const std::string& path) {
  json j = json::parse(read_text_file(path));
  // Accept a previously emitted report and recover its embedded config.
  if (j.contains("run_config")) return j["run_config"];
  return j;
}

json parse_band(const std::string& text) {
  double lo = 0.0, hi = 0.0;
  if (std::sscanf(text.c_str(), "%lf:%lf", &lo, &hi) != 2)
    throw std::invalid_argument("--band: expected LO:HI");
  return json{lo, hi};
}

json parse_grid(const std::string& text) {
  double lo = 0.0, hi = 0.0;
  int count = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%d", &lo, &hi, &count) != 3)
    throw std::invalid_argument("--grid: expected LO:HI:COUNT");
  return json{{"lo", lo}, {"hi", hi}, {"count", count}};
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"bealab: discretisation-drift and implicit-regularisation lab"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  std::string problem_name, game_name, flow, ladder, band, mode, grid;
  std::string anchor_policy;
  int n = -1, substeps = -1, batch_size = -1, points = -1, dim = -1;
  int dirac_steps = -1;
  double h = -1.0;
  long long seed = -1;
  bool fullbatch = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config (or emitted report)");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "master seed");
  };

  CLI::App* oc = app.add_subcommand("order-check",
                                    "discrete-vs-flow endpoint error slopes");
  add_common(oc);
  oc->add_option("--problem", problem_name,
                 "quadratic|logistic|scalar_quadratic");
  oc->add_option("--game", game_name,
                 "bilinear|quadratic_game|common_payoff|zero_sum_pair|dirac_gan");
  oc->add_option("--flow", flow,
                 "gradient_flow|igr|multi_step_sgd|base|game_bea|game_anchored");
  oc->add_option("--ladder", ladder, "learning-rate ladder, e.g. 2^-4..2^-9");
  oc->add_option("--n", n, "schedule length");
  oc->add_option("--batch-size", batch_size, "examples per batch");
  oc->add_flag("--fullbatch", fullbatch, "use n identical full batches");
  oc->add_option("--substeps", substeps, "integrator substeps per h");
  oc->add_option("--band", band, "slope acceptance band LO:HI");
  oc->add_option("--dim", dim, "problem dimension");
  oc->add_option("--anchor", anchor_policy, "start_point|perturbed");

  CLI::App* rg = app.add_subcommand("regularizers",
                                    "modified-loss breakdowns per batch order");
  add_common(rg);
  rg->add_option("--problem", problem_name, "quadratic|logistic");
  rg->add_option("--n", n, "schedule length (<= 5)");
  rg->add_option("--batch-size", batch_size, "examples per batch");
  rg->add_option("--lr", h, "learning rate");

  CLI::App* gc = app.add_subcommand("gan-coeffs",
                                    "interaction coefficient matrices");
  add_common(gc);
  gc->add_option("--mode", mode, "non_saturating|saturating|both");
  gc->add_option("--grid", grid, "probability grid LO:HI:COUNT");
  gc->add_option("--dirac-steps", dirac_steps,
                 "emit per-step coefficients along a Dirac-GAN run");
  gc->add_option("--lr", h, "Dirac-GAN learning rate");

  CLI::App* cg = app.add_subcommand("check-gradients",
                                    "analytic-vs-FD derivative health");
  add_common(cg);
  cg->add_option("--points", points, "random points per target");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    json cfg =
        config_path.empty() ? json::object() : load_config_file(config_path);
    if (oc->parsed()) cfg["command"] = "order-check";
    if (rg->parsed()) cfg["command"] = "regularizers";
    if (gc->parsed()) cfg["command"] = "gan-coeffs";
    if (cg->parsed()) cfg["command"] = "check-gradients";

    if (seed >= 0) cfg["seed"] = static_cast<std::uint64_t>(seed);
    if (!problem_name.empty()) cfg["problem"]["name"] = problem_name;
    if (dim > 0) cfg["problem"]["dim"] = dim;
    if (!game_name.empty()) cfg["game"]["name"] = game_name;
    if (!flow.empty()) cfg["flow"] = flow;
    if (!ladder.empty()) cfg["ladder"] = ladder;
    if (n > 0) cfg["schedule"]["n"] = n;
    if (batch_size > 0) {
      cfg["schedule"]["batch_size"] = batch_size;
      if (!fullbatch) cfg["schedule"]["fullbatch"] = false;
    }
    if (fullbatch) cfg["schedule"]["fullbatch"] = true;
    if (substeps > 0) cfg["substeps_per_h"] = substeps;
    if (!band.empty()) cfg["band"] = parse_band(band);
    if (!anchor_policy.empty()) cfg["anchor"] = {{"policy", anchor_policy}};
    if (h > 0.0) {
      if (gc->parsed()) {
        cfg["dirac"]["h"] = h;
      } else {
        cfg["h"] = h;
      }
    }
    if (!mode.empty()) cfg["mode"] = mode;
    if (!grid.empty()) cfg["grid"] = parse_grid(grid);
    if (dirac_steps > 0) cfg["dirac"]["steps"] = dirac_steps;
    if (points > 0) cfg["points"] = points;

    return run_command(cfg, out_dir);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
}

}  // namespace bealab::cli
