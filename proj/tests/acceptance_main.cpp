// Acceptance suite: one timed pass/fail line per criterion, nonzero exit on
// any failure. Each check pins its tolerances inline.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bealab/cli.hpp"
#include "bealab/flows.hpp"
#include "bealab/harness.hpp"
#include "bealab/io.hpp"
#include "bealab/optimizers.hpp"
#include "bealab/regularizers.hpp"
#include "bealab/rng.hpp"
#include "oracles.hpp"

using namespace bealab;
using nlohmann::json;

namespace {

int g_failures = 0;

struct Criterion {
  int id;
  const char* name;
  double time_limit_s;
};

class Runner {
 public:
  explicit Runner(Criterion c) : c_(c), start_(std::chrono::steady_clock::now()) {}

  void expect(bool ok, const std::string& detail) {
    if (!ok) failed_details_.push_back(detail);
  }

  void finish() {
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    bool ok = failed_details_.empty();
    if (elapsed > c_.time_limit_s) {
      ok = false;
      failed_details_.push_back("time " + std::to_string(elapsed) + "s > " +
                                std::to_string(c_.time_limit_s) + "s");
    }
    std::printf("[%s] %2d %-28s (%.2fs)", ok ? "PASS" : "FAIL", c_.id, c_.name,
                elapsed);
    if (!ok) {
      ++g_failures;
      for (const std::string& d : failed_details_)
        std::printf("  <- %s", d.c_str());
    }
    std::printf("\n");
    std::fflush(stdout);
  }

 private:
  Criterion c_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::string> failed_details_;
};

std::string num(double x) { return fmt17(x); }

// keeps the one-line-per-criterion contract: CLI commands print progress to
// std::cout, which is noise here
class CoutSilencer {
 public:
  CoutSilencer() : old_(std::cout.rdbuf(devnull_.rdbuf())) {}
  ~CoutSilencer() { std::cout.rdbuf(old_); }

 private:
  std::ostringstream devnull_;
  std::streambuf* old_;
};

bool in_band(double x, double lo, double hi) { return x >= lo && x <= hi; }

// 1. Euler order baseline: gradient flow on the quadratic problem, n = 1.
void criterion_1() {
  Runner r({1, "euler-order-baseline", 5.0});
  Problem p = make_quadratic(3, 8, 7);
  ParamVector theta0 = Rng(9).uniform_vec(3, -1.0, 1.0);
  SlopeReport rep =
      order_check_single(p, theta0, single_batch_schedule(p),
                         SingleFlowChoice::gradient_flow, make_ladder(4, 9));
  r.expect(in_band(rep.fit.slope, 1.75, 2.25),
           "slope " + num(rep.fit.slope) + " outside 2.0 +/- 0.25");
  r.expect(rep.fit.r_squared >= 0.999,
           "r2 " + num(rep.fit.r_squared) + " < 0.999");
  r.finish();
}

// 2. Corrected-flow order, plus the 1-D closed-form error match within 1%.
void criterion_2() {
  Runner r({2, "igr-flow-order", 5.0});
  Problem p = make_quadratic(3, 8, 7);
  ParamVector theta0 = Rng(9).uniform_vec(3, -1.0, 1.0);
  SlopeReport rep =
      order_check_single(p, theta0, single_batch_schedule(p),
                         SingleFlowChoice::igr, make_ladder(4, 9));
  r.expect(in_band(rep.fit.slope, 2.75, 3.25),
           "slope " + num(rep.fit.slope) + " outside 3.0 +/- 0.25");

  Problem unit = make_scalar_quadratic();
  SlopeReport unit_rep =
      order_check_single(unit, ParamVector{1.0}, single_batch_schedule(unit),
                         SingleFlowChoice::igr, make_ladder(4, 9));
  r.expect(in_band(unit_rep.fit.slope, 2.75, 3.25),
           "unit slope " + num(unit_rep.fit.slope));
  for (const SlopePoint& pt : unit_rep.points) {
    const double closed =
        std::abs((1.0 - pt.h) - std::exp(-(1.0 + pt.h / 2.0) * pt.h));
    r.expect(std::abs(pt.error - closed) <= 0.01 * closed,
             "h=" + num(pt.h) + ": error " + num(pt.error) +
                 " vs closed form " + num(closed) + " off by >1%");
  }
  r.finish();
}

// 3. n-step mini-batch flow order on logistic batches; the anchored term is
//    load-bearing (perturbed anchor drops the slope below 2.6).
void criterion_3() {
  Runner r({3, "n-step-sgd-flow-order", 30.0});
  Problem p = make_logistic(3, 12, 62);
  ParamVector theta0{0.5, -0.4, 0.3};
  for (int n : {2, 3, 4}) {
    BatchSchedule s = make_schedule(p, n, 4, 63);
    SlopeReport rep = order_check_single(
        p, theta0, s, SingleFlowChoice::multi_step_sgd, make_ladder(4, 9));
    r.expect(in_band(rep.fit.slope, 2.75, 3.25),
             "n=" + std::to_string(n) + ": slope " + num(rep.fit.slope) +
                 " outside 3.0 +/- 0.25");
  }
  Rng rng(64);
  ParamVector delta = rng.uniform_vec(3, -1.0, 1.0);
  delta *= 1.0 / delta.norm();
  SlopeReport bad = order_check_single(
      p, theta0, make_schedule(p, 3, 4, 63), SingleFlowChoice::multi_step_sgd,
      make_ladder(4, 9), {}, {}, theta0 + delta);
  r.expect(bad.fit.slope < 2.6, "perturbed-anchor slope " +
                                    num(bad.fit.slope) + " not below 2.6");
  r.finish();
}

// 4. Full-batch reduction: identical batches give the plain corrected flow.
void criterion_4() {
  Runner r({4, "full-batch-reduction", 10.0});
  Problem quad = make_quadratic(3, 5, 12);
  Problem logi = make_logistic(3, 8, 12);
  for (const Problem* p : {&quad, &logi}) {
    VectorField igr = igr_flow(*p, single_batch_schedule(*p), 0.1);
    for (int n : {2, 3, 5}) {
      VectorField multi = multi_step_sgd_flow(*p, make_fullbatch_schedule(*p, n),
                                              0.1, ParamVector(3, 0.3));
      for (const ParamVector& pt : oracles::random_points(20, 3, 303)) {
        const double gap = (multi.eval(pt) - igr.eval(pt)).norm();
        r.expect(gap <= 1e-10, p->descriptor().name + " n=" +
                                   std::to_string(n) + ": gap " + num(gap));
      }
    }
  }
  r.finish();
}

// 5. Potential consistency: every modified flow is the negative FD gradient
//    of its modified loss, anchors frozen.
void criterion_5() {
  Runner r({5, "potential-consistency", 10.0});
  const double h = 0.1;
  auto tol = [](const ParamVector& f) {
    return std::max(1e-6, 1e-4 * f.norm());
  };

  Problem quad = make_quadratic(3, 8, 20);
  Problem logi = make_logistic(3, 9, 20);
  for (const Problem* p : {&quad, &logi}) {
    BatchSchedule single = single_batch_schedule(*p);
    VectorField igr = igr_flow(*p, single, h);
    for (const ParamVector& pt : oracles::random_points(20, 3, 500)) {
      ParamVector field = igr.eval(pt);
      ParamVector fd = oracles::fd_scalar_gradient(
          [&](const ParamVector& x) {
            return modified_loss_igr(*p, x, single, h).total;
          },
          pt);
      r.expect((field + fd).norm() <= tol(field),
               p->descriptor().name + " igr: mismatch " +
                   num((field + fd).norm()));
    }

    BatchSchedule s = make_schedule(*p, 3, 3, 21);
    ParamVector anchor{0.2, -0.4, 0.6};
    VectorField multi = multi_step_sgd_flow(*p, s, h, anchor);
    for (const ParamVector& pt : oracles::random_points(20, 3, 501)) {
      ParamVector field = multi.eval(pt);
      ParamVector fd = oracles::fd_scalar_gradient(
          [&](const ParamVector& x) {
            return modified_loss_sgd(*p, x, s, h, anchor).total;
          },
          pt);
      r.expect((field + fd).norm() <= tol(field),
               p->descriptor().name + " multi-step: mismatch " +
                   num((field + fd).norm()));
    }
  }

  std::vector<Game> games;
  games.push_back(make_quadratic_game(2, 2, 11, false));
  games.push_back(make_dirac_gan(GanVariant::non_saturating));
  games.push_back(make_dirac_gan(GanVariant::saturating));
  Rng rng(502);
  for (const Game& g : games) {
    GamePoint anchor{rng.uniform_vec(g.dim_phi(), -1.0, 1.0),
                     rng.uniform_vec(g.dim_theta(), -1.0, 1.0)};
    GameFieldPair flow = game_anchored_flow(g, h, anchor);
    for (int i = 0; i < 20; ++i) {
      ParamVector phi = rng.uniform_vec(g.dim_phi(), -1.0, 1.0);
      ParamVector theta = rng.uniform_vec(g.dim_theta(), -1.0, 1.0);
      GamePoint field = flow.eval(phi, theta);
      ParamVector fd_phi = oracles::fd_scalar_gradient(
          [&](const ParamVector& x) {
            return game_modified_losses(g, x, theta, h, anchor).phi.total;
          },
          phi);
      ParamVector fd_theta = oracles::fd_scalar_gradient(
          [&](const ParamVector& x) {
            return game_modified_losses(g, phi, x, h, anchor).theta.total;
          },
          theta);
      r.expect((field.phi + fd_phi).norm() <= tol(field.phi),
               g.descriptor().name + "/" + g.descriptor().variant +
                   " phi mismatch " + num((field.phi + fd_phi).norm()));
      r.expect((field.theta + fd_theta).norm() <= tol(field.theta),
               g.descriptor().name + "/" + g.descriptor().variant +
                   " theta mismatch " + num((field.theta + fd_theta).norm()));
    }
  }
  r.finish();
}

// 6. Shuffling expectation: n! brute force equals the closed form.
void criterion_6() {
  Runner r({6, "shuffling-expectation", 10.0});
  Problem quad = make_quadratic(3, 12, 34);
  Problem logi = make_logistic(3, 12, 34);
  for (const Problem* p : {&quad, &logi}) {
    for (int n : {2, 3, 4}) {
      BatchSchedule s = make_schedule(*p, n, 3, 35);
      ParamVector theta{0.4, -0.2, 0.1}, anchor{0.0, 0.3, -0.5};
      RegularizerBreakdown closed = expected_shuffled_loss(
          *p, theta, s, 0.1, anchor, ExpectationMethod::closed_form);
      RegularizerBreakdown brute = expected_shuffled_loss(
          *p, theta, s, 0.1, anchor, ExpectationMethod::brute_force);
      const double gap = std::abs(closed.total - brute.total);
      r.expect(gap <= 1e-10, p->descriptor().name + " n=" + std::to_string(n) +
                                 ": |closed - brute| = " + num(gap));
    }
  }
  r.finish();
}

// 7. Game order checks: base flow second order, both corrected flows third.
void criterion_7() {
  Runner r({7, "game-order-checks", 15.0});
  struct Setup {
    const char* label;
    Game game;
    ParamVector phi0, theta0;
  };
  std::vector<Setup> setups;
  setups.push_back({"bilinear", make_bilinear_zero_sum(), ParamVector{1.0},
                    ParamVector{0.5}});
  setups.push_back({"quadratic-nonzero-sum",
                    make_quadratic_game(2, 2, 11, false),
                    ParamVector{0.4, 0.2}, ParamVector{-0.3, 0.6}});
  for (const Setup& s : setups) {
    SlopeFit base = order_check_game(s.game, s.phi0, s.theta0,
                                     GameFlowChoice::base, make_ladder(4, 9))
                        .fit;
    r.expect(in_band(base.slope, 1.75, 2.25),
             std::string(s.label) + " base slope " + num(base.slope));
    SlopeFit bea = order_check_game(s.game, s.phi0, s.theta0,
                                    GameFlowChoice::game_bea, make_ladder(4, 9))
                       .fit;
    r.expect(in_band(bea.slope, 2.75, 3.25),
             std::string(s.label) + " bea slope " + num(bea.slope));
    SlopeFit anchored =
        order_check_game(s.game, s.phi0, s.theta0,
                         GameFlowChoice::game_anchored, make_ladder(4, 9))
            .fit;
    r.expect(in_band(anchored.slope, 2.75, 3.25),
             std::string(s.label) + " anchored slope " + num(anchored.slope));
  }
  r.finish();
}

// 8. Interaction coefficients: exact reciprocal products on a 16x16 grid and
//    the qualitative saturating/non-saturating contrast.
void criterion_8() {
  Runner r({8, "gan-coefficients", 1.0});
  std::vector<double> grid;
  for (int i = 0; i < 16; ++i) grid.push_back(0.1 + 0.8 * i / 15.0);
  CoeffMatrix ns = gan_interaction_coeffs(grid, grid, CoeffMode::non_saturating);
  CoeffMatrix sat = gan_interaction_coeffs(grid, grid, CoeffMode::saturating);
  for (std::size_t i = 0; i < 16; ++i)
    for (std::size_t j = 0; j < 16; ++j) {
      r.expect(ns.at(i, j) == 1.0 / ((1.0 - grid[i]) * grid[j]),
               "non-saturating formula mismatch at " + std::to_string(i) + "," +
                   std::to_string(j));
      r.expect(sat.at(i, j) == 1.0 / ((1.0 - grid[i]) * (1.0 - grid[j])),
               "saturating formula mismatch at " + std::to_string(i) + "," +
                   std::to_string(j));
      if (i > 0)
        r.expect(ns.at(i, j) > ns.at(i - 1, j),
                 "non-saturating not increasing in current confidence");
      // where the generator was fooling the discriminator, saturating wins
      if (grid[j] > 0.5)
        r.expect(sat.at(i, j) > ns.at(i, j),
                 "saturating does not dominate at d_prev " + num(grid[j]));
    }
  r.finish();
}

// 9. Derivative oracle health: built-ins pass, an injected 1% fault fails.
void criterion_9() {
  Runner r({9, "derivative-oracle-health", 5.0});
  Rng rng(4);
  auto points = [&](int dim) {
    std::vector<ParamVector> pts;
    for (int i = 0; i < 10; ++i) pts.push_back(rng.uniform_vec(dim, -1.0, 1.0));
    return pts;
  };
  auto game_points = [&](const Game& g) {
    std::vector<GamePoint> pts;
    for (int i = 0; i < 10; ++i)
      pts.push_back(GamePoint{rng.uniform_vec(g.dim_phi(), -1.0, 1.0),
                              rng.uniform_vec(g.dim_theta(), -1.0, 1.0)});
    return pts;
  };

  for (const Problem& p : {make_quadratic(3, 4, 7), make_scalar_quadratic(),
                           make_logistic(2, 8, 3)}) {
    CheckReport rep = check_gradient(p, points(p.dim()));
    r.expect(rep.passed, p.descriptor().name + " gradient check failed");
  }
  std::vector<Game> games;
  games.push_back(make_quadratic_game(2, 2, 11, false));
  games.push_back(make_quadratic_game(2, 2, 11, true));
  games.push_back(make_bilinear_zero_sum());
  games.push_back(make_common_payoff_quadratic(2, 2, 13));
  games.push_back(make_dirac_gan(GanVariant::non_saturating));
  games.push_back(make_dirac_gan(GanVariant::saturating));
  for (const Game& g : games) {
    CheckReport rep = check_gradient(g, game_points(g));
    r.expect(rep.passed, g.descriptor().name + " gradient check failed");
  }

  Problem clean = make_quadratic(2, 3, 5);
  Problem faulty(clean.descriptor(), clean.pool(),
                 [clean](const ParamVector& t, const Example& ex) {
                   return clean.example_loss(t, ex);
                 },
                 [clean](const ParamVector& t, const Example& ex) {
                   return 1.01 * clean.example_grad(t, ex);
                 });
  CheckReport fault = check_gradient(faulty, points(2));
  r.expect(!fault.passed, "injected 1% gradient fault not detected");
  r.finish();
}

// 10. Reproducibility: reports re-run bitwise from their embedded config.
void criterion_10() {
  Runner r({10, "report-reproducibility", 30.0});
  const std::filesystem::path root =
      std::filesystem::temp_directory_path() / "bealab_acceptance";
  std::filesystem::remove_all(root);

  std::vector<json> configs = {
      {{"command", "order-check"},
       {"flow", "multi_step_sgd"},
       {"schedule", {{"n", 3}, {"batch_size", 4}}},
       {"problem", {{"name", "logistic"}}}},
      {{"command", "regularizers"},
       {"schedule", {{"n", 3}, {"batch_size", 2}}}},
      {{"command", "gan-coeffs"},
       {"grid", {{"lo", 0.1}, {"hi", 0.9}, {"count", 8}}},
       {"dirac", {{"h", 0.1}, {"steps", 4}}}},
  };
  CoutSilencer quiet;
  int run = 0;
  for (const json& cfg : configs) {
    const std::filesystem::path a = root / ("a" + std::to_string(run));
    const std::filesystem::path b = root / ("b" + std::to_string(run));
    cli::run_command(cfg, a.string());

    // find the JSON report, recover its embedded config, run again
    std::filesystem::path report_path;
    for (const auto& entry : std::filesystem::directory_iterator(a))
      if (entry.path().extension() == ".json") report_path = entry.path();
    json report = json::parse(read_text_file(report_path));
    r.expect(report.contains("run_config"), "report lacks run_config");
    cli::run_command(report.at("run_config"), b.string());

    for (const auto& entry : std::filesystem::directory_iterator(a)) {
      const std::filesystem::path other = b / entry.path().filename();
      r.expect(std::filesystem::exists(other),
               "rerun missing " + entry.path().filename().string());
      if (std::filesystem::exists(other))
        r.expect(read_text_file(entry.path()) == read_text_file(other),
                 "rerun differs in " + entry.path().filename().string());
    }
    ++run;
  }
  r.finish();
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  if (g_failures == 0) {
    std::printf("all acceptance criteria passed\n");
    return 0;
  }
  std::printf("%d acceptance criteria FAILED\n", g_failures);
  return 1;
}
