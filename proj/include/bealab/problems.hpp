// Differentiable single-objective test problems. A Problem owns a pool of
// synthetic examples and per-example loss/gradient closures; batch losses are
// always the arithmetic mean over the batch, and schedule (pooled) losses the
// mean over batch losses. Everything is immutable after construction and
// reproducible from the descriptor alone.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bealab/linalg.hpp"

namespace bealab {

// Fixed-shape payload: a real vector plus an optional ±1 label (0 = unused).
struct Example {
  std::vector<double> x;
  double label = 0.0;

  bool operator==(const Example&) const = default;
};

struct Batch {
  int id = 0;
  std::vector<Example> examples;
};

struct BatchSchedule {
  std::vector<Batch> batches;
  std::size_t size() const { return batches.size(); }
};

// True when every batch holds the same example payloads (ids may differ).
bool batches_identical(const BatchSchedule& schedule);

std::string schedule_digest(const BatchSchedule& schedule);

struct ProblemDescriptor {
  std::string name;
  int dim = 0;
  int num_examples = 0;
  std::uint64_t seed = 0;
  std::string variant;

  nlohmann::json to_json() const;
};

class Problem {
 public:
  using LossFn = std::function<double(const ParamVector&, const Example&)>;
  using GradFn = std::function<ParamVector(const ParamVector&, const Example&)>;
  using HvpFn = std::function<ParamVector(const ParamVector&, const Example&,
                                          const ParamVector&)>;

  Problem(ProblemDescriptor descriptor, std::vector<Example> pool, LossFn loss,
          GradFn grad = nullptr, HvpFn hvp = nullptr);

  int dim() const { return descriptor_.dim; }
  const ProblemDescriptor& descriptor() const { return descriptor_; }
  const std::vector<Example>& pool() const { return pool_; }

  double example_loss(const ParamVector& params, const Example& ex) const;
  double batch_loss(const ParamVector& params, const Batch& batch) const;
  double schedule_loss(const ParamVector& params, const BatchSchedule& s) const;

  bool has_analytic_grad() const { return static_cast<bool>(grad_); }
  ParamVector example_grad(const ParamVector& params, const Example& ex) const;

  bool has_analytic_hvp() const { return static_cast<bool>(hvp_); }
  ParamVector example_hvp(const ParamVector& params, const Example& ex,
                          const ParamVector& v) const;

 private:
  ProblemDescriptor descriptor_;
  std::vector<Example> pool_;
  LossFn loss_;
  GradFn grad_;
  HvpFn hvp_;
};

// Per-example loss ½(θ−c_i)ᵀA_i(θ−c_i) with seeded SPD A_i = M Mᵀ + 0.1 I and
// seeded centers c_i. Analytic gradient A_i(θ−c_i) and HVP A_i v attached.
Problem make_quadratic(int dim, int num_examples, std::uint64_t seed);

// Same loss with caller-supplied matrices/centers (one example per pair).
Problem make_quadratic_explicit(std::vector<Matrix> matrices,
                                std::vector<ParamVector> centers);

// The 1-D unit quadratic ½θ² (A=1, c=0); closed forms exist for everything.
Problem make_scalar_quadratic();

// Logistic negative log-likelihood on seeded synthetic binary data:
// loss = softplus(−y⟨θ,x⟩). Analytic gradient attached; Hessian-vector
// products are left to the finite-difference oracle.
Problem make_logistic(int num_features, int num_examples, std::uint64_t seed);

// One batch holding the whole example pool.
Batch full_batch(const Problem& problem, int id = 0);
BatchSchedule single_batch_schedule(const Problem& problem);

// n copies of the full batch (distinct ids, identical content).
BatchSchedule make_fullbatch_schedule(const Problem& problem, int n);

// n batches of batch_size examples drawn from the pool with a seeded shuffle;
// draws without replacement while the pool lasts, then reshuffles.
BatchSchedule make_schedule(const Problem& problem, int n, int batch_size,
                            std::uint64_t seed);

BatchSchedule permuted(const BatchSchedule& schedule,
                       const std::vector<int>& order);

}  // namespace bealab
