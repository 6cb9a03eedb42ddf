#include "bealab/problems.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "bealab/rng.hpp"

namespace bealab {
namespace {

// log(1 + e^t) without overflow
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

// Quadratic examples pack [c | A row-major] into the payload vector.
Example pack_quadratic_example(const Matrix& a, const ParamVector& c) {
  Example ex;
  ex.x.reserve(c.dim() + a.a.size());
  ex.x.insert(ex.x.end(), c.begin(), c.end());
  ex.x.insert(ex.x.end(), a.a.begin(), a.a.end());
  return ex;
}

ParamVector quadratic_residual(const ParamVector& theta, const Example& ex) {
  ParamVector r(theta.dim());
  for (std::size_t i = 0; i < theta.dim(); ++i) r[i] = theta[i] - ex.x[i];
  return r;
}

// A·v with A read from the packed payload
ParamVector quadratic_matvec(const Example& ex, const ParamVector& v) {
  const std::size_t d = v.dim();
  ParamVector out(d);
  for (std::size_t i = 0; i < d; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += ex.x[d + i * d + j] * v[j];
    out[i] = s;
  }
  return out;
}

Problem make_quadratic_from_pool(ProblemDescriptor desc,
                                 std::vector<Example> pool) {
  auto loss = [](const ParamVector& theta, const Example& ex) {
    ParamVector r = quadratic_residual(theta, ex);
    return 0.5 * r.dot(quadratic_matvec(ex, r));
  };
  auto grad = [](const ParamVector& theta, const Example& ex) {
    return quadratic_matvec(ex, quadratic_residual(theta, ex));
  };
  auto hvp = [](const ParamVector&, const Example& ex, const ParamVector& v) {
    return quadratic_matvec(ex, v);
  };
  return Problem(std::move(desc), std::move(pool), loss, grad, hvp);
}

}  // namespace

bool batches_identical(const BatchSchedule& schedule) {
  for (std::size_t i = 1; i < schedule.batches.size(); ++i)
    if (schedule.batches[i].examples != schedule.batches[0].examples)
      return false;
  return true;
}

std::string schedule_digest(const BatchSchedule& schedule) {
  // FNV-1a over batch ids and payload bytes
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* data, std::size_t n) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  };
  for (const Batch& b : schedule.batches) {
    mix(&b.id, sizeof(b.id));
    for (const Example& ex : b.examples) {
      mix(ex.x.data(), ex.x.size() * sizeof(double));
      mix(&ex.label, sizeof(ex.label));
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

nlohmann::json ProblemDescriptor::to_json() const {
  return {{"name", name},
          {"dim", dim},
          {"num_examples", num_examples},
          {"seed", seed},
          {"variant", variant}};
}

Problem::Problem(ProblemDescriptor descriptor, std::vector<Example> pool,
                 LossFn loss, GradFn grad, HvpFn hvp)
    : descriptor_(std::move(descriptor)),
      pool_(std::move(pool)),
      loss_(std::move(loss)),
      grad_(std::move(grad)),
      hvp_(std::move(hvp)) {
  if (descriptor_.dim < 1)
    throw std::invalid_argument("Problem: dim must be >= 1");
  if (pool_.empty()) throw std::invalid_argument("Problem: empty example pool");
}

double Problem::example_loss(const ParamVector& params, const Example& ex) const {
  if (static_cast<int>(params.dim()) != dim())
    throw std::invalid_argument("Problem: params dim mismatch");
  return loss_(params, ex);
}

double Problem::batch_loss(const ParamVector& params, const Batch& batch) const {
  if (batch.examples.empty())
    throw std::invalid_argument("Problem: empty batch");
  double s = 0.0;
  for (const Example& ex : batch.examples) s += example_loss(params, ex);
  return s / static_cast<double>(batch.examples.size());
}

double Problem::schedule_loss(const ParamVector& params,
                              const BatchSchedule& schedule) const {
  if (schedule.batches.empty())
    throw std::invalid_argument("Problem: empty schedule");
  double s = 0.0;
  for (const Batch& b : schedule.batches) s += batch_loss(params, b);
  return s / static_cast<double>(schedule.batches.size());
}

ParamVector Problem::example_grad(const ParamVector& params,
                                  const Example& ex) const {
  if (!grad_) throw std::logic_error("Problem: no analytic gradient");
  return grad_(params, ex);
}

ParamVector Problem::example_hvp(const ParamVector& params, const Example& ex,
                                 const ParamVector& v) const {
  if (!hvp_) throw std::logic_error("Problem: no analytic hvp");
  return hvp_(params, ex, v);
}

Problem make_quadratic(int dim, int num_examples, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("make_quadratic: dim must be >= 1");
  if (num_examples < 1)
    throw std::invalid_argument("make_quadratic: num_examples must be >= 1");
  Rng rng(seed);
  std::vector<Example> pool;
  pool.reserve(num_examples);
  for (int i = 0; i < num_examples; ++i) {
    Matrix a = seeded_spd(static_cast<std::size_t>(dim), rng);
    ParamVector c = rng.uniform_vec(static_cast<std::size_t>(dim), -1.0, 1.0);
    pool.push_back(pack_quadratic_example(a, c));
  }
  ProblemDescriptor desc{"quadratic", dim, num_examples, seed, ""};
  return make_quadratic_from_pool(std::move(desc), std::move(pool));
}

Problem make_quadratic_explicit(std::vector<Matrix> matrices,
                                std::vector<ParamVector> centers) {
  if (matrices.empty() || matrices.size() != centers.size())
    throw std::invalid_argument("make_quadratic_explicit: bad inputs");
  const std::size_t dim = centers[0].dim();
  std::vector<Example> pool;
  for (std::size_t i = 0; i < matrices.size(); ++i) {
    if (matrices[i].rows != dim || matrices[i].cols != dim ||
        centers[i].dim() != dim)
      throw std::invalid_argument("make_quadratic_explicit: dim mismatch");
    pool.push_back(pack_quadratic_example(matrices[i], centers[i]));
  }
  ProblemDescriptor desc{"quadratic", static_cast<int>(dim),
                         static_cast<int>(matrices.size()), 0, "explicit"};
  return make_quadratic_from_pool(std::move(desc), std::move(pool));
}

Problem make_scalar_quadratic() {
  Matrix a(1, 1);
  a.at(0, 0) = 1.0;
  std::vector<Example> pool{pack_quadratic_example(a, ParamVector{0.0})};
  ProblemDescriptor desc{"scalar_quadratic", 1, 1, 0, "unit"};
  return make_quadratic_from_pool(std::move(desc), std::move(pool));
}

Problem make_logistic(int num_features, int num_examples, std::uint64_t seed) {
  if (num_features < 1)
    throw std::invalid_argument("make_logistic: num_features must be >= 1");
  if (num_examples < 1)
    throw std::invalid_argument("make_logistic: num_examples must be >= 1");
  Rng rng(seed);
  ParamVector w_true = rng.uniform_vec(num_features, -1.0, 1.0);
  std::vector<Example> pool;
  pool.reserve(num_examples);
  for (int i = 0; i < num_examples; ++i) {
    Example ex;
    ParamVector x = rng.uniform_vec(num_features, -1.0, 1.0);
    ex.x.assign(x.begin(), x.end());
    ex.label = (w_true.dot(x) >= 0.0) ? 1.0 : -1.0;
    pool.push_back(std::move(ex));
  }
  auto margin = [](const ParamVector& theta, const Example& ex) {
    double m = 0.0;
    for (std::size_t i = 0; i < theta.dim(); ++i) m += theta[i] * ex.x[i];
    return ex.label * m;
  };
  auto loss = [margin](const ParamVector& theta, const Example& ex) {
    return softplus(-margin(theta, ex));
  };
  auto grad = [margin](const ParamVector& theta, const Example& ex) {
    const double g = -ex.label * sigmoid(-margin(theta, ex));
    ParamVector out(theta.dim());
    for (std::size_t i = 0; i < theta.dim(); ++i) out[i] = g * ex.x[i];
    return out;
  };
  ProblemDescriptor desc{"logistic", num_features, num_examples, seed, ""};
  return Problem(std::move(desc), std::move(pool), loss, grad);
}

Batch full_batch(const Problem& problem, int id) {
  return Batch{id, problem.pool()};
}

BatchSchedule single_batch_schedule(const Problem& problem) {
  return BatchSchedule{{full_batch(problem)}};
}

BatchSchedule make_fullbatch_schedule(const Problem& problem, int n) {
  if (n < 1) throw std::invalid_argument("make_fullbatch_schedule: n >= 1");
  BatchSchedule s;
  for (int i = 0; i < n; ++i) s.batches.push_back(full_batch(problem, i));
  return s;
}

BatchSchedule make_schedule(const Problem& problem, int n, int batch_size,
                            std::uint64_t seed) {
  if (n < 1 || batch_size < 1)
    throw std::invalid_argument("make_schedule: n and batch_size must be >= 1");
  const std::vector<Example>& pool = problem.pool();
  Rng rng(seed);
  std::vector<std::size_t> order;
  auto reshuffle = [&] {
    order.resize(pool.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    // Fisher-Yates with the portable generator
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[rng.next_u64() % i]);
  };
  reshuffle();
  std::size_t cursor = 0;
  BatchSchedule s;
  for (int b = 0; b < n; ++b) {
    Batch batch;
    batch.id = b;
    for (int k = 0; k < batch_size; ++k) {
      if (cursor == order.size()) {
        reshuffle();
        cursor = 0;
      }
      batch.examples.push_back(pool[order[cursor++]]);
    }
    s.batches.push_back(std::move(batch));
  }
  return s;
}

BatchSchedule permuted(const BatchSchedule& schedule,
                       const std::vector<int>& order) {
  if (order.size() != schedule.batches.size())
    throw std::invalid_argument("permuted: order length mismatch");
  BatchSchedule out;
  for (int idx : order) {
    if (idx < 0 || idx >= static_cast<int>(schedule.batches.size()))
      throw std::invalid_argument("permuted: index out of range");
    out.batches.push_back(schedule.batches[static_cast<std::size_t>(idx)]);
  }
  return out;
}

}  // namespace bealab
