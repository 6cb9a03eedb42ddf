// Flat dense vectors and small row-major matrices. Everything here is
// dimension-checked and value-semantic; the rest of the library passes these
// around by const reference and never mutates shared state.
#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace bealab {

class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(std::size_t dim, double fill = 0.0) : v_(dim, fill) {}
  ParamVector(std::initializer_list<double> xs) : v_(xs) {}
  explicit ParamVector(std::vector<double> xs) : v_(std::move(xs)) {}

  std::size_t dim() const { return v_.size(); }
  double& operator[](std::size_t i) { return v_[i]; }
  double operator[](std::size_t i) const { return v_[i]; }
  const std::vector<double>& values() const { return v_; }

  auto begin() { return v_.begin(); }
  auto end() { return v_.end(); }
  auto begin() const { return v_.begin(); }
  auto end() const { return v_.end(); }

  bool all_finite() const {
    for (double x : v_)
      if (!std::isfinite(x)) return false;
    return true;
  }

  ParamVector& operator+=(const ParamVector& o) {
    check_dim(o, "+=");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
    return *this;
  }
  ParamVector& operator-=(const ParamVector& o) {
    check_dim(o, "-=");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
    return *this;
  }
  ParamVector& operator*=(double a) {
    for (double& x : v_) x *= a;
    return *this;
  }
  // this += a * x
  ParamVector& axpy(double a, const ParamVector& x) {
    check_dim(x, "axpy");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += a * x.v_[i];
    return *this;
  }

  double dot(const ParamVector& o) const {
    check_dim(o, "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < v_.size(); ++i) s += v_[i] * o.v_[i];
    return s;
  }
  double norm() const { return std::sqrt(dot(*this)); }

  bool operator==(const ParamVector& o) const { return v_ == o.v_; }

 private:
  void check_dim(const ParamVector& o, const char* op) const {
    if (v_.size() != o.v_.size())
      throw std::invalid_argument(std::string("ParamVector dim mismatch in ") +
                                  op + ": " + std::to_string(v_.size()) +
                                  " vs " + std::to_string(o.v_.size()));
  }
  std::vector<double> v_;
};

inline ParamVector operator+(ParamVector a, const ParamVector& b) { return a += b; }
inline ParamVector operator-(ParamVector a, const ParamVector& b) { return a -= b; }
inline ParamVector operator*(double a, ParamVector x) { return x *= a; }
inline ParamVector operator*(ParamVector x, double a) { return x *= a; }
inline ParamVector operator-(ParamVector x) { return x *= -1.0; }

// Stacks [a; b] into one vector; split is the inverse given a's dimension.
inline ParamVector stacked(const ParamVector& a, const ParamVector& b) {
  ParamVector out(a.dim() + b.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) out[i] = a[i];
  for (std::size_t i = 0; i < b.dim(); ++i) out[a.dim() + i] = b[i];
  return out;
}

struct Matrix {
  std::size_t rows = 0, cols = 0;
  std::vector<double> a;  // row-major

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), a(r * c, fill) {}

  double& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
  }

  ParamVector mul(const ParamVector& x) const {
    if (x.dim() != cols) throw std::invalid_argument("Matrix::mul dim mismatch");
    ParamVector y(rows);
    for (std::size_t i = 0; i < rows; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < cols; ++j) s += at(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }

  // transpose(this) * x
  ParamVector tmul(const ParamVector& x) const {
    if (x.dim() != rows) throw std::invalid_argument("Matrix::tmul dim mismatch");
    ParamVector y(cols);
    for (std::size_t j = 0; j < cols; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < rows; ++i) s += at(i, j) * x[i];
      y[j] = s;
    }
    return y;
  }
};

}  // namespace bealab
