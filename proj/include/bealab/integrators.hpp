// Fixed-step classic RK4, the continuous-time ground truth for the order
// checks. Substep counts are tied to the field's embedded learning rate so
// that integrator truncation error sits several orders below the h³ signals
// under test. Aborts with DivergenceError when the state norm passes 1e12.
#pragma once

#include <stdexcept>
#include <string>

#include "bealab/calculus.hpp"
#include "bealab/flows.hpp"
#include "bealab/linalg.hpp"

namespace bealab {

struct IntegratorConfig {
  int substeps_per_h = 64;

  void validate() const {
    if (substeps_per_h < 1)
      throw std::invalid_argument("IntegratorConfig: substeps_per_h >= 1");
  }
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, double at)
      : std::runtime_error(what), at_time(at) {}
  double at_time;
};

// RK4 from 0 to total_time with ceil(total_time / h_unit) * substeps_per_h
// equal steps, h_unit being the field's embedded h (total_time when h = 0).
// total_time = 0 returns the initial state bitwise.
ParamVector integrate(const VectorField& field, const ParamVector& initial,
                      double total_time, const IntegratorConfig& cfg = {});

// Same scheme on the stacked (phi, theta) system with simultaneous stages.
GamePoint integrate_pair(const GameFieldPair& pair, const GamePoint& start,
                         double total_time, const IntegratorConfig& cfg = {});

}  // namespace bealab
