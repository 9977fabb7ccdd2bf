#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hetrinet/tape.hpp"

namespace hetrinet {

struct GradCheckReport {
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  std::string worst_component;
  std::size_t components = 0;
  double epsilon = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

/// Compares tape gradients against central finite differences
/// (f(x+eps) - f(x-eps)) / (2 eps), component by component.
///
/// `loss` evaluates the scalar objective from the parameters' current values
/// (forward only); `compute_grads` must zero and then fill every parameter's
/// .grad field. Both callables must be deterministic (dropout off, any
/// sampling frozen). The relative error denominator is floored at 1e-3 so
/// near-zero gradients are judged by absolute error.
GradCheckReport finite_diff_check(const std::vector<Parameter*>& params,
                                  const std::function<double()>& loss,
                                  const std::function<void()>& compute_grads,
                                  double epsilon, double tolerance);

}  // namespace hetrinet
