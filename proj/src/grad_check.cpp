#include "hetrinet/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace hetrinet {

GradCheckReport finite_diff_check(const std::vector<Parameter*>& params,
                                  const std::function<double()>& loss,
                                  const std::function<void()>& compute_grads,
                                  double epsilon, double tolerance) {
  compute_grads();

  GradCheckReport report;
  report.epsilon = epsilon;
  report.tolerance = tolerance;

  for (Parameter* p : params) {
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      const real_t saved = p->value[i];
      p->value[i] = saved + static_cast<real_t>(epsilon);
      const double f_plus = loss();
      p->value[i] = saved - static_cast<real_t>(epsilon);
      const double f_minus = loss();
      p->value[i] = saved;

      const double numeric = (f_plus - f_minus) / (2.0 * epsilon);
      const double analytic = static_cast<double>(p->grad[i]);
      const double abs_err = std::abs(numeric - analytic);
      const double denom =
          std::max({std::abs(numeric), std::abs(analytic), 1e-3});
      const double rel_err = abs_err / denom;

      ++report.components;
      report.max_abs_error = std::max(report.max_abs_error, abs_err);
      if (rel_err > report.max_rel_error) {
        report.max_rel_error = rel_err;
        report.worst_component = p->name + "[" + std::to_string(i) + "]";
      }
    }
  }
  report.passed = report.max_rel_error < tolerance;
  return report;
}

}  // namespace hetrinet
