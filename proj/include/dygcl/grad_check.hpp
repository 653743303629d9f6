#pragma once

#include <functional>
#include <map>
#include <string>

#include "dygcl/tape.hpp"

namespace dygcl {

struct GradCheckReport {
  double max_rel_err = 0.0;
  std::string worst_param;
  Eigen::Index worst_row = 0;
  Eigen::Index worst_col = 0;
  std::map<std::string, double> per_param;  // max relative error by parameter
};

// Builds the scalar loss on a fresh tape from the current parameter values.
using LossFn = std::function<Tensor(Tape&, ParamStore&)>;

// Central differences (f(x+eps) - f(x-eps)) / 2eps per coordinate against the
// tape gradient; relative error uses max(1, |analytic|, |numeric|). f must be
// deterministic.
GradCheckReport grad_check(const LossFn& f, ParamStore& params, double eps = 1e-5);

}  // namespace dygcl
