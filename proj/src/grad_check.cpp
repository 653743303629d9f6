#include "dygcl/grad_check.hpp"

#include <cmath>
#include <map>

namespace dygcl {

GradCheckReport grad_check(const LossFn& f, ParamStore& params, double eps) {
  params.zero_grad();
  {
    Tape tape;
    Tensor loss = f(tape, params);
    tape.backward(loss);
  }
  std::map<std::string, Mat> analytic;
  for (const auto& name : params.names()) analytic[name] = params.grad(name);

  const auto eval = [&]() {
    Tape tape;
    return f(tape, params).scalar();
  };

  GradCheckReport report;
  for (const auto& name : params.names()) {
    Mat& v = params.value(name);
    const Mat& a = analytic[name];
    double param_worst = 0.0;
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      for (Eigen::Index j = 0; j < v.cols(); ++j) {
        const double orig = v(i, j);
        v(i, j) = orig + eps;
        const double up = eval();
        v(i, j) = orig - eps;
        const double down = eval();
        v(i, j) = orig;
        const double numeric = (up - down) / (2.0 * eps);
        const double denom = std::max({1.0, std::abs(a(i, j)), std::abs(numeric)});
        const double rel = std::abs(a(i, j) - numeric) / denom;
        param_worst = std::max(param_worst, rel);
        if (rel > report.max_rel_err) {
          report.max_rel_err = rel;
          report.worst_param = name;
          report.worst_row = i;
          report.worst_col = j;
        }
      }
    }
    report.per_param[name] = param_worst;
  }
  params.zero_grad();
  return report;
}

}  // namespace dygcl
