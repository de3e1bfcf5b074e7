// SPDX-License-Identifier: Apache-2.0
#include <algorithm>

#include "matgrad/gradient.hpp"

namespace matgrad {

SigmaGradient sigma_gradient_fd(const NetworkSpec& spec, const ForwardTrace& trace,
                                const WeightSet& w, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("sigma_gradient_fd: step must be positive");
  check_trace(trace, w);
  SigmaGradient out;
  for (std::size_t r = 1; r < spec.layers(); ++r) {
    const ColumnVector& s = trace.sigma(r);
    std::vector<double> grad(s.dim());
    for (std::size_t j = 0; j < s.dim(); ++j) {
      std::vector<double> e(s.data().begin(), s.data().end());
      e[j] = s[j] + h;
      const double plus = evaluate_suffix(spec, w, r, ColumnVector(e));
      e[j] = s[j] - h;
      const double minus = evaluate_suffix(spec, w, r, ColumnVector(e));
      grad[j] = (plus - minus) / (2.0 * h);
    }
    out.columns.emplace_back(std::move(grad));
  }
  return out;
}

IdentityReport check_proof_identities(const NetworkSpec& spec, const ForwardTrace& trace,
                                      const WeightSet& w, double h, Tolerance tol) {
  const std::size_t k = spec.layers();
  IdentityReport report;
  report.sigma_gradient = sigma_gradient_fd(spec, trace, w, h);
  const GradientSet analytic = grad_recursive(trace, w);

  const ColumnVector seed{1.0};
  auto grad_sigma = [&](std::size_t r) -> const ColumnVector& {
    return r == k ? seed : report.sigma_gradient.at(r);
  };

  for (std::size_t r = 1; r <= k; ++r) {
    const Matrix rhs = matmul(as_matrix(hadamard(grad_sigma(r), trace.sigma_prime(r))),
                              as_row(trace.sigma(r - 1)));
    const double err = max_scaled_error(analytic.layer(r), rhs, tol);
    report.weight_identity.push_back({r, err});
    report.max_weight_identity = std::max(report.max_weight_identity, err);
  }
  for (std::size_t r = 1; r < k; ++r) {
    const ColumnVector rhs =
        bullet(hadamard(grad_sigma(r + 1), trace.sigma_prime(r + 1)), transpose(w.layer(r + 1)));
    const double err = max_scaled_error(grad_sigma(r), rhs, tol);
    report.sigma_recurrence.push_back({r, err});
    report.max_sigma_recurrence = std::max(report.max_sigma_recurrence, err);
  }
  report.passed = report.max_weight_identity <= tol.rel && report.max_sigma_recurrence <= tol.rel;
  return report;
}

}  // namespace matgrad
