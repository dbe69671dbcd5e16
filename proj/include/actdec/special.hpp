#pragma once

namespace actdec {

// Regularized lower incomplete gamma P(a, x). Series expansion for
// x < a + 1, continued fraction otherwise; absolute accuracy ~1e-14.
double regularized_gamma_p(double a, double x);

}  // namespace actdec
