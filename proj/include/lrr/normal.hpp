#pragma once

namespace lrr {

// Standard normal density.
double norm_pdf(double x);

// Standard normal CDF, evaluated as 0.5*erfc(-x/sqrt(2)) with erfc from
// Cody's rational Chebyshev approximations (Math. Comp. 23, 1969, netlib
// specfun CALERF). Absolute error is below 1e-15, well inside the 1e-12
// contract checked by the tests.
double norm_cdf(double x);

// erf/erfc companions used by norm_cdf; exposed for tests.
double erf_cody(double x);
double erfc_cody(double x);

// Standard normal quantile, Wichura's PPND16 (algorithm AS 241).
// Requires 0 < p < 1.
double norm_quantile(double p);

}  // namespace lrr
