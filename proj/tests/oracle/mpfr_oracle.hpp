#pragma once

// Test-only high-precision reference for the normal special functions,
// evaluated with MPFR at 256 bits through the direct erfc route. Independent
// of the shipped implementation, which switches between erfc and an
// asymptotic series.

namespace onebit::testing {

double ref_log_norm_cdf(double u);
double ref_inverse_mills(double u);

}  // namespace onebit::testing
