#pragma once

namespace ssda {

// Standard normal density phi(x).
double norm_pdf(double x);

// Standard normal CDF Phi(x), computed through erfc for tail accuracy.
double norm_cdf(double x);

// Inverse standard normal CDF. Acklam's rational approximation refined by
// one Halley step against the erfc-based CDF; absolute error in probability
// space is below 1e-12 over (1e-10, 1 - 1e-10).
// Throws std::domain_error for p <= 0 or p >= 1; Winsorize first.
double inv_norm_cdf(double p);

// phi(Phi^{-1}(u)) extended continuously: 0 for u <= 0 or u >= 1.
// Used by the legacy mu_minus estimator, whose boundary terms vanish when the
// composed ECDF hits 0 or 1.
double phi_of_quantile(double u);

}  // namespace ssda
