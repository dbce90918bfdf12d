#ifndef WAVEMEM_STATS_HPP
#define WAVEMEM_STATS_HPP

namespace wavemem {

/// Standard normal CDF.
double normal_cdf(double x);

/// Inverse standard normal CDF, |error| < 1e-13 after one Halley refinement.
double normal_quantile(double p);

} // namespace wavemem

#endif
