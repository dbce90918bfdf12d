#ifndef WAVEMEM_TRANSFORM_HPP
#define WAVEMEM_TRANSFORM_HPP

#include <cstddef>
#include <vector>

#include "wavemem/wavelet.hpp"

namespace wavemem {

/// Sampled path X_1..X_N. N >= 2, all values finite.
class TimeSeries {
public:
    explicit TimeSeries(std::vector<double> values);

    std::size_t length() const noexcept { return values_.size(); }
    const std::vector<double>& values() const noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

private:
    std::vector<double> values_;
};

struct ScaleEntry {
    long scale = 0;
    double variance = 0.0;
    std::size_t count = 0;
};

/// Per-scale sample variances of wavelet coefficients from one series.
struct ScaleSpectrum {
    std::vector<ScaleEntry> entries; // scales strictly increasing
    std::size_t source_length = 0;

    const ScaleEntry* find(long scale) const;
};

/// e(a,b) = a^{-1/2} sum_{k=1..a} psi(k/a) X_{k+ab}.
/// Requires a >= 1 and a(b+1) <= N.
double coefficient(const TimeSeries& x, const MotherWavelet& w, long a, long b);

struct ScaleVariance {
    double variance = 0.0;
    std::size_t count = 0;
};

/// T_N(a) over non-overlapping shifts b = 0..floor(N/a)-1.
/// Requires floor(N/a) >= 2.
ScaleVariance sample_variance(const TimeSeries& x, const MotherWavelet& w,
                              long a);

/// Batched sample_variance over strictly increasing scales. Scales may be
/// computed concurrently; output order always follows the input order.
ScaleSpectrum spectrum(const TimeSeries& x, const MotherWavelet& w,
                       const std::vector<long>& scales);

/// Second-order expansion of E e^2(a,0):
///   f*(0) (K_{psi,D} a^D + C_{D'} K_{psi,D-D'} a^{D-D'}).
/// Test oracle; not used by the estimation path.
double theoretical_variance(double fstar0, double D, double Dprime,
                            double C_Dprime, const MotherWavelet& w, long a);

} // namespace wavemem

#endif
