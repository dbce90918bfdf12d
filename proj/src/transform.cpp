#include "wavemem/transform.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wavemem/errors.hpp"
#include "wavemem/parallel.hpp"

namespace wavemem {

namespace {

// Neumaier compensated accumulator; coefficient sums can run to 10^4+ terms.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double value) {
        const double t = sum + value;
        if (std::abs(sum) >= std::abs(value))
            comp += (sum - t) + value;
        else
            comp += (value - t) + sum;
        sum = t;
    }
    double get() const { return sum + comp; }
};

std::vector<double> kernel_row(const MotherWavelet& w, long a) {
    std::vector<double> row(static_cast<std::size_t>(a));
    for (long k = 1; k <= a; ++k)
        row[static_cast<std::size_t>(k - 1)] =
            w(static_cast<double>(k) / static_cast<double>(a));
    return row;
}

ScaleVariance sample_variance_with_row(const TimeSeries& x,
                                       const std::vector<double>& row, long a) {
    const std::size_t count = x.length() / static_cast<std::size_t>(a);
    const double norm = 1.0 / std::sqrt(static_cast<double>(a));
    CompensatedSum total;
    for (std::size_t b = 0; b < count; ++b) {
        CompensatedSum coeff;
        const std::size_t offset = static_cast<std::size_t>(a) * b;
        for (std::size_t k = 0; k < static_cast<std::size_t>(a); ++k)
            coeff.add(row[k] * x[offset + k]);
        const double e = norm * coeff.get();
        total.add(e * e);
    }
    return {total.get() / static_cast<double>(count), count};
}

} // namespace

TimeSeries::TimeSeries(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2)
        throw domain_error("TimeSeries requires at least 2 values");
    for (double v : values_)
        if (!std::isfinite(v))
            throw domain_error("TimeSeries contains a non-finite value");
}

const ScaleEntry* ScaleSpectrum::find(long scale) const {
    for (const auto& entry : entries)
        if (entry.scale == scale) return &entry;
    return nullptr;
}

double coefficient(const TimeSeries& x, const MotherWavelet& w, long a, long b) {
    if (a < 1) throw domain_error("coefficient: scale must be >= 1");
    if (b < 0) throw domain_error("coefficient: shift must be >= 0");
    const long n = static_cast<long>(x.length());
    if (a * (b + 1) > n)
        throw insufficient_data("coefficient: window a(b+1) = " +
                                    std::to_string(a * (b + 1)) +
                                    " exceeds N = " + std::to_string(n),
                                a);
    CompensatedSum sum;
    for (long k = 1; k <= a; ++k)
        sum.add(w(static_cast<double>(k) / static_cast<double>(a)) *
                x[static_cast<std::size_t>(k + a * b - 1)]);
    return sum.get() / std::sqrt(static_cast<double>(a));
}

ScaleVariance sample_variance(const TimeSeries& x, const MotherWavelet& w,
                              long a) {
    if (a < 1) throw domain_error("sample_variance: scale must be >= 1");
    const std::size_t count = x.length() / static_cast<std::size_t>(a);
    if (count < 2)
        throw insufficient_data("sample_variance: scale " + std::to_string(a) +
                                    " leaves " + std::to_string(count) +
                                    " coefficient(s), need >= 2",
                                a);
    return sample_variance_with_row(x, kernel_row(w, a), a);
}

ScaleSpectrum spectrum(const TimeSeries& x, const MotherWavelet& w,
                       const std::vector<long>& scales) {
    for (std::size_t i = 1; i < scales.size(); ++i)
        if (scales[i] <= scales[i - 1])
            throw domain_error("spectrum: scales must be strictly increasing");
    ScaleSpectrum result;
    result.source_length = x.length();
    result.entries.resize(scales.size());
    parallel_for(scales.size(), [&](std::size_t i) {
        const long a = scales[i];
        const auto sv = sample_variance(x, w, a);
        result.entries[i] = ScaleEntry{a, sv.variance, sv.count};
    });
    return result;
}

double theoretical_variance(double fstar0, double D, double Dprime,
                            double C_Dprime, const MotherWavelet& w, long a) {
    if (!(D < 1.0)) throw domain_error("theoretical_variance: D must be < 1");
    if (!(Dprime > 0.0))
        throw domain_error("theoretical_variance: D' must be > 0");
    const double leading =
        k_integral(w, D) * std::pow(static_cast<double>(a), D);
    double correction = 0.0;
    if (C_Dprime != 0.0)
        correction = C_Dprime * k_integral(w, D - Dprime) *
                     std::pow(static_cast<double>(a), D - Dprime);
    return fstar0 * (leading + correction);
}

} // namespace wavemem
