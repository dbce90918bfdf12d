#ifndef WAVEMEM_GENERATORS_HPP
#define WAVEMEM_GENERATORS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wavemem/transform.hpp"

namespace wavemem {

struct FgnModel {
    double H = 0.5;
    double sigma2 = 1.0;
};

struct FarimaModel {
    std::vector<double> ar; // phi_1..phi_p, X_t = sum phi_i X_{t-i} + ...
    double d = 0.0;
    std::vector<double> ma; // theta_1..theta_q
    double sigma2 = 1.0;
};

/// Spectral density |lambda|^{-D} (1 + |lambda|^{D'}).
struct PowerLawModel {
    double D = 0.0;
    double Dprime = 1.0;
};

/// Spectral density ||lambda| - pi/2|^{-1/2}.
struct P4Model {};

using SpectralModel = std::variant<FgnModel, FarimaModel, PowerLawModel, P4Model>;

/// Throws domain_error when parameters leave the model's validity range
/// (H in (0,1), |d| < 0.5, AR roots outside the unit disk, D < 1, D' > 0).
void validate_model(const SpectralModel& model);

/// True memory parameter D of the model (0 for P4).
double model_memory_parameter(const SpectralModel& model);

/// The smoothness exponent D' when defined (2 for fGn/FARIMA, the model's
/// own D' for the power law, absent for P4).
std::optional<double> model_dprime(const SpectralModel& model);

/// Short-range spectral factor at zero, f*(0).
double model_fstar0(const SpectralModel& model);

struct AutocovSequence {
    std::vector<double> r; // r(0..M-1)
    SpectralModel model;
};

AutocovSequence fgn_autocov(double H, std::size_t M, double sigma2 = 1.0);

/// p=q=0 uses the exact Gamma-ratio recurrence. Otherwise the fractional
/// core is convolved with the ARMA impulse-response autocorrelation, which
/// matches the spectral integral to the impulse-response truncation error.
AutocovSequence farima_autocov(const FarimaModel& model, std::size_t M);

/// Direct quadrature of r(k) = integral f(lambda) e^{ik lambda} d lambda
/// with graded panels at the origin singularity. Independent route used to
/// cross-check farima_autocov; cost grows with k.
double farima_spectral_autocov(const FarimaModel& model, long k);

AutocovSequence powerlaw_autocov(double D, double Dprime, std::size_t M);

AutocovSequence p4_autocov(std::size_t M);

/// Autocovariance for any model.
AutocovSequence model_autocov(const SpectralModel& model, std::size_t M);

/// Davies-Harte circulant embedding prepared once; sample() is cheap and
/// deterministic per seed. Embedding failures double the extension (the
/// model regenerates the autocovariance) up to 3 times.
class CirculantEmbedding {
public:
    CirculantEmbedding(AutocovSequence acov, std::size_t N);

    TimeSeries sample(std::uint64_t seed) const;

    std::size_t series_length() const noexcept { return N_; }
    std::size_t embedding_size() const noexcept { return eigenvalues_.size(); }

private:
    std::size_t N_;
    std::vector<double> eigenvalues_; // of the circulant, all >= 0
};

/// Exact stationary Gaussian sample of length N with covariance acov.r.
TimeSeries circulant_generate(const AutocovSequence& acov, std::size_t N,
                              std::uint64_t seed);

enum class InnovationKind { uniform, pareto_like, cauchy };

/// FARIMA(0,d,0) with non-Gaussian innovations: truncated MA(infinity)
/// filter of length min(N, 10^4) with an equally long burn-in.
TimeSeries nongaussian_farima(InnovationKind dist, double d, std::size_t N,
                              std::uint64_t seed);

/// Gaussian process with spectral density ||lambda| - pi/2|^{-1/2}.
TimeSeries p4_generate(std::size_t N, std::uint64_t seed);

} // namespace wavemem

#endif
