#ifndef WAVEMEM_BENCH_HPP
#define WAVEMEM_BENCH_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wavemem/adaptive.hpp"
#include "wavemem/generators.hpp"

namespace wavemem {

/// A benchmark process family; D is injected per run.
struct ProcessSpec {
    enum class Family { fgn, farima, powerlaw, p1, p2, p3, p4 };
    Family family = Family::fgn;
    std::vector<double> ar; // farima
    std::vector<double> ma;
    double dprime = 1.0; // powerlaw

    std::string label() const;
    bool gaussian() const;
    /// True D' when defined (absent for P4).
    std::optional<double> dprime_true() const;
    /// Effective memory parameter for a requested D (P4 pins D = 0).
    double effective_d(double requested) const;
};

ProcessSpec process_by_name(const std::string& name);

struct EllSpec {
    std::size_t ell1 = 15;
    Ell2Mode mode = Ell2Mode::fixed;
    std::size_t ell2 = 0; // fixed mode; 0 means ell1
    std::string label() const;
};

struct BenchConfig {
    std::vector<ProcessSpec> processes;
    std::vector<double> D_values;
    std::vector<std::size_t> N_values;
    std::vector<EllSpec> ell_specs;
    std::size_t replications = 50;
    std::uint64_t master_seed = 1;
    std::string wavelet = "lm";
    std::size_t threads = 0; // 0 = default
};

struct BenchRow {
    std::string process;
    std::optional<double> D; // absent on D-averaged rows
    std::size_t N = 0;
    std::string ell_label;
    std::size_t replications = 0;
    std::size_t failures = 0;
    bool valid = true; // false when > 20% of replications failed
    double rmse_d_hat_hat = 0.0;
    double rmse_d_tilde = 0.0;
    std::optional<double> rmse_alpha_hat;
    std::optional<double> rmse_alpha_tilde;
    double mean_d_hat_hat = 0.0;
    double sd_d_hat_hat = 0.0;
    double mean_d_tilde = 0.0;
    double sd_d_tilde = 0.0;
    std::optional<double> cvm_w; // normality of standardized D_tilde draws
};

struct BenchReport {
    std::string wavelet;
    std::uint64_t master_seed = 0;
    std::size_t replications = 0;
    std::vector<BenchRow> rows;     // per (process, D, N, ell)
    std::vector<BenchRow> averaged; // per (process, N, ell), sqrt-MSE averaged over D
};

/// Estimator slot; the default runs adaptive_estimate. The truth parameter
/// lets harness self-tests plug the target value straight through.
using EstimatorFn = std::function<AdaptiveResult(
    const TimeSeries& x, const MotherWavelet& w, const AdaptiveOptions& opts,
    double truth_d)>;

/// Seeded Monte Carlo over the config grid. Replications run in parallel
/// with per-replication derived streams; aggregation is in fixed replication
/// order, so the report does not depend on the worker count.
BenchReport run_bench(const BenchConfig& cfg, const EstimatorFn& estimator = {});

struct NormalitySummary {
    double W = 0.0;
    double mean = 0.0;
    double stddev = 0.0;
};

/// Cramer-von Mises statistic of the standardized draws:
/// W = 1/(12n) + sum_i (Phi(z_(i)) - (2i-1)/(2n))^2. Requires >= 20 draws
/// with nonzero variance.
NormalitySummary normality_summary(const std::vector<double>& draws);

std::string report_to_json(const BenchReport& report);
std::string report_to_text(const BenchReport& report);

struct LogLogRow {
    long scale = 0;
    double log_scale = 0.0;
    std::optional<double> log_variance; // absent on zero-variance scales
    std::size_t count = 0;
    std::string note;
};

struct LogLogTable {
    std::vector<LogLogRow> rows;
    long a_hat = 0;
    long a_tilde = 0;
    double slope = 0.0;     // equals the reported D_hat_hat
    double intercept = 0.0; // K_hat of the fit at a_hat
};

/// (log a, log T_N(a)) over log-spaced feasible scales, with the selected
/// scale markers and fitted line. Plot-ready; the CLI serializes it.
LogLogTable loglog_dump(const TimeSeries& x, const MotherWavelet& w,
                        const AlphaGrid& grid,
                        const AdaptiveOptions& opts = {});

} // namespace wavemem

#endif
