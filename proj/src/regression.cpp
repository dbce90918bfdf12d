#include "wavemem/regression.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "wavemem/errors.hpp"
#include "wavemem/stats.hpp"

namespace wavemem {

RegressionDesign RegressionDesign::from_multipliers(long base_scale,
                                                    std::vector<long> multipliers) {
    if (base_scale < 1)
        throw domain_error("RegressionDesign: base scale must be >= 1");
    if (multipliers.size() < 3)
        throw domain_error("RegressionDesign: need at least 3 scales");
    std::set<long> distinct(multipliers.begin(), multipliers.end());
    if (distinct.size() != multipliers.size())
        throw domain_error("RegressionDesign: multipliers must be distinct");
    for (long r : multipliers)
        if (r < 1) throw domain_error("RegressionDesign: multipliers must be >= 1");
    RegressionDesign design;
    design.base_scale = base_scale;
    design.multipliers = std::move(multipliers);
    design.scales.reserve(design.multipliers.size());
    for (long r : design.multipliers) design.scales.push_back(r * base_scale);
    return design;
}

RegressionDesign RegressionDesign::consecutive(long base_scale, std::size_t ell) {
    std::vector<long> multipliers(ell);
    for (std::size_t i = 0; i < ell; ++i) multipliers[i] = static_cast<long>(i + 1);
    return from_multipliers(base_scale, std::move(multipliers));
}

EstimateResult loglog_regress(const ScaleSpectrum& spec,
                              const RegressionDesign& design) {
    const std::size_t ell = design.ell();
    Eigen::MatrixXd A(ell, 2);
    Eigen::VectorXd y(ell);
    for (std::size_t i = 0; i < ell; ++i) {
        const long scale = design.scales[i];
        const ScaleEntry* entry = spec.find(scale);
        if (entry == nullptr)
            throw domain_error("loglog_regress: scale " + std::to_string(scale) +
                               " missing from spectrum");
        if (!(entry->variance > 0.0))
            throw zero_variance_error(
                "loglog_regress: zero sample variance at scale " +
                    std::to_string(scale),
                scale);
        A(i, 0) = std::log(static_cast<double>(scale));
        A(i, 1) = 1.0;
        y(i) = std::log(entry->variance);
    }
    // Distinct scales guarantee rank 2; guard anyway against log collisions.
    if (std::abs(A.col(0).maxCoeff() - A.col(0).minCoeff()) < 1e-12)
        throw singular_design_error("loglog_regress: design matrix is rank 1");
    const Eigen::Vector2d beta = A.householderQr().solve(y);
    EstimateResult result;
    result.D_hat = beta(0);
    result.K_hat = beta(1);
    result.base_scale = design.base_scale;
    result.ell_used = ell;
    result.residual_ss = (y - A * beta).squaredNorm();
    return result;
}

std::pair<double, double> confidence_interval(const EstimateResult& result,
                                              const CovarianceMatrix& cov,
                                              std::size_t N, double level) {
    if (!(level > 0.0 && level < 1.0))
        throw domain_error("confidence_interval: level must be in (0,1)");
    if (cov.ell() != result.ell_used)
        throw domain_error("confidence_interval: covariance is " +
                           std::to_string(cov.ell()) + "x" +
                           std::to_string(cov.ell()) + " but the design used " +
                           std::to_string(result.ell_used) + " scales");
    const double s2 = slope_variance(cov);
    const double z = normal_quantile(0.5 * (1.0 + level));
    const double half =
        z * std::sqrt(s2 * static_cast<double>(result.base_scale) /
                      static_cast<double>(N));
    return {result.D_hat - half, result.D_hat + half};
}

} // namespace wavemem
