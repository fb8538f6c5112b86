#pragma once

#include "nlw/wave_nonlinear.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace nlw {

struct SlopeFit {
    double slope = 0, intercept = 0, r2 = 0;
};

/// Least-squares line through (log x, log y).
SlopeFit slope_fit(const std::vector<std::pair<double, double>>& pairs);

struct ExpansionRow {
    double eps = 0;
    double norm1_l2 = 0, norm2_l2 = 0;  ///< ||u - eps u1||, ||u - eps u1 - eps^2 u2|| in L2(Q_T)
    double norm1_h1 = 0, norm2_h1 = 0;  ///< same in the sup-in-time H1 norm
    double floor_l2 = 0;                ///< norm2_l2 of the same run with b = 0, R = 0
    bool used = true;                   ///< kept in the regression
};

struct ExpansionReport {
    std::vector<ExpansionRow> rows;  ///< sorted by decreasing eps
    SlopeFit first_order;            ///< fit of norm1_l2
    SlopeFit remainder;              ///< fit of norm2_l2 over rows above the floor
    std::size_t fitted = 0;

    void write_csv(const std::filesystem::path& path) const;
};

struct ExpansionOptions {
    Scheme scheme = Scheme::Picard;
    NonlinearOptions solver;
    /// Rows whose remainder is below floor_factor times the b=0 floor are not fitted.
    double floor_factor = 10.0;
};

ExpansionReport epsilon_expand(const SpaceTimeGrid& g, const CoefficientSet& coeffs, const InitialBoundaryData& data,
                               const std::vector<double>& eps_list, const ExpansionOptions& opt = {});

} // namespace nlw
