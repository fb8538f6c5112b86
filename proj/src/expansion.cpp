#include "nlw/expansion.hpp"

#include "nlw/errors.hpp"
#include "nlw/field_io.hpp"
#include "nlw/operators.hpp"

#include <algorithm>
#include <cmath>

namespace nlw {

SlopeFit slope_fit(const std::vector<std::pair<double, double>>& pairs) {
    if (pairs.size() < 3) throw InvalidArgument("slope_fit needs at least 3 pairs");
    const double n = static_cast<double>(pairs.size());
    double sx = 0, sy = 0;
    for (auto [x, y] : pairs) {
        if (!(x > 0) || !(y > 0)) throw InvalidArgument("slope_fit needs positive values");
        sx += std::log(x);
        sy += std::log(y);
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (auto [x, y] : pairs) {
        double dx = std::log(x) - mx, dy = std::log(y) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0) throw InvalidArgument("slope_fit needs distinct abscissae");
    SlopeFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

void ExpansionReport::write_csv(const std::filesystem::path& path) const {
    CsvWriter w(path, {"eps", "norm1_L2", "norm2_L2", "norm1_H1", "norm2_H1"});
    for (const auto& r : rows) w.row({r.eps, r.norm1_l2, r.norm2_l2, r.norm1_h1, r.norm2_h1});
}

ExpansionReport epsilon_expand(const SpaceTimeGrid& g, const CoefficientSet& coeffs, const InitialBoundaryData& data,
                               const std::vector<double>& eps_list, const ExpansionOptions& opt) {
    if (eps_list.empty()) throw InvalidArgument("eps_list is empty");
    for (std::size_t n = 1; n < eps_list.size(); ++n)
        if (!(eps_list[n] < eps_list[n - 1])) throw InvalidArgument("eps_list must be strictly decreasing");
    for (double e : eps_list)
        if (!(e > 0) || e >= opt.solver.eps_max) throw InvalidArgument("every eps must lie in (0, eps_max)");

    const auto u1 = solve_linear_ibvp(g, coeffs.a, data);
    const auto u2 = solve_second_order(coeffs, u1);
    CoefficientSet linear = coeffs.scaled_b(0.0).with_remainder(RemainderSpec::zero());

    auto solve = [&](const CoefficientSet& c, double eps) {
        try {
            if (opt.scheme == Scheme::Picard) return picard_solve(g, c, u1, c.has_nonlinearity() ? u2 : SpaceTimeScalarField(g), eps, opt.solver).u;
            return solve_nonlinear_lagged(g, c, data, eps, opt.solver);
        } catch (const NumericalFailure& e) {
            throw NumericalFailure("eps=" + format_real(eps) + ": " + e.what(), e.step());
        } catch (const PicardFailure& e) {
            throw PicardFailure("eps=" + format_real(eps) + ": " + e.what(), e.history());
        }
    };

    ExpansionReport rep;
    for (double eps : eps_list) {
        ExpansionRow row;
        row.eps = eps;
        auto u = solve(coeffs, eps);
        auto r1 = u - eps * u1;
        auto r2 = r1 - (eps * eps) * u2;
        row.norm1_l2 = l2_qt(r1);
        row.norm2_l2 = l2_qt(r2);
        row.norm1_h1 = sup_h1(r1);
        row.norm2_h1 = sup_h1(r2);
        row.floor_l2 = l2_qt(solve(linear, eps) - eps * u1);
        row.used = row.norm2_l2 > opt.floor_factor * row.floor_l2;
        rep.rows.push_back(row);
    }
    std::vector<std::pair<double, double>> p1, p2;
    for (const auto& r : rep.rows) {
        if (r.norm1_l2 > 0) p1.emplace_back(r.eps, r.norm1_l2);
        if (r.used) p2.emplace_back(r.eps, r.norm2_l2);
    }
    rep.fitted = p2.size();
    if (p1.size() >= 3) rep.first_order = slope_fit(p1);
    if (p2.size() >= 3) rep.remainder = slope_fit(p2);
    return rep;
}

} // namespace nlw
