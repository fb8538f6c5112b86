#include "nlw/scenario.hpp"

#include <cmath>
#include <numbers>

namespace nlw {

double smooth_bump(double s) noexcept {
    double s2 = s * s;
    if (s2 >= 1) return 0.0;
    return std::exp(1 - 1 / (1 - s2));
}

namespace {

// C-infinity step: 0 for x <= 0, 1 for x >= 1.
double smooth_step(double x) noexcept {
    if (x <= 0) return 0.0;
    if (x >= 1) return 1.0;
    double a = std::exp(-1 / x), b = std::exp(-1 / (1 - x));
    return a / (a + b);
}

} // namespace

double bump_value(const BumpSpec& s, double t, double x, double y) noexcept {
    double r = std::hypot(x - s.cx, y - s.cy) / s.radius;
    double mid = 0.5 * (s.t_on + s.t_off), half = 0.5 * (s.t_off - s.t_on);
    return smooth_bump(r) * smooth_bump((t - mid) / half);
}

SpaceTimeVectorField bump_vector(const SpaceTimeGrid& g, const BumpSpec& s) {
    SpaceTimeVectorField b(g);
    for (std::size_t k = 0; k < g.nt(); ++k)
        for (std::size_t j = 0; j < g.ny(); ++j)
            for (std::size_t i = 0; i < g.nx(); ++i) {
                double v = bump_value(s, g.t(k), g.x(i), g.y(j));
                for (std::size_t d = 0; d < 3; ++d) b[d](k, j, i) = s.amplitude[d] * v;
            }
    return b;
}

SpaceTimeScalarField bump_scalar(const SpaceTimeGrid& g, const BumpSpec& s, double amplitude) {
    return SpaceTimeScalarField::sample(g, [&](double t, double x, double y) { return amplitude * bump_value(s, t, x, y); });
}

SpatialField reference_potential(const SpaceTimeGrid& g) {
    SpatialField a(g.nx(), g.ny());
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i)
            a(j, i) = 1 + 0.5 * std::sin(std::numbers::pi * g.x(i) / g.Lx()) * std::sin(std::numbers::pi * g.y(j) / g.Ly());
    return a;
}

InitialBoundaryData make_data(const SpaceTimeGrid& g, const DataSpec& s) {
    constexpr double pi = std::numbers::pi;
    const double v = s.variant;
    // Each variant shifts the initial bump and changes the boundary pattern.
    const double cx = s.phi_cx + 0.07 * std::sin(1.3 * v), cy = s.phi_cy + 0.07 * std::cos(0.9 * v);
    auto phi = [&](double x, double y) { return s.phi_amp * smooth_bump(std::hypot(x - cx, y - cy) / s.phi_radius); };
    auto pattern = [&](double t, double x, double y) {
        double ramp = smooth_step((t - s.t_quiet) / s.t_ramp);
        return s.f_amp * ramp *
               std::sin(pi * s.f_freq * (t - s.t_quiet) + 0.8 * v + 2 * x * std::cos(v) + 1.5 * y * std::sin(v + 0.4));
    };
    InitialBoundaryData d = InitialBoundaryData::zeros(g);
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i) {
            d.phi(j, i) = phi(g.x(i), g.y(j));
            d.psi(j, i) = s.psi_amp * phi(g.x(i), g.y(j));
        }
    for (Side side : all_sides) {
        auto& face = d.f[side];
        for (std::size_t k = 0; k < g.nt(); ++k)
            for (std::size_t m = 0; m < face.n; ++m) {
                auto [j, i] = face_node(g, side, m);
                face(k, m) = phi(g.x(i), g.y(j)) + pattern(g.t(k), g.x(i), g.y(j));
            }
    }
    return d;
}

SpaceTimeGrid make_grid(const ScenarioSpec& s) {
    return SpaceTimeGrid(s.nx, s.ny, s.nt, s.Lx, s.Ly, s.T, s.cfl_safety);
}

CoefficientSet make_coefficients(const SpaceTimeGrid& g, const ScenarioSpec& s) {
    CoefficientSet c{reference_potential(g), bump_vector(g, s.b), RemainderSpec::zero()};
    if (s.r_amp != 0) {
        BumpSpec rs = s.b;
        rs.radius = std::max(rs.radius, 0.45);
        c.remainder = RemainderSpec::cubic(bump_scalar(g, rs, s.r_amp), s.validity_radius);
    }
    return c;
}

} // namespace nlw
