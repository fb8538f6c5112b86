#pragma once

#include "nlw/coefficients.hpp"
#include "nlw/wave_linear.hpp"

#include <array>

namespace nlw {

/// exp(1 - 1/(1 - s^2)) for |s| < 1, else 0. Equals 1 at s = 0.
double smooth_bump(double s) noexcept;

/// Parameters of a space-time bump: amplitude times a compact spatial bump
/// times a compact window in time.
struct BumpSpec {
    std::array<double, 3> amplitude{0.3, 0.2, -0.15};
    double cx = 0.5, cy = 0.5, radius = 0.4;
    double t_on = 0.25, t_off = 2.25;
};

/// Scalar bump value at (t, x, y) with unit amplitude.
double bump_value(const BumpSpec& s, double t, double x, double y) noexcept;

SpaceTimeVectorField bump_vector(const SpaceTimeGrid& g, const BumpSpec& s);
SpaceTimeScalarField bump_scalar(const SpaceTimeGrid& g, const BumpSpec& s, double amplitude);

/// 1 + 0.5 sin(pi x / Lx) sin(pi y / Ly).
SpatialField reference_potential(const SpaceTimeGrid& g);

/// Data battery entry: an interior initial bump plus boundary pulses that stay
/// zero for t < t_quiet. Different `variant` values give independent data.
struct DataSpec {
    double phi_amp = 0.05, phi_cx = 0.4, phi_cy = 0.55, phi_radius = 0.3;
    double psi_amp = 0.0;
    double f_amp = 0.03, f_freq = 1.0, t_quiet = 0.1, t_ramp = 0.6;
    int variant = 0;
};

InitialBoundaryData make_data(const SpaceTimeGrid& g, const DataSpec& s);

struct ScenarioSpec {
    std::size_t nx = 33, ny = 33, nt = 161;
    double Lx = 1, Ly = 1, T = 2.5, cfl_safety = 0.9;
    BumpSpec b;
    double r_amp = 0.0;   ///< 0 gives R = 0, otherwise cubic with this amplitude
    double validity_radius = 1e3;
    DataSpec data;
};

SpaceTimeGrid make_grid(const ScenarioSpec& s);
CoefficientSet make_coefficients(const SpaceTimeGrid& g, const ScenarioSpec& s);

} // namespace nlw
