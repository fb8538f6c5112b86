#pragma once

#include "nlw/grid.hpp"
#include "nlw/wave_linear.hpp"

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace nlw {

using Direction = std::array<double, 2>;

/// (cos angle, sin angle)
Direction unit_direction(double angle) noexcept;
/// Throws InvalidArgument unless |w| = 1 to 1e-12.
void require_unit(const Direction& w);

/// phi(z) = exp(1 - 1/(1 - |z-c|^2/radius^2)) inside the disc, 0 outside.
struct BumpProfile {
    double cx = 0.5, cy = 0.5, radius = 0.25;

    double value(double x, double y) const noexcept;
    std::array<double, 2> gradient(double x, double y) const noexcept;
    /// (xx, xy, yy)
    std::array<double, 3> hessian(double x, double y) const noexcept;
    /// Integral of phi^2 over the plane.
    double l2_squared() const noexcept;
};

/// Real exponential probe exp(sign*(s - s0)/h) * (phi(x + t w) + h R) with
/// s = t + x.w. s0 = center.w keeps the exponent centred on the bump's ray.
struct GOProbe {
    Direction omega{1.0, 0.0};
    double h = 0.1;
    BumpProfile profile;
    int sign = 1;
    double s0 = 0.0;
    SpaceTimeScalarField corrector;

    double exponent(double t, double x, double y) const noexcept;
    /// phi(x + t w)
    double envelope(double t, double x, double y) const noexcept;
    /// exp(-exponent) * grad_(t,x) u, built from the analytic envelope and a
    /// finite-difference gradient of the corrector. Bounded as h -> 0 except for
    /// the O(1/h) leading part, so products of a +/- pair never overflow.
    SpaceTimeVectorField reduced_gradient() const;
};

struct GOPair {
    SpaceTimeScalarField u_plus, u_minus;
    GOProbe plus, minus;
};

/// max |s - s0| / h over the grid.
double go_max_exponent(const SpaceTimeGrid& g, const Direction& omega, double h, const BumpProfile& p);

/// u_plus grows along the rays and is solved forward from zero data; u_minus is
/// solved backward from zero final data. Both satisfy the leapfrog equations
/// exactly on interior levels. Throws NumericalFailure if the exponent would
/// exceed `max_exponent`.
GOPair build_go_pair(const SpaceTimeGrid& g, const SpatialField& a, const Direction& omega, double h,
                     const BumpProfile& profile, double max_exponent = 700.0);

/// ||R||_L2 + ||h grad R||_L2
double go_corrector_bound(const GOProbe& p);

/// Leapfrog residual (u^{k+1} - 2u^k + u^{k-1})/dt^2 - Lap u^k + a u^k on interior
/// nodes of levels 1..nt-2, zero elsewhere.
SpaceTimeScalarField discrete_residual(const SpaceTimeScalarField& u, const SpatialField& a);

/// Initial and Dirichlet data for which leapfrog reproduces u on levels 0 and 1
/// and therefore everywhere when u solves the scheme.
InitialBoundaryData data_of(const SpaceTimeScalarField& u, const SpatialField& a);

using PotentialFn = std::function<double(double x, double y)>;

/// Bilinear interpolant of a inside Omega. Outside, the value at the nearest
/// boundary point blended into the mean boundary value over `halo`.
PotentialFn extend_potential(const SpaceTimeGrid& g, const SpatialField& a, double halo);

/// A_0..A_N on the grid and (box + a) A_k computed on the padded grid.
struct TransportAmplitudes {
    std::vector<SpaceTimeScalarField> amplitudes;
    std::vector<SpaceTimeScalarField> applied;
};

/// A_0 = 1, A_k(t,x) = -int_0^t ((box+a) A_{k-1})(tau, x + (t - tau) w) dtau.
/// The padded grid extends Omega + [0,T]w by `pad` cells on each side (0 picks
/// 2N+4). Throws InvalidArgument if the padding cannot hold the stencils.
TransportAmplitudes transport_solve(const SpaceTimeGrid& g, const PotentialFn& a, const Direction& omega, int N,
                                    std::size_t pad = 0);
TransportAmplitudes transport_solve(const SpaceTimeGrid& g, const SpatialField& a, const Direction& omega, int N,
                                    std::size_t pad = 0);

/// v = exp(i lambda s) sum_k A_k (2 i lambda)^{-k} + R, complex fields split in
/// real and imaginary parts.
struct WKBProbe {
    Direction omega{1.0, 0.0};
    double lambda = 10.0;
    int N = 1;
    TransportAmplitudes transport;
    std::vector<SpaceTimeVectorField> amplitude_gradients;
    SpaceTimeScalarField rem_re, rem_im;
    SpaceTimeVectorField rem_grad_re, rem_grad_im;
    SpaceTimeScalarField v_re, v_im;

    const SpaceTimeGrid& grid() const noexcept { return v_re.grid(); }
    double phase(double t, double x, double y) const noexcept {
        return lambda * (t + x * omega[0] + y * omega[1]);
    }
    /// (2 i lambda)^{-k}
    std::complex<double> coefficient(int k) const noexcept;
};

/// Throws InvalidArgument when lambda * max(dx,dy) > 0.5 or N is outside [1,4].
WKBProbe build_wkb(const SpaceTimeGrid& g, const SpatialField& a, const Direction& omega, double lambda, int N);

/// L2(Q_T) norm of (box + a) applied to the amplitude sum, evaluated as
/// exp(i lambda s) sum_k c_k (2 i lambda L A_k + (box+a) A_k) with L = d_t - w.grad.
double wkb_sum_residual(const WKBProbe& p);

/// grad_(t,x) v at a node, the exponential differentiated analytically.
std::array<std::complex<double>, 3> wkb_gradient(const WKBProbe& p, std::size_t k, std::size_t j, std::size_t i);

/// Rows grad_(t,x) v_j at (t, x, y); amplitudes and remainder interpolated.
std::array<std::array<std::complex<double>, 3>, 3> gradient_matrix(const std::vector<const WKBProbe*>& probes,
                                                                  double t, double x, double y);

/// det(gradient matrix) / lambda^3. Throws InvalidArgument for points outside
/// the grid or probes on different grids / frequencies.
std::complex<double> gradient_matrix_det(const std::vector<const WKBProbe*>& probes, double t, double x, double y);

/// (1,1)/sqrt2, e1, e2
std::array<Direction, 3> reference_directions() noexcept;

} // namespace nlw
