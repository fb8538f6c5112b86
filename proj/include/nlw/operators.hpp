#pragma once

#include "nlw/grid.hpp"

#include <cstddef>
#include <vector>

namespace nlw {

enum class Axis { T = 0, X = 1, Y = 2 };

/// Second-order derivative along one axis: centered inside, one-sided
/// three-point at both ends. Exact on quadratics.
SpaceTimeScalarField derivative(const SpaceTimeScalarField& f, Axis axis);

/// (d/dt, d/dx, d/dy) with the stencils of derivative().
SpaceTimeVectorField gradient_tx(const SpaceTimeScalarField& f);

/// d/dt V_t + d/dx V_x + d/dy V_y with the same stencils as gradient_tx.
SpaceTimeScalarField divergence_tx(const SpaceTimeVectorField& V);

/// Five-point Laplacian on the interior of one level; boundary entries of
/// out are left untouched.
void laplacian_interior(const SpaceTimeGrid& g, const double* u, double* out);

/// Compensated (Kahan-Babuska) summation helper.
class KahanSum {
public:
    void add(double x) noexcept;
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0, comp_ = 0;
};

/// Trapezoid weights for n points with spacing h.
std::vector<double> trapezoid_weights(std::size_t n, double h);

/// Tensor-product trapezoid over (t, x, y).
double integrate_qt(const SpaceTimeScalarField& f);
/// Trapezoid over Omega of one spatial field.
double integrate_omega(const SpaceTimeGrid& g, const SpatialField& f);
/// Trapezoid over the lateral boundary (0,T) x dOmega. Corners appear on two
/// faces with half weight each.
double integrate_lateral(const SpaceTimeGrid& g, const LateralRecord& r);

/// Samples f on one face for every time level.
FaceArray lateral_trace(const SpaceTimeScalarField& f, Side side);
/// Outward normal derivative on one face via one-sided differences. Order 1 is
/// (u_boundary - u_adjacent)/h, the conormal difference of the leapfrog scheme.
FaceArray neumann_trace(const SpaceTimeScalarField& f, Side side, int order = 2);

LateralRecord lateral_trace_all(const SpaceTimeScalarField& f);
LateralRecord neumann_trace_all(const SpaceTimeScalarField& f, int order = 2);

/// Samples each component of a vector field on a face and contracts it with
/// the outward normal: (0, nu) . V.
FaceArray normal_component(const SpaceTimeVectorField& V, Side side);

/// Discrete L2(Q_T) norm.
double l2_qt(const SpaceTimeScalarField& f);
/// max over time levels of sqrt(int_Omega f^2 + f_t^2 + |grad_x f|^2).
double sup_h1(const SpaceTimeScalarField& f);
/// Trilinear interpolation at (t, x, y). Outside the grid box the field is
/// taken as zero.
double interpolate(const SpaceTimeScalarField& f, double t, double x, double y);

/// Relative L2 distance ||a-b|| / ||b||, or the absolute distance when b is 0.
double relative_l2(const SpaceTimeScalarField& a, const SpaceTimeScalarField& b);

} // namespace nlw
