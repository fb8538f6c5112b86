#pragma once

#include "nlw/coefficients.hpp"
#include "nlw/wave_linear.hpp"

#include <vector>

namespace nlw {

/// |q|^2 b + R(t,x,q) at every node. The principal part q is not included.
SpaceTimeVectorField flux_eval(const CoefficientSet& coeffs, const SpaceTimeVectorField& q);

enum class Scheme { Lagged, Picard };

Scheme parse_scheme(const std::string& s);
const char* scheme_name(Scheme s) noexcept;

struct NonlinearOptions {
    double eps_max = 0.1;
    /// Abort when max|u^k| exceeds this multiple of the initial/boundary data scale.
    double blowup_factor = 1e3;
    std::size_t max_iter = 30;
    double tol = 1e-13;
    /// Optional extra forcing added to the right-hand side (manufactured solutions).
    const SpaceTimeScalarField* extra_forcing = nullptr;
};

/// Leapfrog with the nonlinear source evaluated from levels k, k-1, k-2.
/// The data are scaled by eps before solving.
SpaceTimeScalarField solve_nonlinear_lagged(const SpaceTimeGrid& g, const CoefficientSet& coeffs,
                                            const InitialBoundaryData& data, double eps,
                                            const NonlinearOptions& opt = {});

struct PicardResult {
    SpaceTimeScalarField u;   ///< eps*(u1 + eps*(u2 + w))
    SpaceTimeScalarField u1;  ///< linear response to the data
    SpaceTimeScalarField u2;  ///< second-order response
    SpaceTimeScalarField w;   ///< scaled remainder, O(eps)
    std::vector<double> history;  ///< sup-in-time H1 distance between successive iterates
    std::size_t iterations = 0;
};

/// Picard iteration on the remainder w with u = eps*(u1 + eps*(u2 + w)).
/// The remainder's right-hand side is expanded so that no O(1) terms cancel:
///   L w = div[ b (2 eps q1.s + eps^2 |s|^2) + eps r (q1 + eps s)|q1 + eps s|^2 ],
/// with s = grad(u2 + w).
PicardResult picard_solve(const SpaceTimeGrid& g, const CoefficientSet& coeffs, const InitialBoundaryData& data,
                          double eps, const NonlinearOptions& opt = {});

/// Same with precomputed u1 and u2, for sweeps over eps.
PicardResult picard_solve(const SpaceTimeGrid& g, const CoefficientSet& coeffs, const SpaceTimeScalarField& u1,
                          const SpaceTimeScalarField& u2, double eps, const NonlinearOptions& opt = {});

SpaceTimeScalarField solve_nonlinear_picard(const SpaceTimeGrid& g, const CoefficientSet& coeffs,
                                            const InitialBoundaryData& data, double eps, std::size_t max_iter,
                                            double tol);

/// u2 solves the linear problem with zero data and source div(b |grad u1|^2).
SpaceTimeScalarField solve_second_order(const CoefficientSet& coeffs, const SpaceTimeScalarField& u1);

/// Dispatches on scheme; both return the full solution u.
SpaceTimeScalarField solve_nonlinear(Scheme scheme, const SpaceTimeGrid& g, const CoefficientSet& coeffs,
                                     const InitialBoundaryData& data, double eps, const NonlinearOptions& opt = {});

} // namespace nlw
