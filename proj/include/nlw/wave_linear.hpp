#pragma once

#include "nlw/grid.hpp"

#include <functional>
#include <optional>

namespace nlw {

/// Cauchy data at t=0 plus Dirichlet values on the lateral boundary.
struct InitialBoundaryData {
    SpatialField phi;
    SpatialField psi;
    LateralRecord f;

    static InitialBoundaryData zeros(const SpaceTimeGrid& g);
    /// Takes phi, psi and f from the traces of a closed-form solution.
    template <class U, class Ut>
    static InitialBoundaryData from_solution(const SpaceTimeGrid& g, U&& u, Ut&& ut);

    InitialBoundaryData scaled(double s) const;
};

/// alpha*d1 + beta*d2
InitialBoundaryData combine(double alpha, const InitialBoundaryData& d1, double beta,
                            const InitialBoundaryData& d2);

/// Throws InvalidArgument when shapes are wrong or f(0,.) differs from phi on
/// the boundary by more than tol (relative to the data scale), or when f is not
/// constant in time over the first `flat_levels` levels.
void check_data(const SpaceTimeGrid& g, const InitialBoundaryData& d, double tol = 1e-10,
                std::size_t flat_levels = 0);

/// Fills the source for level k. `u` holds the solution for levels 0..k;
/// `out` is a zeroed plane of nx*ny values.
using LevelSource = std::function<void(std::size_t k, const SpaceTimeScalarField& u, double* out)>;

/// Throws CflViolation unless dt satisfies the grid's safety margin and the
/// explicit potential bound dt^2 * max(a) < 2.
void check_stability(const SpaceTimeGrid& g, const SpatialField& a);

/// Leapfrog for u_tt - Lap u + a u = source with strong Dirichlet data.
SpaceTimeScalarField leapfrog(const SpaceTimeGrid& g, const SpatialField& a, const InitialBoundaryData& d,
                              const LevelSource& source);

SpaceTimeScalarField solve_linear_ibvp(const SpaceTimeGrid& g, const SpatialField& a,
                                       const InitialBoundaryData& d,
                                       const SpaceTimeScalarField* F = nullptr);

/// Solves backwards from zero final data: v_tt - Lap v + a v = F on (0,T),
/// v(T) = v_t(T) = 0, v = 0 on the lateral boundary.
SpaceTimeScalarField solve_backward_zero(const SpaceTimeGrid& g, const SpatialField& a,
                                         const SpaceTimeScalarField& F);

/// Level k -> level nt-1-k.
SpaceTimeScalarField reverse_time(const SpaceTimeScalarField& f);

/// Staggered discrete energy between levels k and k+1 (1 <= k <= nt-2).
double discrete_energy(const SpaceTimeScalarField& u, const SpatialField& a, std::size_t k);

/// dt * <F^k, (u^{k+1}-u^{k-1})/(2dt)>, the exact per-step energy change.
double discrete_work(const SpaceTimeScalarField& u, const SpaceTimeScalarField& F, std::size_t k);

template <class U, class Ut>
InitialBoundaryData InitialBoundaryData::from_solution(const SpaceTimeGrid& g, U&& u, Ut&& ut) {
    InitialBoundaryData d = zeros(g);
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i) {
            d.phi(j, i) = u(0.0, g.x(i), g.y(j));
            d.psi(j, i) = ut(0.0, g.x(i), g.y(j));
        }
    for (Side s : all_sides) {
        auto& face = d.f[s];
        for (std::size_t k = 0; k < g.nt(); ++k)
            for (std::size_t m = 0; m < face.n; ++m) {
                auto [j, i] = face_node(g, s, m);
                face(k, m) = u(g.t(k), g.x(i), g.y(j));
            }
    }
    return d;
}

} // namespace nlw
