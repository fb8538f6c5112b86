#include "nlw/wave_linear.hpp"

#include "nlw/errors.hpp"
#include "nlw/coefficients.hpp"
#include "nlw/operators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nlw {

InitialBoundaryData InitialBoundaryData::zeros(const SpaceTimeGrid& g) {
    return {SpatialField(g.nx(), g.ny()), SpatialField(g.nx(), g.ny()), LateralRecord::zeros(g)};
}

InitialBoundaryData InitialBoundaryData::scaled(double s) const {
    InitialBoundaryData d = *this;
    for (double& x : d.phi.v) x *= s;
    for (double& x : d.psi.v) x *= s;
    for (auto& face : d.f.faces)
        for (double& x : face.v) x *= s;
    return d;
}

InitialBoundaryData combine(double alpha, const InitialBoundaryData& d1, double beta,
                            const InitialBoundaryData& d2) {
    if (d1.phi.v.size() != d2.phi.v.size()) throw GridMismatch("combine: data shapes differ");
    InitialBoundaryData d = d1;
    for (std::size_t n = 0; n < d.phi.v.size(); ++n) {
        d.phi.v[n] = alpha * d1.phi.v[n] + beta * d2.phi.v[n];
        d.psi.v[n] = alpha * d1.psi.v[n] + beta * d2.psi.v[n];
    }
    for (std::size_t s = 0; s < 4; ++s) {
        if (d1.f.faces[s].v.size() != d2.f.faces[s].v.size()) throw GridMismatch("combine: face shapes differ");
        for (std::size_t n = 0; n < d.f.faces[s].v.size(); ++n)
            d.f.faces[s].v[n] = alpha * d1.f.faces[s].v[n] + beta * d2.f.faces[s].v[n];
    }
    return d;
}

void check_data(const SpaceTimeGrid& g, const InitialBoundaryData& d, double tol, std::size_t flat_levels) {
    if (d.phi.nx != g.nx() || d.phi.ny != g.ny() || d.psi.nx != g.nx() || d.psi.ny != g.ny())
        throw GridMismatch("initial data shape does not match grid");
    double scale = 1.0;
    for (Side s : all_sides) {
        const auto& f = d.f[s];
        if (f.nt != g.nt() || f.n != face_length(g, s) || f.v.size() != f.nt * f.n)
            throw GridMismatch("boundary record shape does not match grid on " + std::string(side_name(s)));
        for (double x : f.v) scale = std::max(scale, std::abs(x));
    }
    scale = std::max(scale, d.phi.max_abs());
    for (Side s : all_sides) {
        const auto& f = d.f[s];
        for (std::size_t m = 0; m < f.n; ++m) {
            auto [j, i] = face_node(g, s, m);
            if (std::abs(f(0, m) - d.phi(j, i)) > tol * scale)
                throw InvalidArgument("incompatible data: boundary value at t=0 differs from phi on " +
                                      std::string(side_name(s)));
            for (std::size_t k = 1; k < std::min(flat_levels, g.nt()); ++k)
                if (std::abs(f(k, m) - f(0, m)) > tol * scale)
                    throw InvalidArgument("boundary data is not flat near t=0 on " + std::string(side_name(s)));
        }
    }
}

void check_stability(const SpaceTimeGrid& g, const SpatialField& a) {
    g.require_cfl();
    double amax = std::max(0.0, max_value(a));
    double dt2 = g.dt() * g.dt();
    if (!(dt2 * amax < 2.0)) {
        std::ostringstream os;
        os << "dt^2*max(a)=" << dt2 * amax << " must stay below 2";
        throw CflViolation(os.str());
    }
    double spectral = dt2 * (4 / (g.dx() * g.dx()) + 4 / (g.dy() * g.dy()) + amax);
    if (!(spectral < 4.0)) {
        std::ostringstream os;
        os << "dt^2*(4/dx^2+4/dy^2+max a)=" << spectral << " must stay below 4";
        throw CflViolation(os.str());
    }
}

namespace {

void impose_boundary(const SpaceTimeGrid& g, const LateralRecord& f, std::size_t k, double* u) {
    for (Side s : all_sides) {
        const auto& face = f[s];
        for (std::size_t m = 0; m < face.n; ++m) {
            auto [j, i] = face_node(g, s, m);
            u[j * g.nx() + i] = face(k, m);
        }
    }
}

void require_finite(const double* u, std::size_t n, std::size_t k) {
    for (std::size_t p = 0; p < n; ++p)
        if (!std::isfinite(u[p])) throw NumericalFailure("non-finite value at time step " + std::to_string(k), k);
}

} // namespace

SpaceTimeScalarField leapfrog(const SpaceTimeGrid& g, const SpatialField& a, const InitialBoundaryData& d,
                              const LevelSource& source) {
    if (g.nt() < 2) throw GridTooSmall("leapfrog needs at least 2 time levels");
    if (a.nx != g.nx() || a.ny != g.ny()) throw GridMismatch("potential shape does not match grid");
    check_data(g, d, 1e-9);
    check_stability(g, a);

    const std::size_t P = g.plane(), nx = g.nx(), ny = g.ny();
    const double dt2 = g.dt() * g.dt();
    SpaceTimeScalarField u(g);
    std::vector<double> src(P), lap(P, 0.0);

    std::copy(d.phi.v.begin(), d.phi.v.end(), u.level(0));
    impose_boundary(g, d.f, 0, u.level(0));

    auto fill_source = [&](std::size_t k) {
        std::fill(src.begin(), src.end(), 0.0);
        if (source) source(k, u, src.data());
    };

    fill_source(0);
    {
        const double* u0 = u.level(0);
        double* u1 = u.level(1);
        laplacian_interior(g, u0, lap.data());
        for (std::size_t j = 1; j + 1 < ny; ++j)
            for (std::size_t i = 1; i + 1 < nx; ++i) {
                std::size_t p = j * nx + i;
                u1[p] = u0[p] + g.dt() * d.psi.v[p] + 0.5 * dt2 * (lap[p] - a.v[p] * u0[p] + src[p]);
            }
        impose_boundary(g, d.f, 1, u1);
        require_finite(u1, P, 1);
    }

    for (std::size_t k = 1; k + 1 < g.nt(); ++k) {
        fill_source(k);
        const double* um = u.level(k - 1);
        const double* uk = u.level(k);
        double* up = u.level(k + 1);
        laplacian_interior(g, uk, lap.data());
        for (std::size_t j = 1; j + 1 < ny; ++j)
            for (std::size_t i = 1; i + 1 < nx; ++i) {
                std::size_t p = j * nx + i;
                up[p] = 2 * uk[p] - um[p] + dt2 * (lap[p] - a.v[p] * uk[p] + src[p]);
            }
        impose_boundary(g, d.f, k + 1, up);
        require_finite(up, P, k + 1);
    }
    return u;
}

SpaceTimeScalarField solve_linear_ibvp(const SpaceTimeGrid& g, const SpatialField& a,
                                       const InitialBoundaryData& d, const SpaceTimeScalarField* F) {
    if (!F) return leapfrog(g, a, d, {});
    require_same_grid(F->grid(), g, "solve_linear_ibvp source");
    return leapfrog(g, a, d, [F, &g](std::size_t k, const SpaceTimeScalarField&, double* out) {
        std::copy(F->level(k), F->level(k) + g.plane(), out);
    });
}

SpaceTimeScalarField reverse_time(const SpaceTimeScalarField& f) {
    const auto& g = f.grid();
    SpaceTimeScalarField out(g);
    for (std::size_t k = 0; k < g.nt(); ++k)
        std::copy(f.level(g.nt() - 1 - k), f.level(g.nt() - 1 - k) + g.plane(), out.level(k));
    return out;
}

SpaceTimeScalarField solve_backward_zero(const SpaceTimeGrid& g, const SpatialField& a,
                                         const SpaceTimeScalarField& F) {
    auto Fr = reverse_time(F);
    return reverse_time(solve_linear_ibvp(g, a, InitialBoundaryData::zeros(g), &Fr));
}

double discrete_energy(const SpaceTimeScalarField& u, const SpatialField& a, std::size_t k) {
    const auto& g = u.grid();
    if (k < 1 || k + 2 > g.nt())
        throw InvalidArgument("energy index " + std::to_string(k) + " outside [1, nt-2]");
    const std::size_t nx = g.nx(), ny = g.ny();
    const double* u0 = u.level(k);
    const double* u1 = u.level(k + 1);
    const double w = g.dx() * g.dy();
    KahanSum kin, pot, grad;
    for (std::size_t j = 1; j + 1 < ny; ++j)
        for (std::size_t i = 1; i + 1 < nx; ++i) {
            std::size_t p = j * nx + i;
            double v = (u1[p] - u0[p]) / g.dt();
            kin.add(v * v);
            pot.add(a.v[p] * u0[p] * u1[p]);
        }
    // Edge differences matching the five-point Laplacian on interior nodes.
    for (std::size_t j = 1; j + 1 < ny; ++j)
        for (std::size_t i = 0; i + 1 < nx; ++i) {
            std::size_t p = j * nx + i;
            grad.add((u0[p + 1] - u0[p]) * (u1[p + 1] - u1[p]) / (g.dx() * g.dx()));
        }
    for (std::size_t j = 0; j + 1 < ny; ++j)
        for (std::size_t i = 1; i + 1 < nx; ++i) {
            std::size_t p = j * nx + i;
            grad.add((u0[p + nx] - u0[p]) * (u1[p + nx] - u1[p]) / (g.dy() * g.dy()));
        }
    return 0.5 * w * (kin.value() + grad.value() + pot.value());
}

double discrete_work(const SpaceTimeScalarField& u, const SpaceTimeScalarField& F, std::size_t k) {
    const auto& g = u.grid();
    require_same_grid(g, F.grid(), "discrete_work");
    if (k < 1 || k + 2 > g.nt()) throw InvalidArgument("work index outside [1, nt-2]");
    const std::size_t nx = g.nx(), ny = g.ny();
    KahanSum s;
    for (std::size_t j = 1; j + 1 < ny; ++j)
        for (std::size_t i = 1; i + 1 < nx; ++i)
            s.add(F(k, j, i) * (u(k + 1, j, i) - u(k - 1, j, i)) * 0.5);
    return s.value() * g.dx() * g.dy();
}

} // namespace nlw
