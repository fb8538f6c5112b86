#include "nlw/wave_nonlinear.hpp"

#include "nlw/errors.hpp"
#include "nlw/operators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nlw {

namespace {

struct PointFlux {
    const CoefficientSet& c;
    bool cubic;
    double radius;

    explicit PointFlux(const CoefficientSet& cs)
        : c(cs), cubic(cs.remainder.active()), radius(cs.remainder.validity_radius) {}

    // n = flat index into the space-time arrays.
    void operator()(std::size_t n, const double q[3], double out[3]) const {
        const double q2 = q[0] * q[0] + q[1] * q[1] + q[2] * q[2];
        for (std::size_t d = 0; d < 3; ++d) out[d] = q2 * c.b[d].values()[n];
        if (cubic) {
            if (std::sqrt(q2) > radius) {
                const auto& g = c.grid();
                std::size_t k = n / g.plane(), j = (n % g.plane()) / g.nx(), i = n % g.nx();
                std::ostringstream os;
                os << "|q|=" << std::sqrt(q2) << " exceeds the remainder validity radius " << radius
                   << " at (k,j,i)=(" << k << "," << j << "," << i << ")";
                throw ValidityRadiusExceeded(os.str(), k, j, i);
            }
            const double r = c.remainder.r->values()[n] * q2;
            for (std::size_t d = 0; d < 3; ++d) out[d] += r * q[d];
        }
    }
};

double data_scale(const InitialBoundaryData& d) {
    double s = std::max(d.phi.max_abs(), d.psi.max_abs());
    for (const auto& f : d.f.faces)
        for (double x : f.v) s = std::max(s, std::abs(x));
    return s;
}

void check_eps(double eps, const NonlinearOptions& opt) {
    if (!(eps >= 0) || eps > opt.eps_max) {
        std::ostringstream os;
        os << "eps=" << eps << " outside [0, eps_max=" << opt.eps_max << "]";
        throw InvalidArgument(os.str());
    }
}

} // namespace

Scheme parse_scheme(const std::string& s) {
    if (s == "lagged") return Scheme::Lagged;
    if (s == "picard") return Scheme::Picard;
    throw InvalidArgument("unknown scheme '" + s + "' (expected lagged or picard)");
}

const char* scheme_name(Scheme s) noexcept { return s == Scheme::Lagged ? "lagged" : "picard"; }

SpaceTimeVectorField flux_eval(const CoefficientSet& coeffs, const SpaceTimeVectorField& q) {
    require_same_grid(coeffs.grid(), q.grid(), "flux_eval");
    SpaceTimeVectorField out(q.grid());
    PointFlux flux(coeffs);
    const std::size_t N = q.grid().size();
    for (std::size_t n = 0; n < N; ++n) {
        double qq[3] = {q[0].values()[n], q[1].values()[n], q[2].values()[n]}, o[3];
        flux(n, qq, o);
        for (std::size_t d = 0; d < 3; ++d) out[d].values()[n] = o[d];
    }
    return out;
}

SpaceTimeScalarField solve_nonlinear_lagged(const SpaceTimeGrid& g, const CoefficientSet& coeffs,
                                            const InitialBoundaryData& data, double eps,
                                            const NonlinearOptions& opt) {
    check_eps(eps, opt);
    require_same_grid(coeffs.grid(), g, "solve_nonlinear_lagged");
    coeffs.validate(2);
    if (opt.extra_forcing) require_same_grid(opt.extra_forcing->grid(), g, "extra forcing");
    const auto scaled = data.scaled(eps);
    const double ref = data_scale(scaled);

    const std::size_t P = g.plane(), nx = g.nx(), ny = g.ny();
    const double dt = g.dt(), dx = g.dx(), dy = g.dy();
    PointFlux flux(coeffs);
    const bool nonlinear = coeffs.has_nonlinearity();
    // Time component of the flux at levels k-2, k-1, k.
    std::vector<double> Nt_m2(P, 0.0), Nt_m1(P, 0.0), Nt(P), Nx(P), Ny(P);

    auto source = [&](std::size_t k, const SpaceTimeScalarField& u, double* out) {
        if (k >= 1 && ref > 0) {
            const double* uk = u.level(k);
            double m = 0;
            for (std::size_t p = 0; p < P; ++p) m = std::max(m, std::abs(uk[p]));
            if (m > opt.blowup_factor * ref)
                throw NumericalFailure("solution grew by more than " + std::to_string(opt.blowup_factor) +
                                       " at step " + std::to_string(k), k);
        }
        if (opt.extra_forcing) std::copy(opt.extra_forcing->level(k), opt.extra_forcing->level(k) + P, out);
        if (!nonlinear || k < 2) return;
        const double* u0 = u.level(k);
        const double* u1 = u.level(k - 1);
        const double* u2 = u.level(k - 2);
        for (std::size_t j = 0; j < ny; ++j)
            for (std::size_t i = 0; i < nx; ++i) {
                std::size_t p = j * nx + i;
                double q[3];
                q[0] = (3 * u0[p] - 4 * u1[p] + u2[p]) / (2 * dt);
                if (i == 0) q[1] = (-3 * u0[p] + 4 * u0[p + 1] - u0[p + 2]) / (2 * dx);
                else if (i + 1 == nx) q[1] = (3 * u0[p] - 4 * u0[p - 1] + u0[p - 2]) / (2 * dx);
                else q[1] = (u0[p + 1] - u0[p - 1]) / (2 * dx);
                if (j == 0) q[2] = (-3 * u0[p] + 4 * u0[p + nx] - u0[p + 2 * nx]) / (2 * dy);
                else if (j + 1 == ny) q[2] = (3 * u0[p] - 4 * u0[p - nx] + u0[p - 2 * nx]) / (2 * dy);
                else q[2] = (u0[p + nx] - u0[p - nx]) / (2 * dy);
                double o[3];
                flux(k * P + p, q, o);
                Nt[p] = o[0];
                Nx[p] = o[1];
                Ny[p] = o[2];
            }
        for (std::size_t j = 1; j + 1 < ny; ++j)
            for (std::size_t i = 1; i + 1 < nx; ++i) {
                std::size_t p = j * nx + i;
                out[p] += (3 * Nt[p] - 4 * Nt_m1[p] + Nt_m2[p]) / (2 * dt) + (Nx[p + 1] - Nx[p - 1]) / (2 * dx) +
                          (Ny[p + nx] - Ny[p - nx]) / (2 * dy);
            }
        std::swap(Nt_m2, Nt_m1);
        std::swap(Nt_m1, Nt);
    };
    return leapfrog(g, coeffs.a, scaled, source);
}

SpaceTimeScalarField solve_second_order(const CoefficientSet& coeffs, const SpaceTimeScalarField& u1) {
    const auto& g = u1.grid();
    require_same_grid(coeffs.grid(), g, "solve_second_order");
    auto q1 = gradient_tx(u1);
    auto q1sq = dot(q1, q1);
    SpaceTimeVectorField P(hadamard(q1sq, coeffs.b[0]), hadamard(q1sq, coeffs.b[1]), hadamard(q1sq, coeffs.b[2]));
    auto F = divergence_tx(P);
    return solve_linear_ibvp(g, coeffs.a, InitialBoundaryData::zeros(g), &F);
}

PicardResult picard_solve(const SpaceTimeGrid& g, const CoefficientSet& coeffs, const SpaceTimeScalarField& u1,
                          const SpaceTimeScalarField& u2, double eps, const NonlinearOptions& opt) {
    check_eps(eps, opt);
    require_same_grid(coeffs.grid(), g, "picard_solve");
    require_same_grid(u1.grid(), g, "picard_solve u1");
    require_same_grid(u2.grid(), g, "picard_solve u2");
    if (opt.max_iter < 1) throw InvalidArgument("max_iter must be at least 1");
    if (!(opt.tol > 0)) throw InvalidArgument("tol must be positive");

    const auto q1 = gradient_tx(u1);
    const auto q2 = gradient_tx(u2);
    const bool cubic = coeffs.remainder.active();
    const std::size_t N = g.size();

    PicardResult res;
    res.u1 = u1;
    res.u2 = u2;
    SpaceTimeScalarField w(g);
    for (std::size_t it = 1; it <= opt.max_iter; ++it) {
        auto qw = gradient_tx(w);
        SpaceTimeVectorField G(g);
        for (std::size_t n = 0; n < N; ++n) {
            double s[3], v[3], q1s = 0, ss = 0, vv = 0;
            for (std::size_t d = 0; d < 3; ++d) {
                s[d] = q2[d].values()[n] + qw[d].values()[n];
                v[d] = q1[d].values()[n] + eps * s[d];
                q1s += q1[d].values()[n] * s[d];
                ss += s[d] * s[d];
                vv += v[d] * v[d];
            }
            const double quad = 2 * eps * q1s + eps * eps * ss;
            double rr = 0;
            if (cubic) {
                if (eps * std::sqrt(vv) > coeffs.remainder.validity_radius) {
                    std::size_t k = n / g.plane(), j = (n % g.plane()) / g.nx(), i = n % g.nx();
                    throw ValidityRadiusExceeded("|q| exceeds the remainder validity radius during Picard iteration", k, j, i);
                }
                rr = eps * coeffs.remainder.r->values()[n] * vv;
            }
            for (std::size_t d = 0; d < 3; ++d) G[d].values()[n] = coeffs.b[d].values()[n] * quad + rr * v[d];
        }
        auto F = divergence_tx(G);
        if (opt.extra_forcing) throw InvalidArgument("extra forcing is only supported by the lagged scheme");
        auto w_next = solve_linear_ibvp(g, coeffs.a, InitialBoundaryData::zeros(g), &F);
        double dist = sup_h1(w_next - w);
        res.history.push_back(dist);
        w = std::move(w_next);
        res.iterations = it;
        if (!std::isfinite(dist)) throw PicardFailure("Picard iterate became non-finite", res.history);
        if (dist < opt.tol) break;
        const std::size_t h = res.history.size();
        if (h >= 3 && res.history[h - 1] > res.history[h - 2] && res.history[h - 2] > res.history[h - 3])
            throw PicardFailure("Picard iterates do not contract", res.history);
        if (it == opt.max_iter)
            throw PicardFailure("Picard iteration did not reach tol within max_iter", res.history);
    }
    res.w = w;
    SpaceTimeScalarField u = u1;
    auto inner = u2 + w;
    inner *= eps;
    u += inner;
    u *= eps;
    res.u = std::move(u);
    return res;
}

PicardResult picard_solve(const SpaceTimeGrid& g, const CoefficientSet& coeffs, const InitialBoundaryData& data,
                          double eps, const NonlinearOptions& opt) {
    check_eps(eps, opt);
    auto u1 = solve_linear_ibvp(g, coeffs.a, data);
    auto u2 = solve_second_order(coeffs, u1);
    return picard_solve(g, coeffs, u1, u2, eps, opt);
}

SpaceTimeScalarField solve_nonlinear_picard(const SpaceTimeGrid& g, const CoefficientSet& coeffs,
                                            const InitialBoundaryData& data, double eps, std::size_t max_iter,
                                            double tol) {
    NonlinearOptions opt;
    opt.max_iter = max_iter;
    opt.tol = tol;
    return picard_solve(g, coeffs, data, eps, opt).u;
}

SpaceTimeScalarField solve_nonlinear(Scheme scheme, const SpaceTimeGrid& g, const CoefficientSet& coeffs,
                                     const InitialBoundaryData& data, double eps, const NonlinearOptions& opt) {
    if (scheme == Scheme::Lagged) return solve_nonlinear_lagged(g, coeffs, data, eps, opt);
    return picard_solve(g, coeffs, data, eps, opt).u;
}

} // namespace nlw
