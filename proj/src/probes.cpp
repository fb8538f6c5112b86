#include "nlw/probes.hpp"

#include "nlw/errors.hpp"
#include "nlw/operators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nlw {

namespace {

constexpr double gauss_x[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
constexpr double gauss_w[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

double smooth_step(double s) {
    if (s <= 0) return 0;
    if (s >= 1) return 1;
    double a = std::exp(-1 / s), b = std::exp(-1 / (1 - s));
    return a / (a + b);
}

} // namespace

Direction unit_direction(double angle) noexcept { return {std::cos(angle), std::sin(angle)}; }

void require_unit(const Direction& w) {
    double n = std::hypot(w[0], w[1]);
    if (!(std::abs(n - 1) <= 1e-12)) {
        std::ostringstream os;
        os << "direction must be a unit vector, |w| = " << n;
        throw InvalidArgument(os.str());
    }
}

double BumpProfile::value(double x, double y) const noexcept {
    double r2 = ((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (radius * radius);
    if (r2 >= 1) return 0;
    return std::exp(1 - 1 / (1 - r2));
}

std::array<double, 2> BumpProfile::gradient(double x, double y) const noexcept {
    double r2 = ((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (radius * radius);
    if (r2 >= 1) return {0, 0};
    double q = 1 - r2;
    double f = std::exp(1 - 1 / q);
    double c = -2 * f / (radius * radius * q * q);
    return {c * (x - cx), c * (y - cy)};
}

std::array<double, 3> BumpProfile::hessian(double x, double y) const noexcept {
    double r2 = ((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (radius * radius);
    if (r2 >= 1) return {0, 0, 0};
    double q = 1 - r2, rho2 = radius * radius;
    double f = std::exp(1 - 1 / q);
    double d[2] = {x - cx, y - cy};
    double grad[2] = {-2 * f * d[0] / (rho2 * q * q), -2 * f * d[1] / (rho2 * q * q)};
    auto H = [&](int a, int b) {
        return -2 / rho2 * (grad[b] * d[a] / (q * q) + (a == b ? f / (q * q) : 0.0) +
                            4 * f * d[a] * d[b] / (rho2 * q * q * q));
    };
    return {H(0, 0), H(0, 1), H(1, 1)};
}

double BumpProfile::l2_squared() const noexcept {
    // pi rho^2 int_0^1 exp(2 - 2/(1-u)) du, composite Gauss
    const int panels = 400;
    double acc = 0;
    for (int p = 0; p < panels; ++p) {
        double a = double(p) / panels, b = double(p + 1) / panels;
        for (int q = 0; q < 3; ++q) {
            double u = 0.5 * (a + b) + 0.5 * (b - a) * gauss_x[q];
            acc += 0.5 * (b - a) * gauss_w[q] * std::exp(2 - 2 / (1 - u));
        }
    }
    return M_PI * radius * radius * acc;
}

double GOProbe::exponent(double t, double x, double y) const noexcept {
    return sign * (t + x * omega[0] + y * omega[1] - s0) / h;
}

double GOProbe::envelope(double t, double x, double y) const noexcept {
    return profile.value(x + t * omega[0], y + t * omega[1]);
}

SpaceTimeVectorField GOProbe::reduced_gradient() const {
    const auto& g = corrector.grid();
    auto dR = gradient_tx(corrector);
    SpaceTimeVectorField out(g);
    for (std::size_t k = 0; k < g.nt(); ++k)
        for (std::size_t j = 0; j < g.ny(); ++j)
            for (std::size_t i = 0; i < g.nx(); ++i) {
                double t = g.t(k), x = g.x(i), y = g.y(j);
                double zx = x + t * omega[0], zy = y + t * omega[1];
                double phi = profile.value(zx, zy);
                auto gp = profile.gradient(zx, zy);
                double lead = sign * (phi + h * corrector(k, j, i)) / h;
                double dphi[3] = {gp[0] * omega[0] + gp[1] * omega[1], gp[0], gp[1]};
                double dir[3] = {1.0, omega[0], omega[1]};
                for (std::size_t c = 0; c < 3; ++c)
                    out[c](k, j, i) = dir[c] * lead + dphi[c] + h * dR[c](k, j, i);
            }
    return out;
}

double go_max_exponent(const SpaceTimeGrid& g, const Direction& omega, double h, const BumpProfile& p) {
    double s0 = p.cx * omega[0] + p.cy * omega[1];
    double best = 0;
    for (double t : {0.0, g.T()})
        for (double x : {0.0, g.Lx()})
            for (double y : {0.0, g.Ly()})
                best = std::max(best, std::abs(t + x * omega[0] + y * omega[1] - s0));
    return best / h;
}

SpaceTimeScalarField discrete_residual(const SpaceTimeScalarField& u, const SpatialField& a) {
    const auto& g = u.grid();
    SpaceTimeScalarField r(g);
    std::vector<double> lap(g.plane(), 0.0);
    const double dt2 = g.dt() * g.dt();
    for (std::size_t k = 1; k + 1 < g.nt(); ++k) {
        laplacian_interior(g, u.level(k), lap.data());
        const double *um = u.level(k - 1), *uk = u.level(k), *up = u.level(k + 1);
        double* out = r.level(k);
        for (std::size_t j = 1; j + 1 < g.ny(); ++j)
            for (std::size_t i = 1; i + 1 < g.nx(); ++i) {
                std::size_t p = j * g.nx() + i;
                out[p] = (up[p] - 2 * uk[p] + um[p]) / dt2 - lap[p] + a.v[p] * uk[p];
            }
    }
    return r;
}

InitialBoundaryData data_of(const SpaceTimeScalarField& u, const SpatialField& a) {
    const auto& g = u.grid();
    auto d = InitialBoundaryData::zeros(g);
    const double* u0 = u.level(0);
    const double* u1 = u.level(1);
    std::vector<double> lap(g.plane(), 0.0);
    laplacian_interior(g, u0, lap.data());
    const double dt = g.dt();
    for (std::size_t p = 0; p < g.plane(); ++p) {
        d.phi.v[p] = u0[p];
        d.psi.v[p] = (u1[p] - u0[p]) / dt;
    }
    for (std::size_t j = 1; j + 1 < g.ny(); ++j)
        for (std::size_t i = 1; i + 1 < g.nx(); ++i) {
            std::size_t p = j * g.nx() + i;
            d.psi.v[p] = (u1[p] - u0[p] - 0.5 * dt * dt * (lap[p] - a.v[p] * u0[p])) / dt;
        }
    d.f = lateral_trace_all(u);
    return d;
}

GOPair build_go_pair(const SpaceTimeGrid& g, const SpatialField& a, const Direction& omega, double h,
                     const BumpProfile& profile, double max_exponent) {
    require_unit(omega);
    if (!(h > 0)) throw InvalidArgument("semiclassical parameter h must be positive");
    if (!(profile.radius > 0)) throw InvalidArgument("profile radius must be positive");
    double e = go_max_exponent(g, omega, h, profile);
    if (e > max_exponent) {
        std::ostringstream os;
        os << "exponent range " << e << " exceeds " << max_exponent << " for h=" << h;
        throw NumericalFailure(os.str(), 0);
    }

    GOPair out;
    for (int sign : {1, -1}) {
        GOProbe p;
        p.omega = omega;
        p.h = h;
        p.profile = profile;
        p.sign = sign;
        p.s0 = profile.cx * omega[0] + profile.cy * omega[1];
        auto lead = [&p](double t, double x, double y) {
            return std::exp(p.exponent(t, x, y)) * p.envelope(t, x, y);
        };
        auto ell = SpaceTimeScalarField::sample(g, lead);

        // Residual of the sampled leading term, with analytic ghost levels.
        SpaceTimeScalarField F(g);
        std::vector<double> lap(g.plane(), 0.0), ghost(g.plane());
        const double dt2 = g.dt() * g.dt();
        for (std::size_t k = 0; k < g.nt(); ++k) {
            auto level_or_ghost = [&](long kk) -> const double* {
                if (kk >= 0 && kk < long(g.nt())) return ell.level(std::size_t(kk));
                double t = double(kk) * g.dt();
                for (std::size_t j = 0; j < g.ny(); ++j)
                    for (std::size_t i = 0; i < g.nx(); ++i) ghost[j * g.nx() + i] = lead(t, g.x(i), g.y(j));
                return ghost.data();
            };
            laplacian_interior(g, ell.level(k), lap.data());
            std::vector<double> before(level_or_ghost(long(k) - 1), level_or_ghost(long(k) - 1) + g.plane());
            const double* after = level_or_ghost(long(k) + 1);
            const double* uk = ell.level(k);
            double* out = F.level(k);
            for (std::size_t j = 1; j + 1 < g.ny(); ++j)
                for (std::size_t i = 1; i + 1 < g.nx(); ++i) {
                    std::size_t q = j * g.nx() + i;
                    out[q] = -((after[q] - 2 * uk[q] + before[q]) / dt2 - lap[q] + a.v[q] * uk[q]);
                }
        }

        auto v = sign > 0 ? solve_linear_ibvp(g, a, InitialBoundaryData::zeros(g), &F) : solve_backward_zero(g, a, F);
        p.corrector = SpaceTimeScalarField(g);
        for (std::size_t k = 0; k < g.nt(); ++k)
            for (std::size_t j = 0; j < g.ny(); ++j)
                for (std::size_t i = 0; i < g.nx(); ++i)
                    p.corrector(k, j, i) = v(k, j, i) * std::exp(-p.exponent(g.t(k), g.x(i), g.y(j))) / h;
        ell += v;
        if (sign > 0) {
            out.u_plus = std::move(ell);
            out.plus = std::move(p);
        } else {
            out.u_minus = std::move(ell);
            out.minus = std::move(p);
        }
    }
    return out;
}

double go_corrector_bound(const GOProbe& p) {
    auto dR = gradient_tx(p.corrector);
    auto sq = hadamard(dR[0], dR[0]) + hadamard(dR[1], dR[1]) + hadamard(dR[2], dR[2]);
    return l2_qt(p.corrector) + p.h * std::sqrt(std::max(0.0, integrate_qt(sq)));
}

PotentialFn extend_potential(const SpaceTimeGrid& g, const SpatialField& a, double halo) {
    if (a.nx != g.nx() || a.ny != g.ny()) throw GridMismatch("potential shape does not match grid");
    if (!(halo > 0)) throw InvalidArgument("extension halo must be positive");
    double mean = 0;
    std::size_t count = 0;
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i)
            if (i == 0 || j == 0 || i + 1 == g.nx() || j + 1 == g.ny()) {
                mean += a(j, i);
                ++count;
            }
    mean /= double(count);
    const double dx = g.dx(), dy = g.dy(), Lx = g.Lx(), Ly = g.Ly();
    return [a, mean, halo, dx, dy, Lx, Ly](double x, double y) {
        double px = std::clamp(x, 0.0, Lx), py = std::clamp(y, 0.0, Ly);
        double fx = px / dx, fy = py / dy;
        auto i = std::min(static_cast<std::size_t>(fx), a.nx - 2);
        auto j = std::min(static_cast<std::size_t>(fy), a.ny - 2);
        double wx = fx - double(i), wy = fy - double(j);
        double v = (1 - wy) * ((1 - wx) * a(j, i) + wx * a(j, i + 1)) +
                   wy * ((1 - wx) * a(j + 1, i) + wx * a(j + 1, i + 1));
        double dist = std::hypot(x - px, y - py);
        if (dist == 0) return v;
        double s = smooth_step(dist / halo);
        return (1 - s) * v + s * mean;
    };
}

namespace {

/// Main grid embedded in a larger box with the same spacings.
struct Box {
    std::size_t nx = 0, ny = 0, nt = 0, ox = 0, oy = 0;
    double dx = 0, dy = 0, dt = 0;

    std::size_t index(std::size_t k, std::size_t j, std::size_t i) const { return (k * ny + j) * nx + i; }
    double x(std::size_t i) const { return (double(i) - double(ox)) * dx; }
    double y(std::size_t j) const { return (double(j) - double(oy)) * dy; }

    double interpolate(const std::vector<double>& f, double t, double x, double y) const {
        auto cell = [](double r, std::size_t n, double& w) {
            r = std::clamp(r, 0.0, double(n - 1));
            auto c = std::min(static_cast<std::size_t>(r), n - 2);
            w = r - double(c);
            return c;
        };
        double wt, wx, wy;
        std::size_t k = cell(t / dt, nt, wt);
        std::size_t i = cell(x / dx + double(ox), nx, wx);
        std::size_t j = cell(y / dy + double(oy), ny, wy);
        double acc = 0;
        for (int dk = 0; dk < 2; ++dk)
            for (int dj = 0; dj < 2; ++dj)
                for (int di = 0; di < 2; ++di) {
                    double w = (dk ? wt : 1 - wt) * (dj ? wy : 1 - wy) * (di ? wx : 1 - wx);
                    if (w != 0) acc += w * f[index(k + dk, j + dj, i + di)];
                }
        return acc;
    }
};

// Second derivative along a strided line with one-sided four-point ends.
double second_diff(const double* f, std::size_t n, std::size_t m, std::size_t stride, double h2) {
    auto at = [&](std::size_t q) { return f[q * stride]; };
    if (m == 0) return (2 * at(0) - 5 * at(1) + 4 * at(2) - at(3)) / h2;
    if (m + 1 == n) return (2 * at(n - 1) - 5 * at(n - 2) + 4 * at(n - 3) - at(n - 4)) / h2;
    return (at(m + 1) - 2 * at(m) + at(m - 1)) / h2;
}

std::vector<double> apply_wave(const Box& b, const std::vector<double>& A, const std::vector<double>& pot) {
    std::vector<double> out(A.size());
    const std::size_t P = b.nx * b.ny;
    for (std::size_t k = 0; k < b.nt; ++k)
        for (std::size_t j = 0; j < b.ny; ++j)
            for (std::size_t i = 0; i < b.nx; ++i) {
                std::size_t q = b.index(k, j, i);
                double att = second_diff(A.data() + j * b.nx + i, b.nt, k, P, b.dt * b.dt);
                double axx = second_diff(A.data() + (k * b.ny + j) * b.nx, b.nx, i, 1, b.dx * b.dx);
                double ayy = second_diff(A.data() + k * P + i, b.ny, j, b.nx, b.dy * b.dy);
                out[q] = att - axx - ayy + pot[j * b.nx + i] * A[q];
            }
    return out;
}

SpaceTimeScalarField restrict_to(const SpaceTimeGrid& g, const Box& b, const std::vector<double>& f) {
    SpaceTimeScalarField out(g);
    for (std::size_t k = 0; k < g.nt(); ++k)
        for (std::size_t j = 0; j < g.ny(); ++j)
            for (std::size_t i = 0; i < g.nx(); ++i) out(k, j, i) = f[b.index(k, j + b.oy, i + b.ox)];
    return out;
}

} // namespace

TransportAmplitudes transport_solve(const SpaceTimeGrid& g, const PotentialFn& a, const Direction& omega, int N,
                                    std::size_t pad) {
    require_unit(omega);
    if (N < 1 || N > 4) throw InvalidArgument("truncation order N must lie in [1,4]");
    if (pad == 0) pad = std::size_t(2 * N + 4);
    if (pad < std::size_t(N + 1))
        throw InvalidArgument("padding of " + std::to_string(pad) + " cells is too small for N=" + std::to_string(N));
    if (g.nt() < 4 || g.nx() < 4 || g.ny() < 4) throw GridTooSmall("transport needs at least 4 points per axis");

    Box b;
    b.dx = g.dx();
    b.dy = g.dy();
    b.dt = g.dt();
    b.nt = g.nt();
    auto cells = [](double len, double h) { return static_cast<std::size_t>(std::ceil(len / h - 1e-9)); };
    double sx = g.T() * omega[0], sy = g.T() * omega[1];
    b.ox = cells(std::max(0.0, -sx), b.dx) + pad;
    b.oy = cells(std::max(0.0, -sy), b.dy) + pad;
    b.nx = b.ox + g.nx() + cells(std::max(0.0, sx), b.dx) + pad;
    b.ny = b.oy + g.ny() + cells(std::max(0.0, sy), b.dy) + pad;

    std::vector<double> pot(b.nx * b.ny);
    for (std::size_t j = 0; j < b.ny; ++j)
        for (std::size_t i = 0; i < b.nx; ++i) pot[j * b.nx + i] = a(b.x(i), b.y(j));

    const std::size_t total = b.nt * b.nx * b.ny;
    std::vector<std::vector<double>> A(std::size_t(N + 1)), LA(std::size_t(N + 1));
    A[0].assign(total, 1.0);
    LA[0].resize(total);
    for (std::size_t k = 0; k < b.nt; ++k)
        std::copy(pot.begin(), pot.end(), LA[0].begin() + std::ptrdiff_t(k * b.nx * b.ny));

    for (int n = 1; n <= N; ++n) {
        auto& An = A[std::size_t(n)];
        An.assign(total, 0.0);
        const auto& prev = LA[std::size_t(n - 1)];
        for (std::size_t k = 1; k < b.nt; ++k) {
            double t = double(k) * b.dt;
            for (std::size_t j = 0; j < b.ny; ++j)
                for (std::size_t i = 0; i < b.nx; ++i) {
                    double x = b.x(i), y = b.y(j);
                    double acc = 0;
                    for (std::size_t s = 0; s < k; ++s) {
                        double lo = double(s) * b.dt;
                        for (int q = 0; q < 3; ++q) {
                            double tau = lo + 0.5 * b.dt * (1 + gauss_x[q]);
                            double px = x + (t - tau) * omega[0], py = y + (t - tau) * omega[1];
                            double val = n == 1 ? a(px, py) : b.interpolate(prev, tau, px, py);
                            acc += gauss_w[q] * val;
                        }
                    }
                    An[b.index(k, j, i)] = -0.5 * b.dt * acc;
                }
        }
        LA[std::size_t(n)] = apply_wave(b, An, pot);
    }

    TransportAmplitudes out;
    for (int n = 0; n <= N; ++n) {
        out.amplitudes.push_back(restrict_to(g, b, A[std::size_t(n)]));
        out.applied.push_back(restrict_to(g, b, LA[std::size_t(n)]));
    }
    return out;
}

TransportAmplitudes transport_solve(const SpaceTimeGrid& g, const SpatialField& a, const Direction& omega, int N,
                                    std::size_t pad) {
    return transport_solve(g, extend_potential(g, a, 0.25 * std::min(g.Lx(), g.Ly())), omega, N, pad);
}

std::complex<double> WKBProbe::coefficient(int k) const noexcept {
    return std::pow(std::complex<double>(0.0, 2 * lambda), -k);
}

WKBProbe build_wkb(const SpaceTimeGrid& g, const SpatialField& a, const Direction& omega, double lambda, int N) {
    require_unit(omega);
    if (!(lambda > 0)) throw InvalidArgument("frequency must be positive");
    double res = lambda * std::max(g.dx(), g.dy());
    if (res > 0.5) {
        std::ostringstream os;
        os << "lambda*max(dx,dy) = " << res << " exceeds 0.5; refine the grid or lower lambda";
        throw InvalidArgument(os.str());
    }
    WKBProbe p;
    p.omega = omega;
    p.lambda = lambda;
    p.N = N;
    p.transport = transport_solve(g, a, omega, N);
    for (const auto& A : p.transport.amplitudes) p.amplitude_gradients.push_back(gradient_tx(A));

    SpaceTimeScalarField Fre(g), Fim(g);
    p.v_re = SpaceTimeScalarField(g);
    p.v_im = SpaceTimeScalarField(g);
    const auto cN = p.coefficient(N);
    const auto& LAN = p.transport.applied[std::size_t(N)];
    for (std::size_t k = 0; k < g.nt(); ++k)
        for (std::size_t j = 0; j < g.ny(); ++j)
            for (std::size_t i = 0; i < g.nx(); ++i) {
                auto e = std::polar(1.0, p.phase(g.t(k), g.x(i), g.y(j)));
                std::complex<double> S = 0;
                for (int n = 0; n <= N; ++n) S += p.coefficient(n) * p.transport.amplitudes[std::size_t(n)](k, j, i);
                auto lead = e * S;
                p.v_re(k, j, i) = lead.real();
                p.v_im(k, j, i) = lead.imag();
                auto f = -e * cN * LAN(k, j, i);
                Fre(k, j, i) = f.real();
                Fim(k, j, i) = f.imag();
            }
    auto zero = InitialBoundaryData::zeros(g);
    p.rem_re = solve_linear_ibvp(g, a, zero, &Fre);
    p.rem_im = solve_linear_ibvp(g, a, zero, &Fim);
    p.rem_grad_re = gradient_tx(p.rem_re);
    p.rem_grad_im = gradient_tx(p.rem_im);
    p.v_re += p.rem_re;
    p.v_im += p.rem_im;
    return p;
}

double wkb_sum_residual(const WKBProbe& p) {
    const auto& g = p.grid();
    SpaceTimeScalarField mag2(g);
    const double il2 = 2 * p.lambda;
    for (std::size_t k = 0; k < g.nt(); ++k)
        for (std::size_t j = 0; j < g.ny(); ++j)
            for (std::size_t i = 0; i < g.nx(); ++i) {
                std::complex<double> acc = 0;
                for (int n = 0; n <= p.N; ++n) {
                    const auto& dA = p.amplitude_gradients[std::size_t(n)];
                    double transport = dA[0](k, j, i) - p.omega[0] * dA[1](k, j, i) - p.omega[1] * dA[2](k, j, i);
                    acc += p.coefficient(n) *
                           (std::complex<double>(0.0, il2) * transport + p.transport.applied[std::size_t(n)](k, j, i));
                }
                mag2(k, j, i) = std::norm(acc);
            }
    return std::sqrt(std::max(0.0, integrate_qt(mag2)));
}

namespace {

using Row = std::array<std::complex<double>, 3>;

template <class Sample>
Row assemble_gradient(const WKBProbe& p, double t, double x, double y, Sample&& at) {
    std::complex<double> S = 0;
    Row dS{0, 0, 0};
    for (int n = 0; n <= p.N; ++n) {
        auto c = p.coefficient(n);
        S += c * at(p.transport.amplitudes[std::size_t(n)]);
        for (std::size_t d = 0; d < 3; ++d) dS[d] += c * at(p.amplitude_gradients[std::size_t(n)][d]);
    }
    auto e = std::polar(1.0, p.phase(t, x, y));
    const double dir[3] = {1.0, p.omega[0], p.omega[1]};
    Row out;
    for (std::size_t d = 0; d < 3; ++d)
        out[d] = e * (std::complex<double>(0.0, p.lambda * dir[d]) * S + dS[d]) +
                 std::complex<double>(at(p.rem_grad_re[d]), at(p.rem_grad_im[d]));
    return out;
}

} // namespace

std::array<std::complex<double>, 3> wkb_gradient(const WKBProbe& p, std::size_t k, std::size_t j, std::size_t i) {
    const auto& g = p.grid();
    if (k >= g.nt() || j >= g.ny() || i >= g.nx()) throw InvalidArgument("node outside grid");
    return assemble_gradient(p, g.t(k), g.x(i), g.y(j), [&](const SpaceTimeScalarField& f) { return f(k, j, i); });
}

std::array<std::array<std::complex<double>, 3>, 3> gradient_matrix(const std::vector<const WKBProbe*>& probes,
                                                                  double t, double x, double y) {
    if (probes.size() != 3) throw InvalidArgument("gradient matrix needs exactly 3 probes in two space dimensions");
    const auto& g = probes[0]->grid();
    for (const auto* p : probes) {
        require_same_grid(p->grid(), g, "gradient matrix probes");
        if (p->lambda != probes[0]->lambda) throw InvalidArgument("probes must share lambda");
    }
    const double tol = 1e-12;
    if (t < -tol || t > g.T() + tol || x < -tol || x > g.Lx() + tol || y < -tol || y > g.Ly() + tol) {
        std::ostringstream os;
        os << "point (" << t << ", " << x << ", " << y << ") outside the grid";
        throw InvalidArgument(os.str());
    }
    std::array<Row, 3> M;
    for (std::size_t r = 0; r < 3; ++r)
        M[r] = assemble_gradient(*probes[r], t, x, y,
                                 [&](const SpaceTimeScalarField& f) { return interpolate(f, t, x, y); });
    return M;
}

std::complex<double> gradient_matrix_det(const std::vector<const WKBProbe*>& probes, double t, double x, double y) {
    auto M = gradient_matrix(probes, t, x, y);
    auto det = M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
               M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
    double l = probes[0]->lambda;
    return det / (l * l * l);
}

std::array<Direction, 3> reference_directions() noexcept {
    const double r = 1 / std::sqrt(2.0);
    return {Direction{r, r}, Direction{1.0, 0.0}, Direction{0.0, 1.0}};
}

} // namespace nlw
