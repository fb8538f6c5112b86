#include "nlw/operators.hpp"

#include "nlw/errors.hpp"

#include <algorithm>
#include <cmath>

namespace nlw {

namespace {

void require_three(const SpaceTimeGrid& g, Axis axis) {
    std::size_t n = axis == Axis::T ? g.nt() : axis == Axis::X ? g.nx() : g.ny();
    if (n < 3) throw GridTooSmall("derivative needs at least 3 points along the axis, got " + std::to_string(n));
}

} // namespace

SpaceTimeScalarField derivative(const SpaceTimeScalarField& f, Axis axis) {
    const auto& g = f.grid();
    require_three(g, axis);
    SpaceTimeScalarField out(g);
    const auto& v = f.values();
    auto& o = out.values();

    std::size_t n, stride;
    double h;
    switch (axis) {
    case Axis::T: n = g.nt(); stride = g.plane(); h = g.dt(); break;
    case Axis::X: n = g.nx(); stride = 1; h = g.dx(); break;
    default: n = g.ny(); stride = g.nx(); h = g.dy(); break;
    }
    const double c = 1.0 / (2.0 * h);

    // Every line along the axis starts at an index with zero coordinate on it.
    for (std::size_t k = 0; k < g.nt(); ++k)
        for (std::size_t j = 0; j < g.ny(); ++j)
            for (std::size_t i = 0; i < g.nx(); ++i) {
                std::size_t pos = axis == Axis::T ? k : axis == Axis::X ? i : j;
                if (pos != 0) continue;
                std::size_t b = g.index(k, j, i);
                o[b] = c * (-3 * v[b] + 4 * v[b + stride] - v[b + 2 * stride]);
                for (std::size_t m = 1; m + 1 < n; ++m) {
                    std::size_t p = b + m * stride;
                    o[p] = c * (v[p + stride] - v[p - stride]);
                }
                std::size_t e = b + (n - 1) * stride;
                o[e] = c * (3 * v[e] - 4 * v[e - stride] + v[e - 2 * stride]);
            }
    return out;
}

SpaceTimeVectorField gradient_tx(const SpaceTimeScalarField& f) {
    return SpaceTimeVectorField(derivative(f, Axis::T), derivative(f, Axis::X), derivative(f, Axis::Y));
}

SpaceTimeScalarField divergence_tx(const SpaceTimeVectorField& V) {
    SpaceTimeScalarField out = derivative(V[0], Axis::T);
    out += derivative(V[1], Axis::X);
    out += derivative(V[2], Axis::Y);
    return out;
}

void laplacian_interior(const SpaceTimeGrid& g, const double* u, double* out) {
    const std::size_t nx = g.nx(), ny = g.ny();
    const double ix2 = 1.0 / (g.dx() * g.dx()), iy2 = 1.0 / (g.dy() * g.dy());
    for (std::size_t j = 1; j + 1 < ny; ++j)
        for (std::size_t i = 1; i + 1 < nx; ++i) {
            std::size_t p = j * nx + i;
            out[p] = (u[p + 1] - 2 * u[p] + u[p - 1]) * ix2 + (u[p + nx] - 2 * u[p] + u[p - nx]) * iy2;
        }
}

void KahanSum::add(double x) noexcept {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
        comp_ += (sum_ - t) + x;
    else
        comp_ += (x - t) + sum_;
    sum_ = t;
}

std::vector<double> trapezoid_weights(std::size_t n, double h) {
    std::vector<double> w(n, h);
    if (n > 0) {
        w.front() *= 0.5;
        w.back() *= 0.5;
    }
    return w;
}

double integrate_qt(const SpaceTimeScalarField& f) {
    const auto& g = f.grid();
    auto wt = trapezoid_weights(g.nt(), g.dt());
    auto wx = trapezoid_weights(g.nx(), g.dx());
    auto wy = trapezoid_weights(g.ny(), g.dy());
    KahanSum s;
    for (std::size_t k = 0; k < g.nt(); ++k)
        for (std::size_t j = 0; j < g.ny(); ++j) {
            const double wtj = wt[k] * wy[j];
            const double* row = f.level(k) + j * g.nx();
            for (std::size_t i = 0; i < g.nx(); ++i) s.add(wtj * wx[i] * row[i]);
        }
    return s.value();
}

double integrate_omega(const SpaceTimeGrid& g, const SpatialField& f) {
    if (f.nx != g.nx() || f.ny != g.ny()) throw GridMismatch("spatial field shape does not match grid");
    auto wx = trapezoid_weights(g.nx(), g.dx());
    auto wy = trapezoid_weights(g.ny(), g.dy());
    KahanSum s;
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i) s.add(wy[j] * wx[i] * f(j, i));
    return s.value();
}

double integrate_lateral(const SpaceTimeGrid& g, const LateralRecord& r) {
    auto wt = trapezoid_weights(g.nt(), g.dt());
    KahanSum s;
    for (Side side : all_sides) {
        const auto& f = r[side];
        if (f.nt != g.nt() || f.n != face_length(g, side))
            throw GridMismatch("face record shape does not match grid on " + std::string(side_name(side)));
        auto ws = trapezoid_weights(f.n, face_spacing(g, side));
        for (std::size_t k = 0; k < f.nt; ++k)
            for (std::size_t m = 0; m < f.n; ++m) s.add(wt[k] * ws[m] * f(k, m));
    }
    return s.value();
}

FaceArray lateral_trace(const SpaceTimeScalarField& f, Side side) {
    const auto& g = f.grid();
    FaceArray out{side, g.nt(), face_length(g, side), {}};
    out.v.resize(out.nt * out.n);
    for (std::size_t k = 0; k < g.nt(); ++k)
        for (std::size_t m = 0; m < out.n; ++m) {
            auto [j, i] = face_node(g, side, m);
            out(k, m) = f(k, j, i);
        }
    return out;
}

FaceArray neumann_trace(const SpaceTimeScalarField& f, Side side, int order) {
    if (order != 1 && order != 2) throw InvalidArgument("normal derivative order must be 1 or 2");
    const auto& g = f.grid();
    FaceArray out{side, g.nt(), face_length(g, side), {}};
    out.v.resize(out.nt * out.n);
    const std::size_t nx = g.nx(), ny = g.ny();
    // b: boundary node, s: stride towards the interior, h: spacing.
    auto diff = [order](const double* b, std::ptrdiff_t s, double h) {
        if (order == 1) return (b[0] - b[s]) / h;
        return (3 * b[0] - 4 * b[s] + b[2 * s]) / (2 * h);
    };
    const auto sx = std::ptrdiff_t(nx);
    for (std::size_t k = 0; k < g.nt(); ++k) {
        const double* u = f.level(k);
        for (std::size_t m = 0; m < out.n; ++m) {
            double d = 0;
            switch (side) {
            case Side::XMinus: d = diff(u + m * nx, 1, g.dx()); break;
            case Side::XPlus: d = diff(u + m * nx + nx - 1, -1, g.dx()); break;
            case Side::YMinus: d = diff(u + m, sx, g.dy()); break;
            case Side::YPlus: d = diff(u + (ny - 1) * nx + m, -sx, g.dy()); break;
            }
            out(k, m) = d;
        }
    }
    return out;
}

LateralRecord lateral_trace_all(const SpaceTimeScalarField& f) {
    LateralRecord r;
    for (Side s : all_sides) r[s] = lateral_trace(f, s);
    return r;
}

LateralRecord neumann_trace_all(const SpaceTimeScalarField& f, int order) {
    LateralRecord r;
    for (Side s : all_sides) r[s] = neumann_trace(f, s, order);
    return r;
}

FaceArray normal_component(const SpaceTimeVectorField& V, Side side) {
    auto n = outward_normal(side);
    FaceArray out = lateral_trace(side == Side::XMinus || side == Side::XPlus ? V[1] : V[2], side);
    double sign = (side == Side::XMinus || side == Side::XPlus) ? n[0] : n[1];
    for (double& x : out.v) x *= sign;
    return out;
}

double l2_qt(const SpaceTimeScalarField& f) {
    return std::sqrt(std::max(0.0, integrate_qt(hadamard(f, f))));
}

double sup_h1(const SpaceTimeScalarField& f) {
    const auto& g = f.grid();
    auto grad = gradient_tx(f);
    auto wx = trapezoid_weights(g.nx(), g.dx());
    auto wy = trapezoid_weights(g.ny(), g.dy());
    double best = 0;
    for (std::size_t k = 0; k < g.nt(); ++k) {
        KahanSum s;
        for (std::size_t j = 0; j < g.ny(); ++j)
            for (std::size_t i = 0; i < g.nx(); ++i) {
                double u = f(k, j, i), ut = grad[0](k, j, i), ux = grad[1](k, j, i), uy = grad[2](k, j, i);
                s.add(wy[j] * wx[i] * (u * u + ut * ut + ux * ux + uy * uy));
            }
        best = std::max(best, std::sqrt(std::max(0.0, s.value())));
    }
    return best;
}

double relative_l2(const SpaceTimeScalarField& a, const SpaceTimeScalarField& b) {
    double d = l2_qt(a - b);
    double n = l2_qt(b);
    return n > 0 ? d / n : d;
}

double interpolate(const SpaceTimeScalarField& f, double t, double x, double y) {
    const auto& g = f.grid();
    double ft = t / g.dt(), fx = x / g.dx(), fy = y / g.dy();
    const double slack = 1e-9;
    if (ft < -slack || fx < -slack || fy < -slack) return 0.0;
    if (ft > double(g.nt() - 1) + slack || fx > double(g.nx() - 1) + slack || fy > double(g.ny() - 1) + slack)
        return 0.0;
    auto cell = [](double r, std::size_t n, double& w) {
        r = std::clamp(r, 0.0, double(n - 1));
        auto c = std::min(static_cast<std::size_t>(r), n - 2);
        w = r - double(c);
        return c;
    };
    double wt, wx, wy;
    std::size_t k = cell(ft, g.nt(), wt), i = cell(fx, g.nx(), wx), j = cell(fy, g.ny(), wy);
    double acc = 0;
    for (int dk = 0; dk < 2; ++dk)
        for (int dj = 0; dj < 2; ++dj)
            for (int di = 0; di < 2; ++di) {
                double w = (dk ? wt : 1 - wt) * (dj ? wy : 1 - wy) * (di ? wx : 1 - wx);
                if (w != 0) acc += w * f(k + dk, j + dj, i + di);
            }
    return acc;
}

} // namespace nlw
