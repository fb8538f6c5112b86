#include "nlw/lightray.hpp"

#include "nlw/errors.hpp"
#include "nlw/expansion.hpp"
#include "nlw/field_io.hpp"
#include "nlw/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace nlw {

namespace {

constexpr double gauss_x[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
constexpr double gauss_w[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

void add_crossings(std::vector<double>& cuts, double y, double w, double h, std::size_t n, double T) {
    if (w == 0) return;
    for (std::size_t i = 0; i < n; ++i) {
        double t = (y - double(i) * h) / w;
        if (t > 0 && t < T) cuts.push_back(t);
    }
}

} // namespace

double lightray_transform(const SpaceTimeScalarField& beta, const Ray& ray) {
    const auto& g = beta.grid();
    const double T = g.T();
    std::vector<double> cuts{0.0, T};
    for (std::size_t k = 1; k + 1 < g.nt(); ++k) cuts.push_back(g.t(k));
    add_crossings(cuts, ray.y[0], ray.omega[0], g.dx(), g.nx(), T);
    add_crossings(cuts, ray.y[1], ray.omega[1], g.dy(), g.ny(), T);
    std::sort(cuts.begin(), cuts.end());

    const double hmax = 0.5 * std::min({g.dt(), g.dx(), g.dy()});
    KahanSum acc;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        double lo = cuts[c], hi = cuts[c + 1];
        if (hi - lo <= 0) continue;
        auto pieces = static_cast<std::size_t>(std::ceil((hi - lo) / hmax));
        double len = (hi - lo) / double(pieces);
        for (std::size_t p = 0; p < pieces; ++p) {
            double a = lo + double(p) * len;
            for (int q = 0; q < 3; ++q) {
                double t = a + 0.5 * len * (1 + gauss_x[q]);
                auto pt = ray.point(t);
                acc.add(0.5 * len * gauss_w[q] * interpolate(beta, pt[0], pt[1], pt[2]));
            }
        }
    }
    return acc.value();
}

namespace {

struct BaseLattice {
    double x0, y0, hx, hy;
    std::size_t nx, ny;
};

// Base points y = x + t w of every ray t -> (t, y - t w) that meets Q_T.
BaseLattice covering_lattice(const SpaceTimeGrid& g, const Direction& w, double hx, double hy) {
    double sx = g.T() * w[0], sy = g.T() * w[1];
    BaseLattice b;
    b.hx = hx;
    b.hy = hy;
    b.x0 = std::min(0.0, sx);
    b.y0 = std::min(0.0, sy);
    double x1 = g.Lx() + std::max(0.0, sx), y1 = g.Ly() + std::max(0.0, sy);
    b.nx = static_cast<std::size_t>(std::ceil((x1 - b.x0) / hx - 1e-9)) + 1;
    b.ny = static_cast<std::size_t>(std::ceil((y1 - b.y0) / hy - 1e-9)) + 1;
    return b;
}

} // namespace

std::vector<RaySample> sample_rays(const SpaceTimeScalarField& beta, std::size_t n_omega, std::size_t n_base) {
    if (n_omega == 0 || n_base < 2) throw InvalidArgument("need n_omega >= 1 and n_base >= 2");
    const auto& g = beta.grid();
    std::vector<RaySample> out;
    out.reserve(n_omega * n_base * n_base);
    for (std::size_t a = 0; a < n_omega; ++a) {
        double angle = 2 * M_PI * double(a) / double(n_omega);
        Direction w = unit_direction(angle);
        auto lat = covering_lattice(g, w, 1.0, 1.0);
        double spanx = double(lat.nx - 1), spany = double(lat.ny - 1);
        for (std::size_t j = 0; j < n_base; ++j)
            for (std::size_t i = 0; i < n_base; ++i) {
                RaySample s;
                s.angle = angle;
                s.y = {lat.x0 + spanx * double(i) / double(n_base - 1), lat.y0 + spany * double(j) / double(n_base - 1)};
                s.value = lightray_transform(beta, Ray{w, s.y});
                out.push_back(s);
            }
    }
    return out;
}

void write_raydata(const std::filesystem::path& path, const std::vector<RaySample>& rows) {
    CsvWriter w(path, {"omega_angle", "y1", "y2", "value"});
    for (const auto& r : rows) w.row({r.angle, r.y[0], r.y[1], r.value});
}

double FourierSliceReport::max_discrepancy() const noexcept {
    double m = 0;
    for (const auto& r : rows) m = std::max(m, r.discrepancy);
    return m;
}

void FourierSliceReport::write_csv(const std::filesystem::path& path) const {
    CsvWriter w(path, {"zeta_t", "zeta_x", "zeta_y", "direct_re", "direct_im", "rays_re", "rays_im", "discrepancy"});
    for (const auto& r : rows)
        w.row({r.zeta[0], r.zeta[1], r.zeta[2], r.direct.real(), r.direct.imag(), r.from_rays.real(),
               r.from_rays.imag(), r.discrepancy});
}

FourierSliceReport fourier_slice_check(const SpaceTimeScalarField& beta, const Direction& omega,
                                       const std::vector<std::array<double, 3>>& zetas, std::size_t base_refine) {
    require_unit(omega);
    if (base_refine == 0) throw InvalidArgument("base_refine must be at least 1");
    for (const auto& z : zetas) {
        double d = z[0] + z[1] * omega[0] + z[2] * omega[1];
        if (std::abs(d) > 1e-10) {
            std::ostringstream os;
            os << "zeta (" << z[0] << ", " << z[1] << ", " << z[2] << ") is not orthogonal to (1, w): " << d;
            throw InvalidArgument(os.str());
        }
    }
    const auto& g = beta.grid();
    FourierSliceReport rep;
    rep.omega = omega;

    // Rays parallel to (1, w) are t -> (t, y + t w), i.e. Ray{-w, y}.
    Direction back{-omega[0], -omega[1]};
    auto lat = covering_lattice(g, back, g.dx() / double(base_refine), g.dy() / double(base_refine));
    std::vector<double> P(lat.nx * lat.ny);
    for (std::size_t j = 0; j < lat.ny; ++j)
        for (std::size_t i = 0; i < lat.nx; ++i)
            P[j * lat.nx + i] =
                lightray_transform(beta, Ray{back, {lat.x0 + double(i) * lat.hx, lat.y0 + double(j) * lat.hy}});
    auto wx = trapezoid_weights(lat.nx, lat.hx), wy = trapezoid_weights(lat.ny, lat.hy);
    auto wt = trapezoid_weights(g.nt(), g.dt()), gx = trapezoid_weights(g.nx(), g.dx()),
         gy = trapezoid_weights(g.ny(), g.dy());

    double l1 = 0;
    for (std::size_t k = 0; k < g.nt(); ++k)
        for (std::size_t j = 0; j < g.ny(); ++j)
            for (std::size_t i = 0; i < g.nx(); ++i) l1 += wt[k] * gy[j] * gx[i] * std::abs(beta(k, j, i));

    for (const auto& z : zetas) {
        std::complex<double> direct = 0, rays = 0;
        for (std::size_t k = 0; k < g.nt(); ++k)
            for (std::size_t j = 0; j < g.ny(); ++j)
                for (std::size_t i = 0; i < g.nx(); ++i) {
                    double b = beta(k, j, i);
                    if (b == 0) continue;
                    direct += wt[k] * gy[j] * gx[i] * b * std::polar(1.0, -(z[0] * g.t(k) + z[1] * g.x(i) + z[2] * g.y(j)));
                }
        for (std::size_t j = 0; j < lat.ny; ++j)
            for (std::size_t i = 0; i < lat.nx; ++i) {
                double p = P[j * lat.nx + i];
                if (p == 0) continue;
                double y1 = lat.x0 + double(i) * lat.hx, y2 = lat.y0 + double(j) * lat.hy;
                rays += wx[i] * wy[j] * p * std::polar(1.0, -(z[1] * y1 + z[2] * y2));
            }
        FourierSliceRow row;
        row.zeta = z;
        row.direct = direct;
        row.from_rays = rays;
        double diff = std::abs(direct - rays);
        // Near a zero of the transform the relative error is meaningless; fall
        // back to the L1 norm of beta, which bounds every Fourier value.
        double scale = std::abs(direct) > 1e-8 * l1 ? std::abs(direct) : l1;
        row.discrepancy = scale > 0 ? diff / scale : diff;
        rep.rows.push_back(row);
    }
    return rep;
}

double weighted_ray_integral(const SpaceTimeScalarField& beta, const Direction& omega, const BumpProfile& profile) {
    const auto& g = beta.grid();
    auto w = SpaceTimeScalarField::sample(g, [&](double t, double x, double y) {
        double p = profile.value(x + t * omega[0], y + t * omega[1]);
        return p * p;
    });
    return integrate_qt(hadamard(beta, w));
}

double polarized_go_value(const SpaceTimeScalarField& beta, const GOPair& pair) {
    require_same_grid(beta.grid(), pair.u_plus.grid(), "polarized GO value");
    auto prod = dot(pair.plus.reduced_gradient(), pair.minus.reduced_gradient());
    double h = pair.plus.h;
    return -0.5 * h * h * integrate_qt(hadamard(beta, prod));
}

void ConcentrationReport::write_csv(const std::filesystem::path& path) const {
    CsvWriter w(path, {"h", "scaled_value", "weighted_integral", "error"});
    for (const auto& r : rows) w.row({r.h, r.value, r.weighted, r.error});
}

ConcentrationReport concentration_extract(const SpaceTimeScalarField& beta_w, const SpatialField& a,
                                          const Direction& omega, const std::vector<double>& h_list,
                                          const BumpProfile& profile) {
    const auto& g = beta_w.grid();
    ConcentrationReport rep;
    double weighted = weighted_ray_integral(beta_w, omega, profile);
    std::vector<std::pair<double, double>> pts;
    for (double h : h_list) {
        auto pair = build_go_pair(g, a, omega, h, profile);
        ConcentrationRow r;
        r.h = h;
        r.value = polarized_go_value(beta_w, pair);
        r.weighted = weighted;
        r.error = std::abs(r.value - weighted);
        rep.rows.push_back(r);
        if (r.error > 0) pts.emplace_back(h, r.error);
    }
    if (pts.size() >= 3)
        rep.order = slope_fit(pts).slope;
    else if (pts.size() == 2)
        rep.order = std::log(pts[0].second / pts[1].second) / std::log(pts[0].first / pts[1].first);
    else
        rep.order = std::numeric_limits<double>::quiet_NaN();
    return rep;
}

} // namespace nlw
