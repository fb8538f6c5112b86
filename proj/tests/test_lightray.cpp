#include "doctest.h"
#include "test_support.hpp"

#include "nlw/errors.hpp"
#include "nlw/lightray.hpp"
#include "nlw/operators.hpp"
#include "nlw/scenario.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>

using namespace nlw;
using nlw::test::qoi;

namespace {

SpaceTimeGrid reference_grid(std::size_t n = 33, std::size_t nt = 161) { return SpaceTimeGrid(n, n, nt, 1.0, 1.0, 2.5); }

double gaussian(double t, double x, double y) {
    return std::exp(-((t - 1.1) * (t - 1.1) / 0.08 + (x - 0.45) * (x - 0.45) / 0.03 + (y - 0.55) * (y - 0.55) / 0.04));
}

// Compactly supported space-time bump of radius r around (t0, x0, y0).
double ball(double t, double x, double y, double t0, double x0, double y0, double r) {
    return smooth_bump(std::sqrt((t - t0) * (t - t0) + (x - x0) * (x - x0) + (y - y0) * (y - y0)) / r);
}

// Odd reflection of a ball across the plane through c orthogonal to (1, w):
// its integral along every line parallel to (1, w) vanishes.
SpaceTimeScalarField null_element(const SpaceTimeGrid& g, const Direction& w) {
    const double s = 1 / std::sqrt(2.0);
    const double d[3] = {s, s * w[0], s * w[1]};
    const double c[3] = {1.25, 0.5, 0.5};
    const double off = 0.3;
    return SpaceTimeScalarField::sample(g, [&](double t, double x, double y) {
        double p[3] = {t, x, y};
        double proj = 0;
        for (int q = 0; q < 3; ++q) proj += (p[q] - c[q]) * d[q];
        double r[3];
        for (int q = 0; q < 3; ++q) r[q] = p[q] - 2 * proj * d[q];
        return ball(t, x, y, c[0] + off * d[0], c[1] + off * d[1], c[2] + off * d[2], 0.25) -
               ball(r[0], r[1], r[2], c[0] + off * d[0], c[1] + off * d[1], c[2] + off * d[2], 0.25);
    });
}

std::vector<std::array<double, 3>> slice_frequencies(const Direction& w) {
    std::vector<std::array<double, 3>> out;
    for (auto e : {std::array<double, 2>{0, 0}, {2, 0}, {0, 3}, {1.5, -1}, {-2.5, 2}}) {
        out.push_back({-(e[0] * w[0] + e[1] * w[1]), e[0], e[1]});
    }
    return out;
}

} // namespace

TEST_CASE("light-ray transform of zero and linearity") {
    auto g = reference_grid();
    SpaceTimeScalarField zero(g);
    auto b1 = SpaceTimeScalarField::sample(g, gaussian);
    auto b2 = SpaceTimeScalarField::sample(g, [](double t, double x, double y) { return ball(t, x, y, 0.8, 0.6, 0.4, 0.35); });
    for (double ang : {0.0, 0.7, 2.0, 4.0}) {
        Direction w = unit_direction(ang);
        for (auto y : {std::array<double, 2>{0.5, 0.5}, {1.2, -0.3}, {0.1, 0.9}}) {
            Ray r{w, y};
            CHECK(lightray_transform(zero, r) == 0.0);
            double lhs = lightray_transform(2.0 * b1 + (-3.0) * b2, r);
            double rhs = 2.0 * lightray_transform(b1, r) - 3.0 * lightray_transform(b2, r);
            double scale = std::abs(lightray_transform(b1, r)) + std::abs(lightray_transform(b2, r)) + 1e-300;
            CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(scale, 1.0));
        }
    }
}

TEST_CASE("light-ray transform matches adaptive quadrature of the interpolant") {
    auto g = reference_grid();
    auto beta = SpaceTimeScalarField::sample(g, gaussian);
    double worst = 0;
    for (double ang : {0.3, 1.9, 3.5}) {
        Direction w = unit_direction(ang);
        for (double s : {-0.1, 0.0, 0.15}) {
            auto ray = Ray::through(w, 1.1, 0.45 + s, 0.55 - s);
            double v = lightray_transform(beta, ray);
            auto f = [&](double t) {
                auto p = ray.point(t);
                return interpolate(beta, p[0], p[1], p[2]);
            };
            double err_est = 0;
            double oracle = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, g.T(), 25, 1e-14, &err_est);
            double rel = std::abs(v - oracle) / std::abs(oracle);
            worst = std::max(worst, rel);
        }
    }
    qoi("lightray_vs_adaptive_max_rel", worst);
    CHECK(worst <= 1e-6);

    // Against the analytic line integral the interpolation error is second order.
    auto ray = Ray::through(unit_direction(0.3), 1.1, 0.5, 0.5);
    auto exact = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [&](double t) {
            auto p = ray.point(t);
            return gaussian(p[0], p[1], p[2]);
        },
        0.0, 2.5, 25, 1e-14);
    std::vector<double> errs;
    for (std::size_t n : {17u, 33u, 65u}) {
        auto gg = reference_grid(n, 5 * (n - 1) + 1);
        errs.push_back(std::abs(lightray_transform(SpaceTimeScalarField::sample(gg, gaussian), ray) - exact));
    }
    double order = nlw::test::observed_order(errs[1], errs[2]);
    qoi("lightray_analytic_order", order);
    CHECK(order >= 1.8);
}

TEST_CASE("light-ray transform is translation covariant") {
    auto g = reference_grid();
    const std::size_t si = 4, sj = 2;
    const double x0 = double(si) * g.dx(), y0 = double(sj) * g.dy();
    auto beta = SpaceTimeScalarField::sample(g, [](double t, double x, double y) { return ball(t, x, y, 1.0, 0.4, 0.45, 0.3); });
    SpaceTimeScalarField shifted(g);
    for (std::size_t k = 0; k < g.nt(); ++k)
        for (std::size_t j = sj; j < g.ny(); ++j)
            for (std::size_t i = si; i < g.nx(); ++i) shifted(k, j, i) = beta(k, j - sj, i - si);
    for (double ang : {0.2, 2.4, 5.0}) {
        Direction w = unit_direction(ang);
        Ray r{w, {0.9, 0.7}};
        Ray back{w, {0.9 - x0, 0.7 - y0}};
        double a = lightray_transform(shifted, r), b = lightray_transform(beta, back);
        CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)));
    }
}

TEST_CASE("Fourier slice: zero, Gaussian, refinement order, null element") {
    Direction w = unit_direction(0.3);
    auto zetas = slice_frequencies(w);
    {
        auto g = reference_grid(17, 81);
        auto rep = fourier_slice_check(SpaceTimeScalarField(g), w, zetas);
        for (const auto& r : rep.rows) {
            CHECK(r.direct == std::complex<double>(0, 0));
            CHECK(r.from_rays == std::complex<double>(0, 0));
            CHECK(r.discrepancy == 0.0);
        }
    }
    CHECK_THROWS_AS(fourier_slice_check(SpaceTimeScalarField(reference_grid(17, 81)), w, {{1.0, 1.0, 0.0}}),
                    InvalidArgument);

    std::vector<double> disc;
    for (std::size_t n : {17u, 33u, 65u}) {
        auto g = reference_grid(n, 5 * (n - 1) + 1);
        auto rep = fourier_slice_check(SpaceTimeScalarField::sample(g, gaussian), w, zetas);
        disc.push_back(rep.max_discrepancy());
        qoi("fourier_slice_discrepancy_n" + std::to_string(n), rep.max_discrepancy());
    }
    CHECK(disc[1] <= 1e-3);
    double order = nlw::test::observed_order(disc[1], disc[2]);
    qoi("fourier_slice_order", order);
    CHECK(order >= 1.9);

    auto g = reference_grid();
    auto nul = null_element(g, w);
    auto rep = fourier_slice_check(nul, w, zetas);
    double worst = 0;
    for (const auto& r : rep.rows) worst = std::max(worst, std::abs(r.direct));
    double mass = 0;
    for (double v : nul.values()) mass += std::abs(v);
    mass *= g.dt() * g.dx() * g.dy();
    qoi("null_element_direct_fourier_max", worst / mass);
    CHECK(worst <= 1e-6 * mass);
}

TEST_CASE("null element: ray data and weighted integrals vanish together") {
    auto g = reference_grid();
    Direction w = unit_direction(0.3);
    auto nul = null_element(g, w);
    // Rays parallel to (1, w) are Ray{-w, .}; the matching weight is phi^2(x - t w).
    Direction back{-w[0], -w[1]};
    double ray_max = 0, ray_scale = 0, weighted_max = 0, weighted_scale = 0;
    auto half = SpaceTimeScalarField::sample(g, [&](double t, double x, double y) {
        const double s = 1 / std::sqrt(2.0);
        return ball(t, x, y, 1.25 + 0.3 * s, 0.5 + 0.3 * s * w[0], 0.5 + 0.3 * s * w[1], 0.25);
    });
    for (double y1 : {0.2, 0.35, 0.5, 0.65}) {
        for (double y2 : {0.3, 0.5, 0.7}) {
            Ray r{back, {y1 - 1.25 * w[0], y2 - 1.25 * w[1]}};
            ray_max = std::max(ray_max, std::abs(lightray_transform(nul, r)));
            ray_scale = std::max(ray_scale, std::abs(lightray_transform(half, r)));
            BumpProfile p{r.y[0], r.y[1], 0.15};
            weighted_max = std::max(weighted_max, std::abs(weighted_ray_integral(nul, back, p)));
            weighted_scale = std::max(weighted_scale, std::abs(weighted_ray_integral(half, back, p)));
        }
    }
    qoi("null_ray_relative", ray_max / ray_scale);
    qoi("null_weighted_relative", weighted_max / weighted_scale);
    CHECK(ray_max <= 1e-2 * ray_scale);
    CHECK(weighted_max <= 1e-2 * weighted_scale);
}

TEST_CASE("concentration of the polarized GO functional") {
    auto g = reference_grid();
    auto a = reference_potential(g);
    Direction w = unit_direction(0.3);
    BumpProfile prof{0.5, 0.5, 0.25};

    auto zero = concentration_extract(SpaceTimeScalarField(g), a, w, {0.2, 0.1, 0.05}, prof);
    for (const auto& r : zero.rows) {
        CHECK(r.value == 0.0);
        CHECK(r.weighted == 0.0);
    }

    auto beta = SpaceTimeScalarField::sample(g, [](double t, double x, double y) {
        return std::exp(-((t - 0.4) * (t - 0.4) + (x - 0.45) * (x - 0.45) + (y - 0.5) * (y - 0.5)) / 0.05);
    });
    auto rep = concentration_extract(beta, a, w, {0.2, 0.1, 0.05}, prof);
    for (const auto& r : rep.rows) qoi("concentration_error_h" + std::to_string(r.h), r.error);
    qoi("concentration_order", rep.order);
    CHECK(rep.order >= 0.9);
    CHECK(rep.rows[2].error < rep.rows[1].error);
    CHECK(rep.rows[1].error < rep.rows[0].error);
}

TEST_CASE("shrinking profile: weighted integral tends to ray transform times int phi^2") {
    auto g = reference_grid();
    auto beta = SpaceTimeScalarField::sample(g, [](double t, double x, double y) {
        return std::exp(-((t - 1.1) * (t - 1.1) / 0.3 + (x - 0.45) * (x - 0.45) / 0.1 + (y - 0.55) * (y - 0.55) / 0.1));
    });
    Direction w = unit_direction(0.3);
    double worst = 0;
    for (auto x0 : {std::array<double, 2>{0.45, 0.55}, {0.55, 0.45}, {0.35, 0.6}}) {
        auto ray = Ray::through(w, 1.1, x0[0], x0[1]);
        BumpProfile p{ray.y[0], ray.y[1], 4 * g.dx()};
        double weighted = weighted_ray_integral(beta, w, p);
        double expected = lightray_transform(beta, ray) * p.l2_squared();
        worst = std::max(worst, std::abs(weighted - expected) / std::abs(expected));
    }
    qoi("shrinking_profile_rel", worst);
    CHECK(worst <= 0.05);
}

TEST_CASE("ray sampling and CSV") {
    auto g = reference_grid(17, 81);
    auto beta = SpaceTimeScalarField::sample(g, gaussian);
    auto rows = sample_rays(beta, 4, 5);
    CHECK(rows.size() == 100);
    auto dir = std::filesystem::temp_directory_path() / "nlw_test_lightray";
    std::filesystem::create_directories(dir);
    write_raydata(dir / "raydata.csv", rows);
    CHECK(std::filesystem::file_size(dir / "raydata.csv") > 100);
    CHECK_THROWS_AS(sample_rays(beta, 0, 5), InvalidArgument);
}
