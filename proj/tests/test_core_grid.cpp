#include "doctest.h"
#include "test_support.hpp"

#include "nlw/errors.hpp"
#include "nlw/field_io.hpp"
#include "nlw/operators.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <cstring>
#include <random>

using namespace nlw;
using nlw::test::pi;
using nlw::test::observed_order;

namespace {

SpaceTimeGrid cube(std::size_t n, double T = 1.0) { return SpaceTimeGrid(n, n, n, 1.0, 1.0, T); }

double sss(double t, double x, double y) { return std::sin(t) * std::sin(pi * x) * std::sin(pi * y); }

std::filesystem::path tmp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("nlw_test_" + name);
}

} // namespace

TEST_CASE("grid stores spacings and rejects tiny axes") {
    SpaceTimeGrid g(33, 17, 161, 1.0, 2.0, 2.5);
    CHECK(g.dx() == 1.0 / 32);
    CHECK(g.dy() == 2.0 / 16);
    CHECK(g.dt() == 2.5 / 160);
    CHECK_THROWS_AS(SpaceTimeGrid(2, 5, 5, 1, 1, 1), GridTooSmall);
    CHECK_THROWS_AS(SpaceTimeGrid(5, 5, 1, 1, 1, 1), GridTooSmall);
    CHECK_THROWS_AS(SpaceTimeGrid(5, 5, 5, -1, 1, 1), InvalidArgument);
}

TEST_CASE("CFL margin") {
    SpaceTimeGrid ok(33, 33, 161, 1, 1, 2.5);
    CHECK(ok.cfl_ok());
    SpaceTimeGrid bad(33, 33, 33, 1, 1, 1);
    CHECK_FALSE(bad.cfl_ok());
    CHECK_THROWS_AS(bad.require_cfl(), CflViolation);
}

TEST_CASE("gradient of a constant is zero") {
    auto g = SpaceTimeGrid(6, 5, 4, 1, 2, 3);
    auto f = SpaceTimeScalarField(g, 7.5);
    auto grad = gradient_tx(f);
    for (std::size_t d = 0; d < 3; ++d) CHECK(grad[d].max_abs() == 0.0);
}

TEST_CASE("gradient is exact on affine and quadratic fields") {
    SpaceTimeGrid g(6, 7, 5, 1.3, 0.7, 0.9);
    auto u = SpaceTimeScalarField::sample(g, [](double t, double x, double y) { return t + 2 * x + 3 * y; });
    auto grad = gradient_tx(u);
    for (std::size_t n = 0; n < g.size(); ++n) {
        CHECK(grad[0].values()[n] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(grad[1].values()[n] == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(grad[2].values()[n] == doctest::Approx(3.0).epsilon(1e-12));
    }
    auto q = SpaceTimeScalarField::sample(g, [](double t, double x, double y) { return t * t + x * y - 2 * y * y; });
    auto gq = gradient_tx(q);
    double err = 0;
    for (std::size_t k = 0; k < g.nt(); ++k)
        for (std::size_t j = 0; j < g.ny(); ++j)
            for (std::size_t i = 0; i < g.nx(); ++i) {
                err = std::max(err, std::abs(gq[0](k, j, i) - 2 * g.t(k)));
                err = std::max(err, std::abs(gq[1](k, j, i) - g.y(j)));
                err = std::max(err, std::abs(gq[2](k, j, i) - (g.x(i) - 4 * g.y(j))));
            }
    CHECK(err < 1e-12);
}

TEST_CASE("gradient rejects axes with fewer than 3 points") {
    SpaceTimeGrid g(5, 5, 2, 1, 1, 1);
    CHECK_THROWS_AS(gradient_tx(SpaceTimeScalarField(g)), GridTooSmall);
}

TEST_CASE("gradient converges at second order on a product of sines") {
    auto err = [](std::size_t n) {
        auto g = cube(n);
        auto grad = gradient_tx(SpaceTimeScalarField::sample(g, sss));
        double e = 0;
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t i = 0; i < n; ++i) {
                    double t = g.t(k), x = g.x(i), y = g.y(j);
                    e = std::max(e, std::abs(grad[0](k, j, i) - std::cos(t) * std::sin(pi * x) * std::sin(pi * y)));
                    e = std::max(e, std::abs(grad[1](k, j, i) - pi * std::sin(t) * std::cos(pi * x) * std::sin(pi * y)));
                    e = std::max(e, std::abs(grad[2](k, j, i) - pi * std::sin(t) * std::sin(pi * x) * std::cos(pi * y)));
                }
        return e;
    };
    double e17 = err(17), e33 = err(33), e65 = err(65);
    nlw::test::qoi("gradient order 17->33", observed_order(e17, e33));
    nlw::test::qoi("gradient order 33->65", observed_order(e33, e65));
    CHECK(observed_order(e17, e33) >= 1.9);
    CHECK(observed_order(e33, e65) >= 1.9);
}

TEST_CASE("divergence basics") {
    SpaceTimeGrid g(5, 6, 7, 1, 1, 1);
    CHECK(divergence_tx(SpaceTimeVectorField(g)).max_abs() == 0.0);
    SpaceTimeVectorField V(SpaceTimeScalarField::sample(g, [](double t, double, double) { return t; }),
                           SpaceTimeScalarField::sample(g, [](double, double x, double) { return x; }),
                           SpaceTimeScalarField::sample(g, [](double, double, double y) { return y; }));
    auto d = divergence_tx(V);
    for (double v : d.values()) CHECK(v == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("divergence of gradient converges to the space-time Laplacian away from the boundary") {
    // Nested one-sided stencils lose an order in the first two layers next to
    // the boundary, so the comparison uses nodes at distance >= 2.
    auto err = [](std::size_t n) {
        auto g = cube(n);
        auto lap = divergence_tx(gradient_tx(SpaceTimeScalarField::sample(g, sss)));
        double e = 0;
        for (std::size_t k = 2; k + 2 < n; ++k)
            for (std::size_t j = 2; j + 2 < n; ++j)
                for (std::size_t i = 2; i + 2 < n; ++i) {
                    double exact = -(1 + 2 * pi * pi) * sss(g.t(k), g.x(i), g.y(j));
                    e = std::max(e, std::abs(lap(k, j, i) - exact));
                }
        return e;
    };
    double e17 = err(17), e33 = err(33), e65 = err(65);
    nlw::test::qoi("div grad order 33->65", observed_order(e33, e65));
    CHECK(observed_order(e17, e33) >= 1.9);
    CHECK(observed_order(e33, e65) >= 1.9);
}

TEST_CASE("trapezoid quadrature") {
    auto g = cube(9);
    CHECK(integrate_qt(SpaceTimeScalarField(g, 1.0)) == 1.0);
    CHECK(integrate_qt(SpaceTimeScalarField::sample(g, [](double t, double, double) { return t; })) == doctest::Approx(0.5).epsilon(1e-15));

    auto err = [](std::size_t n) {
        auto g = cube(n);
        auto f = SpaceTimeScalarField::sample(g, [](double, double x, double y) { return std::sin(pi * x) * std::sin(pi * y); });
        return std::abs(integrate_qt(f) - 4 / (pi * pi));
    };
    double e9 = err(9), e17 = err(17), e33 = err(33);
    CHECK(observed_order(e9, e17) == doctest::Approx(2.0).epsilon(0.03));
    CHECK(observed_order(e17, e33) == doctest::Approx(2.0).epsilon(0.03));
}

TEST_CASE("quadrature is exact on multilinear polynomials") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-1, 1);
    for (int trial = 0; trial < 5; ++trial) {
        double c[8];
        for (double& x : c) x = U(rng);
        SpaceTimeGrid g(7, 5, 6, 1.5, 0.8, 2.0);
        auto f = SpaceTimeScalarField::sample(g, [&](double t, double x, double y) {
            return c[0] + c[1] * t + c[2] * x + c[3] * y + c[4] * t * x + c[5] * t * y + c[6] * x * y + c[7] * t * x * y;
        });
        double T = 2.0, X = 1.5, Y = 0.8;
        double exact = c[0] * T * X * Y + c[1] * T * T / 2 * X * Y + c[2] * T * X * X / 2 * Y + c[3] * T * X * Y * Y / 2 +
                       c[4] * T * T / 2 * X * X / 2 * Y + c[5] * T * T / 2 * X * Y * Y / 2 +
                       c[6] * T * X * X / 2 * Y * Y / 2 + c[7] * T * T / 2 * X * X / 2 * Y * Y / 2;
        CHECK(integrate_qt(f) == doctest::Approx(exact).epsilon(1e-13));
    }
}

TEST_CASE("discrete integration by parts holds to second order") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-1, 1);
    double a[6];
    for (double& x : a) x = U(rng);
    auto defect = [&](std::size_t n) {
        auto g = cube(n);
        // phi vanishes on the whole boundary of the space-time box.
        auto bubble = [](double s) { return s * s * (1 - s) * (1 - s); };
        auto phi = SpaceTimeScalarField::sample(g, [&](double t, double x, double y) {
            return bubble(t) * bubble(x) * bubble(y) * (1 + a[0] * std::sin(2 * x + t) + a[1] * std::cos(3 * y));
        });
        SpaceTimeVectorField V(
            SpaceTimeScalarField::sample(g, [&](double t, double x, double y) { return std::sin(a[2] * t + x * y); }),
            SpaceTimeScalarField::sample(g, [&](double t, double x, double y) { return std::cos(a[3] * x + t * y); }),
            SpaceTimeScalarField::sample(g, [&](double t, double x, double y) { return std::exp(a[4] * y) * (t + a[5] * x); }));
        return std::abs(integrate_qt(hadamard(phi, divergence_tx(V))) + integrate_qt(dot(gradient_tx(phi), V)));
    };
    // |defect| <= C h^2: defect/h^2 settles to a constant (its increments shrink).
    double d17 = defect(17), d33 = defect(33), d65 = defect(65);
    double c17 = d17 * 16 * 16, c33 = d33 * 32 * 32, c65 = d65 * 64 * 64;
    nlw::test::qoi("IBP defect * n^2 (17,33,65)", c17);
    nlw::test::qoi("", c33);
    nlw::test::qoi("", c65);
    CHECK(std::abs(c65 - c33) <= 0.6 * std::abs(c33 - c17));
    CHECK(observed_order(d33, d65) >= 1.8);
}

TEST_CASE("traces") {
    SpaceTimeGrid g(9, 7, 4, 1, 1, 1);
    auto ux = SpaceTimeScalarField::sample(g, [](double, double x, double) { return x; });
    auto uy = SpaceTimeScalarField::sample(g, [](double, double, double y) { return y; });
    for (double v : neumann_trace(ux, Side::XPlus).v) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
    for (double v : neumann_trace(ux, Side::XMinus).v) CHECK(v == doctest::Approx(-1.0).epsilon(1e-12));
    for (double v : neumann_trace(uy, Side::XPlus).v) CHECK(std::abs(v) < 1e-12);
    for (double v : neumann_trace(uy, Side::YPlus).v) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

    auto tr = lateral_trace(ux, Side::XPlus);
    CHECK(tr.n == 7);
    for (double v : tr.v) CHECK(v == 1.0);
    CHECK(parse_side("y-") == Side::YMinus);
    CHECK_THROWS_AS(parse_side("z+"), InvalidArgument);
}

TEST_CASE("normal derivative converges at second order") {
    // Outward derivative on x=0 is -du/dx = -pi sin(pi y).
    auto err = [](std::size_t n) {
        SpaceTimeGrid g(n, n, 3, 1, 1, 1);
        auto u = SpaceTimeScalarField::sample(g, [](double, double x, double y) { return std::sin(pi * x) * std::sin(pi * y); });
        auto tr = neumann_trace(u, Side::XMinus);
        double e = 0;
        for (std::size_t m = 0; m < tr.n; ++m) e = std::max(e, std::abs(tr(1, m) + pi * std::sin(pi * g.y(m))));
        return e;
    };
    double e17 = err(17), e33 = err(33), e65 = err(65);
    CHECK(observed_order(e17, e33) >= 1.9);
    CHECK(observed_order(e33, e65) >= 1.9);
}

TEST_CASE("lateral integral counts each corner once") {
    SpaceTimeGrid g(5, 9, 3, 2.0, 1.0, 1.5);
    auto r = LateralRecord::zeros(g);
    for (auto& f : r.faces) std::fill(f.v.begin(), f.v.end(), 1.0);
    CHECK(integrate_lateral(g, r) == doctest::Approx(1.5 * 6.0).epsilon(1e-14));
}

TEST_CASE("NLWF round trip is bit exact") {
    SpaceTimeGrid g(5, 4, 3, 1, 1, 1);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> N;
    std::vector<double> v(g.size());
    for (double& x : v) x = N(rng);
    v[3] = -0.0;
    v[4] = 1e-310;
    SpaceTimeScalarField f(g, v);
    auto p = tmp_path("roundtrip.nlwf");
    write_field(p, f);
    auto back = read_field(p, g);
    REQUIRE(back.values().size() == v.size());
    CHECK(std::memcmp(back.values().data(), v.data(), v.size() * sizeof(double)) == 0);
    std::filesystem::remove(p);
}

TEST_CASE("NLWF rejects truncated and malformed files") {
    SpaceTimeGrid g(5, 4, 3, 1, 1, 1);
    auto p = tmp_path("trunc.nlwf");
    write_field(p, SpaceTimeScalarField(g, 1.0));
    auto size = std::filesystem::file_size(p);
    std::filesystem::resize_file(p, size - 5);
    CHECK_THROWS_AS(read_field(p, g), IoError);
    std::filesystem::resize_file(p, 10);
    CHECK_THROWS_AS(read_field(p, g), IoError);

    // Version 2 header.
    write_field(p, SpaceTimeScalarField(g, 1.0));
    {
        std::fstream io(p, std::ios::in | std::ios::out | std::ios::binary);
        io.seekp(4);
        char two[4] = {2, 0, 0, 0};
        io.write(two, 4);
    }
    CHECK_THROWS_AS(read_field(p, g), IoError);

    // Huge dims that overflow the element count.
    write_nlwf(p, {{1, 1, 1}, {0.0}});
    {
        std::fstream io(p, std::ios::in | std::ios::out | std::ios::binary);
        io.seekp(12);
        std::uint64_t big = ~std::uint64_t{0} / 3;
        io.write(reinterpret_cast<const char*>(&big), 8);
        io.write(reinterpret_cast<const char*>(&big), 8);
    }
    CHECK_THROWS_AS(read_nlwf(p), IoError);

    // Wrong shape against an expected grid.
    write_field(p, SpaceTimeScalarField(SpaceTimeGrid(5, 5, 3, 1, 1, 1)));
    CHECK_THROWS_AS(read_field(p, g), GridMismatch);
    std::filesystem::remove(p);
}

TEST_CASE("NLWF header with nx=2 is rejected as too small") {
    auto p = tmp_path("small.nlwf");
    write_nlwf(p, {{3, 4, 2}, std::vector<double>(24, 0.0)});
    CHECK_THROWS_AS(read_field(p, 1.0, 1.0, 1.0), GridTooSmall);
    std::filesystem::remove(p);
}

TEST_CASE("CSV uses 17 significant digits") {
    CHECK(format_real(0.1) == "0.10000000000000001");
    auto p = tmp_path("out.csv");
    {
        CsvWriter w(p, {"a", "b"});
        w.row({1.0 / 3, 2.0});
    }
    std::ifstream in(p);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header == "a,b");
    CHECK(row == "0.33333333333333331,2");
    std::filesystem::remove(p);
}
