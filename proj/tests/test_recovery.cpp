#include "doctest.h"
#include "test_support.hpp"

#include "nlw/errors.hpp"
#include "nlw/lightray.hpp"
#include "nlw/operators.hpp"
#include "nlw/probes.hpp"
#include "nlw/recovery.hpp"
#include "nlw/scenario.hpp"
#include "nlw/wave_nonlinear.hpp"

#include <cfloat>
#include <cmath>
#include <random>
#include <string>

using namespace nlw;
using nlw::test::pi;
using nlw::test::qoi;

namespace {

struct Reference {
    ScenarioSpec spec;
    SpaceTimeGrid g;
    CoefficientSet m;
    SpaceTimeScalarField u1;
};

Reference reference_setup() {
    Reference r;
    r.g = make_grid(r.spec);
    r.m = make_coefficients(r.g, r.spec);
    r.u1 = solve_linear_ibvp(r.g, r.m.a, make_data(r.g, r.spec.data));
    return r;
}

IOData simulated_record(const CoefficientSet& m, const SpaceTimeScalarField& u1) {
    return direct_second_order_record(m, u1, solve_second_order(m, u1));
}

// phi^2(x + t w) on the grid.
SpaceTimeScalarField tube_weight(const SpaceTimeGrid& g, const Direction& w, const BumpProfile& p) {
    SpaceTimeScalarField f(g);
    for (std::size_t k = 0; k < g.nt(); ++k)
        for (std::size_t j = 0; j < g.ny(); ++j)
            for (std::size_t i = 0; i < g.nx(); ++i) {
                double v = p.value(g.x(i) + g.t(k) * w[0], g.y(j) + g.t(k) * w[1]);
                f(k, j, i) = v * v;
            }
    return f;
}

// Tubes of radius `radius` over a lattice of centres, `ndir` directions,
// keeping those that meet Q_T.
template <class Fn>
void for_each_tube(const SpaceTimeGrid& g, std::size_t ndir, double radius, double spacing, Fn&& fn) {
    for (std::size_t d = 0; d < ndir; ++d) {
        Direction w = unit_direction(2 * pi * double(d) / double(ndir));
        double x0 = std::min(0.0, g.T() * w[0]) - radius, x1 = g.Lx() + std::max(0.0, g.T() * w[0]) + radius;
        double y0 = std::min(0.0, g.T() * w[1]) - radius, y1 = g.Ly() + std::max(0.0, g.T() * w[1]) + radius;
        for (double cy = y0; cy <= y1 + 1e-9; cy += spacing)
            for (double cx = x0; cx <= x1 + 1e-9; cx += spacing) {
                auto f = tube_weight(g, w, BumpProfile{cx, cy, radius});
                if (f.max_abs() > 1e-3) fn(f);
            }
    }
}

std::vector<SpaceTimeScalarField> tube_battery(const SpaceTimeGrid& g, std::size_t ndir, double radius, double spacing) {
    std::vector<SpaceTimeScalarField> out;
    for_each_tube(g, ndir, radius, spacing, [&](const SpaceTimeScalarField& f) { out.push_back(f); });
    return out;
}

double product_integral(const SpaceTimeScalarField& a, const SpaceTimeScalarField& b) {
    auto p = a;
    for (std::size_t n = 0; n < p.values().size(); ++n) p.values()[n] *= b.values()[n];
    return integrate_qt(p);
}

// Smooth space-time bump in the interior of Q_T.
SpaceTimeScalarField smooth_beta(const SpaceTimeGrid& g) {
    BumpSpec s;
    s.cx = 0.45;
    s.cy = 0.55;
    s.radius = 0.45;
    s.t_on = 0.0;
    s.t_off = g.T();
    return bump_scalar(g, s, 1.0);
}

EndToEndConfig small_config() {
    EndToEndConfig c;
    c.scenario.nx = c.scenario.ny = 17;
    c.scenario.nt = 81;
    c.go_spacing = 0.25;
    c.extraction_data = 1;
    return c;
}

} // namespace

TEST_CASE("identity pairing matches direct quadrature for a known b") {
    auto r = reference_setup();
    auto rec = simulated_record(r.m, r.u1);
    auto go = build_go_pair(r.g, r.m.a, unit_direction(0.7), 0.5, BumpProfile{0.5, 0.5, 0.35});
    auto wkb = build_wkb(r.g, r.m.a, reference_directions()[0], 4.0, 2);
    std::vector<SpaceTimeScalarField> probes{go.u_plus, go.u_minus, solver_grade(wkb.v_re, r.m.a)};
    double worst_scheme = 0, worst_continuum = 0;
    for (const auto& w : probes) {
        double ref = direct_identity_integral(r.m.b, w, r.u1, r.u1);
        double ds = assemble_identity_data(rec, w, PairingRule::Scheme);
        double dc = assemble_identity_data(rec, w, PairingRule::Continuum);
        worst_scheme = std::max(worst_scheme, std::abs(ds - ref) / std::abs(ref));
        worst_continuum = std::max(worst_continuum, std::abs(dc - ref) / std::abs(ref));
    }
    qoi("scheme_pairing_relative_error", worst_scheme);
    qoi("continuum_pairing_relative_error", worst_continuum);
    CHECK(worst_scheme <= 1e-10);
}

TEST_CASE("identity with normal-only flux plus the known lateral b term") {
    auto r = reference_setup();
    auto rec = simulated_record(r.m, r.u1);
    // Remove the (0,nu).b|grad u1|^2 part and add it back from the lateral b.
    SpaceTimeVectorField N = r.m.b;
    auto q = dot(gradient_tx(r.u1), gradient_tx(r.u1));
    for (std::size_t d = 0; d < 3; ++d)
        for (std::size_t n = 0; n < q.values().size(); ++n) N[d].values()[n] *= q.values()[n];
    auto normal_only = rec;
    for (auto side : all_sides) {
        auto nc = normal_component(N, side);
        for (std::size_t n = 0; n < nc.v.size(); ++n) {
            normal_only.lateral_flux[side].v[n] -= nc.v[n];
            normal_only.scheme_flux[side].v[n] -= nc.v[n];
        }
    }
    auto w = build_go_pair(r.g, r.m.a, Direction{1, 0}, 0.5, BumpProfile{0.4, 0.5, 0.3}).u_minus;
    double full = assemble_identity_data(rec, w);
    double split = assemble_identity_data(normal_only, w, r.u1, r.m.b);
    CHECK(split == doctest::Approx(full).epsilon(1e-12));
}

TEST_CASE("equal-coefficient media give D at the floor for ten probes") {
    auto r = reference_setup();
    auto m2 = make_coefficients(r.g, r.spec);
    auto g2 = simulated_record(r.m, r.u1) - simulated_record(m2, r.u1);
    auto ref = simulated_record(r.m, r.u1);
    int probes = 0;
    for (int n = 0; n < 5; ++n) {
        auto pair = build_go_pair(r.g, r.m.a, unit_direction(1.3 * n), 0.4,
                                  BumpProfile{0.3 + 0.1 * n, 0.6 - 0.05 * n, 0.3});
        for (const auto* w : {&pair.u_plus, &pair.u_minus}) {
            double scale = std::abs(assemble_identity_data(ref, *w));
            double floor = 64 * DBL_EPSILON * std::max(scale, 1.0);
            CHECK(std::abs(assemble_identity_data(g2, *w)) <= floor);
            ++probes;
        }
    }
    CHECK(probes == 10);
    // b = 0 medium against itself.
    auto m0 = r.m.scaled_b(0.0);
    auto w = build_go_pair(r.g, r.m.a, Direction{0, 1}, 0.5, BumpProfile{}).u_plus;
    CHECK(assemble_identity_data(simulated_record(m0, r.u1), w) == 0.0);
}

TEST_CASE("polarization bookkeeping") {
    CHECK(polarize(8.0, 0.0) == 2.0);
    CHECK(polarize(3.0, 3.0) == 0.0);

    auto r = reference_setup();
    auto w = build_go_pair(r.g, r.m.a, unit_direction(0.4), 0.5, BumpProfile{0.5, 0.5, 0.35}).u_plus;
    auto rec = simulated_record(r.m, r.u1);
    double d = assemble_identity_data(rec, w);
    // data2 = data1: records of 2 u1 and of 0.
    auto twice = r.u1;
    twice *= 2.0;
    double same = polarize(simulated_record(r.m, twice), IOData::zeros(r.g), w);
    CHECK(same == doctest::Approx(d).epsilon(1e-12));
    // data2 = 0: records of u1 and u1.
    CHECK(std::abs(polarize(rec, rec, w)) <= 1e-15 * std::abs(d));

    // GO pair as the two factors: four-call polarization against the bilinear
    // record, and the -h^2/2 scaling against the concentration functional.
    const double h = 0.3;
    auto pair = build_go_pair(r.g, r.m.a, Direction{1, 0}, h, BumpProfile{0.6, 0.5, 0.3});
    auto sum = pair.u_plus;
    sum += pair.u_minus;
    auto diff = pair.u_plus;
    diff -= pair.u_minus;
    double four = polarize(simulated_record(r.m, sum), simulated_record(r.m, diff), w);
    double bilinear = assemble_identity_data(bilinear_second_order_record(r.m, pair.u_plus, pair.u_minus), w);
    qoi("four_call_vs_bilinear", std::abs(four - bilinear) / std::abs(bilinear));
    CHECK(four == doctest::Approx(bilinear).epsilon(1e-10));
    double direct = direct_identity_integral(r.m.b, w, pair.u_plus, pair.u_minus);
    CHECK(-h * h / 2 * bilinear == doctest::Approx(-h * h / 2 * direct).epsilon(1e-10));
}

TEST_CASE("polarized GO data concentrate on the tube functional") {
    // The scaled identity values approach the concentration functional of the
    // light-ray module, which uses analytic envelope gradients, and both
    // approach int beta_w phi^2(x + t w) as h decreases.
    auto r = reference_setup();
    auto w = build_go_pair(r.g, r.m.a, unit_direction(0.4), 0.5, BumpProfile{0.5, 0.5, 0.35}).u_plus;
    auto beta = betaw_field(r.m.b, w);
    BumpProfile tube{0.6, 0.5, 0.3};
    std::vector<double> hs{0.1, 0.05};
    auto rep = concentration_extract(beta, r.m.a, Direction{1, 0}, hs, tube);
    std::vector<double> err;
    for (std::size_t n = 0; n < hs.size(); ++n) {
        auto pair = build_go_pair(r.g, r.m.a, Direction{1, 0}, hs[n], tube);
        double scaled = -hs[n] * hs[n] / 2 *
                        assemble_identity_data(bilinear_second_order_record(r.m, pair.u_plus, pair.u_minus), w);
        err.push_back(std::abs(scaled - rep.rows[n].weighted));
        if (n + 1 == hs.size()) {
            qoi("scaled_identity_vs_concentration", std::abs(scaled - rep.rows[n].value) / std::abs(rep.rows[n].value));
            CHECK(scaled == doctest::Approx(rep.rows[n].value).epsilon(1e-2));
        }
    }
    CHECK(err[1] < err[0]);
}

TEST_CASE("solver_grade output solves the scheme") {
    SpaceTimeGrid g(33, 33, 81, 1.0, 1.0, 1.0);
    auto a = reference_potential(g);
    auto p = build_wkb(g, a, reference_directions()[1], 4.0, 1);
    auto v = solver_grade(p.v_im, a);
    CHECK(discrete_residual(v, a).max_abs() <= 1e-10 * v.max_abs());
    CHECK(relative_l2(v, p.v_im) < 0.2);
}

TEST_CASE("recovery grid and restriction") {
    SpaceTimeGrid g(33, 33, 161, 1.0, 1.0, 2.5);
    auto c = recovery_grid(g, 4, 4);
    CHECK(c.nx() == 9);
    CHECK(c.nt() == 41);
    CHECK(c.T() == doctest::Approx(2.5));
    CHECK_THROWS_AS(recovery_grid(g, 5, 4), InvalidArgument);
    auto f = smooth_beta(g);
    auto rf = restrict_field(f, c);
    CHECK(rf(10, 3, 7) == f(40, 12, 28));
}

TEST_CASE("betaw_direct: zero data give a zero estimate") {
    SpaceTimeGrid g(33, 33, 65, 1.0, 1.0, 1.0);
    std::vector<IdentityMeasurement> data;
    for (auto& wt : tube_battery(g, 4, 0.3, 0.2)) data.push_back({std::move(wt), 0.0});
    auto est = betaw_direct(data);
    CHECK(est.max_abs() == 0.0);
}

TEST_CASE("beta_w least squares recovers a smooth bump on a 17x17x33 recovery grid") {
    // Same solver as betaw_direct, with clean and noisy values as two
    // right-hand sides so the weights are projected once instead of stored.
    SpaceTimeGrid g(65, 65, 129, 1.0, 1.0, 1.0);
    auto beta = smooth_beta(g);
    BetawSystem sys(g, 4, 4, 2);
    std::vector<std::vector<double>> rows;
    std::vector<double> clean;
    for_each_tube(g, 8, 0.3, 0.1, [&](const SpaceTimeScalarField& wt) {
        clean.push_back(product_integral(beta, wt));
        rows.push_back(sys.project(wt));
    });
    double rms = 0;
    for (double v : clean) rms += v * v;
    rms = std::sqrt(rms / double(clean.size()));
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t n = 0; n < rows.size(); ++n)
        sys.add_row(std::move(rows[n]), {clean[n], clean[n] + 0.01 * rms * normal(rng)});

    auto sol = sys.solve();
    auto truth = restrict_field(beta, sys.coarse());
    CHECK(sys.coarse().nx() == 17);
    CHECK(sys.coarse().nt() == 33);
    double err = relative_l2(sol.fields[0], truth);
    double err_noise = relative_l2(sol.fields[1], truth);
    qoi("measurements", double(sys.measurements()));
    qoi("betaw_relative_error", err);
    qoi("betaw_relative_error_1pct_noise", err_noise);
    CHECK(err <= 0.10);
    CHECK(err_noise <= 0.25);
}

TEST_CASE("betaw_direct reports an underdetermined system without ridge") {
    SpaceTimeGrid g(33, 33, 65, 1.0, 1.0, 1.0);
    std::vector<IdentityMeasurement> data;
    for (auto& wt : tube_battery(g, 1, 0.3, 0.3)) data.push_back({std::move(wt), 1.0});
    REQUIRE(data.size() < recovery_grid(g, 4, 4).size());
    try {
        betaw_direct(data, 4, 4, 0.0);
        FAIL("expected InvalidArgument");
    } catch (const InvalidArgument& e) {
        CHECK(std::string(e.what()).find("underdetermined") != std::string::npos);
    }
    CHECK_NOTHROW(betaw_direct(data, 4, 4, 1e-6));
}

TEST_CASE("pointwise recovery: zero data and exact synthetic data") {
    SpaceTimeGrid g(33, 33, 65, 1.0, 1.0, 1.0);
    auto a = reference_potential(g);
    std::vector<SpaceTimeScalarField> w;
    for (const auto& d : reference_directions()) {
        auto p = build_wkb(g, a, d, 4.0, 1);
        w.push_back(p.v_re);
        w.push_back(p.v_im);
    }
    std::vector<SpaceTimeVectorField> grads;
    for (const auto& f : w) grads.push_back(gradient_tx(f));

    std::vector<SpaceTimeScalarField> zero(w.size(), SpaceTimeScalarField(g));
    auto z = recover_b_pointwise(zero, grads);
    CHECK(z.unmasked > 0);
    for (std::size_t d = 0; d < 3; ++d) CHECK(z.b[d].max_abs() == 0.0);

    BumpSpec s;
    s.t_on = 0.1;
    s.t_off = 0.9;
    auto b = bump_vector(g, s);
    std::vector<SpaceTimeScalarField> beta;
    for (const auto& f : w) beta.push_back(betaw_field(b, f));
    auto rec = recover_b_pointwise(beta, grads);
    double err = masked_relative_error(rec.b, b, rec.mask);
    qoi("synthetic_pointwise_error", err);
    qoi("unmasked_fraction", rec.unmasked_fraction());
    CHECK(err <= 1e-8);

    CHECK_THROWS_AS(recover_b_pointwise({beta[0], beta[1]}, {grads[0], grads[1]}), InvalidArgument);
    std::vector<SpaceTimeVectorField> flat(w.size(), SpaceTimeVectorField(g));
    CHECK_THROWS_AS(recover_b_pointwise(beta, flat), NumericalFailure);
}

TEST_CASE("WKB probes at lambda 20 leave at least 95 percent of interior points unmasked") {
    SpaceTimeGrid g(81, 81, 65, 1.0, 1.0, 0.5);
    auto a = reference_potential(g);
    std::vector<WKBProbe> probes;
    for (const auto& d : reference_directions()) probes.push_back(build_wkb(g, a, d, 20.0, 2));
    std::vector<const WKBProbe*> ptrs;
    for (const auto& p : probes) ptrs.push_back(&p);
    auto grads = wkb_probe_gradients(ptrs);
    REQUIRE(grads.size() == 6);
    std::vector<SpaceTimeScalarField> zero(6, SpaceTimeScalarField(g));
    auto rec = recover_b_pointwise(zero, grads);
    qoi("interior_unmasked_fraction", rec.interior_fraction);
    CHECK(rec.interior_fraction >= 0.95);
}

TEST_CASE("end_to_end: identical media recover a difference at the floor") {
    auto c = small_config();
    c.b2 = c.scenario.b;
    auto rep = end_to_end(c);
    qoi("recovered_norm", rep.recovered_norm);
    qoi("floor", rep.floor);
    CHECK(rep.diameter_ok);
    CHECK(rep.recovered_norm <= 2 * rep.floor);
    CHECK(std::isnan(rep.relative_error));
}

TEST_CASE("end_to_end: the cubic remainder does not contaminate the recovery") {
    auto c = small_config();
    c.b2 = c.scenario.b;
    c.scenario.r_amp = 0.5;
    auto rep = end_to_end(c);
    qoi("recovered_norm", rep.recovered_norm);
    qoi("extraction_abs_error", rep.metric("extraction", "max_absolute_identity_error"));
    CHECK(rep.recovered_norm <= 2 * rep.floor);
}

TEST_CASE("end_to_end: a bump against b = 0 on a coarse grid") {
    auto c = small_config();
    auto rep = end_to_end(c);
    qoi("relative_l2_error", rep.relative_error);
    qoi("betaw_error", rep.metric("betaw", "max_relative_error"));
    qoi("extraction_rel_error", rep.metric("extraction", "max_relative_identity_error"));
    CHECK(rep.metric("probes", "max_relative_scheme_residual") <= 1e-10);
    CHECK(rep.metric("battery", "go_pairs") > rep.metric("battery", "unknowns_per_probe"));
    CHECK(std::isfinite(rep.relative_error));
    CHECK(rep.recovered_norm > 0);
    CHECK_THROWS_AS(rep.metric("betaw", "missing"), InvalidArgument);
}

TEST_CASE("end_to_end annotates stage failures") {
    auto c = small_config();
    c.space_factor = 5;
    try {
        end_to_end(c);
        FAIL("expected InvalidArgument");
    } catch (const InvalidArgument& e) {
        CHECK(std::string(e.what()).rfind("setup", 0) == 0);
    }
}
