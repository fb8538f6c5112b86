#include "nlw/pipelines.hpp"

#include "nlw/acceptance.hpp"
#include "nlw/errors.hpp"
#include "nlw/field_io.hpp"
#include "nlw/iomap.hpp"
#include "nlw/lightray.hpp"
#include "nlw/operators.hpp"
#include "nlw/parallel.hpp"
#include "nlw/probes.hpp"
#include "nlw/recovery.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <fstream>

namespace nlw {

namespace {

constexpr double pi = 3.14159265358979323846;

namespace fs = std::filesystem;

struct Medium {
    ScenarioSpec spec;
    SpaceTimeGrid g;
    CoefficientSet coeffs;
    InitialBoundaryData data;
};

Medium medium_of(const Config& cfg) {
    Medium m;
    m.spec = cfg.scenario();
    m.g = make_grid(m.spec);
    m.coeffs = make_coefficients(m.g, m.spec);
    m.coeffs.validate();
    m.data = make_data(m.g, m.spec.data);
    return m;
}

void log(const RunOptions& opt, const std::string& line) {
    if (opt.log) *opt.log << line << std::endl;
}

void metric_csv(const fs::path& path, const std::vector<std::pair<std::string, double>>& rows) {
    CsvWriter w(path, {"metric", "value"});
    for (const auto& [name, value] : rows) w.row({name, format_real(value)});
}

int run_forward(const Config& cfg, const fs::path& dir, const RunOptions& opt) {
    auto m = medium_of(cfg);
    double eps = cfg.real("forward.eps");
    auto u = solve_nonlinear(cfg.scheme(), m.g, m.coeffs, m.data, eps, cfg.solver_options());
    write_field(dir / "u.nlwf", u);
    iodata_from_solution(m.coeffs, u).write(dir / "iodata");
    metric_csv(dir / "forward_summary.csv", {{"eps", eps}, {"max_abs_u", u.max_abs()}, {"l2_u", l2_qt(u)}});
    log(opt, "forward: max|u| = " + format_real(u.max_abs()));
    return 0;
}

int run_expand(const Config& cfg, const fs::path& dir, const RunOptions& opt) {
    auto m = medium_of(cfg);
    ExpansionOptions eo;
    eo.scheme = cfg.scheme();
    eo.solver = cfg.solver_options();
    eo.floor_factor = cfg.real("expand.floor_factor");
    auto eps = cfg.real_list("expand.eps_list");
    auto rep = epsilon_expand(m.g, m.coeffs, m.data, eps, eo);
    rep.write_csv(dir / "expansion_report.csv");
    log(opt, "expand: remainder slope " + format_real(rep.remainder.slope) + ", r2 " + format_real(rep.remainder.r2));
    double amp = cfg.real("expand.cubic_amp");
    if (amp != 0) {
        auto s = m.spec;
        s.r_amp = amp;
        auto cubic = epsilon_expand(m.g, make_coefficients(m.g, s), m.data, eps, eo);
        cubic.write_csv(dir / "expansion_report_cubic.csv");
        log(opt, "expand (cubic R): remainder slope " + format_real(cubic.remainder.slope));
    }
    return 0;
}

int run_iomap(const Config& cfg, const fs::path& dir, const RunOptions& opt) {
    auto m = medium_of(cfg);
    auto rep = first_order_defect(m.g, m.coeffs, m.data, cfg.real_list("iomap.eps_list"), cfg.scheme(), cfg.solver_options());
    rep.write_csv(dir / "iomap_defect.csv");
    auto u1 = solve_linear_ibvp(m.g, m.coeffs.a, m.data);
    auto direct = direct_second_order_record(m.coeffs, u1, solve_second_order(m.coeffs, u1));
    auto res = second_order_extract(m.g, m.coeffs, m.data, cfg.real("iomap.extract_eps"), cfg.scheme(), cfg.solver_options());
    res.g2.write(dir / "g2");
    direct.write(dir / "g2_direct");
    double err = relative_trace_error(m.g, res.g2, direct);
    metric_csv(dir / "iomap_summary.csv", {{"defect_slope", rep.fit.slope},
                                           {"defect_r2", rep.fit.r2},
                                           {"extraction_vs_direct", err},
                                           {"quotient_disagreement", res.disagreement},
                                           {"warned", res.warned ? 1.0 : 0.0}});
    log(opt, "iomap: defect slope " + format_real(rep.fit.slope) + ", extraction error " + format_real(err));
    return 0;
}

int run_identity(const Config& cfg, const fs::path& dir, const RunOptions& opt) {
    auto m = medium_of(cfg);
    auto rule = parse_pairing(cfg.word("recover.pairing"));
    auto u1 = solve_linear_ibvp(m.g, m.coeffs.a, m.data);
    auto known = direct_second_order_record(m.coeffs, u1, solve_second_order(m.coeffs, u1));
    auto equal = known - direct_second_order_record(make_coefficients(m.g, m.spec), u1,
                                                    solve_second_order(make_coefficients(m.g, m.spec), u1));
    std::size_t n = cfg.count("identity.probes");
    double h = cfg.real("identity.go_h"), radius = cfg.real("identity.go_radius");
    std::vector<std::vector<double>> rows(n);
    parallel_for(n, opt.jobs, [&](std::size_t p) {
        double ang = 2 * pi * double(p / 2) / double((n + 1) / 2) + 0.1;
        BumpProfile prof{0.35 + 0.3 * double(p % 3) / 2, 0.4 + 0.2 * double(p % 2), radius};
        auto pair = build_go_pair(m.g, m.coeffs.a, unit_direction(ang), h, prof);
        const auto& w = p % 2 ? pair.u_minus : pair.u_plus;
        double D = assemble_identity_data(known, w, rule);
        double ref = direct_identity_integral(m.coeffs.b, w, u1, u1);
        double floor = 64 * DBL_EPSILON * std::max(std::abs(D), 1.0);
        rows[p] = {double(p), ang, D, ref, ref != 0 ? std::abs(D - ref) / std::abs(ref) : 0.0,
                   assemble_identity_data(equal, w, rule), floor};
    });
    CsvWriter w(dir / "identity_report.csv", {"probe", "angle", "D", "direct", "relative_error", "equal_media_D", "floor"});
    double worst = 0;
    for (const auto& r : rows) {
        w.row({r[0], r[1], r[2], r[3], r[4], r[5], r[6]});
        worst = std::max(worst, r[4]);
    }
    log(opt, "identity: worst relative error " + format_real(worst));
    return 0;
}

int run_probes(const Config& cfg, const fs::path& dir, const RunOptions& opt) {
    auto m = medium_of(cfg);
    double lambda = cfg.real("probes.lambda");
    int order = int(cfg.integer("probes.order"));
    auto dirs = reference_directions();
    std::vector<WKBProbe> wkb(dirs.size());
    parallel_for(dirs.size(), opt.jobs, [&](std::size_t j) { wkb[j] = build_wkb(m.g, m.coeffs.a, dirs[j], lambda, order); });
    CsvWriter w(dir / "probes_report.csv", {"kind", "index", "omega_x", "omega_y", "parameter", "metric", "value"});
    for (std::size_t j = 0; j < wkb.size(); ++j) {
        write_field(dir / ("wkb_" + std::to_string(j) + "_re.nlwf"), wkb[j].v_re);
        write_field(dir / ("wkb_" + std::to_string(j) + "_im.nlwf"), wkb[j].v_im);
        w.row({"wkb", std::to_string(j), format_real(dirs[j][0]), format_real(dirs[j][1]), format_real(lambda),
               "amplitude_sum_residual", format_real(wkb_sum_residual(wkb[j]))});
    }
    std::vector<const WKBProbe*> ptr{&wkb[0], &wkb[1], &wkb[2]};
    auto grads = wkb_probe_gradients(ptr);
    std::vector<SpaceTimeScalarField> zero(grads.size(), SpaceTimeScalarField(m.g));
    auto rec = recover_b_pointwise(zero, grads, cfg.real("probes.condition_cap"));
    write_field(dir / "condition.nlwf", rec.condition);
    double det_min = 1e300, det_max = 0;
    for (std::size_t k = 1; k + 1 < m.g.nt(); k += 4)
        for (std::size_t j = 1; j + 1 < m.g.ny(); j += 4)
            for (std::size_t i = 1; i + 1 < m.g.nx(); i += 4) {
                double d = std::abs(gradient_matrix_det(ptr, m.g.t(k), m.g.x(i), m.g.y(j)));
                det_min = std::min(det_min, d);
                det_max = std::max(det_max, d);
            }
    w.row({"triple", "0", "0", "0", format_real(lambda), "scaled_det_min", format_real(det_min)});
    w.row({"triple", "0", "0", "0", format_real(lambda), "scaled_det_max", format_real(det_max)});
    w.row({"triple", "0", "0", "0", format_real(lambda), "interior_unmasked_fraction", format_real(rec.interior_fraction)});

    BumpProfile prof{0.5, 0.5, cfg.real("probes.go_radius")};
    double h = cfg.real("probes.go_h");
    auto pair = build_go_pair(m.g, m.coeffs.a, dirs[0], h, prof);
    write_field(dir / "go_plus.nlwf", pair.u_plus);
    write_field(dir / "go_minus.nlwf", pair.u_minus);
    for (const auto* p : {&pair.plus, &pair.minus})
        w.row({"go", p->sign > 0 ? "plus" : "minus", format_real(dirs[0][0]), format_real(dirs[0][1]), format_real(h),
               "corrector_bound", format_real(go_corrector_bound(*p))});
    log(opt, "probes: interior unmasked fraction " + format_real(rec.interior_fraction));
    return 0;
}

int run_lightray(const Config& cfg, const fs::path& dir, const RunOptions& opt) {
    auto m = medium_of(cfg);
    auto beta = bump_scalar(m.g, m.spec.b, 1.0);
    write_field(dir / "beta.nlwf", beta);
    write_raydata(dir / "raydata.csv", sample_rays(beta, cfg.count("lightray.n_omega"), cfg.count("lightray.n_base")));
    Direction w = unit_direction(cfg.real("lightray.angle"));
    std::vector<std::array<double, 3>> zetas;
    for (auto e : {std::array<double, 2>{0, 0}, {2, 0}, {0, 3}, {1.5, -1}, {-2.5, 2}})
        zetas.push_back({-(e[0] * w[0] + e[1] * w[1]), e[0], e[1]});
    auto slice = fourier_slice_check(beta, w, zetas);
    slice.write_csv(dir / "fourier_slice.csv");
    BumpProfile prof{m.spec.b.cx, m.spec.b.cy, cfg.real("lightray.tube_radius")};
    auto conc = concentration_extract(beta, m.coeffs.a, w, cfg.real_list("lightray.h_list"), prof);
    conc.write_csv(dir / "concentration.csv");
    log(opt, "lightray: slice discrepancy " + format_real(slice.max_discrepancy()) + ", concentration order " +
                 format_real(conc.order));
    return 0;
}

int run_recover(const Config& cfg, const fs::path& dir, const RunOptions& opt) {
    auto c = cfg.end_to_end();
    c.jobs = opt.jobs;
    auto rep = end_to_end(c);
    rep.write(dir);
    log(opt, "recover: relative L2 error " + format_real(rep.relative_error) + ", recovered norm " +
                 format_real(rep.recovered_norm));
    return 0;
}

int run_report(const Config& cfg, const fs::path& dir, const RunOptions& opt) {
    std::vector<CriterionResult> results;
    for (double id : cfg.real_list("report.criteria")) {
        auto r = evaluate_criterion(int(id), cfg, opt.jobs);
        log(opt, std::string(r.pass ? "PASS" : "FAIL") + " criterion " + std::to_string(r.id) + " (" + r.name + ", " +
                     format_real(std::round(r.seconds * 10) / 10) + " s)" + (r.detail.empty() ? "" : ": " + r.detail));
        results.push_back(std::move(r));
    }
    write_acceptance_csv(dir / "acceptance_report.csv", results);
    bool pass = std::all_of(results.begin(), results.end(), [](const CriterionResult& r) { return r.pass; });
    return pass ? 0 : 4;
}

} // namespace

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names{"forward", "expand", "iomap", "identity",
                                                "probes", "lightray", "recover", "report"};
    return names;
}

fs::path output_directory(const fs::path& root, const std::string& subcommand, const Config& cfg) {
    return root / (subcommand + "-" + cfg.hash_hex());
}

int run_subcommand(const std::string& subcommand, const Config& cfg, const fs::path& dir, const RunOptions& opt) {
    const auto& names = subcommands();
    if (std::find(names.begin(), names.end(), subcommand) == names.end())
        throw ConfigError("unknown subcommand '" + subcommand + "'");
    cfg.validate();
    fs::create_directories(dir);
    {
        std::ofstream out(dir / "config.ini", std::ios::binary);
        out << cfg.canonical();
        if (!out) throw IoError("cannot write " + (dir / "config.ini").string());
    }
    if (subcommand == "forward") return run_forward(cfg, dir, opt);
    if (subcommand == "expand") return run_expand(cfg, dir, opt);
    if (subcommand == "iomap") return run_iomap(cfg, dir, opt);
    if (subcommand == "identity") return run_identity(cfg, dir, opt);
    if (subcommand == "probes") return run_probes(cfg, dir, opt);
    if (subcommand == "lightray") return run_lightray(cfg, dir, opt);
    if (subcommand == "recover") return run_recover(cfg, dir, opt);
    return run_report(cfg, dir, opt);
}

} // namespace nlw
