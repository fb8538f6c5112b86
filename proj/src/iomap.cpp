#include "nlw/iomap.hpp"

#include "nlw/errors.hpp"
#include "nlw/field_io.hpp"
#include "nlw/operators.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>

namespace nlw {

IOData IOData::zeros(const SpaceTimeGrid& g) {
    return {LateralRecord::zeros(g), SpatialField(g.nx(), g.ny()), SpatialField(g.nx(), g.ny()),
            LateralRecord::zeros(g), SpatialField(g.nx(), g.ny())};
}

namespace {

template <class Op>
void zip_vec(std::vector<double>& x, const std::vector<double>& y, Op op) {
    if (x.size() != y.size()) throw GridMismatch("IOData records differ in shape");
    for (std::size_t n = 0; n < x.size(); ++n) x[n] = op(x[n], y[n]);
}

template <class Op>
void zip(IOData& a, const IOData& b, Op op) {
    for (std::size_t s = 0; s < 4; ++s) {
        zip_vec(a.lateral_flux.faces[s].v, b.lateral_flux.faces[s].v, op);
        zip_vec(a.scheme_flux.faces[s].v, b.scheme_flux.faces[s].v, op);
    }
    zip_vec(a.final_u.v, b.final_u.v, op);
    zip_vec(a.final_ut.v, b.final_ut.v, op);
    zip_vec(a.scheme_final_ut.v, b.scheme_final_ut.v, op);
}

} // namespace

IOData& IOData::operator+=(const IOData& o) {
    zip(*this, o, [](double x, double y) { return x + y; });
    return *this;
}

IOData& IOData::operator-=(const IOData& o) {
    zip(*this, o, [](double x, double y) { return x - y; });
    return *this;
}

IOData& IOData::operator*=(double s) noexcept {
    for (auto& f : lateral_flux.faces)
        for (double& x : f.v) x *= s;
    for (auto& f : scheme_flux.faces)
        for (double& x : f.v) x *= s;
    for (double& x : final_u.v) x *= s;
    for (double& x : final_ut.v) x *= s;
    for (double& x : scheme_final_ut.v) x *= s;
    return *this;
}

bool IOData::operator==(const IOData& o) const noexcept {
    for (std::size_t s = 0; s < 4; ++s)
        if (lateral_flux.faces[s].v != o.lateral_flux.faces[s].v || scheme_flux.faces[s].v != o.scheme_flux.faces[s].v)
            return false;
    return final_u.v == o.final_u.v && final_ut.v == o.final_ut.v && scheme_final_ut.v == o.scheme_final_ut.v;
}

void IOData::write(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    CsvWriter manifest(dir / "manifest.csv", {"record", "file", "dim0", "dim1"});
    for (Side s : all_sides) {
        const auto& f = lateral_flux[s];
        std::string name = s == Side::XMinus ? "xminus" : s == Side::XPlus ? "xplus" : s == Side::YMinus ? "yminus" : "yplus";
        std::string file = "flux_" + name + ".nlwf";
        write_face(dir / file, f);
        manifest.row({"lateral_flux_" + std::string(side_name(s)), file, std::to_string(f.nt), std::to_string(f.n)});
        const auto& sf = scheme_flux[s];
        std::string sfile = "scheme_flux_" + name + ".nlwf";
        write_face(dir / sfile, sf);
        manifest.row({"scheme_flux_" + std::string(side_name(s)), sfile, std::to_string(sf.nt), std::to_string(sf.n)});
    }
    write_spatial(dir / "final_u.nlwf", final_u);
    manifest.row({"final_u", "final_u.nlwf", std::to_string(final_u.ny), std::to_string(final_u.nx)});
    write_spatial(dir / "final_ut.nlwf", final_ut);
    manifest.row({"final_ut", "final_ut.nlwf", std::to_string(final_ut.ny), std::to_string(final_ut.nx)});
    write_spatial(dir / "scheme_final_ut.nlwf", scheme_final_ut);
    manifest.row({"scheme_final_ut", "scheme_final_ut.nlwf", std::to_string(scheme_final_ut.ny),
                  std::to_string(scheme_final_ut.nx)});
}

IOData operator+(IOData a, const IOData& b) { return a += b; }
IOData operator-(IOData a, const IOData& b) { return a -= b; }
IOData operator*(double s, IOData a) { return a *= s; }

double trace_norm(const SpaceTimeGrid& g, const IOData& d) {
    LateralRecord sq = d.lateral_flux;
    for (auto& f : sq.faces)
        for (double& x : f.v) x *= x;
    SpatialField u2 = d.final_u, ut2 = d.final_ut;
    for (double& x : u2.v) x *= x;
    for (double& x : ut2.v) x *= x;
    double s = integrate_lateral(g, sq) + integrate_omega(g, u2) + integrate_omega(g, ut2);
    return std::sqrt(std::max(0.0, s));
}

double relative_trace_error(const SpaceTimeGrid& g, const IOData& d, const IOData& ref) {
    double n = trace_norm(g, ref);
    double e = trace_norm(g, d - ref);
    return n > 0 ? e / n : e;
}

SpatialField final_time_derivative(const SpaceTimeScalarField& u) {
    const auto& g = u.grid();
    if (g.nt() < 3) throw GridTooSmall("final-time derivative needs 3 time levels");
    SpatialField out(g.nx(), g.ny());
    const std::size_t K = g.nt() - 1;
    const double *a = u.level(K), *b = u.level(K - 1), *c = u.level(K - 2);
    for (std::size_t p = 0; p < g.plane(); ++p) out.v[p] = (3 * a[p] - 4 * b[p] + c[p]) / (2 * g.dt());
    return out;
}

SpatialField final_backward_difference(const SpaceTimeScalarField& u) {
    const auto& g = u.grid();
    if (g.nt() < 2) throw GridTooSmall("final-time difference needs 2 time levels");
    SpatialField out(g.nx(), g.ny());
    const std::size_t K = g.nt() - 1;
    const double *a = u.level(K), *b = u.level(K - 1);
    for (std::size_t p = 0; p < g.plane(); ++p) out.v[p] = (a[p] - b[p]) / g.dt();
    return out;
}

IOData iodata_linear(const SpaceTimeScalarField& u) {
    return {neumann_trace_all(u), u.slice(u.grid().nt() - 1), final_time_derivative(u), neumann_trace_all(u, 1),
            final_backward_difference(u)};
}

namespace {

void add_normal_flux(IOData& d, const SpaceTimeVectorField& N) {
    for (Side s : all_sides) {
        auto nc = normal_component(N, s);
        auto& f = d.lateral_flux[s].v;
        auto& sf = d.scheme_flux[s].v;
        for (std::size_t n = 0; n < f.size(); ++n) {
            f[n] += nc.v[n];
            sf[n] += nc.v[n];
        }
    }
}

} // namespace

IOData iodata_from_solution(const CoefficientSet& coeffs, const SpaceTimeScalarField& u) {
    IOData d = iodata_linear(u);
    if (!coeffs.has_nonlinearity()) return d;
    add_normal_flux(d, flux_eval(coeffs, gradient_tx(u)));
    return d;
}

IOData compute_iomap(const SpaceTimeGrid& g, const CoefficientSet& coeffs, const InitialBoundaryData& data,
                     double eps, Scheme scheme, const NonlinearOptions& opt) {
    if (eps == 0) {
        check_data(g, data);
        return IOData::zeros(g);
    }
    return iodata_from_solution(coeffs, solve_nonlinear(scheme, g, coeffs, data, eps, opt));
}

IOData compute_linearized_iomap(const SpaceTimeGrid& g, const SpatialField& a, const InitialBoundaryData& data) {
    return iodata_linear(solve_linear_ibvp(g, a, data));
}

void DefectReport::write_csv(const std::filesystem::path& path) const {
    CsvWriter w(path, {"eps", "defect", "defect_over_eps"});
    for (const auto& r : rows) w.row({r.eps, r.defect, r.scaled});
}

DefectReport first_order_defect(const SpaceTimeGrid& g, const CoefficientSet& coeffs, const InitialBoundaryData& data,
                                const std::vector<double>& eps_list, Scheme scheme, const NonlinearOptions& opt) {
    const IOData lin = compute_linearized_iomap(g, coeffs.a, data);
    DefectReport rep;
    std::vector<std::pair<double, double>> pts;
    for (double eps : eps_list) {
        auto d = compute_iomap(g, coeffs, data, eps, scheme, opt) - eps * lin;
        DefectRow r{eps, trace_norm(g, d), 0};
        r.scaled = r.defect / eps;
        rep.rows.push_back(r);
        if (r.defect > 0) pts.emplace_back(eps, r.defect);
    }
    if (pts.size() >= 3) rep.fit = slope_fit(pts);
    return rep;
}

IOData second_order_quotient(const SpaceTimeGrid& g, const CoefficientSet& coeffs, const InitialBoundaryData& data,
                             const IOData& linear, double eps, Scheme scheme, const NonlinearOptions& opt) {
    auto d = compute_iomap(g, coeffs, data, eps, scheme, opt) - eps * linear;
    d *= 1.0 / (eps * eps);
    return d;
}

SecondOrderResult second_order_extract(const SpaceTimeGrid& g, const CoefficientSet& coeffs,
                                       const InitialBoundaryData& data, double eps, Scheme scheme,
                                       const NonlinearOptions& opt) {
    if (!(eps > 0)) throw InvalidArgument("second_order_extract needs eps > 0");
    const IOData lin = compute_linearized_iomap(g, coeffs.a, data);
    SecondOrderResult r;
    r.quotient_eps = second_order_quotient(g, coeffs, data, lin, eps, scheme, opt);
    r.quotient_half = second_order_quotient(g, coeffs, data, lin, eps / 2, scheme, opt);
    // A(e) = g2 + e g3 + O(e^2); this combination removes the e g3 term.
    r.g2 = 2.0 * r.quotient_half - r.quotient_eps;
    double ref = trace_norm(g, r.quotient_half);
    r.disagreement = ref > 0 ? trace_norm(g, r.quotient_eps - r.quotient_half) / ref : 0.0;
    r.warned = r.disagreement > 0.2;
    if (r.warned)
        std::cerr << "warning: second-order quotients at eps=" << eps << " and eps/2 disagree by "
                  << 100 * r.disagreement << "%; eps is probably outside the expansion radius\n";
    return r;
}

IOData direct_second_order_record(const CoefficientSet& coeffs, const SpaceTimeScalarField& u1,
                                  const SpaceTimeScalarField& u2) {
    IOData d = iodata_linear(u2);
    auto q1 = gradient_tx(u1);
    auto q1sq = dot(q1, q1);
    add_normal_flux(d, SpaceTimeVectorField(hadamard(q1sq, coeffs.b[0]), hadamard(q1sq, coeffs.b[1]),
                                            hadamard(q1sq, coeffs.b[2])));
    return d;
}

} // namespace nlw
