#include "nlw/recovery.hpp"

#include "nlw/errors.hpp"
#include "nlw/field_io.hpp"
#include "nlw/operators.hpp"
#include "nlw/parallel.hpp"
#include "nlw/wave_linear.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace nlw {

PairingRule parse_pairing(const std::string& s) {
    if (s == "scheme") return PairingRule::Scheme;
    if (s == "continuum") return PairingRule::Continuum;
    throw InvalidArgument("unknown pairing rule '" + s + "' (expected scheme or continuum)");
}

namespace {

void require_record_shape(const IOData& g2, const SpaceTimeGrid& g) {
    if (g2.final_u.nx != g.nx() || g2.final_u.ny != g.ny() || g2.scheme_final_ut.v.size() != g.plane())
        throw GridMismatch("identity data and probe live on different grids");
    for (Side s : all_sides)
        if (g2.lateral_flux[s].nt != g.nt() || g2.scheme_flux[s].v.size() != g2.lateral_flux[s].v.size())
            throw GridMismatch("identity data and probe live on different grids");
}

bool x_face(Side s) noexcept { return s == Side::XMinus || s == Side::XPlus; }

// Lateral and final parts of the pairing for given records.
double pair_records(const LateralRecord& flux, const SpatialField& final_u, const SpatialField& final_ut,
                    const SpaceTimeScalarField& w, PairingRule rule) {
    const auto& g = w.grid();
    const std::size_t K = g.nt() - 1;
    auto wl = lateral_trace_all(w);
    if (rule == PairingRule::Continuum) {
        LateralRecord prod = wl;
        for (Side s : all_sides)
            for (std::size_t n = 0; n < prod[s].v.size(); ++n) prod[s].v[n] *= flux[s].v[n];
        auto wT = w.slice(K);
        auto wtT = final_time_derivative(w);
        SpatialField f(g.nx(), g.ny());
        for (std::size_t p = 0; p < g.plane(); ++p) f.v[p] = final_ut.v[p] * wT.v[p] - final_u.v[p] * wtT.v[p];
        return integrate_lateral(g, prod) - integrate_omega(g, f);
    }
    KahanSum lat;
    for (Side s : all_sides) {
        const auto& fw = wl[s];
        const auto& ff = flux[s];
        const double ds = x_face(s) ? g.dy() : g.dx();
        for (std::size_t k = 1; k < K; ++k)
            for (std::size_t m = 1; m + 1 < fw.n; ++m) lat.add(g.dt() * ds * fw(k, m) * ff(k, m));
    }
    auto wbd = final_backward_difference(w);
    const double* wT = w.level(K);
    KahanSum fin;
    for (std::size_t j = 1; j + 1 < g.ny(); ++j)
        for (std::size_t i = 1; i + 1 < g.nx(); ++i) {
            std::size_t p = j * g.nx() + i;
            fin.add(g.dx() * g.dy() * (final_ut.v[p] * wT[p] - final_u.v[p] * wbd.v[p]));
        }
    return lat.value() - fin.value();
}

const LateralRecord& flux_of(const IOData& d, PairingRule rule) {
    return rule == PairingRule::Scheme ? d.scheme_flux : d.lateral_flux;
}

const SpatialField& ut_of(const IOData& d, PairingRule rule) {
    return rule == PairingRule::Scheme ? d.scheme_final_ut : d.final_ut;
}

} // namespace

double assemble_identity_data(const IOData& g2, const SpaceTimeScalarField& w, PairingRule rule) {
    require_record_shape(g2, w.grid());
    return pair_records(flux_of(g2, rule), g2.final_u, ut_of(g2, rule), w, rule);
}

double assemble_identity_data(const IOData& g2, const SpaceTimeScalarField& w, const SpaceTimeScalarField& u1,
                              const SpaceTimeVectorField& b_lateral, PairingRule rule) {
    require_record_shape(g2, w.grid());
    require_same_grid(u1.grid(), w.grid(), "identity u1");
    require_same_grid(b_lateral.grid(), w.grid(), "identity b");
    auto q = gradient_tx(u1);
    auto q2 = dot(q, q);
    SpaceTimeVectorField P(hadamard(q2, b_lateral[0]), hadamard(q2, b_lateral[1]), hadamard(q2, b_lateral[2]));
    LateralRecord flux = flux_of(g2, rule);
    for (Side s : all_sides) {
        auto nc = normal_component(P, s);
        for (std::size_t n = 0; n < nc.v.size(); ++n) flux[s].v[n] += nc.v[n];
    }
    return pair_records(flux, g2.final_u, ut_of(g2, rule), w, rule);
}

SpaceTimeScalarField betaw_field(const SpaceTimeVectorField& b, const SpaceTimeScalarField& w) {
    require_same_grid(b.grid(), w.grid(), "beta_w");
    auto gw = gradient_tx(w);
    return dot(b, gw);
}

double direct_identity_integral(const SpaceTimeVectorField& b, const SpaceTimeScalarField& w,
                                const SpaceTimeScalarField& u1a, const SpaceTimeScalarField& u1b) {
    require_same_grid(u1a.grid(), w.grid(), "direct identity u1a");
    require_same_grid(u1b.grid(), w.grid(), "direct identity u1b");
    auto W = dot(gradient_tx(u1a), gradient_tx(u1b));
    return integrate_qt(hadamard(betaw_field(b, w), W));
}

double polarize(double identity_sum, double identity_difference) noexcept {
    return 0.25 * (identity_sum - identity_difference);
}

double polarize(const IOData& g2_sum, const IOData& g2_difference, const SpaceTimeScalarField& w, PairingRule rule) {
    return polarize(assemble_identity_data(g2_sum, w, rule), assemble_identity_data(g2_difference, w, rule));
}

IOData bilinear_second_order_record(const CoefficientSet& coeffs, const SpaceTimeScalarField& u1a,
                                    const SpaceTimeScalarField& u1b) {
    const auto& g = coeffs.grid();
    require_same_grid(u1a.grid(), g, "bilinear record u1a");
    require_same_grid(u1b.grid(), g, "bilinear record u1b");
    auto W = dot(gradient_tx(u1a), gradient_tx(u1b));
    SpaceTimeVectorField P(hadamard(W, coeffs.b[0]), hadamard(W, coeffs.b[1]), hadamard(W, coeffs.b[2]));
    auto F = divergence_tx(P);
    auto u2 = solve_linear_ibvp(g, coeffs.a, InitialBoundaryData::zeros(g), &F);
    IOData d = iodata_linear(u2);
    for (Side s : all_sides) {
        auto nc = normal_component(P, s);
        for (std::size_t n = 0; n < nc.v.size(); ++n) {
            d.lateral_flux[s].v[n] += nc.v[n];
            d.scheme_flux[s].v[n] += nc.v[n];
        }
    }
    return d;
}

SpaceTimeScalarField solver_grade(const SpaceTimeScalarField& v, const SpatialField& a) {
    const auto& g = v.grid();
    auto F = discrete_residual(v, a);
    F *= -1.0;
    auto z = solve_linear_ibvp(g, a, InitialBoundaryData::zeros(g), &F);
    z += v;
    return z;
}

SpaceTimeGrid recovery_grid(const SpaceTimeGrid& fine, std::size_t space_factor, std::size_t time_factor) {
    if (space_factor == 0 || time_factor == 0) throw InvalidArgument("recovery factors must be positive");
    if ((fine.nx() - 1) % space_factor || (fine.ny() - 1) % space_factor || (fine.nt() - 1) % time_factor) {
        std::ostringstream os;
        os << "simulation grid " << fine.describe() << " is not divisible by recovery factors " << space_factor
           << " (space) and " << time_factor << " (time)";
        throw InvalidArgument(os.str());
    }
    std::size_t nx = (fine.nx() - 1) / space_factor + 1, ny = (fine.ny() - 1) / space_factor + 1,
                nt = (fine.nt() - 1) / time_factor + 1;
    if (nx < 2 || ny < 2 || nt < 2) throw GridTooSmall("recovery grid needs at least 2 nodes per axis");
    return SpaceTimeGrid(nx, ny, nt, fine.Lx(), fine.Ly(), fine.T(), fine.cfl_safety());
}

SpaceTimeScalarField restrict_field(const SpaceTimeScalarField& f, const SpaceTimeGrid& coarse) {
    const auto& g = f.grid();
    if (coarse.nx() < 2 || (g.nx() - 1) % (coarse.nx() - 1) || (g.ny() - 1) % (coarse.ny() - 1) ||
        (g.nt() - 1) % (coarse.nt() - 1) || coarse.Lx() != g.Lx() || coarse.Ly() != g.Ly() || coarse.T() != g.T())
        throw GridMismatch("recovery grid " + coarse.describe() + " is not nested in " + g.describe());
    std::size_t fx = (g.nx() - 1) / (coarse.nx() - 1), fy = (g.ny() - 1) / (coarse.ny() - 1),
                ft = (g.nt() - 1) / (coarse.nt() - 1);
    SpaceTimeScalarField out(coarse);
    for (std::size_t k = 0; k < coarse.nt(); ++k)
        for (std::size_t j = 0; j < coarse.ny(); ++j)
            for (std::size_t i = 0; i < coarse.nx(); ++i) out(k, j, i) = f(k * ft, j * fy, i * fx);
    return out;
}

BetawSystem::BetawSystem(const SpaceTimeGrid& fine, std::size_t space_factor, std::size_t time_factor,
                         std::size_t n_rhs)
    : fine_(fine), coarse_(recovery_grid(fine, space_factor, time_factor)), fs_(space_factor), ft_(time_factor),
      n_rhs_(n_rhs) {
    if (n_rhs == 0) throw InvalidArgument("need at least one right-hand side");
    auto wt = trapezoid_weights(fine.nt(), fine.dt()), wx = trapezoid_weights(fine.nx(), fine.dx()),
         wy = trapezoid_weights(fine.ny(), fine.dy());
    quad_.resize(fine.size());
    for (std::size_t k = 0; k < fine.nt(); ++k)
        for (std::size_t j = 0; j < fine.ny(); ++j)
            for (std::size_t i = 0; i < fine.nx(); ++i) quad_[fine.index(k, j, i)] = wt[k] * wy[j] * wx[i];
}

std::vector<double> BetawSystem::project(const SpaceTimeScalarField& weight) const {
    require_same_grid(weight.grid(), fine_, "beta_w weight");
    std::vector<double> row(coarse_.size(), 0.0);
    const std::size_t cnx = coarse_.nx(), cny = coarse_.ny(), cnt = coarse_.nt();
    for (std::size_t k = 0; k < fine_.nt(); ++k) {
        std::size_t K = k / ft_;
        double rk = double(k % ft_) / double(ft_);
        for (std::size_t j = 0; j < fine_.ny(); ++j) {
            std::size_t J = j / fs_;
            double rj = double(j % fs_) / double(fs_);
            for (std::size_t i = 0; i < fine_.nx(); ++i) {
                std::size_t n = fine_.index(k, j, i);
                double q = quad_[n] * weight.values()[n];
                if (q == 0) continue;
                std::size_t I = i / fs_;
                double ri = double(i % fs_) / double(fs_);
                for (int c = 0; c < 8; ++c) {
                    double f = ((c & 4) ? rk : 1 - rk) * ((c & 2) ? rj : 1 - rj) * ((c & 1) ? ri : 1 - ri);
                    if (f == 0) continue;
                    std::size_t kk = K + ((c & 4) ? 1 : 0), jj = J + ((c & 2) ? 1 : 0), ii = I + ((c & 1) ? 1 : 0);
                    if (kk >= cnt || jj >= cny || ii >= cnx) continue;
                    row[(kk * cny + jj) * cnx + ii] += f * q;
                }
            }
        }
    }
    return row;
}

void BetawSystem::add_row(std::vector<double> row, const std::vector<double>& values) {
    if (row.size() != coarse_.size()) throw InvalidArgument("row length does not match the recovery grid");
    if (values.size() != n_rhs_) throw InvalidArgument("need one value per right-hand side");
    rows_.insert(rows_.end(), row.begin(), row.end());
    values_.insert(values_.end(), values.begin(), values.end());
}

void BetawSystem::add(const SpaceTimeScalarField& weight, const std::vector<double>& values) {
    add_row(project(weight), values);
}

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Largest eigenvalue of a symmetric positive semidefinite matrix by power
// iteration from a fixed start vector.
double largest_eigenvalue(const Eigen::MatrixXd& G) {
    const auto n = G.rows();
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = 1.0 + 1e-3 * double(i % 7);
    v.normalize();
    double lambda = 0;
    for (int it = 0; it < 1000; ++it) {
        Eigen::VectorXd z = G * v;
        double next = v.dot(z);
        double nz = z.norm();
        if (nz == 0) return 0;
        v = z / nz;
        if (it > 5 && std::abs(next - lambda) <= 1e-10 * std::abs(next)) return next;
        lambda = next;
    }
    return lambda;
}

} // namespace

BetawSolution BetawSystem::solve(double ridge_rel) const {
    if (!(ridge_rel >= 0)) throw InvalidArgument("ridge parameter must be non-negative");
    const auto m = Eigen::Index(measurements()), n = Eigen::Index(unknowns()), r = Eigen::Index(n_rhs_);
    if (m == 0) throw InvalidArgument("beta_w system has no measurements");
    if (ridge_rel == 0 && m < n) {
        std::ostringstream os;
        os << "beta_w system is underdetermined: " << m << " measurements for " << n
           << " unknowns; add measurements or use a positive ridge parameter";
        throw InvalidArgument(os.str());
    }
    Eigen::Map<const RowMatrix> A(rows_.data(), m, n);
    Eigen::Map<const RowMatrix> V(values_.data(), m, r);

    BetawSolution sol;
    Eigen::MatrixXd X;
    if (m <= n) {
        Eigen::MatrixXd G = A * A.transpose();
        sol.sigma_max_sq = largest_eigenvalue(G);
        sol.ridge = ridge_rel * sol.sigma_max_sq;
        G.diagonal().array() += sol.ridge;
        Eigen::LDLT<Eigen::MatrixXd> f(G);
        if (f.info() != Eigen::Success) throw NumericalFailure("beta_w Gram matrix factorization failed");
        X = A.transpose() * f.solve(Eigen::MatrixXd(V));
    } else {
        Eigen::MatrixXd G = A.transpose() * A;
        sol.sigma_max_sq = largest_eigenvalue(G);
        sol.ridge = ridge_rel * sol.sigma_max_sq;
        G.diagonal().array() += sol.ridge;
        Eigen::LDLT<Eigen::MatrixXd> f(G);
        if (f.info() != Eigen::Success) throw NumericalFailure("beta_w normal equations factorization failed");
        X = f.solve(A.transpose() * V);
    }
    if (!X.allFinite()) throw NumericalFailure("beta_w solution is not finite");
    Eigen::MatrixXd res = A * X - V;
    for (Eigen::Index c = 0; c < r; ++c) {
        double vn = V.col(c).norm();
        sol.residual.push_back(vn > 0 ? res.col(c).norm() / vn : res.col(c).norm());
        SpaceTimeScalarField f(coarse_);
        for (Eigen::Index i = 0; i < n; ++i) f.values()[std::size_t(i)] = X(i, c);
        sol.fields.push_back(std::move(f));
    }
    return sol;
}

SpaceTimeScalarField betaw_direct(const std::vector<IdentityMeasurement>& data, std::size_t space_factor,
                                  std::size_t time_factor, double ridge_rel) {
    if (data.empty()) throw InvalidArgument("betaw_direct needs at least one identity measurement");
    BetawSystem sys(data.front().weight.grid(), space_factor, time_factor, 1);
    for (const auto& d : data) sys.add(d.weight, {d.value});
    return sys.solve(ridge_rel).fields.front();
}

PointwiseRecovery recover_b_pointwise(const std::vector<SpaceTimeScalarField>& betaw,
                                      const std::vector<SpaceTimeVectorField>& grad_w, double condition_cap) {
    if (betaw.size() != grad_w.size()) throw InvalidArgument("need one gradient per beta_w field");
    if (betaw.size() < 3) throw InvalidArgument("pointwise recovery needs at least 3 probe fields");
    if (!(condition_cap >= 1)) throw InvalidArgument("condition cap must be at least 1");
    const auto& g = betaw.front().grid();
    for (std::size_t j = 0; j < betaw.size(); ++j) {
        require_same_grid(betaw[j].grid(), g, "pointwise recovery beta_w");
        require_same_grid(grad_w[j].grid(), g, "pointwise recovery gradient");
    }
    const auto m = Eigen::Index(betaw.size());
    PointwiseRecovery out;
    out.b = SpaceTimeVectorField(SpaceTimeScalarField(g), SpaceTimeScalarField(g), SpaceTimeScalarField(g));
    out.mask = SpaceTimeScalarField(g);
    out.condition = SpaceTimeScalarField(g);
    out.total = g.size();
    std::size_t interior = 0, interior_ok = 0;
    Eigen::MatrixXd M(m, 3);
    Eigen::VectorXd rhs(m);
    for (std::size_t k = 0; k < g.nt(); ++k)
        for (std::size_t j = 0; j < g.ny(); ++j)
            for (std::size_t i = 0; i < g.nx(); ++i) {
                for (Eigen::Index r = 0; r < m; ++r) {
                    for (std::size_t d = 0; d < 3; ++d) M(r, Eigen::Index(d)) = grad_w[std::size_t(r)][d](k, j, i);
                    rhs[r] = betaw[std::size_t(r)](k, j, i);
                }
                Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
                const auto& s = svd.singularValues();
                double cond = s[2] > 0 ? s[0] / s[2] : std::numeric_limits<double>::infinity();
                out.condition(k, j, i) = cond;
                bool inner = k > 0 && k + 1 < g.nt() && j > 0 && j + 1 < g.ny() && i > 0 && i + 1 < g.nx();
                if (inner) ++interior;
                if (!(cond <= condition_cap)) continue;
                Eigen::Vector3d x = svd.solve(rhs);
                for (std::size_t d = 0; d < 3; ++d) out.b[d](k, j, i) = x[Eigen::Index(d)];
                out.mask(k, j, i) = 1;
                ++out.unmasked;
                if (inner) ++interior_ok;
            }
    out.interior_fraction = interior ? double(interior_ok) / double(interior) : 0.0;
    if (out.unmasked == 0) throw NumericalFailure("every recovery point exceeds the condition cap");
    return out;
}

std::vector<SpaceTimeVectorField> wkb_probe_gradients(const std::vector<const WKBProbe*>& probes) {
    std::vector<SpaceTimeVectorField> out;
    for (const WKBProbe* p : probes) {
        const auto& g = p->grid();
        SpaceTimeVectorField re{SpaceTimeScalarField(g), SpaceTimeScalarField(g), SpaceTimeScalarField(g)};
        SpaceTimeVectorField im = re;
        for (std::size_t k = 0; k < g.nt(); ++k)
            for (std::size_t j = 0; j < g.ny(); ++j)
                for (std::size_t i = 0; i < g.nx(); ++i) {
                    auto r = wkb_gradient(*p, k, j, i);
                    for (std::size_t d = 0; d < 3; ++d) {
                        re[d](k, j, i) = r[d].real();
                        im[d](k, j, i) = r[d].imag();
                    }
                }
        out.push_back(std::move(re));
        out.push_back(std::move(im));
    }
    return out;
}

double masked_relative_error(const SpaceTimeVectorField& estimate, const SpaceTimeVectorField& truth,
                             const SpaceTimeScalarField& mask) {
    const auto& g = truth.grid();
    require_same_grid(estimate.grid(), g, "masked error estimate");
    require_same_grid(mask.grid(), g, "masked error mask");
    auto wt = trapezoid_weights(g.nt(), g.dt()), wx = trapezoid_weights(g.nx(), g.dx()),
         wy = trapezoid_weights(g.ny(), g.dy());
    KahanSum num, den;
    for (std::size_t k = 0; k < g.nt(); ++k)
        for (std::size_t j = 0; j < g.ny(); ++j)
            for (std::size_t i = 0; i < g.nx(); ++i) {
                if (mask(k, j, i) == 0) continue;
                double q = wt[k] * wy[j] * wx[i];
                for (std::size_t d = 0; d < 3; ++d) {
                    double e = estimate[d](k, j, i) - truth[d](k, j, i);
                    num.add(q * e * e);
                    den.add(q * truth[d](k, j, i) * truth[d](k, j, i));
                }
            }
    double dn = std::sqrt(std::max(0.0, den.value())), nn = std::sqrt(std::max(0.0, num.value()));
    return dn > 0 ? nn / dn : std::numeric_limits<double>::quiet_NaN();
}

double UniquenessReport::metric(const std::string& stage, const std::string& name) const {
    for (const auto& r : rows)
        if (r.stage == stage && r.metric == name) return r.value;
    throw InvalidArgument("report has no metric " + stage + "/" + name);
}

void UniquenessReport::write(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "uniqueness_report.csv");
        if (!out) throw IoError("cannot write " + (dir / "uniqueness_report.csv").string());
        out << "stage,metric,value\n";
        for (const auto& r : rows) out << r.stage << ',' << r.metric << ',' << format_real(r.value) << '\n';
    }
    const char* names[3] = {"t", "x", "y"};
    for (std::size_t d = 0; d < 3; ++d) {
        write_field(dir / ("b_recovered_" + std::string(names[d]) + ".nlwf"), b_recovered[d]);
        write_field(dir / ("b_difference_" + std::string(names[d]) + ".nlwf"), b_difference[d]);
    }
    write_field(dir / "recovery_mask.nlwf", mask);
}

namespace {

template <class Fn>
auto run_stage(const std::string& stage, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const NumericalFailure& e) {
        throw NumericalFailure(stage + ": " + e.what());
    } catch (const GridMismatch& e) {
        throw GridMismatch(stage + ": " + e.what());
    } catch (const GridTooSmall& e) {
        throw GridTooSmall(stage + ": " + e.what());
    } catch (const CflViolation& e) {
        throw CflViolation(stage + ": " + e.what());
    } catch (const InvalidArgument& e) {
        throw InvalidArgument(stage + ": " + e.what());
    } catch (const Error& e) {
        throw Error(stage + ": " + e.what());
    }
}

struct GOEntry {
    Direction omega;
    BumpProfile profile;
};

// Profiles whose tube x = c - t w meets Omega, on a lattice covering Omega + [0,T]w.
std::vector<GOEntry> go_battery(const SpaceTimeGrid& g, std::size_t n_dir, double radius, double spacing) {
    if (n_dir == 0) throw InvalidArgument("GO battery needs at least one direction");
    if (!(radius > 0) || !(spacing > 0)) throw InvalidArgument("GO radius and spacing must be positive");
    std::vector<GOEntry> out;
    for (std::size_t d = 0; d < n_dir; ++d) {
        Direction w = unit_direction(2 * M_PI * double(d) / double(n_dir));
        double x0 = std::min(0.0, g.T() * w[0]) - radius, x1 = g.Lx() + std::max(0.0, g.T() * w[0]) + radius;
        double y0 = std::min(0.0, g.T() * w[1]) - radius, y1 = g.Ly() + std::max(0.0, g.T() * w[1]) + radius;
        auto nx = std::size_t(std::floor((x1 - x0) / spacing + 1e-9)) + 1;
        auto ny = std::size_t(std::floor((y1 - y0) / spacing + 1e-9)) + 1;
        for (std::size_t j = 0; j < ny; ++j)
            for (std::size_t i = 0; i < nx; ++i) {
                double cx = x0 + double(i) * spacing, cy = y0 + double(j) * spacing;
                bool hit = false;
                for (std::size_t k = 0; k < g.nt() && !hit; ++k) {
                    double px = cx - g.t(k) * w[0], py = cy - g.t(k) * w[1];
                    double dx = std::max({0.0, -px, px - g.Lx()}), dy = std::max({0.0, -py, py - g.Ly()});
                    hit = dx * dx + dy * dy < radius * radius;
                }
                if (hit) out.push_back({w, BumpProfile{cx, cy, radius}});
            }
    }
    return out;
}

double l2_vector(const SpaceTimeVectorField& v, const SpaceTimeScalarField* mask) {
    const auto& g = v.grid();
    auto wt = trapezoid_weights(g.nt(), g.dt()), wx = trapezoid_weights(g.nx(), g.dx()),
         wy = trapezoid_weights(g.ny(), g.dy());
    KahanSum acc;
    for (std::size_t k = 0; k < g.nt(); ++k)
        for (std::size_t j = 0; j < g.ny(); ++j)
            for (std::size_t i = 0; i < g.nx(); ++i) {
                if (mask && (*mask)(k, j, i) == 0) continue;
                double q = wt[k] * wy[j] * wx[i];
                for (std::size_t d = 0; d < 3; ++d) acc.add(q * v[d](k, j, i) * v[d](k, j, i));
            }
    return std::sqrt(std::max(0.0, acc.value()));
}

SpaceTimeVectorField restrict_vector(const SpaceTimeVectorField& v, const SpaceTimeGrid& coarse) {
    return SpaceTimeVectorField(restrict_field(v[0], coarse), restrict_field(v[1], coarse), restrict_field(v[2], coarse));
}

} // namespace

std::vector<Direction> probe_directions(std::size_t n) {
    if (n != 3 && n != 6) throw InvalidArgument("probe direction count must be 3 or 6");
    auto ref = reference_directions();
    std::vector<Direction> out(ref.begin(), ref.end());
    if (n == 6)
        for (const auto& d : ref) out.push_back({-d[0], -d[1]});
    return out;
}

UniquenessReport end_to_end(const EndToEndConfig& cfg) {
    UniquenessReport rep;
    auto add = [&rep](const std::string& stage, const std::string& metric, double v) {
        rep.rows.push_back({stage, metric, v});
    };

    // Media sharing the potential.
    SpaceTimeGrid g;
    CoefficientSet m1, m2;
    run_stage("setup", [&] {
        g = make_grid(cfg.scenario);
        m1 = make_coefficients(g, cfg.scenario);
        ScenarioSpec s2 = cfg.scenario;
        s2.b = cfg.b2;
        s2.r_amp = cfg.r2_amp;
        m2 = make_coefficients(g, s2);
        m1.validate();
        m2.validate();
        recovery_grid(g, cfg.space_factor, cfg.time_factor);
        return 0;
    });
    double diameter = std::hypot(g.Lx(), g.Ly());
    rep.diameter_ok = g.T() > diameter;
    add("setup", "T", g.T());
    add("setup", "diameter", diameter);
    add("setup", "T_exceeds_diameter", rep.diameter_ok ? 1.0 : 0.0);
    SpaceTimeVectorField bdiff = m1.b;
    for (std::size_t d = 0; d < 3; ++d) bdiff[d] -= m2.b[d];

    // Solver-grade probes: real and imaginary parts of one WKB field per direction.
    std::vector<SpaceTimeScalarField> w;
    run_stage("probes", [&] {
        auto dirs = probe_directions(cfg.wkb_directions);
        std::vector<SpaceTimeScalarField> slots(2 * dirs.size());
        parallel_for(dirs.size(), cfg.jobs, [&](std::size_t j) {
            auto p = build_wkb(g, m1.a, dirs[j], cfg.wkb_lambda, cfg.wkb_order);
            slots[2 * j] = solver_grade(p.v_re, m1.a);
            slots[2 * j + 1] = solver_grade(p.v_im, m1.a);
        });
        w = std::move(slots);
        double worst = 0;
        for (const auto& f : w) worst = std::max(worst, discrete_residual(f, m1.a).max_abs() / f.max_abs());
        add("probes", "count", double(w.size()));
        add("probes", "max_relative_scheme_residual", worst);
        return 0;
    });

    // Identity on smooth data routed through the nonlinear solver and the
    // second-order extraction of the input-output map.
    run_stage("extraction", [&] {
        double worst = 0, worst_r = 0;
        for (std::size_t v = 0; v < cfg.extraction_data; ++v) {
            DataSpec ds = cfg.scenario.data;
            ds.variant = int(v);
            auto data = make_data(g, ds);
            // A medium without nonlinearity has a zero second-order record;
            // its extracted quotients would be rounding noise.
            auto extract = [&](const CoefficientSet& m) {
                return m.has_nonlinearity() ? second_order_extract(g, m, data, cfg.extraction_eps).g2 : IOData::zeros(g);
            };
            auto g2 = extract(m1) - extract(m2);
            auto u1 = solve_linear_ibvp(g, m1.a, data);
            for (const auto& f : w) {
                double D = assemble_identity_data(g2, f, cfg.pairing);
                double ref = direct_identity_integral(bdiff, f, u1, u1);
                double scale = std::max(std::abs(ref), 1e-300);
                if (std::abs(ref) > 0) worst = std::max(worst, std::abs(D - ref) / scale);
                worst_r = std::max(worst_r, std::abs(D - ref));
            }
        }
        add("extraction", "data_sets", double(cfg.extraction_data));
        add("extraction", "max_relative_identity_error", worst);
        add("extraction", "max_absolute_identity_error", worst_r);
        return 0;
    });

    // GO battery: polarized identity values for every probe and the weights.
    auto battery = run_stage("battery", [&] { return go_battery(g, cfg.go_directions, cfg.go_radius, cfg.go_spacing); });
    BetawSystem sys = run_stage("battery", [&] { return BetawSystem(g, cfg.space_factor, cfg.time_factor, w.size()); });
    std::vector<std::vector<double>> rows(battery.size()), values(battery.size());
    run_stage("battery", [&] {
        parallel_for(battery.size(), cfg.jobs, [&](std::size_t n) {
            const auto& e = battery[n];
            auto pair = build_go_pair(g, m1.a, e.omega, cfg.go_h, e.profile);
            auto g2 = bilinear_second_order_record(m1, pair.u_plus, pair.u_minus) -
                      bilinear_second_order_record(m2, pair.u_plus, pair.u_minus);
            std::vector<double> vals;
            for (const auto& f : w) vals.push_back(assemble_identity_data(g2, f, cfg.pairing));
            rows[n] = sys.project(dot(gradient_tx(pair.u_plus), gradient_tx(pair.u_minus)));
            values[n] = std::move(vals);
        });
        return 0;
    });
    if (cfg.noise > 0) {
        std::mt19937_64 rng(cfg.seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (std::size_t j = 0; j < w.size(); ++j) {
            double rms = 0;
            for (const auto& v : values) rms += v[j] * v[j];
            rms = std::sqrt(rms / double(std::max<std::size_t>(1, values.size())));
            for (auto& v : values) v[j] += cfg.noise * rms * normal(rng);
        }
    }
    for (std::size_t n = 0; n < battery.size(); ++n) sys.add_row(std::move(rows[n]), values[n]);
    add("battery", "go_pairs", double(battery.size()));
    add("battery", "unknowns_per_probe", double(sys.unknowns()));

    // beta_w for every probe on the recovery grid.
    auto sol = run_stage("betaw", [&] { return sys.solve(cfg.ridge); });
    const auto& coarse = sys.coarse();
    {
        double worst = 0, worst_res = 0;
        for (std::size_t j = 0; j < w.size(); ++j) {
            auto truth = restrict_field(betaw_field(bdiff, w[j]), coarse);
            double tn = l2_qt(truth);
            auto diff = sol.fields[j];
            diff -= truth;
            if (tn > 0) worst = std::max(worst, l2_qt(diff) / tn);
            worst_res = std::max(worst_res, sol.residual[j]);
        }
        add("betaw", "ridge", sol.ridge);
        add("betaw", "sigma_max_sq", sol.sigma_max_sq);
        add("betaw", "max_relative_residual", worst_res);
        add("betaw", "max_relative_error", worst);
    }

    // Pointwise solve for b1 - b2.
    auto pw = run_stage("pointwise", [&] {
        std::vector<SpaceTimeVectorField> grads;
        for (const auto& f : w) grads.push_back(restrict_vector(gradient_tx(f), coarse));
        return recover_b_pointwise(sol.fields, grads, cfg.condition_cap);
    });
    add("pointwise", "unmasked_fraction", pw.unmasked_fraction());
    add("pointwise", "interior_unmasked_fraction", pw.interior_fraction);

    rep.b_recovered = pw.b;
    rep.mask = pw.mask;
    rep.b_difference = restrict_vector(bdiff, coarse);
    rep.relative_error = masked_relative_error(rep.b_recovered, rep.b_difference, rep.mask);
    rep.recovered_norm = l2_vector(rep.b_recovered, &rep.mask);
    double scale = std::max(l2_vector(restrict_vector(m1.b, coarse), nullptr), l2_vector(restrict_vector(m2.b, coarse), nullptr));
    rep.floor = 64 * DBL_EPSILON * std::max(scale, 1.0);
    add("result", "relative_l2_error", rep.relative_error);
    add("result", "recovered_l2_norm", rep.recovered_norm);
    add("result", "true_difference_l2_norm", l2_vector(rep.b_difference, &rep.mask));
    add("result", "floor", rep.floor);
    return rep;
}

} // namespace nlw
