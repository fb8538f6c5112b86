#pragma once

#include "nlw/iomap.hpp"
#include "nlw/probes.hpp"
#include "nlw/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace nlw {

/// How the boundary pairing of the integral identity is discretized.
enum class PairingRule {
    /// Scheme records with the weights of the discrete Green identity of the
    /// leapfrog scheme: lateral nodes without corners on levels 1..K-1, final
    /// records on interior nodes. Exact when w solves the scheme.
    Scheme,
    /// Second-order records with trapezoid weights. Consistent to O(h^2).
    Continuum,
};

PairingRule parse_pairing(const std::string& s);

/// D = int_lateral g2.flux w - int_Omega [g2.u_t(T) w(T) - g2.u(T) w_t(T)].
/// For g2 the second-order record of a zero-data u2 with source
/// div(b |grad u1|^2) and w a homogeneous solution, D equals
/// int_Q b . grad w |grad u1|^2 when b vanishes near t = 0 and near the
/// lateral boundary.
double assemble_identity_data(const IOData& g2, const SpaceTimeScalarField& w, PairingRule rule = PairingRule::Scheme);

/// Same for records whose lateral flux holds only the normal derivative of u2:
/// the term (0,nu).b |grad u1|^2 is added from the known lateral values of b.
double assemble_identity_data(const IOData& g2, const SpaceTimeScalarField& w, const SpaceTimeScalarField& u1,
                              const SpaceTimeVectorField& b_lateral, PairingRule rule = PairingRule::Scheme);

/// int_Q b . grad w  grad u1a . grad u1b by grid quadrature.
double direct_identity_integral(const SpaceTimeVectorField& b, const SpaceTimeScalarField& w,
                                const SpaceTimeScalarField& u1a, const SpaceTimeScalarField& u1b);

/// b . grad_(t,x) w on the grid.
SpaceTimeScalarField betaw_field(const SpaceTimeVectorField& b, const SpaceTimeScalarField& w);

/// (D(d1 + d2) - D(d1 - d2)) / 4: the bilinear value for the pair of data.
double polarize(double identity_sum, double identity_difference) noexcept;

/// Polarized identity value from the records of the data d1 + d2 and d1 - d2.
double polarize(const IOData& g2_sum, const IOData& g2_difference, const SpaceTimeScalarField& w,
                PairingRule rule = PairingRule::Scheme);

/// Record of the bilinear second-order field: u2 with zero data and source
/// div(b grad u1a . grad u1b). Equals the polarized combination of the records
/// for u1a + u1b and u1a - u1b without the cancellation of the squares.
IOData bilinear_second_order_record(const CoefficientSet& coeffs, const SpaceTimeScalarField& u1a,
                                    const SpaceTimeScalarField& u1b);

/// v + z where z solves the scheme with zero data and forcing minus the
/// discrete residual of v, so the result solves the scheme on every interior
/// level. Used to make asymptotic probes solver-grade.
SpaceTimeScalarField solver_grade(const SpaceTimeScalarField& v, const SpatialField& a);

/// Recovery grid: every `space_factor`-th node in x and y and every
/// `time_factor`-th level of the simulation grid.
SpaceTimeGrid recovery_grid(const SpaceTimeGrid& fine, std::size_t space_factor, std::size_t time_factor);

/// Samples a simulation field at the nodes of a recovery grid.
SpaceTimeScalarField restrict_field(const SpaceTimeScalarField& f, const SpaceTimeGrid& coarse);

/// Default ridge parameter relative to the largest squared singular value.
/// Smaller values leave the light-ray data unstable under 1% measurement noise.
inline constexpr double default_ridge = 3e-4;

struct BetawSolution {
    std::vector<SpaceTimeScalarField> fields;   ///< one per right-hand side, on the recovery grid
    double sigma_max_sq = 0;                     ///< largest eigenvalue of the Gram matrix
    double ridge = 0;                            ///< absolute ridge parameter used
    std::vector<double> residual;                ///< relative data misfit per right-hand side
};

/// Least-squares system for beta_w on a recovery grid. beta_w is the trilinear
/// interpolant of its values at the recovery nodes; each measurement is
/// int_Q beta_w * weight, so the matrix row of a weight is its quadrature
/// against the hat functions. Several right-hand sides (one per probe w)
/// share the rows.
class BetawSystem {
public:
    BetawSystem(const SpaceTimeGrid& fine, std::size_t space_factor = 4, std::size_t time_factor = 4,
                std::size_t n_rhs = 1);

    const SpaceTimeGrid& coarse() const noexcept { return coarse_; }
    std::size_t unknowns() const noexcept { return coarse_.size(); }
    std::size_t measurements() const noexcept { return values_.size() / n_rhs_; }
    std::size_t rhs_count() const noexcept { return n_rhs_; }

    /// Adds one weight and its measured value for every right-hand side.
    void add(const SpaceTimeScalarField& weight, const std::vector<double>& values);
    /// Row of a weight without storing it.
    std::vector<double> project(const SpaceTimeScalarField& weight) const;
    void add_row(std::vector<double> row, const std::vector<double>& values);

    /// Ridge solution with parameter ridge_rel * sigma_max^2. ridge_rel = 0
    /// needs at least as many measurements as unknowns (InvalidArgument).
    BetawSolution solve(double ridge_rel = default_ridge) const;

private:
    SpaceTimeGrid fine_, coarse_;
    std::size_t fs_, ft_, n_rhs_;
    std::vector<double> quad_;        ///< trapezoid weight of each fine node
    std::vector<double> rows_;        ///< row-major, unknowns() per row
    std::vector<double> values_;      ///< measurements() x n_rhs
};

struct IdentityMeasurement {
    SpaceTimeScalarField weight;
    double value = 0;
};

/// Single right-hand-side convenience wrapper around BetawSystem.
SpaceTimeScalarField betaw_direct(const std::vector<IdentityMeasurement>& data, std::size_t space_factor = 4,
                                  std::size_t time_factor = 4, double ridge_rel = default_ridge);

struct PointwiseRecovery {
    SpaceTimeVectorField b;
    SpaceTimeScalarField mask;            ///< 1 where solved, 0 where masked
    SpaceTimeScalarField condition;       ///< condition number of the gradient matrix
    std::size_t unmasked = 0, total = 0;
    double unmasked_fraction() const noexcept { return total ? double(unmasked) / double(total) : 0.0; }
    /// Same fraction restricted to nodes off the boundary of the grid.
    double interior_fraction = 0;
};

/// At every node solves [grad w_j] b = beta_j in the least-squares sense (rows
/// j = 1..m, m >= 3). Nodes whose gradient matrix has condition number above
/// `condition_cap` are masked and get b = 0. Throws NumericalFailure if every
/// node is masked.
PointwiseRecovery recover_b_pointwise(const std::vector<SpaceTimeScalarField>& betaw,
                                      const std::vector<SpaceTimeVectorField>& grad_w, double condition_cap = 1e6);

/// Real and imaginary parts of grad v for each WKB probe, with the phase
/// differentiated analytically. Rows for the complex-split pointwise solve.
std::vector<SpaceTimeVectorField> wkb_probe_gradients(const std::vector<const WKBProbe*>& probes);

/// The reference triple for n = 3; the triple followed by its negatives for
/// n = 6. Other counts throw InvalidArgument.
std::vector<Direction> probe_directions(std::size_t n);

/// Relative discrete L2 error over the masked-in nodes of a vector field.
double masked_relative_error(const SpaceTimeVectorField& estimate, const SpaceTimeVectorField& truth,
                             const SpaceTimeScalarField& mask);

struct EndToEndConfig {
    ScenarioSpec scenario;                 ///< grid, potential, medium 1 (b, R)
    BumpSpec b2{{0.0, 0.0, 0.0}};          ///< medium 2 quadratic coefficient
    double r2_amp = 0.0;                   ///< medium 2 cubic amplitude
    // probes for the pointwise stage
    double wkb_lambda = 4.0;
    int wkb_order = 2;
    std::size_t wkb_directions = 6;        ///< 3: reference triple, 6: triple and its negatives
    // GO battery for the beta_w stage
    std::size_t go_directions = 8;
    double go_h = 0.25;
    double go_radius = 0.3;
    double go_spacing = 0.125;
    // recovery
    std::size_t space_factor = 4, time_factor = 4;
    double ridge = default_ridge;
    double condition_cap = 1e6;
    PairingRule pairing = PairingRule::Scheme;
    double noise = 0.0;                    ///< relative Gaussian noise on the identity values
    std::uint64_t seed = 1;
    // extraction check on smooth data
    std::size_t extraction_data = 2;
    double extraction_eps = 0.02;
    std::size_t jobs = 1;
};

struct ReportRow {
    std::string stage, metric;
    double value = 0;
};

struct UniquenessReport {
    std::vector<ReportRow> rows;
    SpaceTimeVectorField b_recovered;     ///< on the recovery grid
    SpaceTimeVectorField b_difference;    ///< b1 - b2 sampled on the recovery grid
    SpaceTimeScalarField mask;
    double relative_error = 0;            ///< masked relative L2 error (NaN if b1 = b2)
    double recovered_norm = 0;            ///< discrete L2 norm of b_recovered
    double floor = 0;                     ///< level below which a recovered difference counts as zero
    bool diameter_ok = false;             ///< T exceeds the diameter of Omega

    double metric(const std::string& stage, const std::string& name) const;
    /// uniqueness_report.csv plus NLWF fields of the recovered and true difference.
    void write(const std::filesystem::path& dir) const;
};

/// Simulates both media over the probe battery, pairs the second-order data
/// differences with the probes, recovers beta_w for every probe and then b1 - b2
/// pointwise. Stage failures are rethrown with the stage name prepended.
UniquenessReport end_to_end(const EndToEndConfig& cfg);

} // namespace nlw
