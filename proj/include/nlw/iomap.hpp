#pragma once

#include "nlw/expansion.hpp"
#include "nlw/wave_nonlinear.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace nlw {

/// Boundary flux on every face plus the Cauchy pair at t = T.
///
/// The first three records approximate the continuous traces to second order.
/// The scheme records carry the same information in the form for which the
/// discrete Green identity of the leapfrog scheme is exact: the normal
/// derivative as (u_boundary - u_adjacent)/h and u_t(T) as the backward
/// difference of the last two levels. The boundary pairing of the integral
/// identity uses them.
struct IOData {
    LateralRecord lateral_flux;
    SpatialField final_u;
    SpatialField final_ut;
    LateralRecord scheme_flux;
    SpatialField scheme_final_ut;

    static IOData zeros(const SpaceTimeGrid& g);
    IOData& operator+=(const IOData& o);
    IOData& operator-=(const IOData& o);
    IOData& operator*=(double s) noexcept;
    bool operator==(const IOData& o) const noexcept;

    /// One NLWF per face and final record plus manifest.csv.
    void write(const std::filesystem::path& dir) const;
};

IOData operator+(IOData a, const IOData& b);
IOData operator-(IOData a, const IOData& b);
IOData operator*(double s, IOData a);

/// Discrete L2 over the lateral boundary plus L2 over Omega of both final
/// records, equally weighted. The scheme records are not included.
double trace_norm(const SpaceTimeGrid& g, const IOData& d);

/// Second-order one-sided d/dt at the last level.
SpatialField final_time_derivative(const SpaceTimeScalarField& u);
/// (u^K - u^{K-1}) / dt at the last level.
SpatialField final_backward_difference(const SpaceTimeScalarField& u);

/// Records normal derivative + (0,nu).(P+R)(grad u) and the final Cauchy pair of u.
IOData iodata_from_solution(const CoefficientSet& coeffs, const SpaceTimeScalarField& u);
/// Linear record: normal derivative and final Cauchy pair.
IOData iodata_linear(const SpaceTimeScalarField& u);

IOData compute_iomap(const SpaceTimeGrid& g, const CoefficientSet& coeffs, const InitialBoundaryData& data,
                     double eps, Scheme scheme = Scheme::Picard, const NonlinearOptions& opt = {});

IOData compute_linearized_iomap(const SpaceTimeGrid& g, const SpatialField& a, const InitialBoundaryData& data);

struct DefectRow {
    double eps = 0;
    double defect = 0;         ///< ||Lambda(eps) - eps Lambda_a||
    double scaled = 0;         ///< defect / eps
};

struct DefectReport {
    std::vector<DefectRow> rows;
    SlopeFit fit;              ///< slope of defect against eps
    void write_csv(const std::filesystem::path& path) const;
};

DefectReport first_order_defect(const SpaceTimeGrid& g, const CoefficientSet& coeffs, const InitialBoundaryData& data,
                                const std::vector<double>& eps_list, Scheme scheme = Scheme::Picard,
                                const NonlinearOptions& opt = {});

/// (Lambda(eps) - eps Lambda_a) / eps^2.
IOData second_order_quotient(const SpaceTimeGrid& g, const CoefficientSet& coeffs, const InitialBoundaryData& data,
                             const IOData& linear, double eps, Scheme scheme, const NonlinearOptions& opt);

struct SecondOrderResult {
    IOData g2;                 ///< 2 A(eps/2) - A(eps)
    IOData quotient_eps;       ///< A(eps)
    IOData quotient_half;      ///< A(eps/2)
    double disagreement = 0;   ///< ||A(eps) - A(eps/2)|| / ||A(eps/2)||
    bool warned = false;       ///< disagreement above 20%
};

SecondOrderResult second_order_extract(const SpaceTimeGrid& g, const CoefficientSet& coeffs,
                                       const InitialBoundaryData& data, double eps,
                                       Scheme scheme = Scheme::Picard, const NonlinearOptions& opt = {});

/// Record of the second-order field: normal derivative of u2 plus
/// (0,nu).b|grad u1|^2 on the boundary, and (u2, d/dt u2) at t = T.
IOData direct_second_order_record(const CoefficientSet& coeffs, const SpaceTimeScalarField& u1,
                                  const SpaceTimeScalarField& u2);

/// ||d - ref|| / ||ref|| in trace_norm.
double relative_trace_error(const SpaceTimeGrid& g, const IOData& d, const IOData& ref);

} // namespace nlw
