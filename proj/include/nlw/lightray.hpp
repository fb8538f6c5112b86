#pragma once

#include "nlw/grid.hpp"
#include "nlw/probes.hpp"

#include <complex>
#include <filesystem>
#include <string>
#include <vector>

namespace nlw {

/// The line t -> (t, y - t w), which passes through (0, y).
struct Ray {
    Direction omega{1.0, 0.0};
    std::array<double, 2> y{0.0, 0.0};

    std::array<double, 3> point(double t) const noexcept {
        return {t, y[0] - t * omega[0], y[1] - t * omega[1]};
    }
    /// The ray of direction w through (t, x).
    static Ray through(const Direction& w, double t, double x1, double x2) noexcept {
        return Ray{w, {x1 + t * w[0], x2 + t * w[1]}};
    }
};

/// int_0^T beta(t, y - t w) dt of the trilinear interpolant of beta, zero
/// outside Q_T. The line is split at every cell crossing and each piece is
/// integrated with 3-point Gauss, which is exact for the interpolant.
double lightray_transform(const SpaceTimeScalarField& beta, const Ray& ray);

struct RaySample {
    double angle = 0;
    std::array<double, 2> y{0, 0};
    double value = 0;
};

/// n_omega equispaced angles in [0, 2pi) times an n_base x n_base lattice of
/// base points covering every ray that meets Q_T.
std::vector<RaySample> sample_rays(const SpaceTimeScalarField& beta, std::size_t n_omega, std::size_t n_base);
void write_raydata(const std::filesystem::path& path, const std::vector<RaySample>& rows);

struct FourierSliceRow {
    std::array<double, 3> zeta{0, 0, 0};
    std::complex<double> direct, from_rays;
    double discrepancy = 0;
};

struct FourierSliceReport {
    Direction omega{1.0, 0.0};
    std::vector<FourierSliceRow> rows;
    double max_discrepancy() const noexcept;
    void write_csv(const std::filesystem::path& path) const;
};

/// Compares the space-time Fourier transform of beta at zeta with the planar
/// Fourier transform of the transforms along rays parallel to (1, w). Each
/// zeta must satisfy zeta . (1, w) = 0 to 1e-10 (InvalidArgument otherwise).
/// `base_refine` subdivides dx for the base-point lattice.
FourierSliceReport fourier_slice_check(const SpaceTimeScalarField& beta, const Direction& omega,
                                       const std::vector<std::array<double, 3>>& zetas, std::size_t base_refine = 2);

/// int_Q beta(t,x) phi^2(x + t w) dx dt by grid quadrature.
double weighted_ray_integral(const SpaceTimeScalarField& beta, const Direction& omega, const BumpProfile& profile);

/// -h^2/2 int beta grad u+ . grad u- for one GO pair.
double polarized_go_value(const SpaceTimeScalarField& beta, const GOPair& pair);

struct ConcentrationRow {
    double h = 0, value = 0, weighted = 0, error = 0;
};

struct ConcentrationReport {
    std::vector<ConcentrationRow> rows;
    /// Fitted slope of log error against log h (two-point estimate with two
    /// nonzero errors, NaN with fewer).
    double order = 0;
    void write_csv(const std::filesystem::path& path) const;
};

ConcentrationReport concentration_extract(const SpaceTimeScalarField& beta_w, const SpatialField& a,
                                          const Direction& omega, const std::vector<double>& h_list,
                                          const BumpProfile& profile);

} // namespace nlw
