#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace nlw {

/// Uniform tensor grid on [0,T] x [0,Lx] x [0,Ly].
///
/// Storage order everywhere is (t, y, x) with x fastest. The grid only checks
/// shapes on construction; time-step stability is checked by the solvers since
/// plenty of pure-quadrature work uses grids that no explicit scheme could run on.
class SpaceTimeGrid {
public:
    SpaceTimeGrid() = default;
    SpaceTimeGrid(std::size_t nx, std::size_t ny, std::size_t nt, double Lx, double Ly, double T,
                  double cfl_safety = 0.9);

    std::size_t nx() const noexcept { return nx_; }
    std::size_t ny() const noexcept { return ny_; }
    std::size_t nt() const noexcept { return nt_; }
    double Lx() const noexcept { return Lx_; }
    double Ly() const noexcept { return Ly_; }
    double T() const noexcept { return T_; }
    double dx() const noexcept { return dx_; }
    double dy() const noexcept { return dy_; }
    double dt() const noexcept { return dt_; }
    double cfl_safety() const noexcept { return cfl_safety_; }

    double x(std::size_t i) const noexcept { return static_cast<double>(i) * dx_; }
    double y(std::size_t j) const noexcept { return static_cast<double>(j) * dy_; }
    double t(std::size_t k) const noexcept { return static_cast<double>(k) * dt_; }

    std::size_t plane() const noexcept { return nx_ * ny_; }
    std::size_t size() const noexcept { return nt_ * nx_ * ny_; }
    std::size_t index(std::size_t k, std::size_t j, std::size_t i) const noexcept {
        return (k * ny_ + j) * nx_ + i;
    }

    /// dt <= cfl_safety * min(dx,dy)/sqrt(2)
    bool cfl_ok() const noexcept;
    /// Throws CflViolation with the offending numbers.
    void require_cfl() const;

    /// Same grid with nt and T replaced, used for sub-windows in time.
    SpaceTimeGrid with_time(std::size_t nt, double T) const;

    bool operator==(const SpaceTimeGrid& o) const noexcept;
    std::string describe() const;

private:
    std::size_t nx_ = 0, ny_ = 0, nt_ = 0;
    double Lx_ = 0, Ly_ = 0, T_ = 0;
    double dx_ = 0, dy_ = 0, dt_ = 0;
    double cfl_safety_ = 0.9;
};

void require_same_grid(const SpaceTimeGrid& a, const SpaceTimeGrid& b, std::string_view what);

/// Scalar field on one time slice, (y, x) order.
struct SpatialField {
    std::size_t nx = 0, ny = 0;
    std::vector<double> v;

    SpatialField() = default;
    SpatialField(std::size_t nx_, std::size_t ny_, double fill = 0.0)
        : nx(nx_), ny(ny_), v(nx_ * ny_, fill) {}

    double& operator()(std::size_t j, std::size_t i) noexcept { return v[j * nx + i]; }
    double operator()(std::size_t j, std::size_t i) const noexcept { return v[j * nx + i]; }
    double max_abs() const noexcept;
};

class SpaceTimeScalarField {
public:
    SpaceTimeScalarField() = default;
    explicit SpaceTimeScalarField(const SpaceTimeGrid& g, double fill = 0.0);
    SpaceTimeScalarField(const SpaceTimeGrid& g, std::vector<double> values);

    template <class F>
    static SpaceTimeScalarField sample(const SpaceTimeGrid& g, F&& f) {
        SpaceTimeScalarField out(g);
        for (std::size_t k = 0; k < g.nt(); ++k)
            for (std::size_t j = 0; j < g.ny(); ++j)
                for (std::size_t i = 0; i < g.nx(); ++i)
                    out.v_[g.index(k, j, i)] = f(g.t(k), g.x(i), g.y(j));
        return out;
    }

    const SpaceTimeGrid& grid() const noexcept { return grid_; }
    const std::vector<double>& values() const noexcept { return v_; }
    std::vector<double>& values() noexcept { return v_; }

    double operator()(std::size_t k, std::size_t j, std::size_t i) const noexcept {
        return v_[grid_.index(k, j, i)];
    }
    double& operator()(std::size_t k, std::size_t j, std::size_t i) noexcept {
        return v_[grid_.index(k, j, i)];
    }
    const double* level(std::size_t k) const noexcept { return v_.data() + k * grid_.plane(); }
    double* level(std::size_t k) noexcept { return v_.data() + k * grid_.plane(); }

    SpatialField slice(std::size_t k) const;
    bool all_finite() const noexcept;
    double max_abs() const noexcept;

    SpaceTimeScalarField& operator+=(const SpaceTimeScalarField& o);
    SpaceTimeScalarField& operator-=(const SpaceTimeScalarField& o);
    SpaceTimeScalarField& operator*=(double s) noexcept;

private:
    SpaceTimeGrid grid_;
    std::vector<double> v_;
};

SpaceTimeScalarField operator+(SpaceTimeScalarField a, const SpaceTimeScalarField& b);
SpaceTimeScalarField operator-(SpaceTimeScalarField a, const SpaceTimeScalarField& b);
SpaceTimeScalarField operator*(double s, SpaceTimeScalarField a);
/// Pointwise product.
SpaceTimeScalarField hadamard(const SpaceTimeScalarField& a, const SpaceTimeScalarField& b);

/// Three components ordered (t, x, y).
struct SpaceTimeVectorField {
    std::array<SpaceTimeScalarField, 3> c;

    SpaceTimeVectorField() = default;
    explicit SpaceTimeVectorField(const SpaceTimeGrid& g) : c{SpaceTimeScalarField(g), SpaceTimeScalarField(g), SpaceTimeScalarField(g)} {}
    SpaceTimeVectorField(SpaceTimeScalarField t, SpaceTimeScalarField x, SpaceTimeScalarField y);

    const SpaceTimeGrid& grid() const noexcept { return c[0].grid(); }
    SpaceTimeScalarField& operator[](std::size_t d) noexcept { return c[d]; }
    const SpaceTimeScalarField& operator[](std::size_t d) const noexcept { return c[d]; }
    bool all_finite() const noexcept;
};

/// Pointwise q1 . q2 over the three components.
SpaceTimeScalarField dot(const SpaceTimeVectorField& a, const SpaceTimeVectorField& b);

enum class Side { XMinus, XPlus, YMinus, YPlus };

inline constexpr std::array<Side, 4> all_sides{Side::XMinus, Side::XPlus, Side::YMinus, Side::YPlus};

std::string_view side_name(Side s) noexcept;
/// Accepts "x-", "x+", "y-", "y+" (also "xminus" style); throws InvalidArgument otherwise.
Side parse_side(std::string_view token);

/// Values on one lateral face for every time level, (t, s) order where s runs
/// along the face (y for x-faces, x for y-faces).
struct FaceArray {
    Side side = Side::XMinus;
    std::size_t nt = 0, n = 0;
    std::vector<double> v;

    double operator()(std::size_t k, std::size_t s) const noexcept { return v[k * n + s]; }
    double& operator()(std::size_t k, std::size_t s) noexcept { return v[k * n + s]; }
};

std::size_t face_length(const SpaceTimeGrid& g, Side s) noexcept;
double face_spacing(const SpaceTimeGrid& g, Side s) noexcept;
/// Grid (j, i) of the s-th point on a face.
std::array<std::size_t, 2> face_node(const SpaceTimeGrid& g, Side side, std::size_t s) noexcept;
/// Outward unit normal (x, y).
std::array<double, 2> outward_normal(Side s) noexcept;

/// All four faces.
struct LateralRecord {
    std::array<FaceArray, 4> faces;

    FaceArray& operator[](Side s) noexcept { return faces[static_cast<std::size_t>(s)]; }
    const FaceArray& operator[](Side s) const noexcept { return faces[static_cast<std::size_t>(s)]; }

    static LateralRecord zeros(const SpaceTimeGrid& g);
};

} // namespace nlw
