#include "nlw/grid.hpp"

#include "nlw/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nlw {

SpaceTimeGrid::SpaceTimeGrid(std::size_t nx, std::size_t ny, std::size_t nt, double Lx, double Ly,
                             double T, double cfl_safety)
    : nx_(nx), ny_(ny), nt_(nt), Lx_(Lx), Ly_(Ly), T_(T), cfl_safety_(cfl_safety) {
    if (nx < 3 || ny < 3)
        throw GridTooSmall("spatial axes need at least 3 points, got nx=" + std::to_string(nx) +
                           " ny=" + std::to_string(ny));
    if (nt < 2) throw GridTooSmall("time axis needs at least 2 points, got nt=" + std::to_string(nt));
    if (!(Lx > 0) || !(Ly > 0) || !(T > 0))
        throw InvalidArgument("grid extents must be positive");
    if (!(cfl_safety > 0) || cfl_safety > 1) throw InvalidArgument("cfl_safety must lie in (0,1]");
    dx_ = Lx / static_cast<double>(nx - 1);
    dy_ = Ly / static_cast<double>(ny - 1);
    dt_ = T / static_cast<double>(nt - 1);
}

bool SpaceTimeGrid::cfl_ok() const noexcept {
    return dt_ <= cfl_safety_ * std::min(dx_, dy_) / std::sqrt(2.0) * (1 + 1e-12);
}

void SpaceTimeGrid::require_cfl() const {
    if (!cfl_ok()) {
        std::ostringstream os;
        os << "dt=" << dt_ << " exceeds " << cfl_safety_ << "*min(dx,dy)/sqrt(2)="
           << cfl_safety_ * std::min(dx_, dy_) / std::sqrt(2.0);
        throw CflViolation(os.str());
    }
}

SpaceTimeGrid SpaceTimeGrid::with_time(std::size_t nt, double T) const {
    return SpaceTimeGrid(nx_, ny_, nt, Lx_, Ly_, T, cfl_safety_);
}

bool SpaceTimeGrid::operator==(const SpaceTimeGrid& o) const noexcept {
    return nx_ == o.nx_ && ny_ == o.ny_ && nt_ == o.nt_ && Lx_ == o.Lx_ && Ly_ == o.Ly_ && T_ == o.T_;
}

std::string SpaceTimeGrid::describe() const {
    std::ostringstream os;
    os << nx_ << "x" << ny_ << "x" << nt_ << " on [0," << T_ << "]x[0," << Lx_ << "]x[0," << Ly_ << "]";
    return os.str();
}

void require_same_grid(const SpaceTimeGrid& a, const SpaceTimeGrid& b, std::string_view what) {
    if (!(a == b))
        throw GridMismatch(std::string(what) + ": grids differ (" + a.describe() + " vs " + b.describe() + ")");
}

double SpatialField::max_abs() const noexcept {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

SpaceTimeScalarField::SpaceTimeScalarField(const SpaceTimeGrid& g, double fill)
    : grid_(g), v_(g.size(), fill) {}

SpaceTimeScalarField::SpaceTimeScalarField(const SpaceTimeGrid& g, std::vector<double> values)
    : grid_(g), v_(std::move(values)) {
    if (v_.size() != g.size())
        throw GridMismatch("value count " + std::to_string(v_.size()) + " does not match grid " + g.describe());
}

SpatialField SpaceTimeScalarField::slice(std::size_t k) const {
    SpatialField s(grid_.nx(), grid_.ny());
    std::copy(level(k), level(k) + grid_.plane(), s.v.begin());
    return s;
}

bool SpaceTimeScalarField::all_finite() const noexcept {
    return std::all_of(v_.begin(), v_.end(), [](double x) { return std::isfinite(x); });
}

double SpaceTimeScalarField::max_abs() const noexcept {
    double m = 0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
}

SpaceTimeScalarField& SpaceTimeScalarField::operator+=(const SpaceTimeScalarField& o) {
    require_same_grid(grid_, o.grid_, "field +=");
    for (std::size_t n = 0; n < v_.size(); ++n) v_[n] += o.v_[n];
    return *this;
}

SpaceTimeScalarField& SpaceTimeScalarField::operator-=(const SpaceTimeScalarField& o) {
    require_same_grid(grid_, o.grid_, "field -=");
    for (std::size_t n = 0; n < v_.size(); ++n) v_[n] -= o.v_[n];
    return *this;
}

SpaceTimeScalarField& SpaceTimeScalarField::operator*=(double s) noexcept {
    for (double& x : v_) x *= s;
    return *this;
}

SpaceTimeScalarField operator+(SpaceTimeScalarField a, const SpaceTimeScalarField& b) { return a += b; }
SpaceTimeScalarField operator-(SpaceTimeScalarField a, const SpaceTimeScalarField& b) { return a -= b; }
SpaceTimeScalarField operator*(double s, SpaceTimeScalarField a) { return a *= s; }

SpaceTimeScalarField hadamard(const SpaceTimeScalarField& a, const SpaceTimeScalarField& b) {
    require_same_grid(a.grid(), b.grid(), "hadamard");
    SpaceTimeScalarField out(a.grid());
    for (std::size_t n = 0; n < out.values().size(); ++n) out.values()[n] = a.values()[n] * b.values()[n];
    return out;
}

SpaceTimeVectorField::SpaceTimeVectorField(SpaceTimeScalarField t, SpaceTimeScalarField x,
                                           SpaceTimeScalarField y)
    : c{std::move(t), std::move(x), std::move(y)} {
    require_same_grid(c[0].grid(), c[1].grid(), "vector field");
    require_same_grid(c[0].grid(), c[2].grid(), "vector field");
}

bool SpaceTimeVectorField::all_finite() const noexcept {
    return c[0].all_finite() && c[1].all_finite() && c[2].all_finite();
}

SpaceTimeScalarField dot(const SpaceTimeVectorField& a, const SpaceTimeVectorField& b) {
    require_same_grid(a.grid(), b.grid(), "dot");
    SpaceTimeScalarField out(a.grid());
    auto& o = out.values();
    for (std::size_t d = 0; d < 3; ++d) {
        const auto& x = a[d].values();
        const auto& y = b[d].values();
        for (std::size_t n = 0; n < o.size(); ++n) o[n] += x[n] * y[n];
    }
    return out;
}

std::string_view side_name(Side s) noexcept {
    switch (s) {
    case Side::XMinus: return "x-";
    case Side::XPlus: return "x+";
    case Side::YMinus: return "y-";
    case Side::YPlus: return "y+";
    }
    return "?";
}

Side parse_side(std::string_view token) {
    if (token == "x-" || token == "xminus") return Side::XMinus;
    if (token == "x+" || token == "xplus") return Side::XPlus;
    if (token == "y-" || token == "yminus") return Side::YMinus;
    if (token == "y+" || token == "yplus") return Side::YPlus;
    throw InvalidArgument("invalid side token '" + std::string(token) + "' (expected x-, x+, y-, y+)");
}

std::size_t face_length(const SpaceTimeGrid& g, Side s) noexcept {
    return (s == Side::XMinus || s == Side::XPlus) ? g.ny() : g.nx();
}

double face_spacing(const SpaceTimeGrid& g, Side s) noexcept {
    return (s == Side::XMinus || s == Side::XPlus) ? g.dy() : g.dx();
}

std::array<std::size_t, 2> face_node(const SpaceTimeGrid& g, Side side, std::size_t s) noexcept {
    switch (side) {
    case Side::XMinus: return {s, 0};
    case Side::XPlus: return {s, g.nx() - 1};
    case Side::YMinus: return {0, s};
    case Side::YPlus: return {g.ny() - 1, s};
    }
    return {0, 0};
}

std::array<double, 2> outward_normal(Side s) noexcept {
    switch (s) {
    case Side::XMinus: return {-1, 0};
    case Side::XPlus: return {1, 0};
    case Side::YMinus: return {0, -1};
    case Side::YPlus: return {0, 1};
    }
    return {0, 0};
}

LateralRecord LateralRecord::zeros(const SpaceTimeGrid& g) {
    LateralRecord r;
    for (Side s : all_sides) {
        auto& f = r[s];
        f.side = s;
        f.nt = g.nt();
        f.n = face_length(g, s);
        f.v.assign(f.nt * f.n, 0.0);
    }
    return r;
}

} // namespace nlw
