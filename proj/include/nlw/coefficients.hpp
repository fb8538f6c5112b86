#pragma once

#include "nlw/grid.hpp"

#include <limits>
#include <optional>

namespace nlw {

enum class RemainderKind { Zero, Cubic };

/// Higher-order flux term. For Cubic, R(t,x,q) = r(t,x) * q * |q|^2.
struct RemainderSpec {
    RemainderKind kind = RemainderKind::Zero;
    std::optional<SpaceTimeScalarField> r;
    /// |q| must stay below this wherever the cubic term is evaluated.
    double validity_radius = std::numeric_limits<double>::infinity();

    static RemainderSpec zero() { return {}; }
    static RemainderSpec cubic(SpaceTimeScalarField r, double radius = std::numeric_limits<double>::infinity());
    bool active() const noexcept { return kind == RemainderKind::Cubic; }
};

/// One medium: potential a(x), quadratic coefficient b(t,x), remainder R.
struct CoefficientSet {
    SpatialField a;
    SpaceTimeVectorField b;
    RemainderSpec remainder;

    const SpaceTimeGrid& grid() const noexcept { return b.grid(); }

    /// Checks shapes, finiteness, b == 0 on the first `flat_levels` time levels
    /// and on the last one, and the same flatness for r. Throws InvalidArgument.
    void validate(std::size_t flat_levels = 2, double tol = 0.0) const;

    /// Same medium with b replaced by s*b.
    CoefficientSet scaled_b(double s) const;
    CoefficientSet with_remainder(RemainderSpec r) const;
    bool has_nonlinearity() const noexcept;
};

double max_value(const SpatialField& a) noexcept;

} // namespace nlw
