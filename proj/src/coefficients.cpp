#include "nlw/coefficients.hpp"

#include "nlw/errors.hpp"

#include <algorithm>
#include <cmath>

namespace nlw {

RemainderSpec RemainderSpec::cubic(SpaceTimeScalarField r, double radius) {
    RemainderSpec s;
    s.kind = RemainderKind::Cubic;
    s.r = std::move(r);
    s.validity_radius = radius;
    return s;
}

namespace {

void check_level_zero(const SpaceTimeScalarField& f, std::size_t k, double tol, const char* what) {
    const double* p = f.level(k);
    for (std::size_t n = 0; n < f.grid().plane(); ++n)
        if (std::abs(p[n]) > tol)
            throw InvalidArgument(std::string(what) + " must vanish at time level " + std::to_string(k));
}

} // namespace

void CoefficientSet::validate(std::size_t flat_levels, double tol) const {
    const auto& g = grid();
    if (a.nx != g.nx() || a.ny != g.ny()) throw GridMismatch("potential shape does not match grid");
    for (double x : a.v)
        if (!std::isfinite(x)) throw InvalidArgument("potential has non-finite entries");
    if (!b.all_finite()) throw InvalidArgument("b has non-finite entries");
    flat_levels = std::min(flat_levels, g.nt());
    for (std::size_t d = 0; d < 3; ++d) {
        for (std::size_t k = 0; k < flat_levels; ++k) check_level_zero(b[d], k, tol, "b");
        check_level_zero(b[d], g.nt() - 1, tol, "b");
    }
    if (remainder.active()) {
        if (!remainder.r) throw InvalidArgument("cubic remainder needs an amplitude field");
        require_same_grid(remainder.r->grid(), g, "remainder amplitude");
        if (!remainder.r->all_finite()) throw InvalidArgument("remainder amplitude has non-finite entries");
        for (std::size_t k = 0; k < flat_levels; ++k) check_level_zero(*remainder.r, k, tol, "r");
    }
}

CoefficientSet CoefficientSet::scaled_b(double s) const {
    CoefficientSet c = *this;
    for (auto& comp : c.b.c) comp *= s;
    return c;
}

CoefficientSet CoefficientSet::with_remainder(RemainderSpec r) const {
    CoefficientSet c = *this;
    c.remainder = std::move(r);
    return c;
}

bool CoefficientSet::has_nonlinearity() const noexcept {
    for (const auto& comp : b.c)
        if (comp.max_abs() > 0) return true;
    return remainder.active() && remainder.r && remainder.r->max_abs() > 0;
}

double max_value(const SpatialField& a) noexcept {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : a.v) m = std::max(m, x);
    return m;
}

} // namespace nlw
