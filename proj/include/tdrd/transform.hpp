#pragma once

#include <span>
#include <sstream>

#include "tdrd/errors.hpp"
#include "tdrd/linalg.hpp"
#include "tdrd/regions.hpp"
#include "tdrd/spectral.hpp"

namespace tdrd {

inline constexpr double kMaxTransformCondition = 1e12;

/// Change of variables W = P^T U where P has columns s_l V_l for the sign
/// pattern s of a region. In W-coordinates the diffusion decouples into
/// m scalar equations with coefficients lambda_l.
class DiagonalizingTransform {
public:
    static DiagonalizingTransform make(const Spectrum& spectrum, const RegionSpec& region) {
        const int m = spectrum.m;
        if (region.m() != m) throw ConfigError("transform: region dimension does not match spectrum");
        const auto n = static_cast<std::size_t>(m);
        Matrix pt(n, n);
        for (std::size_t l = 0; l < n; ++l)
            for (std::size_t k = 0; k < n; ++k)
                pt(l, k) = region.sign(static_cast<int>(l)) * spectrum.eigvecs[l][k];
        const auto lu = lu_decompose(pt);
        if (lu.singular)
            throw SingularError("transform: P^T is singular", std::numeric_limits<double>::infinity());
        Matrix inv = inverse(pt);
        const double cond = pt.norm1() * inv.norm1();
        if (!(cond <= kMaxTransformCondition)) {
            std::ostringstream os;
            os << "transform: P^T is numerically singular (1-norm condition " << cond
               << " > 1e12); mu=" << spectrum.mu << " and m=" << m << " are too extreme";
            throw SingularError(os.str(), cond);
        }
        return DiagonalizingTransform(std::move(pt), std::move(inv), cond, region);
    }

    const Matrix& pt() const noexcept { return pt_; }
    const Matrix& pt_inverse() const noexcept { return pt_inv_; }
    double condition() const noexcept { return cond_; }
    const RegionSpec& region() const noexcept { return region_; }
    int m() const noexcept { return static_cast<int>(pt_.rows()); }

    Vector to_W(std::span<const double> u) const { return pt_.apply(u); }
    Vector to_U(std::span<const double> w) const { return pt_inv_.apply(w); }

private:
    DiagonalizingTransform(Matrix pt, Matrix inv, double cond, RegionSpec region)
        : pt_(std::move(pt)), pt_inv_(std::move(inv)), cond_(cond), region_(std::move(region)) {}

    Matrix pt_;
    Matrix pt_inv_;
    double cond_;
    RegionSpec region_;
};

}  // namespace tdrd
