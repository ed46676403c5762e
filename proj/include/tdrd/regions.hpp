#pragma once

// The 2^m sign-pattern cones { X : s_l <V_l, X> >= 0 for all l }.

#include <cstdint>
#include <iterator>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "tdrd/errors.hpp"
#include "tdrd/linalg.hpp"
#include "tdrd/spectral.hpp"

namespace tdrd {

inline constexpr int kMaxRegionDimension = 20;

/// Partition of {1..m} into the index set with sign +1 (L) and the index set
/// with sign -1 (Z). Stored as one sign per index.
class RegionSpec {
public:
    /// Bit l-1 of `code` set means index l is in Z. Codes count 0..2^m-1.
    static RegionSpec from_code(int m, std::uint32_t code) {
        if (m < 1 || m > 31) throw ConfigError("region: unsupported dimension " + std::to_string(m));
        std::vector<int> signs(m);
        for (int l = 0; l < m; ++l) signs[l] = ((code >> l) & 1u) ? -1 : +1;
        return RegionSpec(std::move(signs));
    }

    static RegionSpec from_signs(std::vector<int> signs) {
        if (signs.empty()) throw ConfigError("region: empty sign vector");
        for (int s : signs)
            if (s != 1 && s != -1) throw ConfigError("region: signs must be +1 or -1");
        return RegionSpec(std::move(signs));
    }

    /// L = {1..m}, Z = {}.
    static RegionSpec all_positive(int m) {
        if (m < 1) throw ConfigError("region: unsupported dimension " + std::to_string(m));
        return RegionSpec(std::vector<int>(m, +1));
    }

    int m() const noexcept { return static_cast<int>(signs_.size()); }
    int sign(int l) const { return signs_[l]; }
    const std::vector<int>& signs() const noexcept { return signs_; }

    std::uint32_t code() const {
        std::uint32_t c = 0;
        for (int l = 0; l < m(); ++l)
            if (signs_[l] < 0) c |= (1u << l);
        return c;
    }

    RegionSpec flipped() const {
        std::vector<int> s = signs_;
        for (int& v : s) v = -v;
        return RegionSpec(std::move(s));
    }

    /// e.g. "L={1,3} Z={2}" with 1-based indices.
    std::string label() const {
        std::string l = "L={", z = "Z={";
        bool first_l = true, first_z = true;
        for (int i = 0; i < m(); ++i) {
            std::string& dst = signs_[i] > 0 ? l : z;
            bool& first = signs_[i] > 0 ? first_l : first_z;
            if (!first) dst += ',';
            dst += std::to_string(i + 1);
            first = false;
        }
        return l + "} " + z + "}";
    }

    bool operator==(const RegionSpec&) const = default;

private:
    explicit RegionSpec(std::vector<int> signs) : signs_(std::move(signs)) {}
    std::vector<int> signs_;
};

/// Lazy range over all 2^m regions in binary-counting order (index 1 is the
/// least significant bit). Specs are produced on the fly.
class RegionRange {
public:
    class iterator {
    public:
        using iterator_category = std::input_iterator_tag;
        using value_type = RegionSpec;
        using difference_type = std::ptrdiff_t;

        iterator() = default;
        iterator(int m, std::uint64_t code) : m_(m), code_(code) {}
        RegionSpec operator*() const { return RegionSpec::from_code(m_, static_cast<std::uint32_t>(code_)); }
        iterator& operator++() {
            ++code_;
            return *this;
        }
        iterator operator++(int) {
            auto tmp = *this;
            ++code_;
            return tmp;
        }
        bool operator==(const iterator& o) const { return code_ == o.code_; }

    private:
        int m_ = 0;
        std::uint64_t code_ = 0;
    };

    explicit RegionRange(int m) : m_(m) {}
    iterator begin() const { return {m_, 0}; }
    iterator end() const { return {m_, size()}; }
    std::uint64_t size() const { return std::uint64_t{1} << m_; }

    std::vector<RegionSpec> to_vector() const {
        std::vector<RegionSpec> out;
        out.reserve(static_cast<std::size_t>(size()));
        for (auto r : *this) out.push_back(std::move(r));
        return out;
    }

private:
    int m_;
};

inline RegionRange enumerate_regions(int m) {
    if (m < 2) throw ConfigError("enumerate_regions: m must be >= 2");
    if (m > kMaxRegionDimension)
        throw CapacityError("enumerate_regions: m=" + std::to_string(m) + " exceeds the limit of " +
                            std::to_string(kMaxRegionDimension) + " (2^m regions)");
    return RegionRange(m);
}

struct MembershipReport {
    bool in_region = false;
    Vector slacks;        // s_l <V_l, X>
    int worst_index = 0;  // 0-based argmin of slacks, smallest index on ties
};

inline MembershipReport membership(const RegionSpec& region, const Spectrum& spectrum,
                                   std::span<const double> x, double eps = 0.0) {
    const int m = spectrum.m;
    if (region.m() != m || static_cast<int>(x.size()) != m)
        throw ConfigError("membership: dimension mismatch");
    if (eps < 0.0) throw ConfigError("membership: eps must be >= 0");
    MembershipReport r;
    r.slacks.resize(m);
    double worst = std::numeric_limits<double>::infinity();
    for (int l = 0; l < m; ++l) {
        r.slacks[l] = region.sign(l) * dot(spectrum.eigvecs[l], x);
        if (r.slacks[l] < worst) {
            worst = r.slacks[l];
            r.worst_index = l;
        }
    }
    r.in_region = worst >= -eps;
    return r;
}

/// Floating-mode tolerance 1e-12 * ||X||_inf * max_k mu^{k/2}.
inline double default_membership_tolerance(const Spectrum& spectrum, std::span<const double> x) {
    // mu^{k/2} is monotone in k, so the maximum sits at k = 1 or k = m.
    const double weight =
        std::max(std::pow(spectrum.mu, 0.5), std::pow(spectrum.mu, 0.5 * spectrum.m));
    return 1e-12 * norm_inf(x) * weight;
}

/// Boundary data must satisfy the same sign conditions as the initial data.
inline MembershipReport region_compatible_boundary(const RegionSpec& region, const Spectrum& spectrum,
                                                   std::span<const double> boundary,
                                                   double eps = 0.0) {
    return membership(region, spectrum, boundary, eps);
}

}  // namespace tdrd
