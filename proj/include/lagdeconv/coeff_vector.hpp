#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "lagdeconv/error.hpp"

namespace lagdeconv {

/// Laguerre coefficients c^(0)..c^(m-1) tagged with the scale they refer to.
class CoeffVector {
public:
    CoeffVector(std::vector<double> values, double scale) : values_(std::move(values)), scale_(scale) {
        if (values_.empty()) throw InvalidArgument("CoeffVector: need at least one coefficient");
        if (!(scale_ > 0.0)) throw InvalidArgument("CoeffVector: scale must be positive");
    }

    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t k) const noexcept { return values_[k]; }
    std::size_t size() const noexcept { return values_.size(); }
    double scale() const noexcept { return scale_; }

    /// First m coefficients, same scale.
    CoeffVector prefix(std::size_t m) const {
        if (m < 1 || m > values_.size()) throw InvalidArgument("CoeffVector::prefix: bad length");
        return CoeffVector({values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(m)}, scale_);
    }

    double squared_norm() const noexcept {
        double s = 0.0;
        for (double v : values_) s += v * v;
        return s;
    }

    /// Scales agree to 1e-12 relative.
    bool same_scale(double other) const noexcept {
        return std::abs(scale_ - other) <= 1e-12 * std::max(scale_, other);
    }

private:
    std::vector<double> values_;
    double scale_;
};

}  // namespace lagdeconv
