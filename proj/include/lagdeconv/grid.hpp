#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lagdeconv/error.hpp"

namespace lagdeconv {

/// Ordered observation times t_1..t_n on [0, T].
class SampleGrid {
public:
    SampleGrid(std::vector<double> times, double horizon)
        : times_(std::move(times)), horizon_(horizon) {
        if (!(horizon_ > 0.0)) {
            throw InvalidArgument("SampleGrid: horizon must be positive");
        }
        if (times_.size() < 2) {
            throw InvalidArgument("SampleGrid: need at least two observation times");
        }
        if (times_.front() < 0.0) {
            throw InvalidArgument("SampleGrid: times must be nonnegative");
        }
        for (std::size_t i = 1; i < times_.size(); ++i) {
            if (!(times_[i] >= times_[i - 1])) {
                throw InvalidArgument("SampleGrid: times must be nondecreasing (index " +
                                      std::to_string(i) + ")");
            }
        }
        if (times_.back() > horizon_) {
            throw InvalidArgument("SampleGrid: last time exceeds horizon");
        }
    }

    /// n points t_i = i T/(n-1), i = 0..n-1.
    static SampleGrid equispaced(std::size_t n, double horizon) {
        if (n < 2) throw InvalidArgument("SampleGrid::equispaced: n must be >= 2");
        std::vector<double> t(n);
        for (std::size_t i = 0; i < n; ++i) {
            t[i] = horizon * static_cast<double>(i) / static_cast<double>(n - 1);
        }
        t.back() = horizon;
        return SampleGrid(std::move(t), horizon);
    }

    std::span<const double> times() const noexcept { return times_; }
    double operator[](std::size_t i) const noexcept { return times_[i]; }
    std::size_t size() const noexcept { return times_.size(); }
    double horizon() const noexcept { return horizon_; }

    /// True when both grids have the same length and times agree within `tol`.
    bool matches(const SampleGrid& other, double tol = 1e-9) const noexcept {
        return first_mismatch(other, tol) == size() && size() == other.size();
    }

    /// Index of the first differing time, or size() when none.
    std::size_t first_mismatch(const SampleGrid& other, double tol = 1e-9) const noexcept {
        const std::size_t n = std::min(size(), other.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(times_[i] - other.times_[i]) > tol) return i;
        }
        return n;
    }

private:
    std::vector<double> times_;
    double horizon_;
};

}  // namespace lagdeconv
