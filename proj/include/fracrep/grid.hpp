#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fracrep/errors.hpp"

namespace fracrep {

/// Uniform time grid t_j = j T / (N - 1) on [0, T].
class Grid {
public:
    Grid(double horizon, std::size_t points) : horizon_(horizon), points_(points) {
        if (!(horizon > 0.0) || !std::isfinite(horizon)) {
            throw Error(ErrorCode::InvalidArgument, "grid horizon must be positive and finite");
        }
        if (points < 2) {
            throw Error(ErrorCode::InvalidArgument, "grid needs at least two nodes");
        }
    }

    [[nodiscard]] double horizon() const noexcept { return horizon_; }
    [[nodiscard]] std::size_t size() const noexcept { return points_; }
    [[nodiscard]] double step() const noexcept {
        return horizon_ / static_cast<double>(points_ - 1);
    }
    [[nodiscard]] double node(std::size_t j) const noexcept {
        if (j + 1 == points_) {
            return horizon_;
        }
        return horizon_ * static_cast<double>(j) / static_cast<double>(points_ - 1);
    }
    [[nodiscard]] std::vector<double> nodes() const {
        std::vector<double> out(points_);
        for (std::size_t j = 0; j < points_; ++j) {
            out[j] = node(j);
        }
        return out;
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    double horizon_;
    std::size_t points_;
};

/// Samples of a real function at the nodes of a Grid.
class GridFunction {
public:
    explicit GridFunction(Grid grid) : grid_(grid), values_(grid.size(), 0.0) {}

    GridFunction(Grid grid, std::vector<double> values)
        : grid_(grid), values_(std::move(values)) {
        if (values_.size() != grid_.size()) {
            throw Error(ErrorCode::InvalidArgument,
                        "grid function has " + std::to_string(values_.size()) +
                            " values for " + std::to_string(grid_.size()) + " nodes");
        }
    }

    [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::span<double> values() noexcept { return values_; }
    [[nodiscard]] double operator[](std::size_t j) const noexcept { return values_[j]; }
    [[nodiscard]] double& operator[](std::size_t j) noexcept { return values_[j]; }

    [[nodiscard]] double max_norm() const noexcept {
        double m = 0.0;
        for (double v : values_) {
            m = std::max(m, std::abs(v));
        }
        return m;
    }

    /// Piecewise-linear interpolation between nodes.
    [[nodiscard]] double interpolate(double t) const {
        if (t < 0.0 || t > grid_.horizon()) {
            throw Error(ErrorCode::OutOfDomain, "interpolation point outside [0, T]");
        }
        const double h = grid_.step();
        auto j = static_cast<std::size_t>(t / h);
        j = std::min(j, grid_.size() - 2);
        const double w = (t - grid_.node(j)) / h;
        return (1.0 - w) * values_[j] + w * values_[j + 1];
    }

    GridFunction& operator+=(const GridFunction& other) {
        check_same_grid(other);
        for (std::size_t j = 0; j < values_.size(); ++j) {
            values_[j] += other.values_[j];
        }
        return *this;
    }
    GridFunction& operator-=(const GridFunction& other) {
        check_same_grid(other);
        for (std::size_t j = 0; j < values_.size(); ++j) {
            values_[j] -= other.values_[j];
        }
        return *this;
    }
    GridFunction& operator*=(double s) noexcept {
        for (double& v : values_) {
            v *= s;
        }
        return *this;
    }

    friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
    friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
    friend GridFunction operator*(GridFunction a, double s) { return a *= s; }
    friend GridFunction operator*(double s, GridFunction a) { return a *= s; }

private:
    void check_same_grid(const GridFunction& other) const {
        if (!(grid_ == other.grid_)) {
            throw Error(ErrorCode::InvalidArgument, "grid functions live on different grids");
        }
    }

    Grid grid_;
    std::vector<double> values_;
};

/// Pointwise evaluation of f at every node of g.
template <typename F>
[[nodiscard]] GridFunction sample(F&& f, const Grid& g) {
    GridFunction out(g);
    for (std::size_t j = 0; j < g.size(); ++j) {
        out[j] = f(g.node(j));
    }
    return out;
}

/// max_j |a_j - b_j|.
[[nodiscard]] inline double max_abs_difference(const GridFunction& a, const GridFunction& b) {
    if (!(a.grid() == b.grid())) {
        throw Error(ErrorCode::InvalidArgument, "grid functions live on different grids");
    }
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        m = std::max(m, std::abs(a[j] - b[j]));
    }
    return m;
}

}  // namespace fracrep
