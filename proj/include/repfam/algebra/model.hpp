#pragma once

// Base spaces, block constraints and the algebra models built from them.
//
// An AlgebraModel stands for the C*-algebra of continuous functions on a
// base space with values in d×d matrices, restricted to block-diagonal
// values at finitely many constrained points.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "repfam/error.hpp"
#include "repfam/matrix.hpp"

namespace repfam {

enum class BaseKind { Discrete, Interval, Circle };

inline const char* to_string(BaseKind k) {
    switch (k) {
        case BaseKind::Discrete: return "discrete";
        case BaseKind::Interval: return "interval";
        case BaseKind::Circle: return "circle";
    }
    return "?";
}

/// A discrete set {0, …, m−1}, the interval [0, 1] or the circle [0, 1)
/// with periodic identification, together with the sample grid.
class BaseSpace {
  public:
    static BaseSpace discrete(std::size_t points) {
        if (points == 0) throw InvalidArgument("discrete base space needs at least one point");
        std::vector<double> g(points);
        for (std::size_t i = 0; i < points; ++i) g[i] = double(i);
        return BaseSpace(BaseKind::Discrete, std::move(g));
    }

    /// Uniform grid of step ≤ `step` on [0, 1]. With `endpoint_refinement`
    /// = r > 0 the points 1 − h·2⁻ʲ (j = 1..r) are added, grading the grid
    /// geometrically toward t = 1. Gaps stop above kMinRefinedGap.
    static BaseSpace interval(double step, int endpoint_refinement = 0) {
        const std::size_t n = intervals_for(step);
        std::vector<double> g(n + 1);
        for (std::size_t i = 0; i <= n; ++i) g[i] = double(i) / double(n);
        const double h = 1.0 / double(n);
        for (int j = 1; j <= endpoint_refinement; ++j) {
            const double gap = h * std::ldexp(1.0, -j);
            if (gap <= kMinRefinedGap) break;
            g.push_back(1.0 - gap);
        }
        return BaseSpace(BaseKind::Interval, std::move(g));
    }

    static BaseSpace interval_grid(std::vector<double> grid) { return BaseSpace(BaseKind::Interval, std::move(grid)); }

    /// Uniform grid on the circle, parameter t ∈ [0, 1) (angle 2πt).
    static BaseSpace circle(double step) {
        const std::size_t n = intervals_for(step);
        std::vector<double> g(n);
        for (std::size_t i = 0; i < n; ++i) g[i] = double(i) / double(n);
        return BaseSpace(BaseKind::Circle, std::move(g));
    }

    BaseKind kind() const noexcept { return kind_; }
    const std::vector<double>& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return grid_.size(); }

    /// Largest gap between consecutive samples (0 for discrete spaces).
    double grid_step() const noexcept { return step_; }

    bool continuous() const noexcept { return kind_ != BaseKind::Discrete; }

    bool contains(double t) const {
        switch (kind_) {
            case BaseKind::Discrete: return index_of(t).has_value();
            case BaseKind::Interval: return t >= 0.0 && t <= 1.0;
            case BaseKind::Circle: return t >= 0.0 && t < 1.0;
        }
        return false;
    }

    std::optional<std::size_t> index_of(double t) const {
        auto it = std::lower_bound(grid_.begin(), grid_.end(), t - kMatchTol);
        if (it != grid_.end() && std::abs(*it - t) <= kMatchTol) return std::size_t(it - grid_.begin());
        if (kind_ == BaseKind::Circle && std::abs(t - 1.0) <= kMatchTol) return 0;
        return std::nullopt;
    }

    /// Metric on the base space; distinct discrete points are infinitely far.
    double distance(double s, double t) const {
        switch (kind_) {
            case BaseKind::Discrete:
                return std::abs(s - t) <= kMatchTol ? 0.0 : std::numeric_limits<double>::infinity();
            case BaseKind::Interval: return std::abs(s - t);
            case BaseKind::Circle: {
                const double d = std::abs(s - t);
                return std::min(d, 1.0 - d);
            }
        }
        return 0.0;
    }

    static constexpr double kMatchTol = 1e-12;
    static constexpr double kMinRefinedGap = 1e-9;

  private:
    BaseSpace(BaseKind kind, std::vector<double> grid) : kind_(kind), grid_(std::move(grid)) {
        std::sort(grid_.begin(), grid_.end());
        grid_.erase(std::unique(grid_.begin(), grid_.end(),
                                [](double a, double b) { return std::abs(a - b) <= kMatchTol; }),
                    grid_.end());
        if (grid_.empty()) throw InvalidArgument("base space grid is empty");
        switch (kind_) {
            case BaseKind::Discrete: step_ = 0.0; break;
            case BaseKind::Interval:
                if (grid_.front() != 0.0 || grid_.back() != 1.0)
                    throw InvalidArgument("interval grid must contain both endpoints 0 and 1");
                step_ = max_gap(false);
                break;
            case BaseKind::Circle:
                if (grid_.front() < 0.0 || grid_.back() >= 1.0)
                    throw InvalidArgument("circle grid must lie in [0, 1)");
                step_ = max_gap(true);
                break;
        }
    }

    static std::size_t intervals_for(double step) {
        if (!(step > 0.0) || step > 1.0) throw InvalidArgument("grid step must lie in (0, 1]");
        return std::size_t(std::ceil(1.0 / step - 1e-9));
    }

    double max_gap(bool periodic) const {
        double gap = 0.0;
        for (std::size_t i = 1; i < grid_.size(); ++i) gap = std::max(gap, grid_[i] - grid_[i - 1]);
        if (periodic) gap = std::max(gap, 1.0 - grid_.back() + grid_.front());
        return gap;
    }

    BaseKind kind_;
    std::vector<double> grid_;
    double step_ = 0.0;
};

enum class ConstraintKind { DiagonalAt, SubblockAt };

/// Values at `point` must be block diagonal for the partition `blocks` of
/// {0, …, d−1} into contiguous half-open ranges.
struct BlockConstraint {
    double point;
    ConstraintKind kind;
    std::vector<std::pair<std::size_t, std::size_t>> blocks;
};

class BlockStructure {
  public:
    explicit BlockStructure(std::size_t fiber_dim) : fiber_dim_(fiber_dim) {
        if (fiber_dim == 0) throw InvalidArgument("fiber dimension must be positive");
    }

    BlockStructure& diagonal_at(double t) {
        std::vector<std::pair<std::size_t, std::size_t>> b;
        for (std::size_t i = 0; i < fiber_dim_; ++i) b.emplace_back(i, i + 1);
        constraints_.push_back({t, ConstraintKind::DiagonalAt, std::move(b)});
        return *this;
    }

    BlockStructure& subblocks_at(double t, std::vector<std::pair<std::size_t, std::size_t>> ranges) {
        std::sort(ranges.begin(), ranges.end());
        std::size_t next = 0;
        for (auto [b, e] : ranges) {
            if (b != next || e <= b) throw InvalidArgument("subblock ranges must partition the fiber contiguously");
            next = e;
        }
        if (next != fiber_dim_) throw InvalidArgument("subblock ranges must cover the whole fiber");
        constraints_.push_back({t, ConstraintKind::SubblockAt, std::move(ranges)});
        return *this;
    }

    std::size_t fiber_dim() const noexcept { return fiber_dim_; }
    const std::vector<BlockConstraint>& constraints() const noexcept { return constraints_; }

    const BlockConstraint* constraint_at(double t) const {
        for (const auto& c : constraints_)
            if (std::abs(c.point - t) <= BaseSpace::kMatchTol) return &c;
        return nullptr;
    }

    /// Zeroes the entries outside the diagonal blocks of `c`.
    static ComplexMatrix project(const BlockConstraint& c, ComplexMatrix m) {
        for (std::size_t i = 0; i < m.dim(); ++i)
            for (std::size_t j = 0; j < m.dim(); ++j)
                if (block_of(c, i) != block_of(c, j)) m(i, j) = 0.0;
        return m;
    }

    static double off_block_mass(const BlockConstraint& c, const ComplexMatrix& m) {
        double worst = 0.0;
        for (std::size_t i = 0; i < m.dim(); ++i)
            for (std::size_t j = 0; j < m.dim(); ++j)
                if (block_of(c, i) != block_of(c, j)) worst = std::max(worst, std::abs(m(i, j)));
        return worst;
    }

    static std::size_t block_of(const BlockConstraint& c, std::size_t index) {
        for (std::size_t b = 0; b < c.blocks.size(); ++b)
            if (index >= c.blocks[b].first && index < c.blocks[b].second) return b;
        return c.blocks.size();
    }

  private:
    std::size_t fiber_dim_;
    std::vector<BlockConstraint> constraints_;
};

/// Continuous M_d-valued functions on a base space with block constraints.
struct AlgebraModel {
    std::string name;
    BaseSpace base;
    BlockStructure blocks;

    AlgebraModel(std::string model_name, BaseSpace b, BlockStructure s)
        : name(std::move(model_name)), base(std::move(b)), blocks(std::move(s)) {
        for (const auto& c : blocks.constraints()) {
            if (!base.index_of(c.point))
                throw InvalidArgument("constraint point " + std::to_string(c.point) + " is not a grid point");
        }
    }

    std::size_t fiber_dim() const noexcept { return blocks.fiber_dim(); }
};

using ModelPtr = std::shared_ptr<const AlgebraModel>;

/// Gallery constructors.
namespace gallery {

/// C([0,1]) with scalar values.
inline ModelPtr scalar_interval(double step, int endpoint_refinement = 0) {
    return std::make_shared<AlgebraModel>("scalar-interval", BaseSpace::interval(step, endpoint_refinement),
                                          BlockStructure(1));
}

/// M₂-valued functions on [0,1] whose value at 1 is diagonal.
inline ModelPtr matrix_endpoint(double step, int endpoint_refinement = 24) {
    BlockStructure s(2);
    s.diagonal_at(1.0);
    return std::make_shared<AlgebraModel>("matrix-endpoint", BaseSpace::interval(step, endpoint_refinement),
                                          std::move(s));
}

inline ModelPtr discrete(std::size_t points, std::size_t fiber_dim) {
    return std::make_shared<AlgebraModel>("discrete", BaseSpace::discrete(points), BlockStructure(fiber_dim));
}

inline ModelPtr discrete(std::size_t points, BlockStructure blocks) {
    return std::make_shared<AlgebraModel>("discrete", BaseSpace::discrete(points), std::move(blocks));
}

inline ModelPtr interval(double step, BlockStructure blocks, int endpoint_refinement = 0) {
    return std::make_shared<AlgebraModel>("interval", BaseSpace::interval(step, endpoint_refinement),
                                          std::move(blocks));
}

inline ModelPtr circle(double step, std::size_t fiber_dim) {
    return std::make_shared<AlgebraModel>("circle", BaseSpace::circle(step), BlockStructure(fiber_dim));
}

}  // namespace gallery

}  // namespace repfam
