#pragma once
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace barslab::metric {

enum class MetricKind { euclidean, chebyshev };

// Finite point set with a metric; the substrate for nets, cover trees and
// gamma2 estimates.  All points must share one dimension.
class FiniteMetricSpace {
public:
    FiniteMetricSpace(std::vector<std::vector<double>> points, MetricKind kind);

    std::size_t size() const { return points_.size(); }
    std::size_t dim() const { return points_.empty() ? 0 : points_[0].size(); }
    MetricKind kind() const { return kind_; }
    const std::vector<double>& point(std::size_t i) const { return points_[i]; }
    const std::vector<std::vector<double>>& points() const { return points_; }

    double distance(std::size_t i, std::size_t j) const;
    double distance_to(const std::vector<double>& x, std::size_t j) const;

    double diameter() const;
    // Smallest nonzero pairwise distance; 0 when all points coincide or n == 1.
    double min_positive_distance() const;

    // Subspace on the given indices, same metric.
    FiniteMetricSpace restrict(const std::vector<int>& indices) const;

private:
    std::vector<std::vector<double>> points_;
    MetricKind kind_;
};

std::vector<std::vector<double>> distance_matrix(const FiniteMetricSpace& space);

struct EpsNet {
    double epsilon = 0.0;
    std::vector<int> center_indices;
};

// Greedy net seeded at index 0, scanning points in index order.  The result
// covers the space at radius epsilon and its centers are pairwise > epsilon
// apart.
EpsNet greedy_eps_net(const FiniteMetricSpace& space, double epsilon);

// Minimum number of closed epsilon-balls centered at points of the space
// that cover it.  Exponential search; oracle use only (n <= 20).
int covering_number_exact(const FiniteMetricSpace& space, double epsilon);

// Hierarchy of nested nets: level at scale i is a 2^i-net of the space.
// Levels run from top_scale (one node) down to bottom_scale (every distinct
// point separated).  Construction is greedy in point index order, each level
// seeded by the one above it, so rebuilds and incremental inserts agree.
class CoverTree {
public:
    static CoverTree build(const FiniteMetricSpace& space);

    // Append a point (it receives the next index) and restore all levels.
    void insert(const std::vector<double>& p);

    int top_scale() const { return top_scale_; }
    int bottom_scale() const { return bottom_scale_; }
    int num_levels() const { return static_cast<int>(levels_.size()); }
    // Node point ids of the 2^i-net at scale i = top_scale - k.
    const std::vector<int>& level_nodes(int k) const { return levels_[k]; }
    // Parent node (point id in the level above) per node; -1 at the root level.
    const std::vector<int>& level_parents(int k) const { return parents_[k]; }
    const FiniteMetricSpace& space() const { return space_; }

    double scale_radius(int k) const;  // 2^(top_scale - k)

private:
    CoverTree(FiniteMetricSpace space) : space_(std::move(space)) {}
    void rebuild();

    FiniteMetricSpace space_;
    int top_scale_ = 0;
    int bottom_scale_ = 0;
    std::vector<std::vector<int>> levels_;
    std::vector<std::vector<int>> parents_;
};

struct Gamma2Estimate {
    double upper = 0.0;
    double dudley = 0.0;
    std::optional<double> brute;  // tiny spaces only
};

// Upper estimate of the gamma2 functional from the tree levels: the nets,
// re-indexed by the cardinality budget 1, 4, 16, 256, ... of the defining
// infimum, form an admissible sequence, and the value of any admissible
// sequence upper-bounds gamma2.
double gamma2_upper(const CoverTree& tree);

// Exact gamma2 by exhaustive search over admissible sequences.  Valid for
// n <= 6: the level-2 set may hold all points, so deeper levels vanish and
// the series truncates at depth 2.
double gamma2_bruteforce(const FiniteMetricSpace& space);

struct DudleyBound {
    double value = 0.0;
    // True when covering numbers came from greedy-net sizes instead of the
    // exact set-cover search (spaces with more than 20 distinct points).
    bool greedy_surrogate = false;
};

// Entropy integral of sqrt(log N(S,d,eps)) over (0, diam], midpoint rule on
// a geometric grid plus the exact constant piece below the smallest pairwise
// distance.
DudleyBound dudley_bound(const FiniteMetricSpace& space, int quadrature_steps);

}  // namespace barslab::metric
