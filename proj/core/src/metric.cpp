#include "barslab/metric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace barslab::metric {

namespace {

double dist_impl(const std::vector<double>& a, const std::vector<double>& b,
                 MetricKind kind) {
    if (kind == MetricKind::euclidean) {
        double s = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            const double d = a[k] - b[k];
            s += d * d;
        }
        return std::sqrt(s);
    }
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        m = std::max(m, std::abs(a[k] - b[k]));
    }
    return m;
}

}  // namespace

FiniteMetricSpace::FiniteMetricSpace(std::vector<std::vector<double>> points,
                                     MetricKind kind)
    : points_(std::move(points)), kind_(kind) {
    if (points_.empty()) {
        throw std::invalid_argument("FiniteMetricSpace: need at least one point");
    }
    const std::size_t d = points_[0].size();
    for (const auto& p : points_) {
        if (p.size() != d) {
            throw std::invalid_argument(
                "FiniteMetricSpace: dimension mismatch among points");
        }
    }
}

double FiniteMetricSpace::distance(std::size_t i, std::size_t j) const {
    return dist_impl(points_[i], points_[j], kind_);
}

double FiniteMetricSpace::distance_to(const std::vector<double>& x,
                                      std::size_t j) const {
    if (x.size() != dim()) {
        throw std::invalid_argument("FiniteMetricSpace: query dimension mismatch");
    }
    return dist_impl(x, points_[j], kind_);
}

double FiniteMetricSpace::diameter() const {
    double m = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
        for (std::size_t j = i + 1; j < size(); ++j) {
            m = std::max(m, distance(i, j));
        }
    }
    return m;
}

double FiniteMetricSpace::min_positive_distance() const {
    double m = std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t i = 0; i < size(); ++i) {
        for (std::size_t j = i + 1; j < size(); ++j) {
            const double d = distance(i, j);
            if (d > 0.0 && d < m) {
                m = d;
                any = true;
            }
        }
    }
    return any ? m : 0.0;
}

FiniteMetricSpace FiniteMetricSpace::restrict(const std::vector<int>& indices) const {
    std::vector<std::vector<double>> pts;
    pts.reserve(indices.size());
    for (int i : indices) {
        if (i < 0 || static_cast<std::size_t>(i) >= size()) {
            throw std::out_of_range("FiniteMetricSpace::restrict: index out of range");
        }
        pts.push_back(points_[static_cast<std::size_t>(i)]);
    }
    return FiniteMetricSpace(std::move(pts), kind_);
}

std::vector<std::vector<double>> distance_matrix(const FiniteMetricSpace& space) {
    const std::size_t n = space.size();
    std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = space.distance(i, j);
            m[i][j] = d;
            m[j][i] = d;
        }
    }
    return m;
}

EpsNet greedy_eps_net(const FiniteMetricSpace& space, double epsilon) {
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("greedy_eps_net: epsilon must be > 0");
    }
    EpsNet net;
    net.epsilon = epsilon;
    net.center_indices.push_back(0);  // deterministic seed
    for (std::size_t p = 1; p < space.size(); ++p) {
        double dmin = std::numeric_limits<double>::infinity();
        for (int c : net.center_indices) {
            dmin = std::min(dmin, space.distance(p, static_cast<std::size_t>(c)));
        }
        if (dmin > epsilon) {
            net.center_indices.push_back(static_cast<int>(p));
        }
    }
    return net;
}

namespace {

// Exact minimum set cover over ball masks; branch on the lowest uncovered
// point, iterative deepening on cover size.
bool cover_exists(const std::vector<std::uint32_t>& masks, std::uint32_t covered,
                  std::uint32_t full, int remaining) {
    if (covered == full) return true;
    if (remaining == 0) return false;
    std::uint32_t uncovered = full & ~covered;
    const int low = __builtin_ctz(uncovered);
    for (std::size_t c = 0; c < masks.size(); ++c) {
        if (masks[c] & (1u << low)) {
            if (cover_exists(masks, covered | masks[c], full, remaining - 1)) {
                return true;
            }
        }
    }
    return false;
}

}  // namespace

int covering_number_exact(const FiniteMetricSpace& space, double epsilon) {
    const std::size_t n = space.size();
    if (n > 20) {
        throw std::invalid_argument(
            "covering_number_exact: oracle limited to n <= 20 points, got n = " +
            std::to_string(n));
    }
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("covering_number_exact: epsilon must be > 0");
    }
    std::vector<std::uint32_t> masks(n, 0u);
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t p = 0; p < n; ++p) {
            if (space.distance(c, p) <= epsilon) {
                masks[c] |= (1u << p);
            }
        }
    }
    const std::uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1u);
    for (int k = 1; k <= static_cast<int>(n); ++k) {
        if (cover_exists(masks, 0u, full, k)) return k;
    }
    return static_cast<int>(n);  // unreachable: singletons always cover
}

namespace {

int scale_ceil_log2(double x) {
    int i = static_cast<int>(std::ceil(std::log2(x)));
    while (std::ldexp(1.0, i) < x) ++i;
    while (i > std::numeric_limits<int>::min() + 1 && std::ldexp(1.0, i - 1) >= x) --i;
    return i;
}

// Largest i with 2^i strictly below x.
int scale_below(double x) {
    int i = static_cast<int>(std::floor(std::log2(x)));
    while (std::ldexp(1.0, i) >= x) --i;
    while (std::ldexp(1.0, i + 1) < x) ++i;
    return i;
}

}  // namespace

CoverTree CoverTree::build(const FiniteMetricSpace& space) {
    CoverTree t(space);
    t.rebuild();
    return t;
}

double CoverTree::scale_radius(int k) const {
    return std::ldexp(1.0, top_scale_ - k);
}

void CoverTree::rebuild() {
    levels_.clear();
    parents_.clear();

    const double diam = space_.diameter();
    const double dmin = space_.min_positive_distance();
    if (diam <= 0.0) {
        // Single point (possibly replicated): one level, one node.
        top_scale_ = 0;
        bottom_scale_ = 0;
        levels_.push_back({0});
        parents_.push_back({-1});
        return;
    }
    top_scale_ = scale_ceil_log2(diam);
    bottom_scale_ = scale_below(dmin);

    const std::size_t n = space_.size();
    std::vector<char> in_net(n, 0);
    std::vector<int> net;

    for (int i = top_scale_; i >= bottom_scale_; --i) {
        const double radius = std::ldexp(1.0, i);
        // Greedy 2^i-net in point index order, seeded by the coarser level.
        for (std::size_t p = 0; p < n; ++p) {
            if (in_net[p]) continue;
            double d = std::numeric_limits<double>::infinity();
            for (int c : net) {
                d = std::min(d, space_.distance(p, static_cast<std::size_t>(c)));
            }
            if (d > radius) {
                net.push_back(static_cast<int>(p));
                in_net[p] = 1;
            }
        }
        std::vector<int> nodes = net;
        std::sort(nodes.begin(), nodes.end());
        levels_.push_back(std::move(nodes));
    }

    // Parent links: nearest node in the level above, lowest point id on ties.
    parents_.resize(levels_.size());
    parents_[0] = {-1};
    for (std::size_t k = 1; k < levels_.size(); ++k) {
        parents_[k].resize(levels_[k].size(), -1);
        for (std::size_t j = 0; j < levels_[k].size(); ++j) {
            const int p = levels_[k][j];
            double best = std::numeric_limits<double>::infinity();
            int arg = -1;
            for (int q : levels_[k - 1]) {
                const double d = space_.distance(static_cast<std::size_t>(p),
                                                 static_cast<std::size_t>(q));
                if (d < best) {
                    best = d;
                    arg = q;
                }
            }
            parents_[k][j] = arg;
        }
    }
}

void CoverTree::insert(const std::vector<double>& p) {
    auto pts = space_.points();
    pts.push_back(p);
    space_ = FiniteMetricSpace(std::move(pts), space_.kind());
    // Greedy levels in index order are history-free, so a rebuild after
    // appending reproduces exactly the incremental result.
    rebuild();
}

double gamma2_upper(const CoverTree& tree) {
    const auto& space = tree.space();
    const std::size_t n = space.size();
    const int L = tree.num_levels();

    // Cardinality budget of the defining infimum: |T_0| = 1, |T_m| <= 2^(2^m).
    auto cap = [](int m) -> std::size_t {
        if (m == 0) return 1;
        if (m >= 6) return std::numeric_limits<std::size_t>::max();
        return static_cast<std::size_t>(1) << (static_cast<std::size_t>(1) << m);
    };

    // Slot m -> deepest level whose node count fits the budget.
    std::vector<int> slot_level;
    for (int m = 0;; ++m) {
        int lev = -1;
        for (int k = 0; k < L; ++k) {
            if (tree.level_nodes(k).size() <= cap(m)) lev = k;
        }
        if (lev < 0) break;  // cannot happen: top level has one node
        slot_level.push_back(lev);
        if (lev == L - 1) break;
    }

    double worst = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        double sum = 0.0;
        for (std::size_t m = 0; m < slot_level.size(); ++m) {
            const auto& nodes = tree.level_nodes(slot_level[m]);
            double d = std::numeric_limits<double>::infinity();
            for (int c : nodes) {
                d = std::min(d, space.distance(p, static_cast<std::size_t>(c)));
            }
            sum += std::pow(2.0, 0.5 * static_cast<double>(m)) * d;
        }
        worst = std::max(worst, sum);
    }
    return worst;
}

double gamma2_bruteforce(const FiniteMetricSpace& space) {
    const int n = static_cast<int>(space.size());
    if (n > 6) {
        throw std::invalid_argument(
            "gamma2_bruteforce: exhaustive oracle limited to n <= 6 points");
    }
    if (n == 1) return 0.0;

    // T_2 may hold all points (|T_2| <= 16 >= n), so only T_0 and T_1 matter.
    const double sqrt2 = std::sqrt(2.0);
    double best = std::numeric_limits<double>::infinity();
    for (int t0 = 0; t0 < n; ++t0) {
        for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
            if (__builtin_popcount(mask) > 4) continue;
            double value = 0.0;
            for (int t = 0; t < n; ++t) {
                const double d0 = space.distance(static_cast<std::size_t>(t),
                                                 static_cast<std::size_t>(t0));
                double d1 = std::numeric_limits<double>::infinity();
                for (int c = 0; c < n; ++c) {
                    if (mask & (1u << c)) {
                        d1 = std::min(d1, space.distance(static_cast<std::size_t>(t),
                                                         static_cast<std::size_t>(c)));
                    }
                }
                value = std::max(value, d0 + sqrt2 * d1);
            }
            best = std::min(best, value);
        }
    }
    return best;
}

DudleyBound dudley_bound(const FiniteMetricSpace& space, int quadrature_steps) {
    if (quadrature_steps < 2) {
        throw std::invalid_argument("dudley_bound: quadrature_steps must be >= 2");
    }
    DudleyBound out;

    // Count distinct points; duplicates never change covering numbers.
    const std::size_t n = space.size();
    std::size_t n_distinct = 0;
    for (std::size_t i = 0; i < n; ++i) {
        bool dup = false;
        for (std::size_t j = 0; j < i && !dup; ++j) {
            dup = (space.distance(i, j) == 0.0);
        }
        if (!dup) ++n_distinct;
    }
    if (n_distinct <= 1) return out;

    out.greedy_surrogate = (n_distinct > 20);
    auto covering = [&](double eps) -> double {
        if (!out.greedy_surrogate) {
            return static_cast<double>(covering_number_exact(space, eps));
        }
        return static_cast<double>(greedy_eps_net(space, eps).center_indices.size());
    };

    const double diam = space.diameter();
    const double dmin = space.min_positive_distance();

    // N(eps) = n_distinct on (0, dmin): exact contribution.
    double total = dmin * std::sqrt(std::log(static_cast<double>(n_distinct)));

    if (diam > dmin) {
        // Midpoint rule on a geometric grid over [dmin, diam]; the integrand
        // is a step function with jumps at pairwise distances.
        const double ratio = diam / dmin;
        double g0 = dmin;
        for (int j = 1; j <= quadrature_steps; ++j) {
            const double g1 =
                dmin * std::pow(ratio, static_cast<double>(j) /
                                           static_cast<double>(quadrature_steps));
            const double mid = std::sqrt(g0 * g1);
            const double nc = covering(mid);
            if (nc > 1.0) {
                total += (g1 - g0) * std::sqrt(std::log(nc));
            }
            g0 = g1;
        }
    }
    out.value = total;
    return out;
}

}  // namespace barslab::metric
