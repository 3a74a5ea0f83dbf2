#include "boolmodel/graph.hpp"

#include <algorithm>
#include <boost/container/small_vector.hpp>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace boolmodel {

std::size_t IntersectionGraph::edge_count() const {
    std::size_t twice = 0;
    for (const auto& a : adjacency) twice += a.size();
    return twice / 2;
}

DisjointSets::DisjointSets(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t DisjointSets::find(std::size_t x) {
    std::size_t root = x;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[x] != root) {
        const std::size_t next = parent_[x];
        parent_[x] = root;
        x = next;
    }
    return root;
}

bool DisjointSets::unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return true;
}

bool balls_overlap(const Balls& balls, std::size_t i, std::size_t j) {
    const auto ci = balls.center(i);
    const auto cj = balls.center(j);
    double sq = 0.0;
    for (int k = 0; k < balls.dim; ++k) {
        const double t = ci[k] - cj[k];
        sq += t * t;
    }
    const double reach = balls.radius(i) + balls.radius(j);
    return sq < reach * reach;
}

namespace {

using CellIndex = boost::container::small_vector<std::int64_t, 4>;

struct CellRange {
    CellIndex lo;
    CellIndex hi;
};

CellRange cell_range(const Balls& balls, std::size_t i, double cell) {
    const auto c = balls.center(i);
    const double r = balls.radius(i);
    CellRange out{CellIndex(balls.dim), CellIndex(balls.dim)};
    for (int k = 0; k < balls.dim; ++k) {
        out.lo[k] = static_cast<std::int64_t>(std::floor((c[k] - r) / cell));
        out.hi[k] = static_cast<std::int64_t>(std::floor((c[k] + r) / cell));
    }
    return out;
}

/// Calls f(key) for every cell of the range. Distinct cells may share a key;
/// that only adds candidates, never drops one.
template <typename F>
void for_each_cell(const CellRange& range, F&& f) {
    CellIndex idx = range.lo;
    const std::size_t d = idx.size();
    for (;;) {
        std::uint64_t key = 0;
        for (auto v : idx) key = (key ^ static_cast<std::uint64_t>(v)) * 0x9e3779b97f4a7c15ULL;
        f(key ^ key >> 29);
        std::size_t k = 0;
        while (k < d && idx[k] == range.hi[k]) {
            idx[k] = range.lo[k];
            ++k;
        }
        if (k == d) return;
        ++idx[k];
    }
}

/// Cell keys folded into a power-of-two bucket table, stored as a
/// compressed row array (counting sort, linear time).
class BucketGrid {
public:
    BucketGrid(const Balls& balls, const std::vector<std::size_t>& members, double cell) {
        std::vector<std::pair<std::uint64_t, std::uint32_t>> entries;
        entries.reserve(members.size() * (std::size_t{1} << balls.dim));
        for (auto i : members)
            for_each_cell(cell_range(balls, i, cell), [&](std::uint64_t key) {
                entries.emplace_back(key, static_cast<std::uint32_t>(i));
            });
        std::size_t buckets = 16;
        while (buckets < 2 * entries.size()) buckets <<= 1;
        mask_ = buckets - 1;
        offsets_.assign(buckets + 1, 0);
        for (const auto& e : entries) ++offsets_[(e.first & mask_) + 1];
        for (std::size_t b = 0; b < buckets; ++b) offsets_[b + 1] += offsets_[b];
        items_.resize(entries.size());
        std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
        for (const auto& e : entries) items_[fill[e.first & mask_]++] = e.second;
    }

    std::span<const std::uint32_t> bucket(std::uint64_t key) const {
        const std::size_t b = key & mask_;
        return std::span(items_).subspan(offsets_[b], offsets_[b + 1] - offsets_[b]);
    }

private:
    std::uint64_t mask_ = 0;
    std::vector<std::uint32_t> offsets_;
    std::vector<std::uint32_t> items_;
};

double automatic_cell(const Balls& balls, const GridOptions& opts) {
    if (opts.cell_size) {
        if (!(*opts.cell_size > 0.0)) throw std::invalid_argument("cell size must be positive");
        return *opts.cell_size;
    }
    if (balls.empty()) return 1.0;
    std::vector<double> r = balls.radii;
    auto mid = r.begin() + static_cast<std::ptrdiff_t>(r.size() / 2);
    std::nth_element(r.begin(), mid, r.end());
    return std::max(2.0 * *mid, opts.cell_floor);
}

/// Calls f(i, j) once for every overlapping pair.
template <typename F>
void for_each_overlap(const Balls& balls, const GridOptions& opts, F&& f) {
    const std::size_t n = balls.size();
    const double cell = automatic_cell(balls, opts);
    const double oversize = cell * opts.oversize_factor;

    std::vector<std::size_t> gridded, oversized;
    for (std::size_t i = 0; i < n; ++i)
        (balls.radius(i) > oversize ? oversized : gridded).push_back(i);

    const BucketGrid grid(balls, gridded, cell);
    std::vector<std::size_t> stamp(n, n);
    for (auto i : gridded) {
        for_each_cell(cell_range(balls, i, cell), [&](std::uint64_t key) {
            for (const std::size_t j : grid.bucket(key)) {
                if (j <= i || stamp[j] == i) continue;
                stamp[j] = i;
                if (balls_overlap(balls, i, j)) f(i, j);
            }
        });
    }

    for (std::size_t a = 0; a < oversized.size(); ++a) {
        const std::size_t o = oversized[a];
        for (auto j : gridded)
            if (balls_overlap(balls, o, j)) f(o, j);
        for (std::size_t b = a + 1; b < oversized.size(); ++b)
            if (balls_overlap(balls, o, oversized[b])) f(o, oversized[b]);
    }
}

}  // namespace

IntersectionGraph build_graph(const Balls& balls, const GridOptions& opts) {
    IntersectionGraph g;
    g.n = balls.size();
    g.adjacency.resize(g.n);
    for_each_overlap(balls, opts, [&](std::size_t i, std::size_t j) {
        g.adjacency[i].push_back(static_cast<std::uint32_t>(j));
        g.adjacency[j].push_back(static_cast<std::uint32_t>(i));
    });
    for (auto& adj : g.adjacency) std::sort(adj.begin(), adj.end());
    label_components(g);
    return g;
}

std::vector<std::uint32_t> component_roots(const Balls& balls, const GridOptions& opts) {
    DisjointSets sets(balls.size());
    for_each_overlap(balls, opts, [&](std::size_t i, std::size_t j) { sets.unite(i, j); });
    std::vector<std::uint32_t> roots(balls.size());
    for (std::size_t i = 0; i < roots.size(); ++i) roots[i] = static_cast<std::uint32_t>(sets.find(i));
    return roots;
}

void label_components(IntersectionGraph& g) {
    DisjointSets sets(g.n);
    for (std::size_t i = 0; i < g.n; ++i)
        for (auto j : g.adjacency[i])
            if (j > i) sets.unite(i, j);

    constexpr auto kUnset = static_cast<std::uint32_t>(-1);
    std::vector<std::uint32_t> root_label(g.n, kUnset);
    g.component_label.assign(g.n, 0);
    g.components.clear();
    for (std::size_t i = 0; i < g.n; ++i) {
        const std::size_t root = sets.find(i);
        if (root_label[root] == kUnset) {
            root_label[root] = static_cast<std::uint32_t>(g.components.size());
            g.components.emplace_back();
        }
        g.component_label[i] = root_label[root];
        g.components[root_label[root]].push_back(i);
    }
}

std::vector<std::size_t> components_containing(const IntersectionGraph& g,
                                               const std::vector<std::size_t>& seeds) {
    std::vector<std::uint32_t> labels;
    for (auto i : seeds) labels.push_back(g.component_label[i]);
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    std::vector<std::size_t> out;
    for (auto l : labels) out.insert(out.end(), g.components[l].begin(), g.components[l].end());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::size_t> component_of_origin(const IntersectionGraph& g, const Balls& balls) {
    std::vector<std::size_t> covering;
    for (std::size_t i = 0; i < balls.size(); ++i)
        if (balls.center_norm(i) < balls.radius(i)) covering.push_back(i);
    return components_containing(g, covering);
}

std::vector<std::size_t> start_set(const Balls& balls, double rho) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < balls.size(); ++i)
        if (balls.center_norm(i) < balls.radius(i) + rho) out.push_back(i);
    return out;
}

std::vector<std::size_t> sphere_touch_set(const Balls& balls, double rho) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < balls.size(); ++i)
        if (std::abs(balls.center_norm(i) - rho) < balls.radius(i)) out.push_back(i);
    return out;
}

}  // namespace boolmodel
