#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "boolmodel/graph.hpp"
#include "boolmodel/oracles.hpp"

using namespace boolmodel;

namespace {

Balls disks(std::initializer_list<std::array<double, 3>> list) {
    Balls b(2);
    for (const auto& x : list) {
        const double c[2] = {x[0], x[1]};
        b.push_back(c, x[2]);
    }
    return b;
}

bool has_edge(const IntersectionGraph& g, std::size_t i, std::size_t j) {
    return std::binary_search(g.adjacency[i].begin(), g.adjacency[i].end(),
                              static_cast<std::uint32_t>(j));
}

}  // namespace

TEST_CASE("edge predicate is strict") {
    const auto g1 = build_graph(disks({{0, 0, 1}, {1.5, 0, 1}}));
    CHECK(has_edge(g1, 0, 1));
    CHECK(has_edge(g1, 1, 0));
    const auto g2 = build_graph(disks({{0, 0, 1}, {2, 0, 1}}));
    CHECK(g2.edge_count() == 0);
    CHECK(g2.component_count() == 2);
}

TEST_CASE("graph matches brute force on random Pareto configurations") {
    for (std::uint64_t c = 0; c < 100; ++c) {
        const ModelParams p(2, 0.2, RadiusDistribution::pareto(1.0, 5.0));
        const auto s = sample_centers_in(p, Window::box(30.0), {40, c});
        std::string why;
        CHECK_MESSAGE(oracle::same_graph(build_graph(s.balls), oracle::brute_force_graph(s.balls), &why),
                      why);
    }
}

TEST_CASE("cell size never changes the graph") {
    const ModelParams p(3, 0.3, RadiusDistribution::uniform(0.2, 1.2));
    for (std::uint64_t c = 0; c < 10; ++c) {
        const auto s = sample_touching(p, Window::box(6.0), {41, c});
        const auto reference = oracle::brute_force_graph(s.balls);
        for (double cell : {0.05, 0.7, 5.0}) {
            GridOptions opts;
            opts.cell_size = cell;
            CHECK(oracle::same_graph(build_graph(s.balls, opts), reference));
        }
        GridOptions tiny;
        tiny.oversize_factor = 1.0;  // forces the oversized fallback path
        CHECK(oracle::same_graph(build_graph(s.balls, tiny), reference));
    }
}

TEST_CASE("insertion order does not matter") {
    const ModelParams p(2, 0.5, RadiusDistribution::pareto(1.0, 4.0));
    const auto s = sample_centers_in(p, Window::box(15.0), {42, 0});
    std::vector<std::size_t> perm(s.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::reverse(perm.begin(), perm.end());
    const auto g = build_graph(s.balls);
    const auto h = build_graph(s.balls.subset(perm));
    for (std::size_t i = 0; i < s.size(); ++i)
        for (auto j : g.adjacency[i]) CHECK(has_edge(h, perm.size() - 1 - i, perm.size() - 1 - j));
    CHECK(g.edge_count() == h.edge_count());
    CHECK(g.component_count() == h.component_count());
}

TEST_CASE("component roots agree with component labels") {
    const ModelParams p(2, 0.35, RadiusDistribution::constant(1.0));
    for (std::uint64_t c = 0; c < 20; ++c) {
        const auto s = sample_touching(p, Window::ball(8.0), {43, c});
        const auto g = build_graph(s.balls);
        const auto roots = component_roots(s.balls);
        for (std::size_t i = 0; i < s.size(); ++i)
            for (std::size_t j = 0; j < s.size(); ++j)
                CHECK((roots[i] == roots[j]) == (g.component_label[i] == g.component_label[j]));
    }
}

TEST_CASE("graph invariants: symmetric, loop-free, labels follow edges") {
    const ModelParams p(2, 0.4, RadiusDistribution::pareto(1.0, 5.0));
    const auto s = sample_touching(p, Window::ball(10.0), {44, 0});
    const auto g = build_graph(s.balls);
    for (std::size_t i = 0; i < g.n; ++i)
        for (auto j : g.adjacency[i]) {
            CHECK(j != i);
            CHECK(has_edge(g, j, i));
            CHECK(g.component_label[i] == g.component_label[j]);
        }
    std::size_t total = 0;
    for (const auto& comp : g.components) total += comp.size();
    CHECK(total == g.n);
}

TEST_CASE("component of the origin") {
    CHECK(component_of_origin(build_graph(disks({{3, 0, 1}})), disks({{3, 0, 1}})).empty());
    const auto one = disks({{0.5, 0, 1}});
    CHECK(component_of_origin(build_graph(one), one) == std::vector<std::size_t>{0});
    const auto chain = disks({{0.5, 0, 1}, {2, 0, 1}, {10, 0, 1}});
    CHECK(component_of_origin(build_graph(chain), chain) == std::vector<std::size_t>{0, 1});
}

TEST_CASE("origin component is a union of components reachable from covering balls") {
    const ModelParams p(2, 0.3, RadiusDistribution::constant(1.0));
    for (std::uint64_t c = 0; c < 30; ++c) {
        const auto s = sample_touching(p, Window::ball(6.0), {45, c});
        const auto g = build_graph(s.balls);
        const auto comp = component_of_origin(g, s.balls);
        for (auto i : comp) {
            const auto& whole = g.components[g.component_label[i]];
            for (auto j : whole) CHECK(std::binary_search(comp.begin(), comp.end(), j));
        }
        // A center lying inside a component ball belongs to that component.
        for (std::size_t b = 0; b < s.size(); ++b)
            for (auto i : comp) {
                double sq = 0;
                for (int k = 0; k < 2; ++k) {
                    const double t = s.balls.center(b)[k] - s.balls.center(i)[k];
                    sq += t * t;
                }
                if (sq < s.balls.radius(i) * s.balls.radius(i))
                    CHECK(g.component_label[b] == g.component_label[i]);
            }
    }
}

TEST_CASE("start set is strict") {
    const auto b = disks({{3, 0, 1}, {1.5, 0, 1}, {2, 0, 1}});
    CHECK(start_set(b, 1.0) == std::vector<std::size_t>{1});
}

TEST_CASE("sphere touch set") {
    const auto b = disks({{0, 0, 3}, {5, 0, 1}, {2.5, 0, 1}});
    CHECK(sphere_touch_set(b, 2.0) == std::vector<std::size_t>{0, 2});
}

TEST_CASE("disjoint sets") {
    DisjointSets d(5);
    CHECK(d.unite(0, 1));
    CHECK(d.unite(3, 4));
    CHECK_FALSE(d.unite(1, 0));
    CHECK(d.find(0) == d.find(1));
    CHECK(d.find(2) != d.find(0));
    CHECK(d.unite(1, 4));
    CHECK(d.find(0) == d.find(3));
}
