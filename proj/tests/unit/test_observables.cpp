#include <doctest.h>

#include <cmath>
#include <numbers>

#include "boolmodel/observables.hpp"
#include "boolmodel/oracles.hpp"

using namespace boolmodel;
using std::numbers::pi;

namespace {

Balls disks(std::initializer_list<std::array<double, 3>> list) {
    Balls b(2);
    for (const auto& x : list) {
        const double c[2] = {x[0], x[1]};
        b.push_back(c, x[2]);
    }
    return b;
}

IntersectionGraph graph_from_edges(std::size_t n, std::initializer_list<std::pair<int, int>> edges) {
    IntersectionGraph g;
    g.n = n;
    g.adjacency.resize(n);
    for (auto [a, b] : edges) {
        g.adjacency[a].push_back(static_cast<std::uint32_t>(b));
        g.adjacency[b].push_back(static_cast<std::uint32_t>(a));
    }
    for (auto& adj : g.adjacency) std::sort(adj.begin(), adj.end());
    label_components(g);
    return g;
}

/// Lens area of two discs of radius r with centers delta apart.
double lens_area(double r, double delta) {
    return 2 * r * r * std::acos(delta / (2 * r)) - 0.5 * delta * std::sqrt(4 * r * r - delta * delta);
}

}  // namespace

TEST_CASE("union volume") {
    const auto one = union_volume(disks({{0, 0, 1}}), 1'000'000, {50});
    CHECK(one.samples == 1'000'000);
    CHECK(std::abs(one.mean - pi) <= 4 * one.std_error);

    const auto apart = union_volume(disks({{0, 0, 1}, {5, 0, 1}}), 1'000'000, {51});
    CHECK(std::abs(apart.mean - 2 * pi) <= 4 * apart.std_error);

    const auto lens = union_volume(disks({{0, 0, 1}, {1, 0, 1}}), 1'000'000, {52});
    const double want = 2 * pi - lens_area(1.0, 1.0);
    CHECK(want == doctest::Approx(2 * pi - (2 * std::acos(0.5) - 0.5 * std::sqrt(3.0))));
    CHECK(std::abs(lens.mean - want) <= 4 * lens.std_error);

    const auto empty = union_volume(Balls(2), 10, {53});
    CHECK(empty.mean == 0.0);
    CHECK(empty.std_error == 0.0);
    CHECK_THROWS_AS(union_volume(disks({{0, 0, 1}}), 0, {54}), std::invalid_argument);
}

TEST_CASE("diameter") {
    CHECK(diameter(disks({{0, 0, 2}})) == 4.0);
    CHECK(diameter(disks({{0, 0, 1}, {1, 0, 1}})) == 3.0);
    CHECK(diameter(Balls(2)) == 0.0);
}

TEST_CASE("diameter against sampled point pairs") {
    // The supremum is approached by points on ball boundaries; the largest
    // distance among sampled boundary points can only fall short of it.
    Stream s(55);
    for (int trial = 0; trial < 5; ++trial) {
        Balls b(2);
        for (int i = 0; i < 10; ++i) {
            const double c[2] = {(s.uniform() - 0.5) * 4, (s.uniform() - 0.5) * 4};
            b.push_back(c, 0.3 + s.uniform());
        }
        const double d = diameter(b);
        std::vector<std::array<double, 2>> pts;
        for (std::size_t k = 0; k < 3000; ++k) {
            const std::size_t i = k % b.size();
            const double t = 2 * pi * s.uniform();
            pts.push_back({b.center(i)[0] + b.radius(i) * std::cos(t),
                           b.center(i)[1] + b.radius(i) * std::sin(t)});
        }
        double best = 0.0;
        for (std::size_t x = 0; x < pts.size(); ++x)
            for (std::size_t y = x + 1; y < pts.size(); ++y)
                best = std::max(best, std::hypot(pts[x][0] - pts[y][0], pts[x][1] - pts[y][1]));
        CHECK(best <= d * (1 + 1e-12));
        CHECK(best >= 0.99 * d);
    }
}

TEST_CASE("diameter is translation invariant and scales linearly") {
    Stream s(56);
    Balls b(3), moved(3), scaled(3);
    for (int i = 0; i < 12; ++i) {
        const double c[3] = {s.uniform(), s.uniform(), s.uniform()};
        const double r = 0.1 + s.uniform();
        b.push_back(c, r);
        const double m[3] = {c[0] + 7, c[1] - 3, c[2] + 1};
        moved.push_back(m, r);
        const double t[3] = {2.5 * c[0], 2.5 * c[1], 2.5 * c[2]};
        scaled.push_back(t, 2.5 * r);
    }
    CHECK(diameter(moved) == doctest::Approx(diameter(b)));
    CHECK(diameter(scaled) == doctest::Approx(2.5 * diameter(b)));
}

TEST_CASE("longest chain small graphs") {
    const auto path = graph_from_edges(3, {{0, 1}, {1, 2}});
    const auto triangle = graph_from_edges(3, {{0, 1}, {1, 2}, {0, 2}});
    const std::vector<std::size_t> start{0};
    const std::vector<std::size_t> none;
    CHECK(longest_chain(path, none).length == 0);
    CHECK(longest_chain(path, none).exact);
    for (const auto* g : {&path, &triangle}) {
        const auto r = longest_chain(*g, start);
        CHECK(r.length == 3);
        CHECK(r.exact);
        CHECK(oracle::subset_dp_longest_chain(*g, start) == 3);
    }
    // Star: the path must start at a leaf to use two spokes.
    const auto star = graph_from_edges(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
    CHECK(longest_chain(star, std::vector<std::size_t>{0}).length == 2);
    CHECK(longest_chain(star, std::vector<std::size_t>{1}).length == 3);

    // A known chain never lowers the answer and a shorter one does not change it.
    ChainOptions seeded;
    seeded.known_length = 2;
    CHECK(longest_chain(star, std::vector<std::size_t>{1}, seeded).length == 3);
    seeded.known_length = 3;
    const auto kept = longest_chain(star, std::vector<std::size_t>{1}, seeded);
    CHECK(kept.length == 3);
    CHECK(kept.exact);
}

TEST_CASE("longest chain matches subset DP on random components") {
    Stream s(57);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(s.uniform() * 11);
        IntersectionGraph g;
        g.n = n;
        g.adjacency.resize(n);
        const double p = 0.1 + 0.6 * s.uniform();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (s.uniform() < p) {
                    g.adjacency[i].push_back(static_cast<std::uint32_t>(j));
                    g.adjacency[j].push_back(static_cast<std::uint32_t>(i));
                }
        for (auto& a : g.adjacency) std::sort(a.begin(), a.end());
        label_components(g);
        std::vector<std::size_t> start{static_cast<std::size_t>(s.uniform() * n)};
        const auto got = longest_chain(g, start);
        CHECK(got.exact);
        CHECK(got.length == oracle::subset_dp_longest_chain(g, start));
    }
}

TEST_CASE("longest chain on a large path stays exact") {
    IntersectionGraph g;
    g.n = 60;
    g.adjacency.resize(60);
    for (std::uint32_t i = 0; i + 1 < 60; ++i) {
        g.adjacency[i].push_back(i + 1);
        g.adjacency[i + 1].push_back(i);
    }
    label_components(g);
    const auto r = longest_chain(g, std::vector<std::size_t>{30});
    CHECK(r.length == 31);
    CHECK(r.exact);
}

TEST_CASE("longest chain reports inexact when the budget runs out") {
    // Complete graph on 40 vertices: a Hamiltonian path exists, and the
    // search finds it greedily, so the bound closes immediately.
    IntersectionGraph k;
    k.n = 40;
    k.adjacency.resize(40);
    for (std::uint32_t i = 0; i < 40; ++i)
        for (std::uint32_t j = 0; j < 40; ++j)
            if (i != j) k.adjacency[i].push_back(j);
    label_components(k);
    CHECK(longest_chain(k, std::vector<std::size_t>{0}).length == 40);

    // Two cliques joined by a long bridge path with a dead-end comb: the
    // search has to exhaust many paths; a tiny budget cannot finish.
    IntersectionGraph g;
    const std::size_t n = 64;
    g.n = n;
    g.adjacency.resize(n);
    Stream s(58);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (s.uniform() < 0.08) {
                g.adjacency[i].push_back(static_cast<std::uint32_t>(j));
                g.adjacency[j].push_back(static_cast<std::uint32_t>(i));
            }
    for (auto& a : g.adjacency) std::sort(a.begin(), a.end());
    label_components(g);
    ChainOptions tiny;
    tiny.budget = 50;
    const auto r = longest_chain(g, std::vector<std::size_t>{0}, tiny);
    CHECK_FALSE(r.exact);
    CHECK(r.length >= 1);
}

TEST_CASE("crossing indicator") {
    const double r = 3.0;
    CHECK(crossing_indicator(disks({{1.5 * r, 0, 0.6 * r}}), r));
    CHECK_FALSE(crossing_indicator(Balls(2), r));
    CHECK_FALSE(crossing_indicator(disks({{1.05 * r, 0, 0.1 * r}, {1.95 * r, 0, 0.1 * r}}), r));
    // Joined by a bridging ball.
    CHECK(crossing_indicator(disks({{1.05 * r, 0, 0.1 * r}, {1.95 * r, 0, 0.1 * r}, {1.5 * r, 0, 0.4 * r}}), r));
    CHECK(crossing_window(4.0) == Window::ball(16.0));
    CHECK(crossing_window(4.0, 3.0) == Window::ball(24.0));
    CHECK_THROWS_AS(crossing_window(4.0, 0.5), std::invalid_argument);
}

TEST_CASE("crossing estimate is zero when no ball can be expected") {
    const ModelParams p(2, 1e-12, RadiusDistribution::constant(1.0));
    for (std::uint64_t i = 0; i < 200; ++i) CHECK_FALSE(sample_crossing(p, 4.0, {59, i}));
}

TEST_CASE("pi alpha") {
    for (double alpha : {0.5, 1.0, 3.0}) {
        const auto b = disks({{4.5 * alpha, 0, 4 * alpha}});
        CHECK(pi_alpha_event(b, alpha));
        // Same ball with its center outside B(0, 10 alpha) is ignored.
        CHECK_FALSE(pi_alpha_event(disks({{10.5 * alpha, 0, 4 * alpha}}), alpha));
    }
    const ModelParams tiny(2, 1e-12, RadiusDistribution::constant(1.0));
    for (std::uint64_t i = 0; i < 100; ++i) CHECK_FALSE(pi_alpha_indicator(tiny, 1.0, {60, i}));
}

TEST_CASE("a statistic") {
    CHECK(a_statistic(disks({{5, 0, 1}})) == 0.0);
    CHECK(a_statistic(disks({{1, 0, 3}})) == 3.0);
    CHECK(a_statistic(disks({{1, 0, 3}, {0, 0.1, 1}, {0, 0, 2.5}})) == 3.0);
    CHECK(a_statistic(disks({{1.5, 0, 3}})) == 0.0);
}

TEST_CASE("dilated component volume") {
    const auto empty = dilated_component_volume(Balls(2), 1.0, 0.5, 1000, {61});
    CHECK(empty.mean == doctest::Approx(pi * 1.5 * 1.5));
    CHECK(empty.std_error == 0.0);
    CHECK_THROWS_AS(dilated_component_volume(Balls(2), 0.0, 0.0, 1000, {61}), std::invalid_argument);
    CHECK_THROWS_AS(dilated_component_volume(Balls(2), 1.0, -1.0, 1000, {61}), std::invalid_argument);

    Stream s(62);
    for (int trial = 0; trial < 20; ++trial) {
        const double r = 0.5 + s.uniform();
        const double rho = 0.3 + 2 * s.uniform();
        const double sd = s.uniform();
        const auto b = disks({{r + rho / 2, 0, rho}, {50, 0, 1}});
        const auto v = dilated_component_volume(b, r, sd, 200'000, {63, static_cast<std::uint64_t>(trial)});
        const double upper = pi * ((r + sd) * (r + sd) + (rho + sd) * (rho + sd));
        const double lower = pi * std::pow(std::max(r, rho) + sd, 2);
        CHECK(v.mean <= upper + 4 * v.std_error);
        CHECK(v.mean >= lower - 4 * v.std_error);
    }
}

TEST_CASE("report on an empty realization") {
    const ModelParams tiny(2, 1e-12, RadiusDistribution::constant(1.0));
    const auto rep = component_report(tiny, {64});
    CHECK(rep.volume_estimate == 0.0);
    CHECK(rep.ball_count == 0);
    CHECK(rep.diameter == 0.0);
    CHECK(rep.ell == 0);
    CHECK_FALSE(rep.boundary_censored);
}

TEST_CASE("report on an injected single ball") {
    const ModelParams p(2, 1e-12, RadiusDistribution::constant(1.0));
    BallSample s{p, Window::ball(4.0), SampleMode::Touching, disks({{0, 0, 1}}), {0.0}, {65}};
    const auto rep = report_on_sample(s, {66}, {});
    CHECK(rep.ball_count == 1);
    CHECK(rep.diameter >= 2.0);
    CHECK(rep.ell == 1);
    CHECK(rep.volume_estimate >= pi - 4 * rep.volume_stderr);
    CHECK(rep.a_statistic == 1.0);
    CHECK_FALSE(rep.boundary_censored);
}

TEST_CASE("report invariants on subcritical samples") {
    const ModelParams p(2, 0.15, RadiusDistribution::constant(1.0));
    std::size_t censored = 0;
    const std::size_t n = 2000;
    ReportPolicy policy;
    policy.volume_samples = 2000;
    for (std::uint64_t i = 0; i < n; ++i) {
        const auto rep = component_report(p, {67, i}, policy);
        if (rep.boundary_censored) ++censored;
        if (rep.ball_count > 0) CHECK(rep.diameter >= 2.0);
        else CHECK(rep.diameter == 0.0);
        CHECK(rep.ell >= (rep.ball_count > 0 ? 1 : 0));
        if (!rep.boundary_censored) CHECK(rep.diameter < 4 * rep.window_rho);
    }
    // Calibration: no censored report in 2000 at lambda = 0.15.
    CHECK(static_cast<double>(censored) / n < 0.01);
}

TEST_CASE("grown samples release every relevant component") {
    const ModelParams p(2, 0.3, RadiusDistribution::constant(1.0));
    for (std::uint64_t i = 0; i < 200; ++i) {
        const auto grown = grow_sample(p, {68, i}, {});
        const auto g = build_graph(grown.sample.balls);
        CHECK(relevant_component_escapes(g, grown.sample) == grown.censored);
    }
}

TEST_CASE("ell is zero iff the start set is empty") {
    const ModelParams p(2, 0.2, RadiusDistribution::pareto(1.0, 5.0));
    ReportPolicy policy;
    policy.compute_volume = false;
    for (std::uint64_t i = 0; i < 300; ++i) {
        const auto grown = grow_sample(p, {69, i}, policy);
        const auto rep = report_on_sample(grown.sample, {70, i}, policy);
        CHECK((rep.ell == 0) == start_set(grown.sample.balls, 1.0).empty());
    }
}
