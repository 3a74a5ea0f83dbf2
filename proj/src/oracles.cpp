#include "boolmodel/oracles.hpp"

#include <algorithm>
#include <bit>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "boolmodel/observables.hpp"
#include "boolmodel/parallel.hpp"
#include "boolmodel/sampler.hpp"
#include "boolmodel/stats.hpp"
#include "boolmodel/text.hpp"

namespace boolmodel::oracle {

IntersectionGraph brute_force_graph(const Balls& balls) {
    IntersectionGraph g;
    g.n = balls.size();
    g.adjacency.resize(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        for (std::size_t j = 0; j < g.n; ++j) {
            if (i == j) continue;
            double sq = 0.0;
            for (int k = 0; k < balls.dim; ++k) {
                const double t = balls.center(i)[k] - balls.center(j)[k];
                sq += t * t;
            }
            if (std::sqrt(sq) < balls.radius(i) + balls.radius(j))
                g.adjacency[i].push_back(static_cast<std::uint32_t>(j));
        }
    }
    // Components by breadth-first search, labelled by smallest member.
    g.component_label.assign(g.n, std::numeric_limits<std::uint32_t>::max());
    for (std::size_t s = 0; s < g.n; ++s) {
        if (g.component_label[s] != std::numeric_limits<std::uint32_t>::max()) continue;
        const auto label = static_cast<std::uint32_t>(g.components.size());
        g.components.emplace_back();
        std::deque<std::size_t> queue{s};
        g.component_label[s] = label;
        while (!queue.empty()) {
            const auto v = queue.front();
            queue.pop_front();
            g.components.back().push_back(v);
            for (auto u : g.adjacency[v]) {
                if (g.component_label[u] == label) continue;
                g.component_label[u] = label;
                queue.push_back(u);
            }
        }
        std::sort(g.components.back().begin(), g.components.back().end());
    }
    return g;
}

bool same_graph(const IntersectionGraph& a, const IntersectionGraph& b, std::string* why) {
    auto fail = [why](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (a.n != b.n) return fail("vertex counts differ");
    for (std::size_t i = 0; i < a.n; ++i)
        if (a.adjacency[i] != b.adjacency[i])
            return fail("adjacency of ball " + std::to_string(i) + " differs");
    if (a.components != b.components) return fail("component partitions differ");
    if (a.component_label != b.component_label) return fail("component labels differ");
    return true;
}

int subset_dp_longest_chain(const IntersectionGraph& g, std::span<const std::size_t> start) {
    std::vector<char> is_start(g.n, 0);
    for (auto s : start) is_start[s] = 1;
    int best = 0;
    std::vector<char> done(g.components.size(), 0);
    for (auto s : start) {
        const auto label = g.component_label[s];
        if (done[label]) continue;
        done[label] = 1;
        const auto& comp = g.components[label];
        const std::size_t k = comp.size();
        if (k > 20) throw std::invalid_argument("subset DP oracle limited to 20-vertex components");
        std::vector<std::uint32_t> adj(k, 0);
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = 0; b < k; ++b)
                if (std::binary_search(g.adjacency[comp[a]].begin(), g.adjacency[comp[a]].end(),
                                       static_cast<std::uint32_t>(comp[b])))
                    adj[a] |= 1u << b;
        // ends[mask]: vertices v such that some simple path from a start
        // vertex visits exactly `mask` and ends at v.
        std::vector<std::uint32_t> ends(std::size_t{1} << k, 0);
        for (std::size_t a = 0; a < k; ++a)
            if (is_start[comp[a]]) ends[std::size_t{1} << a] |= 1u << a;
        for (std::size_t mask = 1; mask < ends.size(); ++mask) {
            if (!ends[mask]) continue;
            best = std::max(best, std::popcount(mask));
            for (std::size_t v = 0; v < k; ++v) {
                if (!(ends[mask] >> v & 1u)) continue;
                const std::uint32_t next = adj[v] & ~static_cast<std::uint32_t>(mask);
                for (std::size_t u = 0; u < k; ++u)
                    if (next >> u & 1u) ends[mask | (std::size_t{1} << u)] |= 1u << u;
            }
        }
    }
    return best;
}

namespace {

constexpr double kQuadTol = 1e-13;

template <typename F>
double integrate(F f, double lo, double hi) {
    if (std::isinf(hi)) {
        boost::math::quadrature::exp_sinh<double> q;
        return q.integrate(f, lo, hi, kQuadTol);
    }
    if (!(hi > lo)) return 0.0;
    boost::math::quadrature::tanh_sinh<double> q;
    return q.integrate(f, lo, hi, kQuadTol);
}

/// Integral of g(r) against one base law restricted to [lo, +inf).
template <typename G>
double integrate_law(const BaseLaw& law, G g, double lo) {
    return std::visit(
        [&](const auto& l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, ConstantLaw>) {
                return l.r0 >= lo ? g(l.r0) : 0.0;
            } else if constexpr (std::is_same_v<T, UniformLaw>) {
                const double density = 1.0 / (l.b - l.a);
                return integrate([&](double r) { return g(r) * density; }, std::max(lo, l.a), l.b);
            } else {
                const double a = l.exponent;
                const double c = a * std::pow(l.xm, a);
                // Far out r^s overflows while r^(-a-1) underflows; the true
                // integrand is negligible there.
                auto f = [&](double r) {
                    const double v = g(r) * c * std::pow(r, -a - 1.0);
                    return std::isfinite(v) ? v : 0.0;
                };
                return integrate(f,
                                 std::max(lo, l.xm), std::numeric_limits<double>::infinity());
            }
        },
        law);
}

template <typename G>
double integrate_dist(const RadiusDistribution& dist, G g, double lo) {
    double total = 0.0;
    for (const auto& p : dist.parts()) total += p.weight * integrate_law(p.law, g, lo);
    return total;
}

Check make_check(std::string suite, std::string name, bool passed, std::string detail) {
    return {std::move(suite), std::move(name), passed, std::move(detail)};
}

Check relative_check(const std::string& suite, const std::string& name, double got, double want,
                     double tol) {
    const double rel = std::abs(got - want) / std::max(std::abs(want), 1e-300);
    std::ostringstream os;
    os << "closed form " << format_double(got) << ", quadrature " << format_double(want)
       << ", rel err " << format_double(rel);
    return make_check(suite, name, rel < tol, os.str());
}

Balls random_balls(Stream& s, int d, std::size_t n, double side) {
    const auto radius = RadiusDistribution::pareto(1.0, 5.0);
    Balls balls(d);
    std::vector<double> c(d);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& x : c) x = (s.uniform() - 0.5) * side;
        balls.push_back(c, sample_radius(radius, s));
    }
    return balls;
}

/// Unit-spaced lattice of radius-1/2 balls: neighbours are exactly tangent.
Balls tangent_lattice() {
    Balls balls(2);
    for (int x = 0; x < 8; ++x)
        for (int y = 0; y < 8; ++y) {
            const double c[2] = {static_cast<double>(x), static_cast<double>(y)};
            balls.push_back(c, 0.5);
        }
    const double extra[2] = {3.5, 3.5};
    balls.push_back(extra, 0.75);
    return balls;
}

}  // namespace

double quadrature_moment(const RadiusDistribution& dist, double s) {
    return integrate_dist(dist, [s](double r) { return std::pow(r, s); }, 0.0);
}

double quadrature_tail_mass(const RadiusDistribution& dist, int d, double alpha) {
    return integrate_dist(dist, [d](double r) { return std::pow(r, d); }, alpha);
}

double quadrature_tilt(const RadiusDistribution& dist, const Window& w, int d, double lambda) {
    return lambda * integrate_dist(dist, [&](double r) { return steiner_volume(w, r, d); }, 0.0);
}

double a_survival(const ModelParams& params, double a) {
    const int d = params.dimension();
    return -std::expm1(-params.lambda() * unit_ball_volume(d) * std::pow(2.0, -d) *
                       tail_mass(params.radius(), d, a));
}

std::vector<AStatisticEstimate> a_statistic_survival(const ModelParams& params,
                                                     std::span<const double> thresholds,
                                                     std::size_t replicates, std::uint64_t seed,
                                                     unsigned threads) {
    std::vector<double> values(replicates);
    parallel_for(replicates, threads, [&](std::size_t i) {
        values[i] = a_statistic(sample_touching(params, Window::ball(1.0), {seed, 7, i}).balls);
    });
    std::vector<AStatisticEstimate> out;
    for (double a : thresholds) {
        AStatisticEstimate e;
        e.a = a;
        e.trials = replicates;
        for (double v : values)
            if (v > a) ++e.exceed;
        e.expected = a_survival(params, a);
        e.std_error = std::sqrt(e.expected * (1.0 - e.expected) / static_cast<double>(replicates));
        out.push_back(e);
    }
    return out;
}

std::vector<Check> graph_suite(std::size_t configs, const GraphBuilder& builder) {
    const GraphBuilder build =
        builder ? builder : GraphBuilder([](const Balls& b) { return build_graph(b); });
    std::vector<Check> out;
    std::size_t failures = 0;
    std::string first_failure;
    for (std::size_t c = 0; c < configs; ++c) {
        Stream s({0x6a09e667ULL, c});
        const int d = c % 2 == 0 ? 2 : 3;
        const std::size_t n = 10 + static_cast<std::size_t>(s.uniform() * 191.0);
        const Balls balls = random_balls(s, d, n, d == 2 ? 30.0 : 12.0);
        std::string why;
        if (!same_graph(build(balls), brute_force_graph(balls), &why)) {
            if (failures++ == 0) first_failure = "config " + std::to_string(c) + ": " + why;
        }
    }
    out.push_back(make_check("graph", "pareto(1,5) configs vs brute force",
                             failures == 0,
                             std::to_string(configs - failures) + "/" + std::to_string(configs) +
                                 " match" + (failures ? "; " + first_failure : "")));
    const Balls lattice = tangent_lattice();
    std::string why;
    const bool ok = same_graph(build(lattice), brute_force_graph(lattice), &why);
    out.push_back(make_check("graph", "tangent lattice (open balls)", ok, ok ? "match" : why));
    return out;
}

std::vector<Check> chain_suite(std::size_t components) {
    std::size_t mismatches = 0, inexact = 0;
    std::string first;
    for (std::size_t c = 0; c < components; ++c) {
        Stream s({0xbb67ae85ULL, c});
        IntersectionGraph g;
        std::vector<std::size_t> start;
        if (c % 2 == 0) {
            const std::size_t k = 1 + static_cast<std::size_t>(s.uniform() * 12.0);
            const double p = 0.15 + 0.55 * s.uniform();
            g.n = k;
            g.adjacency.resize(k);
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = i + 1; j < k; ++j)
                    if (s.uniform() < p) {
                        g.adjacency[i].push_back(static_cast<std::uint32_t>(j));
                        g.adjacency[j].push_back(static_cast<std::uint32_t>(i));
                    }
            for (auto& adj : g.adjacency) std::sort(adj.begin(), adj.end());
            label_components(g);
            for (std::size_t i = 0; i < k; ++i)
                if (s.uniform() < 0.3) start.push_back(i);
            if (start.empty()) start.push_back(0);
        } else {
            const ModelParams params(2, 0.25, RadiusDistribution::constant(1.0));
            const auto sample = sample_centers_in(params, Window::box(8.0), {0xbb67ae85ULL, c, 1});
            g = build_graph(sample.balls);
            for (auto i : start_set(sample.balls, 1.0))
                if (g.components[g.component_label[i]].size() <= 12) start.push_back(i);
        }
        const auto got = longest_chain(g, start);
        const int want = subset_dp_longest_chain(g, start);
        if (!got.exact) ++inexact;
        if (got.length != want) {
            if (mismatches++ == 0)
                first = "case " + std::to_string(c) + ": search " + std::to_string(got.length) +
                        ", subset DP " + std::to_string(want);
        }
    }
    return {make_check("chain", "longest chain vs subset DP",
                       mismatches == 0 && inexact == 0,
                       std::to_string(components - mismatches) + "/" + std::to_string(components) +
                           " match, " + std::to_string(inexact) + " inexact" +
                           (mismatches ? "; " + first : ""))};
}

std::vector<Check> moment_suite() {
    std::vector<Check> out;
    const double tol = 1e-8;
    const auto p45 = RadiusDistribution::pareto(1.0, 4.5);
    const auto p5 = RadiusDistribution::pareto(1.0, 5.0);
    const auto uni = RadiusDistribution::uniform(0.5, 1.5);
    const auto mix = RadiusDistribution::mixture({{0.3, uni}, {0.7, RadiusDistribution::pareto(2.0, 6.0)}});
    out.push_back(relative_check("moments", "E R^2, pareto(1,4.5)", moment(p45, 2).value(),
                                 quadrature_moment(p45, 2), tol));
    for (int s = 1; s <= 4; ++s)
        out.push_back(relative_check("moments", "E R^" + std::to_string(s) + ", uniform(0.5,1.5)",
                                     moment(uni, s).value(), quadrature_moment(uni, s), tol));
    out.push_back(relative_check("moments", "E R^3.5, mixture", moment(mix, 3.5).value(),
                                 quadrature_moment(mix, 3.5), tol));
    out.push_back(relative_check("moments", "tail mass d=2 alpha=2, pareto(1,5)",
                                 tail_mass(p5, 2, 2.0), quadrature_tail_mass(p5, 2, 2.0), tol));
    out.push_back(relative_check("moments", "tail mass d=3 alpha=1.2, mixture",
                                 tail_mass(mix, 3, 1.2), quadrature_tail_mass(mix, 3, 1.2), tol));
    out.push_back(relative_check("moments", "tilt integral pareto(1,5) ball(1) d=2",
                                 tilt_integral(p5, Window::ball(1.0), 2, 1.0),
                                 quadrature_tilt(p5, Window::ball(1.0), 2, 1.0), tol));
    out.push_back(relative_check("moments", "tilt integral uniform box(3) d=3",
                                 tilt_integral(uni, Window::box(3.0), 3, 0.7),
                                 quadrature_tilt(uni, Window::box(3.0), 3, 0.7), tol));
    const bool diverges = !moment(p45, 4.5).is_finite() && !moment(p45, 6.0).is_finite();
    out.push_back(make_check("moments", "pareto(1,4.5) E R^s infinite for s >= 4.5", diverges,
                             diverges ? "infinite" : "finite value returned"));
    return out;
}

std::vector<Check> a_statistic_suite(std::size_t replicates, unsigned threads) {
    std::vector<Check> out;
    const ModelParams params(2, 0.5, RadiusDistribution::pareto(1.0, 5.0));
    const double thresholds[] = {1.0, 2.0, 4.0};
    for (const auto& e : a_statistic_survival(params, thresholds, replicates, 0x3c6ef372ULL, threads)) {
        const double p = static_cast<double>(e.exceed) / static_cast<double>(e.trials);
        const double z = e.std_error > 0 ? (p - e.expected) / e.std_error : 0.0;
        std::ostringstream os;
        os << "empirical " << format_double(p) << ", closed form " << format_double(e.expected)
           << ", z " << format_double(z);
        out.push_back(make_check("astat", "P(A > " + format_double(e.a) + "), pareto(1,5) lambda=0.5",
                                 std::abs(z) <= 3.0, os.str()));
    }
    const ModelParams unit(2, 0.5, RadiusDistribution::constant(1.0));
    const double two[] = {2.0};
    const auto e = a_statistic_survival(unit, two, 2000, 0x3c6ef372ULL, threads).front();
    out.push_back(make_check("astat", "P(A > 2), constant(1)", e.exceed == 0 && e.expected == 0.0,
                             "empirical " + std::to_string(e.exceed) + "/" +
                                 std::to_string(e.trials) + ", closed form " +
                                 format_double(e.expected)));
    return out;
}

std::vector<Check> run_suite(std::string_view name, unsigned threads) {
    std::vector<Check> out;
    auto append = [&out](std::vector<Check> v) {
        out.insert(out.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
    };
    const bool all = name == "all";
    bool known = all;
    if (all || name == "graph") append(graph_suite()), known = true;
    if (all || name == "chain") append(chain_suite()), known = true;
    if (all || name == "moments") append(moment_suite()), known = true;
    if (all || name == "astat") append(a_statistic_suite(20000, threads)), known = true;
    if (!known) throw std::invalid_argument("unknown oracle suite '" + std::string(name) + "'");
    return out;
}

}  // namespace boolmodel::oracle
