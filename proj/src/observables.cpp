#include "boolmodel/observables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace boolmodel {

namespace {

constexpr std::uint64_t kGrowthSeed = 0;
constexpr std::uint64_t kVolumeSeed = 1;

}  // namespace

VolumeEstimate union_volume(const Balls& balls, std::size_t n_samples, const SeedPath& seed) {
    if (n_samples < 1) throw std::invalid_argument("union_volume needs n_samples >= 1");
    if (balls.empty()) return {};
    const int d = balls.dim;
    std::vector<double> lo(d, HUGE_VAL), hi(d, -HUGE_VAL);
    for (std::size_t i = 0; i < balls.size(); ++i) {
        const auto c = balls.center(i);
        for (int k = 0; k < d; ++k) {
            lo[k] = std::min(lo[k], c[k] - balls.radius(i));
            hi[k] = std::max(hi[k], c[k] + balls.radius(i));
        }
    }
    double box = 1.0;
    for (int k = 0; k < d; ++k) box *= hi[k] - lo[k];

    std::vector<double> r2(balls.size());
    for (std::size_t i = 0; i < balls.size(); ++i) r2[i] = balls.radius(i) * balls.radius(i);

    Stream s(seed);
    std::vector<double> x(d);
    std::size_t hits = 0;
    std::size_t last = 0;
    auto inside = [&](std::size_t i) {
        const auto c = balls.center(i);
        double sq = 0.0;
        for (int k = 0; k < d; ++k) {
            const double t = x[k] - c[k];
            sq += t * t;
        }
        return sq < r2[i];
    };
    for (std::size_t n = 0; n < n_samples; ++n) {
        for (int k = 0; k < d; ++k) x[k] = lo[k] + s.uniform() * (hi[k] - lo[k]);
        if (inside(last)) {
            ++hits;
            continue;
        }
        for (std::size_t i = 0; i < balls.size(); ++i) {
            if (i != last && inside(i)) {
                ++hits;
                last = i;
                break;
            }
        }
    }
    const double p = static_cast<double>(hits) / static_cast<double>(n_samples);
    return {box * p, box * std::sqrt(p * (1.0 - p) / static_cast<double>(n_samples)), n_samples};
}

double diameter(const Balls& balls, std::span<const std::size_t> indices) {
    double best = 0.0;
    for (std::size_t a = 0; a < indices.size(); ++a) {
        const auto ca = balls.center(indices[a]);
        const double ra = balls.radius(indices[a]);
        best = std::max(best, 2.0 * ra);
        for (std::size_t b = a + 1; b < indices.size(); ++b) {
            const auto cb = balls.center(indices[b]);
            double sq = 0.0;
            for (int k = 0; k < balls.dim; ++k) {
                const double t = ca[k] - cb[k];
                sq += t * t;
            }
            best = std::max(best, std::sqrt(sq) + ra + balls.radius(indices[b]));
        }
    }
    return best;
}

double diameter(const Balls& balls) {
    std::vector<std::size_t> all(balls.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return diameter(balls, all);
}

namespace {

class ChainSearch {
public:
    explicit ChainSearch(const IntersectionGraph& g)
        : g_(g), visited_(g.n, 0), mark_(g.n, 0), queue_(g.n) {}

    /// Longest simple path from any of `starts` within a component of
    /// `comp_size` vertices. Returns false if the work budget ran out.
    bool run(std::span<const std::size_t> starts, std::size_t comp_size, std::size_t budget,
             int& best) {
        work_ = 0;
        budget_ = budget;
        exhausted_ = false;
        comp_size_ = static_cast<int>(comp_size);
        best_ = best;
        for (auto s : starts) {
            if (best_ == comp_size_ || exhausted_) break;
            visited_[s] = 1;
            dfs(s, 1);
            visited_[s] = 0;
        }
        best = best_;
        return !exhausted_;
    }

private:
    int reach(std::size_t v) {
        ++epoch_;
        std::size_t head = 0, tail = 0;
        mark_[v] = epoch_;
        queue_[tail++] = v;
        int count = 0;
        while (head < tail) {
            const std::size_t u = queue_[head++];
            for (auto w : g_.adjacency[u]) {
                ++work_;
                if (visited_[w] || mark_[w] == epoch_) continue;
                mark_[w] = epoch_;
                queue_[tail++] = w;
                ++count;
            }
        }
        return count;
    }

    void dfs(std::size_t v, int len) {
        if (++work_ > budget_) {
            exhausted_ = true;
            return;
        }
        best_ = std::max(best_, len);
        if (best_ == comp_size_) return;
        if (len + reach(v) <= best_) return;
        for (auto u : g_.adjacency[v]) {
            if (visited_[u]) continue;
            visited_[u] = 1;
            dfs(u, len + 1);
            visited_[u] = 0;
            if (exhausted_ || best_ == comp_size_) return;
        }
    }

    const IntersectionGraph& g_;
    std::vector<char> visited_;
    std::vector<std::uint32_t> mark_;
    std::vector<std::size_t> queue_;
    std::uint32_t epoch_ = 0;
    std::size_t work_ = 0;
    std::size_t budget_ = 0;
    bool exhausted_ = false;
    int comp_size_ = 0;
    int best_ = 0;
};

// Work allowed inside components at or below the cap before giving up on
// exactness.
constexpr std::size_t kExactBudget = 50'000'000;

}  // namespace

ChainResult longest_chain(const IntersectionGraph& g, std::span<const std::size_t> start,
                          const ChainOptions& opts) {
    ChainResult out;
    if (start.empty()) return out;
    out.length = std::max(opts.known_length, 0);
    std::vector<std::pair<std::uint32_t, std::size_t>> by_label;
    for (auto s : start) by_label.emplace_back(g.component_label.at(s), s);
    std::sort(by_label.begin(), by_label.end());
    by_label.erase(std::unique(by_label.begin(), by_label.end()), by_label.end());

    ChainSearch search(g);
    std::vector<std::size_t> starts;
    for (std::size_t a = 0; a < by_label.size();) {
        const auto label = by_label[a].first;
        starts.clear();
        for (; a < by_label.size() && by_label[a].first == label; ++a)
            starts.push_back(by_label[a].second);
        const std::size_t k = g.components[label].size();
        const bool limited = k > opts.cap;
        if (static_cast<std::size_t>(out.length) >= k) continue;
        const bool finished =
            search.run(starts, k, limited ? opts.budget : kExactBudget, out.length);
        if (!finished) out.exact = false;
    }
    return out;
}

namespace {

/// Whether some ball touching S(r1) shares a component label with a ball
/// touching S(r2).
template <typename Labels>
bool spheres_connected(const Labels& label, const Balls& balls, double r1, double r2) {
    const auto inner = sphere_touch_set(balls, r1);
    if (inner.empty()) return false;
    const auto outer = sphere_touch_set(balls, r2);
    if (outer.empty()) return false;
    std::vector<std::size_t> hit;
    for (auto i : inner) hit.push_back(label[i]);
    std::sort(hit.begin(), hit.end());
    for (auto j : outer)
        if (std::binary_search(hit.begin(), hit.end(), static_cast<std::size_t>(label[j]))) return true;
    return false;
}

bool spheres_connected(const Balls& balls, double r1, double r2) {
    if (sphere_touch_set(balls, r1).empty() || sphere_touch_set(balls, r2).empty()) return false;
    return spheres_connected(component_roots(balls), balls, r1, r2);
}

}  // namespace

bool crossing_indicator(const IntersectionGraph& g, const Balls& balls, double r) {
    return spheres_connected(g.component_label, balls, r, 2.0 * r);
}

bool crossing_indicator(const Balls& balls, double r) {
    return spheres_connected(balls, r, 2.0 * r);
}

Window crossing_window(double r, double kappa) {
    if (!(r > 0.0) || !(kappa >= 1.0))
        throw std::invalid_argument("crossing window needs r > 0 and kappa >= 1");
    return Window::ball(2.0 * r * kappa);
}

bool sample_crossing(const ModelParams& params, double r, const SeedPath& seed, double kappa) {
    const auto sample = sample_touching(params, crossing_window(r, kappa), seed);
    return crossing_indicator(sample.balls, r);
}

bool pi_alpha_event(const Balls& balls, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    std::vector<std::size_t> inside;
    for (std::size_t i = 0; i < balls.size(); ++i)
        if (balls.center_norm(i) < 10.0 * alpha) inside.push_back(i);
    if (inside.empty()) return false;
    const Balls region = balls.subset(inside);
    return spheres_connected(region, alpha, 8.0 * alpha);
}

bool pi_alpha_indicator(const ModelParams& params, double alpha, const SeedPath& seed) {
    const auto sample = sample_centers_in(params, Window::ball(10.0 * alpha), seed);
    return pi_alpha_event(sample.balls, alpha);
}

double a_statistic(const Balls& balls) {
    double a = 0.0;
    for (std::size_t i = 0; i < balls.size(); ++i)
        if (balls.center_norm(i) < 0.5 * balls.radius(i)) a = std::max(a, balls.radius(i));
    return a;
}

VolumeEstimate dilated_component_volume(const Balls& balls, double r, double s,
                                        std::size_t n_samples, const SeedPath& seed) {
    if (!(r > 0.0)) throw std::invalid_argument("dilated_component_volume requires r > 0");
    if (!(s >= 0.0)) throw std::invalid_argument("dilated_component_volume requires s >= 0");
    Balls all(balls.dim);
    const std::vector<double> origin(balls.dim, 0.0);
    all.push_back(origin, r);
    for (std::size_t i = 0; i < balls.size(); ++i) all.push_back(balls.center(i), balls.radius(i));
    const auto g = build_graph(all);
    const auto& comp = g.components[g.component_label[0]];
    if (comp.size() == 1)
        return {unit_ball_volume(balls.dim) * std::pow(r + s, balls.dim), 0.0, 0};
    Balls dilated = all.subset(comp);
    for (auto& radius : dilated.radii) radius += s;
    return union_volume(dilated, n_samples, seed);
}

namespace {

std::vector<std::size_t> relevant_balls(const IntersectionGraph& g, const Balls& balls) {
    return components_containing(g, start_set(balls, 1.0));
}

bool escapes(const IntersectionGraph& g, const BallSample& sample) {
    for (auto i : relevant_balls(g, sample.balls))
        if (!sample.window.contains_ball(sample.balls.center(i), sample.balls.radius(i)))
            return true;
    return false;
}

ComponentReport report_with_graph(const BallSample& sample, const IntersectionGraph& g,
                                  const SeedPath& volume_seed, const ReportPolicy& policy) {
    ComponentReport rep;
    const auto& balls = sample.balls;
    const auto comp = component_of_origin(g, balls);
    rep.ball_count = comp.size();
    rep.diameter = diameter(balls, comp);
    if (policy.compute_volume && !comp.empty()) {
        const auto v = union_volume(balls.subset(comp), policy.volume_samples, volume_seed);
        rep.volume_estimate = v.mean;
        rep.volume_stderr = v.std_error;
    }
    const auto start = start_set(balls, 1.0);
    const auto chain = longest_chain(g, start, policy.chain);
    rep.ell = chain.length;
    rep.ell_exact = chain.exact;
    rep.a_statistic = a_statistic(balls);
    rep.window_rho = sample.window.half_extent();
    return rep;
}

}  // namespace

bool relevant_component_escapes(const IntersectionGraph& g, const BallSample& sample) {
    return escapes(g, sample);
}

ComponentReport report_on_sample(const BallSample& sample, const SeedPath& volume_seed,
                                 const ReportPolicy& policy) {
    const auto g = build_graph(sample.balls, policy.grid);
    auto rep = report_with_graph(sample, g, volume_seed, policy);
    rep.boundary_censored = escapes(g, sample);
    return rep;
}

GrownSample grow_sample(const ModelParams& params, const SeedPath& seed,
                        const ReportPolicy& policy) {
    if (!(policy.initial_rho >= 1.0))
        throw std::invalid_argument("initial window radius must be >= 1 to contain B(0,1)");
    double rho = policy.initial_rho;
    GrownSample out{sample_touching(params, Window::ball(rho), extend_path(seed, kGrowthSeed)),
                    false};
    for (int k = 0;; ++k) {
        const auto g = build_graph(out.sample.balls, policy.grid);
        if (!escapes(g, out.sample)) return out;
        if (k >= policy.max_doublings) {
            out.censored = true;
            return out;
        }
        rho *= 2.0;
        out.sample = extend_touching(out.sample, Window::ball(rho), static_cast<std::uint64_t>(k + 1));
    }
}

ComponentReport component_report(const ModelParams& params, const SeedPath& seed,
                                  const ReportPolicy& policy) {
    const auto grown = grow_sample(params, seed, policy);
    const auto g = build_graph(grown.sample.balls, policy.grid);
    auto rep = report_with_graph(grown.sample, g, extend_path(seed, kVolumeSeed), policy);
    rep.boundary_censored = grown.censored;
    return rep;
}

}  // namespace boolmodel
