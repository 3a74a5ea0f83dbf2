#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <span>
#include <sstream>

#include "boolmodel/experiments.hpp"

using namespace boolmodel;
using std::numbers::pi;

namespace {

const ModelParams kDisks015(2, 0.15, RadiusDistribution::constant(1.0));

}  // namespace

TEST_CASE("fit_tail recovers an exact geometric tail") {
    // Counts N q^{n-1} of ell >= n with q = 1/2.
    std::vector<int> ells;
    const int levels = 12;
    for (int n = 1; n <= levels; ++n) {
        const int exactly = (1 << (levels - n)) - (n < levels ? (1 << (levels - n - 1)) : 0);
        for (int k = 0; k < exactly; ++k) ells.push_back(n);
    }
    const auto fit = fit_tail(ells, 1);
    REQUIRE(fit.fitted);
    CHECK(fit.rate_b == doctest::Approx(std::log(2.0)));
    CHECK(fit.r_squared == doctest::Approx(1.0));
    CHECK(fit.survival.front().estimate == 1.0);
    CHECK(fit.fit_min == 1);
    CHECK(fit.fit_max == levels);
    // min_count trims the sparse tail.
    const auto trimmed = fit_tail(ells, 50);
    CHECK(trimmed.fit_max == 6);
}

TEST_CASE("fit_tail refuses fewer than three eligible bins") {
    const std::vector<int> ells{0, 0, 1, 1, 2};
    const auto fit = fit_tail(ells, 1);
    CHECK_FALSE(fit.fitted);
    CHECK(fit.survival.size() == 2);
    CHECK(fit.survival[0].estimate == doctest::Approx(0.6));
    CHECK(fit.survival[1].estimate == doctest::Approx(0.2));
}

TEST_CASE("ell survival at n = 1 for a sparse model") {
    // At small intensity ell >= 1 iff some ball touches B(0,1).
    const ModelParams p(2, 0.01, RadiusDistribution::constant(1.0));
    EllTailConfig cfg{.params = p, .replicates = 20000, .master_seed = 3};
    const auto fit = ell_tail(cfg);
    const double want = 1.0 - std::exp(-tilt_integral(p.radius(), Window::ball(1.0), 2, 0.01));
    REQUIRE_FALSE(fit.survival.empty());
    const auto& first = fit.survival.front();
    CHECK(std::abs(first.estimate - want) <= 3 * std::sqrt(want * (1 - want) / fit.eligible));
}

TEST_CASE("ell survival is non-increasing and excludes censored rows") {
    EllTailConfig cfg{.params = kDisks015, .replicates = 3000, .master_seed = 4};
    const auto fit = ell_tail(cfg);
    for (std::size_t i = 1; i < fit.survival.size(); ++i)
        CHECK(fit.survival[i].estimate <= fit.survival[i - 1].estimate);
    CHECK(fit.eligible + fit.excluded_inexact + fit.excluded_censored == fit.replicates);
    REQUIRE(fit.fitted);
    CHECK(fit.rate_b > 0.0);
}

TEST_CASE("coupled crossings are monotone in lambda") {
    const std::vector<double> lambdas{0.1, 0.2, 0.3, 0.4};
    const ModelParams p(2, 0.4, RadiusDistribution::constant(1.0));
    for (std::uint64_t i = 0; i < 100; ++i) {
        const auto s = sample_touching(p, crossing_window(3.0), {80, i});
        const auto flags = coupled_crossings(s, 3.0, lambdas);
        for (std::size_t l = 1; l < flags.size(); ++l) CHECK(flags[l - 1] <= flags[l]);
    }
}

TEST_CASE("crossing decay in the deep subcritical regime") {
    CrossingConfig cfg{.params = ModelParams(2, 0.1, RadiusDistribution::constant(1.0)),
                       .r_grid = {1, 2, 4, 8},
                       .lambda_grid = {0.05, 0.1},
                       .replicates = 2000,
                       .master_seed = 5};
    const auto table = crossing_decay(cfg);
    REQUIRE(table.rows.size() == 8);
    REQUIRE(table.trends.size() == 2);
    CHECK(table.rows[4].estimate > 0.0);
    CHECK(table.trends[1].test.decreasing);
    // Coupled: the thinned row never beats the full row.
    for (std::size_t j = 0; j < 4; ++j) CHECK(table.rows[j].hits <= table.rows[4 + j].hits);
}

TEST_CASE("crossing estimate is zero without balls") {
    CrossingConfig cfg{.params = ModelParams(2, 1e-15, RadiusDistribution::constant(1.0)),
                       .r_grid = {10, 100},
                       .replicates = 500};
    const auto table = crossing_decay(cfg);
    for (const auto& row : table.rows) CHECK(row.estimate == 0.0);
    CHECK_THROWS_AS(crossing_decay({.params = kDisks015, .r_grid = {2, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(crossing_decay({.params = kDisks015, .r_grid = {1}, .lambda_grid = {0.3}}),
                    std::invalid_argument);
}

TEST_CASE("moment summaries of all-zero reports") {
    const std::vector<ComponentReport> zeros(40);
    const auto res = summarize_moments(zeros, 4, 5, 2.0, 2, 1.5);
    for (const auto& row : res.rows) {
        CHECK(row.volume_pow == 0.0);
        CHECK(row.count_pow == 0.0);
        CHECK(row.diameter_pow == 0.0);
    }
    for (const auto& d : res.diagnostics) {
        CHECK_FALSE(d.non_convergent);
        CHECK(d.pooled_ratio == 1.0);
    }
}

TEST_CASE("moment summaries flag a growing second half") {
    std::vector<ComponentReport> reports(40);
    for (std::size_t i = 0; i < reports.size(); ++i) {
        reports[i].ball_count = 1;
        reports[i].volume_estimate = 1.0;
        reports[i].diameter = (i % 10) < 5 ? 1.0 : 3.0;
    }
    const auto res = summarize_moments(reports, 4, 2, 2.0, 2, 1.5);
    CHECK(res.diagnostics[2].quantity == "diameter");
    CHECK(res.diagnostics[2].groups_flagged == 4);
    CHECK(res.diagnostics[2].non_convergent);
    CHECK(res.diagnostics[2].pooled_ratio == doctest::Approx(9.0));
    CHECK_FALSE(res.diagnostics[0].non_convergent);
    CHECK(res.rows.size() == 8);
    CHECK(res.rows.back().n == 10);
    CHECK(res.rows.back().diameter_pow == doctest::Approx(5.0));
}

TEST_CASE("moment sweep with bounded radii stabilizes") {
    MomentSweepConfig cfg{.params = kDisks015, .replicates = 400, .groups = 4, .batches = 4, .master_seed = 6};
    const auto res = moment_sweep(cfg);
    for (const auto& d : res.diagnostics) {
        CHECK(d.pooled_ratio > 1 / 1.5);
        CHECK(d.pooled_ratio < 1.5);
    }
    CHECK(res.reports == 1600);
}

TEST_CASE("bracket replay and rejection") {
    const bool decisions[] = {true, false, true, true, false, false};
    const auto a = replay_bracket(0.05, 1.0, decisions);
    const auto b = replay_bracket(0.05, 1.0, decisions);
    CHECK(a.lambda_low == b.lambda_low);
    CHECK(a.lambda_high == b.lambda_high);
    CHECK(a.lambda_high - a.lambda_low == doctest::Approx(0.95 / 64));
    CHECK(a.lambda_low < a.lambda_high);

    BracketConfig bad{.radius = RadiusDistribution::constant(1.0),
                      .lambda_low = 0.8,
                      .lambda_high = 1.0,
                      .iters = 2,
                      .r_grid = {2, 4},
                      .replicates = 200};
    CHECK_THROWS_AS(bracket_lambda_hat(bad), std::invalid_argument);
}

TEST_CASE("bracket of the crossing threshold for unit disks") {
    BracketConfig cfg{.radius = RadiusDistribution::constant(1.0),
                      .lambda_low = 0.05,
                      .lambda_high = 1.0,
                      .iters = 6,
                      .r_grid = {2, 4, 8},
                      .replicates = 300,
                      .master_seed = 7};
    const auto first = bracket_lambda_hat(cfg);
    CHECK(first.lambda_high - first.lambda_low <= 0.1);
    CHECK(first.trace.size() == 8);

    // Replaying the recorded decisions reproduces the bracket.
    std::vector<char> flags;
    for (std::size_t i = 2; i < first.trace.size(); ++i) flags.push_back(first.trace[i].decaying);
    const std::unique_ptr<bool[]> decisions_buf(new bool[flags.size()]);
    for (std::size_t i = 0; i < flags.size(); ++i) decisions_buf[i] = flags[i] != 0;
    const std::span<const bool> decisions(decisions_buf.get(), flags.size());
    const auto replay = replay_bracket(cfg.lambda_low, cfg.lambda_high, decisions);
    CHECK(replay.lambda_low == first.lambda_low);
    CHECK(replay.lambda_high == first.lambda_high);

    // An independent campaign with twice the replicates agrees within 0.05.
    BracketConfig other = cfg;
    other.master_seed = 8;
    other.replicates = 600;
    const auto second = bracket_lambda_hat(other);
    const double mid = 0.5 * (second.lambda_low + second.lambda_high);
    CHECK(mid >= first.lambda_low - 0.05);
    CHECK(mid <= first.lambda_high + 0.05);
}

TEST_CASE("pi alpha curve") {
    PiAlphaConfig cfg{.params = kDisks015, .alphas = {0.001, 1.0}, .replicates = 2000, .master_seed = 9};
    const auto rows = pi_alpha_curve(cfg);
    REQUIRE(rows.size() == 2);
    // Expected number of centers in B(0, 0.01) is about 5e-5.
    CHECK(rows[0].hits <= 2);
    CHECK(rows[1].trials == 2000);
}

TEST_CASE("outputs do not depend on the thread count") {
    EllTailConfig ell{.params = kDisks015, .replicates = 600, .master_seed = 10};
    CrossingConfig cross{.params = kDisks015, .r_grid = {2, 4}, .lambda_grid = {0.1, 0.15},
                         .replicates = 300, .master_seed = 10};
    MomentSweepConfig mom{.params = kDisks015, .replicates = 60, .groups = 3, .batches = 3, .master_seed = 10};
    PiAlphaConfig pa{.params = kDisks015, .alphas = {0.5, 1.0}, .replicates = 300, .master_seed = 10};
    auto render = [&](unsigned threads) {
        const RunOptions run{threads};
        std::ostringstream os;
        const auto fit = ell_tail(ell, run);
        write_survival_csv(os, fit);
        write_tail_fit_csv(os, fit);
        const auto table = crossing_decay(cross, run);
        write_crossing_csv(os, table);
        write_crossing_trend_csv(os, table);
        const auto m = moment_sweep(mom, run);
        write_moment_csv(os, m);
        write_moment_diagnostics_csv(os, m);
        write_pi_alpha_csv(os, pi_alpha_curve(pa, run));
        return os.str();
    };
    const auto one = render(1);
    CHECK(one == render(4));
    CHECK(one == render(3));
}
