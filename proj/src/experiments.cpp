#include "boolmodel/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "boolmodel/parallel.hpp"
#include "boolmodel/text.hpp"

namespace boolmodel {

namespace {

constexpr std::uint64_t kEllTailTag = 1;
constexpr std::uint64_t kCrossingTag = 2;
constexpr std::uint64_t kMomentTag = 3;
constexpr std::uint64_t kBracketTag = 4;
constexpr std::uint64_t kPiAlphaTag = 5;

void require_increasing(std::span<const double> grid, const char* what) {
    if (grid.empty()) throw std::invalid_argument(std::string(what) + " must not be empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0)) throw std::invalid_argument(std::string(what) + " must be positive");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw std::invalid_argument(std::string(what) + " must be strictly increasing");
    }
}

void require_replicates(std::size_t n) {
    if (n < 1) throw std::invalid_argument("replicates must be >= 1");
}

}  // namespace

TailFit fit_tail(std::span<const int> ells, std::size_t min_count) {
    TailFit fit;
    fit.eligible = ells.size();
    fit.replicates = ells.size();
    int max_ell = 0;
    for (int e : ells) max_ell = std::max(max_ell, e);
    std::vector<std::size_t> at_least(static_cast<std::size_t>(max_ell) + 2, 0);
    for (int e : ells) ++at_least[static_cast<std::size_t>(e)];
    for (int n = max_ell - 1; n >= 0; --n) at_least[n] += at_least[n + 1];

    const std::size_t total = ells.size();
    std::vector<double> xs, ys;
    for (int n = 1; n <= max_ell; ++n) {
        SurvivalBin bin;
        bin.n = n;
        bin.count = at_least[n];
        bin.estimate = total ? static_cast<double>(bin.count) / static_cast<double>(total) : 0.0;
        bin.std_error = stats::binomial_stderr(bin.count, total);
        fit.survival.push_back(bin);
        if (bin.count >= min_count && bin.count > 0) {
            xs.push_back(n);
            ys.push_back(std::log(bin.estimate));
        }
    }
    if (xs.size() >= 3) {
        const auto line = stats::least_squares(xs, ys);
        fit.fitted = true;
        fit.rate_b = -line.slope;
        fit.intercept_log_a = line.intercept;
        fit.r_squared = line.r_squared;
        fit.fit_min = static_cast<int>(xs.front());
        fit.fit_max = static_cast<int>(xs.back());
    }
    return fit;
}

TailFit ell_tail(const EllTailConfig& cfg, const RunOptions& run) {
    require_replicates(cfg.replicates);
    std::vector<ComponentReport> reports(cfg.replicates);
    parallel_for(cfg.replicates, run.threads, [&](std::size_t i) {
        reports[i] = component_report(cfg.params, {cfg.master_seed, kEllTailTag, i}, cfg.policy);
    });
    std::vector<int> ells;
    ells.reserve(reports.size());
    std::size_t inexact = 0, censored = 0;
    for (const auto& r : reports) {
        if (r.boundary_censored) {
            ++censored;
            continue;
        }
        if (!r.ell_exact) {
            ++inexact;
            continue;
        }
        ells.push_back(r.ell);
    }
    TailFit fit = fit_tail(ells, cfg.min_count);
    fit.replicates = cfg.replicates;
    fit.excluded_censored = censored;
    fit.excluded_inexact = inexact;
    return fit;
}

std::vector<bool> coupled_crossings(const BallSample& sample, double r,
                                    std::span<const double> lambdas) {
    std::vector<bool> out;
    out.reserve(lambdas.size());
    for (double lam : lambdas) {
        if (lam == sample.params.lambda())
            out.push_back(crossing_indicator(sample.balls, r));
        else
            out.push_back(crossing_indicator(thin(sample, lam).balls, r));
    }
    return out;
}

stats::TrendTest crossing_trend(std::span<const CrossingRow> rows, double level) {
    std::vector<double> scores;
    std::vector<std::size_t> hits, trials;
    for (const auto& row : rows) {
        scores.push_back(std::log(row.r));
        hits.push_back(row.hits);
        trials.push_back(row.trials);
    }
    return stats::cochran_armitage_decreasing(scores, hits, trials, level);
}

CrossingTable crossing_decay(const CrossingConfig& cfg, const RunOptions& run) {
    require_replicates(cfg.replicates);
    require_increasing(cfg.r_grid, "r grid");
    std::vector<double> lambdas = cfg.lambda_grid;
    if (lambdas.empty()) lambdas.push_back(cfg.params.lambda());
    require_increasing(lambdas, "lambda grid");
    if (lambdas.back() > cfg.params.lambda())
        throw std::invalid_argument("lambda grid exceeds the sampled intensity");

    const std::size_t nr = cfg.r_grid.size();
    const std::size_t nl = lambdas.size();
    // hits[(j * reps + i) * nl + l]
    std::vector<char> hits(nr * cfg.replicates * nl, 0);
    parallel_for(nr * cfg.replicates, run.threads, [&](std::size_t task) {
        const std::size_t j = task / cfg.replicates;
        const std::size_t i = task % cfg.replicates;
        const auto sample = sample_touching(cfg.params, crossing_window(cfg.r_grid[j], cfg.kappa),
                                           {cfg.master_seed, kCrossingTag, j, i});
        const auto flags = coupled_crossings(sample, cfg.r_grid[j], lambdas);
        for (std::size_t l = 0; l < nl; ++l) hits[task * nl + l] = flags[l] ? 1 : 0;
    });

    CrossingTable table;
    for (std::size_t l = 0; l < nl; ++l) {
        const std::size_t first = table.rows.size();
        for (std::size_t j = 0; j < nr; ++j) {
            CrossingRow row;
            row.lambda = lambdas[l];
            row.r = cfg.r_grid[j];
            row.trials = cfg.replicates;
            for (std::size_t i = 0; i < cfg.replicates; ++i)
                row.hits += static_cast<std::size_t>(hits[(j * cfg.replicates + i) * nl + l]);
            row.estimate = static_cast<double>(row.hits) / static_cast<double>(row.trials);
            row.std_error = stats::binomial_stderr(row.hits, row.trials);
            table.rows.push_back(row);
        }
        if (nr >= 2)
            table.trends.push_back(
                {lambdas[l],
                 crossing_trend(std::span(table.rows).subspan(first, nr), cfg.level)});
    }
    return table;
}

MomentSweepResult summarize_moments(std::span<const ComponentReport> reports, std::size_t groups,
                                    std::size_t batches, double s, int d, double div_factor) {
    if (groups < 1 || batches < 1) throw std::invalid_argument("groups and batches must be >= 1");
    if (reports.size() % groups != 0)
        throw std::invalid_argument("reports must split evenly into groups");
    if (!(s > 0.0)) throw std::invalid_argument("moment exponent s must be positive");
    const std::size_t per_group = reports.size() / groups;
    const double ds = s / d;

    MomentSweepResult out;
    out.reports = reports.size();
    const char* names[3] = {"volume", "count", "diameter"};
    for (int q = 0; q < 3; ++q) out.diagnostics[q].quantity = names[q];

    auto values = [&](const ComponentReport& r) {
        return std::array<double, 3>{std::pow(r.volume_estimate, ds),
                                     std::pow(static_cast<double>(r.ball_count), ds),
                                     std::pow(r.diameter, s)};
    };
    auto ratio = [](double first, double second) {
        if (first == 0.0) return second == 0.0 ? 1.0 : HUGE_VAL;
        return second / first;
    };

    std::array<double, 3> pooled_first{}, pooled_second{};
    for (std::size_t g = 0; g < groups; ++g) {
        const auto block = reports.subspan(g * per_group, per_group);
        std::array<double, 3> sum{}, first{}, second{};
        const std::size_t half = per_group / 2;
        std::size_t next_batch = 1;
        for (std::size_t i = 0; i < block.size(); ++i) {
            const auto v = values(block[i]);
            if (block[i].boundary_censored) ++out.censored;
            for (int q = 0; q < 3; ++q) {
                sum[q] += v[q];
                (i < half ? first : second)[q] += v[q];
            }
            while (next_batch <= batches && i + 1 == (per_group * next_batch) / batches) {
                const double n = static_cast<double>(i + 1);
                out.rows.push_back({g, next_batch, i + 1, sum[0] / n, sum[1] / n, sum[2] / n});
                ++next_batch;
            }
        }
        for (int q = 0; q < 3; ++q) {
            const double m1 = half ? first[q] / static_cast<double>(half) : 0.0;
            const double m2 = per_group > half ? second[q] / static_cast<double>(per_group - half)
                                               : 0.0;
            const double r = ratio(m1, m2);
            out.diagnostics[q].ratios.push_back(r);
            if (r > div_factor) ++out.diagnostics[q].groups_flagged;
            pooled_first[q] += first[q];
            pooled_second[q] += second[q];
        }
    }
    for (int q = 0; q < 3; ++q) {
        auto& diag = out.diagnostics[q];
        diag.non_convergent = 2 * diag.groups_flagged > groups;
        diag.pooled_ratio = ratio(pooled_first[q], pooled_second[q]);
    }
    return out;
}

MomentSweepResult moment_sweep(const MomentSweepConfig& cfg, const RunOptions& run) {
    require_replicates(cfg.replicates);
    if (cfg.groups < 1) throw std::invalid_argument("groups must be >= 1");
    const std::size_t total = cfg.groups * cfg.replicates;
    std::vector<ComponentReport> reports(total);
    parallel_for(total, run.threads, [&](std::size_t task) {
        const std::size_t g = task / cfg.replicates;
        const std::size_t i = task % cfg.replicates;
        reports[task] = component_report(cfg.params, {cfg.master_seed, kMomentTag, g, i}, cfg.policy);
    });
    return summarize_moments(reports, cfg.groups, cfg.batches, cfg.s, cfg.params.dimension(),
                             cfg.div_factor);
}

ProbeDecision decay_probe(const BracketConfig& cfg, double lambda, std::uint64_t probe_index,
                          const RunOptions& run) {
    require_increasing(cfg.r_grid, "r grid");
    require_replicates(cfg.replicates);
    const ModelParams params(cfg.dimension, lambda, cfg.radius);
    const std::size_t nr = cfg.r_grid.size();
    std::vector<char> hits(nr * cfg.replicates, 0);
    parallel_for(hits.size(), run.threads, [&](std::size_t task) {
        const std::size_t j = task / cfg.replicates;
        const std::size_t i = task % cfg.replicates;
        hits[task] = sample_crossing(params, cfg.r_grid[j],
                                     {cfg.master_seed, kBracketTag, probe_index, j, i}, cfg.kappa)
                         ? 1
                         : 0;
    });
    std::vector<CrossingRow> rows(nr);
    for (std::size_t j = 0; j < nr; ++j) {
        rows[j].lambda = lambda;
        rows[j].r = cfg.r_grid[j];
        rows[j].trials = cfg.replicates;
        for (std::size_t i = 0; i < cfg.replicates; ++i)
            rows[j].hits += static_cast<std::size_t>(hits[j * cfg.replicates + i]);
        rows[j].estimate = static_cast<double>(rows[j].hits) / static_cast<double>(cfg.replicates);
    }
    ProbeDecision p;
    p.lambda = lambda;
    p.estimate_at_rmax = rows.back().estimate;
    bool all_zero = true;
    for (const auto& r : rows) all_zero = all_zero && r.hits == 0;
    if (nr >= 2) {
        const auto trend = crossing_trend(rows, cfg.level);
        p.trend_z = trend.z;
        p.trend_decreasing = trend.decreasing || all_zero;
    } else {
        p.trend_decreasing = true;
    }
    p.decaying = p.estimate_at_rmax < cfg.eps_cross && p.trend_decreasing;
    return p;
}

ThresholdBracket bracket_lambda_hat(const BracketConfig& cfg, const RunOptions& run) {
    if (!(cfg.lambda_low > 0.0) || !(cfg.lambda_low < cfg.lambda_high))
        throw std::invalid_argument("bracket needs 0 < lambda_low < lambda_high");
    if (cfg.iters < 0) throw std::invalid_argument("iters must be >= 0");
    ThresholdBracket out;
    out.lambda_low = cfg.lambda_low;
    out.lambda_high = cfg.lambda_high;
    std::uint64_t probe = 0;
    const auto low = decay_probe(cfg, cfg.lambda_low, probe++, run);
    out.trace.push_back(low);
    if (!low.decaying)
        throw std::invalid_argument(
            "invalid bracket: crossing estimates at lambda_low do not decay (estimate at r_max " +
            format_double(low.estimate_at_rmax) + ", trend z " + format_double(low.trend_z) + ")");
    const auto high = decay_probe(cfg, cfg.lambda_high, probe++, run);
    out.trace.push_back(high);
    if (high.decaying)
        throw std::invalid_argument(
            "invalid bracket: crossing estimates at lambda_high already decay (estimate at r_max " +
            format_double(high.estimate_at_rmax) + ")");
    for (int it = 0; it < cfg.iters; ++it) {
        const double mid = 0.5 * (out.lambda_low + out.lambda_high);
        const auto p = decay_probe(cfg, mid, probe++, run);
        out.trace.push_back(p);
        (p.decaying ? out.lambda_low : out.lambda_high) = mid;
    }
    return out;
}

ThresholdBracket replay_bracket(double lambda_low, double lambda_high,
                                std::span<const bool> decisions) {
    ThresholdBracket out;
    out.lambda_low = lambda_low;
    out.lambda_high = lambda_high;
    for (bool decaying : decisions) {
        const double mid = 0.5 * (out.lambda_low + out.lambda_high);
        ProbeDecision p;
        p.lambda = mid;
        p.decaying = decaying;
        out.trace.push_back(p);
        (decaying ? out.lambda_low : out.lambda_high) = mid;
    }
    return out;
}

std::vector<PiAlphaRow> pi_alpha_curve(const PiAlphaConfig& cfg, const RunOptions& run) {
    require_replicates(cfg.replicates);
    require_increasing(cfg.alphas, "alpha grid");
    const std::size_t na = cfg.alphas.size();
    std::vector<char> hits(na * cfg.replicates, 0);
    parallel_for(hits.size(), run.threads, [&](std::size_t task) {
        const std::size_t j = task / cfg.replicates;
        const std::size_t i = task % cfg.replicates;
        hits[task] =
            pi_alpha_indicator(cfg.params, cfg.alphas[j], {cfg.master_seed, kPiAlphaTag, j, i}) ? 1
                                                                                              : 0;
    });
    std::vector<PiAlphaRow> rows(na);
    for (std::size_t j = 0; j < na; ++j) {
        rows[j].alpha = cfg.alphas[j];
        rows[j].trials = cfg.replicates;
        for (std::size_t i = 0; i < cfg.replicates; ++i)
            rows[j].hits += static_cast<std::size_t>(hits[j * cfg.replicates + i]);
        rows[j].estimate = static_cast<double>(rows[j].hits) / static_cast<double>(cfg.replicates);
        rows[j].std_error = stats::binomial_stderr(rows[j].hits, rows[j].trials);
    }
    return rows;
}

void write_survival_csv(std::ostream& out, const TailFit& fit) {
    CsvWriter csv(out, {"n", "count", "estimate", "stderr"});
    for (const auto& b : fit.survival) {
        csv.cell(b.n).cell(b.count).cell(b.estimate).cell(b.std_error);
        csv.end_row();
    }
}

void write_tail_fit_csv(std::ostream& out, const TailFit& fit) {
    CsvWriter csv(out, {"replicates", "eligible", "excluded_inexact", "excluded_censored",
                        "fitted", "rate_b", "intercept_log_a", "r_squared", "fit_n_min",
                        "fit_n_max"});
    csv.cell(fit.replicates).cell(fit.eligible).cell(fit.excluded_inexact)
        .cell(fit.excluded_censored).cell(fit.fitted).cell(fit.rate_b)
        .cell(fit.intercept_log_a).cell(fit.r_squared).cell(fit.fit_min).cell(fit.fit_max);
    csv.end_row();
}

void write_crossing_csv(std::ostream& out, const CrossingTable& table) {
    CsvWriter csv(out, {"lambda", "r", "hits", "trials", "estimate", "stderr"});
    for (const auto& row : table.rows) {
        csv.cell(row.lambda).cell(row.r).cell(row.hits).cell(row.trials).cell(row.estimate)
            .cell(row.std_error);
        csv.end_row();
    }
}

void write_crossing_trend_csv(std::ostream& out, const CrossingTable& table) {
    CsvWriter csv(out, {"lambda", "z", "p_value", "decreasing", "degenerate"});
    for (const auto& t : table.trends) {
        csv.cell(t.lambda).cell(t.test.z).cell(t.test.p_value).cell(t.test.decreasing)
            .cell(t.test.degenerate);
        csv.end_row();
    }
}

void write_moment_csv(std::ostream& out, const MomentSweepResult& result) {
    CsvWriter csv(out, {"group", "batch", "n", "mean_volume_pow", "mean_count_pow",
                        "mean_diameter_pow"});
    for (const auto& row : result.rows) {
        csv.cell(row.group).cell(row.batch).cell(row.n).cell(row.volume_pow).cell(row.count_pow)
            .cell(row.diameter_pow);
        csv.end_row();
    }
}

void write_moment_diagnostics_csv(std::ostream& out, const MomentSweepResult& result) {
    CsvWriter csv(out, {"quantity", "groups", "groups_flagged", "non_convergent", "pooled_ratio",
                        "censored", "reports"});
    for (const auto& d : result.diagnostics) {
        csv.cell(std::string_view(d.quantity)).cell(d.ratios.size()).cell(d.groups_flagged)
            .cell(d.non_convergent).cell(d.pooled_ratio).cell(result.censored)
            .cell(result.reports);
        csv.end_row();
    }
}

void write_bracket_csv(std::ostream& out, const ThresholdBracket& bracket) {
    CsvWriter csv(out, {"probe", "lambda", "estimate_at_rmax", "trend_z", "trend_decreasing",
                        "decaying", "bracket_low", "bracket_high"});
    for (std::size_t i = 0; i < bracket.trace.size(); ++i) {
        const auto& p = bracket.trace[i];
        csv.cell(i).cell(p.lambda).cell(p.estimate_at_rmax).cell(p.trend_z)
            .cell(p.trend_decreasing).cell(p.decaying).cell(bracket.lambda_low)
            .cell(bracket.lambda_high);
        csv.end_row();
    }
}

void write_pi_alpha_csv(std::ostream& out, std::span<const PiAlphaRow> rows) {
    CsvWriter csv(out, {"alpha", "hits", "trials", "estimate", "stderr"});
    for (const auto& row : rows) {
        csv.cell(row.alpha).cell(row.hits).cell(row.trials).cell(row.estimate)
            .cell(row.std_error);
        csv.end_row();
    }
}

}  // namespace boolmodel
