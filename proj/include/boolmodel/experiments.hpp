#pragma once

// Replicated estimation campaigns: tail of the longest chain, crossing
// probability decay, moment sweeps, bracketing of the crossing threshold and
// the windowed crossing probability Pi(alpha).
//
// Every campaign is a pure function of its config: replicate i draws from a
// seed path derived from (master seed, experiment tag, i), results are
// stored by index and reduced in index order, so the output does not depend
// on the thread count.

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "boolmodel/model.hpp"
#include "boolmodel/observables.hpp"
#include "boolmodel/stats.hpp"

namespace boolmodel {

struct RunOptions {
    unsigned threads = 1;
};

// ---------------------------------------------------------------------------
// Tail of the longest chain

struct EllTailConfig {
    ModelParams params;
    std::size_t replicates = 10000;
    std::uint64_t master_seed = 1;
    ReportPolicy policy = [] {
        ReportPolicy p;
        p.compute_volume = false;
        return p;
    }();
    /// Bins need at least this many exceedances to enter the fit.
    std::size_t min_count = 50;
};

struct SurvivalBin {
    int n = 0;
    std::size_t count = 0;
    double estimate = 0.0;
    double std_error = 0.0;
};

struct TailFit {
    std::vector<SurvivalBin> survival;
    bool fitted = false;
    double rate_b = 0.0;
    double intercept_log_a = 0.0;
    double r_squared = 0.0;
    int fit_min = 0;
    int fit_max = 0;
    std::size_t replicates = 0;
    std::size_t eligible = 0;
    std::size_t excluded_inexact = 0;
    std::size_t excluded_censored = 0;
};

/// Empirical survival P(ell >= n), n = 1..max, and the least-squares fit of
/// log-survival against n over bins with count >= min_count. The fit is
/// refused (fitted = false) with fewer than 3 such bins.
TailFit fit_tail(std::span<const int> ells, std::size_t min_count);

/// Runs component reports, drops replicates with an inexact chain or a
/// censored window, and fits the survival of ell.
TailFit ell_tail(const EllTailConfig& cfg, const RunOptions& run = {});

// ---------------------------------------------------------------------------
// Crossing probability decay

struct CrossingConfig {
    ModelParams params;
    /// Radii, strictly increasing.
    std::vector<double> r_grid;
    /// Thinned intensities, each <= params.lambda(); empty means params.lambda() only.
    std::vector<double> lambda_grid;
    std::size_t replicates = 10000;
    std::uint64_t master_seed = 1;
    double kappa = 2.0;
    /// Level of the one-sided decreasing-trend test.
    double level = 0.01;
};

struct CrossingRow {
    double lambda = 0.0;
    double r = 0.0;
    std::size_t hits = 0;
    std::size_t trials = 0;
    double estimate = 0.0;
    double std_error = 0.0;
};

struct CrossingTrend {
    double lambda = 0.0;
    stats::TrendTest test;
};

struct CrossingTable {
    /// Ordered by lambda, then r.
    std::vector<CrossingRow> rows;
    std::vector<CrossingTrend> trends;
};

/// Crossing indicators of one sample thinned to each of `lambdas`
/// (ascending, all <= sample lambda).
std::vector<bool> coupled_crossings(const BallSample& sample, double r,
                                    std::span<const double> lambdas);

CrossingTable crossing_decay(const CrossingConfig& cfg, const RunOptions& run = {});

/// Trend test over the rows of one lambda, scored by log r.
stats::TrendTest crossing_trend(std::span<const CrossingRow> rows, double level);

// ---------------------------------------------------------------------------
// Moment sweep

struct MomentSweepConfig {
    ModelParams params;
    /// Replicates per seed group.
    std::size_t replicates = 1000;
    std::size_t groups = 10;
    std::size_t batches = 10;
    std::uint64_t master_seed = 1;
    double s = 2.0;
    double div_factor = 1.5;
    ReportPolicy policy = [] {
        ReportPolicy p;
        p.volume_samples = 2000;
        return p;
    }();
};

struct MomentRow {
    std::size_t group = 0;
    std::size_t batch = 0;
    std::size_t n = 0;
    double volume_pow = 0.0;
    double count_pow = 0.0;
    double diameter_pow = 0.0;
};

struct MomentDiagnostic {
    std::string quantity;
    /// Second-half over first-half batch mean, per group.
    std::vector<double> ratios;
    std::size_t groups_flagged = 0;
    bool non_convergent = false;
    /// Same ratio with all groups pooled.
    double pooled_ratio = 1.0;
};

struct MomentSweepResult {
    std::vector<MomentRow> rows;
    std::array<MomentDiagnostic, 3> diagnostics;
    std::size_t reports = 0;
    std::size_t censored = 0;
};

/// Running means of |C|^{s/d}, #C^{s/d}, D^s. `reports` is group-major:
/// groups consecutive blocks of equal size.
MomentSweepResult summarize_moments(std::span<const ComponentReport> reports, std::size_t groups,
                                    std::size_t batches, double s, int d, double div_factor);

MomentSweepResult moment_sweep(const MomentSweepConfig& cfg, const RunOptions& run = {});

// ---------------------------------------------------------------------------
// Bracketing of the crossing threshold

struct BracketConfig {
    RadiusDistribution radius;
    int dimension = 2;
    double lambda_low = 0.05;
    double lambda_high = 1.0;
    int iters = 6;
    std::vector<double> r_grid;
    double eps_cross = 0.05;
    double level = 0.01;
    std::size_t replicates = 2000;
    std::uint64_t master_seed = 1;
    double kappa = 2.0;
};

struct ProbeDecision {
    double lambda = 0.0;
    double estimate_at_rmax = 0.0;
    double trend_z = 0.0;
    bool trend_decreasing = false;
    bool decaying = false;
};

struct ThresholdBracket {
    double lambda_low = 0.0;
    double lambda_high = 0.0;
    /// Probes at the two initial bounds, then one per bisection.
    std::vector<ProbeDecision> trace;
};

/// Crossing estimates over the r grid at one intensity and the decision
/// "decaying": estimate at the largest r below eps_cross and a decreasing
/// trend (an all-zero table counts as decreasing).
ProbeDecision decay_probe(const BracketConfig& cfg, double lambda, std::uint64_t probe_index,
                          const RunOptions& run = {});

/// Throws std::invalid_argument when lambda_low is not decaying or
/// lambda_high is.
ThresholdBracket bracket_lambda_hat(const BracketConfig& cfg, const RunOptions& run = {});

/// Bisection replay from recorded decisions (true = decaying).
ThresholdBracket replay_bracket(double lambda_low, double lambda_high,
                                std::span<const bool> decisions);

// ---------------------------------------------------------------------------
// Pi(alpha)

struct PiAlphaConfig {
    ModelParams params;
    std::vector<double> alphas;
    std::size_t replicates = 10000;
    std::uint64_t master_seed = 1;
};

struct PiAlphaRow {
    double alpha = 0.0;
    std::size_t hits = 0;
    std::size_t trials = 0;
    double estimate = 0.0;
    double std_error = 0.0;
};

std::vector<PiAlphaRow> pi_alpha_curve(const PiAlphaConfig& cfg, const RunOptions& run = {});

// ---------------------------------------------------------------------------
// CSV output

void write_survival_csv(std::ostream& out, const TailFit& fit);
void write_tail_fit_csv(std::ostream& out, const TailFit& fit);
void write_crossing_csv(std::ostream& out, const CrossingTable& table);
void write_crossing_trend_csv(std::ostream& out, const CrossingTable& table);
void write_moment_csv(std::ostream& out, const MomentSweepResult& result);
void write_moment_diagnostics_csv(std::ostream& out, const MomentSweepResult& result);
void write_bracket_csv(std::ostream& out, const ThresholdBracket& bracket);
void write_pi_alpha_csv(std::ostream& out, std::span<const PiAlphaRow> rows);

}  // namespace boolmodel
