#pragma once

// Per-realization observables of the Boolean model: volume, ball count and
// diameter of the origin component, longest chain from B(0,1), sphere
// crossings, the windowed crossing event G(0, alpha), the A statistic and
// the dilated component volume |C(r) + B(0,s)|.

#include <cstddef>
#include <span>
#include <vector>

#include "boolmodel/graph.hpp"
#include "boolmodel/model.hpp"
#include "boolmodel/rng.hpp"
#include "boolmodel/sampler.hpp"

namespace boolmodel {

struct VolumeEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
};

/// Hit-or-miss Monte Carlo of the volume of the union of `balls` over their
/// bounding box. Empty input gives exactly 0.
VolumeEstimate union_volume(const Balls& balls, std::size_t n_samples, const SeedPath& seed);

/// Supremum of pairwise distances in the union: max over i, j (i == j
/// allowed) of |c_i - c_j| + r_i + r_j. 0 for an empty list.
double diameter(const Balls& balls);
double diameter(const Balls& balls, std::span<const std::size_t> indices);

struct ChainResult {
    int length = 0;
    bool exact = true;
};

struct ChainOptions {
    /// Components larger than this are searched under `budget`; the result
    /// is inexact only if that budget runs out.
    std::size_t cap = 24;
    /// Work units (node expansions plus edge scans) per oversized component.
    std::size_t budget = 2'000'000;
    /// A chain length known to be achievable from `start`, e.g. from a
    /// thinned copy of the same sample. The search only looks for longer ones.
    int known_length = 0;
};

/// Maximum number of vertices on a simple path that starts at a vertex of
/// `start`. Branch and bound over simple paths, pruned by the number of
/// unvisited vertices still reachable.
ChainResult longest_chain(const IntersectionGraph& g, std::span<const std::size_t> start,
                          const ChainOptions& opts = {});

/// Some component holds a ball meeting S(r) and a ball meeting S(2r).
bool crossing_indicator(const Balls& balls, double r);
bool crossing_indicator(const IntersectionGraph& g, const Balls& balls, double r);

/// Window used to estimate the crossing probability at scale r.
Window crossing_window(double r, double kappa = 2.0);

/// Samples balls touching Ball(2 r kappa) and evaluates the crossing.
bool sample_crossing(const ModelParams& params, double r, const SeedPath& seed,
                     double kappa = 2.0);

/// A path from S(alpha) to S(8 alpha) using only balls with centers in
/// B(0, 10 alpha). `balls` may contain other balls; they are ignored.
bool pi_alpha_event(const Balls& balls, double alpha);

/// Realization of G(0, alpha) from a fresh centers-in sample on Ball(10 alpha).
bool pi_alpha_indicator(const ModelParams& params, double alpha, const SeedPath& seed);

/// Largest r_i with |c_i| < r_i / 2; 0 if none.
double a_statistic(const Balls& balls);

/// Estimates |C(r) + B(0,s)| where C(r) is the component of the union with
/// the virtual ball B(0,r). Requires r > 0 and s >= 0.
VolumeEstimate dilated_component_volume(const Balls& balls, double r, double s,
                                        std::size_t n_samples, const SeedPath& seed);

struct ReportPolicy {
    double initial_rho = 4.0;
    int max_doublings = 6;
    bool compute_volume = true;
    std::size_t volume_samples = 100000;
    ChainOptions chain;
    GridOptions grid;
};

struct ComponentReport {
    double volume_estimate = 0.0;
    double volume_stderr = 0.0;
    std::size_t ball_count = 0;
    double diameter = 0.0;
    int ell = 0;
    bool ell_exact = true;
    bool boundary_censored = false;
    double a_statistic = 0.0;
    /// Radius of the final window.
    double window_rho = 0.0;
};

/// Whether some ball of a component relevant to the report (components of
/// B(0,1)-touching balls) pokes out of the sample window.
bool relevant_component_escapes(const IntersectionGraph& g, const BallSample& sample);

/// All report fields on a fixed sample. boundary_censored is set when a
/// relevant component reaches the window boundary.
ComponentReport report_on_sample(const BallSample& sample, const SeedPath& volume_seed,
                                 const ReportPolicy& policy);

struct GrownSample {
    BallSample sample;
    bool censored = false;
};

/// Touching sample on Ball(initial_rho), doubled until no relevant component
/// reaches the boundary or max_doublings is spent.
GrownSample grow_sample(const ModelParams& params, const SeedPath& seed,
                        const ReportPolicy& policy);

ComponentReport component_report(const ModelParams& params, const SeedPath& seed,
                                  const ReportPolicy& policy = {});

}  // namespace boolmodel
