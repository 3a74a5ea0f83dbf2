#pragma once

// Differential oracles: brute-force and closed-form references that share no
// code path with the implementations they check.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "boolmodel/graph.hpp"
#include "boolmodel/model.hpp"

namespace boolmodel::oracle {

struct Check {
    std::string suite;
    std::string name;
    bool passed = false;
    std::string detail;
};

using GraphBuilder = std::function<IntersectionGraph(const Balls&)>;

/// O(n^2) pairwise graph with components found by breadth-first search.
IntersectionGraph brute_force_graph(const Balls& balls);

/// Adjacency and component partition equality; `why` receives the first
/// difference.
bool same_graph(const IntersectionGraph& a, const IntersectionGraph& b, std::string* why = nullptr);

/// Longest simple path from `start` by dynamic programming over vertex
/// subsets, per component. Components must have at most 20 vertices.
int subset_dp_longest_chain(const IntersectionGraph& g, std::span<const std::size_t> start);

double quadrature_moment(const RadiusDistribution& dist, double s);
double quadrature_tail_mass(const RadiusDistribution& dist, int d, double alpha);
/// lambda * integral of steiner_volume(w, r) nu(dr) by quadrature.
double quadrature_tilt(const RadiusDistribution& dist, const Window& w, int d, double lambda);

/// P(A > a) = 1 - exp(-lambda v_d 2^{-d} tail_mass(a)).
double a_survival(const ModelParams& params, double a);

struct AStatisticEstimate {
    double a = 0.0;
    std::size_t exceed = 0;
    std::size_t trials = 0;
    double expected = 0.0;
    double std_error = 0.0;
};

/// Empirical P(A > a) from touching samples on Ball(1), one entry per
/// threshold.
std::vector<AStatisticEstimate> a_statistic_survival(const ModelParams& params,
                                                     std::span<const double> thresholds,
                                                     std::size_t replicates, std::uint64_t seed,
                                                     unsigned threads = 1);

std::vector<Check> graph_suite(std::size_t configs = 100, const GraphBuilder& builder = {});
std::vector<Check> chain_suite(std::size_t components = 500);
std::vector<Check> moment_suite();
std::vector<Check> a_statistic_suite(std::size_t replicates = 20000, unsigned threads = 1);

/// Suite names: "graph", "chain", "moments", "astat", or "all".
/// Throws std::invalid_argument for anything else.
std::vector<Check> run_suite(std::string_view name, unsigned threads = 1);

}  // namespace boolmodel::oracle
