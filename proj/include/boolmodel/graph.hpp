#pragma once

// Intersection graph of open balls: uniform-grid broad phase, exact strict
// overlap test, union-find components.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "boolmodel/sampler.hpp"

namespace boolmodel {

struct GridOptions {
    /// Lower bound on the automatic cell size (max(2 * median radius, floor)).
    double cell_floor = 1e-6;
    /// Balls with radius > cell * oversize_factor skip the grid and are
    /// tested against every other ball.
    double oversize_factor = 64.0;
    /// Overrides the automatic cell size.
    std::optional<double> cell_size;
};

struct IntersectionGraph {
    std::size_t n = 0;
    /// Sorted neighbor lists.
    std::vector<std::vector<std::uint32_t>> adjacency;
    /// Labels number components in order of their smallest ball index.
    std::vector<std::uint32_t> component_label;
    /// Ball indices of each component, ascending.
    std::vector<std::vector<std::size_t>> components;

    std::size_t component_count() const noexcept { return components.size(); }
    std::size_t edge_count() const;
};

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n);
    std::size_t find(std::size_t x);
    bool unite(std::size_t a, std::size_t b);

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
};

/// B(c_i, r_i) and B(c_j, r_j) intersect: |c_i - c_j| < r_i + r_j.
bool balls_overlap(const Balls& balls, std::size_t i, std::size_t j);

IntersectionGraph build_graph(const Balls& balls, const GridOptions& opts = {});

/// Connectivity only: two balls get the same value iff they lie in the same
/// component of build_graph(balls, opts). No edge lists are stored.
std::vector<std::uint32_t> component_roots(const Balls& balls, const GridOptions& opts = {});

/// Fills component_label/components from adjacency.
void label_components(IntersectionGraph& g);

/// Balls of the component containing the origin; empty when no ball covers
/// the origin.
std::vector<std::size_t> component_of_origin(const IntersectionGraph& g, const Balls& balls);

/// Balls touching B(0, rho): |c_i| < r_i + rho.
std::vector<std::size_t> start_set(const Balls& balls, double rho = 1.0);

/// Balls meeting the sphere S(rho): ||c_i| - rho| < r_i.
std::vector<std::size_t> sphere_touch_set(const Balls& balls, double rho);

/// Union of the components containing any of `seeds`, ascending.
std::vector<std::size_t> components_containing(const IntersectionGraph& g,
                                               const std::vector<std::size_t>& seeds);

}  // namespace boolmodel
