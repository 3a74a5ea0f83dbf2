#pragma once

// Exact simulation of the marked Poisson process of (center, radius) pairs
// restricted to a finite window.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "boolmodel/model.hpp"
#include "boolmodel/rng.hpp"

namespace boolmodel {

/// Flat storage of balls in R^d.
struct Balls {
    int dim = 2;
    std::vector<double> centers;  // dim * size()
    std::vector<double> radii;

    Balls() = default;
    explicit Balls(int d) : dim(d) {}

    std::size_t size() const noexcept { return radii.size(); }
    bool empty() const noexcept { return radii.empty(); }
    std::span<const double> center(std::size_t i) const {
        return {centers.data() + i * dim, static_cast<std::size_t>(dim)};
    }
    double radius(std::size_t i) const { return radii[i]; }
    double center_norm(std::size_t i) const;

    void push_back(std::span<const double> c, double r);
    Balls subset(std::span<const std::size_t> indices) const;
};

enum class SampleMode { CentersIn, Touching };

struct BallSample {
    ModelParams params;
    Window window;
    SampleMode mode;
    Balls balls;
    /// Thinning level of each ball, uniform on [0, lambda at creation). A ball
    /// survives thinning to lambda' iff level < lambda'.
    std::vector<double> levels;
    SeedPath seed_path;

    std::size_t size() const noexcept { return balls.size(); }
};

BallSample sample_centers_in(const ModelParams& params, const Window& w, const SeedPath& seed);

BallSample sample_touching(const ModelParams& params, const Window& w, const SeedPath& seed);

/// Adds the balls touching `larger` but not `sample.window`. The first
/// sample.size() balls of the result are exactly those of `sample`.
/// Throws std::invalid_argument unless sample is a Touching sample and
/// `larger` contains its window.
BallSample extend_touching(const BallSample& sample, const Window& larger, std::uint64_t seed);

/// Independent retention with probability lambda'/lambda, nested across
/// lambda'. Throws std::invalid_argument unless 0 < lambda' <= lambda.
BallSample thin(const BallSample& sample, double lambda_prime);

/// Line format: a header `d lambda mode shape size`, then one
/// `c_1 ... c_d r` line per ball.
void write_sample_text(std::ostream& out, const BallSample& sample);

struct SampleText {
    int dim;
    double lambda;
    SampleMode mode;
    Window window;
    Balls balls;
};
SampleText read_sample_text(std::istream& in);

std::string to_string(SampleMode m);

}  // namespace boolmodel
