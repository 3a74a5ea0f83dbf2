#pragma once

#include <cstddef>
#include <span>

namespace boolmodel::stats {

/// sqrt(p (1 - p) / n) for the empirical proportion hits / n.
double binomial_stderr(std::size_t hits, std::size_t n);

/// Upper quantile of the standard normal: z with P(Z > z) = level.
double normal_upper_quantile(double level);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares y ~ intercept + slope x. Needs >= 2 points.
LineFit least_squares(std::span<const double> x, std::span<const double> y);

struct TrendTest {
    double z = 0.0;
    double p_value = 1.0;
    /// One-sided rejection of "no trend" in favor of a decreasing trend.
    bool decreasing = false;
    /// All groups had proportion 0 or all 1; the statistic is undefined.
    bool degenerate = false;
};

/// Cochran-Armitage test for a decreasing trend of binomial proportions
/// hits[i] / trials[i] against scores[i].
TrendTest cochran_armitage_decreasing(std::span<const double> scores,
                                      std::span<const std::size_t> hits,
                                      std::span<const std::size_t> trials, double level);

}  // namespace boolmodel::stats
