#include "boolmodel/stats.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <stdexcept>

namespace boolmodel::stats {

double binomial_stderr(std::size_t hits, std::size_t n) {
    if (n == 0) return 0.0;
    const double p = static_cast<double>(hits) / static_cast<double>(n);
    return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

double normal_upper_quantile(double level) {
    return boost::math::quantile(boost::math::complement(boost::math::normal(), level));
}

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("least_squares needs >= 2 paired points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("least_squares: x values are all equal");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return f;
}

TrendTest cochran_armitage_decreasing(std::span<const double> scores,
                                      std::span<const std::size_t> hits,
                                      std::span<const std::size_t> trials, double level) {
    if (scores.size() != hits.size() || scores.size() != trials.size() || scores.size() < 2)
        throw std::invalid_argument("trend test needs >= 2 aligned groups");
    double total_hits = 0.0, total = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (hits[i] > trials[i]) throw std::invalid_argument("hits exceed trials");
        total_hits += static_cast<double>(hits[i]);
        total += static_cast<double>(trials[i]);
    }
    TrendTest out;
    if (total == 0.0) {
        out.degenerate = true;
        return out;
    }
    const double pbar = total_hits / total;
    double t = 0.0, s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const double n = static_cast<double>(trials[i]);
        t += scores[i] * (static_cast<double>(hits[i]) - n * pbar);
        s1 += n * scores[i] * scores[i];
        s2 += n * scores[i];
    }
    const double var = pbar * (1.0 - pbar) * (s1 - s2 * s2 / total);
    if (!(var > 0.0)) {
        out.degenerate = true;
        return out;
    }
    out.z = t / std::sqrt(var);
    out.p_value = boost::math::cdf(boost::math::normal(), out.z);
    out.decreasing = out.p_value < level;
    return out;
}

}  // namespace boolmodel::stats
