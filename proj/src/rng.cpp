#include "boolmodel/rng.hpp"

#include <random>

namespace boolmodel {

std::int64_t poisson(Stream& s, double mean) {
    if (!(mean > 0.0)) return 0;
    std::poisson_distribution<std::int64_t> dist(mean);
    return dist(s);
}

double normal(Stream& s) {
    std::normal_distribution<double> dist(0.0, 1.0);
    return dist(s);
}

}  // namespace boolmodel
