#include "boolmodel/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "boolmodel/text.hpp"

namespace boolmodel {

double ExtendedReal::value() const {
    if (!finite_) throw std::domain_error("value() of an infinite quantity");
    return value_;
}

ExtendedReal& ExtendedReal::operator+=(const ExtendedReal& o) {
    if (!finite_ || !o.finite_) {
        finite_ = false;
        value_ = 0.0;
    } else {
        value_ += o.value_;
    }
    return *this;
}

ExtendedReal operator*(double w, const ExtendedReal& x) {
    if (!x.finite_) return x;
    return ExtendedReal::finite(w * x.value_);
}

namespace {

void require_length(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument(std::string(what) + " must be a positive finite length");
}

ExtendedReal base_moment(const BaseLaw& law, double s) {
    return std::visit(
        [s](const auto& l) -> ExtendedReal {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, ConstantLaw>) {
                return ExtendedReal::finite(std::pow(l.r0, s));
            } else if constexpr (std::is_same_v<T, UniformLaw>) {
                const double p = s + 1.0;
                return ExtendedReal::finite((std::pow(l.b, p) - std::pow(l.a, p)) /
                                            (p * (l.b - l.a)));
            } else {
                if (s >= l.exponent) return ExtendedReal::infinite();
                return ExtendedReal::finite(l.exponent * std::pow(l.xm, s) / (l.exponent - s));
            }
        },
        law);
}

double base_tail_mass(const BaseLaw& law, int d, double alpha) {
    return std::visit(
        [d, alpha](const auto& l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, ConstantLaw>) {
                return l.r0 >= alpha ? std::pow(l.r0, d) : 0.0;
            } else if constexpr (std::is_same_v<T, UniformLaw>) {
                if (alpha >= l.b) return 0.0;
                const double t = std::max(alpha, l.a);
                return (std::pow(l.b, d + 1) - std::pow(t, d + 1)) / ((d + 1) * (l.b - l.a));
            } else {
                const double t = std::max(alpha, l.xm);
                const double a = l.exponent;
                return a * std::pow(l.xm, a) * std::pow(t, d - a) / (a - d);
            }
        },
        law);
}

double base_sample(const BaseLaw& law, int k, Stream& s) {
    return std::visit(
        [k, &s](const auto& l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, ConstantLaw>) {
                return l.r0;
            } else if constexpr (std::is_same_v<T, UniformLaw>) {
                const double u = s.uniform();
                if (k == 0) return l.a + u * (l.b - l.a);
                const double p = k + 1.0;
                const double lo = std::pow(l.a, p);
                const double hi = std::pow(l.b, p);
                return std::pow(lo + u * (hi - lo), 1.0 / p);
            } else {
                // r^k nu(dr) is again Pareto with exponent reduced by k.
                const double a = l.exponent - k;
                return l.xm * std::pow(s.uniform_pos(), -1.0 / a);
            }
        },
        law);
}

std::size_t pick_part(std::span<const RadiusDistribution::Part> parts,
                      std::span<const double> weights, Stream& s) {
    if (parts.size() == 1) return 0;
    double total = 0.0;
    for (double w : weights) total += w;
    double u = s.uniform() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (u < weights[i]) return i;
        u -= weights[i];
    }
    return weights.size() - 1;
}

double binomial(int n, int k) {
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

}  // namespace

RadiusDistribution RadiusDistribution::constant(double r0) {
    require_length(r0, "constant radius");
    RadiusDistribution d;
    d.parts_.push_back({1.0, ConstantLaw{r0}});
    return d;
}

RadiusDistribution RadiusDistribution::uniform(double a, double b) {
    require_length(a, "uniform lower bound");
    require_length(b, "uniform upper bound");
    if (!(a < b)) throw std::invalid_argument("uniform radius law requires a < b");
    RadiusDistribution d;
    d.parts_.push_back({1.0, UniformLaw{a, b}});
    return d;
}

RadiusDistribution RadiusDistribution::pareto(double xm, double exponent) {
    require_length(xm, "pareto scale");
    if (!(exponent > 0.0) || !std::isfinite(exponent))
        throw std::invalid_argument("pareto exponent must be positive");
    RadiusDistribution d;
    d.parts_.push_back({1.0, ParetoLaw{xm, exponent}});
    return d;
}

RadiusDistribution RadiusDistribution::mixture(
    const std::vector<std::pair<double, RadiusDistribution>>& parts) {
    if (parts.empty()) throw std::invalid_argument("mixture needs at least one component");
    RadiusDistribution d;
    d.mixture_ = true;
    double sum = 0.0;
    for (const auto& [w, sub] : parts) {
        if (!(w > 0.0)) throw std::invalid_argument("mixture weights must be positive");
        sum += w;
        for (const auto& p : sub.parts_) d.parts_.push_back({w * p.weight, p.law});
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("mixture weights must sum to 1");
    return d;
}

std::string RadiusDistribution::describe() const {
    std::ostringstream os;
    auto one = [&os](const BaseLaw& law) {
        std::visit(
            [&os](const auto& l) {
                using T = std::decay_t<decltype(l)>;
                if constexpr (std::is_same_v<T, ConstantLaw>)
                    os << "constant(" << format_double(l.r0) << ")";
                else if constexpr (std::is_same_v<T, UniformLaw>)
                    os << "uniform(" << format_double(l.a) << "," << format_double(l.b) << ")";
                else
                    os << "pareto(" << format_double(l.xm) << "," << format_double(l.exponent)
                       << ")";
            },
            law);
    };
    if (!mixture_) {
        one(parts_.front().law);
        return os.str();
    }
    os << "mixture(";
    for (std::size_t i = 0; i < parts_.size(); ++i) {
        if (i) os << ";";
        os << format_double(parts_[i].weight) << ":";
        one(parts_[i].law);
    }
    os << ")";
    return os.str();
}

ExtendedReal moment(const RadiusDistribution& dist, double s) {
    if (!(s >= 0.0)) throw std::invalid_argument("moment order must be >= 0");
    ExtendedReal total = ExtendedReal::finite(0.0);
    for (const auto& p : dist.parts()) total += p.weight * base_moment(p.law, s);
    return total;
}

double tail_mass(const RadiusDistribution& dist, int d, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("tail_mass requires alpha > 0");
    if (!moment(dist, d).is_finite())
        throw std::domain_error("tail_mass undefined: E(R^d) is infinite");
    double total = 0.0;
    for (const auto& p : dist.parts()) total += p.weight * base_tail_mass(p.law, d, alpha);
    return total;
}

double sample_radius(const RadiusDistribution& dist, Stream& s) {
    return sample_size_biased(dist, 0, s);
}

double sample_size_biased(const RadiusDistribution& dist, int k, Stream& s) {
    const auto parts = dist.parts();
    if (parts.size() == 1) return base_sample(parts.front().law, k, s);
    std::vector<double> weights;
    weights.reserve(parts.size());
    for (const auto& p : parts) weights.push_back(p.weight * base_moment(p.law, k).value());
    return base_sample(parts[pick_part(parts, weights, s)].law, k, s);
}

double unit_ball_volume(int d) {
    return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

Window Window::box(double side) {
    require_length(side, "box side");
    return Window(Shape::Box, side);
}

Window Window::ball(double rho) {
    require_length(rho, "ball window radius");
    return Window(Shape::Ball, rho);
}

double Window::volume(int d) const {
    if (shape_ == Shape::Box) return std::pow(size_, d);
    return unit_ball_volume(d) * std::pow(size_, d);
}

double Window::distance(std::span<const double> p) const {
    double sq = 0.0;
    if (shape_ == Shape::Box) {
        const double h = 0.5 * size_;
        for (double x : p) {
            const double e = std::abs(x) - h;
            if (e > 0.0) sq += e * e;
        }
        return std::sqrt(sq);
    }
    for (double x : p) sq += x * x;
    return std::max(0.0, std::sqrt(sq) - size_);
}

bool Window::contains_ball(std::span<const double> c, double r) const {
    if (shape_ == Shape::Box) {
        const double h = 0.5 * size_;
        for (double x : c)
            if (std::abs(x) + r > h) return false;
        return true;
    }
    double sq = 0.0;
    for (double x : c) sq += x * x;
    return std::sqrt(sq) + r <= size_;
}

bool Window::contains(const Window& inner) const {
    return shape_ == inner.shape_ && size_ >= inner.size_;
}

std::string Window::describe() const {
    return std::string(shape_ == Shape::Box ? "box " : "ball ") + format_double(size_);
}

std::vector<double> steiner_coefficients(const Window& w, int d) {
    if (d < 1) throw std::invalid_argument("dimension must be positive");
    const double pi = std::numbers::pi;
    if (w.shape() == Window::Shape::Ball) {
        const double vd = unit_ball_volume(d);
        std::vector<double> a(d + 1);
        for (int k = 0; k <= d; ++k) a[k] = vd * binomial(d, k) * std::pow(w.size(), d - k);
        return a;
    }
    const double L = w.size();
    if (d == 2) return {L * L, 4.0 * L, pi};
    if (d == 3) return {L * L * L, 6.0 * L * L, 3.0 * pi * L, 4.0 * pi / 3.0};
    throw std::invalid_argument("box windows are supported for d = 2 and d = 3 only");
}

double steiner_volume(const Window& w, double r, int d) {
    if (!(r >= 0.0)) throw std::invalid_argument("dilation radius must be >= 0");
    const auto a = steiner_coefficients(w, d);
    double v = 0.0;
    for (int k = d; k >= 0; --k) v = v * r + a[k];
    return v;
}

double tilt_integral(const RadiusDistribution& dist, const Window& w, int d, double lambda) {
    const auto a = steiner_coefficients(w, d);
    double total = 0.0;
    for (int k = 0; k <= d; ++k) {
        const ExtendedReal m = moment(dist, k);
        if (!m.is_finite())
            throw std::domain_error("tilt_integral: E(R^" + std::to_string(k) + ") is infinite");
        total += a[k] * m.value();
    }
    return lambda * total;
}

ModelParams::ModelParams(int d, double lambda, RadiusDistribution radius)
    : d_(d), lambda_(lambda), radius_(std::move(radius)) {
    if (d < 2) throw std::invalid_argument("dimension must be >= 2");
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("intensity lambda must be positive and finite");
    if (!moment(radius_, d).is_finite())
        throw std::invalid_argument("E(R^" + std::to_string(d) + ") is infinite for " +
                                    radius_.describe() +
                                    ": the Boolean model covers R^d almost surely");
    theorem3_applicable_ = moment(radius_, 2.0 * d).is_finite();
}

TiltedRadiusSampler::TiltedRadiusSampler(const RadiusDistribution& dist, const Window& w,
                                         int d) {
    const auto a = steiner_coefficients(w, d);
    const auto parts = dist.parts();
    parts_.assign(parts.begin(), parts.end());
    for (int k = 0; k <= d; ++k) {
        for (std::size_t j = 0; j < parts_.size(); ++j) {
            const ExtendedReal m = base_moment(parts_[j].law, k);
            if (!m.is_finite())
                throw std::domain_error("tilted radius law needs E(R^" + std::to_string(k) +
                                        ") finite");
            const double mass = a[k] * parts_[j].weight * m.value();
            if (mass <= 0.0) continue;
            total_ += mass;
            terms_.push_back({k, j, total_});
        }
    }
}

double TiltedRadiusSampler::operator()(Stream& s) const {
    const double u = s.uniform() * total_;
    auto it = std::upper_bound(terms_.begin(), terms_.end(), u,
                               [](double v, const Term& t) { return v < t.cumulative; });
    if (it == terms_.end()) --it;
    return base_sample(parts_[it->part].law, it->k, s);
}

}  // namespace boolmodel
