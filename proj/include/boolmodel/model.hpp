#pragma once

// Radius laws, their analytic functionals, simulation windows and model
// parameters of the Poisson Boolean model on R^d.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "boolmodel/rng.hpp"

namespace boolmodel {

/// Finite value or +infinity. Divergent moments are never encoded as a
/// floating overflow.
class ExtendedReal {
public:
    static ExtendedReal finite(double v) { return ExtendedReal(true, v); }
    static ExtendedReal infinite() { return ExtendedReal(false, 0.0); }

    bool is_finite() const noexcept { return finite_; }
    /// Throws std::domain_error when infinite.
    double value() const;

    ExtendedReal& operator+=(const ExtendedReal& o);
    friend ExtendedReal operator*(double w, const ExtendedReal& x);

private:
    ExtendedReal(bool f, double v) : finite_(f), value_(v) {}
    bool finite_;
    double value_;
};

struct ConstantLaw {
    double r0;
};
struct UniformLaw {
    double a;
    double b;
};
/// P(R > t) = (xm / t)^exponent for t >= xm.
struct ParetoLaw {
    double xm;
    double exponent;
};
using BaseLaw = std::variant<ConstantLaw, UniformLaw, ParetoLaw>;

/// The radius law nu. Stored as a finite mixture of base laws; a plain law
/// is a one-part mixture. Nested mixtures are flattened on construction.
class RadiusDistribution {
public:
    struct Part {
        double weight;
        BaseLaw law;
    };

    static RadiusDistribution constant(double r0);
    static RadiusDistribution uniform(double a, double b);
    static RadiusDistribution pareto(double xm, double exponent);
    static RadiusDistribution mixture(
        const std::vector<std::pair<double, RadiusDistribution>>& parts);

    std::span<const Part> parts() const noexcept { return parts_; }
    bool is_mixture() const noexcept { return mixture_; }

    std::string describe() const;

private:
    RadiusDistribution() = default;
    std::vector<Part> parts_;
    bool mixture_ = false;
};

/// E(R^s), s >= 0.
ExtendedReal moment(const RadiusDistribution& dist, double s);

/// epsilon(alpha) = integral of r^d over [alpha, +inf) against nu.
/// Throws std::domain_error when E(R^d) is infinite.
double tail_mass(const RadiusDistribution& dist, int d, double alpha);

double sample_radius(const RadiusDistribution& dist, Stream& s);

/// Draw from the size-biased law r^k nu(dr) / E(R^k). Requires E(R^k) finite.
double sample_size_biased(const RadiusDistribution& dist, int k, Stream& s);

/// Volume of the unit ball in R^d.
double unit_ball_volume(int d);

class Window {
public:
    enum class Shape { Box, Ball };

    /// Axis-aligned cube of the given side, centered at the origin.
    static Window box(double side);
    /// Ball of radius rho centered at the origin.
    static Window ball(double rho);

    Shape shape() const noexcept { return shape_; }
    /// Side for Box, radius for Ball.
    double size() const noexcept { return size_; }

    double volume(int d) const;
    /// Euclidean distance from a point to the (closed) window; 0 inside.
    double distance(std::span<const double> p) const;
    /// True iff the open ball B(c, r) meets the window.
    bool touched_by(std::span<const double> c, double r) const { return distance(c) < r; }
    /// True iff the open ball B(c, r) lies inside the closed window.
    bool contains_ball(std::span<const double> c, double r) const;
    /// Same shape family and at least as large.
    bool contains(const Window& inner) const;

    /// Half-width of the axis-aligned bounding box.
    double half_extent() const { return shape_ == Shape::Box ? 0.5 * size_ : size_; }

    std::string describe() const;

    bool operator==(const Window&) const = default;

private:
    Window(Shape s, double v) : shape_(s), size_(v) {}
    Shape shape_;
    double size_;
};

/// Coefficients a_k with |W + B(0,r)| = sum_k a_k r^k, k = 0..d.
/// Box windows are supported for d in {2, 3} only.
std::vector<double> steiner_coefficients(const Window& w, int d);

double steiner_volume(const Window& w, double r, int d);

/// lambda * integral of |W + B(0,r)| nu(dr): expected number of balls
/// touching W.
double tilt_integral(const RadiusDistribution& dist, const Window& w, int d, double lambda);

class ModelParams {
public:
    /// Throws std::invalid_argument on d < 2, lambda <= 0 or E(R^d) = +inf
    /// (in which case the union covers R^d almost surely).
    ModelParams(int d, double lambda, RadiusDistribution radius);

    int dimension() const noexcept { return d_; }
    double lambda() const noexcept { return lambda_; }
    const RadiusDistribution& radius() const noexcept { return radius_; }
    /// E(R^{2d}) finite.
    bool theorem3_applicable() const noexcept { return theorem3_applicable_; }

    ModelParams with_lambda(double lambda) const { return ModelParams(d_, lambda, radius_); }

private:
    int d_;
    double lambda_;
    RadiusDistribution radius_;
    bool theorem3_applicable_;
};

/// Exact sampler of the radius law tilted by |W + B(0,r)|: picks a Steiner
/// term k with probability proportional to a_k E(R^k), then draws from the
/// size-biased law of order k.
class TiltedRadiusSampler {
public:
    TiltedRadiusSampler(const RadiusDistribution& dist, const Window& w, int d);

    double operator()(Stream& s) const;
    /// Integral of |W + B(0,r)| nu(dr).
    double total_mass() const noexcept { return total_; }

private:
    struct Term {
        int k;
        std::size_t part;
        double cumulative;
    };
    std::vector<Term> terms_;
    std::vector<RadiusDistribution::Part> parts_;
    double total_ = 0.0;
};

}  // namespace boolmodel
