#include "boolmodel/sampler.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "boolmodel/text.hpp"

namespace boolmodel {

double Balls::center_norm(std::size_t i) const {
    double sq = 0.0;
    for (double x : center(i)) sq += x * x;
    return std::sqrt(sq);
}

void Balls::push_back(std::span<const double> c, double r) {
    if (static_cast<int>(c.size()) != dim) throw std::invalid_argument("center dimension mismatch");
    centers.insert(centers.end(), c.begin(), c.end());
    radii.push_back(r);
}

Balls Balls::subset(std::span<const std::size_t> indices) const {
    Balls out(dim);
    out.centers.reserve(indices.size() * dim);
    out.radii.reserve(indices.size());
    for (auto i : indices) out.push_back(center(i), radius(i));
    return out;
}

std::string to_string(SampleMode m) {
    return m == SampleMode::CentersIn ? "centers_in" : "touching";
}

namespace {

constexpr std::uint64_t kCountStream = 0;
constexpr std::uint64_t kBallStreams = 1;

void uniform_in_ball(Stream& s, double radius, std::span<double> out) {
    const int d = static_cast<int>(out.size());
    if (d <= 3) {
        for (;;) {
            double sq = 0.0;
            for (auto& x : out) {
                x = 2.0 * s.uniform() - 1.0;
                sq += x * x;
            }
            if (sq < 1.0) break;
        }
        for (auto& x : out) x *= radius;
        return;
    }
    double sq = 0.0;
    for (auto& x : out) {
        x = normal(s);
        sq += x * x;
    }
    const double scale = radius * std::pow(s.uniform(), 1.0 / d) / std::sqrt(sq);
    for (auto& x : out) x *= scale;
}

void uniform_in_window(Stream& s, const Window& w, std::span<double> out) {
    if (w.shape() == Window::Shape::Ball) {
        uniform_in_ball(s, w.size(), out);
        return;
    }
    for (auto& x : out) x = (s.uniform() - 0.5) * w.size();
}

/// Uniform on W + B(0, r).
void uniform_in_dilation(Stream& s, const Window& w, double r, std::span<double> out) {
    if (w.shape() == Window::Shape::Ball) {
        uniform_in_ball(s, w.size() + r, out);
        return;
    }
    const double h = 0.5 * w.size() + r;
    for (;;) {
        for (auto& x : out) x = (2.0 * s.uniform() - 1.0) * h;
        if (w.touched_by(out, r)) return;
    }
}

}  // namespace

BallSample sample_centers_in(const ModelParams& params, const Window& w, const SeedPath& seed) {
    const int d = params.dimension();
    BallSample out{params, w, SampleMode::CentersIn, Balls(d), {}, seed};
    const Stream base(seed);
    Stream count_stream = base.substream(kCountStream);
    const auto n = poisson(count_stream, params.lambda() * w.volume(d));
    const Stream balls = base.substream(kBallStreams);
    std::vector<double> c(d);
    for (std::int64_t i = 0; i < n; ++i) {
        Stream s = balls.substream(static_cast<std::uint64_t>(i));
        uniform_in_window(s, w, c);
        const double r = sample_radius(params.radius(), s);
        out.balls.push_back(c, r);
        out.levels.push_back(params.lambda() * s.uniform());
    }
    return out;
}

BallSample sample_touching(const ModelParams& params, const Window& w, const SeedPath& seed) {
    const int d = params.dimension();
    BallSample out{params, w, SampleMode::Touching, Balls(d), {}, seed};
    const TiltedRadiusSampler tilted(params.radius(), w, d);
    const Stream base(seed);
    Stream count_stream = base.substream(kCountStream);
    const auto n = poisson(count_stream, params.lambda() * tilted.total_mass());
    const Stream balls = base.substream(kBallStreams);
    std::vector<double> c(d);
    for (std::int64_t i = 0; i < n; ++i) {
        Stream s = balls.substream(static_cast<std::uint64_t>(i));
        const double r = tilted(s);
        uniform_in_dilation(s, w, r, c);
        out.balls.push_back(c, r);
        out.levels.push_back(params.lambda() * s.uniform());
    }
    return out;
}

BallSample extend_touching(const BallSample& sample, const Window& larger, std::uint64_t seed) {
    if (sample.mode != SampleMode::Touching)
        throw std::invalid_argument("extend_touching requires a touching-mode sample");
    if (!larger.contains(sample.window))
        throw std::invalid_argument("extend_touching: windows are not nested");
    if (larger == sample.window) return sample;

    const auto& params = sample.params;
    const int d = params.dimension();
    BallSample out = sample;
    out.window = larger;
    out.seed_path.push_back(seed);

    const TiltedRadiusSampler tilted(params.radius(), larger, d);
    const double delta = params.lambda() * tilted.total_mass() -
                         tilt_integral(params.radius(), sample.window, d, params.lambda());
    const Stream base(out.seed_path);
    Stream count_stream = base.substream(kCountStream);
    const auto n = poisson(count_stream, delta);
    const Stream balls = base.substream(kBallStreams);
    std::vector<double> c(d);
    for (std::int64_t i = 0; i < n; ++i) {
        Stream s = balls.substream(static_cast<std::uint64_t>(i));
        double r;
        do {
            r = tilted(s);
            uniform_in_dilation(s, larger, r, c);
        } while (sample.window.touched_by(c, r));
        out.balls.push_back(c, r);
        out.levels.push_back(params.lambda() * s.uniform());
    }
    return out;
}

BallSample thin(const BallSample& sample, double lambda_prime) {
    if (!(lambda_prime > 0.0) || lambda_prime > sample.params.lambda())
        throw std::invalid_argument("thin requires 0 < lambda' <= lambda");
    BallSample out{sample.params.with_lambda(lambda_prime), sample.window, sample.mode,
                   Balls(sample.balls.dim), {}, sample.seed_path};
    for (std::size_t i = 0; i < sample.size(); ++i) {
        if (sample.levels[i] < lambda_prime) {
            out.balls.push_back(sample.balls.center(i), sample.balls.radius(i));
            out.levels.push_back(sample.levels[i]);
        }
    }
    return out;
}

void write_sample_text(std::ostream& out, const BallSample& sample) {
    out << sample.params.dimension() << ' ' << format_double(sample.params.lambda()) << ' '
        << to_string(sample.mode) << ' ' << sample.window.describe() << '\n';
    for (std::size_t i = 0; i < sample.size(); ++i) {
        for (double x : sample.balls.center(i)) out << format_double(x) << ' ';
        out << format_double(sample.balls.radius(i)) << '\n';
    }
}

SampleText read_sample_text(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("sample text: missing header");
    std::istringstream head(line);
    int d = 0;
    std::string lambda_s, mode_s, shape_s, size_s;
    if (!(head >> d >> lambda_s >> mode_s >> shape_s >> size_s) || d < 1)
        throw std::runtime_error("sample text: malformed header");
    SampleMode mode;
    if (mode_s == "centers_in")
        mode = SampleMode::CentersIn;
    else if (mode_s == "touching")
        mode = SampleMode::Touching;
    else
        throw std::runtime_error("sample text: unknown mode " + mode_s);
    const double size = parse_double(size_s);
    Window w = shape_s == "box"    ? Window::box(size)
               : shape_s == "ball" ? Window::ball(size)
                                   : throw std::runtime_error("sample text: unknown window");
    SampleText t{d, parse_double(lambda_s), mode, w, Balls(d)};
    std::vector<double> c(d);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        for (auto& x : c) {
            std::string tok;
            if (!(row >> tok)) throw std::runtime_error("sample text: short ball line");
            x = parse_double(tok);
        }
        std::string tok;
        if (!(row >> tok)) throw std::runtime_error("sample text: missing radius");
        t.balls.push_back(c, parse_double(tok));
    }
    return t;
}

}  // namespace boolmodel
