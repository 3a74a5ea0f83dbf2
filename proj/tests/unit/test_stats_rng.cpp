#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "boolmodel/rng.hpp"
#include "boolmodel/stats.hpp"
#include "boolmodel/text.hpp"

using namespace boolmodel;

TEST_CASE("binomial standard error") {
    CHECK(stats::binomial_stderr(0, 100) == 0.0);
    CHECK(stats::binomial_stderr(100, 100) == 0.0);
    CHECK(stats::binomial_stderr(50, 100) == doctest::Approx(0.05));
}

TEST_CASE("normal quantile") {
    CHECK(stats::normal_upper_quantile(0.025) == doctest::Approx(1.9599639845400545));
    CHECK(stats::normal_upper_quantile(1e-2) == doctest::Approx(2.3263478740408408));
}

TEST_CASE("least squares") {
    const double x[] = {1, 2, 3, 4};
    const double y[] = {3, 5, 7, 9};
    const auto fit = stats::least_squares(x, y);
    CHECK(fit.slope == doctest::Approx(2.0));
    CHECK(fit.intercept == doctest::Approx(1.0));
    CHECK(fit.r_squared == doctest::Approx(1.0));

    const double noisy[] = {3, 6, 6, 9};
    const auto f2 = stats::least_squares(x, noisy);
    // Hand computation: slope 1.8, intercept 1.5, SSE 1.8, SST 18.
    CHECK(f2.slope == doctest::Approx(1.8));
    CHECK(f2.intercept == doctest::Approx(1.5));
    CHECK(f2.r_squared == doctest::Approx(0.9));
    const double one[] = {1};
    CHECK_THROWS_AS(stats::least_squares(one, one), std::invalid_argument);
}

TEST_CASE("Cochran-Armitage decreasing trend") {
    const double scores[] = {0, 1, 2};
    const std::size_t hits[] = {30, 20, 10};
    const std::size_t trials[] = {50, 50, 50};
    const auto t = stats::cochran_armitage_decreasing(scores, hits, trials, 0.01);
    CHECK(t.z == doctest::Approx(-20.0 / std::sqrt(24.0)));
    CHECK(t.p_value == doctest::Approx(2.2278545302028032e-05).epsilon(1e-6));
    CHECK(t.decreasing);
    CHECK_FALSE(t.degenerate);

    const std::size_t rising[] = {10, 20, 30};
    const auto up = stats::cochran_armitage_decreasing(scores, rising, trials, 0.01);
    CHECK_FALSE(up.decreasing);
    CHECK(up.z > 0);

    const std::size_t zeros[] = {0, 0, 0};
    const auto z = stats::cochran_armitage_decreasing(scores, zeros, trials, 0.01);
    CHECK(z.degenerate);
    CHECK_FALSE(z.decreasing);
}

TEST_CASE("streams are counter based and splittable") {
    Stream a(42), b(42);
    for (int i = 0; i < 10; ++i) CHECK(a() == b());
    // Substreams do not depend on the parent's position.
    Stream fresh(42);
    CHECK(a.substream(3).key() == fresh.substream(3).key());
    CHECK(a.substream(3).key() != a.substream(4).key());

    std::set<std::uint64_t> keys;
    for (std::uint64_t i = 0; i < 1000; ++i) keys.insert(derive_key(SeedPath{7, i}));
    CHECK(keys.size() == 1000);
    CHECK(derive_key(SeedPath{1, 2}) != derive_key(SeedPath{2, 1}));
    CHECK(Stream(SeedPath{5, 6}).key() == derive_key(extend_path({5}, 6)));
}

TEST_CASE("uniform draws are in range with the right mean") {
    Stream s(1);
    double sum = 0.0;
    const int n = 1'000'000;
    for (int i = 0; i < n; ++i) {
        const double u = s.uniform();
        const double v = s.uniform_pos();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        REQUIRE(v > 0.0);
        REQUIRE(v <= 1.0);
        sum += u;
    }
    CHECK(std::abs(sum / n - 0.5) < 4 * std::sqrt(1.0 / 12 / n));
}

TEST_CASE("poisson variates") {
    Stream s(2);
    CHECK(poisson(s, 0.0) == 0);
    CHECK(poisson(s, -1.0) == 0);
    for (double mean : {0.3, 7.5, 2000.0}) {
        double sum = 0.0;
        const int n = 100'000;
        for (int i = 0; i < n; ++i) sum += static_cast<double>(poisson(s, mean));
        CHECK(std::abs(sum / n - mean) < 4 * std::sqrt(mean / n));
    }
}

TEST_CASE("number formatting round trips without locale") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.125, -2.5}) CHECK(parse_double(format_double(v)) == v);
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(HUGE_VAL) == "inf");
    CHECK(format_double(-HUGE_VAL) == "-inf");
    CHECK(std::isinf(parse_double("inf")));
    CHECK_THROWS_AS(parse_double("1,5"), std::invalid_argument);
    CHECK_THROWS_AS(parse_double(""), std::invalid_argument);
    CHECK_THROWS_AS(parse_double("2x"), std::invalid_argument);
}

TEST_CASE("csv writer") {
    std::ostringstream os;
    CsvWriter w(os, {"a", "b", "c"});
    w.cell(1.5).cell(std::size_t{3}).cell(true);
    w.end_row();
    w.cell("x");
    CHECK_THROWS(w.end_row());
    CHECK(os.str().rfind("a,b,c\n1.5,3,true\n", 0) == 0);
}
