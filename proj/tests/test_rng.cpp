#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <set>
#include <vector>

#include "pcsat/rng.hpp"

using namespace pcsat;

TEST_CASE("same seed gives the same stream, different seeds differ", "[rng]") {
    Rng a(123), b(123), c(124);
    bool any_diff = false;
    for (int i = 0; i < 100; ++i) {
        const auto va = a.next_u64();
        CHECK(va == b.next_u64());
        any_diff |= (va != c.next_u64());
    }
    CHECK(any_diff);
}

TEST_CASE("next_double stays in [0,1) with mean near one half", "[rng]") {
    Rng rng(7);
    double sum = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const double v = rng.next_double();
        REQUIRE(v >= 0.0);
        REQUIRE(v < 1.0);
        sum += v;
    }
    CHECK(std::abs(sum / 20000 - 0.5) < 0.01);
}

TEST_CASE("next_below is bounded and roughly uniform", "[rng]") {
    Rng rng(11);
    std::array<int, 10> buckets{};
    for (int i = 0; i < 20000; ++i) {
        const auto v = rng.next_below(10);
        REQUIRE(v < 10);
        ++buckets[v];
    }
    for (int b : buckets) CHECK(std::abs(b - 2000) < 300);
}

TEST_CASE("gaussian moments", "[rng]") {
    Rng rng(5);
    double sum = 0.0, sumsq = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double v = rng.next_gaussian();
        sum += v;
        sumsq += v * v;
    }
    const double mean = sum / n;
    CHECK(std::abs(mean) < 0.05);
    CHECK(std::abs(sumsq / n - mean * mean - 1.0) < 0.1);
}

TEST_CASE("gamma mean tracks alpha above and below one", "[rng]") {
    for (double alpha : {0.5, 2.0, 5.0}) {
        Rng rng(static_cast<std::uint64_t>(alpha * 100));
        double sum = 0.0;
        const int n = 20000;
        for (int i = 0; i < n; ++i) {
            const double v = rng.next_gamma(alpha);
            REQUIRE(v >= 0.0);
            sum += v;
        }
        CHECK(std::abs(sum / n - alpha) < 0.06 * alpha + 0.03);
    }
}

TEST_CASE("beta mean", "[rng]") {
    Rng rng(9);
    double sum = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double v = rng.next_beta(2.0, 8.0);
        REQUIRE(v >= 0.0);
        REQUIRE(v <= 1.0);
        sum += v;
    }
    CHECK(std::abs(sum / n - 0.2) < 0.01);
}

TEST_CASE("dirichlet draws are simplex points with matching means", "[rng]") {
    Rng rng(13);
    const std::vector<double> alpha{4.0, 2.0, 3.0, 8.0, 16.0};
    std::array<double, 5> mean{};
    const int n = 5000;
    for (int i = 0; i < n; ++i) {
        const auto v = rng.next_dirichlet(alpha);
        double total = 0.0;
        for (std::size_t k = 0; k < 5; ++k) {
            REQUIRE(v[k] > 0.0);
            REQUIRE(v[k] < 1.0);
            total += v[k];
            mean[k] += v[k];
        }
        REQUIRE(std::abs(total - 1.0) < 1e-12);
    }
    const double a0 = 33.0;
    for (std::size_t k = 0; k < 5; ++k) CHECK(std::abs(mean[k] / n - alpha[k] / a0) < 0.02);
}

TEST_CASE("poisson mean", "[rng]") {
    Rng rng(17);
    double sum = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const auto v = rng.next_poisson(7.0);
        REQUIRE(v >= 0);
        sum += static_cast<double>(v);
    }
    CHECK(std::abs(sum / n - 7.0) < 0.15);
}

TEST_CASE("categorical frequencies follow the weights", "[rng]") {
    Rng rng(19);
    const std::vector<double> w{1.0, 3.0, 6.0};
    std::array<int, 3> counts{};
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const auto k = rng.next_categorical(w);
        REQUIRE(k < 3);
        ++counts[k];
    }
    CHECK(std::abs(counts[0] / double(n) - 0.1) < 0.02);
    CHECK(std::abs(counts[1] / double(n) - 0.3) < 0.02);
    CHECK(std::abs(counts[2] / double(n) - 0.6) < 0.02);
}

TEST_CASE("derive_stream depends on every part and nothing else", "[rng]") {
    const auto base = derive_stream(42, 1, "fit:group", "g001");
    CHECK(base == derive_stream(42, 1, "fit:group", "g001"));
    std::set<std::uint64_t> distinct{
        base,
        derive_stream(43, 1, "fit:group", "g001"),
        derive_stream(42, 2, "fit:group", "g001"),
        derive_stream(42, 1, "fit:global", "g001"),
        derive_stream(42, 1, "fit:group", "g002"),
        derive_stream(42, 1, "fit:group"),
        derive_stream(42),
    };
    CHECK(distinct.size() == 7);
}
