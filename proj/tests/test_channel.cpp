#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cast/channel.hpp"
#include "cast/decoder.hpp"
#include "cast/encoder.hpp"

using namespace cast;

TEST_CASE("sample_channel: unit average power") {
    Rng rng = make_stream(11, 0, 0);
    double s = 0;
    const int draws = 1000000;
    const auto ch = sample_channel(draws, rng);
    for (const cd& h : ch.h) s += std::norm(h);
    CHECK(std::abs(s / draws - 1.0) < 0.01);
}

TEST_CASE("sample_channel: max-gain CDF matches the closed form") {
    Rng rng = make_stream(12, 0, 0);
    const int trials = 40000;
    int below = 0;
    for (int t = 0; t < trials; ++t) {
        const auto ch = sample_channel(64, rng);
        double mx = 0;
        for (const cd& h : ch.h) mx = std::max(mx, std::abs(h));
        below += mx <= 2.0;
    }
    const double expected = std::pow(1.0 - std::exp(-4.0), 64);
    CHECK(std::abs(static_cast<double>(below) / trials - expected) < 0.01);
}

TEST_CASE("sample_channel: same stream, same vector") {
    Rng a = make_stream(5, 6, 7), b = make_stream(5, 6, 7), c = make_stream(5, 6, 8);
    const auto x = sample_channel(128, a), y = sample_channel(128, b), z = sample_channel(128, c);
    CHECK(x.h == y.h);
    CHECK(x.h != z.h);
}

TEST_CASE("transmit: single tone without noise") {
    const auto d = make_dims(64, 16);
    Rng rng = make_stream(1, 0, 0);
    const auto ch = sample_channel(64, rng);
    const auto g = build_grant_vector({9}, {cd{1, 0}}, 64);
    const auto y = transmit(g, ch, NoiseSpec{0.0}, d, rng);
    const CVec a = idft_column(d, 9);
    for (int l = 0; l < 16; ++l) CHECK(std::abs(y[static_cast<std::size_t>(l)] - ch.h[8] * a[static_cast<std::size_t>(l)]) < 1e-15);
}

TEST_CASE("transmit: sparse path equals the dense transform-and-truncate pipeline") {
    const int n = 1024, m = 128;
    const auto d = make_dims(n, m);
    Rng rng = make_stream(2, 0, 0);
    const auto ch = sample_channel(n, rng);
    SupportSet support;
    CVec sym;
    for (int i = 0; i < 16; ++i) {
        support.push_back(3 + 61 * i);
        sym.push_back(std::polar(1.0 + 0.1 * i, 0.3 * i));
    }
    const auto g = build_grant_vector(support, sym, n);
    const auto y = transmit(g, ch, NoiseSpec{0.0}, d, rng);

    // Dense frequency vector x = diag(h) s, full inverse transform, first m rows.
    CVec x(static_cast<std::size_t>(n), cd{0, 0});
    for (std::size_t i = 0; i < support.size(); ++i)
        x[static_cast<std::size_t>(support[i] - 1)] = ch.h[static_cast<std::size_t>(support[i] - 1)] * g.values[i];
    double worst = 0;
    for (int l = 0; l < m; ++l) {
        cd acc{0, 0};
        for (int w = 0; w < n; ++w)
            acc += x[static_cast<std::size_t>(w)] * std::polar(1.0, 2 * std::numbers::pi * w * l / n);
        acc /= std::sqrt(static_cast<double>(m));
        worst = std::max(worst, std::abs(acc - y[static_cast<std::size_t>(l)]));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("transmit: noise power accounting") {
    const auto d = make_dims(64, 16);
    Rng rng = make_stream(3, 0, 0);
    const auto ch = sample_channel(64, rng);
    const auto g = build_grant_vector({1, 17}, {cd{2, 0}, cd{0, -1}}, 64);
    const auto clean = transmit(g, ch, NoiseSpec{0.0}, d, rng);
    const double var = 0.7;
    double acc = 0;
    const int trials = 100000;
    for (int t = 0; t < trials; ++t) {
        const auto y = transmit(g, ch, NoiseSpec{var}, d, rng);
        for (int l = 0; l < 16; ++l) acc += std::norm(y[static_cast<std::size_t>(l)] - clean[static_cast<std::size_t>(l)]);
    }
    CHECK(std::abs(acc / (16.0 * trials) / var - 1.0) < 0.02);
}

TEST_CASE("transmit: received signal energy for orthogonal supports") {
    const int n = 256, m = 64, k = 4;
    const auto d = make_dims(n, m);
    const double beta = 3.0;
    Rng rng = make_stream(4, 0, 0);
    double acc = 0;
    const int trials = 20000;
    for (int t = 0; t < trials; ++t) {
        const auto ch = sample_channel(n, rng);
        const auto omega = select_support(ch, k, d);
        const auto g = build_grant_vector(omega, map_bits_to_symbols(Bits(2 * k, 0), Modulation::qpsk, beta), n);
        const auto y = transmit(g, ch, NoiseSpec{0.0}, d, rng);
        double e = 0, ref = 0;
        for (const cd& v : y) e += std::norm(v);
        for (int w : omega) ref += beta * beta * std::norm(ch.h[static_cast<std::size_t>(w - 1)]);
        acc += e / ref;
    }
    CHECK(std::abs(acc / trials - 1.0) < 0.02);
}

TEST_CASE("transmit: dimension mismatch") {
    const auto d = make_dims(64, 16);
    Rng rng = make_stream(1, 0, 0);
    const auto ch = sample_channel(32, rng);
    CHECK_THROWS_AS(transmit(build_grant_vector({1}, {cd{1, 0}}, 64), ch, NoiseSpec{0}, d, rng), DomainError);
}

TEST_CASE("degrade_estimate") {
    Rng rng = make_stream(6, 0, 0);
    const auto ch = sample_channel(100000, rng);
    SUBCASE("zero variance is the perfect estimate") {
        const auto e = degrade_estimate(ch, 0.0, rng);
        CHECK(*e.estimate == ch.h);
    }
    SUBCASE("error power") {
        const auto e = degrade_estimate(ch, 0.25, rng);
        double s = 0;
        for (std::size_t i = 0; i < ch.h.size(); ++i) s += std::norm((*e.estimate)[i] - ch.h[i]);
        CHECK(std::abs(s / 100000.0 / 0.25 - 1.0) < 0.02);
        CHECK(e.h == ch.h);
    }
}

TEST_CASE("degrade_estimate changes the selected support with positive probability") {
    const auto d = make_dims(256, 64);
    Rng rng = make_stream(7, 0, 0);
    int differ = 0;
    for (int t = 0; t < 500; ++t) {
        const auto ch = sample_channel(256, rng);
        const auto est = degrade_estimate(ch, 0.1, rng);
        differ += select_support(ch.h, 4, d) != select_support(est, 4, d);
    }
    CHECK(differ > 0);
}

TEST_CASE("reciprocity_perturb: supports on both link ends") {
    const auto d = make_dims(256, 64);
    const int k = 4;
    auto miss_rate = [&](double var) {
        Rng rng = make_stream(8, static_cast<std::uint64_t>(var * 1e6), 0);
        int miss = 0;
        const int trials = 2000;
        for (int t = 0; t < trials; ++t) {
            const auto ch = sample_channel(256, rng);
            const auto bs = reciprocity_perturb(ch, var, rng);
            miss += !tau_close_match(select_support(bs, k, d), select_support(ch, k, d), 2, 256);
        }
        return static_cast<double>(miss) / trials;
    };
    Rng rng = make_stream(9, 0, 0);
    const auto ch = sample_channel(256, rng);
    CHECK(select_support(reciprocity_perturb(ch, 0.0, rng), k, d) == select_support(ch, k, d));
    const double small = miss_rate(0.001), mid = miss_rate(0.05), large = miss_rate(0.5);
    CHECK(small <= mid);
    CHECK(mid < large);
}
