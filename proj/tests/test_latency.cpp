#include <doctest.h>

#include <cmath>
#include <limits>

#include "cast/latency.hpp"
#include "cast/spectrum.hpp"

using namespace cast;

namespace {

const std::string k91 = "DSUDDDDDDD";
const std::string k82 = "DSUUDDDDDD";

}  // namespace

TEST_CASE("make_frame") {
    const auto f = make_frame(k91);
    CHECK(f.sample_rate_hz() == 15.36e6);
    CHECK(f.symbol_ms() == doctest::Approx(0.0667).epsilon(1e-3));
    CHECK_THROWS_AS(make_frame("DSDDDDDDDD"), DomainError);
    CHECK_THROWS_AS(make_frame("DSU"), DomainError);
    CHECK_THROWS_AS(make_frame("DSUXDDDDDD"), DomainError);
}

TEST_CASE("dl_ul_ratio") {
    CHECK(dl_ul_ratio(k91) == "9:1");
    CHECK(dl_ul_ratio(k82) == "8:2");
}

TEST_CASE("assemble: additivity and sign") {
    const auto b = assemble(0.1, 0.2, 0.3, 0.4);
    CHECK(b.t_up == doctest::Approx(1.0));
    CHECK_THROWS_AS(assemble(-0.1, 0, 0, 0), DomainError);
}

TEST_CASE("wait_to_uplink: timeline walk") {
    const auto f = make_frame(k91);
    CHECK(wait_to_uplink(f, 2.0) == 0.0);
    CHECK(wait_to_uplink(f, 2.5) == 0.0);
    CHECK(wait_to_uplink(f, 1.25) == doctest::Approx(0.75));
    CHECK(wait_to_uplink(f, 0.0) == doctest::Approx(2.0));
    CHECK(wait_to_uplink(f, 3.0) == doctest::Approx(9.0));
    CHECK(wait_to_uplink(f, 12.0) == 0.0);
    // Exhaustive walk against a direct scan of the next U start.
    for (int step = 0; step < 400; ++step) {
        const double t = step * 0.05;
        double next = std::ceil(t - 1e-12);
        while (k91[static_cast<std::size_t>(static_cast<long>(next) % 10)] != 'U') next += 1;
        const bool in_u = k91[static_cast<std::size_t>(static_cast<long>(std::floor(t + 1e-12)) % 10)] == 'U';
        CHECK(wait_to_uplink(f, t) == doctest::Approx(in_u ? 0.0 : next - t));
    }
}

TEST_CASE("cast_access_latency: buffering") {
    const auto f = make_frame(k91);
    const auto full = cast_access_latency(1024, f, 0.0, 0.0);
    CHECK(full.t_buff == doctest::Approx(f.symbol_ms()).epsilon(1e-12));
    CHECK(cast_access_latency(128, f, 0.0, 0.0).t_buff == doctest::Approx(f.symbol_ms() / 8).epsilon(1e-12));
    CHECK(full.t_wait == 0.0);
    CHECK_THROWS_AS(cast_access_latency(2048, f, 0.0, 0.0), DomainError);
}

TEST_CASE("minislot_access_latency") {
    const auto f = make_frame(k91);
    CHECK(minislot_access_latency(f, 0.5, 0.0, 2).t_up < minislot_access_latency(f, 0.5, 0.0, 7).t_up);
    CHECK_THROWS_AS(minislot_access_latency(f, 0.5, 0.0, 3), DomainError);
}

TEST_CASE("expected_latency_with_retry") {
    const auto b = assemble(0.0, 0.1, 0.5, 0.0);
    CHECK(expected_latency_with_retry(1.0, b, 0.6) == doctest::Approx(0.6));
    CHECK(expected_latency_with_retry(0.5, b, 0.6) == doctest::Approx(1.2));
    CHECK(std::isinf(expected_latency_with_retry(0.0, b, 0.6)));
    CHECK_THROWS_AS(expected_latency_with_retry(1.5, b, 0.6), DomainError);
}

TEST_CASE("latency table with the frozen calibration") {
    const LatencyCalibration cal;
    const auto rows = latency_table({k91, k82}, cal, cal.table_m);
    REQUIRE(rows.size() == 2);
    const double lte[] = {5.56, 3.82}, ms[] = {1.19, 1.16}, cast[] = {0.71, 0.68};
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(std::abs(rows[i].lte_ms - lte[i]) <= 0.05);
        CHECK(std::abs(rows[i].minislot_ms - ms[i]) <= 0.05);
        CHECK(std::abs(rows[i].cast_ms - cast[i]) <= 0.05);
        CHECK(rows[i].cast_ms < rows[i].minislot_ms);
        CHECK(rows[i].minislot_ms < rows[i].lte_ms);
    }
    CHECK(rows[0].ratio == "9:1");
}

TEST_CASE("calibrate_table1 reproduces the frozen constants") {
    const auto rep = calibrate_table1(CalibrationTargets{});
    const LatencyCalibration frozen;
    CHECK(rep.max_abs_error_ms <= 0.05);
    CHECK(rep.cal.arrival_phase_sf == frozen.arrival_phase_sf);
    CHECK(rep.cal.lte_grant_offset_ms == doctest::Approx(frozen.lte_grant_offset_ms));
    CHECK(rep.cal.minislot_t_dec_ms == doctest::Approx(frozen.minislot_t_dec_ms).epsilon(1e-12));
    CHECK(rep.cal.cast_t_dec_fixed_ms == doctest::Approx(frozen.cast_t_dec_fixed_ms).epsilon(1e-12));
    CHECK(rep.cal.cast_t_dec_per_sample_ms == doctest::Approx(frozen.cast_t_dec_per_sample_ms).epsilon(1e-12));
    // Buffering-ratio anchor.
    const auto f = make_frame(k91);
    CHECK(cast_latency(256, f, rep.cal).t_up / cast_latency(1024, f, rep.cal).t_up == doctest::Approx(0.65).epsilon(1e-12));
}

TEST_CASE("varying m only changes the CAST column") {
    const LatencyCalibration cal;
    const auto a = latency_table({k91}, cal, 128).front();
    const auto b = latency_table({k91}, cal, 512).front();
    CHECK(a.lte_ms == b.lte_ms);
    CHECK(a.minislot_ms == b.minislot_ms);
    CHECK(a.cast_ms < b.cast_ms);
}
