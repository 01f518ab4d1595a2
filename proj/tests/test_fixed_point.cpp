#include <doctest.h>

#include <cmath>
#include <random>

#include <gmpxx.h>

#include "cubicpulse/error.hpp"
#include "cubicpulse/fixed_point.hpp"
#include "exact_error.hpp"

using namespace cubicpulse;

namespace {

QuantizedSegment seg(std::int64_t a, std::int64_t b, std::int64_t g, std::int64_t d,
                     std::uint32_t n) {
    return {a, b, g, d, n};
}

CompressedPulse pulse_of(std::vector<QuantizedSegment> s, bool symmetric = false) {
    CompressedPulse cp;
    cp.segments = std::move(s);
    cp.symmetric = symmetric;
    return cp;
}

constexpr std::int64_t kOne = std::int64_t{1} << 20;

} // namespace

TEST_CASE("bowler coefficients") {
    auto b = to_bowler({4.0, 0, 0, 0});
    CHECK(b.alpha0 == 4.0);
    CHECK(b.beta0 == 0.0);
    b = to_bowler({0, 0, 0, 1});
    CHECK(b.beta0 == 1.0);
    CHECK(b.gamma0 == -6.0);
    CHECK(b.delta0 == 6.0);
    b = to_bowler({0, 1, 1, 1});
    CHECK(b.beta0 == 1.0);
    CHECK(b.gamma0 == -4.0);
    CHECK(b.delta0 == 6.0);
}

TEST_CASE("quantisation floors onto the grid") {
    const FixedPointFormat fmt;
    CHECK(quantize_segment({0, 1.5, 0, 0}, fmt, 1).segment.beta_raw == 1572864);
    CHECK(quantize_segment({0, -0.75, 0, 0}, fmt, 1).segment.beta_raw == -786432);

    mpq_class exact("37681/10000");
    exact *= mpq_class(mpz_class(1) << 20);
    const mpz_class floor_val = exact.get_num() / exact.get_den();
    CHECK(quantize_segment({0, 3.7681, 0, 0}, fmt, 1).segment.beta_raw == floor_val.get_si());

    // floor on negatives and alpha on the integer grid
    const auto q = quantize_segment({-2.5, -1e-9, 0.3, -0.3}, fmt, 10);
    CHECK(q.segment.alpha_raw == -3);
    CHECK(q.segment.beta_raw == -1);
    CHECK(quantize_segment({999.9999999999, 0, 0, 0}, fmt, 1).segment.alpha_raw == 999);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1000.0, 1000.0);
    for (int i = 0; i < 1000; ++i) {
        const BowlerCoeffs b{u(rng) * 30, u(rng), u(rng) * 1e-3, u(rng) * 1e-6};
        const auto r = quantize_segment(b, fmt, 5);
        for (double e : {r.profile.eps_beta, r.profile.eps_gamma, r.profile.eps_delta}) {
            REQUIRE(e <= 0.0);
            REQUIRE(-e < fmt.step());
        }
        REQUIRE(r.profile.eps_alpha <= 0.0);
        REQUIRE(-r.profile.eps_alpha < 1.0);
        REQUIRE(r.profile.predicted.size() == 5);
    }
}

TEST_CASE("quantisation range errors name the coefficient") {
    const FixedPointFormat fmt;
    try {
        quantize_segment({0, 0, 1e5, 0}, fmt, 1);
        FAIL("expected range error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Range);
        CHECK(std::string(e.what()).find("gamma0") != std::string::npos);
    }
    try {
        quantize_segment({40000, 0, 0, 0}, fmt, 1);
        FAIL("expected range error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("alpha0") != std::string::npos);
    }
    CHECK_THROWS_AS(quantize_segment({0, NAN, 0, 0}, fmt, 1), Error);
}

TEST_CASE("error prediction") {
    SegmentErrorProfile p{0.25, 0, 0, 0, {}};
    CHECK(predict_error(p, 0) == 0.25);
    p = {1, 1, 1, 1, {}};
    CHECK(predict_error(p, 2) == 10.0);
    p = {0, 0, 0, std::ldexp(1.0, -20), {}};
    CHECK(predict_error(p, 1000) == 167167000.0 / 1048576.0);
    CHECK(predict_error(p, 1000) == doctest::Approx(159.42).epsilon(1e-4));
    CHECK_THROWS_AS(predict_error(p, -1), Error);
}

TEST_CASE("forward recursion examples") {
    CHECK(decompress(pulse_of({seg(5, 0, 0, 0, 4)})).samples == std::vector<std::int32_t>{5, 5, 5, 5});
    CHECK(decompress(pulse_of({seg(0, kOne, 0, 0, 4)})).samples == std::vector<std::int32_t>{0, 1, 2, 3});
    const auto b = to_bowler({0, 0, 0, 1});
    const auto q = quantize_segment(b, {}, 3).segment;
    CHECK(decompress(pulse_of({q})).samples == std::vector<std::int32_t>{0, 1, 8});

    // stitching: alpha reloads, no gap
    const auto two = decompress(pulse_of({seg(0, kOne, 0, 0, 3), seg(10, -kOne, 0, 0, 3)}));
    CHECK(two.samples == std::vector<std::int32_t>{0, 1, 2, 10, 9, 8});
}

TEST_CASE("exactly representable coefficients reproduce the polynomial") {
    // p(t) = 3 + 2t - t^2/64 + t^3/4096 has dyadic coefficients
    const CubicPoly c{3, 2, -1.0 / 64, 1.0 / 4096};
    const auto q = quantize_segment(to_bowler(c), {}, 200);
    for (double e : {q.profile.eps_alpha, q.profile.eps_beta, q.profile.eps_gamma, q.profile.eps_delta})
        CHECK(e == 0.0);
    const auto out = decompress(pulse_of({q.segment}));
    for (std::uint32_t t = 0; t < 200; ++t)
        REQUIRE(out.samples[t] == static_cast<std::int32_t>(std::floor(c(t))));
}

TEST_CASE("symmetric replay") {
    CHECK(decompress_symmetric(pulse_of({seg(7, 0, 0, 0, 5)}, true)).samples ==
          std::vector<std::int32_t>(10, 7));
    CHECK(decompress_symmetric(pulse_of({seg(0, kOne, 0, 0, 4)}, true)).samples ==
          std::vector<std::int32_t>{0, 1, 2, 3, 3, 2, 1, 0});
    CHECK_THROWS_AS(decompress(pulse_of({seg(0, 0, 0, 0, 4)}, true)), Error);
    CHECK_THROWS_AS(decompress_symmetric(pulse_of({seg(0, 0, 0, 0, 4)}, false)), Error);

    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<QuantizedSegment> s;
        const int k = 1 + static_cast<int>(rng() % 4);
        for (int j = 0; j < k; ++j) {
            const auto n = static_cast<std::uint32_t>(1 + rng() % 300);
            s.push_back(seg(static_cast<std::int64_t>(rng() % 2000) - 1000,
                            static_cast<std::int64_t>(rng() % (64 * kOne)) - 32 * kOne,
                            static_cast<std::int64_t>(rng() % kOne) - kOne / 2,
                            static_cast<std::int64_t>(rng() % 4096) - 2048, n));
        }
        const auto cp = pulse_of(s, true);
        const auto out = expand(cp).samples;
        const std::size_t half = cp.stored_samples();
        REQUIRE(out.size() == 2 * half);
        for (std::size_t i = 0; i < half; ++i)
            REQUIRE(out[2 * half - 1 - i] == out[i]);
    }
}

TEST_CASE("overflow and saturation") {
    FixedPointFormat fmt;
    const auto runaway = pulse_of({seg(0, 0, 0, signed_max(36), 100000)});
    try {
        decompress(runaway);
        FAIL("expected overflow");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Overflow);
        CHECK(std::string(e.what()).find("segment 0") != std::string::npos);
        CHECK(std::string(e.what()).find("sample") != std::string::npos);
    }
    const auto ramp = decompress(pulse_of({seg(32760, 4 * kOne, 0, 0, 4)}));
    CHECK(ramp.samples == std::vector<std::int32_t>{32760, 32764, 32767, 32767});
    CHECK(ramp.clamped == 2);
    const auto down = decompress(pulse_of({seg(-32766, -kOne, 0, 0, 4)}));
    CHECK(down.samples.back() == -32768);
    CHECK(down.clamped == 1);
    (void)fmt;
}

TEST_CASE("raw range validation") {
    auto cp = pulse_of({seg(0, signed_max(36) + 1, 0, 0, 4)});
    CHECK_THROWS_AS(cp.validate(), Error);
    cp = pulse_of({seg(1 << 15, 0, 0, 0, 4)});
    CHECK_THROWS_AS(cp.validate(), Error);
    cp = pulse_of({seg(0, 0, 0, 0, 0)});
    CHECK_THROWS_AS(cp.validate(), Error);
    FixedPointFormat f;
    f.frac_bits = 36;
    CHECK_THROWS_AS(f.validate(), Error);
    f = {};
    f.acc_bits = 30;
    CHECK_THROWS_AS(f.validate(), Error);
}

TEST_CASE("accumulated error identity holds exactly") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const FixedPointFormat fmt;
    for (int i = 0; i < 100; ++i) {
        const auto n = static_cast<std::uint32_t>(1 + rng() % 5000);
        const double nn = n;
        const BowlerCoeffs b{u(rng) * 30000, u(rng) * 8000 / nn, u(rng) * 8000 / (nn * nn),
                             u(rng) * 8000 / (nn * nn * nn)};
        const auto q = quantize_segment(b, fmt, n);
        const auto r = oracle::check_error_identity(b, q, fmt);
        REQUIRE(r.identity_exact);
        CHECK(r.worst_double_gap < 1e-9);
    }
}

TEST_CASE("width sweep") {
    const std::vector<std::pair<int, int>> widths{{24, 8}, {28, 12}, {32, 16}, {36, 20}, {40, 24}};
    const auto exact = sweep_quantization_width({3, 0.5, -0.25, 0.125}, 1000, widths);
    for (const auto& r : exact) {
        REQUIRE(r.max_abs_error.has_value());
        CHECK(*r.max_abs_error == 0.0);
    }
    const BowlerCoeffs b{100.3, 0.123456789, -3.3e-5, 1.7e-8};
    const auto rows = sweep_quantization_width(b, 4000, widths);
    REQUIRE(rows.size() == widths.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].word_bits == widths[i].first);
        CHECK(rows[i].frac_bits == widths[i].second);
        if (i > 0)
            CHECK(*rows[i].max_abs_error <= *rows[i - 1].max_abs_error);
    }
    // too narrow for beta: reported inline, the rest still runs
    const std::vector<std::pair<int, int>> tight{{8, 6}, {36, 20}};
    const auto mixed = sweep_quantization_width({0, 10.0, 0, 0}, 10, tight);
    CHECK_FALSE(mixed[0].max_abs_error.has_value());
    CHECK(mixed[0].error.find("beta0") != std::string::npos);
    CHECK(mixed[1].max_abs_error.has_value());
}

TEST_CASE("delta-dominated error grows cubically") {
    // eps_delta alone: error(2n) / error(n) tends to 8
    SegmentErrorProfile p{0, 0, 0, -0.9 * std::ldexp(1.0, -20), {}};
    for (std::int64_t n : {500, 1000, 4000}) {
        const double ratio = predict_error(p, 2 * n) / predict_error(p, n);
        CHECK(ratio == doctest::Approx(8.0).epsilon(0.01));
    }
}

TEST_CASE("decompress is deterministic") {
    const auto cp = pulse_of({seg(100, 12345, -77, 3, 5000), seg(-20, -999, 5, -1, 3000)});
    CHECK(decompress(cp).samples == decompress(cp).samples);
}
