#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include <omp.h>

#include "cubicpulse/fixed_point.hpp"
#include "cubicpulse/kernels.hpp"
#include "cubicpulse/pulse.hpp"
#include "cubicpulse/spline.hpp"

using namespace cubicpulse;
using namespace cubicpulse::kernels;

namespace {

QuantizedSegment random_segment(std::mt19937_64& rng, std::uint32_t n) {
    // keep the polynomial inside the 48-bit accumulator over n samples
    const double nn = n;
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto q = quantize_segment({u(rng) * 20000, u(rng) * 4000 / nn, u(rng) * 4000 / (nn * nn),
                                     u(rng) * 4000 / (nn * nn * nn)},
                                    {}, n);
    return q.segment;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

} // namespace

TEST_CASE("segment outputs: parallel equals serial equals emulation") {
    std::mt19937_64 rng(21);
    for (std::uint32_t n : {1u, 7u, 4096u, 4097u, 30000u}) {
        const auto seg = random_segment(rng, n);
        std::vector<std::int64_t> a(n), b(n);
        segment_outputs(seg, {}, a);
        segment_outputs_serial(seg, {}, b);
        REQUIRE(a == b);
        const auto trace = accumulator_trace(seg, {});
        for (std::uint32_t t = 0; t < n; ++t)
            REQUIRE(a[t] == output_floor(trace[t], {}));
    }
}

TEST_CASE("segment outputs are not saturated") {
    const QuantizedSegment seg{32767, std::int64_t{1} << 22, 0, 0, 5};
    std::vector<std::int64_t> out(5);
    segment_outputs(seg, {}, out);
    CHECK(out.back() == 32767 + 16);
}

TEST_CASE("squared error sum is deterministic across thread counts") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-3e4, 3e4);
    for (std::size_t n : {0u, 1u, 4095u, 4096u, 50001u}) {
        std::vector<double> target(n);
        std::vector<std::int64_t> out(n);
        for (std::size_t i = 0; i < n; ++i) {
            target[i] = u(rng);
            out[i] = static_cast<std::int64_t>(u(rng));
        }
        const double ref = squared_error_sum_serial(target, out);
        for (int threads : {1, 2, 3, 8}) {
            omp_set_num_threads(threads);
            REQUIRE(same_bits(squared_error_sum(target, out), ref));
        }
    }
    omp_set_num_threads(omp_get_num_procs());
}

TEST_CASE("population scoring matches serial bit for bit") {
    std::mt19937_64 rng(9);
    const std::uint32_t n = 3000;
    std::vector<double> target(n);
    for (std::uint32_t t = 0; t < n; ++t)
        target[t] = 10000 * std::sin(t * 1e-3) + 0.37;
    std::vector<QuantizedSegment> pop;
    for (int i = 0; i < 37; ++i)
        pop.push_back(random_segment(rng, n));
    for (double w : {0.0, 0.5}) {
        std::vector<double> a(pop.size()), b(pop.size());
        for (int threads : {1, 4}) {
            omp_set_num_threads(threads);
            score_population(pop, target, {}, w, a);
            score_population_serial(pop, target, {}, w, b);
            for (std::size_t i = 0; i < pop.size(); ++i)
                REQUIRE(same_bits(a[i], b[i]));
        }
    }
    omp_set_num_threads(omp_get_num_procs());
}

TEST_CASE("cost from outputs") {
    const std::vector<double> target{1.0, 2.0, 3.0, 4.0};
    const std::vector<std::int64_t> out{1, 2, 3, 6};
    CHECK(cost_from_outputs(target, out, 0.0) == doctest::Approx(4.0)); // plain sum of squares
    CHECK(cost_from_outputs(target, out, 1.0) == doctest::Approx(4.0));
    CHECK(cost_from_outputs(target, out, 0.5) == doctest::Approx(2.5));
}

TEST_CASE("segment reductions match serial") {
    const auto p = gen_gaussian(30000, 15000, 8e6, 32767, 2e6);
    for (std::size_t k : {1u, 7u, 64u}) {
        const auto part = uniform_knots(k, p.size());
        const auto a = segment_reductions(p.samples, part);
        const auto b = segment_reductions_serial(p.samples, part);
        REQUIRE(a.size() == k);
        for (std::size_t j = 0; j < k; ++j) {
            REQUIRE(a[j].r == b[j].r);
            REQUIRE(a[j].qty == b[j].qty);
        }
    }
}

TEST_CASE("segment reduction solves the local least squares problem") {
    // exact cubic in s = t / L is recovered from R c = Q^T y
    const std::size_t n = 500;
    std::vector<double> y(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double s = static_cast<double>(t) / n;
        y[t] = 1.0 - 2.0 * s + 3.0 * s * s + 0.5 * s * s * s;
    }
    KnotPartition part{{0, n}};
    const auto red = segment_reductions(y, part);
    const Eigen::Vector4d c = red[0].r.triangularView<Eigen::Upper>().solve(red[0].qty);
    CHECK(c[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(c[1] == doctest::Approx(-2.0).epsilon(1e-10));
    CHECK(c[2] == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(c[3] == doctest::Approx(0.5).epsilon(1e-10));
}
