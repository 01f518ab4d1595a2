#include "cubicpulse/kernels.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/QR>

#include "cubicpulse/error.hpp"

namespace cubicpulse::kernels {

namespace {

constexpr std::size_t kBlock = 4096;

SegmentReduction reduce_segment(std::span<const double> y) {
    const auto len = static_cast<Eigen::Index>(y.size());
    const double inv = 1.0 / static_cast<double>(y.size());
    Eigen::MatrixXd a(len, 4);
    Eigen::VectorXd rhs(len);
    for (Eigen::Index t = 0; t < len; ++t) {
        const double s = static_cast<double>(t) * inv;
        a(t, 0) = 1.0;
        a(t, 1) = s;
        a(t, 2) = s * s;
        a(t, 3) = s * s * s;
        rhs(t) = y[static_cast<std::size_t>(t)];
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    SegmentReduction red;
    red.r = qr.matrixQR().topLeftCorner<4, 4>().triangularView<Eigen::Upper>();
    Eigen::VectorXd qty = qr.householderQ().transpose() * rhs;
    red.qty = qty.head<4>();
    return red;
}

inline std::int64_t closed_form_output(const QuantizedSegment& seg, int frac, std::int64_t n) {
    __extension__ typedef __int128 i128;
    const i128 nn = n;
    const i128 tri = nn * (nn + 1) / 2;
    const i128 tet = nn * (nn + 1) * (nn + 2) / 6;
    const i128 acc = (static_cast<i128>(seg.alpha_raw) << frac) + nn * seg.beta_raw +
                     tri * seg.gamma_raw + tet * seg.delta_raw;
    return static_cast<std::int64_t>(acc >> frac);
}

inline double block_sse(std::span<const double> target, std::span<const std::int64_t> out,
                        std::size_t begin, std::size_t end) {
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        const double d = target[i] - static_cast<double>(out[i]);
        s += d * d;
    }
    return s;
}

} // namespace

std::vector<SegmentReduction> segment_reductions(std::span<const double> y,
                                                 const KnotPartition& partition) {
    const auto n = static_cast<std::ptrdiff_t>(partition.segment_count());
    std::vector<SegmentReduction> out(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t j = 0; j < n; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        out[uj] = reduce_segment(
            y.subspan(partition.segment_begin(uj), partition.segment_length(uj)));
    }
    return out;
}

std::vector<SegmentReduction> segment_reductions_serial(std::span<const double> y,
                                                        const KnotPartition& partition) {
    std::vector<SegmentReduction> out(partition.segment_count());
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = reduce_segment(y.subspan(partition.segment_begin(j), partition.segment_length(j)));
    return out;
}

void segment_outputs(const QuantizedSegment& seg, const FixedPointFormat& fmt,
                     std::span<std::int64_t> out) {
    const auto n = static_cast<std::ptrdiff_t>(out.size());
    const int frac = fmt.frac_bits;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = closed_form_output(seg, frac, i);
}

void segment_outputs_serial(const QuantizedSegment& seg, const FixedPointFormat& fmt,
                            std::span<std::int64_t> out) {
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = closed_form_output(seg, fmt.frac_bits, static_cast<std::int64_t>(i));
}

double squared_error_sum(std::span<const double> target, std::span<const std::int64_t> out) {
    require(target.size() == out.size(), "squared_error_sum: length mismatch");
    const std::size_t n = target.size();
    const auto blocks = static_cast<std::ptrdiff_t>((n + kBlock - 1) / kBlock);
    std::vector<double> partial(static_cast<std::size_t>(blocks), 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < blocks; ++b) {
        const std::size_t begin = static_cast<std::size_t>(b) * kBlock;
        partial[static_cast<std::size_t>(b)] =
            block_sse(target, out, begin, std::min(n, begin + kBlock));
    }
    double s = 0.0;
    for (double v : partial)
        s += v;
    return s;
}

double squared_error_sum_serial(std::span<const double> target,
                                std::span<const std::int64_t> out) {
    require(target.size() == out.size(), "squared_error_sum: length mismatch");
    const std::size_t n = target.size();
    double s = 0.0;
    for (std::size_t begin = 0; begin < n; begin += kBlock)
        s += block_sse(target, out, begin, std::min(n, begin + kBlock));
    return s;
}

double cost_from_outputs(std::span<const double> target, std::span<const std::int64_t> out,
                         double max_error_weight) {
    const double sse = squared_error_sum_serial(target, out);
    if (max_error_weight <= 0.0)
        return sse;
    double worst = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i)
        worst = std::max(worst, std::abs(target[i] - static_cast<double>(out[i])));
    const double mse = sse / static_cast<double>(target.size());
    return (1.0 - max_error_weight) * mse + max_error_weight * worst * worst;
}

void score_population(std::span<const QuantizedSegment> candidates, std::span<const double> target,
                      const FixedPointFormat& fmt, double max_error_weight,
                      std::span<double> costs) {
    require(candidates.size() == costs.size(), "score_population: size mismatch");
    const auto n = static_cast<std::ptrdiff_t>(candidates.size());
#pragma omp parallel
    {
        std::vector<std::int64_t> buf(target.size());
#pragma omp for schedule(dynamic, 1)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            segment_outputs_serial(candidates[ui], fmt, buf);
            costs[ui] = cost_from_outputs(target, buf, max_error_weight);
        }
    }
}

void score_population_serial(std::span<const QuantizedSegment> candidates,
                             std::span<const double> target, const FixedPointFormat& fmt,
                             double max_error_weight, std::span<double> costs) {
    require(candidates.size() == costs.size(), "score_population: size mismatch");
    std::vector<std::int64_t> buf(target.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        segment_outputs_serial(candidates[i], fmt, buf);
        costs[i] = cost_from_outputs(target, buf, max_error_weight);
    }
}

} // namespace cubicpulse::kernels
