#pragma once

// Data-parallel inner loops. Each OpenMP kernel has a *_serial twin that is
// the reference the tests and the benchmark compare against. All parallel
// kernels are deterministic: results do not depend on the thread count.

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "cubicpulse/fixed_point.hpp"
#include "cubicpulse/spline.hpp"

namespace cubicpulse::kernels {

/// Per-segment least-squares reduction on the normalised basis
/// {1, s, s^2, s^3}, s = t / L: R is the triangular QR factor, qty = Q^T y.
struct SegmentReduction {
    Eigen::Matrix4d r = Eigen::Matrix4d::Zero();
    Eigen::Vector4d qty = Eigen::Vector4d::Zero();
};

std::vector<SegmentReduction> segment_reductions(std::span<const double> y,
                                                 const KnotPartition& partition);
std::vector<SegmentReduction> segment_reductions_serial(std::span<const double> y,
                                                        const KnotPartition& partition);

/// Output-grid samples floor(acc_n / 2^frac) from the closed form
/// acc_n = alpha 2^frac + n beta + n(n+1)/2 gamma + n(n+1)(n+2)/6 delta,
/// i.e. the exact value of the stage-one polynomial plus the accumulated
/// quantisation error. No saturation is applied.
void segment_outputs(const QuantizedSegment& seg, const FixedPointFormat& fmt,
                     std::span<std::int64_t> out);
void segment_outputs_serial(const QuantizedSegment& seg, const FixedPointFormat& fmt,
                            std::span<std::int64_t> out);

/// Sum of (target - out)^2 accumulated over fixed 4096-sample blocks.
double squared_error_sum(std::span<const double> target, std::span<const std::int64_t> out);
double squared_error_sum_serial(std::span<const double> target,
                                std::span<const std::int64_t> out);

/// Cost of each candidate (see qafit segment_cost), parallel over candidates.
void score_population(std::span<const QuantizedSegment> candidates, std::span<const double> target,
                      const FixedPointFormat& fmt, double max_error_weight,
                      std::span<double> costs);
void score_population_serial(std::span<const QuantizedSegment> candidates,
                             std::span<const double> target, const FixedPointFormat& fmt,
                             double max_error_weight, std::span<double> costs);

/// Cost of one candidate's outputs against the target window.
double cost_from_outputs(std::span<const double> target, std::span<const std::int64_t> out,
                         double max_error_weight);

} // namespace cubicpulse::kernels
