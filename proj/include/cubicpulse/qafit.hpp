#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cubicpulse/fixed_point.hpp"
#include "cubicpulse/pulse.hpp"
#include "cubicpulse/spline.hpp"

namespace cubicpulse {

enum class SymmetryMode { Auto, On, Off };

std::string to_string(SymmetryMode m);
SymmetryMode parse_symmetry_mode(const std::string& s);

/// Stage-two search settings. Radii are in grid steps of the raw coefficient.
struct QaFitOptions {
    int population_size = 32;
    int generations = 300;
    double mutation_scale = 0.7;
    double crossover_rate = 0.9;
    std::int64_t radius_beta = 4096;
    std::int64_t radius_gamma = 4096;
    std::int64_t radius_delta = 64;
    std::uint64_t rng_seed = 1;
    double max_error_weight = 0.0;
    SymmetryMode symmetry = SymmetryMode::Auto;
    double symmetry_tol = 0.0;

    void validate() const;
};

nlohmann::json to_json(const QaFitOptions& o);
/// Fields present in `j` override `base`; unknown keys are rejected.
QaFitOptions qa_options_from_json(const nlohmann::json& j, QaFitOptions base = {});

struct QaSegmentResult {
    QuantizedSegment seed;
    QuantizedSegment optimized;
    double seed_cost = 0.0;
    double optimized_cost = 0.0;
    std::size_t evaluations = 0;
};

/// Hardware-output cost of one segment:
///   sum_n (target[n] - floor(y_poly[n] + eps*[n]))^2
/// where y_poly + eps* is the stage-one polynomial plus the accumulated
/// quantisation error of `candidate`. That sum is evaluated exactly in
/// integer arithmetic over the candidate's raws, so it matches bit-exact
/// emulation sample for sample. With max_error_weight w > 0 the cost is
/// (1-w) * mean square + w * (max abs error)^2.
double segment_cost(std::span<const double> target, const QuantizedSegment& candidate,
                    const FixedPointFormat& fmt, double max_error_weight = 0.0);

/// Differential evolution over (beta, gamma, delta) raws within the search
/// radii around the quantised seed; alpha stays fixed. The seed is member 0
/// of the population, so the result never costs more than the seed.
/// `stream` selects an independent random stream (the segment index).
QaSegmentResult optimize_segment(std::span<const double> target, const BowlerCoeffs& seed,
                                 const FixedPointFormat& fmt, const QaFitOptions& opts,
                                 std::uint64_t stream = 0);

/// True when the pulse can be stored as its first half: mirror symmetric
/// within `tol`, even length, even segment count, middle knot at N/2.
bool symmetric_layout_possible(const Pulse& p, const KnotPartition& partition, double tol);

/// Resolves a SymmetryMode; `On` throws invalid-argument when impossible.
bool resolve_symmetry(const Pulse& p, const KnotPartition& partition, SymmetryMode mode,
                      double tol);

/// Stage-one coefficients floored onto the grid without any compensation.
CompressedPulse quantize_naive(const SplineFit& stage_one, const FixedPointFormat& fmt,
                               bool symmetric);

struct QaFitResult {
    CompressedPulse pulse;
    std::vector<QaSegmentResult> segments;

    double seed_cost() const;
    double optimized_cost() const;
};

QaFitResult quantisation_aware_fit(const Pulse& p, const SplineFit& stage_one,
                                   const FixedPointFormat& fmt, const QaFitOptions& opts);

} // namespace cubicpulse
