#pragma once

#include <cstddef>
#include <vector>

#include <json.hpp>

#include "cubicpulse/pulse.hpp"

namespace cubicpulse {

/// Segment boundaries as sample indices: 0 = b_0 < b_1 < ... < b_S = pulse length.
/// Segment j owns samples [b_j, b_{j+1}); a knot sample belongs to the later segment.
struct KnotPartition {
    std::vector<std::size_t> boundaries;

    std::size_t segment_count() const { return boundaries.empty() ? 0 : boundaries.size() - 1; }
    std::size_t pulse_length() const { return boundaries.empty() ? 0 : boundaries.back(); }
    std::size_t segment_begin(std::size_t j) const { return boundaries[j]; }
    std::size_t segment_length(std::size_t j) const { return boundaries[j + 1] - boundaries[j]; }

    /// Throws invalid-argument unless strictly increasing from 0 to
    /// `pulse_len` with at least 4 samples per segment.
    void validate(std::size_t pulse_len) const;

    bool operator==(const KnotPartition&) const = default;
};

/// p0 + p1 t + p2 t^2 + p3 t^3 in segment-local time (t = 0 at the segment's first sample).
struct CubicPoly {
    double p0 = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
    double p3 = 0.0;

    double operator()(double t) const { return p0 + t * (p1 + t * (p2 + t * p3)); }
    /// d-th derivative at t, d in [0, 3].
    double derivative(double t, int d) const;
};

struct SplineFit {
    KnotPartition partition;
    std::vector<CubicPoly> polys;
    int continuity_order = 1;
    double residual = 0.0;
};

KnotPartition uniform_knots(std::size_t n_segments, std::size_t pulse_len);

/// Least-squares piecewise cubic fit with value and derivative continuity
/// up to `continuity_order` (0, 1 or 2) at every interior knot.
/// Throws fit-failure naming the segment when a segment system is singular.
SplineFit fit_float(const Pulse& p, const KnotPartition& partition, int continuity_order = 1);

/// Evaluates the owning segment's polynomial at sample position t in [0, pulse length].
double eval_spline(const SplineFit& f, double t);

/// Sum of squared differences between the spline and the pulse samples.
double spline_residual(const SplineFit& f, const Pulse& p);

/// Coordinate descent over interior boundaries. Each boundary is tried at
/// +-1, 2, 4, ... samples (staying >= 4 samples from its neighbours); the best
/// candidate is kept if it lowers the refit residual. Stops after `max_iters`
/// sweeps or a sweep without improvement.
KnotPartition optimize_knots_local(const Pulse& p, const KnotPartition& initial, int max_iters,
                                   int continuity_order = 1);

nlohmann::json to_json(const SplineFit& f);
SplineFit spline_fit_from_json(const nlohmann::json& j);

} // namespace cubicpulse
