#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cubicpulse/spline.hpp"

namespace cubicpulse {

/// Two's-complement layout of stored coefficients and of the emulated datapath.
struct FixedPointFormat {
    int word_bits = 36;  ///< beta/gamma/delta container width
    int frac_bits = 20;  ///< fractional bits of beta/gamma/delta and of the accumulators
    int alpha_bits = 16; ///< alpha_0 is stored on the output integer grid
    int out_bits = 16;   ///< emitted samples are the integer part, saturated to this width
    int acc_bits = 48;   ///< accumulator register width (DSP adder)

    void validate() const;
    double step() const; ///< 2^-frac_bits

    bool operator==(const FixedPointFormat&) const = default;
};

/// Signed range of a `bits`-wide two's-complement integer.
std::int64_t signed_min(int bits);
std::int64_t signed_max(int bits);

/// Initial values of the purely additive three-accumulator recursion.
struct BowlerCoeffs {
    double alpha0 = 0.0;
    double beta0 = 0.0;
    double gamma0 = 0.0;
    double delta0 = 0.0;
};

struct QuantizedSegment {
    std::int64_t alpha_raw = 0; ///< integer grid
    std::int64_t beta_raw = 0;  ///< value * 2^frac_bits
    std::int64_t gamma_raw = 0;
    std::int64_t delta_raw = 0;
    std::uint32_t n_samples = 0;

    bool operator==(const QuantizedSegment&) const = default;
};

struct CompressedPulse {
    FixedPointFormat format;
    std::vector<QuantizedSegment> segments;
    bool symmetric = false; ///< segments cover the first half only

    std::size_t stored_samples() const;
    std::size_t emitted_samples() const { return stored_samples() * (symmetric ? 2 : 1); }
    void validate() const;

    bool operator==(const CompressedPulse&) const = default;
};

/// Quantisation errors (quantised minus exact, in output units) and the
/// predicted accumulated error for n = 0 .. n_samples-1.
struct SegmentErrorProfile {
    double eps_alpha = 0.0;
    double eps_beta = 0.0;
    double eps_gamma = 0.0;
    double eps_delta = 0.0;
    std::vector<double> predicted;
};

struct QuantizeResult {
    QuantizedSegment segment;
    SegmentErrorProfile profile;
};

/// alpha = p0, beta = p1 - p2 + p3, gamma = 2 p2 - 6 p3, delta = 6 p3.
BowlerCoeffs to_bowler(const CubicPoly& c);

/// Floors beta/gamma/delta onto the 2^-frac_bits grid and alpha onto the
/// integer grid. Throws range-error naming the coefficient that does not fit.
QuantizeResult quantize_segment(const BowlerCoeffs& b, const FixedPointFormat& fmt,
                                std::uint32_t n_samples);

/// Error profile of an arbitrary candidate relative to exact coefficients.
SegmentErrorProfile error_profile(const BowlerCoeffs& exact, const QuantizedSegment& q,
                                  const FixedPointFormat& fmt);

/// eps_alpha + n eps_beta + n(n+1)/2 eps_gamma + n(n+1)(n+2)/6 eps_delta.
double predict_error(const SegmentErrorProfile& prof, std::int64_t n);

/// Raw accumulator registers of the recursion, all at frac_bits scale.
struct RecursionState {
    std::int64_t alpha = 0;
    std::int64_t beta = 0;
    std::int64_t gamma = 0;
};

/// Alpha accumulator (frac_bits scale, before output truncation) for every
/// emitted sample of one segment. Throws overflow-error naming the sample
/// if any register leaves the acc_bits range.
std::vector<std::int64_t> accumulator_trace(const QuantizedSegment& seg,
                                            const FixedPointFormat& fmt,
                                            std::size_t segment_index = 0);

struct DecompressResult {
    std::vector<std::int32_t> samples;
    std::size_t clamped = 0; ///< samples saturated to the out_bits range
};

/// Bit-exact forward emulation; requires cp.symmetric == false.
DecompressResult decompress(const CompressedPulse& cp);
/// Forward half followed by the backward recursion over the mirrored
/// segments; requires cp.symmetric == true. Output length is twice the
/// stored length and the second half is the exact reversal of the first.
DecompressResult decompress_symmetric(const CompressedPulse& cp);
/// Dispatches on cp.symmetric.
DecompressResult expand(const CompressedPulse& cp);

/// Integer part (floor) of an accumulator value.
std::int64_t output_floor(std::int64_t acc, const FixedPointFormat& fmt);

struct WidthSweepRow {
    int word_bits = 0;
    int frac_bits = 0;
    std::optional<double> max_abs_error; ///< empty when quantisation failed
    std::string error;
};

/// Max over n of |predict_error| for each (word_bits, frac_bits), in the order given.
std::vector<WidthSweepRow> sweep_quantization_width(const BowlerCoeffs& b, std::uint32_t n_samples,
                                                    std::span<const std::pair<int, int>> widths,
                                                    const FixedPointFormat& base = {});

} // namespace cubicpulse
