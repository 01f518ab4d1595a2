#include "cubicpulse/fixed_point.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cubicpulse/error.hpp"

namespace cubicpulse {

namespace {

bool fits(std::int64_t v, int bits) { return v >= signed_min(bits) && v <= signed_max(bits); }

std::int64_t floor_to_grid(double value, int frac_bits, int width, const char* name) {
    if (!std::isfinite(value))
        fail(ErrorKind::Range, std::string(name) + " is not finite");
    const double scaled = std::floor(std::ldexp(value, frac_bits));
    if (scaled < static_cast<double>(signed_min(width)) ||
        scaled > static_cast<double>(signed_max(width)))
        fail(ErrorKind::Range, std::string(name) + " = " + std::to_string(value) +
                                   " does not fit in " + std::to_string(width) + " bits");
    return static_cast<std::int64_t>(scaled);
}

void check_register(std::int64_t v, int acc_bits, const char* reg, std::size_t seg,
                    std::size_t sample) {
    if (!fits(v, acc_bits))
        fail(ErrorKind::Overflow, std::string(reg) + " accumulator overflow in segment " +
                                      std::to_string(seg) + " at sample " + std::to_string(sample));
}

std::int32_t saturate(std::int64_t v, int out_bits, std::size_t& clamped) {
    const std::int64_t lo = signed_min(out_bits);
    const std::int64_t hi = signed_max(out_bits);
    if (v < lo || v > hi) {
        ++clamped;
        v = std::clamp(v, lo, hi);
    }
    return static_cast<std::int32_t>(v);
}

// Runs the forward recursion for one segment, appending output samples.
RecursionState run_forward(const QuantizedSegment& seg, const FixedPointFormat& fmt,
                           std::size_t index, std::vector<std::int32_t>& out,
                           std::size_t& clamped) {
    RecursionState s{seg.alpha_raw * (std::int64_t{1} << fmt.frac_bits), seg.beta_raw,
                     seg.gamma_raw};
    check_register(s.alpha, fmt.acc_bits, "alpha", index, 0);
    out.push_back(saturate(output_floor(s.alpha, fmt), fmt.out_bits, clamped));
    for (std::uint32_t t = 1; t < seg.n_samples; ++t) {
        s.gamma += seg.delta_raw;
        s.beta += s.gamma;
        s.alpha += s.beta;
        check_register(s.gamma, fmt.acc_bits, "gamma", index, t);
        check_register(s.beta, fmt.acc_bits, "beta", index, t);
        check_register(s.alpha, fmt.acc_bits, "alpha", index, t);
        out.push_back(saturate(output_floor(s.alpha, fmt), fmt.out_bits, clamped));
    }
    return s;
}

} // namespace

std::int64_t signed_min(int bits) { return -(std::int64_t{1} << (bits - 1)); }
std::int64_t signed_max(int bits) { return (std::int64_t{1} << (bits - 1)) - 1; }

void FixedPointFormat::validate() const {
    require(word_bits >= 2 && word_bits <= 62, "word_bits must be in [2, 62]");
    require(frac_bits >= 1 && frac_bits < word_bits, "frac_bits must be in [1, word_bits)");
    require(alpha_bits >= 2 && alpha_bits <= word_bits, "alpha_bits must be in [2, word_bits]");
    require(out_bits >= 2 && out_bits <= 32, "out_bits must be in [2, 32]");
    require(acc_bits >= word_bits && acc_bits <= 62, "acc_bits must be in [word_bits, 62]");
    require(alpha_bits + frac_bits <= acc_bits, "alpha_bits + frac_bits must fit in acc_bits");
}

double FixedPointFormat::step() const { return std::ldexp(1.0, -frac_bits); }

std::size_t CompressedPulse::stored_samples() const {
    return std::accumulate(segments.begin(), segments.end(), std::size_t{0},
                           [](std::size_t a, const QuantizedSegment& s) { return a + s.n_samples; });
}

void CompressedPulse::validate() const {
    format.validate();
    for (std::size_t k = 0; k < segments.size(); ++k) {
        const auto& s = segments[k];
        const std::string at = " of segment " + std::to_string(k);
        if (s.n_samples < 1)
            fail(ErrorKind::InvalidArgument, "n_samples must be >= 1" + at);
        if (!fits(s.alpha_raw, format.alpha_bits))
            fail(ErrorKind::Range, "alpha_raw out of range" + at);
        if (!fits(s.beta_raw, format.word_bits))
            fail(ErrorKind::Range, "beta_raw out of range" + at);
        if (!fits(s.gamma_raw, format.word_bits))
            fail(ErrorKind::Range, "gamma_raw out of range" + at);
        if (!fits(s.delta_raw, format.word_bits))
            fail(ErrorKind::Range, "delta_raw out of range" + at);
    }
}

BowlerCoeffs to_bowler(const CubicPoly& c) {
    return {c.p0, c.p1 - c.p2 + c.p3, 2.0 * c.p2 - 6.0 * c.p3, 6.0 * c.p3};
}

SegmentErrorProfile error_profile(const BowlerCoeffs& exact, const QuantizedSegment& q,
                                  const FixedPointFormat& fmt) {
    const double step = fmt.step();
    SegmentErrorProfile prof;
    prof.eps_alpha = static_cast<double>(q.alpha_raw) - exact.alpha0;
    prof.eps_beta = static_cast<double>(q.beta_raw) * step - exact.beta0;
    prof.eps_gamma = static_cast<double>(q.gamma_raw) * step - exact.gamma0;
    prof.eps_delta = static_cast<double>(q.delta_raw) * step - exact.delta0;
    prof.predicted.resize(q.n_samples);
    for (std::uint32_t n = 0; n < q.n_samples; ++n)
        prof.predicted[n] = predict_error(prof, n);
    return prof;
}

QuantizeResult quantize_segment(const BowlerCoeffs& b, const FixedPointFormat& fmt,
                                std::uint32_t n_samples) {
    fmt.validate();
    require(n_samples >= 1, "quantize_segment: n_samples must be >= 1");
    QuantizeResult r;
    r.segment.alpha_raw = floor_to_grid(b.alpha0, 0, fmt.alpha_bits, "alpha0");
    r.segment.beta_raw = floor_to_grid(b.beta0, fmt.frac_bits, fmt.word_bits, "beta0");
    r.segment.gamma_raw = floor_to_grid(b.gamma0, fmt.frac_bits, fmt.word_bits, "gamma0");
    r.segment.delta_raw = floor_to_grid(b.delta0, fmt.frac_bits, fmt.word_bits, "delta0");
    r.segment.n_samples = n_samples;
    r.profile = error_profile(b, r.segment, fmt);
    return r;
}

double predict_error(const SegmentErrorProfile& prof, std::int64_t n) {
    require(n >= 0, "predict_error: n must be >= 0");
    const double nn = static_cast<double>(n);
    const double tri = static_cast<double>(n * (n + 1) / 2);
    const double tet = static_cast<double>(n * (n + 1) * (n + 2) / 6);
    return prof.eps_alpha + nn * prof.eps_beta + tri * prof.eps_gamma + tet * prof.eps_delta;
}

std::int64_t output_floor(std::int64_t acc, const FixedPointFormat& fmt) {
    return acc >> fmt.frac_bits;
}

std::vector<std::int64_t> accumulator_trace(const QuantizedSegment& seg,
                                            const FixedPointFormat& fmt,
                                            std::size_t segment_index) {
    fmt.validate();
    std::vector<std::int64_t> out;
    out.reserve(seg.n_samples);
    RecursionState s{seg.alpha_raw * (std::int64_t{1} << fmt.frac_bits), seg.beta_raw,
                     seg.gamma_raw};
    check_register(s.alpha, fmt.acc_bits, "alpha", segment_index, 0);
    out.push_back(s.alpha);
    for (std::uint32_t t = 1; t < seg.n_samples; ++t) {
        s.gamma += seg.delta_raw;
        s.beta += s.gamma;
        s.alpha += s.beta;
        check_register(s.gamma, fmt.acc_bits, "gamma", segment_index, t);
        check_register(s.beta, fmt.acc_bits, "beta", segment_index, t);
        check_register(s.alpha, fmt.acc_bits, "alpha", segment_index, t);
        out.push_back(s.alpha);
    }
    return out;
}

DecompressResult decompress(const CompressedPulse& cp) {
    require(!cp.symmetric, "decompress: pulse is symmetric, use decompress_symmetric");
    cp.validate();
    DecompressResult r;
    r.samples.reserve(cp.stored_samples());
    for (std::size_t k = 0; k < cp.segments.size(); ++k)
        run_forward(cp.segments[k], cp.format, k, r.samples, r.clamped);
    return r;
}

DecompressResult decompress_symmetric(const CompressedPulse& cp) {
    require(cp.symmetric, "decompress_symmetric: pulse is not symmetric");
    cp.validate();
    const auto& fmt = cp.format;
    DecompressResult r;
    r.samples.reserve(2 * cp.stored_samples());
    std::vector<RecursionState> finals;
    finals.reserve(cp.segments.size());
    for (std::size_t k = 0; k < cp.segments.size(); ++k)
        finals.push_back(run_forward(cp.segments[k], fmt, k, r.samples, r.clamped));

    // Backward recursion: each mirrored segment starts from the final
    // registers of its forward twin and undoes the forward steps one by one.
    for (std::size_t k = cp.segments.size(); k-- > 0;) {
        const auto& seg = cp.segments[k];
        RecursionState s = finals[k];
        const std::size_t index = 2 * cp.segments.size() - 1 - k;
        r.samples.push_back(saturate(output_floor(s.alpha, fmt), fmt.out_bits, r.clamped));
        for (std::uint32_t t = 1; t < seg.n_samples; ++t) {
            s.alpha -= s.beta;
            s.beta -= s.gamma;
            s.gamma -= seg.delta_raw;
            check_register(s.gamma, fmt.acc_bits, "gamma", index, t);
            check_register(s.beta, fmt.acc_bits, "beta", index, t);
            check_register(s.alpha, fmt.acc_bits, "alpha", index, t);
            r.samples.push_back(saturate(output_floor(s.alpha, fmt), fmt.out_bits, r.clamped));
        }
    }
    return r;
}

DecompressResult expand(const CompressedPulse& cp) {
    return cp.symmetric ? decompress_symmetric(cp) : decompress(cp);
}

std::vector<WidthSweepRow> sweep_quantization_width(const BowlerCoeffs& b, std::uint32_t n_samples,
                                                    std::span<const std::pair<int, int>> widths,
                                                    const FixedPointFormat& base) {
    std::vector<WidthSweepRow> rows;
    rows.reserve(widths.size());
    for (const auto& [word, frac] : widths) {
        WidthSweepRow row{word, frac, std::nullopt, {}};
        try {
            FixedPointFormat fmt = base;
            fmt.word_bits = word;
            fmt.frac_bits = frac;
            fmt.acc_bits = std::max(fmt.acc_bits, word);
            fmt.alpha_bits = std::min(fmt.alpha_bits, word);
            const auto q = quantize_segment(b, fmt, n_samples);
            double worst = 0.0;
            for (double e : q.profile.predicted)
                worst = std::max(worst, std::abs(e));
            row.max_abs_error = worst;
        } catch (const Error& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace cubicpulse
