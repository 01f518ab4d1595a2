#include "cubicpulse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include <fftw3.h>

#include "cubicpulse/cps.hpp"
#include "cubicpulse/error.hpp"
#include "cubicpulse/io_util.hpp"

namespace cubicpulse {

namespace {

ErrorReport summarize(std::vector<double> errors, double full_scale) {
    ErrorReport r;
    double sum_abs = 0.0, sum_sq = 0.0;
    for (double e : errors) {
        const double a = std::abs(e);
        r.max_abs = std::max(r.max_abs, a);
        sum_abs += a;
        sum_sq += e * e;
    }
    if (!errors.empty()) {
        const auto n = static_cast<double>(errors.size());
        r.mean_abs = sum_abs / n;
        r.rms = std::sqrt(sum_sq / n);
    }
    r.max_abs_pct = 100.0 * r.max_abs / full_scale;
    r.errors = std::move(errors);
    return r;
}

} // namespace

ErrorReport time_domain_error(std::span<const double> reference, std::span<const double> test,
                              double full_scale) {
    require(reference.size() == test.size(),
            "time_domain_error: length mismatch (" + std::to_string(reference.size()) + " vs " +
                std::to_string(test.size()) + ")");
    require(full_scale > 0.0, "time_domain_error: full scale must be positive");
    std::vector<double> e(reference.size());
    for (std::size_t i = 0; i < e.size(); ++i)
        e[i] = reference[i] - test[i];
    return summarize(std::move(e), full_scale);
}

ErrorReport time_domain_error(const Pulse& reference, std::span<const std::int32_t> test) {
    std::vector<double> t(test.begin(), test.end());
    return time_domain_error(reference.samples, t, reference.full_scale);
}

std::vector<double> dds_modulate(std::span<const double> envelope, double carrier_hz,
                                 double sample_rate) {
    require(sample_rate > 0.0, "dds_modulate: sample rate must be positive");
    require(std::abs(carrier_hz) < sample_rate / 2.0,
            "dds_modulate: carrier must be below the Nyquist frequency");
    std::vector<double> out(envelope.size());
    const double w = 2.0 * std::numbers::pi * carrier_hz / sample_rate;
    for (std::size_t n = 0; n < out.size(); ++n)
        out[n] = envelope[n] * std::sin(w * static_cast<double>(n));
    return out;
}

double SpectrumReport::max_abs_err() const {
    return abs_err.empty() ? 0.0 : *std::max_element(abs_err.begin(), abs_err.end());
}

std::vector<double> dft_magnitudes(std::span<const double> x) {
    const std::size_t n = x.size();
    require(n > 0, "dft_magnitudes: empty input");
    const std::size_t bins = n / 2 + 1;
    auto* in = static_cast<double*>(fftw_malloc(sizeof(double) * n));
    auto* out = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * bins));
    std::vector<double> mag(bins);
    {
        // planning is not thread safe in FFTW
#pragma omp critical(cubicpulse_fftw_plan)
        {
            fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
            std::copy(x.begin(), x.end(), in);
            fftw_execute(plan);
            fftw_destroy_plan(plan);
        }
    }
    for (std::size_t k = 0; k < bins; ++k)
        mag[k] = std::hypot(out[k][0], out[k][1]);
    fftw_free(in);
    fftw_free(out);
    return mag;
}

SpectrumReport spectrum_error(std::span<const double> reference, std::span<const double> test,
                              double sample_rate) {
    require(reference.size() == test.size(),
            "spectrum_error: length mismatch (" + std::to_string(reference.size()) + " vs " +
                std::to_string(test.size()) + ")");
    require(sample_rate > 0.0, "spectrum_error: sample rate must be positive");
    SpectrumReport r;
    r.ref_mag = dft_magnitudes(reference);
    r.test_mag = dft_magnitudes(test);
    const std::size_t bins = r.ref_mag.size();
    r.bin_hz.resize(bins);
    r.abs_err.resize(bins);
    const double df = sample_rate / static_cast<double>(reference.size());
    for (std::size_t k = 0; k < bins; ++k) {
        r.bin_hz[k] = df * static_cast<double>(k);
        r.abs_err[k] = std::abs(r.ref_mag[k] - r.test_mag[k]);
    }
    return r;
}

FootprintReport footprint(const CompressedPulse& cp, std::uint64_t awg_sample_bits,
                          std::uint64_t total_samples, bool include_header) {
    require(awg_sample_bits > 0 && total_samples > 0, "footprint: arguments must be positive");
    FootprintReport r;
    const auto per_segment =
        static_cast<std::uint64_t>(cp.format.alpha_bits + 3 * cp.format.word_bits);
    r.compressed_bits = cp.segments.size() * per_segment;
    if (include_header)
        r.compressed_bits += 8 * kCpsHeaderBytes;
    r.awg_bits = total_samples * awg_sample_bits;
    r.ratio = r.compressed_bits == 0
                  ? 0.0
                  : static_cast<double>(r.awg_bits) / static_cast<double>(r.compressed_bits);
    return r;
}

nlohmann::json to_json(const ErrorReport& r) {
    return {{"max_abs", r.max_abs},
            {"mean_abs", r.mean_abs},
            {"rms", r.rms},
            {"max_abs_pct", r.max_abs_pct}};
}

nlohmann::json to_json(const FootprintReport& r) {
    return {{"compressed_bits", r.compressed_bits}, {"awg_bits", r.awg_bits}, {"ratio", r.ratio}};
}

nlohmann::json summary_json(const SpectrumReport& r) {
    return {{"bins", r.abs_err.size()}, {"max_abs_err", r.max_abs_err()}};
}

void write_spectrum_csv(const std::filesystem::path& path, const SpectrumReport& r) {
    std::ostringstream os;
    os << "bin_hz,ref_mag,test_mag,abs_err\n";
    for (std::size_t k = 0; k < r.abs_err.size(); ++k)
        os << format_double(r.bin_hz[k]) << ',' << format_double(r.ref_mag[k]) << ','
           << format_double(r.test_mag[k]) << ',' << format_double(r.abs_err[k]) << '\n';
    write_file_atomic(path, os.str());
}

void write_error_csv(const std::filesystem::path& path, const ErrorReport& r) {
    std::ostringstream os;
    os << "index,error\n";
    for (std::size_t i = 0; i < r.errors.size(); ++i)
        os << i << ',' << format_double(r.errors[i]) << '\n';
    write_file_atomic(path, os.str());
}

} // namespace cubicpulse
