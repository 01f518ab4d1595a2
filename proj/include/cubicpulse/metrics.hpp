#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <json.hpp>

#include "cubicpulse/fixed_point.hpp"
#include "cubicpulse/pulse.hpp"

namespace cubicpulse {

struct ErrorReport {
    double max_abs = 0.0;
    double mean_abs = 0.0;
    double rms = 0.0;
    double max_abs_pct = 0.0; ///< max_abs relative to the reference full scale
    std::vector<double> errors; ///< reference[i] - test[i]
};

ErrorReport time_domain_error(const Pulse& reference, std::span<const std::int32_t> test);
ErrorReport time_domain_error(std::span<const double> reference, std::span<const double> test,
                              double full_scale);

/// envelope[n] * sin(2 pi f n / rate). Carrier must be below Nyquist.
std::vector<double> dds_modulate(std::span<const double> envelope, double carrier_hz,
                                 double sample_rate);

/// Unnormalised forward DFT magnitudes |sum_n x[n] e^{-2 pi i k n / N}| for
/// k = 0 .. N/2, so sum_n x^2 = (|X_0|^2 + 2 sum_{0<k<N/2} |X_k|^2 + [N even] |X_{N/2}|^2) / N.
struct SpectrumReport {
    std::vector<double> bin_hz;
    std::vector<double> ref_mag;
    std::vector<double> test_mag;
    std::vector<double> abs_err;

    double max_abs_err() const;
};

std::vector<double> dft_magnitudes(std::span<const double> x);
SpectrumReport spectrum_error(std::span<const double> reference, std::span<const double> test,
                              double sample_rate);

struct FootprintReport {
    std::uint64_t compressed_bits = 0;
    std::uint64_t awg_bits = 0;
    double ratio = 0.0;
};

/// Coefficient bits of the stored segments against total_samples words of
/// awg_sample_bits each. The file header is only counted on request.
FootprintReport footprint(const CompressedPulse& cp, std::uint64_t awg_sample_bits,
                          std::uint64_t total_samples, bool include_header = false);

nlohmann::json to_json(const ErrorReport& r);
nlohmann::json to_json(const FootprintReport& r);
nlohmann::json summary_json(const SpectrumReport& r);

void write_spectrum_csv(const std::filesystem::path& path, const SpectrumReport& r);
void write_error_csv(const std::filesystem::path& path, const ErrorReport& r);

} // namespace cubicpulse
