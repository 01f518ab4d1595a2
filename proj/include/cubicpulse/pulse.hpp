#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

namespace cubicpulse {

/// Largest value of the signed 16-bit output grid; default full scale of a pulse.
inline constexpr double kFullScale16 = 32767.0;

/// A uniformly sampled envelope (or frequency profile). Time is the integer
/// sample index; `sample_rate` is carried as metadata only.
struct Pulse {
    std::vector<double> samples;
    double sample_rate = 1e9;
    double full_scale = kFullScale16;

    std::size_t size() const { return samples.size(); }

    /// Throws invalid-argument on empty, non-finite or non-positive rate.
    void validate() const;
};

/// Symmetric Blackman window (denominator N-1) scaled so that its peak is
/// `amplitude`. Computed on the first half and mirrored, so
/// `samples[k] == samples[N-1-k]` holds exactly.
Pulse gen_blackman(std::size_t length, double amplitude, double sample_rate = 1e9);

/// amplitude * exp(-(k - center)^2 / (2 sigma_sq)), optionally multiplied by
/// sin(2 pi carrier k / sample_rate).
Pulse gen_gaussian(std::size_t length, double center, double sigma_sq, double amplitude,
                   std::optional<double> carrier_hz, double sample_rate = 1e9);

/// Logistic ramp amplitude / (1 + exp(-steepness * u)) with
/// u = (k - (N-1)/2) / (N-1), i.e. steepness is per unit pulse length.
Pulse gen_sigmoid(std::size_t length, double steepness, double amplitude,
                  double sample_rate = 1e9);

/// Piecewise quadratic frequency sweep from f0 to ff over `duration_samples`
/// clock periods. The profile has duration_samples + 1 samples so both
/// endpoints t = 0 and t = t_p are present.
Pulse gen_piecewise_quadratic_chirp(std::size_t duration_samples, double f0, double ff,
                                    double sample_rate = 1e9);

/// Mirror centre (N-1)/2 if max |x[k] - x[N-1-k]| <= tol, otherwise nullopt.
std::optional<double> detect_symmetry(const Pulse& p, double tol);

/// Largest mirror residual max |x[k] - x[N-1-k]|.
double mirror_residual(const Pulse& p);

// CSV with header `index,value`. The sample rate is taken from
// `sample_rate` if given, else from a `<path>.json` sidecar, else 1 GSps.
Pulse read_pulse_csv(const std::filesystem::path& path,
                     std::optional<double> sample_rate = std::nullopt);
void write_pulse_csv(const std::filesystem::path& path, const Pulse& p,
                     bool write_sidecar = true);

} // namespace cubicpulse
