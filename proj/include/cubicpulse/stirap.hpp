#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "cubicpulse/fixed_point.hpp"
#include "cubicpulse/qafit.hpp"

namespace cubicpulse::stirap {

/// Coherent three-level transfer |1> -> |0> through the excited state |e>.
/// Frequencies are in Hz and converted to angular units internally.
struct StirapConfig {
    double pulse_length = 20e-6;  ///< seconds, length L of each envelope
    double delay_fraction = 0.3;  ///< offset between the envelopes, in units of L
    double peak_rabi = 5e6;       ///< Hz
    double detuning = -100e6;     ///< Hz
    double sample_rate = 1e9;     ///< envelope samples per second
    int substeps = 1;             ///< integrator steps per envelope sample

    void validate() const;
    std::size_t envelope_samples() const; ///< L * rate
    std::size_t gate_samples() const;     ///< (1 + delay_fraction) * L * rate
};

nlohmann::json to_json(const StirapConfig& c);
StirapConfig stirap_config_from_json(const nlohmann::json& j, StirapConfig base = {});

using State = Eigen::Vector3cd; ///< amplitudes in the (|0>, |1>, |e>) basis

/// 1/2 [[0, 0, -W1], [0, 0, -W2], [-W1, -W2, 2 d]] with W = 2 pi Omega, d = 2 pi detuning.
Eigen::Matrix3cd build_hamiltonian(double omega1, double omega2, double detuning);

/// cos(phi)|0> - sin(phi)|1> with phi = atan(omega1 / omega2).
State dark_state(double omega1, double omega2);

struct TransferResult {
    double fidelity = 0.0; ///< |<0|psi_final>|^2
    double norm = 1.0;
    State final_state = State::Zero();
};

/// Propagates `initial` (default |1>) with H held constant over each sample,
/// using the exact 3x3 exponential. env1/env2 are Rabi frequencies in Hz and
/// must span the whole gate. Throws integrator-failure on norm drift > 1e-6.
TransferResult simulate_transfer(const StirapConfig& cfg, std::span<const double> env1,
                                 std::span<const double> env2);
TransferResult simulate_transfer(const StirapConfig& cfg, std::span<const double> env1,
                                 std::span<const double> env2, const State& initial);

/// Places one envelope shape on the gate: env1 from t = 0, env2 from
/// t = delay_fraction * L, zero elsewhere. `shape` has envelope_samples() entries.
void place_envelopes(const StirapConfig& cfg, std::span<const double> shape,
                     std::vector<double>& env1, std::vector<double>& env2);

struct BenchRow {
    std::string method; ///< exact, awg, float or qa
    std::size_t segments = 0;
    double fidelity = 0.0;
    double norm = 1.0;
    std::uint64_t compressed_bits = 0;
    double ratio = 0.0;
};

/// For every segment count, compresses a Blackman envelope on the 16-bit grid with the
/// naively quantised stage-one fit ("float") and with the quantisation-aware
/// fit ("qa"), decompresses bit-exactly, rescales to peak_rabi and simulates.
/// An "exact" row uses the unquantised window and an "awg" row the window
/// rounded onto the 16-bit sample grid.
std::vector<BenchRow> run_benchmark(const StirapConfig& cfg,
                                    std::span<const std::size_t> segment_counts,
                                    const FixedPointFormat& fmt, const QaFitOptions& opts);

std::string benchmark_csv(std::span<const BenchRow> rows);

} // namespace cubicpulse::stirap
