#include "cubicpulse/stirap.hpp"

#include <cmath>
#include <exception>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "cubicpulse/error.hpp"
#include "cubicpulse/io_util.hpp"
#include "cubicpulse/metrics.hpp"
#include "cubicpulse/pulse.hpp"
#include "cubicpulse/spline.hpp"

namespace cubicpulse::stirap {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::uint64_t kAwgSampleBits = 16;
// Window peak on the 16-bit grid. Headroom below 32767 keeps spline
// overshoot and the alpha seeds inside the signed 16-bit range.
constexpr double kEnvelopePeak = 30000.0;

std::vector<double> rescale(std::span<const std::int32_t> s, double factor) {
    std::vector<double> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        out[i] = static_cast<double>(s[i]) * factor;
    return out;
}

} // namespace

void StirapConfig::validate() const {
    require(pulse_length > 0.0 && std::isfinite(pulse_length), "pulse_length must be positive");
    require(delay_fraction > 0.0 && delay_fraction < 1.0, "delay_fraction must be in (0, 1)");
    require(peak_rabi > 0.0 && std::isfinite(peak_rabi), "peak_rabi must be positive");
    require(std::isfinite(detuning), "detuning must be finite");
    require(sample_rate > 0.0 && std::isfinite(sample_rate), "sample_rate must be positive");
    require(substeps >= 1, "substeps must be >= 1");
    require(envelope_samples() >= 8, "pulse_length * sample_rate is too short");
}

std::size_t StirapConfig::envelope_samples() const {
    return static_cast<std::size_t>(std::llround(pulse_length * sample_rate));
}

std::size_t StirapConfig::gate_samples() const {
    return envelope_samples() +
           static_cast<std::size_t>(std::llround(delay_fraction * pulse_length * sample_rate));
}

nlohmann::json to_json(const StirapConfig& c) {
    return {{"pulse_length", c.pulse_length}, {"delay_fraction", c.delay_fraction},
            {"peak_rabi", c.peak_rabi},       {"detuning", c.detuning},
            {"sample_rate", c.sample_rate},   {"substeps", c.substeps}};
}

StirapConfig stirap_config_from_json(const nlohmann::json& j, StirapConfig c) {
    require(j.is_object(), "stirap config must be a JSON object");
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "pulse_length") c.pulse_length = v.get<double>();
            else if (key == "delay_fraction") c.delay_fraction = v.get<double>();
            else if (key == "peak_rabi") c.peak_rabi = v.get<double>();
            else if (key == "detuning") c.detuning = v.get<double>();
            else if (key == "sample_rate") c.sample_rate = v.get<double>();
            else if (key == "substeps") c.substeps = v.get<int>();
            else fail(ErrorKind::InvalidArgument, "unknown stirap option '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::InvalidArgument, std::string("stirap config: ") + e.what());
    }
    c.validate();
    return c;
}

Eigen::Matrix3cd build_hamiltonian(double omega1, double omega2, double detuning) {
    const double w1 = kTwoPi * omega1, w2 = kTwoPi * omega2, d = kTwoPi * detuning;
    Eigen::Matrix3cd h = Eigen::Matrix3cd::Zero();
    h(0, 2) = h(2, 0) = -0.5 * w1;
    h(1, 2) = h(2, 1) = -0.5 * w2;
    h(2, 2) = d;
    return h;
}

State dark_state(double omega1, double omega2) {
    if (omega1 == 0.0 && omega2 == 0.0)
        fail(ErrorKind::UndefinedState, "dark state is undefined when both Rabi frequencies are zero");
    const double phi = std::atan2(omega1, omega2);
    return State(std::cos(phi), -std::sin(phi), 0.0);
}

TransferResult simulate_transfer(const StirapConfig& cfg, std::span<const double> env1,
                                 std::span<const double> env2) {
    return simulate_transfer(cfg, env1, env2, State(0.0, 1.0, 0.0));
}

TransferResult simulate_transfer(const StirapConfig& cfg, std::span<const double> env1,
                                 std::span<const double> env2, const State& initial) {
    cfg.validate();
    require(env1.size() == env2.size(), "simulate_transfer: envelope lengths differ");
    require(env1.size() == cfg.gate_samples(),
            "simulate_transfer: envelopes must have " + std::to_string(cfg.gate_samples()) +
                " samples (gate time * sample rate)");
    const double dt = 1.0 / (cfg.sample_rate * cfg.substeps);
    const double d = kTwoPi * cfg.detuning;

    // H is real symmetric, so exp(-i H dt) = V diag(exp(-i l dt)) V^T.
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es;
    State psi = initial;
    for (std::size_t k = 0; k < env1.size(); ++k) {
        Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
        h(0, 2) = h(2, 0) = -0.5 * kTwoPi * env1[k];
        h(1, 2) = h(2, 1) = -0.5 * kTwoPi * env2[k];
        h(2, 2) = d;
        es.computeDirect(h);
        if (es.info() != Eigen::Success)
            fail(ErrorKind::Integrator, "eigendecomposition failed at sample " + std::to_string(k));
        const Eigen::Matrix3d& v = es.eigenvectors();
        Eigen::Vector3cd phase;
        for (int i = 0; i < 3; ++i)
            phase(i) = std::polar(1.0, -es.eigenvalues()(i) * dt);
        for (int s = 0; s < cfg.substeps; ++s)
            psi = v * phase.cwiseProduct(v.transpose() * psi).eval();
    }
    TransferResult r;
    r.norm = psi.norm();
    if (!(std::abs(r.norm - initial.norm()) <= 1e-6))
        fail(ErrorKind::Integrator, "norm drifted to " + format_double(r.norm));
    r.fidelity = std::norm(psi(0)) / (initial.squaredNorm());
    r.final_state = psi;
    return r;
}

void place_envelopes(const StirapConfig& cfg, std::span<const double> shape,
                     std::vector<double>& env1, std::vector<double>& env2) {
    require(shape.size() == cfg.envelope_samples(), "place_envelopes: shape length != L * rate");
    const std::size_t gate = cfg.gate_samples();
    const std::size_t offset = gate - shape.size();
    env1.assign(gate, 0.0);
    env2.assign(gate, 0.0);
    std::copy(shape.begin(), shape.end(), env1.begin());
    std::copy(shape.begin(), shape.end(), env2.begin() + static_cast<std::ptrdiff_t>(offset));
}

std::vector<BenchRow> run_benchmark(const StirapConfig& cfg,
                                    std::span<const std::size_t> segment_counts,
                                    const FixedPointFormat& fmt, const QaFitOptions& opts) {
    cfg.validate();
    fmt.validate();
    QaFitOptions qa_opts = opts;
    qa_opts.symmetry = SymmetryMode::Off;

    const std::size_t len = cfg.envelope_samples();
    const Pulse window = gen_blackman(len, kEnvelopePeak, cfg.sample_rate);
    const double to_hz = cfg.peak_rabi / kEnvelopePeak;
    const std::uint64_t awg_bits = len * kAwgSampleBits;

    struct Job {
        BenchRow row;
        std::vector<double> shape; // Hz
    };
    std::vector<Job> jobs;

    {
        Job exact{{"exact", 0, 0.0, 1.0, 0, 0.0}, {}};
        exact.shape.resize(len);
        for (std::size_t i = 0; i < len; ++i)
            exact.shape[i] = window.samples[i] * to_hz;
        jobs.push_back(std::move(exact));

        Job awg{{"awg", 0, 0.0, 1.0, awg_bits, 1.0}, {}};
        awg.shape.resize(len);
        for (std::size_t i = 0; i < len; ++i)
            awg.shape[i] = std::nearbyint(window.samples[i]) * to_hz;
        jobs.push_back(std::move(awg));
    }

    for (std::size_t segs : segment_counts) {
        const SplineFit fit = fit_float(window, uniform_knots(segs, len));
        const CompressedPulse naive = quantize_naive(fit, fmt, false);
        const QaFitResult qa = quantisation_aware_fit(window, fit, fmt, qa_opts);
        for (const auto& [name, cp] : {std::pair<const char*, const CompressedPulse*>{"float", &naive},
                                       {"qa", &qa.pulse}}) {
            const FootprintReport fr = footprint(*cp, kAwgSampleBits, len);
            Job j{{name, segs, 0.0, 1.0, fr.compressed_bits, fr.ratio},
                  rescale(expand(*cp).samples, to_hz)};
            jobs.push_back(std::move(j));
        }
    }

    const auto nj = static_cast<std::ptrdiff_t>(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t k = 0; k < nj; ++k) {
        auto& job = jobs[static_cast<std::size_t>(k)];
        try {
            std::vector<double> e1, e2;
            place_envelopes(cfg, job.shape, e1, e2);
            const TransferResult r = simulate_transfer(cfg, e1, e2);
            job.row.fidelity = r.fidelity;
            job.row.norm = r.norm;
        } catch (...) {
            errors[static_cast<std::size_t>(k)] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);

    std::vector<BenchRow> rows;
    rows.reserve(jobs.size());
    for (auto& j : jobs)
        rows.push_back(std::move(j.row));
    return rows;
}

std::string benchmark_csv(std::span<const BenchRow> rows) {
    std::ostringstream os;
    os << "# coherent three-level model without scattering; fidelities are upper bounds\n";
    os << "method,segments,fidelity,compressed_bits,ratio\n";
    for (const auto& r : rows)
        os << r.method << ',' << r.segments << ',' << format_double(r.fidelity) << ','
           << r.compressed_bits << ',' << format_double(r.ratio) << '\n';
    return os.str();
}

} // namespace cubicpulse::stirap
