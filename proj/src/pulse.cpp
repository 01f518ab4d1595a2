#include "cubicpulse/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <json.hpp>

#include "cubicpulse/error.hpp"
#include "cubicpulse/io_util.hpp"

namespace cubicpulse {

void Pulse::validate() const {
    require(!samples.empty(), "pulse has no samples");
    require(sample_rate > 0.0 && std::isfinite(sample_rate), "pulse sample_rate must be > 0");
    require(full_scale > 0.0 && std::isfinite(full_scale), "pulse full_scale must be > 0");
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (!std::isfinite(samples[i]))
            fail(ErrorKind::InvalidArgument, "non-finite sample at index " + std::to_string(i));
}

Pulse gen_blackman(std::size_t length, double amplitude, double sample_rate) {
    require(length >= 3, "gen_blackman: length must be >= 3");
    require(std::isfinite(amplitude), "gen_blackman: amplitude must be finite");
    const double denom = static_cast<double>(length - 1);
    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<double> w(length);
    for (std::size_t k = 0; k <= (length - 1) / 2; ++k) {
        const double x = static_cast<double>(k) / denom;
        double v = 0.42 - 0.5 * std::cos(two_pi * x) + 0.08 * std::cos(2.0 * two_pi * x);
        // 0.42 - 0.5 + 0.08 leaves -1.4e-17 at the edges
        v = std::max(v, 0.0);
        w[k] = v;
        w[length - 1 - k] = v;
    }
    if (length % 2 == 1)
        w[length / 2] = 1.0;
    for (auto& v : w)
        v *= amplitude;
    Pulse p{std::move(w), sample_rate, kFullScale16};
    p.validate();
    return p;
}

Pulse gen_gaussian(std::size_t length, double center, double sigma_sq, double amplitude,
                   std::optional<double> carrier_hz, double sample_rate) {
    require(length >= 1, "gen_gaussian: length must be >= 1");
    require(sigma_sq > 0.0, "gen_gaussian: sigma_sq must be > 0");
    require(sample_rate > 0.0, "gen_gaussian: sample_rate must be > 0");
    std::vector<double> y(length);
    for (std::size_t k = 0; k < length; ++k) {
        const double d = static_cast<double>(k) - center;
        double v = amplitude * std::exp(-(d * d) / (2.0 * sigma_sq));
        if (carrier_hz)
            v *= std::sin(2.0 * std::numbers::pi * *carrier_hz * static_cast<double>(k) / sample_rate);
        y[k] = v;
    }
    Pulse p{std::move(y), sample_rate, kFullScale16};
    p.validate();
    return p;
}

Pulse gen_sigmoid(std::size_t length, double steepness, double amplitude, double sample_rate) {
    require(length >= 2, "gen_sigmoid: length must be >= 2");
    require(steepness > 0.0, "gen_sigmoid: steepness must be > 0");
    const double mid = 0.5 * static_cast<double>(length - 1);
    const double span = static_cast<double>(length - 1);
    std::vector<double> y(length);
    for (std::size_t k = 0; k < length; ++k) {
        const double u = (static_cast<double>(k) - mid) / span;
        y[k] = amplitude / (1.0 + std::exp(-steepness * u));
    }
    Pulse p{std::move(y), sample_rate, kFullScale16};
    p.validate();
    return p;
}

Pulse gen_piecewise_quadratic_chirp(std::size_t duration_samples, double f0, double ff,
                                    double sample_rate) {
    require(duration_samples >= 2, "chirp: duration must be >= 2 samples");
    require(std::isfinite(f0) && std::isfinite(ff), "chirp: frequencies must be finite");
    const double tp = static_cast<double>(duration_samples);
    const double curv = 2.0 * (ff - f0) / (tp * tp);
    std::vector<double> y(duration_samples + 1);
    for (std::size_t k = 0; k <= duration_samples; ++k) {
        const double t = static_cast<double>(k);
        y[k] = (t <= 0.5 * tp) ? f0 + curv * t * t : ff - curv * (t - tp) * (t - tp);
    }
    Pulse p{std::move(y), sample_rate, std::max({std::abs(f0), std::abs(ff), 1.0})};
    p.validate();
    return p;
}

double mirror_residual(const Pulse& p) {
    const auto& x = p.samples;
    const std::size_t n = x.size();
    double worst = 0.0;
    for (std::size_t k = 0; k < n / 2; ++k)
        worst = std::max(worst, std::abs(x[k] - x[n - 1 - k]));
    return worst;
}

std::optional<double> detect_symmetry(const Pulse& p, double tol) {
    require(tol >= 0.0, "detect_symmetry: tol must be >= 0");
    p.validate();
    if (mirror_residual(p) <= tol)
        return 0.5 * static_cast<double>(p.size() - 1);
    return std::nullopt;
}

Pulse read_pulse_csv(const std::filesystem::path& path, std::optional<double> sample_rate) {
    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::Io, "cannot open pulse csv " + path.string());
    std::string line;
    if (!std::getline(in, line))
        fail(ErrorKind::Format, path.string() + ": empty file");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != "index,value")
        fail(ErrorKind::Format, path.string() + ": expected header 'index,value'");

    Pulse p;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            fail(ErrorKind::Format, path.string() + ":" + std::to_string(lineno) + ": missing comma");
        std::size_t idx = 0;
        double value = 0.0;
        try {
            idx = std::stoull(line.substr(0, comma));
            value = std::stod(line.substr(comma + 1));
        } catch (const std::exception&) {
            fail(ErrorKind::Format, path.string() + ":" + std::to_string(lineno) + ": bad number");
        }
        if (idx != p.samples.size())
            fail(ErrorKind::Format, path.string() + ":" + std::to_string(lineno) +
                                        ": index out of sequence");
        p.samples.push_back(value);
    }

    if (sample_rate) {
        p.sample_rate = *sample_rate;
    } else {
        auto sidecar = path;
        sidecar += ".json";
        if (std::filesystem::exists(sidecar)) {
            try {
                const auto j = nlohmann::json::parse(read_text_file(sidecar));
                p.sample_rate = j.at("sample_rate").get<double>();
                if (j.contains("full_scale"))
                    p.full_scale = j.at("full_scale").get<double>();
            } catch (const nlohmann::json::exception& e) {
                fail(ErrorKind::Format, sidecar.string() + ": " + e.what());
            }
        }
    }
    try {
        p.validate();
    } catch (const Error& e) {
        fail(ErrorKind::Format, path.string() + ": " + e.what());
    }
    return p;
}

void write_pulse_csv(const std::filesystem::path& path, const Pulse& p, bool write_sidecar) {
    std::ostringstream out;
    out << "index,value\n";
    for (std::size_t i = 0; i < p.samples.size(); ++i)
        out << i << ',' << format_double(p.samples[i]) << '\n';
    write_file_atomic(path, out.str());
    if (write_sidecar) {
        nlohmann::json j{{"sample_rate", p.sample_rate}, {"full_scale", p.full_scale}};
        auto sidecar = path;
        sidecar += ".json";
        write_file_atomic(sidecar, j.dump(2) + "\n");
    }
}

} // namespace cubicpulse
