#include "cubicpulse/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "cubicpulse/cps.hpp"
#include "cubicpulse/error.hpp"
#include "cubicpulse/io_util.hpp"
#include "cubicpulse/metrics.hpp"
#include "cubicpulse/pulse.hpp"
#include "cubicpulse/qafit.hpp"
#include "cubicpulse/spline.hpp"
#include "cubicpulse/stirap.hpp"

namespace cubicpulse::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int exit_code_for(ErrorKind k) {
    switch (k) {
    case ErrorKind::InvalidArgument: return kExitUsage;
    case ErrorKind::Format:
    case ErrorKind::Io: return kExitFormat;
    case ErrorKind::FitFailure:
    case ErrorKind::Range:
    case ErrorKind::Overflow:
    case ErrorKind::Integrator:
    case ErrorKind::UndefinedState: return kExitNumeric;
    }
    return kExitInternal;
}

void emit_error(std::ostream& err, std::string_view kind, const std::string& message, int code) {
    err << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << '\n';
}

// ---- generators -----------------------------------------------------------

json generator_defaults(const std::string& kind) {
    if (kind == "gaussian")
        return {{"kind", kind}, {"length", 30000}, {"center", 15000.0}, {"sigma_sq", 8e6},
                {"amplitude", 32767.0}, {"sample_rate", 1e9}};
    if (kind == "blackman")
        return {{"kind", kind}, {"length", 20000}, {"amplitude", 30000.0}, {"sample_rate", 1e9}};
    if (kind == "sigmoid")
        return {{"kind", kind}, {"length", 30000}, {"steepness", 12.0}, {"amplitude", 30000.0},
                {"sample_rate", 1e9}};
    if (kind == "chirp")
        return {{"kind", kind}, {"duration", 31000}, {"f0", 0.0}, {"ff", 1e6},
                {"sample_rate", 1e9}};
    if (kind == "constant")
        return {{"kind", kind}, {"length", 1000}, {"value", 1000.0}, {"sample_rate", 1e9}};
    fail(ErrorKind::InvalidArgument,
         "unknown generator '" + kind + "' (gaussian, blackman, sigmoid, chirp, constant)");
}

// Fills in defaults and rejects unknown keys, so the manifest echoes every value.
json resolve_generator(const json& spec) {
    require(spec.is_object() && spec.contains("kind") && spec["kind"].is_string(),
            "generator needs a string 'kind'");
    json g = generator_defaults(spec["kind"].get<std::string>());
    for (const auto& [k, v] : spec.items()) {
        if (k == "carrier_hz" && spec["kind"] == "gaussian") {
            g[k] = v;
            continue;
        }
        require(g.contains(k), "generator '" + g["kind"].get<std::string>() +
                                   "' has no parameter '" + k + "'");
        g[k] = v;
    }
    return g;
}

// "gaussian:length=30000,sigma_sq=8e6" -> {"kind": "gaussian", ...}
json parse_generator_spec(const std::string& text) {
    json spec;
    const auto colon = text.find(':');
    spec["kind"] = text.substr(0, colon);
    if (colon != std::string::npos) {
        std::stringstream ss(text.substr(colon + 1));
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.empty())
                continue;
            const auto eq = item.find('=');
            require(eq != std::string::npos, "generator parameter '" + item + "' needs key=value");
            const std::string key = item.substr(0, eq);
            const std::string val = item.substr(eq + 1);
            std::size_t used = 0;
            double d = 0.0;
            try {
                d = std::stod(val, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            require(used == val.size() && !val.empty(),
                    "generator parameter '" + key + "' is not a number: '" + val + "'");
            spec[key] = d;
        }
    }
    return resolve_generator(spec);
}

std::size_t as_count(const json& v, const char* name) {
    const double d = v.get<double>();
    require(d >= 0.0 && d == std::floor(d), std::string(name) + " must be a non-negative integer");
    return static_cast<std::size_t>(d);
}

Pulse generate(const json& g) {
    const std::string kind = g.at("kind").get<std::string>();
    const double rate = g.at("sample_rate").get<double>();
    if (kind == "gaussian") {
        std::optional<double> carrier;
        if (g.contains("carrier_hz"))
            carrier = g["carrier_hz"].get<double>();
        return gen_gaussian(as_count(g["length"], "length"), g["center"].get<double>(),
                            g["sigma_sq"].get<double>(), g["amplitude"].get<double>(), carrier,
                            rate);
    }
    if (kind == "blackman")
        return gen_blackman(as_count(g["length"], "length"), g["amplitude"].get<double>(), rate);
    if (kind == "sigmoid")
        return gen_sigmoid(as_count(g["length"], "length"), g["steepness"].get<double>(),
                           g["amplitude"].get<double>(), rate);
    if (kind == "chirp")
        return gen_piecewise_quadratic_chirp(as_count(g["duration"], "duration"),
                                             g["f0"].get<double>(), g["ff"].get<double>(), rate);
    const std::size_t n = as_count(g["length"], "length");
    require(n >= 1, "constant generator needs length >= 1");
    Pulse p{std::vector<double>(n, g["value"].get<double>()), rate, kFullScale16};
    p.validate();
    return p;
}

// ---- config plumbing ------------------------------------------------------

json load_config(const std::string& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        fail(ErrorKind::Format, "config " + path + ": " + e.what());
    }
    // A manifest can stand in for a config.
    if (j.is_object() && j.contains("manifest_version") && j.contains("config"))
        j = j["config"];
    require(j.is_object(), "config " + path + " must be a JSON object");
    return j;
}

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const char* where) {
    for (const auto& [k, v] : j.items())
        if (std::none_of(keys.begin(), keys.end(), [&](const char* s) { return k == s; }))
            fail(ErrorKind::InvalidArgument, std::string("unknown key '") + k + "' in " + where);
}

struct FormatFlags {
    std::optional<int> word_bits, frac_bits, alpha_bits, out_bits;

    void add(CLI::App* app) {
        app->add_option("--word-bits", word_bits, "coefficient word width");
        app->add_option("--frac-bits", frac_bits, "fractional bits");
        app->add_option("--alpha-bits", alpha_bits, "width of the stored alpha");
        app->add_option("--out-bits", out_bits, "output sample width");
    }
    void apply(json& f) const {
        if (word_bits) f["word_bits"] = *word_bits;
        if (frac_bits) f["frac_bits"] = *frac_bits;
        if (alpha_bits) f["alpha_bits"] = *alpha_bits;
        if (out_bits) f["out_bits"] = *out_bits;
    }
};

json manifest(const std::string& sub, const json& config, const json& inputs, const json& outputs,
              std::uint64_t seed) {
    return {{"manifest_version", 1}, {"tool", "cubicpulse"},   {"tool_version", kToolVersion},
            {"subcommand", sub},     {"config", config},       {"inputs", inputs},
            {"outputs", outputs},    {"rng_seed", seed}};
}

void write_json(const fs::path& path, const json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

fs::path sibling(const fs::path& p, const std::string& suffix) {
    return fs::path(p.string() + suffix);
}

double sse(std::span<const double> target, std::span<const std::int32_t> out) {
    double s = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        const double d = target[i] - static_cast<double>(out[i]);
        s += d * d;
    }
    return s;
}

std::vector<double> as_double(std::span<const std::int32_t> s) {
    return {s.begin(), s.end()};
}

json segments_json(const CompressedPulse& cp) {
    json a = json::array();
    for (const auto& s : cp.segments)
        a.push_back({{"n_samples", s.n_samples}, {"alpha_raw", s.alpha_raw},
                     {"beta_raw", s.beta_raw},   {"gamma_raw", s.gamma_raw},
                     {"delta_raw", s.delta_raw}});
    return a;
}

// ---- compress -------------------------------------------------------------

struct CompressArgs {
    std::string config_path;
    std::optional<std::string> input, generate, output, report, manifest_path;
    std::optional<std::size_t> segments;
    std::optional<int> continuity;
    std::optional<std::string> symmetry;
    std::optional<std::uint64_t> seed;
    std::optional<double> carrier_hz, sample_rate;
    bool qa_fit = false;
    bool optimize_knots = false;
    FormatFlags fmt;
};

json resolve_compress(const CompressArgs& a) {
    json c = a.config_path.empty() ? json::object() : load_config(a.config_path);
    reject_unknown(c,
                   {"input", "generator", "sample_rate", "segments", "continuity_order",
                    "optimize_knots", "knot_iterations", "format", "qa_fit", "qa", "carrier_hz",
                    "output", "report", "manifest"},
                   "compress config");
    if (a.input) {
        c["input"] = *a.input;
        c.erase("generator");
    }
    if (a.generate) {
        c["generator"] = parse_generator_spec(*a.generate);
        c.erase("input");
    } else if (c.contains("generator") && !c["generator"].is_null()) {
        c["generator"] = resolve_generator(c["generator"]);
    }
    const bool has_input = c.contains("input") && !c["input"].is_null();
    const bool has_gen = c.contains("generator") && !c["generator"].is_null();
    if (has_input == has_gen)
        throw UsageError("compress needs exactly one of --input or --generate");
    if (!has_input)
        c["input"] = nullptr;
    if (!has_gen)
        c["generator"] = nullptr;

    if (a.sample_rate) c["sample_rate"] = *a.sample_rate;
    if (!c.contains("sample_rate")) c["sample_rate"] = nullptr;
    if (a.segments) c["segments"] = *a.segments;
    if (!c.contains("segments")) throw UsageError("compress needs --segments");
    if (a.continuity) c["continuity_order"] = *a.continuity;
    if (!c.contains("continuity_order")) c["continuity_order"] = 1;
    if (a.optimize_knots) c["optimize_knots"] = true;
    if (!c.contains("optimize_knots")) c["optimize_knots"] = false;
    if (!c.contains("knot_iterations")) c["knot_iterations"] = 50;
    if (a.qa_fit) c["qa_fit"] = true;
    if (!c.contains("qa_fit")) c["qa_fit"] = false;
    if (a.carrier_hz) c["carrier_hz"] = *a.carrier_hz;
    if (!c.contains("carrier_hz")) c["carrier_hz"] = nullptr;

    json f = c.contains("format") ? c["format"] : json::object();
    a.fmt.apply(f);
    c["format"] = to_json(format_from_json(f));

    QaFitOptions qa = qa_options_from_json(c.contains("qa") ? c["qa"] : json::object());
    if (a.symmetry) qa.symmetry = parse_symmetry_mode(*a.symmetry);
    if (a.seed) qa.rng_seed = *a.seed;
    c["qa"] = to_json(qa);

    if (a.output) c["output"] = *a.output;
    if (!c.contains("output")) throw UsageError("compress needs --output");
    const fs::path out = c["output"].get<std::string>();
    if (a.report) c["report"] = *a.report;
    if (!c.contains("report")) c["report"] = sibling(out, ".report.json").string();
    if (a.manifest_path) c["manifest"] = *a.manifest_path;
    if (!c.contains("manifest")) c["manifest"] = sibling(out, ".manifest.json").string();
    return c;
}

int cmd_compress(const CompressArgs& a, std::ostream& out) {
    const json c = resolve_compress(a);

    std::optional<double> rate;
    if (!c["sample_rate"].is_null())
        rate = c["sample_rate"].get<double>();
    Pulse p = c["input"].is_null() ? generate(c["generator"]) : read_pulse_csv(c["input"].get<std::string>(), rate);
    if (rate)
        p.sample_rate = *rate;

    const auto segs = c["segments"].get<std::size_t>();
    const int order = c["continuity_order"].get<int>();
    const FixedPointFormat fmt = format_from_json(c["format"]);
    const QaFitOptions qa_opts = qa_options_from_json(c["qa"]);

    KnotPartition part = uniform_knots(segs, p.size());
    if (c["optimize_knots"].get<bool>())
        part = optimize_knots_local(p, part, c["knot_iterations"].get<int>(), order);
    const SplineFit fit = fit_float(p, part, order);
    const bool symmetric = resolve_symmetry(p, part, qa_opts.symmetry, qa_opts.symmetry_tol);

    const CompressedPulse naive = quantize_naive(fit, fmt, symmetric);
    const DecompressResult naive_out = expand(naive);

    json report;
    report["stage_one"] = to_json(fit);
    report["symmetric"] = symmetric;
    report["naive"] = {{"error", to_json(time_domain_error(p, naive_out.samples))},
                       {"cost", sse(p.samples, naive_out.samples)},
                       {"clamped", naive_out.clamped}};

    const CompressedPulse* chosen = &naive;
    std::optional<QaFitResult> qa;
    DecompressResult qa_out;
    if (c["qa_fit"].get<bool>()) {
        qa = quantisation_aware_fit(p, fit, fmt, qa_opts);
        qa_out = expand(qa->pulse);
        const ErrorReport qe = time_domain_error(p, qa_out.samples);
        std::size_t evals = 0;
        for (const auto& s : qa->segments)
            evals += s.evaluations;
        report["qa"] = {{"error", to_json(qe)},
                        {"cost", sse(p.samples, qa_out.samples)},
                        {"clamped", qa_out.clamped},
                        {"seed_segment_cost", qa->seed_cost()},
                        {"optimized_segment_cost", qa->optimized_cost()},
                        {"evaluations", evals},
                        {"seed_segments", segments_json(naive)},
                        {"optimized_segments", segments_json(qa->pulse)}};
        const double nm = report["naive"]["error"]["max_abs"].get<double>();
        report["max_error_reduction"] = qe.max_abs > 0.0 ? json(nm / qe.max_abs) : json(nullptr);
        chosen = &qa->pulse;
    }
    const DecompressResult& chosen_out = qa ? qa_out : naive_out;
    report["cost"] = sse(p.samples, chosen_out.samples);

    if (!c["carrier_hz"].is_null()) {
        const double f = c["carrier_hz"].get<double>();
        const auto ref = dds_modulate(p.samples, f, p.sample_rate);
        const auto sn = spectrum_error(ref, dds_modulate(as_double(naive_out.samples), f, p.sample_rate),
                                       p.sample_rate);
        report["naive"]["spectrum"] = summary_json(sn);
        if (qa) {
            const auto sq = spectrum_error(
                ref, dds_modulate(as_double(qa_out.samples), f, p.sample_rate), p.sample_rate);
            report["qa"]["spectrum"] = summary_json(sq);
        }
    }
    report["footprint"] = to_json(footprint(*chosen, 16, p.size()));
    report["footprint_with_header"] = to_json(footprint(*chosen, 16, p.size(), true));

    const fs::path out_path = c["output"].get<std::string>();
    write_cps(out_path, *chosen);
    write_json(c["report"].get<std::string>(), report);
    json inputs = c["input"].is_null() ? json::array() : json::array({c["input"]});
    write_json(c["manifest"].get<std::string>(),
               manifest("compress", c, inputs, json::array({c["output"], c["report"]}), qa_opts.rng_seed));

    out << json{{"output", c["output"]},
                {"report", c["report"]},
                {"manifest", c["manifest"]},
                {"cost", report["cost"]},
                {"symmetric", symmetric}}
               .dump()
        << '\n';
    return kExitOk;
}

// ---- decompress -----------------------------------------------------------

struct DecompressArgs {
    std::string config_path;
    std::optional<std::string> input, output, manifest_path;
};

int cmd_decompress(const DecompressArgs& a, std::ostream& out) {
    json c = a.config_path.empty() ? json::object() : load_config(a.config_path);
    reject_unknown(c, {"input", "output", "manifest"}, "decompress config");
    if (a.input) c["input"] = *a.input;
    if (a.output) c["output"] = *a.output;
    if (!c.contains("input")) throw UsageError("decompress needs an input .cps file");
    if (!c.contains("output")) throw UsageError("decompress needs --output");
    if (a.manifest_path) c["manifest"] = *a.manifest_path;
    if (!c.contains("manifest"))
        c["manifest"] = sibling(c["output"].get<std::string>(), ".manifest.json").string();

    const CompressedPulse cp = read_cps(c["input"].get<std::string>());
    const DecompressResult r = expand(cp);
    std::ostringstream os;
    os << "index,value\n";
    for (std::size_t i = 0; i < r.samples.size(); ++i)
        os << i << ',' << r.samples[i] << '\n';
    write_file_atomic(c["output"].get<std::string>(), os.str());
    write_json(c["manifest"].get<std::string>(),
               manifest("decompress", c, json::array({c["input"]}), json::array({c["output"]}), 0));
    out << json{{"output", c["output"]}, {"samples", r.samples.size()}, {"clamped", r.clamped}}.dump()
        << '\n';
    return kExitOk;
}

// ---- bench ----------------------------------------------------------------

struct BenchArgs {
    std::string name;
    std::string config_path;
    std::optional<std::string> output, manifest_path;
    std::optional<std::uint64_t> seed;
    std::vector<std::size_t> segment_counts;
    FormatFlags fmt;
};

std::vector<std::size_t> counts_from(const json& j) {
    std::vector<std::size_t> v;
    for (const auto& e : j)
        v.push_back(as_count(e, "segment count"));
    require(!v.empty(), "segment_counts must not be empty");
    return v;
}

std::string stirap_bench(json& c, const BenchArgs& a) {
    reject_unknown(c, {"stirap", "segment_counts", "format", "qa", "output", "manifest"},
                   "stirap bench config");
    c["stirap"] = stirap::to_json(
        stirap::stirap_config_from_json(c.contains("stirap") ? c["stirap"] : json::object()));
    if (!a.segment_counts.empty()) c["segment_counts"] = a.segment_counts;
    if (!c.contains("segment_counts"))
        c["segment_counts"] = std::vector<std::size_t>{2, 4, 6, 8, 10, 12, 14, 16, 20, 24, 30};
    const auto counts = counts_from(c["segment_counts"]);
    const auto cfg = stirap::stirap_config_from_json(c["stirap"]);
    const auto rows = stirap::run_benchmark(cfg, counts, format_from_json(c["format"]),
                                            qa_options_from_json(c["qa"]));
    return stirap::benchmark_csv(rows);
}

std::string width_sweep_bench(json& c) {
    reject_unknown(c, {"generator", "segments", "segment_index", "frac_bits", "integer_bits",
                       "format", "qa", "output", "manifest"},
                   "width-sweep bench config");
    c["generator"] = resolve_generator(c.contains("generator") ? c["generator"]
                                                               : json{{"kind", "gaussian"}});
    if (!c.contains("segments")) c["segments"] = 7;
    if (!c.contains("segment_index")) c["segment_index"] = 3;
    if (!c.contains("integer_bits")) c["integer_bits"] = 16;
    if (!c.contains("frac_bits"))
        c["frac_bits"] = std::vector<int>{8, 12, 16, 20, 24, 28, 32};

    const Pulse p = generate(c["generator"]);
    const SplineFit fit = fit_float(p, uniform_knots(c["segments"].get<std::size_t>(), p.size()));
    const auto idx = c["segment_index"].get<std::size_t>();
    require(idx < fit.polys.size(), "segment_index out of range");
    const int ib = c["integer_bits"].get<int>();
    std::vector<std::pair<int, int>> widths;
    for (const auto& f : c["frac_bits"])
        widths.emplace_back(f.get<int>() + ib, f.get<int>());
    const auto rows = sweep_quantization_width(
        to_bowler(fit.polys[idx]), static_cast<std::uint32_t>(fit.partition.segment_length(idx)),
        widths, format_from_json(c["format"]));

    std::ostringstream os;
    os << "word_bits,frac_bits,max_abs_error,error\n";
    for (const auto& r : rows)
        os << r.word_bits << ',' << r.frac_bits << ','
           << (r.max_abs_error ? format_double(*r.max_abs_error) : std::string()) << ','
           << r.error << '\n';
    return os.str();
}

std::string corpus_bench(json& c) {
    reject_unknown(c, {"length", "amplitude", "sigmoid_steepness", "segment_counts", "format",
                       "qa", "output", "manifest"},
                   "corpus bench config");
    if (!c.contains("length")) c["length"] = 30000;
    if (!c.contains("amplitude")) c["amplitude"] = 30000.0;
    if (!c.contains("sigmoid_steepness")) c["sigmoid_steepness"] = 12.0;
    if (!c.contains("segment_counts"))
        c["segment_counts"] = std::vector<std::size_t>{4, 6, 8, 10, 12, 16, 20};
    const auto counts = counts_from(c["segment_counts"]);
    const auto len = as_count(c["length"], "length");
    const double amp = c["amplitude"].get<double>();
    const FixedPointFormat fmt = format_from_json(c["format"]);
    QaFitOptions opts = qa_options_from_json(c["qa"]);
    opts.symmetry = SymmetryMode::Off;
    c["qa"] = to_json(opts);

    const std::pair<const char*, Pulse> shapes[] = {
        {"gaussian", gen_gaussian(len, static_cast<double>(len) / 2.0,
                                  8e6 * std::pow(static_cast<double>(len) / 30000.0, 2), amp,
                                  std::nullopt)},
        {"blackman", gen_blackman(len, amp)},
        {"sigmoid", gen_sigmoid(len, c["sigmoid_steepness"].get<double>(), amp)},
    };
    std::ostringstream os;
    os << "shape,segments,naive_mean_abs,naive_max_abs,qa_mean_abs,qa_max_abs\n";
    for (const auto& [name, p] : shapes) {
        for (std::size_t segs : counts) {
            const SplineFit fit = fit_float(p, uniform_knots(segs, p.size()));
            const auto en = time_domain_error(p, expand(quantize_naive(fit, fmt, false)).samples);
            const auto eq =
                time_domain_error(p, expand(quantisation_aware_fit(p, fit, fmt, opts).pulse).samples);
            os << name << ',' << segs << ',' << format_double(en.mean_abs) << ','
               << format_double(en.max_abs) << ',' << format_double(eq.mean_abs) << ','
               << format_double(eq.max_abs) << '\n';
        }
    }
    return os.str();
}

int cmd_bench(const BenchArgs& a, std::ostream& out) {
    json c = a.config_path.empty() ? json::object() : load_config(a.config_path);
    json f = c.contains("format") ? c["format"] : json::object();
    a.fmt.apply(f);
    c["format"] = to_json(format_from_json(f));
    QaFitOptions qa = qa_options_from_json(c.contains("qa") ? c["qa"] : json::object());
    if (a.seed) qa.rng_seed = *a.seed;
    c["qa"] = to_json(qa);
    if (a.output) c["output"] = *a.output;
    if (!c.contains("output")) c["output"] = a.name + ".csv";
    if (a.manifest_path) c["manifest"] = *a.manifest_path;
    if (!c.contains("manifest"))
        c["manifest"] = sibling(c["output"].get<std::string>(), ".manifest.json").string();

    std::string csv;
    if (a.name == "stirap") {
        csv = stirap_bench(c, a);
    } else if (a.name == "width-sweep") {
        csv = width_sweep_bench(c);
    } else if (a.name == "corpus") {
        csv = corpus_bench(c);
    } else {
        throw UsageError("unknown benchmark '" + a.name + "' (stirap, width-sweep, corpus)");
    }
    write_file_atomic(c["output"].get<std::string>(), csv);
    json m = manifest("bench", c, json::array(), json::array({c["output"]}), qa.rng_seed);
    m["benchmark"] = a.name;
    write_json(c["manifest"].get<std::string>(), m);
    out << json{{"benchmark", a.name}, {"output", c["output"]}, {"manifest", c["manifest"]}}.dump()
        << '\n';
    return kExitOk;
}

} // namespace

json to_json(const FixedPointFormat& f) {
    return {{"word_bits", f.word_bits}, {"frac_bits", f.frac_bits}, {"alpha_bits", f.alpha_bits},
            {"out_bits", f.out_bits},   {"acc_bits", f.acc_bits}};
}

FixedPointFormat format_from_json(const json& j, FixedPointFormat f) {
    require(j.is_object(), "format must be a JSON object");
    try {
        for (const auto& [k, v] : j.items()) {
            if (k == "word_bits") f.word_bits = v.get<int>();
            else if (k == "frac_bits") f.frac_bits = v.get<int>();
            else if (k == "alpha_bits") f.alpha_bits = v.get<int>();
            else if (k == "out_bits") f.out_bits = v.get<int>();
            else if (k == "acc_bits") f.acc_bits = v.get<int>();
            else fail(ErrorKind::InvalidArgument, "unknown format key '" + k + "'");
        }
    } catch (const json::exception& e) {
        fail(ErrorKind::InvalidArgument, std::string("format: ") + e.what());
    }
    // A wider word needs a wider accumulator; follow it unless acc_bits was given.
    if (!j.contains("acc_bits"))
        f.acc_bits = std::max(f.acc_bits, f.word_bits + 12);
    f.validate();
    return f;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Piecewise cubic pulse compression with bit-exact fixed-point emulation",
                 "cubicpulse"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    CompressArgs ca;
    auto* compress = app.add_subcommand("compress", "fit, quantise and write a .cps file");
    compress->add_option("--input,-i", ca.input, "pulse CSV (index,value)");
    compress->add_option("--generate", ca.generate,
                         "generator spec, e.g. gaussian:length=30000,sigma_sq=8e6");
    compress->add_option("--output,-o", ca.output, "output .cps path");
    compress->add_option("--report", ca.report, "JSON report path");
    compress->add_option("--manifest", ca.manifest_path, "manifest path");
    compress->add_option("--segments", ca.segments, "number of cubic segments");
    compress->add_option("--continuity", ca.continuity, "continuity order at knots (0, 1, 2)");
    compress->add_option("--symmetry", ca.symmetry, "auto, on or off");
    compress->add_option("--seed", ca.seed, "random seed of the quantisation-aware search");
    compress->add_option("--carrier-hz", ca.carrier_hz, "add a modulated spectrum comparison");
    compress->add_option("--sample-rate", ca.sample_rate, "sample rate of the input in Hz");
    compress->add_option("--config", ca.config_path, "JSON config or manifest");
    compress->add_flag("--qa-fit", ca.qa_fit, "run the quantisation-aware second stage");
    compress->add_flag("--optimize-knots", ca.optimize_knots, "local search over knot positions");
    ca.fmt.add(compress);

    DecompressArgs da;
    auto* decompress = app.add_subcommand("decompress", "emulate the hardware and write samples");
    decompress->add_option("input", da.input, ".cps file");
    decompress->add_option("--output,-o", da.output, "output CSV path");
    decompress->add_option("--manifest", da.manifest_path, "manifest path");
    decompress->add_option("--config", da.config_path, "JSON config or manifest");

    BenchArgs ba;
    auto* bench = app.add_subcommand("bench", "stirap, width-sweep or corpus");
    bench->add_option("name", ba.name, "benchmark name")->required();
    bench->add_option("--config", ba.config_path, "JSON config or manifest");
    bench->add_option("--output,-o", ba.output, "CSV path");
    bench->add_option("--manifest", ba.manifest_path, "manifest path");
    bench->add_option("--seed", ba.seed, "random seed of the quantisation-aware search");
    bench->add_option("--segments", ba.segment_counts, "segment counts")->delimiter(',');
    ba.fmt.add(bench);

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        emit_error(err, "usage", e.what(), kExitUsage);
        return kExitUsage;
    }

    try {
        if (compress->parsed())
            return cmd_compress(ca, out);
        if (decompress->parsed())
            return cmd_decompress(da, out);
        return cmd_bench(ba, out);
    } catch (const UsageError& e) {
        emit_error(err, "usage", e.what(), kExitUsage);
        return kExitUsage;
    } catch (const Error& e) {
        const int code = exit_code_for(e.kind());
        emit_error(err, to_string(e.kind()), e.what(), code);
        return code;
    } catch (const json::exception& e) {
        emit_error(err, "invalid-argument", std::string("config: ") + e.what(), kExitUsage);
        return kExitUsage;
    } catch (const std::exception& e) {
        emit_error(err, "internal", e.what(), kExitInternal);
        return kExitInternal;
    }
}

} // namespace cubicpulse::cli
