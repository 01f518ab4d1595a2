#include "cubicpulse/qafit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <numeric>

#include "cubicpulse/error.hpp"
#include "cubicpulse/kernels.hpp"
#include "cubicpulse/rng.hpp"

namespace cubicpulse {

namespace {

using Genome = std::array<std::int64_t, 3>; // beta, gamma, delta raws

QuantizedSegment with_genome(QuantizedSegment base, const Genome& g) {
    base.beta_raw = g[0];
    base.gamma_raw = g[1];
    base.delta_raw = g[2];
    return base;
}

} // namespace

std::string to_string(SymmetryMode m) {
    switch (m) {
    case SymmetryMode::Auto: return "auto";
    case SymmetryMode::On: return "on";
    case SymmetryMode::Off: return "off";
    }
    return "auto";
}

SymmetryMode parse_symmetry_mode(const std::string& s) {
    if (s == "auto")
        return SymmetryMode::Auto;
    if (s == "on")
        return SymmetryMode::On;
    if (s == "off")
        return SymmetryMode::Off;
    fail(ErrorKind::InvalidArgument, "symmetry must be auto, on or off (got '" + s + "')");
}

void QaFitOptions::validate() const {
    require(population_size >= 4, "population_size must be >= 4");
    require(generations >= 1, "generations must be >= 1");
    require(mutation_scale > 0.0 && mutation_scale <= 2.0, "mutation_scale must be in (0, 2]");
    require(crossover_rate >= 0.0 && crossover_rate <= 1.0, "crossover_rate must be in [0, 1]");
    require(radius_beta >= 0 && radius_gamma >= 0 && radius_delta >= 0,
            "search radii must be >= 0");
    require(max_error_weight >= 0.0 && max_error_weight <= 1.0,
            "max_error_weight must be in [0, 1]");
    require(symmetry_tol >= 0.0, "symmetry_tol must be >= 0");
}

nlohmann::json to_json(const QaFitOptions& o) {
    return {{"population_size", o.population_size},
            {"generations", o.generations},
            {"mutation_scale", o.mutation_scale},
            {"crossover_rate", o.crossover_rate},
            {"radius_beta", o.radius_beta},
            {"radius_gamma", o.radius_gamma},
            {"radius_delta", o.radius_delta},
            {"rng_seed", o.rng_seed},
            {"max_error_weight", o.max_error_weight},
            {"symmetry", to_string(o.symmetry)},
            {"symmetry_tol", o.symmetry_tol}};
}

QaFitOptions qa_options_from_json(const nlohmann::json& j, QaFitOptions o) {
    require(j.is_object(), "qa options must be a JSON object");
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "population_size") o.population_size = v.get<int>();
            else if (key == "generations") o.generations = v.get<int>();
            else if (key == "mutation_scale") o.mutation_scale = v.get<double>();
            else if (key == "crossover_rate") o.crossover_rate = v.get<double>();
            else if (key == "radius_beta") o.radius_beta = v.get<std::int64_t>();
            else if (key == "radius_gamma") o.radius_gamma = v.get<std::int64_t>();
            else if (key == "radius_delta") o.radius_delta = v.get<std::int64_t>();
            else if (key == "rng_seed") o.rng_seed = v.get<std::uint64_t>();
            else if (key == "max_error_weight") o.max_error_weight = v.get<double>();
            else if (key == "symmetry") o.symmetry = parse_symmetry_mode(v.get<std::string>());
            else if (key == "symmetry_tol") o.symmetry_tol = v.get<double>();
            else fail(ErrorKind::InvalidArgument, "unknown qa option '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::InvalidArgument, std::string("qa options: ") + e.what());
    }
    o.validate();
    return o;
}

double segment_cost(std::span<const double> target, const QuantizedSegment& candidate,
                    const FixedPointFormat& fmt, double max_error_weight) {
    require(target.size() == candidate.n_samples, "segment_cost: target length != n_samples");
    std::vector<std::int64_t> out(target.size());
    kernels::segment_outputs(candidate, fmt, out);
    return kernels::cost_from_outputs(target, out, max_error_weight);
}

QaSegmentResult optimize_segment(std::span<const double> target, const BowlerCoeffs& seed,
                                 const FixedPointFormat& fmt, const QaFitOptions& opts,
                                 std::uint64_t stream) {
    opts.validate();
    require(!target.empty(), "optimize_segment: empty target");
    const auto n = static_cast<std::uint32_t>(target.size());
    const QuantizedSegment base = quantize_segment(seed, fmt, n).segment;

    const Genome centre{base.beta_raw, base.gamma_raw, base.delta_raw};
    const std::array<std::int64_t, 3> radius{opts.radius_beta, opts.radius_gamma,
                                             opts.radius_delta};
    Genome lo, hi;
    for (int d = 0; d < 3; ++d) {
        lo[d] = std::max(centre[d] - radius[d], signed_min(fmt.word_bits));
        hi[d] = std::min(centre[d] + radius[d], signed_max(fmt.word_bits));
    }

    Rng rng(opts.rng_seed, stream);
    const auto pop_size = static_cast<std::size_t>(opts.population_size);
    std::vector<Genome> pop(pop_size);
    pop[0] = centre;
    for (std::size_t i = 1; i < pop_size; ++i)
        for (int d = 0; d < 3; ++d)
            pop[i][d] = rng.between(lo[d], hi[d]);

    std::vector<QuantizedSegment> cands(pop_size);
    std::vector<double> cost(pop_size);
    for (std::size_t i = 0; i < pop_size; ++i)
        cands[i] = with_genome(base, pop[i]);
    kernels::score_population(cands, target, fmt, opts.max_error_weight, cost);

    QaSegmentResult res;
    res.seed = base;
    res.seed_cost = cost[0];
    res.evaluations = pop_size;

    auto best_index = [&] {
        return static_cast<std::size_t>(std::min_element(cost.begin(), cost.end()) - cost.begin());
    };

    const double f = opts.mutation_scale;
    std::vector<Genome> trial(pop_size);
    std::vector<double> trial_cost(pop_size);
    for (int gen = 0; gen < opts.generations; ++gen) {
        const Genome best = pop[best_index()];
        // DE/current-to-best/1/bin on the integer grid; all draws happen
        // here, serially, so the run is independent of the thread count.
        for (std::size_t i = 0; i < pop_size; ++i) {
            std::size_t r1, r2;
            do r1 = rng.below(pop_size); while (r1 == i);
            do r2 = rng.below(pop_size); while (r2 == i || r2 == r1);
            const auto forced = static_cast<int>(rng.below(3));
            Genome t = pop[i];
            for (int d = 0; d < 3; ++d) {
                const bool cross = rng.uniform() < opts.crossover_rate;
                if (d != forced && !cross)
                    continue;
                const double v = static_cast<double>(pop[i][d]) +
                                 f * static_cast<double>(best[d] - pop[i][d]) +
                                 f * static_cast<double>(pop[r1][d] - pop[r2][d]);
                t[d] = std::clamp(static_cast<std::int64_t>(std::llround(v)), lo[d], hi[d]);
            }
            trial[i] = t;
            cands[i] = with_genome(base, t);
        }
        kernels::score_population(cands, target, fmt, opts.max_error_weight, trial_cost);
        res.evaluations += pop_size;
        for (std::size_t i = 0; i < pop_size; ++i) {
            if (trial_cost[i] <= cost[i]) {
                pop[i] = trial[i];
                cost[i] = trial_cost[i];
            }
        }
    }

    const std::size_t b = best_index();
    res.optimized = with_genome(base, pop[b]);
    res.optimized_cost = cost[b];
    if (res.optimized_cost >= res.seed_cost) {
        res.optimized = base;
        res.optimized_cost = res.seed_cost;
    }
    return res;
}

bool symmetric_layout_possible(const Pulse& p, const KnotPartition& partition, double tol) {
    const std::size_t n = p.size();
    const std::size_t segs = partition.segment_count();
    if (n % 2 != 0 || segs % 2 != 0 || partition.boundaries[segs / 2] * 2 != n)
        return false;
    return detect_symmetry(p, tol).has_value();
}

bool resolve_symmetry(const Pulse& p, const KnotPartition& partition, SymmetryMode mode,
                      double tol) {
    switch (mode) {
    case SymmetryMode::Off: return false;
    case SymmetryMode::Auto: return symmetric_layout_possible(p, partition, tol);
    case SymmetryMode::On:
        if (!symmetric_layout_possible(p, partition, tol))
            fail(ErrorKind::InvalidArgument,
                 "symmetry requested but the pulse is not mirror symmetric within tolerance or "
                 "the partition is not split at the centre with an even segment count");
        return true;
    }
    return false;
}

CompressedPulse quantize_naive(const SplineFit& stage_one, const FixedPointFormat& fmt,
                               bool symmetric) {
    const std::size_t segs = stage_one.polys.size();
    const std::size_t stored = symmetric ? segs / 2 : segs;
    CompressedPulse cp;
    cp.format = fmt;
    cp.symmetric = symmetric;
    for (std::size_t j = 0; j < stored; ++j) {
        const auto n = static_cast<std::uint32_t>(stage_one.partition.segment_length(j));
        cp.segments.push_back(quantize_segment(to_bowler(stage_one.polys[j]), fmt, n).segment);
    }
    return cp;
}

double QaFitResult::seed_cost() const {
    return std::accumulate(segments.begin(), segments.end(), 0.0,
                           [](double a, const QaSegmentResult& r) { return a + r.seed_cost; });
}

double QaFitResult::optimized_cost() const {
    return std::accumulate(segments.begin(), segments.end(), 0.0,
                           [](double a, const QaSegmentResult& r) { return a + r.optimized_cost; });
}

QaFitResult quantisation_aware_fit(const Pulse& p, const SplineFit& stage_one,
                                   const FixedPointFormat& fmt, const QaFitOptions& opts) {
    p.validate();
    fmt.validate();
    opts.validate();
    stage_one.partition.validate(p.size());
    require(stage_one.polys.size() == stage_one.partition.segment_count(),
            "stage-one fit does not match its partition");

    const bool symmetric = resolve_symmetry(p, stage_one.partition, opts.symmetry, opts.symmetry_tol);
    const std::size_t stored = symmetric ? stage_one.polys.size() / 2 : stage_one.polys.size();

    // Quantise every seed up front so range errors surface before any search.
    std::vector<BowlerCoeffs> seeds(stored);
    for (std::size_t j = 0; j < stored; ++j) {
        seeds[j] = to_bowler(stage_one.polys[j]);
        quantize_segment(seeds[j], fmt, static_cast<std::uint32_t>(stage_one.partition.segment_length(j)));
    }

    QaFitResult out;
    out.segments.resize(stored);
    const auto ns = static_cast<std::ptrdiff_t>(stored);
    std::vector<std::exception_ptr> errors(stored);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t j = 0; j < ns; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        const std::span<const double> window(p.samples.data() + stage_one.partition.segment_begin(uj),
                                             stage_one.partition.segment_length(uj));
        try {
            out.segments[uj] = optimize_segment(window, seeds[uj], fmt, opts, uj);
        } catch (...) {
            errors[uj] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);

    out.pulse.format = fmt;
    out.pulse.symmetric = symmetric;
    for (const auto& r : out.segments)
        out.pulse.segments.push_back(r.optimized);
    return out;
}

} // namespace cubicpulse
