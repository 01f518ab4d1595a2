#include "cubicpulse/spline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "cubicpulse/error.hpp"
#include "cubicpulse/kernels.hpp"

namespace cubicpulse {

namespace {

constexpr std::size_t kMinSegment = 4;

// m! / (m - d)!
double falling(int m, int d) {
    double r = 1.0;
    for (int i = 0; i < d; ++i)
        r *= static_cast<double>(m - i);
    return r;
}

SplineFit solve_reduced(const std::vector<kernels::SegmentReduction>& red,
                        const KnotPartition& partition, int order) {
    const auto segs = static_cast<Eigen::Index>(red.size());
    const Eigen::Index nvar = 4 * segs;

    for (Eigen::Index j = 0; j < segs; ++j) {
        const auto& r = red[static_cast<std::size_t>(j)].r;
        const double scale = std::sqrt(static_cast<double>(partition.segment_length(j)));
        for (int k = 0; k < 4; ++k)
            if (!(std::abs(r(k, k)) > 1e-10 * scale))
                fail(ErrorKind::FitFailure,
                     "rank-deficient least-squares system in segment " + std::to_string(j));
    }

    Eigen::MatrixXd rblk = Eigen::MatrixXd::Zero(nvar, nvar);
    Eigen::VectorXd rhs(nvar);
    for (Eigen::Index j = 0; j < segs; ++j) {
        rblk.block<4, 4>(4 * j, 4 * j) = red[static_cast<std::size_t>(j)].r;
        rhs.segment<4>(4 * j) = red[static_cast<std::size_t>(j)].qty;
    }

    Eigen::VectorXd coeffs;
    const Eigen::Index ncons = (segs - 1) * (order + 1);
    if (ncons == 0) {
        coeffs = rblk.colPivHouseholderQr().solve(rhs);
    } else {
        // Continuity rows in normalised coordinates: d-th derivative of the
        // left piece at s = 1 against the right piece at s = 0, both scaled
        // by L_left^d so the rows stay O(1).
        Eigen::MatrixXd c = Eigen::MatrixXd::Zero(ncons, nvar);
        Eigen::Index row = 0;
        for (Eigen::Index j = 0; j + 1 < segs; ++j) {
            const double ratio = static_cast<double>(partition.segment_length(j)) /
                                 static_cast<double>(partition.segment_length(j + 1));
            for (int d = 0; d <= order; ++d, ++row) {
                for (int m = d; m < 4; ++m)
                    c(row, 4 * j + m) = falling(m, d);
                c(row, 4 * (j + 1) + d) = -falling(d, d) * std::pow(ratio, d);
            }
        }
        Eigen::HouseholderQR<Eigen::MatrixXd> cqr(c.transpose());
        const Eigen::MatrixXd q = cqr.householderQ();
        const Eigen::MatrixXd z = q.rightCols(nvar - ncons);
        const Eigen::VectorXd y = (rblk * z).colPivHouseholderQr().solve(rhs);
        coeffs = z * y;
    }

    SplineFit fit;
    fit.partition = partition;
    fit.continuity_order = order;
    fit.polys.resize(static_cast<std::size_t>(segs));
    for (Eigen::Index j = 0; j < segs; ++j) {
        const double len = static_cast<double>(partition.segment_length(j));
        auto& p = fit.polys[static_cast<std::size_t>(j)];
        p.p0 = coeffs(4 * j);
        p.p1 = coeffs(4 * j + 1) / len;
        p.p2 = coeffs(4 * j + 2) / (len * len);
        p.p3 = coeffs(4 * j + 3) / (len * len * len);
        if (!std::isfinite(p.p0) || !std::isfinite(p.p1) || !std::isfinite(p.p2) ||
            !std::isfinite(p.p3))
            fail(ErrorKind::FitFailure, "non-finite coefficients in segment " + std::to_string(j));
    }
    return fit;
}

} // namespace

void KnotPartition::validate(std::size_t pulse_len) const {
    require(boundaries.size() >= 2, "knot partition needs at least one segment");
    require(boundaries.front() == 0, "knot partition must start at 0");
    require(boundaries.back() == pulse_len,
            "knot partition must end at pulse length " + std::to_string(pulse_len));
    for (std::size_t j = 0; j + 1 < boundaries.size(); ++j) {
        require(boundaries[j] < boundaries[j + 1], "knot boundaries must be strictly increasing");
        require(boundaries[j + 1] - boundaries[j] >= kMinSegment,
                "segment " + std::to_string(j) + " has fewer than 4 samples");
    }
}

double CubicPoly::derivative(double t, int d) const {
    switch (d) {
    case 0: return (*this)(t);
    case 1: return p1 + t * (2.0 * p2 + t * 3.0 * p3);
    case 2: return 2.0 * p2 + 6.0 * p3 * t;
    case 3: return 6.0 * p3;
    default: return 0.0;
    }
}

KnotPartition uniform_knots(std::size_t n_segments, std::size_t pulse_len) {
    require(n_segments >= 1, "uniform_knots: need at least one segment");
    require(pulse_len >= kMinSegment * n_segments,
            "uniform_knots: pulse of " + std::to_string(pulse_len) + " samples is too short for " +
                std::to_string(n_segments) + " segments");
    KnotPartition k;
    k.boundaries.resize(n_segments + 1);
    for (std::size_t j = 0; j <= n_segments; ++j)
        k.boundaries[j] = (j * pulse_len) / n_segments;
    return k;
}

SplineFit fit_float(const Pulse& p, const KnotPartition& partition, int continuity_order) {
    p.validate();
    partition.validate(p.size());
    require(continuity_order >= 0 && continuity_order <= 2, "continuity_order must be 0, 1 or 2");
    // Fit relative to the first sample so that a constant pulse comes out
    // exactly (zero right-hand side) instead of a round-off below the constant.
    const double offset = p.samples.front();
    std::vector<double> centred(p.samples);
    for (double& v : centred)
        v -= offset;
    const auto red = kernels::segment_reductions(centred, partition);
    SplineFit fit = solve_reduced(red, partition, continuity_order);
    for (auto& poly : fit.polys)
        poly.p0 += offset;
    fit.residual = spline_residual(fit, p);
    return fit;
}

double eval_spline(const SplineFit& f, double t) {
    const auto& b = f.partition.boundaries;
    require(!b.empty() && f.polys.size() + 1 == b.size(), "eval_spline: malformed spline");
    const double end = static_cast<double>(b.back());
    if (!(t >= 0.0 && t <= end))
        fail(ErrorKind::InvalidArgument, "eval_spline: t out of range");
    // first boundary strictly greater than t; knots belong to the later segment
    auto it = std::upper_bound(b.begin(), b.end(), t,
                               [](double v, std::size_t e) { return v < static_cast<double>(e); });
    std::size_t j = static_cast<std::size_t>(it - b.begin());
    j = (j == 0) ? 0 : j - 1;
    j = std::min(j, f.polys.size() - 1);
    return f.polys[j](t - static_cast<double>(b[j]));
}

double spline_residual(const SplineFit& f, const Pulse& p) {
    double total = 0.0;
    for (std::size_t j = 0; j < f.polys.size(); ++j) {
        const std::size_t begin = f.partition.segment_begin(j);
        const std::size_t len = f.partition.segment_length(j);
        double s = 0.0;
        for (std::size_t t = 0; t < len; ++t) {
            const double d = f.polys[j](static_cast<double>(t)) - p.samples[begin + t];
            s += d * d;
        }
        total += s;
    }
    return total;
}

KnotPartition optimize_knots_local(const Pulse& p, const KnotPartition& initial, int max_iters,
                                   int continuity_order) {
    require(max_iters >= 0, "optimize_knots_local: max_iters must be >= 0");
    KnotPartition current = initial;
    double best = fit_float(p, current, continuity_order).residual;

    for (int iter = 0; iter < max_iters; ++iter) {
        bool improved = false;
        for (std::size_t i = 1; i + 1 < current.boundaries.size(); ++i) {
            const std::size_t lo = current.boundaries[i - 1] + kMinSegment;
            const std::size_t hi = current.boundaries[i + 1] - kMinSegment;
            const std::size_t here = current.boundaries[i];
            std::vector<std::size_t> moves;
            for (std::size_t step = 1; step <= hi - lo; step *= 2) {
                if (here >= lo + step)
                    moves.push_back(here - step);
                if (here + step <= hi)
                    moves.push_back(here + step);
            }
            if (moves.empty())
                continue;

            // A candidate whose system is singular simply stays at +inf.
            std::vector<double> residuals(moves.size(), std::numeric_limits<double>::infinity());
            const auto nm = static_cast<std::ptrdiff_t>(moves.size());
#pragma omp parallel for schedule(dynamic, 1)
            for (std::ptrdiff_t m = 0; m < nm; ++m) {
                KnotPartition trial = current;
                trial.boundaries[i] = moves[static_cast<std::size_t>(m)];
                try {
                    const auto red = kernels::segment_reductions_serial(p.samples, trial);
                    SplineFit f = solve_reduced(red, trial, continuity_order);
                    residuals[static_cast<std::size_t>(m)] = spline_residual(f, p);
                } catch (const Error&) {
                }
            }
            const auto pick = static_cast<std::size_t>(
                std::min_element(residuals.begin(), residuals.end()) - residuals.begin());
            if (residuals[pick] < best) {
                best = residuals[pick];
                current.boundaries[i] = moves[pick];
                improved = true;
            }
        }
        if (!improved)
            break;
    }
    return current;
}

nlohmann::json to_json(const SplineFit& f) {
    nlohmann::json coeffs = nlohmann::json::array();
    for (const auto& p : f.polys)
        coeffs.push_back({p.p0, p.p1, p.p2, p.p3});
    return {{"partition", f.partition.boundaries},
            {"continuity_order", f.continuity_order},
            {"residual", f.residual},
            {"coefficients", coeffs}};
}

SplineFit spline_fit_from_json(const nlohmann::json& j) {
    SplineFit f;
    try {
        f.partition.boundaries = j.at("partition").get<std::vector<std::size_t>>();
        f.continuity_order = j.at("continuity_order").get<int>();
        f.residual = j.at("residual").get<double>();
        for (const auto& c : j.at("coefficients")) {
            const auto v = c.get<std::vector<double>>();
            if (v.size() != 4)
                fail(ErrorKind::Format, "spline json: each coefficient row needs 4 values");
            f.polys.push_back({v[0], v[1], v[2], v[3]});
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Format, std::string("spline json: ") + e.what());
    }
    if (f.polys.size() != f.partition.segment_count())
        fail(ErrorKind::Format, "spline json: coefficient count does not match partition");
    return f;
}

} // namespace cubicpulse
