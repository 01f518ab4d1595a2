#pragma once
// Rational check of the accumulated-error identity with GMP integers at a
// common power-of-two scale (every double is a dyadic rational).

#include <cmath>
#include <cstdint>
#include <string>

#include <gmpxx.h>

#include "cubicpulse/fixed_point.hpp"

namespace oracle {

inline int lowest_exponent(double d) {
    if (d == 0.0)
        return 0;
    int e = 0;
    std::frexp(d, &e);
    return 53 - e; // d * 2^(53 - e) is an integer
}

inline mpz_class scaled(double d, int s) {
    mpq_class q(d);
    q *= mpq_class(mpz_class(1) << s);
    q.canonicalize();
    if (q.get_den() != 1)
        throw std::logic_error("scale too small for " + std::to_string(d));
    return q.get_num();
}

struct IdentityCheck {
    bool eps_exact = true;      // profile eps (doubles) happen to equal the rational errors
    bool identity_exact = true; // emulation - exact recursion == closed form, every n
    double worst_double_gap = 0.0; // |predict_error(n) - exact| relative to max(1, |exact|)
};

// Emulated accumulator (pre output truncation) minus the exact real
// recursion on `b`, compared for every n against the closed-form error
// eps_a + n eps_b + n(n+1)/2 eps_g + n(n+1)(n+2)/6 eps_d evaluated in exact
// arithmetic.
inline IdentityCheck check_error_identity(const cubicpulse::BowlerCoeffs& b,
                                          const cubicpulse::QuantizeResult& q,
                                          const cubicpulse::FixedPointFormat& fmt) {
    const auto& p = q.profile;
    const auto& s = q.segment;
    int sc = fmt.frac_bits;
    for (double d : {b.alpha0, b.beta0, b.gamma0, b.delta0, p.eps_alpha, p.eps_beta, p.eps_gamma,
                     p.eps_delta})
        sc = std::max(sc, lowest_exponent(d));

    IdentityCheck out;
    const mpz_class grid = mpz_class(1) << (sc - fmt.frac_bits);
    const mpz_class qa = mpz_class(static_cast<long>(s.alpha_raw)) << sc;
    const mpz_class qb = mpz_class(static_cast<long>(s.beta_raw)) * grid;
    const mpz_class qg = mpz_class(static_cast<long>(s.gamma_raw)) * grid;
    const mpz_class qd = mpz_class(static_cast<long>(s.delta_raw)) * grid;
    mpz_class ea = scaled(b.alpha0, sc), eb = scaled(b.beta0, sc), eg = scaled(b.gamma0, sc);
    const mpz_class ed = scaled(b.delta0, sc);
    // rational quantisation errors, and whether the profile's doubles hold them exactly
    const mpz_class pa = qa - ea, pb = qb - eb, pg = qg - eg, pd = qd - ed;
    out.eps_exact = pa == scaled(p.eps_alpha, sc) && pb == scaled(p.eps_beta, sc) &&
                    pg == scaled(p.eps_gamma, sc) && pd == scaled(p.eps_delta, sc);

    const auto trace = cubicpulse::accumulator_trace(s, fmt);
    const double unit = std::ldexp(1.0, -sc);
    for (std::uint32_t n = 0; n < s.n_samples; ++n) {
        if (n > 0) {
            eg += ed;
            eb += eg;
            ea += eb;
        }
        const mpz_class nn = n;
        const mpz_class pred =
            pa + nn * pb + nn * (nn + 1) / 2 * pg + nn * (nn + 1) * (nn + 2) / 6 * pd;
        const mpz_class emu = mpz_class(static_cast<long>(trace[n])) * grid;
        const mpz_class diff = emu - ea;
        if (diff != pred)
            out.identity_exact = false;
        const double exact = diff.get_d() * unit;
        const double gap = std::abs(cubicpulse::predict_error(p, n) - exact) /
                           std::max(1.0, std::abs(exact));
        out.worst_double_gap = std::max(out.worst_double_gap, gap);
    }
    return out;
}

} // namespace oracle
