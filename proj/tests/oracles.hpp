#pragma once
// Independent reference computations used only by the tests. None of these
// share code paths with the library implementations they check.

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "cubicpulse/stirap.hpp"

namespace oracle {

using f128 = __float128;

// Least-squares spline over the truncated power basis on global time
// x = t / N: {1, x, x^2, x^3} plus (x - tau)_+^k for k = order+1 .. 3 at every
// interior knot, which spans exactly the piecewise cubics with C^order joins.
// Normal equations are solved in quad precision.
inline double spline_residual(std::span<const double> y, const std::vector<std::size_t>& knots,
                              int order) {
    const std::size_t n = y.size();
    const f128 inv_n = f128(1) / f128(n);
    std::vector<f128> taus;
    for (std::size_t j = 1; j + 1 < knots.size(); ++j)
        taus.push_back(f128(knots[j]) * inv_n);
    const std::size_t per = static_cast<std::size_t>(3 - order);
    const std::size_t m = 4 + per * taus.size();

    auto basis = [&](std::size_t t, std::vector<f128>& phi) {
        const f128 x = f128(t) * inv_n;
        phi[0] = 1;
        phi[1] = x;
        phi[2] = x * x;
        phi[3] = x * x * x;
        std::size_t c = 4;
        for (f128 tau : taus) {
            const f128 d = x > tau ? x - tau : f128(0);
            for (int k = order + 1; k <= 3; ++k) {
                f128 v = 1;
                for (int i = 0; i < k; ++i)
                    v *= d;
                phi[c++] = v;
            }
        }
    };

    std::vector<f128> a(m * m, 0), b(m, 0), phi(m);
    for (std::size_t t = 0; t < n; ++t) {
        basis(t, phi);
        for (std::size_t i = 0; i < m; ++i) {
            b[i] += phi[i] * f128(y[t]);
            for (std::size_t j = 0; j < m; ++j)
                a[i * m + j] += phi[i] * phi[j];
        }
    }
    // Gaussian elimination with partial pivoting.
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < m; ++r) {
            const f128 v = a[r * m + col] < 0 ? -a[r * m + col] : a[r * m + col];
            const f128 p = a[piv * m + col] < 0 ? -a[piv * m + col] : a[piv * m + col];
            if (v > p)
                piv = r;
        }
        if (piv != col) {
            for (std::size_t j = 0; j < m; ++j)
                std::swap(a[col * m + j], a[piv * m + j]);
            std::swap(b[col], b[piv]);
        }
        for (std::size_t r = col + 1; r < m; ++r) {
            const f128 f = a[r * m + col] / a[col * m + col];
            for (std::size_t j = col; j < m; ++j)
                a[r * m + j] -= f * a[col * m + j];
            b[r] -= f * b[col];
        }
    }
    std::vector<f128> c(m);
    for (std::size_t i = m; i-- > 0;) {
        f128 s = b[i];
        for (std::size_t j = i + 1; j < m; ++j)
            s -= a[i * m + j] * c[j];
        c[i] = s / a[i * m + i];
    }
    f128 res = 0;
    for (std::size_t t = 0; t < n; ++t) {
        basis(t, phi);
        f128 v = 0;
        for (std::size_t i = 0; i < m; ++i)
            v += c[i] * phi[i];
        const f128 d = v - f128(y[t]);
        res += d * d;
    }
    return static_cast<double>(res);
}

// O(N^2) DFT magnitudes in long double with exact integer phase reduction.
inline std::vector<double> dft_magnitudes(std::span<const double> x) {
    const std::size_t n = x.size();
    const long double w = 2.0L * 3.14159265358979323846264338327950288L / static_cast<long double>(n);
    std::vector<long double> cs(n), sn(n);
    for (std::size_t k = 0; k < n; ++k) {
        cs[k] = std::cos(w * static_cast<long double>(k));
        sn[k] = std::sin(w * static_cast<long double>(k));
    }
    std::vector<double> mag(n / 2 + 1);
    for (std::size_t k = 0; k < mag.size(); ++k) {
        long double re = 0, im = 0;
        for (std::size_t t = 0; t < n; ++t) {
            const std::size_t idx = (k * t) % n;
            re += x[t] * cs[idx];
            im -= x[t] * sn[idx];
        }
        mag[k] = static_cast<double>(std::sqrt(re * re + im * im));
    }
    return mag;
}

// Classical RK4 on i dpsi/dt = H psi with H held per envelope sample and
// `refine` steps per sample.
inline cubicpulse::stirap::TransferResult rk4_transfer(const cubicpulse::stirap::StirapConfig& cfg,
                                                       std::span<const double> env1,
                                                       std::span<const double> env2, int refine) {
    using C = std::complex<double>;
    const double two_pi = 2.0 * 3.14159265358979323846;
    const double dt = 1.0 / (cfg.sample_rate * refine);
    C psi[3] = {0.0, 1.0, 0.0};
    for (std::size_t k = 0; k < env1.size(); ++k) {
        const double h02 = -0.5 * two_pi * env1[k];
        const double h12 = -0.5 * two_pi * env2[k];
        const double h22 = two_pi * cfg.detuning;
        auto f = [&](const C* s, C* out) {
            const C mi(0.0, -1.0);
            out[0] = mi * (h02 * s[2]);
            out[1] = mi * (h12 * s[2]);
            out[2] = mi * (h02 * s[0] + h12 * s[1] + h22 * s[2]);
        };
        for (int r = 0; r < refine; ++r) {
            C k1[3], k2[3], k3[3], k4[3], tmp[3];
            f(psi, k1);
            for (int i = 0; i < 3; ++i) tmp[i] = psi[i] + 0.5 * dt * k1[i];
            f(tmp, k2);
            for (int i = 0; i < 3; ++i) tmp[i] = psi[i] + 0.5 * dt * k2[i];
            f(tmp, k3);
            for (int i = 0; i < 3; ++i) tmp[i] = psi[i] + dt * k3[i];
            f(tmp, k4);
            for (int i = 0; i < 3; ++i)
                psi[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    cubicpulse::stirap::TransferResult r;
    r.final_state = cubicpulse::stirap::State(psi[0], psi[1], psi[2]);
    r.norm = r.final_state.norm();
    r.fidelity = std::norm(psi[0]);
    return r;
}

} // namespace oracle
