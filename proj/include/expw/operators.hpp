#pragma once

// Approximation operators on top of the orthonormal basis: Fourier partial
// sums, de la Vallee Poussin means, and the weighted tail transform
// I(h)(t) = w(t)^{-2} int_t^inf h w^2.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "expw/poly.hpp"

namespace expw {

// Expansion coefficients b_k = int f p_k w^2 dt for k = 0..m-1. Node pairing
// keeps parity exact: odd f gives exactly zero even-index coefficients.
inline std::vector<double> fourier_coeffs(const RecurrenceTable& rec, const RealFn& f, int m) {
    if (m < 1 || m > rec.max_degree() + 1) throw std::invalid_argument("fourier_coeffs: bad m");
    const QuadRule& rule = rec.rule();
    const std::size_t nn = rule.size();
    std::vector<double> fvals(nn, 0.0);
    for (std::size_t i = 0; i < nn; ++i) {
        fvals[i] = f(rule.nodes[i]);
        if (!std::isfinite(fvals[i]))
            throw std::runtime_error("fourier_coeffs: non-finite integrand at node");
    }
    std::vector<double> out(std::size_t(m), 0.0);
    for (int k = 0; k < m; ++k) {
        const auto& q = rec.qrow(k);
        double s = 0.0;
        for (std::size_t i = 0; i < nn / 2; ++i) {
            std::size_t j = nn - 1 - i;
            s += rule.gl_weight[i] *
                 (fvals[i] * q[i] * rule.wval[i] + fvals[j] * q[j] * rule.wval[j]);
        }
        out[std::size_t(k)] = s;
    }
    return out;
}

// s_n(f) = sum_{k<n} b_k p_k; reproduces polynomials of degree < n.
inline BasisPoly partial_sum(const RecurrenceTable& rec, const RealFn& f, int n) {
    auto b = fourier_coeffs(rec, f, n);
    return BasisPoly(rec, std::move(b));
}

inline BasisPoly partial_sum_from(const RecurrenceTable& rec, const std::vector<double>& b, int n) {
    std::vector<double> c(b.begin(), b.begin() + std::min<std::size_t>(b.size(), std::size_t(n)));
    return BasisPoly(rec, std::move(c));
}

// v_n(f): coefficients b_k for k <= n, then linearly damped by (2n-k)/n up
// to degree 2n-1. Agrees with averaging s_{n+1}..s_{2n} directly.
inline BasisPoly vallee_poussin(const RecurrenceTable& rec, const RealFn& f, int n) {
    if (2 * n > rec.max_degree() + 1) throw std::invalid_argument("vallee_poussin: need 2n <= table degree");
    auto b = fourier_coeffs(rec, f, 2 * n);
    std::vector<double> c(std::size_t(2 * n), 0.0);
    for (int k = 0; k < 2 * n; ++k) {
        double damp = (k <= n) ? 1.0 : double(2 * n - k) / double(n);
        c[std::size_t(k)] = damp * b[std::size_t(k)];
    }
    return BasisPoly(rec, std::move(c));
}

// Same mean assembled as (1/n) sum_{j=n+1}^{2n} s_j(f); kept for cross-checks.
inline BasisPoly vallee_poussin_direct(const RecurrenceTable& rec, const RealFn& f, int n) {
    if (2 * n > rec.max_degree() + 1) throw std::invalid_argument("vallee_poussin: need 2n <= table degree");
    auto b = fourier_coeffs(rec, f, 2 * n);
    std::vector<double> c(std::size_t(2 * n), 0.0);
    for (int j = n + 1; j <= 2 * n; ++j)
        for (int k = 0; k < j; ++k) c[std::size_t(k)] += b[std::size_t(k)] / double(n);
    return BasisPoly(rec, std::move(c));
}

// max_{k<=n} | int (f - v_n(f)) p_k w^2 |, by direct quadrature of the
// residual (not the coefficient identity, which would be trivially zero).
inline double orthogonality_residual(const RecurrenceTable& rec, const RealFn& f, int n) {
    BasisPoly v = vallee_poussin(rec, f, n);
    const QuadRule& rule = rec.rule();
    const std::size_t nn = rule.size();
    std::vector<double> rw(nn, 0.0);  // (f - v) w at nodes
    const auto& c = v.coeffs();
    for (std::size_t i = 0; i < nn; ++i) {
        double vw = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k) vw += c[k] * rec.qrow(int(k))[i];
        rw[i] = f(rule.nodes[i]) * rule.wval[i] - vw;
    }
    double worst = 0.0;
    for (int k = 0; k <= n; ++k) {
        const auto& q = rec.qrow(k);
        double s = 0.0;
        for (std::size_t i = 0; i < nn; ++i) s += rule.gl_weight[i] * rw[i] * q[i];
        worst = std::max(worst, std::abs(s));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Tail transform I(h).
// ---------------------------------------------------------------------------

namespace detail {

// int_a^b h(u) exp(2 (Qt - Q(u))) du by composite Gauss-Legendre, panels
// doubled until two refinements agree.
template <class H>
double shifted_integral(const Weight& w, H&& h, double qt, double a, double b) {
    if (!(b > a)) return 0.0;
    auto f = [&](double u) { return h(u) * std::exp(2.0 * (qt - w.Q(u))); };
    int panels = 48;
    auto eval = [&](int P) {
        double s = 0.0, step = (b - a) / P;
        for (int p = 0; p < P; ++p) s += gl_integrate(f, a + p * step, a + (p + 1) * step, 16);
        return s;
    };
    double prev = eval(panels);
    for (panels = 96; panels <= 384; panels *= 2) {
        double cur = eval(panels);
        if (std::abs(cur - prev) <= 1e-9 * std::max(std::abs(cur), 1e-300)) return cur;
        prev = cur;
    }
    return prev;
}

}  // namespace detail

// I(h)(t) = w(t)^{-2} int_t^inf h w^2, computed with the exponential shift
// folded into the integrand. When int h w^2 = 0 the reflected form
// -w(t)^{-2} int_{-inf}^t h w^2 is used for t < 0, which keeps the
// integration range in the decaying tail.
inline double tail_operator(const Weight& w, const RealFn& h, double t, bool zero_mean = false) {
    const double qt = w.Q(t);
    if (t < 0.0 && zero_mean) {
        double start = -t;
        double rtail = w.Q_inverse(w.Q(start) + 40.0);
        return -detail::shifted_integral(w, [&](double s) { return h(-s); }, qt, start, rtail);
    }
    double rtail = w.Q_inverse(std::max(qt, w.Q(0.0)) + 40.0);
    if (t >= rtail) return 0.0;
    return detail::shifted_integral(w, h, qt, t, rtail);
}

// I'(h)(t) = 2 Q'(t) I(h)(t) - h(t), from differentiating the definition.
inline double tail_operator_deriv(const Weight& w, const RealFn& h, double t, bool zero_mean = false) {
    return 2.0 * w.Qp(t) * tail_operator(w, h, t, zero_mean) - h(t);
}

}  // namespace expw
