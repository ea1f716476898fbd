#pragma once

// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
// on the Legendre recurrence. Rules are cached per point count.

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace expw {

struct GlRule {
    std::vector<double> x;  // ascending, symmetric about 0
    std::vector<double> w;  // positive
};

namespace detail {

inline GlRule gl_compute(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    GlRule r;
    r.x.assign(n, 0.0);
    r.w.assign(n, 0.0);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Tricomi-style initial guess, then Newton on P_n.
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 0; k < n; ++k) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k + 1.0) * z * p1 - k * p2) / (k + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        r.x[i] = -z;
        r.x[n - 1 - i] = z;
        double wi = 2.0 / ((1.0 - z * z) * pp * pp);
        r.w[i] = wi;
        r.w[n - 1 - i] = wi;
    }
    if (n % 2 == 1) r.x[n / 2] = 0.0;
    return r;
}

}  // namespace detail

// Shared cache; rules are immutable once inserted.
inline const GlRule& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, GlRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, detail::gl_compute(n)).first;
    return it->second;
}

// Integrate f over [a, b] with an n-point rule.
template <class F>
double gl_integrate(F&& f, double a, double b, int n) {
    const GlRule& r = gauss_legendre(n);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * f(c + h * r.x[i]);
    return s * h;
}

}  // namespace expw
