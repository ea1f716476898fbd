#pragma once

// Master quadrature for integrals against w^2 on the whole line.
//
// A composite Gauss-Legendre rule on [-R, R] with R just beyond the
// restricted-range radius of the target degree: outside that interval the
// weighted polynomial mass is negligible. Nodes are mirrored exactly so odd
// integrands cancel to zero, and panel counts are doubled until the rule
// agrees with its own refinement on all moments up to the target degree.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "expw/gauss_legendre.hpp"
#include "expw/mrs.hpp"
#include "expw/weights.hpp"

namespace expw {

struct QuadRule {
    std::vector<double> nodes;      // strictly increasing, mirrored about 0
    std::vector<double> gl_weight;  // plain panel weights (Lebesgue measure)
    std::vector<double> wval;       // w(node)
    std::vector<double> logw;       // -Q(node)
    std::vector<double> weights;    // gl_weight * w(node)^2
    double radius = 0.0;
    int target_degree = 0;
    bool reduced_radius = false;

    std::size_t size() const { return nodes.size(); }

    // sum_i weights_i f(node_i), pairing +-t so odd f cancels exactly.
    template <class F>
    double integrate(F&& f) const {
        const std::size_t n = nodes.size();
        double s = 0.0;
        for (std::size_t i = 0; i < n / 2; ++i) {
            double a = f(nodes[i]);
            double b = f(nodes[n - 1 - i]);
            if (!std::isfinite(a) || !std::isfinite(b))
                throw std::runtime_error("integrate: non-finite integrand at node " +
                                         std::to_string(nodes[std::isfinite(a) ? n - 1 - i : i]));
            s += weights[i] * (a + b);
        }
        return s;
    }

    // sum_i gl_weight_i f(node_i); used when f already carries the weight.
    template <class F>
    double integrate_plain(F&& f) const {
        const std::size_t n = nodes.size();
        double s = 0.0;
        for (std::size_t i = 0; i < n / 2; ++i)
            s += gl_weight[i] * (f(nodes[i]) + f(nodes[n - 1 - i]));
        return s;
    }
};

namespace detail {

inline QuadRule assemble_rule(const Weight& w, double R, int panels, int pts, int degree) {
    QuadRule r;
    r.radius = R;
    r.target_degree = degree;
    const GlRule& base = gauss_legendre(pts);
    // Positive half first, then mirror, so weights match exactly in pairs.
    std::vector<double> px, pw;
    px.reserve(std::size_t(panels) * pts);
    pw.reserve(std::size_t(panels) * pts);
    const double h = R / panels;
    for (int p = 0; p < panels; ++p) {
        double a = p * h, c = a + 0.5 * h, half = 0.5 * h;
        for (int i = 0; i < pts; ++i) {
            px.push_back(c + half * base.x[i]);
            pw.push_back(half * base.w[i]);
        }
    }
    const std::size_t m = px.size();
    r.nodes.resize(2 * m);
    r.gl_weight.resize(2 * m);
    for (std::size_t i = 0; i < m; ++i) {
        r.nodes[m + i] = px[i];
        r.gl_weight[m + i] = pw[i];
        r.nodes[m - 1 - i] = -px[i];
        r.gl_weight[m - 1 - i] = pw[i];
    }
    r.wval.resize(2 * m);
    r.logw.resize(2 * m);
    r.weights.resize(2 * m);
    for (std::size_t i = 0; i < m; ++i) {
        QValue q = w.Q_checked(px[i]);
        if (q.overflow) throw std::runtime_error("quadrature: Q overflow inside [-R, R]");
        double lw = -q.value;
        double wv = std::exp(lw);
        r.logw[m + i] = lw;
        r.logw[m - 1 - i] = lw;
        r.wval[m + i] = wv;
        r.wval[m - 1 - i] = wv;
        double tw = pw[i] * wv * wv;
        r.weights[m + i] = tw;
        r.weights[m - 1 - i] = tw;
    }
    return r;
}

// Moments of |t|^k w^2 for k = 0..degree in one sweep.
inline std::vector<double> abs_moments(const QuadRule& r, int degree) {
    std::vector<double> m(std::size_t(degree) + 1, 0.0);
    const std::size_t n = r.nodes.size();
    for (std::size_t i = n / 2; i < n; ++i) {
        double t = r.nodes[i];
        double pw = 2.0 * r.weights[i];  // both mirror nodes
        double p = 1.0;
        for (int k = 0; k <= degree; ++k) {
            m[std::size_t(k)] += pw * p;
            p *= t;
        }
    }
    return m;
}

}  // namespace detail

// Build the master rule for a given polynomial degree. The radius is
// a_{2m}(1 + 2 delta_{2m}) with m = degree; if Q at that radius would leave
// double range, the radius shrinks to Q = 320 provided the discarded tail is
// below 1e-30 of the weight mass.
inline QuadRule build_rule(const Weight& w, const MrsTable& mrs, int degree,
                           int panels0 = 32, int pts = 24, int max_nodes = 16384) {
    if (degree < 1) throw std::invalid_argument("build_rule: degree must be >= 1");
    const double m2 = 2.0 * degree;
    double R = mrs.a(m2) * (1.0 + 2.0 * mrs.delta(m2));
    bool reduced = false;
    QValue qr = w.Q_checked(R);
    if (qr.overflow || qr.value > 320.0) {
        double Rr = w.Q_inverse(320.0);
        if (w.Q_checked(mrs.a(m2)).value > 320.0)
            throw std::runtime_error("build_rule: weight decays too fast for degree " + std::to_string(degree));
        R = Rr;
        reduced = true;  // tail bound exp(-2*320) << 1e-30 by construction
    }
    int panels = panels0;
    QuadRule cur = detail::assemble_rule(w, R, panels, pts, degree);
    while (true) {
        if (2 * (2 * panels) * pts > max_nodes)
            throw std::runtime_error("build_rule: node cap reached before moment agreement");
        QuadRule fine = detail::assemble_rule(w, R, 2 * panels, pts, degree);
        auto ma = detail::abs_moments(cur, degree);
        auto mb = detail::abs_moments(fine, degree);
        bool ok = true;
        for (int k = 0; k <= degree && ok; ++k)
            if (std::abs(ma[std::size_t(k)] - mb[std::size_t(k)]) > 1e-9 * mb[std::size_t(k)]) ok = false;
        if (ok) {
            fine.reduced_radius = reduced;
            return fine;
        }
        panels *= 2;
        cur = std::move(fine);
    }
}

}  // namespace expw
