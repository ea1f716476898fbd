#pragma once

// Weighted L^p norms and best-approximation degrees E_{p,n}(w; f) for
// p in {1, 2, inf}.
//
// The p = 2 problem is exact in coefficient space (the minimizer is the
// Fourier section, the error a coefficient tail). For p = 1 and p = inf the
// norm is defined on a fixed dense grid clustered around +-a_n, and the
// discrete optimum is the artifact's definition of E: a weighted exchange
// iteration for the sup norm, and an iteratively reweighted least-squares
// solve with a subgradient certificate for L^1.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "expw/operators.hpp"
#include "expw/poly.hpp"

namespace expw {

enum class Lp { one, two, inf };

inline std::string lp_name(Lp p) { return p == Lp::one ? "1" : (p == Lp::two ? "2" : "inf"); }

struct NormGrid {
    std::vector<double> nodes;  // symmetric, ascending, clustered near +-cluster
    std::vector<double> wv;     // w(node)
    std::vector<double> logw;   // -Q(node)
    std::vector<double> trap;   // trapezoid weights for the Lebesgue measure
    double radius = 0.0;
    double cluster = 0.0;  // a_max(degree,1)
    int degree = 0;
    const QuadRule* rule = nullptr;  // master rule of the owning table
};

// Chebyshev-packed nodes on [-cluster, cluster] plus outer flanks to the
// integration radius; at least 40 nodes per degree. The positive half is
// generated first and mirrored, so the grid is symmetric to the bit.
inline NormGrid make_norm_grid(const RecurrenceTable& rec, int degree, int min_inner = 0) {
    NormGrid g;
    g.degree = degree;
    g.radius = rec.rule().radius;
    g.cluster = rec.mrs().a(std::max(degree, 1));
    g.rule = &rec.rule();
    const int half = std::max({20 * (degree + 1) + 1, 513, min_inner / 2});
    const int outer = 257;
    std::vector<double> pos;  // strictly positive, ascending
    pos.reserve(std::size_t(half) + outer);
    for (int j = half - 1; j >= 1; --j)
        pos.push_back(g.cluster * std::cos(M_PI * j / (2.0 * (half - 1) + 1.0)));
    for (int j = 1; j <= outer - 1; ++j) {
        double s = 0.5 * (1.0 - std::cos(M_PI * j / (outer - 1)));  // 0..1, packed at both ends
        pos.push_back(g.cluster + (g.radius - g.cluster) * s);
    }
    std::sort(pos.begin(), pos.end());
    pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
    const std::size_t np = pos.size();
    g.nodes.resize(2 * np + 1);
    g.nodes[np] = 0.0;
    for (std::size_t i = 0; i < np; ++i) {
        g.nodes[np + 1 + i] = pos[i];
        g.nodes[np - 1 - i] = -pos[i];
    }
    const std::size_t n = g.nodes.size();
    g.wv.resize(n);
    g.logw.resize(n);
    g.trap.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double lw = rec.weight().log_w(g.nodes[i]);
        g.logw[i] = lw;
        g.wv[i] = std::exp(lw);
        double lo = (i == 0) ? g.nodes[0] : g.nodes[i - 1];
        double hi = (i + 1 == n) ? g.nodes[n - 1] : g.nodes[i + 1];
        g.trap[i] = 0.5 * (hi - lo);
    }
    return g;
}

// ||f w||_p: grid max for p = inf, grid trapezoid for p = 1, master
// quadrature of f^2 w^2 for p = 2.
inline double weighted_norm(const RealFn& f, Lp p, const NormGrid& g) {
    switch (p) {
        case Lp::inf: {
            double m = 0.0;
            for (std::size_t i = 0; i < g.nodes.size(); ++i) {
                double v = std::abs(f(g.nodes[i])) * g.wv[i];
                if (!std::isfinite(v)) throw std::runtime_error("weighted_norm: non-finite value");
                m = std::max(m, v);
            }
            return m;
        }
        case Lp::one: {
            double s = 0.0;
            for (std::size_t i = 0; i < g.nodes.size(); ++i) {
                double v = std::abs(f(g.nodes[i])) * g.wv[i];
                if (!std::isfinite(v)) throw std::runtime_error("weighted_norm: non-finite value");
                s += g.trap[i] * v;
            }
            return s;
        }
        case Lp::two: {
            double s = g.rule->integrate([&](double t) {
                double v = f(t);
                return v * v;
            });
            return std::sqrt(std::max(0.0, s));
        }
    }
    return 0.0;
}

// Norms of pre-weighted samples r_i ~ (f w)(node_i); the stable entry point
// when polynomials are involved.
inline double weighted_norm_samples(const std::vector<double>& rw, Lp p, const NormGrid& g) {
    if (p == Lp::inf) {
        double m = 0.0;
        for (double v : rw) m = std::max(m, std::abs(v));
        return m;
    }
    if (p == Lp::one) {
        double s = 0.0;
        for (std::size_t i = 0; i < rw.size(); ++i) s += g.trap[i] * std::abs(rw[i]);
        return s;
    }
    throw std::invalid_argument("weighted_norm_samples: p=2 uses the quadrature path");
}

// argmin_c ||(f - c) w||_p by golden-section; the objective is convex in c.
inline std::pair<double, double> best_const(const RealFn& f, Lp p, const NormGrid& g) {
    auto obj = [&](double c) { return weighted_norm([&](double x) { return f(x) - c; }, p, g); };
    double lo = f(g.nodes.front()), hi = lo;
    for (double x : g.nodes) {
        double v = f(x);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    double pad = 0.5 * (hi - lo) + 1.0;
    lo -= pad;
    hi += pad;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = obj(x1), f2 = obj(x2);
    while (b - a > 1e-10 * std::max(1.0, std::abs(a) + std::abs(b))) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = obj(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = obj(x2);
        }
    }
    double c = 0.5 * (a + b);
    return {c, obj(c)};
}

struct BestPoly {
    BasisPoly poly;
    double error = 0.0;
    bool tail_flag = false;  // p=2 only: coefficient tail not yet negligible
    int iterations = 0;
    double defect = 0.0;  // p=inf: final equioscillation defect
};

namespace detail {

// Weighted basis rows q_k(t_i) = (p_k w)(t_i) on the grid.
inline Eigen::MatrixXd basis_rows(const RecurrenceTable& rec, const NormGrid& g, int n) {
    const std::size_t m = g.nodes.size();
    Eigen::MatrixXd Q(n + 1, m);
    std::vector<double> buf(std::size_t(n) + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        rec.eval_all_weighted(g.nodes[i], buf);
        for (int k = 0; k <= n; ++k) Q(k, Eigen::Index(i)) = buf[std::size_t(k)];
    }
    return Q;
}

// Discrete weighted exchange iteration for the sup-norm problem.
inline BestPoly remez_inf(const RecurrenceTable& rec, const RealFn& f, int n, const NormGrid& g) {
    const std::size_t m = g.nodes.size();
    Eigen::MatrixXd Q = basis_rows(rec, g, n);
    Eigen::VectorXd y(m);
    for (std::size_t i = 0; i < m; ++i) y(Eigen::Index(i)) = f(g.nodes[i]) * g.wv[i];
    const double yscale = y.cwiseAbs().maxCoeff();

    // Reference set: Chebyshev points of [-a_n, a_n] snapped to the grid.
    std::vector<int> ref(std::size_t(n) + 2);
    {
        double an = g.cluster;
        for (int j = 0; j <= n + 1; ++j) {
            double x = -an * std::cos(M_PI * j / (n + 1));
            auto it = std::lower_bound(g.nodes.begin(), g.nodes.end(), x);
            int idx = int(std::min<std::ptrdiff_t>(std::ptrdiff_t(m) - 1, it - g.nodes.begin()));
            ref[std::size_t(j)] = idx;
        }
        for (std::size_t j = 1; j < ref.size(); ++j)
            if (ref[j] <= ref[j - 1]) ref[j] = ref[j - 1] + 1;
    }

    BestPoly out{BasisPoly::zero(rec)};
    Eigen::VectorXd coef;
    double esys = 0.0;
    std::vector<double> resid(m, 0.0);
    for (int it = 0; it < 150; ++it) {
        // Solve for coefficients and the levelled error on the references.
        Eigen::MatrixXd A(n + 2, n + 2);
        Eigen::VectorXd rhs(n + 2);
        for (int j = 0; j <= n + 1; ++j) {
            for (int k = 0; k <= n; ++k) A(j, k) = Q(k, ref[std::size_t(j)]);
            A(j, n + 1) = (j % 2 == 0) ? 1.0 : -1.0;
            rhs(j) = y(ref[std::size_t(j)]);
        }
        Eigen::VectorXd sol = A.colPivHouseholderQr().solve(rhs);
        coef = sol.head(n + 1);
        esys = std::abs(sol(n + 1));
        double maxr = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double pv = 0.0;
            for (int k = 0; k <= n; ++k) pv += coef(k) * Q(k, Eigen::Index(i));
            resid[i] = y(Eigen::Index(i)) - pv;
            maxr = std::max(maxr, std::abs(resid[i]));
        }
        out.iterations = it + 1;
        out.defect = (maxr - esys) / std::max(maxr, 1e-300);
        // The absolute term is the rounding floor of the residual samples;
        // below it the equioscillation structure is noise and the level
        // cannot sharpen further.
        bool at_noise_floor = (maxr - esys) <= 4e-14 * std::max(yscale, 1e-300);
        if (out.defect <= 1e-8 || at_noise_floor || maxr <= 1e-15 * std::max(yscale, 1e-300)) {
            std::vector<double> c(std::size_t(n) + 1);
            for (int k = 0; k <= n; ++k) c[std::size_t(k)] = coef(k);
            out.poly = BasisPoly(rec, std::move(c));
            out.error = maxr;
            return out;
        }
        // Local extrema of |residual|, then an alternating subset keeping the
        // largest magnitudes and containing the global maximum.
        std::vector<int> ext;
        for (std::size_t i = 0; i < m; ++i) {
            double v = std::abs(resid[i]);
            double lft = (i > 0) ? std::abs(resid[i - 1]) : -1.0;
            double rgt = (i + 1 < m) ? std::abs(resid[i + 1]) : -1.0;
            if (v >= lft && v > rgt) ext.push_back(int(i));
            else if (v >= lft && i + 1 == m) ext.push_back(int(i));
        }
        std::vector<int> alt;
        for (int i : ext) {
            if (!alt.empty() && (resid[std::size_t(i)] > 0) == (resid[std::size_t(alt.back())] > 0)) {
                if (std::abs(resid[std::size_t(i)]) > std::abs(resid[std::size_t(alt.back())])) alt.back() = i;
            } else {
                alt.push_back(i);
            }
        }
        if (int(alt.size()) < n + 2) {
            // Single exchange fallback: swap the global max into the
            // reference set, preserving sign alternation.
            int imax = 0;
            for (std::size_t i = 1; i < m; ++i)
                if (std::abs(resid[i]) > std::abs(resid[std::size_t(imax)])) imax = int(i);
            bool placed = false;
            for (std::size_t j = 0; j < ref.size(); ++j) {
                double rj = resid[std::size_t(ref[j])];
                if ((rj > 0) == (resid[std::size_t(imax)] > 0)) {
                    if ((j == 0 || ref[j - 1] < imax) && (j + 1 == ref.size() || imax < ref[j + 1])) {
                        ref[j] = imax;
                        placed = true;
                        break;
                    }
                }
            }
            if (!placed) {
                if (imax < ref.front()) { ref.front() = imax; }
                else if (imax > ref.back()) { ref.back() = imax; }
            }
            continue;
        }
        while (int(alt.size()) > n + 2) {
            // Trim while preserving alternation: an interior drop must take a
            // neighbor with it, so with exactly one point too many an
            // endpoint goes instead.
            std::size_t kmin = 0;
            for (std::size_t k = 1; k < alt.size(); ++k)
                if (std::abs(resid[std::size_t(alt[k])]) < std::abs(resid[std::size_t(alt[kmin])])) kmin = k;
            if (kmin == 0 || kmin + 1 == alt.size()) {
                alt.erase(alt.begin() + std::ptrdiff_t(kmin));
            } else if (int(alt.size()) == n + 3) {
                bool drop_front = std::abs(resid[std::size_t(alt.front())]) <
                                  std::abs(resid[std::size_t(alt.back())]);
                if (drop_front)
                    alt.erase(alt.begin());
                else
                    alt.pop_back();
            } else {
                std::size_t knb = (std::abs(resid[std::size_t(alt[kmin - 1])]) <
                                   std::abs(resid[std::size_t(alt[kmin + 1])]))
                                      ? kmin - 1
                                      : kmin + 1;
                alt.erase(alt.begin() + std::ptrdiff_t(std::max(kmin, knb)));
                alt.erase(alt.begin() + std::ptrdiff_t(std::min(kmin, knb)));
            }
        }
        if (int(alt.size()) != n + 2)
            throw std::runtime_error("best_poly: exchange lost its reference set");
        for (int j = 0; j <= n + 1; ++j) ref[std::size_t(j)] = alt[std::size_t(j)];
    }
    throw std::runtime_error("best_poly: exchange did not converge, defect " + std::to_string(out.defect));
}

// L^1 fit as a linear program, solved on the box-constrained dual
//   max y.lam  s.t.  Q lam = 0,  |lam_i| <= tau_i
// by a primal-dual interior point iteration; the equality multipliers are
// the fitted coefficients. A vertex snap onto the n+1 smallest residuals
// sharpens the last digits, and the clamped-subgradient residual is the
// optimality certificate. Degenerate instances (the degree-n optimum already
// optimal one degree down, e.g. odd data at even n) are re-solved at n-1 and
// certified in the full coordinate set.
inline BestPoly l1_best(const RecurrenceTable& rec, const RealFn& f, int n, const NormGrid& g) {
    const std::size_t m = g.nodes.size();
    const Eigen::Index mi = Eigen::Index(m);
    Eigen::MatrixXd Q = basis_rows(rec, g, n);
    Eigen::VectorXd y(mi), tau(mi);
    for (std::size_t i = 0; i < m; ++i) {
        y(Eigen::Index(i)) = f(g.nodes[i]) * g.wv[i];
        tau(Eigen::Index(i)) = g.trap[i];
    }
    const double scale = std::max((tau.array() * y.array().abs()).sum(), 1e-300);

    auto primal = [&](const Eigen::VectorXd& c) {
        return (tau.array() * (y - Q.transpose() * c).array().abs()).sum();
    };
    auto make_out = [&](const Eigen::VectorXd& c, double E, int iters, double defect) {
        BestPoly out{BasisPoly::zero(rec)};
        std::vector<double> cc(std::size_t(n) + 1);
        for (int k = 0; k <= n; ++k) cc[std::size_t(k)] = c(k);
        out.poly = BasisPoly(rec, std::move(cc));
        out.error = E;
        out.iterations = iters;
        out.defect = defect;
        return out;
    };

    // Near-polynomial input: the projection already fits to roundoff.
    {
        auto b = fourier_coeffs(rec, f, n + 1);
        Eigen::VectorXd cp(n + 1);
        for (int k = 0; k <= n; ++k) cp(k) = b[std::size_t(k)];
        double E0 = primal(cp);
        if (E0 <= 1e-12 * scale) return make_out(cp, E0, 0, 0.0);
    }

    Eigen::VectorXd lam = Eigen::VectorXd::Zero(mi);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n + 1);
    double mu = scale / double(m);
    const double mu_floor = 1e-15 * scale / double(m);
    int iters = 0;
    for (int it = 0; it < 120; ++it) {
        iters = it + 1;
        Eigen::VectorXd lo = lam + tau, hi = tau - lam;  // strictly positive
        Eigen::VectorXd F1 = y - Q.transpose() * c +
                             mu * (lo.cwiseInverse() - hi.cwiseInverse());
        Eigen::VectorXd H = mu * (lo.array().square().inverse() + hi.array().square().inverse())
                                .matrix();
        Eigen::VectorXd invH = H.cwiseInverse();
        Eigen::MatrixXd S = Q * invH.asDiagonal() * Q.transpose();
        Eigen::VectorXd rhs = Q * (invH.asDiagonal() * F1) + Q * lam;
        Eigen::VectorXd dc = S.ldlt().solve(rhs);
        Eigen::VectorXd dlam = invH.asDiagonal() * (F1 - Q.transpose() * dc);
        if (!dc.allFinite() || !dlam.allFinite()) break;
        double alpha = 1.0;
        for (Eigen::Index i = 0; i < mi; ++i) {
            if (dlam(i) > 0.0) alpha = std::min(alpha, 0.995 * hi(i) / dlam(i));
            if (dlam(i) < 0.0) alpha = std::min(alpha, 0.995 * lo(i) / -dlam(i));
        }
        lam += alpha * dlam;
        c += alpha * dc;
        double gap = primal(c) - y.dot(lam);
        if (gap <= 1e-10 * scale) break;
        mu = std::max(0.25 * mu, mu_floor);
    }

    // Vertex snap: interpolate on the n+1 smallest residuals, keep if no
    // worse, then rebuild the exact dual for that vertex. When the active-set
    // multipliers land in [-1, 1] the duality gap closes to roundoff, which
    // is the optimality certificate.
    Eigen::VectorXd r = y - Q.transpose() * c;
    std::vector<Eigen::Index> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = Eigen::Index(i);
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return std::abs(r(a)) < std::abs(r(b));
    });
    {
        Eigen::MatrixXd A(n + 1, n + 1);
        Eigen::VectorXd b(n + 1);
        for (int j = 0; j <= n; ++j) {
            A.row(j) = Q.col(order[std::size_t(j)]).transpose();
            b(j) = y(order[std::size_t(j)]);
        }
        Eigen::VectorXd cs = A.colPivHouseholderQr().solve(b);
        if (cs.allFinite() && primal(cs) <= primal(c)) {
            c = cs;
            r = y - Q.transpose() * c;
        }
    }

    // Certificate: residual signs off the near-zero set, multipliers solved
    // by clamped least squares on it; the normalized leftover is the
    // subgradient defect.
    auto certify = [&](const Eigen::VectorXd& cand) {
        Eigen::VectorXd rr = y - Q.transpose() * cand;
        const double ztol = 1e-10 * y.cwiseAbs().maxCoeff() + 1e-300;
        std::vector<Eigen::Index> zset;
        Eigen::VectorXd s = Eigen::VectorXd::Zero(n + 1);
        for (Eigen::Index i = 0; i < mi; ++i) {
            if (std::abs(rr(i)) <= ztol)
                zset.push_back(i);
            else
                s += tau(i) * (rr(i) > 0 ? 1.0 : -1.0) * Q.col(i);
        }
        if (!zset.empty()) {
            Eigen::MatrixXd B(n + 1, Eigen::Index(zset.size()));
            for (std::size_t a = 0; a < zset.size(); ++a)
                B.col(Eigen::Index(a)) = tau(zset[a]) * Q.col(zset[a]);
            Eigen::VectorXd th = B.colPivHouseholderQr().solve(-s);
            for (Eigen::Index a = 0; a < th.size(); ++a) th(a) = std::clamp(th(a), -1.0, 1.0);
            double lip = (B.transpose() * B).norm() + 1e-300;
            for (int sweep = 0; sweep < 400; ++sweep) {
                Eigen::VectorXd grad = B.transpose() * (s + B * th);
                th -= grad / lip;
                for (Eigen::Index a = 0; a < th.size(); ++a) th(a) = std::clamp(th(a), -1.0, 1.0);
            }
            s += B * th;
        }
        double defect = 0.0;
        for (int k = 0; k <= n; ++k) {
            double denom = (tau.array() * Q.row(k).transpose().array().abs()).sum();
            defect = std::max(defect, std::abs(s(k)) / std::max(denom, 1e-300));
        }
        return defect;
    };

    double defect = certify(c);
    if (defect > 1e-8 && n >= 1) {
        // Flat-face degeneracy: the optimum may already live one degree down,
        // where the vertex is crisp; the full certificate then covers the
        // extra coordinate as well.
        BestPoly sub = l1_best(rec, f, n - 1, g);
        Eigen::VectorXd cs = Eigen::VectorXd::Zero(n + 1);
        for (int k = 0; k <= n - 1; ++k) cs(k) = sub.poly.coeff(k);
        if (primal(cs) <= primal(c) + 1e-12 * scale) {
            double d2 = certify(cs);
            if (d2 < defect) {
                c = cs;
                defect = d2;
            }
        }
    }
    if (defect > 1e-8)
        throw std::runtime_error("best_poly: L1 subgradient defect " + std::to_string(defect) +
                                 " after " + std::to_string(iters) + " iterations");
    return make_out(c, primal(c), iters, defect);
}

}  // namespace detail

// Best degree-n approximation and its error E_{p,n}(w; f).
inline BestPoly best_poly(const RecurrenceTable& rec, const RealFn& f, Lp p, int n,
                          const NormGrid& grid) {
    if (n < 0 || n > rec.max_degree()) throw std::invalid_argument("best_poly: bad degree");
    if (p == Lp::two) {
        const int N = rec.max_degree();
        auto b = fourier_coeffs(rec, f, N + 1);
        double tail2 = 0.0;
        for (int k = n + 1; k <= N; ++k) tail2 += b[std::size_t(k)] * b[std::size_t(k)];
        double total2 = 0.0;
        for (double v : b) total2 += v * v;
        BestPoly out{partial_sum_from(rec, b, n + 1)};
        out.error = std::sqrt(tail2);
        double edge = std::abs(b[std::size_t(N)]) + std::abs(b[std::size_t(N - 1)]) +
                      std::abs(b[std::size_t(N - 2)]);
        out.tail_flag = edge > 1e-10 * std::sqrt(std::max(total2, 1e-300));
        return out;
    }
    if (p == Lp::inf) return detail::remez_inf(rec, f, n, grid);
    return detail::l1_best(rec, f, n, grid);
}

// E_{p,n}(w; g) / ((a_n / n) ||g' w||_p): bounded ratios express the
// smoothness-to-approximation transfer.
inline double favard_ratio(const RecurrenceTable& rec, const RealFn& g, const RealFn& gp, Lp p,
                           int n, const NormGrid& grid) {
    double E = best_poly(rec, g, p, n, grid).error;
    double gn = weighted_norm(gp, p, grid);
    double an = rec.mrs().a(double(n));
    if (gn == 0.0) return (E <= 1e-12) ? 0.0 : std::numeric_limits<double>::infinity();
    return E / ((an / n) * gn);
}

}  // namespace expw
