#pragma once

// Mhaskar-Rakhmanov-Saff numbers and the band functions built from them.
//
// a_x is the positive root of  x = (2/pi) int_0^1 a u Q'(a u) / sqrt(1-u^2) du.
// The substitution u = sin(theta) removes the endpoint singularity, so the
// integral is evaluated with Gauss-Legendre on [0, pi/2]. The map a -> rhs(a)
// is strictly increasing, which makes bracketed root-finding safe.

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "expw/gauss_legendre.hpp"
#include "expw/weights.hpp"

namespace expw {

class MrsTable {
  public:
    explicit MrsTable(Weight w) : w_(std::move(w)) {}

    MrsTable(const MrsTable& o) : w_(o.w_) {
        std::lock_guard<std::mutex> lock(o.mu_);
        cache_ = o.cache_;
    }
    MrsTable& operator=(const MrsTable& o) {
        if (this != &o) {
            std::scoped_lock lock(mu_, o.mu_);
            w_ = o.w_;
            cache_ = o.cache_;
        }
        return *this;
    }

    const Weight& weight() const { return w_; }

    // Right-hand side of the defining equation, strictly increasing in a.
    double rhs(double a) const {
        if (!(a > 0.0)) throw std::domain_error("mrs rhs: a must be > 0");
        auto integrand = [&](double th) {
            double t = a * std::sin(th);
            return t * w_.Qp(t);
        };
        double prev = gl_integrate(integrand, 0.0, M_PI / 2.0, 128);
        for (int n = 256; n <= 4096; n *= 2) {
            double cur = gl_integrate(integrand, 0.0, M_PI / 2.0, n);
            if (std::abs(cur - prev) <= 1e-12 * std::max(std::abs(cur), 1e-300)) {
                return (2.0 / M_PI) * cur;
            }
            prev = cur;
        }
        return (2.0 / M_PI) * prev;
    }

    // a_x with |rhs(a) - x| <= 1e-10 max(1, x); results are cached.
    double a(double x) const {
        if (!(x > 0.0)) throw std::domain_error("mrs a: x must be > 0");
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = cache_.find(x);
            if (it != cache_.end()) return it->second;
        }
        double v = solve(x);
        std::lock_guard<std::mutex> lock(mu_);
        cache_.emplace(x, v);
        return v;
    }

    // delta_u = (u T(a_u))^{-2/3}.
    double delta(double u) const {
        if (!(u > 0.0)) throw std::domain_error("mrs delta: u must be > 0");
        return std::pow(u * w_.T(a(u)), -2.0 / 3.0);
    }

    // Band-width function phi_u; constant for |x| beyond a_u, even in x.
    double phi(double u, double x) const {
        double au = a(u), a2u = a(2.0 * u), du = delta(u);
        double ax = std::min(std::abs(x), au);
        return (au / u) * (1.0 - ax / a2u) / std::sqrt(1.0 - ax / au + du);
    }

    // T(a_n) / (n / a_n)^{2/3} per n; bounded sequences indicate the growth
    // condition the derivative bound requires.
    std::vector<std::pair<double, double>> condition14(const std::vector<double>& ns) const {
        if (ns.empty()) throw std::invalid_argument("condition14: empty n list");
        std::vector<std::pair<double, double>> out;
        out.reserve(ns.size());
        for (double n : ns) {
            double an = a(n);
            out.emplace_back(n, w_.T(an) / std::pow(n / an, 2.0 / 3.0));
        }
        return out;
    }

    std::vector<std::pair<double, double>> cached() const {
        std::lock_guard<std::mutex> lock(mu_);
        return {cache_.begin(), cache_.end()};
    }

  private:
    double solve(double x) const {
        const double tol = 1e-10 * std::max(1.0, x);
        // Bracket: rhs is increasing, rhs(0+) = 0.
        double hi = 1.0, fhi = rhs(hi) - x;
        int guard = 0;
        while (fhi < 0.0) {
            hi *= 2.0;
            fhi = rhs(hi) - x;
            if (++guard > 200) throw std::runtime_error("mrs: Q' overflow before bracketing x=" + std::to_string(x));
        }
        double lo = (hi > 1.0) ? hi / 2.0 : 1e-8;
        double flo = rhs(lo) - x;
        while (flo > 0.0) {
            lo /= 2.0;
            flo = rhs(lo) - x;
            if (lo < 1e-300) throw std::runtime_error("mrs: failed to bracket from below");
        }
        // Illinois-damped regula falsi: halving the retained endpoint's
        // residual prevents stagnation when Q' grows exponentially.
        double a0 = lo, f0 = flo, b0 = hi, f1 = fhi;
        int side = 0;
        double mid = 0.5 * (a0 + b0);
        for (int it = 0; it < 400; ++it) {
            double cand;
            if (f1 != f0) {
                cand = b0 - f1 * (b0 - a0) / (f1 - f0);
                if (!(cand > a0 && cand < b0)) cand = 0.5 * (a0 + b0);
            } else {
                cand = 0.5 * (a0 + b0);
            }
            double fc = rhs(cand) - x;
            if (std::abs(fc) <= tol) return cand;
            if (fc < 0.0) {
                a0 = cand;
                f0 = fc;
                if (side == -1) f1 *= 0.5;
                side = -1;
            } else {
                b0 = cand;
                f1 = fc;
                if (side == 1) f0 *= 0.5;
                side = 1;
            }
            mid = 0.5 * (a0 + b0);
            if (b0 - a0 <= 1e-15 * mid) break;
        }
        if (std::abs(rhs(mid) - x) > tol * 100.0)
            throw std::runtime_error("mrs: root finding stalled at x=" + std::to_string(x));
        return mid;
    }

    Weight w_;
    mutable std::mutex mu_;
    mutable std::map<double, double> cache_;
};

}  // namespace expw
