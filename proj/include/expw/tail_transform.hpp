#pragma once

// Batch evaluation of the tail transform I(h) on a sorted point set.
//
// One cumulative sweep of int hw^2 over the gaps gives every suffix integral
// in a single pass; the exponential unshift is applied in log form so reduced
// radii cannot overflow. Suffix sums accumulated from the far tail are only
// trustworthy for t >= 0: for t < 0 with mean-zero h the mirrored prefix sweep
// is used instead, which keeps the relative error of the small tail values.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "expw/gauss_legendre.hpp"
#include "expw/weights.hpp"

namespace expw {

class TailTransform {
  public:
    TailTransform(const Weight& w, RealFn h, bool zero_mean, std::vector<double> points)
        : w_(w), h_(std::move(h)), zero_mean_(zero_mean), pts_(std::move(points)) {
        if (!std::is_sorted(pts_.begin(), pts_.end()))
            throw std::invalid_argument("TailTransform: points must be ascending");
        compute();
    }

    const std::vector<double>& points() const { return pts_; }

    // I(h)(points[i]).
    double value(std::size_t i) const { return unshift(i, 2.0 * qv_[i]); }

    // I(h)(points[i]) * w(points[i]); the natural quantity for norms.
    double value_times_w(std::size_t i) const { return unshift(i, qv_[i]); }

    // I'(h) w = (2 Q' I(h) - h) w.
    double deriv_times_w(std::size_t i) const {
        double t = pts_[i];
        return 2.0 * w_.Qp(t) * value_times_w(i) - h_(t) * std::exp(-qv_[i]);
    }

  private:
    double unshift(std::size_t i, double shift) const {
        double s = suffix_[i];
        if (s == 0.0) return 0.0;
        return (s > 0 ? 1.0 : -1.0) * std::exp(shift + std::log(std::abs(s)));
    }

    double gap_integral(double a, double b) const {
        auto f = [&](double u) { return h_(u) * std::exp(-2.0 * w_.Q(u)); };
        int panels = std::max(1, int((b - a) / 0.05));
        panels = std::min(panels, 64);
        double s = 0.0, step = (b - a) / panels;
        for (int p = 0; p < panels; ++p) s += gl_integrate(f, a + p * step, a + (p + 1) * step, 8);
        return s;
    }

    void compute() {
        const std::size_t n = pts_.size();
        qv_.resize(n);
        for (std::size_t i = 0; i < n; ++i) qv_[i] = w_.Q(pts_[i]);
        suffix_.assign(n, 0.0);
        // Split index: first point >= 0 (or n when all negative).
        std::size_t split = 0;
        while (split < n && pts_[split] < 0.0) ++split;

        // Suffix sums from the far right tail down to the split.
        if (split < n) {
            double top = pts_[n - 1];
            double rtail = w_.Q_inverse(w_.Q(top) + 40.0);
            double acc = gap_integral(top, rtail);
            suffix_[n - 1] = acc;
            for (std::size_t i = n - 1; i > split; --i) {
                acc += gap_integral(pts_[i - 1], pts_[i]);
                suffix_[i - 1] = acc;
            }
        }
        if (split == 0) return;

        if (zero_mean_) {
            // Prefix sums from the far left tail; int_t^inf = -int_{-inf}^t.
            double bot = pts_[0];
            double ltail = -w_.Q_inverse(w_.Q(bot) + 40.0);
            double acc = gap_integral(ltail, bot);
            suffix_[0] = -acc;
            for (std::size_t i = 1; i < split; ++i) {
                acc += gap_integral(pts_[i - 1], pts_[i]);
                suffix_[i] = -acc;
            }
        } else {
            // Continue the suffix sweep across the bulk; fine without the
            // mean-zero cancellation because the value itself is bulk-sized.
            double acc;
            if (split < n) {
                acc = suffix_[split];
                acc += gap_integral(pts_[split - 1], pts_[split]);
            } else {
                double top = pts_[n - 1];
                double rtail = w_.Q_inverse(w_.Q(top) + 40.0);
                acc = gap_integral(top, rtail);
            }
            suffix_[split - 1] = acc;
            for (std::size_t i = split - 1; i > 0; --i) {
                acc += gap_integral(pts_[i - 1], pts_[i]);
                suffix_[i - 1] = acc;
            }
        }
    }

    const Weight& w_;
    RealFn h_;
    bool zero_mean_;
    std::vector<double> pts_;
    std::vector<double> qv_;
    std::vector<double> suffix_;
};

}  // namespace expw
