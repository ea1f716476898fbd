#pragma once

// Exponential weights w = exp(-Q) on the real line.
//
// Q is even, nonnegative, Q(0) = 0, and convex away from the origin. The
// regularity function T(x) = x Q'(x) / Q(x) separates the two supported
// regimes: T bounded (Freud type, Q = |x|^alpha) and T unbounded (Erdos
// type, Q = |x|^u (exp_l(|x|^alpha) - exp_l(0)) with iterated exponentials).
// All other modules consume weights through this interface only.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace expw {

using RealFn = std::function<double(double)>;

enum class WeightFamily { Freud, ErdosExpL, Custom };

// Value of Q with an overflow flag: iterated exponentials saturate instead of
// producing inf, and callers that integrate must stay inside a radius where
// the flag is clear.
struct QValue {
    double value = 0.0;
    bool overflow = false;
};

namespace detail {

constexpr double kExpArgMax = 700.0;   // exp() overflows just above 709
constexpr double kSaturated = 1e300;

// exp_l(t) - exp_l(0) without cancellation, via the exact recursion
//   D_j(t) = exp_j(0) * expm1(D_{j-1}(t)),  D_0 = t.
// The first derivative is prod_{j<=l} exp_j(t); the second multiplies that
// by 1 + e_1 + e_1 e_2 + ... with e_j = exp_j(t).
struct ExpLDerivs {
    QValue core;  // exp_l(t) - exp_l(0)
    QValue d1, d2;
};

inline ExpLDerivs exp_iter_derivs(double t, int l) {
    ExpLDerivs out;
    std::vector<double> e(l, 0.0);
    double d = t;     // D_{j-1}
    double cj = 0.0;  // exp_{j-1}(0)
    bool sat = false;
    for (int j = 0; j < l; ++j) {
        if (d > kExpArgMax) {
            sat = true;
            break;
        }
        cj = std::exp(cj);  // exp_j(0)
        d = cj * std::expm1(d);
        e[j] = d + cj;  // exp_j(t)
    }
    if (sat) {
        out.core = {kSaturated, true};
        out.d1 = {kSaturated, true};
        out.d2 = {kSaturated, true};
        return out;
    }
    out.core = {d, false};
    double prod = 1.0, sum = 0.0;
    // sum accumulates prod_{i<j} e_i as j runs over stages.
    for (int j = 0; j < l; ++j) {
        sum += prod;
        if (prod > kSaturated / (e[j] + 1.0)) {
            out.d1 = {kSaturated, true};
            out.d2 = {kSaturated, true};
            return out;
        }
        prod *= e[j];
    }
    out.d1 = {prod, false};
    if (prod > kSaturated / (sum + 1.0)) {
        out.d2 = {kSaturated, true};
    } else {
        out.d2 = {prod * sum, false};
    }
    return out;
}

}  // namespace detail

class Weight {
  public:
    static Weight freud(double alpha) {
        if (!(alpha > 0.0)) throw std::invalid_argument("freud: alpha must be > 0");
        Weight w;
        w.family_ = WeightFamily::Freud;
        w.alpha_ = alpha;
        w.lambda_exp_ = 1.0;
        w.Lambda_ = alpha;
        return w;
    }

    static Weight erdos_expl(double u, double alpha, int l) {
        if (u < 0.0 || !(alpha > 0.0) || !(alpha + u > 1.0))
            throw std::invalid_argument("erdos_expl: need u >= 0, alpha > 0, alpha + u > 1");
        if (l < 1 || l > 3) throw std::invalid_argument("erdos_expl: l must be in 1..3");
        Weight w;
        w.family_ = WeightFamily::ErdosExpL;
        w.u_ = u;
        w.alpha_ = alpha;
        w.l_ = l;
        w.lambda_exp_ = 1.5;
        w.Lambda_ = u + alpha;
        return w;
    }

    static Weight custom(RealFn q, RealFn q1, RealFn q2, double lambda_exp = 1.0) {
        Weight w;
        w.family_ = WeightFamily::Custom;
        w.cq_ = std::move(q);
        w.cq1_ = std::move(q1);
        w.cq2_ = std::move(q2);
        w.lambda_exp_ = lambda_exp;
        w.Lambda_ = 1.0;
        return w;
    }

    WeightFamily family() const { return family_; }
    double alpha() const { return alpha_; }
    double u() const { return u_; }
    int l() const { return l_; }
    double lambda_exp() const { return lambda_exp_; }
    double Lambda() const { return Lambda_; }

    QValue Q_checked(double x) const {
        const double ax = std::abs(x);
        switch (family_) {
            case WeightFamily::Freud: {
                double lv = alpha_ * std::log(ax);
                if (ax == 0.0) return {0.0, false};
                if (lv > detail::kExpArgMax) return {detail::kSaturated, true};
                return {std::pow(ax, alpha_), false};
            }
            case WeightFamily::ErdosExpL: {
                if (ax == 0.0) return {0.0, false};
                auto d = detail::exp_iter_derivs(std::pow(ax, alpha_), l_);
                if (d.core.overflow) return d.core;
                double core = d.core.value;
                double pu = (u_ == 0.0) ? 1.0 : std::pow(ax, u_);
                if (pu > 1.0 && core > detail::kSaturated / pu) return {detail::kSaturated, true};
                return {pu * core, false};
            }
            case WeightFamily::Custom: {
                double v = cq_(x);
                return {v, !std::isfinite(v)};
            }
        }
        return {0.0, true};
    }

    double Q(double x) const { return Q_checked(x).value; }

    // First derivative; odd in x.
    double Qp(double x) const {
        const double ax = std::abs(x);
        const double sgn = (x > 0.0) ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
        switch (family_) {
            case WeightFamily::Freud:
                if (ax == 0.0) return 0.0;
                return sgn * alpha_ * std::pow(ax, alpha_ - 1.0);
            case WeightFamily::ErdosExpL: {
                if (ax == 0.0) return 0.0;
                auto d = detail::exp_iter_derivs(std::pow(ax, alpha_), l_);
                if (d.core.overflow || d.d1.overflow) return sgn * detail::kSaturated;
                double core = d.core.value;
                double term1 = (u_ == 0.0) ? 0.0 : u_ * std::pow(ax, u_ - 1.0) * core;
                double term2 = alpha_ * std::pow(ax, u_ + alpha_ - 1.0) * d.d1.value;
                return sgn * (term1 + term2);
            }
            case WeightFamily::Custom:
                return cq1_(x);
        }
        return 0.0;
    }

    // Second derivative; even in x, positive away from 0 for supported
    // families. Not defined at x = 0 when u + alpha < 2.
    double Qpp(double x) const {
        const double ax = std::abs(x);
        switch (family_) {
            case WeightFamily::Freud:
                if (ax == 0.0) return (alpha_ == 2.0) ? 2.0 : (alpha_ > 2.0 ? 0.0 : std::numeric_limits<double>::infinity());
                return alpha_ * (alpha_ - 1.0) * std::pow(ax, alpha_ - 2.0);
            case WeightFamily::ErdosExpL: {
                if (ax == 0.0) return std::numeric_limits<double>::quiet_NaN();
                auto d = detail::exp_iter_derivs(std::pow(ax, alpha_), l_);
                if (d.core.overflow || d.d2.overflow) return detail::kSaturated;
                double core = d.core.value;
                double t1 = (u_ == 0.0) ? 0.0 : u_ * (u_ - 1.0) * std::pow(ax, u_ - 2.0) * core;
                double t2 = alpha_ * (2.0 * u_ + alpha_ - 1.0) * std::pow(ax, u_ + alpha_ - 2.0) * d.d1.value;
                double t3 = alpha_ * alpha_ * std::pow(ax, u_ + 2.0 * alpha_ - 2.0) * d.d2.value;
                return t1 + t2 + t3;
            }
            case WeightFamily::Custom:
                return cq2_(x);
        }
        return 0.0;
    }

    double log_w(double x) const { return -Q(x); }
    double w(double x) const { return std::exp(-Q(x)); }

    // T(x) = x Q'(x) / Q(x), even in x. At x = 0 the Freud value is alpha
    // exactly; Erdos families use the evaluation at 1e-6 as the limit.
    double T(double x) const {
        const double ax = std::abs(x);
        switch (family_) {
            case WeightFamily::Freud:
                return alpha_;
            case WeightFamily::ErdosExpL: {
                double t = (ax == 0.0) ? 1e-6 : ax;
                return t * Qp(t) / Q(t);
            }
            case WeightFamily::Custom: {
                if (ax == 0.0) throw std::domain_error("T: x = 0 undefined for custom weights");
                return ax * Qp(ax) / Q(ax);
            }
        }
        return 0.0;
    }

    bool erdos_type() const { return family_ == WeightFamily::ErdosExpL; }

    // Smallest radius with Q(r) >= q, by bracketing + bisection.
    double Q_inverse(double q) const {
        if (q <= 0.0) return 0.0;
        double hi = 1.0;
        int guard = 0;
        while (Q(hi) < q) {
            hi *= 2.0;
            if (++guard > 600) throw std::runtime_error("Q_inverse: no bracket");
        }
        double lo = 0.0;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            if (Q(mid) < q)
                lo = mid;
            else
                hi = mid;
            if (hi - lo <= 1e-14 * hi) break;
        }
        return hi;
    }

    std::string name() const {
        std::ostringstream os;
        switch (family_) {
            case WeightFamily::Freud:
                os << "freud:" << alpha_;
                break;
            case WeightFamily::ErdosExpL:
                // underscore separators keep the name CSV-safe
                os << "erdos:" << u_ << "_" << alpha_ << "_" << l_;
                break;
            case WeightFamily::Custom:
                os << "custom";
                break;
        }
        return os.str();
    }

  private:
    WeightFamily family_ = WeightFamily::Freud;
    double alpha_ = 2.0;
    double u_ = 0.0;
    int l_ = 1;
    double lambda_exp_ = 1.0;
    double Lambda_ = 2.0;
    RealFn cq_, cq1_, cq2_;
};

// ---------------------------------------------------------------------------
// Empirical class-membership report. The defining conditions cannot be proved
// numerically; each is sampled over a grid and the observed constants are
// recorded so a run can be audited.
// ---------------------------------------------------------------------------

struct ClassReport {
    bool cond_a = false;  // Q(0) = 0, Q' finite, Q even on the grid
    bool cond_b = false;  // Q'' > 0 away from 0
    bool cond_c = false;  // Q increasing and unbounded along the grid
    bool cond_d = false;  // T quasi-increasing and T >= Lambda > 1
    bool cond_e = false;  // Q'' Q / Q'^2 bounded above, and below away from 0

    double lambda_emp = 0.0;          // min T over the grid
    double quasi_increasing_c = 0.0;  // max over x < y of T(x)/T(y)
    double cond_e_upper = 0.0;        // sup Q'' Q / Q'^2
    double cond_e_lower = 0.0;        // inf Q'' Q / Q'^2 for |x| >= 1
    double f_lambda_sup = 0.0;        // sup_{|x| >= 1} |Q'| / Q^lambda
    bool f_lambda_bounded = false;
    double t_growth_ratio = 0.0;      // T(x_max) / T(1): unboundedness proxy
    bool t_unbounded_flag = false;

    bool pass() const { return cond_a && cond_b && cond_c && cond_d && cond_e; }
};

// Largest |x| at which Q still evaluates without saturation, times a margin.
// The classification proxy needs T out to x >= 4 where possible, even though
// w itself has long underflowed there.
inline double class_grid_radius(const Weight& w, double integration_radius) {
    double hi = 1.0;
    while (!w.Q_checked(hi).overflow && hi < 1e6) hi *= 2.0;
    double lo = hi / 2.0;
    if (hi >= 1e6) {
        lo = 1e6;
    } else {
        for (int it = 0; it < 60; ++it) {
            double mid = 0.5 * (lo + hi);
            if (w.Q_checked(mid).overflow)
                hi = mid;
            else
                lo = mid;
        }
    }
    return std::min(0.9 * lo, std::max(6.0, integration_radius));
}

// Logarithmically spaced symmetric grid on [-radius, radius] \ {0}.
inline std::vector<double> default_class_grid(double radius, int points_per_side = 256) {
    std::vector<double> g;
    g.reserve(2 * points_per_side);
    const double lo = std::log(1e-3), hi = std::log(radius);
    for (int i = 0; i < points_per_side; ++i) {
        double x = std::exp(lo + (hi - lo) * i / double(points_per_side - 1));
        g.push_back(-x);
    }
    for (int i = points_per_side - 1; i >= 0; --i) g.push_back(-g[points_per_side - 1 - i]);
    std::sort(g.begin(), g.end());
    return g;
}

inline ClassReport check_class(const Weight& w, const std::vector<double>& grid) {
    ClassReport r;
    std::vector<double> pos;
    for (double x : grid)
        if (x > 0.0) pos.push_back(x);
    std::sort(pos.begin(), pos.end());
    if (pos.empty()) return r;

    // (a) origin value, evenness, finite first derivative.
    bool a_ok = std::abs(w.Q(0.0)) <= 1e-14;
    for (double x : pos) {
        double rel = std::max(1.0, std::abs(w.Q(x)));
        if (std::abs(w.Q(x) - w.Q(-x)) > 1e-12 * rel) a_ok = false;
        if (!std::isfinite(w.Qp(x))) a_ok = false;
    }
    r.cond_a = a_ok;

    // (b) strict convexity away from the origin.
    bool b_ok = true;
    for (double x : pos)
        if (!(w.Qpp(x) > 0.0)) b_ok = false;
    r.cond_b = b_ok;

    // (c) monotone growth as an unboundedness proxy.
    bool c_ok = true;
    for (std::size_t i = 1; i < pos.size(); ++i)
        if (!(w.Q(pos[i]) > w.Q(pos[i - 1]))) c_ok = false;
    if (!(w.Q(pos.back()) > 10.0 * std::max(1e-30, w.Q(pos.front())))) c_ok = false;
    r.cond_c = c_ok;

    // (d) T >= Lambda > 1 and quasi-increasing.
    double tmin = std::numeric_limits<double>::infinity();
    double quasi = 0.0;
    std::vector<double> tv(pos.size());
    for (std::size_t i = 0; i < pos.size(); ++i) {
        tv[i] = w.T(pos[i]);
        tmin = std::min(tmin, tv[i]);
    }
    double run_max = 0.0;
    for (std::size_t i = 0; i < pos.size(); ++i) {
        // max_{x <= y} T(x)/T(y) equals max over y of (running max of T)/T(y).
        run_max = std::max(run_max, tv[i]);
        quasi = std::max(quasi, run_max / tv[i]);
    }
    r.lambda_emp = tmin;
    r.quasi_increasing_c = quasi;
    r.cond_d = (tmin > 1.0 + 1e-9) && (quasi <= 10.0);

    // (e) S(x) = Q''(x) Q(x) / Q'(x)^2 bounded above everywhere and bounded
    // below outside [-1, 1].
    double s_hi = 0.0, s_lo = std::numeric_limits<double>::infinity();
    for (double x : pos) {
        double qp = w.Qp(x);
        if (qp == 0.0) continue;
        double s = w.Qpp(x) * w.Q(x) / (qp * qp);
        s_hi = std::max(s_hi, s);
        if (x >= 1.0) s_lo = std::min(s_lo, s);
    }
    r.cond_e_upper = s_hi;
    r.cond_e_lower = s_lo;
    r.cond_e = (s_hi <= 100.0) && (s_lo >= 1e-2);

    // F_lambda: sup over |x| >= 1 of |Q'| / Q^lambda.
    double fl = 0.0;
    for (double x : pos)
        if (x >= 1.0) fl = std::max(fl, std::abs(w.Qp(x)) / std::pow(w.Q(x), w.lambda_exp()));
    r.f_lambda_sup = fl;
    r.f_lambda_bounded = std::isfinite(fl) && fl <= 1e6;

    // Freud/Erdos classification proxy.
    double t1 = w.T(std::min(1.0, pos.back()));
    r.t_growth_ratio = tv.back() / t1;
    r.t_unbounded_flag = (pos.back() >= 4.0) && (r.t_growth_ratio > 10.0);
    return r;
}

// JSON schema used by the CLI config: {"family": "freud"|"erdos", ...}.
inline void to_json(nlohmann::json& j, const Weight& w) {
    switch (w.family()) {
        case WeightFamily::Freud:
            j = nlohmann::json{{"family", "freud"}, {"alpha", w.alpha()}};
            break;
        case WeightFamily::ErdosExpL:
            j = nlohmann::json{{"family", "erdos"}, {"u", w.u()}, {"alpha", w.alpha()}, {"l", w.l()}};
            break;
        case WeightFamily::Custom:
            throw std::invalid_argument("custom weights are not serializable");
    }
}

inline void from_json(const nlohmann::json& j, Weight& w) {
    const std::string fam = j.at("family").get<std::string>();
    if (fam == "freud") {
        w = Weight::freud(j.at("alpha").get<double>());
    } else if (fam == "erdos") {
        w = Weight::erdos_expl(j.at("u").get<double>(), j.at("alpha").get<double>(),
                               j.value("l", 1));
    } else {
        throw std::invalid_argument("unknown weight family: " + fam);
    }
}

// Compact CLI form: "freud:ALPHA" or "erdos:U,ALPHA,L".
inline Weight parse_weight(const std::string& s) {
    auto colon = s.find(':');
    std::string fam = s.substr(0, colon);
    std::string rest = (colon == std::string::npos) ? "" : s.substr(colon + 1);
    auto nums = [&rest]() {
        std::vector<double> v;
        for (char& c : rest)
            if (c == '_') c = ',';
        std::stringstream ss(rest);
        std::string tok;
        while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
        return v;
    }();
    if (fam == "freud") {
        if (nums.size() != 1) throw std::invalid_argument("freud weight needs one parameter, e.g. freud:2");
        return Weight::freud(nums[0]);
    }
    if (fam == "erdos") {
        if (nums.empty()) return Weight::erdos_expl(0.0, 2.0, 1);
        if (nums.size() != 3) throw std::invalid_argument("erdos weight needs u,alpha,l, e.g. erdos:0,2,1");
        return Weight::erdos_expl(nums[0], nums[1], int(nums[2]));
    }
    throw std::invalid_argument("unknown weight: " + s);
}

}  // namespace expw
