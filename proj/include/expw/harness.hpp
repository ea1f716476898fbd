#pragma once

// Verification experiments: each one exercises a recorded inequality of the
// simultaneous-approximation theory on a desk-scale battery and emits a
// VerifyReport. "Bounded constant" claims are operationalized as band
// membership plus max/median stability, since the theory fixes no numeric
// constants.

#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "expw/approx.hpp"
#include "expw/battery.hpp"
#include "expw/operators.hpp"
#include "expw/primitive.hpp"
#include "expw/report.hpp"
#include "expw/tail_transform.hpp"

namespace expw {

struct ExperimentConfig {
    Weight weight = Weight::erdos_expl(0.0, 2.0, 1);
    std::vector<Lp> ps = {Lp::two, Lp::inf};
    int n_min = 4;
    int n_max = 16;
    std::vector<std::string> fns = {"sin", "xgauss", "arctan"};
    double band = 20.0;       // per-row ratio band [1/band, band]
    double stability = 10.0;  // cross-n max/median ceiling
    std::string outdir = "out";

    void validate() const {
        if (n_min < 1 || n_max < n_min) throw std::invalid_argument("config: bad n range");
        if (2 * n_max > 40)
            throw std::invalid_argument("config: n_max above 20 needs basis degrees past 40");
        for (const auto& f : fns) battery_fn(f);
    }
};

// Shared per-weight state: recurrence table at the full supported degree and
// a cache of evaluation grids.
class WeightContext {
  public:
    explicit WeightContext(const Weight& w, int max_degree = 40)
        : weight_(w), mrs_(w), rec_(w, mrs_, max_degree) {}

    const Weight& weight() const { return weight_; }
    const MrsTable& mrs() const { return rec_.mrs(); }
    const RecurrenceTable& rec() const { return rec_; }

    const NormGrid& grid(int degree, int min_inner = 0) {
        auto key = std::make_pair(degree, min_inner);
        auto it = grids_.find(key);
        if (it == grids_.end())
            it = grids_.emplace(key, make_norm_grid(rec_, degree, min_inner)).first;
        return it->second;
    }

  private:
    Weight weight_;
    MrsTable mrs_;
    RecurrenceTable rec_;
    std::map<std::pair<int, int>, NormGrid> grids_;
};

namespace detail {

// || (f - P) w ||_p with the polynomial evaluated through the weighted
// recurrence; p = 2 goes through the master rule.
inline double fn_minus_poly_norm(const RecurrenceTable& rec, const NormGrid& g, const RealFn& f,
                                 const BasisPoly& P, Lp p) {
    if (p == Lp::two) {
        const QuadRule& rule = rec.rule();
        double s = 0.0;
        const std::size_t n = rule.size();
        for (std::size_t i = 0; i < n; ++i) {
            double r = f(rule.nodes[i]) * rule.wval[i] - P.eval_weighted(rule.nodes[i]);
            s += rule.gl_weight[i] * r * r;
        }
        return std::sqrt(std::max(0.0, s));
    }
    std::vector<double> rw(g.nodes.size(), 0.0);
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        rw[i] = f(g.nodes[i]) * g.wv[i] - P.eval_weighted(g.nodes[i]);
    return weighted_norm_samples(rw, p, g);
}

inline double poly_norm(const RecurrenceTable& rec, const NormGrid& g, const BasisPoly& P, Lp p) {
    return fn_minus_poly_norm(rec, g, [](double) { return 0.0; }, P, p);
}

// Group rows by (f, p), then flag every row of a group whose ratio sequence
// is unstable across n.
inline void apply_group_stability(VerifyReport& rep, double stability) {
    std::map<std::string, std::vector<double>> groups;
    for (const auto& r : rep.rows)
        if (!r.exact_case) groups[r.fn + "|" + r.p].push_back(r.ratio);
    std::map<std::string, bool> ok;
    for (const auto& [key, ratios] : groups) {
        double mx = 0.0;
        for (double v : ratios) mx = std::max(mx, v);
        double med = median_of(ratios);
        bool good = std::isfinite(mx) && (med == 0.0 ? mx == 0.0 : mx / med <= stability);
        ok[key] = good;
        std::ostringstream os;
        os << fmt17(mx) << " median=" << fmt17(med);
        rep.header.emplace_back("max_ratio(" + key + ")", os.str());
    }
    for (auto& r : rep.rows) {
        if (r.exact_case) continue;
        auto it = ok.find(r.fn + "|" + r.p);
        if (it != ok.end() && !it->second) {
            r.pass = false;
            if (r.note.empty()) r.note = "ratio-unstable-across-n";
        }
    }
}

inline void header_common(VerifyReport& rep, WeightContext& ctx, const ExperimentConfig& cfg) {
    rep.header.emplace_back("weight", ctx.weight().name());
    rep.header.emplace_back("band", fmt17(cfg.band));
    rep.header.emplace_back("stability", fmt17(cfg.stability));
    rep.header.emplace_back("eta_n_assumption", "eta_n := delta_n = (n T(a_n))^(-2/3)");
    double radius = ctx.rec().rule().radius;
    ClassReport cr = check_class(ctx.weight(), default_class_grid(class_grid_radius(ctx.weight(), radius)));
    rep.header.emplace_back("class_pass", cr.pass() ? "1" : "0");
    rep.header.emplace_back("class_lambda", fmt17(cr.lambda_emp));
    rep.header.emplace_back("f_lambda_sup", fmt17(cr.f_lambda_sup));
    std::vector<double> ns;
    for (int n = std::max(1, cfg.n_min); n <= cfg.n_max; ++n) ns.push_back(n);
    auto c14 = ctx.mrs().condition14(ns);
    double c14max = 0.0;
    for (auto& [n, v] : c14) c14max = std::max(c14max, v);
    rep.header.emplace_back("cond14_max", fmt17(c14max));
    rep.header.emplace_back("hypothesis", ctx.weight().erdos_type()
                                              ? "erdos"
                                              : "freud: outside theorem hypothesis, comparison only");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Derivative bound with the best polynomial: ratio of ||w (f' - P')||_p to
// T^{3/4}(a_n) E_{p,n-1}(w; f').
// ---------------------------------------------------------------------------
inline VerifyReport verify_theorem_1_1(WeightContext& ctx, const ExperimentConfig& cfg) {
    cfg.validate();
    VerifyReport rep;
    rep.experiment = "theorem-1.1";
    detail::header_common(rep, ctx, cfg);
    const RecurrenceTable& rec = ctx.rec();
    for (const auto& fname : cfg.fns) {
        const TestFn& tf = battery_fn(fname);
        for (Lp p : cfg.ps) {
            if (p == Lp::inf) {
                // Side condition: w f' vanishing at infinity, sampled past a_{2 n_max}.
                double a2n = ctx.mrs().a(2.0 * cfg.n_max);
                double worst = 0.0;
                for (double fac : {1.5, 2.0, 2.5}) {
                    double x = a2n * fac;
                    double lw = ctx.weight().log_w(x);
                    double v = std::abs(tf.d1(x)) * std::exp(std::max(lw, -745.0));
                    worst = std::max(worst, v);
                }
                rep.header.emplace_back("wfprime_tail(" + fname + ")", fmt17(worst));
            }
            for (int n = cfg.n_min; n <= cfg.n_max; ++n) {
                const NormGrid& gn = ctx.grid(n);
                BestPoly bp = best_poly(rec, tf.f, p, n, gn);
                BasisPoly dP = bp.poly.derivative();
                double num = detail::fn_minus_poly_norm(rec, gn, tf.d1, dP, p);
                const NormGrid& gm = ctx.grid(std::max(n - 1, 0));
                BestPoly bq = best_poly(rec, tf.d1, p, n - 1, gm);
                double an = ctx.mrs().a(double(n));
                double tan = ctx.weight().T(an);
                VerifyRow row;
                row.weight = ctx.weight().name();
                row.fn = fname;
                row.p = lp_name(p);
                row.n = n;
                row.norm_err = bp.error;
                row.norm_err_deriv = num;
                row.e_f = bp.error;
                row.e_fprime = bq.error;
                row.t_an = tan;
                row.a_n = an;
                row.bound_factor = std::pow(tan, 0.75) * bq.error;
                double fprime_scale = weighted_norm(tf.d1, p, gm);
                if (bq.error <= std::max(1e-12 * fprime_scale, 1e-14)) {
                    row.exact_case = true;
                    row.ratio = 0.0;
                    row.pass = num <= 1e-8;
                    row.note = "exact-case";
                } else {
                    row.ratio = num / row.bound_factor;
                    row.pass = std::isfinite(row.ratio);
                }
                rep.rows.push_back(std::move(row));
            }
        }
    }
    detail::apply_group_stability(rep, cfg.stability);
    return rep;
}

// ---------------------------------------------------------------------------
// Perturbed near-best polynomials: ||w (f' - P')||_p against
// C (T^{3/4} E_{p,n}(w; f') + (n/a_n) T^{1/2} eta).
// ---------------------------------------------------------------------------
inline VerifyReport verify_theorem_4_1(WeightContext& ctx, const ExperimentConfig& cfg,
                                       const std::vector<double>& eta_mults = {1.0, 10.0}) {
    cfg.validate();
    VerifyReport rep;
    rep.experiment = "theorem-4.1";
    detail::header_common(rep, ctx, cfg);
    const RecurrenceTable& rec = ctx.rec();
    for (const auto& fname : cfg.fns) {
        const TestFn& tf = battery_fn(fname);
        for (Lp p : cfg.ps) {
            for (int n = cfg.n_min; n <= cfg.n_max; ++n) {
                const NormGrid& gn = ctx.grid(n);
                BestPoly bp = best_poly(rec, tf.f, p, n, gn);
                double eprime = best_poly(rec, tf.d1, p, n, gn).error;
                double an = ctx.mrs().a(double(n));
                double tan = ctx.weight().T(an);
                BasisPoly pn = BasisPoly::unit(rec, n);
                double pn_norm = detail::poly_norm(rec, gn, pn, p);
                for (double mult : eta_mults) {
                    BasisPoly P = bp.poly;
                    double eta = bp.error;
                    if (mult != 1.0) {
                        double target = mult * bp.error;
                        // ||(f - P - eps p_n) w|| is monotone for eps past the
                        // best error; bisect for the target level.
                        double lo = 0.0, hi = (target + bp.error) * 2.0 / std::max(pn_norm, 1e-300);
                        auto level = [&](double eps) {
                            BasisPoly cand = bp.poly + pn * eps;
                            return detail::fn_minus_poly_norm(rec, gn, tf.f, cand, p);
                        };
                        while (level(hi) < target) hi *= 2.0;
                        for (int it = 0; it < 80; ++it) {
                            double mid = 0.5 * (lo + hi);
                            if (level(mid) < target)
                                lo = mid;
                            else
                                hi = mid;
                        }
                        double eps = 0.5 * (lo + hi);
                        P = bp.poly + pn * eps;
                        eta = level(eps);
                    }
                    BasisPoly dP = P.derivative();
                    double num = detail::fn_minus_poly_norm(rec, gn, tf.d1, dP, p);
                    double bound = std::pow(tan, 0.75) * eprime +
                                   (double(n) / an) * std::sqrt(tan) * eta;
                    VerifyRow row;
                    row.weight = ctx.weight().name();
                    row.fn = fname;
                    row.p = lp_name(p);
                    row.n = n;
                    row.norm_err = eta;
                    row.norm_err_deriv = num;
                    row.e_f = bp.error;
                    row.e_fprime = eprime;
                    row.t_an = tan;
                    row.a_n = an;
                    row.bound_factor = bound;
                    row.ratio = num / bound;
                    row.pass = std::isfinite(row.ratio);
                    std::ostringstream os;
                    os << "eta=" << mult << "E";
                    row.note = os.str();
                    rep.rows.push_back(std::move(row));
                }
                // Markov-Bernstein companion: ||p_n' w||_p vs (n sqrt(T)/a_n) ||p_n w||_p.
                BasisPoly dpn = pn.derivative();
                double mb = detail::poly_norm(rec, gn, dpn, p) /
                            ((double(n) * std::sqrt(tan) / an) * pn_norm);
                VerifyRow mrow;
                mrow.weight = ctx.weight().name();
                mrow.fn = "p_n";
                mrow.p = lp_name(p);
                mrow.n = n;
                mrow.ratio = mb;
                mrow.t_an = tan;
                mrow.a_n = an;
                mrow.pass = std::isfinite(mb) && mb <= cfg.band && mb >= 1.0 / cfg.band;
                mrow.note = "markov-bernstein";
                rep.rows.push_back(std::move(mrow));
            }
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Higher derivatives: ratio against T^{(2i+1)/4}(a_n) E_{p,n-i}(w; f^{(i)}).
// ---------------------------------------------------------------------------
inline VerifyReport verify_corollary_4_2(WeightContext& ctx, const ExperimentConfig& cfg, int j) {
    cfg.validate();
    if (j < 1 || j > 3) throw std::invalid_argument("corollary: derivative order must be 1..3");
    VerifyReport rep;
    rep.experiment = "corollary-4.2";
    detail::header_common(rep, ctx, cfg);
    rep.header.emplace_back("note",
                            "best P satisfies both hypothesis forms (C1 = 1, with or without T^{1/4})");
    const RecurrenceTable& rec = ctx.rec();
    for (const auto& fname : cfg.fns) {
        const TestFn& tf = battery_fn(fname);
        const std::function<double(double)> derivs[4] = {tf.f, tf.d1, tf.d2, tf.d3};
        for (Lp p : cfg.ps) {
            for (int n = cfg.n_min; n <= cfg.n_max; ++n) {
                const NormGrid& gn = ctx.grid(n);
                BestPoly bp = best_poly(rec, tf.f, p, n, gn);
                double an = ctx.mrs().a(double(n));
                double tan = ctx.weight().T(an);
                BasisPoly Pi = bp.poly;
                for (int i = 1; i <= j; ++i) {
                    Pi = Pi.derivative();
                    VerifyRow row;
                    row.weight = ctx.weight().name();
                    row.fn = fname;
                    row.p = lp_name(p);
                    row.n = n;
                    row.t_an = tan;
                    row.a_n = an;
                    std::ostringstream os;
                    os << "i=" << i;
                    row.note = os.str();
                    if (n - i < 1) {
                        row.exact_case = true;
                        row.note += ";skipped:n-i<1";
                        rep.rows.push_back(std::move(row));
                        continue;
                    }
                    double num = detail::fn_minus_poly_norm(rec, gn, derivs[i], Pi, p);
                    double Ei = best_poly(rec, derivs[i], p, n - i, ctx.grid(std::max(n - i, 1))).error;
                    row.norm_err = bp.error;
                    row.norm_err_deriv = num;
                    row.e_f = bp.error;
                    row.e_fprime = Ei;
                    row.bound_factor = std::pow(tan, (2.0 * i + 1.0) / 4.0) * Ei;
                    double scale = weighted_norm(derivs[i], p, gn);
                    if (Ei <= std::max(1e-12 * scale, 1e-14)) {
                        row.exact_case = true;
                        row.pass = num <= 1e-8;
                        row.note += ";exact-case";
                    } else {
                        row.ratio = num / row.bound_factor;
                        row.pass = std::isfinite(row.ratio);
                    }
                    rep.rows.push_back(std::move(row));
                }
            }
        }
    }
    // Stability per (f, p, i): fold i into the function key via the note.
    {
        std::map<std::string, std::vector<double>> groups;
        for (const auto& r : rep.rows)
            if (!r.exact_case) groups[r.fn + "|" + r.p + "|" + r.note].push_back(r.ratio);
        for (auto& r : rep.rows) {
            if (r.exact_case) continue;
            auto& v = groups[r.fn + "|" + r.p + "|" + r.note];
            double mx = 0.0;
            for (double x : v) mx = std::max(mx, x);
            double med = median_of(v);
            if (!(std::isfinite(mx) && (med == 0.0 ? mx == 0.0 : mx / med <= cfg.stability)))
                r.pass = false;
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Step functions in L^1: E_{1,2n-1}(w; chi_{(-inf,x]}) <= C (a_n/n) w(x).
// ---------------------------------------------------------------------------
inline VerifyReport verify_lemma_3_3(WeightContext& ctx, const ExperimentConfig& cfg) {
    VerifyReport rep;
    rep.experiment = "lemma-3.3";
    detail::header_common(rep, ctx, cfg);
    const RecurrenceTable& rec = ctx.rec();
    std::vector<int> ns;
    for (int n = std::max(2, cfg.n_min); n <= std::min(8, cfg.n_max); n += 4) ns.push_back(n);
    if (ns.empty()) ns = {4, 8};
    for (int n : ns) {
        double an = ctx.mrs().a(double(n));
        const NormGrid& g = ctx.grid(2 * n - 1, 4096);
        double chi_scale = weighted_norm([](double) { return 1.0; }, Lp::one, g);
        for (double frac : {0.0, 0.5, 1.0, 1.5}) {
            double x0 = frac * an;
            // Midpoint convention at the jump: a grid node landing exactly on
            // x0 (the x0 = 0 case) takes the value 1/2, which keeps the
            // discrete problem symmetric instead of leaving one unfittable
            // lone node.
            auto chi = [x0](double t) { return t < x0 ? 1.0 : (t == x0 ? 0.5 : 0.0); };
            BestPoly bp = best_poly(rec, chi, Lp::one, 2 * n - 1, g);
            double wx = ctx.weight().w(x0);
            VerifyRow row;
            row.weight = ctx.weight().name();
            row.fn = "step";
            row.p = "1";
            row.n = n;
            row.norm_err = bp.error;
            row.a_n = an;
            row.t_an = ctx.weight().T(an);
            row.bound_factor = (an / n) * wx;
            row.ratio = bp.error / row.bound_factor;
            std::ostringstream os;
            os << "x=" << frac << "a_n";
            row.note = os.str();
            if (row.bound_factor <= 1e-10 * chi_scale) {
                // Far tail: the bound sits below solver resolution, so the
                // row degrades to an absolute smallness check.
                row.exact_case = true;
                row.pass = bp.error <= 1e-9 * chi_scale;
                row.note += ";absolute-threshold";
            } else
                row.pass = std::isfinite(row.ratio) && row.ratio <= cfg.band;
            if (frac == 0.0) {
                // The constant 1/2 is an explicit feasible candidate.
                double cand = weighted_norm([&](double t) { return chi(t) - 0.5; }, Lp::one, g);
                if (bp.error > cand + 1e-8) {
                    row.pass = false;
                    row.note += ";beats-candidate-failed";
                }
            }
            rep.rows.push_back(std::move(row));
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Tail transform bounds: the recorded constants of the derivative estimate
// (3.11-style), the integration-by-parts identity, and the degree-weighted
// sup bound for h orthogonal to P_n.
// ---------------------------------------------------------------------------
inline VerifyReport verify_lemma_3_4(WeightContext& ctx, const ExperimentConfig& cfg) {
    VerifyReport rep;
    rep.experiment = "lemma-3.4";
    detail::header_common(rep, ctx, cfg);
    const RecurrenceTable& rec = ctx.rec();
    const Weight& w = ctx.weight();
    const QuadRule& rule = rec.rule();

    // Mean-zero battery: odd functions are exactly mean-zero; even ones are
    // centered with the master rule.
    struct HFn {
        std::string name;
        RealFn h;
    };
    std::vector<HFn> hs;
    {
        BasisPoly p1 = BasisPoly::unit(rec, 1), p2 = BasisPoly::unit(rec, 2);
        hs.push_back({"p1", [p1](double x) { return p1(x); }});
        hs.push_back({"p2", [p2](double x) { return p2(x); }});
        hs.push_back({"sin", [](double x) { return std::sin(x); }});
        hs.push_back({"xgauss", [](double x) { return x * std::exp(-0.5 * x * x); }});
        hs.push_back({"cubic", [](double x) { return x * x * x; }});
        double mu = rule.integrate([](double x) { return std::cos(x); }) /
                    rule.integrate([](double) { return 1.0; });
        hs.push_back({"cos-centered", [mu](double x) { return std::cos(x) - mu; }});
    }

    const NormGrid& g = ctx.grid(16);
    // Decimated grid keeps the tail-transform sweeps cheap.
    std::vector<double> pts;
    for (std::size_t i = 0; i < g.nodes.size(); i += 2) pts.push_back(g.nodes[i]);

    for (const auto& hf : hs) {
        TailTransform tt(w, hf.h, true, pts);
        // Norms of I'(h) w on the decimated grid (p = 2 via trapezoid there;
        // boundedness is the claim, not the last digit).
        std::vector<double> dv(pts.size(), 0.0);
        for (std::size_t i = 0; i < pts.size(); ++i) dv[i] = tt.deriv_times_w(i);
        for (Lp p : {Lp::one, Lp::two, Lp::inf}) {
            double num = 0.0;
            if (p == Lp::inf) {
                for (double v : dv) num = std::max(num, std::abs(v));
            } else {
                for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
                    double tw = 0.5 * (pts[i + 1] - pts[i - 1]);
                    double v = std::abs(dv[i]);
                    num += tw * (p == Lp::two ? v * v : v);
                }
                if (p == Lp::two) num = std::sqrt(num);
            }
            double den = weighted_norm(hf.h, p, g);
            VerifyRow row;
            row.weight = w.name();
            row.fn = hf.name;
            row.p = lp_name(p);
            row.norm_err_deriv = num;
            row.norm_err = den;
            row.ratio = num / den;
            row.pass = std::isfinite(row.ratio) && row.ratio <= cfg.band;
            row.note = "deriv-bound";
            rep.rows.push_back(std::move(row));
        }
        // Integration by parts against g0 = sin: int g0 h w^2 = int g0' I(h) w^2.
        {
            double lhs = rule.integrate([&](double t) { return std::sin(t) * hf.h(t); });
            std::vector<double> rp(rule.nodes);
            TailTransform ttr(w, hf.h, true, rp);
            double rhsv = 0.0;
            for (std::size_t i = 0; i < rp.size(); ++i)
                rhsv += rule.gl_weight[i] * std::cos(rp[i]) * ttr.value_times_w(i) * rule.wval[i];
            double scale = weighted_norm([](double t) { return std::sin(t); }, Lp::two, g) *
                           weighted_norm(hf.h, Lp::two, g);
            VerifyRow row;
            row.weight = w.name();
            row.fn = hf.name;
            row.p = "2";
            row.norm_err = lhs;
            row.norm_err_deriv = rhsv;
            row.ratio = std::abs(lhs - rhsv) / std::max(scale, 1e-300);
            row.pass = row.ratio <= 1e-6;
            row.note = "parts-identity";
            rep.rows.push_back(std::move(row));
        }
    }

    // h orthogonal to P_n: ||I(h) w||_inf <= C (a_n/n) ||h w||_inf.
    for (int n = cfg.n_min; n <= std::min(cfg.n_max, rec.max_degree() - 3); ++n) {
        BasisPoly h = BasisPoly::unit(rec, n + 1) + BasisPoly::unit(rec, n + 3);
        RealFn hf = [h](double x) { return h(x); };
        TailTransform tt(w, hf, true, pts);
        double num = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) num = std::max(num, std::abs(tt.value_times_w(i)));
        double den = 0.0;
        for (std::size_t i = 0; i < g.nodes.size(); ++i)
            den = std::max(den, std::abs(h.eval_weighted(g.nodes[i])));
        double an = ctx.mrs().a(double(n));
        VerifyRow row;
        row.weight = w.name();
        row.fn = "p_{n+1}+p_{n+3}";
        row.p = "inf";
        row.n = n;
        row.a_n = an;
        row.norm_err_deriv = num;
        row.norm_err = den;
        row.bound_factor = (an / n) * den;
        row.ratio = num / row.bound_factor;
        row.pass = std::isfinite(row.ratio) && row.ratio <= cfg.band;
        row.note = "tail-sup-bound";
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Near-best means: ||(f - v_n f) w||_p <= C T^{1/4}(a_n) E_{p,n}(w; f).
// ---------------------------------------------------------------------------
inline VerifyReport verify_lemma_3_6(WeightContext& ctx, const ExperimentConfig& cfg) {
    cfg.validate();
    VerifyReport rep;
    rep.experiment = "lemma-3.6";
    detail::header_common(rep, ctx, cfg);
    const RecurrenceTable& rec = ctx.rec();
    for (const auto& fname : cfg.fns) {
        const TestFn& tf = battery_fn(fname);
        for (Lp p : cfg.ps) {
            for (int n = cfg.n_min; n <= cfg.n_max; ++n) {
                const NormGrid& gn = ctx.grid(n);
                BasisPoly v = vallee_poussin(rec, tf.f, n);
                double num = detail::fn_minus_poly_norm(rec, gn, tf.f, v, p);
                double E = best_poly(rec, tf.f, p, n, gn).error;
                double an = ctx.mrs().a(double(n));
                double tan = ctx.weight().T(an);
                VerifyRow row;
                row.weight = ctx.weight().name();
                row.fn = fname;
                row.p = lp_name(p);
                row.n = n;
                row.norm_err = num;
                row.e_f = E;
                row.t_an = tan;
                row.a_n = an;
                row.bound_factor = std::pow(tan, 0.25) * E;
                double scale = weighted_norm(tf.f, p, gn);
                if (E <= std::max(1e-12 * scale, 1e-14)) {
                    row.exact_case = true;
                    row.pass = num <= 1e-8;
                    row.note = "exact-case";
                } else {
                    row.ratio = num / row.bound_factor;
                    row.pass = std::isfinite(row.ratio);
                }
                rep.rows.push_back(std::move(row));
            }
        }
    }
    detail::apply_group_stability(rep, cfg.stability);
    return rep;
}

// ---------------------------------------------------------------------------
// Scaling relations: MRS growth, zero spacing, Christoffel function size.
// ---------------------------------------------------------------------------
inline VerifyReport verify_asymptotics(WeightContext& ctx, const ExperimentConfig& cfg) {
    VerifyReport rep;
    rep.experiment = "asymptotics";
    detail::header_common(rep, ctx, cfg);
    const Weight& w = ctx.weight();
    const MrsTable& mrs = ctx.mrs();
    const double B = cfg.band;
    auto push = [&](const std::string& rel, double t, double ratio, const std::string& note = "") {
        VerifyRow row;
        row.weight = w.name();
        row.fn = rel;
        row.p = "-";
        row.n = int(t);
        row.ratio = ratio;
        row.pass = std::isfinite(ratio) && ratio >= 1.0 / B && ratio <= B;
        row.note = note;
        rep.rows.push_back(std::move(row));
    };
    for (double t = 4.0; t <= 256.0; t *= 2.0) {
        double at = mrs.a(t), a2t = mrs.a(2.0 * t);
        push("a_scaling", t, a2t / at);
        push("T_scaling", t, w.T(a2t) / w.T(at));
        push("Q_scaling", t, w.Q(a2t) / w.Q(at));
        push("Qp_scaling", t, w.Qp(a2t) / w.Qp(at));
        push("Qp_size", t, w.Qp(at) * at / (t * std::sqrt(w.T(at))));
        push("Q_size", t, w.Q(at) * std::sqrt(w.T(at)) / t);
        push("gap_vs_T", t, std::abs(1.0 - a2t / at) * w.T(at));
    }
    for (int n : {8, 16, 32}) {
        GaussData g = gauss_data(ctx.rec(), n);
        for (int k = 0; k + 1 < n; ++k) {
            double xk = g.zeros[std::size_t(k)], xk1 = g.zeros[std::size_t(k) + 1];
            double r = (xk - xk1) / mrs.phi(double(n), xk);
            push("zero_spacing", n, r, "k=" + std::to_string(k + 1));
        }
        double an = mrs.a(double(n));
        for (int s = -10; s <= 10; ++s) {
            double x = an * s / 10.5;
            double lam = ctx.rec().christoffel_weighted_ratio(n, x);  // lambda_n / w^2
            double r = lam / mrs.phi(double(n), x);
            push("christoffel_vs_band", n, r, "x=" + fmt17(x));
        }
    }
    return rep;
}

}  // namespace expw
