#pragma once

// Command-line front end. Subcommands: mrs, recurrence, gauss, approx-op,
// best, verify. Every run writes CSV plus a JSON summary; verify also emits
// two-column (n, ratio) plot files. Exit codes: 0 all checks passed,
// 1 numerical failure, 2 bad usage or config.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "expw/harness.hpp"

namespace expw {

namespace cli_detail {

inline std::vector<double> parse_list(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
    return v;
}

inline std::vector<Lp> parse_ps(const std::string& s) {
    std::vector<Lp> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok == "1")
            out.push_back(Lp::one);
        else if (tok == "2")
            out.push_back(Lp::two);
        else if (tok == "inf" || tok == "oo")
            out.push_back(Lp::inf);
        else
            throw CLI::ValidationError("--p", "p must be from {1,2,inf}");
    }
    return out;
}

inline void ensure_dir(const std::string& dir) { std::filesystem::create_directories(dir); }

struct RunOutput {
    std::vector<std::string> files;
    int pass = 0, fail = 0;
};

inline int finish(const std::string& outdir, const nlohmann::json& config, RunOutput& out) {
    write_summary(outdir + "/summary.json", config, out.files, out.pass, out.fail);
    return out.fail == 0 ? 0 : 1;
}

inline void emit_report(const VerifyReport& rep, const std::string& outdir, RunOutput& out) {
    std::string csv_name = "verify_" + rep.experiment + ".csv";
    rep.write_csv(outdir + "/" + csv_name);
    out.files.push_back(csv_name);
    for (const auto& r : rep.rows) (r.pass ? out.pass : out.fail)++;
    // Plot data per (f, p) with an n-series of ratios.
    std::map<std::string, std::vector<std::pair<double, double>>> series;
    for (const auto& r : rep.rows)
        if (!r.exact_case && r.n > 0) series[r.fn + "_p" + r.p].emplace_back(r.n, r.ratio);
    for (auto& [key, xy] : series) {
        std::string safe = key;
        for (char& c : safe)
            if (c == '{' || c == '}' || c == '+' || c == '/') c = '-';
        std::string name = "verify_" + rep.experiment + "_" + safe + ".dat";
        write_plot_data(outdir + "/" + name, xy);
        out.files.push_back(name);
    }
}

}  // namespace cli_detail

inline int cli_main(std::vector<std::string> args) {
    using namespace cli_detail;
    CLI::App app{"weighted polynomial approximation toolkit"};
    app.require_subcommand(1);

    std::string weight_str = "erdos:0,2,1";
    std::string outdir = "out";
    app.add_option("--weight", weight_str, "weight spec, e.g. freud:2 or erdos:0,2,1")
        ->capture_default_str();
    app.add_option("--out", outdir, "output directory")->capture_default_str();

    auto* c_mrs = app.add_subcommand("mrs", "scaling numbers a_x and diagnostics");
    std::string xs_str = "1,4,9";
    c_mrs->add_option("--x", xs_str, "comma list of x values")->capture_default_str();

    auto* c_rec = app.add_subcommand("recurrence", "recurrence coefficients b_k");
    int rec_degree = 40;
    c_rec->add_option("--degree", rec_degree, "max degree")->capture_default_str();

    auto* c_gauss = app.add_subcommand("gauss", "Gauss nodes and weights");
    int gauss_n = 8;
    c_gauss->add_option("--n", gauss_n, "rule size")->capture_default_str();

    auto* c_op = app.add_subcommand("approx-op", "evaluate s_n, v_n, or V_n on a grid");
    std::string op_f = "sin", op_kind = "vn", op_p = "2";
    int op_n = 8;
    c_op->add_option("--f", op_f, "battery function")->capture_default_str();
    c_op->add_option("--op", op_kind, "sn|vn|Vn")->capture_default_str();
    c_op->add_option("--n", op_n, "operator degree parameter")->capture_default_str();
    c_op->add_option("--p", op_p, "norm for the V_n constant")->capture_default_str();

    auto* c_best = app.add_subcommand("best", "best-approximation errors E_{p,n}");
    std::string best_f = "sin", best_p = "2";
    int best_nmin = 2, best_nmax = 10;
    c_best->add_option("--f", best_f, "battery function")->capture_default_str();
    c_best->add_option("--p", best_p, "comma list from {1,2,inf}")->capture_default_str();
    c_best->add_option("--nmin", best_nmin)->capture_default_str();
    c_best->add_option("--nmax", best_nmax)->capture_default_str();

    auto* c_verify = app.add_subcommand("verify", "run verification experiments");
    std::string v_theorem, v_lemma, v_corollary, v_p = "2,inf", v_config;
    bool v_asym = false, v_all = false;
    int v_nmin = 4, v_nmax = 16, v_j = 2;
    double v_band = 20.0, v_stability = 10.0;
    std::string v_fns = "sin,xgauss,arctan";
    c_verify->add_option("--theorem", v_theorem, "1.1 or 4.1");
    c_verify->add_option("--lemma", v_lemma, "3.3, 3.4 or 3.6");
    c_verify->add_option("--corollary", v_corollary, "4.2");
    c_verify->add_flag("--asymptotics", v_asym, "scaling relations");
    c_verify->add_flag("--all", v_all, "every experiment");
    c_verify->add_option("--p", v_p)->capture_default_str();
    c_verify->add_option("--nmin", v_nmin)->capture_default_str();
    c_verify->add_option("--nmax", v_nmax)->capture_default_str();
    c_verify->add_option("--j", v_j, "derivative order for corollary runs")->capture_default_str();
    c_verify->add_option("--band", v_band)->capture_default_str();
    c_verify->add_option("--stability", v_stability)->capture_default_str();
    c_verify->add_option("--functions", v_fns)->capture_default_str();
    c_verify->add_option("--config", v_config, "JSON config file (flags override)");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        Weight w = parse_weight(weight_str);
        ensure_dir(outdir);
        RunOutput out;
        nlohmann::json config;
        config["weight"] = w;
        config["command"] = app.get_subcommands().front()->get_name();

        if (*c_mrs) {
            MrsTable mrs(w);
            auto xs = parse_list(xs_str);
            config["x"] = xs;
            std::string path = outdir + "/mrs.csv";
            std::ofstream os(path);
            os << "x,a_x,T_a_x,delta_x,cond14_ratio\n";
            for (double x : xs) {
                double ax = mrs.a(x);
                double tx = w.T(ax);
                os << fmt17(x) << ',' << fmt17(ax) << ',' << fmt17(tx) << ','
                   << fmt17(mrs.delta(x)) << ',' << fmt17(tx / std::pow(x / ax, 2.0 / 3.0))
                   << "\n";
                out.pass++;
            }
            out.files.push_back("mrs.csv");
            return finish(outdir, config, out);
        }

        if (*c_rec) {
            config["degree"] = rec_degree;
            MrsTable mrs(w);
            RecurrenceTable rec(w, mrs, rec_degree);
            std::string path = outdir + "/recurrence.csv";
            std::ofstream os(path);
            os << "k,b_k\n";
            for (int k = 1; k <= rec.max_degree(); ++k)
                os << k << ',' << fmt17(rec.b(k)) << "\n";
            out.files.push_back("recurrence.csv");
            config["norm0"] = rec.norm0();
            out.pass = rec.max_degree();
            return finish(outdir, config, out);
        }

        if (*c_gauss) {
            config["n"] = gauss_n;
            MrsTable mrs(w);
            RecurrenceTable rec(w, mrs, std::max(gauss_n, 2));
            GaussData g = gauss_data(rec, gauss_n);
            std::string path = outdir + "/gauss.csv";
            std::ofstream os(path);
            os << "k,x_k_n,lambda_k_n\n";
            for (int k = 0; k < g.n; ++k)
                os << (k + 1) << ',' << fmt17(g.zeros[std::size_t(k)]) << ','
                   << fmt17(g.lambda[std::size_t(k)]) << "\n";
            out.files.push_back("gauss.csv");
            out.pass = g.n;
            return finish(outdir, config, out);
        }

        if (*c_op) {
            config["f"] = op_f;
            config["op"] = op_kind;
            config["n"] = op_n;
            WeightContext ctx(w);
            const TestFn& tf = battery_fn(op_f);
            Lp p = parse_ps(op_p).at(0);
            BasisPoly poly = BasisPoly::zero(ctx.rec());
            if (op_kind == "sn")
                poly = partial_sum(ctx.rec(), tf.f, op_n);
            else if (op_kind == "vn")
                poly = vallee_poussin(ctx.rec(), tf.f, op_n);
            else if (op_kind == "Vn")
                poly = primitive_vp(ctx.rec(), tf.f, tf.d1, op_n, p, ctx.grid(2 * op_n)).basis;
            else
                throw CLI::ValidationError("--op", "op must be sn, vn or Vn");
            double R = ctx.mrs().a(2.0 * op_n) * (1.0 + 2.0 * ctx.mrs().delta(2.0 * op_n));
            std::string path = outdir + "/approx_op.csv";
            std::ofstream os(path);
            os << "x,f,op,w,weighted_error\n";
            for (int i = 0; i <= 200; ++i) {
                double x = -R + 2.0 * R * i / 200.0;
                double fv = tf.f(x), pv = poly(x), wv = w.w(x);
                os << fmt17(x) << ',' << fmt17(fv) << ',' << fmt17(pv) << ',' << fmt17(wv) << ','
                   << fmt17(std::abs(fv - pv) * wv) << "\n";
            }
            out.files.push_back("approx_op.csv");
            out.pass = 201;
            return finish(outdir, config, out);
        }

        if (*c_best) {
            config["f"] = best_f;
            WeightContext ctx(w);
            const TestFn& tf = battery_fn(best_f);
            std::string path = outdir + "/best.csv";
            std::ofstream os(path);
            os << "f,n,p,E\n";
            for (Lp p : parse_ps(best_p))
                for (int n = best_nmin; n <= best_nmax; ++n) {
                    BestPoly bp = best_poly(ctx.rec(), tf.f, p, n, ctx.grid(n));
                    os << best_f << ',' << n << ',' << lp_name(p) << ',' << fmt17(bp.error)
                       << "\n";
                    out.pass++;
                }
            out.files.push_back("best.csv");
            return finish(outdir, config, out);
        }

        // verify
        ExperimentConfig cfg;
        cfg.weight = w;
        if (!v_config.empty()) {
            std::ifstream is(v_config);
            if (!is) throw std::invalid_argument("cannot read config " + v_config);
            nlohmann::json j;
            is >> j;
            if (j.contains("weight")) {
                if (j["weight"].is_string())
                    cfg.weight = parse_weight(j["weight"].get<std::string>());
                else
                    cfg.weight = j["weight"].get<Weight>();
            }
            if (j.contains("p")) {
                std::string ps;
                for (const auto& e : j["p"]) ps += (ps.empty() ? "" : ",") + e.get<std::string>();
                v_p = ps;
            }
            if (j.contains("n_min")) v_nmin = j["n_min"].get<int>();
            if (j.contains("n_max")) v_nmax = j["n_max"].get<int>();
            if (j.contains("band")) v_band = j["band"].get<double>();
            if (j.contains("stability")) v_stability = j["stability"].get<double>();
            if (j.contains("functions")) {
                std::string fs;
                for (const auto& e : j["functions"])
                    fs += (fs.empty() ? "" : ",") + e.get<std::string>();
                v_fns = fs;
            }
            if (j.contains("out")) outdir = j["out"].get<std::string>();
            ensure_dir(outdir);
        }
        cfg.ps = parse_ps(v_p);
        cfg.n_min = v_nmin;
        cfg.n_max = v_nmax;
        cfg.band = v_band;
        cfg.stability = v_stability;
        cfg.fns.clear();
        {
            std::stringstream ss(v_fns);
            std::string tok;
            while (std::getline(ss, tok, ',')) cfg.fns.push_back(tok);
        }
        cfg.outdir = outdir;
        cfg.validate();
        config["weight"] = cfg.weight;
        config["p"] = v_p;
        config["n_min"] = cfg.n_min;
        config["n_max"] = cfg.n_max;
        config["band"] = cfg.band;
        config["stability"] = cfg.stability;
        config["functions"] = v_fns;

        WeightContext ctx(cfg.weight);
        std::vector<std::string> targets;
        if (v_all) {
            targets = {"1.1", "4.1", "4.2", "3.3", "3.4", "3.6", "asymptotics"};
        } else {
            if (!v_theorem.empty()) targets.push_back(v_theorem);
            if (!v_corollary.empty()) targets.push_back(v_corollary);
            if (!v_lemma.empty()) targets.push_back(v_lemma);
            if (v_asym) targets.push_back("asymptotics");
        }
        if (targets.empty())
            throw CLI::ValidationError("verify", "pick --theorem/--lemma/--corollary/--asymptotics/--all");
        config["targets"] = targets;
        for (const auto& t : targets) {
            VerifyReport rep;
            if (t == "1.1")
                rep = verify_theorem_1_1(ctx, cfg);
            else if (t == "4.1")
                rep = verify_theorem_4_1(ctx, cfg);
            else if (t == "4.2")
                rep = verify_corollary_4_2(ctx, cfg, v_j);
            else if (t == "3.3")
                rep = verify_lemma_3_3(ctx, cfg);
            else if (t == "3.4")
                rep = verify_lemma_3_4(ctx, cfg);
            else if (t == "3.6")
                rep = verify_lemma_3_6(ctx, cfg);
            else if (t == "asymptotics")
                rep = verify_asymptotics(ctx, cfg);
            else
                throw CLI::ValidationError("verify", "unknown target " + t);
            emit_report(rep, outdir, out);
        }
        return finish(outdir, config, out);
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace expw
