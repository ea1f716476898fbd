#pragma once

// Machine-readable experiment reports: CSV rows with 17 significant digits,
// a versioned JSON run summary, and two-column plot files. Output is
// byte-stable across runs: fixed row order, no timestamps.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace expw {

#ifndef EXPW_VERSION
#define EXPW_VERSION "unversioned"
#endif

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct VerifyRow {
    std::string weight;
    std::string fn;
    std::string p;
    int n = 0;
    double norm_err = 0.0;        // ||w (f - P)||_p
    double norm_err_deriv = 0.0;  // ||w (f' - P')||_p (or order i)
    double e_f = 0.0;             // E_{p,n}(w; f)
    double e_fprime = 0.0;        // E at the derivative's degree
    double t_an = 0.0;
    double a_n = 0.0;
    double bound_factor = 0.0;  // penalty * e_fprime
    double ratio = 0.0;
    bool exact_case = false;
    bool pass = true;
    std::string note;
};

struct VerifyReport {
    std::string experiment;
    std::vector<std::pair<std::string, std::string>> header;  // ordered metadata
    std::vector<VerifyRow> rows;

    static const char* csv_columns() {
        return "weight,f,p,n,norm_err,norm_err_deriv,E_f,E_fprime,T_a_n,a_n,bound_factor,ratio,"
               "exact_case,pass,note";
    }

    void write_csv(const std::string& path) const {
        std::ofstream os(path);
        if (!os) throw std::runtime_error("cannot write " + path);
        for (const auto& [k, v] : header) os << "# " << k << "=" << v << "\n";
        os << csv_columns() << "\n";
        for (const auto& r : rows) {
            os << r.weight << ',' << r.fn << ',' << r.p << ',' << r.n << ','
               << fmt17(r.norm_err) << ',' << fmt17(r.norm_err_deriv) << ',' << fmt17(r.e_f) << ','
               << fmt17(r.e_fprime) << ',' << fmt17(r.t_an) << ',' << fmt17(r.a_n) << ','
               << fmt17(r.bound_factor) << ',' << fmt17(r.ratio) << ',' << (r.exact_case ? 1 : 0)
               << ',' << (r.pass ? 1 : 0) << ',' << r.note << "\n";
        }
    }

    // Re-read a CSV and check each row's bound factor against its own
    // columns; guards against units drifting between writer and reader.
    static VerifyReport load_csv(const std::string& path) {
        std::ifstream is(path);
        if (!is) throw std::runtime_error("cannot read " + path);
        VerifyReport rep;
        std::string line;
        bool saw_header = false;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            if (line[0] == '#') {
                auto eq = line.find('=');
                if (eq != std::string::npos)
                    rep.header.emplace_back(line.substr(2, eq - 2), line.substr(eq + 1));
                continue;
            }
            if (!saw_header) {
                saw_header = true;
                continue;
            }
            std::stringstream ss(line);
            std::string tok;
            std::vector<std::string> cells;
            while (std::getline(ss, tok, ',')) cells.push_back(tok);
            if (cells.size() < 14) throw std::runtime_error("malformed row in " + path);
            VerifyRow r;
            r.weight = cells[0];
            r.fn = cells[1];
            r.p = cells[2];
            r.n = std::stoi(cells[3]);
            r.norm_err = std::stod(cells[4]);
            r.norm_err_deriv = std::stod(cells[5]);
            r.e_f = std::stod(cells[6]);
            r.e_fprime = std::stod(cells[7]);
            r.t_an = std::stod(cells[8]);
            r.a_n = std::stod(cells[9]);
            r.bound_factor = std::stod(cells[10]);
            r.ratio = std::stod(cells[11]);
            r.exact_case = cells[12] == "1";
            r.pass = cells[13] == "1";
            if (cells.size() > 14) r.note = cells[14];
            rep.rows.push_back(std::move(r));
        }
        return rep;
    }

    int fail_count() const {
        int c = 0;
        for (const auto& r : rows)
            if (!r.pass) ++c;
        return c;
    }
};

inline void write_plot_data(const std::string& path, const std::vector<std::pair<double, double>>& xy) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    for (const auto& [x, y] : xy) os << fmt17(x) << ' ' << fmt17(y) << "\n";
}

inline void write_summary(const std::string& path, const nlohmann::json& config,
                          const std::vector<std::string>& outputs, int pass, int fail) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["code_version"] = EXPW_VERSION;
    j["config"] = config;
    j["outputs"] = outputs;
    j["pass"] = pass;
    j["fail"] = fail;
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << j.dump(2) << "\n";
}

inline double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    std::size_t m = v.size() / 2;
    return (v.size() % 2 == 1) ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace expw
