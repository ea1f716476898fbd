#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "expw/orthopoly.hpp"

using namespace expw;

namespace {

// Independent oracle: modified Gram-Schmidt on weighted monomial columns
// over the master rule, twice re-orthogonalized. Trustworthy to roughly
// degree 10 in double precision, which is all it is used for.
std::vector<double> gs_recurrence_oracle(const RecurrenceTable& rec, int kmax) {
    const QuadRule& r = rec.rule();
    const std::size_t m = r.size();
    std::vector<std::vector<double>> q;  // weighted orthonormal columns
    auto dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += r.gl_weight[i] * a[i] * b[i];
        return s;
    };
    for (int k = 0; k <= kmax; ++k) {
        std::vector<double> col(m);
        for (std::size_t i = 0; i < m; ++i) col[i] = std::pow(r.nodes[i], k) * r.wval[i];
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& prev : q) {
                double c = dot(col, prev);
                for (std::size_t i = 0; i < m; ++i) col[i] -= c * prev[i];
            }
        double nrm = std::sqrt(dot(col, col));
        for (double& v : col) v /= nrm;
        q.push_back(std::move(col));
    }
    // b_k = <t q_k, q_{k-1}>.
    std::vector<double> b(std::size_t(kmax) + 1, 0.0);
    for (int k = 1; k <= kmax; ++k) {
        std::vector<double> tq(m);
        for (std::size_t i = 0; i < m; ++i) tq[i] = r.nodes[i] * q[std::size_t(k)][i];
        b[std::size_t(k)] = dot(tq, q[std::size_t(k) - 1]);
    }
    return b;
}

}  // namespace

TEST_CASE("rescaled-Hermite coefficients for Q = x^2") {
    Weight f2 = Weight::freud(2.0);
    MrsTable m(f2);
    RecurrenceTable rec(f2, m, 40);
    CHECK(rec.norm0() == Catch::Approx(std::pow(M_PI / 2.0, -0.25)).epsilon(1e-12));
    for (int k = 1; k <= 40; ++k)
        CHECK(rec.b(k) == Catch::Approx(std::sqrt(double(k)) / 2.0).epsilon(1e-10));
    // Brute-force construction agrees at low degree.
    auto oracle = gs_recurrence_oracle(rec, 10);
    for (int k = 1; k <= 10; ++k) CHECK(rec.b(k) == Catch::Approx(oracle[std::size_t(k)]).epsilon(1e-9));
}

TEST_CASE("orthonormality residual across families") {
    for (const Weight& w :
         {Weight::freud(2.0), Weight::freud(4.0), Weight::erdos_expl(0.0, 2.0, 1)}) {
        MrsTable m(w);
        RecurrenceTable rec(w, m, 40);
        CHECK(rec.max_orthonormality_residual() <= 1e-8);
        for (int k = 1; k <= 40; ++k) CHECK(rec.b(k) > 0.0);
    }
}

TEST_CASE("evaluation parity and zero count") {
    Weight f2 = Weight::freud(2.0);
    MrsTable m(f2);
    RecurrenceTable rec(f2, m, 12);
    CHECK(rec.p(0, 3.7) == Catch::Approx(std::pow(M_PI / 2.0, -0.25)).epsilon(1e-12));
    double x = 1.3;
    CHECK(rec.p(5, -x) == Catch::Approx(-rec.p(5, x)).epsilon(1e-12));
    CHECK(rec.p(6, -x) == Catch::Approx(rec.p(6, x)).epsilon(1e-12));
    // Degree-3 member changes sign exactly three times on its interval.
    int sign_changes = 0;
    double a3 = m.a(3.0);
    double prev = rec.p(3, -a3);
    for (double t = -a3; t <= a3; t += a3 / 200.0) {
        double v = rec.p(3, t);
        if (v * prev < 0) ++sign_changes;
        if (v != 0.0) prev = v;
    }
    CHECK(sign_changes == 3);
    // Weighted evaluation matches p * w.
    CHECK(rec.p_weighted(7, 2.1) == Catch::Approx(rec.p(7, 2.1) * f2.w(2.1)).epsilon(1e-12));
}

TEST_CASE("gauss rules integrate to degree 2n-1") {
    for (const Weight& w :
         {Weight::freud(2.0), Weight::freud(4.0), Weight::erdos_expl(0.0, 2.0, 1)}) {
        MrsTable m(w);
        RecurrenceTable rec(w, m, 40);
        for (int n : {1, 2, 6, 17, 40}) {
            GaussData g = gauss_data(rec, n);
            double lamsum = 0.0;
            for (double l : g.lambda) {
                CHECK(l > 0.0);
                lamsum += l;
            }
            CHECK(lamsum == Catch::Approx(rec.mu0()).epsilon(1e-10));
            for (int deg = 0; deg <= 2 * n - 1; ++deg) {
                double s = 0.0;
                for (int k = 0; k < n; ++k)
                    s += g.lambda[std::size_t(k)] * std::pow(g.zeros[std::size_t(k)], deg);
                double ref = rec.rule().integrate([deg](double t) { return std::pow(t, deg); });
                double scale = rec.rule().integrate(
                    [deg](double t) { return std::pow(std::abs(t), deg); });
                CHECK(std::abs(s - ref) <= 1e-8 * scale);
            }
        }
    }
}

TEST_CASE("zeros: symmetry, bound, interlacing") {
    Weight f2 = Weight::freud(2.0);
    MrsTable m(f2);
    RecurrenceTable rec(f2, m, 24);
    for (int n = 2; n <= 20; ++n) {
        GaussData g = gauss_data(rec, n);
        for (int k = 0; k < n; ++k)
            CHECK(g.zeros[std::size_t(k)] ==
                  Catch::Approx(-g.zeros[std::size_t(n - 1 - k)]).epsilon(1e-12).margin(1e-12));
        double bound = m.a(double(n)) * (1.0 + 2.0 * m.delta(double(n)));
        CHECK(std::abs(g.zeros[0]) < bound);
        GaussData h = gauss_data(rec, n + 1);
        for (int k = 0; k + 1 < n + 1; ++k) {
            // Each gap of the larger rule contains exactly one smaller zero.
            CHECK(g.zeros[std::size_t(k)] < h.zeros[std::size_t(k)]);
            CHECK(g.zeros[std::size_t(k)] > h.zeros[std::size_t(k) + 1]);
        }
    }
}

TEST_CASE("christoffel function basics") {
    Weight f2 = Weight::freud(2.0);
    MrsTable m(f2);
    RecurrenceTable rec(f2, m, 20);
    CHECK(rec.christoffel(1, 0.33) == Catch::Approx(rec.mu0()).epsilon(1e-12));
    CHECK(rec.christoffel(8, 0.5) < rec.christoffel(7, 0.5));
    // Values at zeros agree with the independent eigenvector weights.
    GaussData g = gauss_data(rec, 9);
    for (int k = 0; k < 9; ++k)
        CHECK(g.lambda_eig[std::size_t(k)] ==
              Catch::Approx(g.lambda[std::size_t(k)]).epsilon(1e-8));
}

TEST_CASE("christoffel minimization identity") {
    Weight f2 = Weight::freud(2.0);
    MrsTable m(f2);
    RecurrenceTable rec(f2, m, 20);
    std::mt19937 rng(42);
    std::normal_distribution<double> gs(0.0, 1.0);
    const int n = 7;
    const double x0 = 0.8;
    double lam = rec.christoffel(n, x0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> c(std::size_t(n), 0.0);
        for (double& v : c) v = gs(rng);
        // Normalize to P(x0) = 1, then compare the squared weighted mass.
        std::vector<double> basis(std::size_t(n), 0.0);
        rec.eval_all(x0, basis);
        double px = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k) px += c[k] * basis[k];
        if (std::abs(px) < 1e-8) continue;
        double mass = 0.0;
        for (double v : c) mass += (v / px) * (v / px);
        CHECK(mass >= lam * (1.0 - 1e-10));
    }
}

TEST_CASE("kernel identities") {
    Weight f2 = Weight::freud(2.0);
    MrsTable m(f2);
    RecurrenceTable rec(f2, m, 12);
    CHECK(rec.kernel(6, 0.4, 0.4) == Catch::Approx(1.0 / rec.christoffel(6, 0.4)).epsilon(1e-12));
    CHECK(rec.kernel(6, 0.4, 1.1) == Catch::Approx(rec.kernel(6, 1.1, 0.4)).epsilon(1e-12));
    CHECK(rec.kernel(8, 0.5, 1.0) == Catch::Approx(rec.kernel_cd(8, 0.5, 1.0)).epsilon(1e-8));
}

TEST_CASE("zero spacing and christoffel size track the band function") {
    for (const Weight& w : {Weight::freud(2.0), Weight::erdos_expl(0.0, 2.0, 1)}) {
        MrsTable m(w);
        RecurrenceTable rec(w, m, 40);
        for (int n : {8, 16, 32}) {
            GaussData g = gauss_data(rec, n);
            for (int k = 0; k + 1 < n; ++k) {
                double gap = g.zeros[std::size_t(k)] - g.zeros[std::size_t(k) + 1];
                double ratio = gap / m.phi(double(n), g.zeros[std::size_t(k)]);
                CHECK(ratio >= 1.0 / 20.0);
                CHECK(ratio <= 20.0);
            }
            double an = m.a(double(n));
            for (int s = -10; s <= 10; ++s) {
                double x = an * s / 10.5;
                double ratio = rec.christoffel_weighted_ratio(n, x) / m.phi(double(n), x);
                CHECK(ratio >= 1.0 / 20.0);
                CHECK(ratio <= 20.0);
            }
        }
    }
}

TEST_CASE("recurrence coefficients track the scaling numbers") {
    for (const Weight& w : {Weight::freud(2.0), Weight::erdos_expl(0.0, 2.0, 1)}) {
        MrsTable m(w);
        RecurrenceTable rec(w, m, 40);
        for (int n = 8; n <= 40; ++n) {
            double r = rec.b(n) / m.a(double(n));
            CHECK(r >= 1.0 / 20.0);
            CHECK(r <= 20.0);
        }
        // gamma_{n-1} / gamma_n = b_n by construction.
        CHECK(rec.leading_gamma(9) / rec.leading_gamma(10) == Catch::Approx(rec.b(10)).epsilon(1e-12));
    }
}

TEST_CASE("construction guards") {
    Weight f2 = Weight::freud(2.0);
    MrsTable m(f2);
    CHECK_THROWS(RecurrenceTable(f2, m, 0));
    CHECK_THROWS(RecurrenceTable(f2, m, 41));
    RecurrenceTable rec(f2, m, 6);
    CHECK_THROWS(gauss_data(rec, 8));  // needs b_7, table holds degrees to 6
}
