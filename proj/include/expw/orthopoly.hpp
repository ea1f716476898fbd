#pragma once

// Orthonormal polynomials for the measure w^2(t) dt.
//
// The weight is even, so the three-term recurrence has zero diagonal:
//   t p_k = b_{k+1} p_{k+1} + b_k p_k-1,   p_0 = norm0 = (int w^2)^{-1/2}.
// Coefficients come from a discretized Stieltjes sweep over the master rule:
//   b_{k+1}^2 = int (t p_k)^2 w^2 dt - b_k^2.
// Everything at quadrature nodes is carried in weighted form q_k = p_k w,
// which keeps magnitudes O(1) on the whole integration interval; the same
// recurrence applies because w(t) is a constant factor at fixed t.
//
// The derivative connection matrix d[k][j] = int p_k' p_j w^2 dt is computed
// once from the weighted derivative recurrence r_k = p_k' w,
//   r_{k+1} = (q_k + t r_k - b_k r_{k-1}) / b_{k+1},
// and gives exact polynomial calculus in coefficient space. Unweighted nodal
// values of these polynomials span e^{Q(radius)} dynamic range, so coefficient
// space is the only representation that stays well-conditioned at high degree.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "expw/mrs.hpp"
#include "expw/quadrature.hpp"
#include "expw/weights.hpp"

namespace expw {

class RecurrenceTable {
  public:
    // Builds degrees 0..max_degree; throws if the orthonormality residual
    // exceeds 1e-8, naming the first failing degree.
    RecurrenceTable(Weight w, const MrsTable& mrs, int max_degree)
        : w_(std::move(w)), mrs_(mrs), n_(max_degree) {
        if (max_degree < 1) throw std::invalid_argument("recurrence: max_degree must be >= 1");
        if (max_degree > 40) throw std::invalid_argument("recurrence: degrees above 40 are unsupported");
        rule_ = build_rule(w_, mrs_, 2 * n_ + 2);
        stieltjes();
        build_diff_matrix();
        check_orthonormality();
    }

    int max_degree() const { return n_; }
    const Weight& weight() const { return w_; }
    const MrsTable& mrs() const { return mrs_; }
    const QuadRule& rule() const { return rule_; }
    double norm0() const { return norm0_; }
    double mu0() const { return mu0_; }

    // Off-diagonal recurrence coefficient, k in 1..max_degree.
    double b(int k) const { return b_.at(std::size_t(k)); }

    // Leading coefficient gamma_n = norm0 / (b_1 ... b_n).
    double leading_gamma(int n) const {
        double g = norm0_;
        for (int k = 1; k <= n; ++k) g /= b_[std::size_t(k)];
        return g;
    }

    // p_0..p_m at x, unweighted. Values grow like e^{Q(x)} outside the
    // oscillation interval.
    void eval_all(double x, std::span<double> out) const {
        const int m = int(out.size()) - 1;
        out[0] = norm0_;
        if (m >= 1) out[1] = x * norm0_ / b_[1];
        for (int k = 1; k < m; ++k)
            out[std::size_t(k) + 1] = (x * out[std::size_t(k)] - b_[std::size_t(k)] * out[std::size_t(k) - 1]) / b_[std::size_t(k) + 1];
    }

    // p_0 w .. p_m w at x; bounded on the whole line.
    void eval_all_weighted(double x, std::span<double> out) const {
        const int m = int(out.size()) - 1;
        double wv = w_.w(x);
        out[0] = norm0_ * wv;
        if (m >= 1) out[1] = x * out[0] / b_[1];
        for (int k = 1; k < m; ++k)
            out[std::size_t(k) + 1] = (x * out[std::size_t(k)] - b_[std::size_t(k)] * out[std::size_t(k) - 1]) / b_[std::size_t(k) + 1];
    }

    double p(int k, double x) const {
        std::vector<double> buf(std::size_t(k) + 1, 0.0);
        eval_all(x, buf);
        return buf.back();
    }

    double p_weighted(int k, double x) const {
        std::vector<double> buf(std::size_t(k) + 1, 0.0);
        eval_all_weighted(x, buf);
        return buf.back();
    }

    // Cached p_k w at the master-rule nodes, row per degree.
    const std::vector<double>& qrow(int k) const { return qmat_.at(std::size_t(k)); }

    // d[k][j] = int p_k' p_j w^2 dt; strictly lower triangular.
    const Eigen::MatrixXd& diff_matrix() const { return diff_; }

    // Christoffel function 1 / sum_{k<n} p_k(x)^2.
    double christoffel(int n, double x) const {
        if (n < 1 || n > n_ + 1) throw std::invalid_argument("christoffel: bad n");
        std::vector<double> buf(std::size_t(n), 0.0);
        eval_all(x, buf);
        double s = 0.0;
        for (double v : buf) s += v * v;
        return 1.0 / s;
    }

    // As above but against w^2(x): 1 / sum (p_k w)^2(x). Stays meaningful
    // where the unweighted sum would overflow.
    double christoffel_weighted_ratio(int n, double x) const {
        std::vector<double> buf(std::size_t(n), 0.0);
        eval_all_weighted(x, buf);
        double s = 0.0;
        for (double v : buf) s += v * v;
        return 1.0 / s;
    }

    // Kernel sum_{k<n} p_k(x) p_k(t).
    double kernel(int n, double x, double t) const {
        std::vector<double> bx(std::size_t(n), 0.0), bt(std::size_t(n), 0.0);
        eval_all(x, bx);
        eval_all(t, bt);
        double s = 0.0;
        for (std::size_t k = 0; k < bx.size(); ++k) s += bx[k] * bt[k];
        return s;
    }

    // Two-point kernel via the Christoffel-Darboux identity, x != t.
    double kernel_cd(int n, double x, double t) const {
        if (n < 1 || n > n_) throw std::invalid_argument("kernel_cd: bad n");
        std::vector<double> bx(std::size_t(n) + 1, 0.0), bt(std::size_t(n) + 1, 0.0);
        eval_all(x, bx);
        eval_all(t, bt);
        return b_[std::size_t(n)] * (bx[std::size_t(n)] * bt[std::size_t(n) - 1] - bt[std::size_t(n)] * bx[std::size_t(n) - 1]) / (x - t);
    }

    double max_orthonormality_residual() const { return ortho_residual_; }

  private:
    void stieltjes() {
        const std::size_t m = rule_.size();
        mu0_ = rule_.integrate([](double) { return 1.0; });
        norm0_ = 1.0 / std::sqrt(mu0_);
        b_.assign(std::size_t(n_) + 1, 0.0);
        qmat_.assign(std::size_t(n_) + 1, std::vector<double>(m, 0.0));
        std::vector<double> prev(m, 0.0), cur(m), next(m);
        for (std::size_t i = 0; i < m; ++i) cur[i] = norm0_ * rule_.wval[i];
        qmat_[0] = cur;
        for (int k = 0; k < n_; ++k) {
            double s = 0.0;
            for (std::size_t i = 0; i < m / 2; ++i) {
                double a = rule_.nodes[i] * cur[i];
                double b2 = rule_.nodes[m - 1 - i] * cur[m - 1 - i];
                s += rule_.gl_weight[i] * (a * a + b2 * b2);
            }
            double bb = s - b_[std::size_t(k)] * b_[std::size_t(k)];
            if (!(bb > 0.0))
                throw std::runtime_error("recurrence: lost positivity at degree " + std::to_string(k + 1));
            double bk1 = std::sqrt(bb);
            b_[std::size_t(k) + 1] = bk1;
            for (std::size_t i = 0; i < m; ++i)
                next[i] = (rule_.nodes[i] * cur[i] - b_[std::size_t(k)] * prev[i]) / bk1;
            prev.swap(cur);
            cur.swap(next);
            qmat_[std::size_t(k) + 1] = cur;
        }
    }

    void build_diff_matrix() {
        const std::size_t m = rule_.size();
        const int nrows = n_ + 1;
        // r_k = p_k' w at nodes.
        std::vector<std::vector<double>> rmat(std::size_t(nrows), std::vector<double>(m, 0.0));
        for (int k = 1; k < nrows; ++k) {
            const auto& qk = qmat_[std::size_t(k) - 1];
            const auto& rk = rmat[std::size_t(k) - 1];
            const auto& rk0 = (k >= 2) ? rmat[std::size_t(k) - 2] : rmat[0];
            auto& out = rmat[std::size_t(k)];
            double bk = b_[std::size_t(k)];
            double bprev = (k >= 2) ? b_[std::size_t(k) - 1] : 0.0;
            for (std::size_t i = 0; i < m; ++i)
                out[i] = (qk[i] + rule_.nodes[i] * rk[i] - ((k >= 2) ? bprev * rk0[i] : 0.0)) / bk;
        }
        diff_ = Eigen::MatrixXd::Zero(nrows, nrows);
        for (int k = 1; k < nrows; ++k) {
            for (int j = (k - 1) % 2; j < k; j += 2) {
                double s = 0.0;
                const auto& rk = rmat[std::size_t(k)];
                const auto& qj = qmat_[std::size_t(j)];
                for (std::size_t i = 0; i < m; ++i) s += rule_.gl_weight[i] * rk[i] * qj[i];
                diff_(k, j) = s;
            }
        }
    }

    void check_orthonormality() {
        const std::size_t m = rule_.size();
        double worst = 0.0;
        int worst_deg = 0;
        for (int i = 0; i <= n_; ++i) {
            for (int j = i; j <= n_; ++j) {
                if ((i + j) % 2 == 1) continue;  // odd products vanish by parity
                double s = 0.0;
                for (std::size_t t = 0; t < m; ++t)
                    s += rule_.gl_weight[t] * qmat_[std::size_t(i)][t] * qmat_[std::size_t(j)][t];
                double res = std::abs(s - (i == j ? 1.0 : 0.0));
                if (res > worst) {
                    worst = res;
                    worst_deg = j;
                }
            }
        }
        ortho_residual_ = worst;
        if (worst > 1e-8)
            throw std::runtime_error("recurrence: orthonormality residual " + std::to_string(worst) +
                                     " at degree " + std::to_string(worst_deg));
    }

    Weight w_;
    MrsTable mrs_;
    int n_;
    QuadRule rule_;
    std::vector<double> b_;
    double norm0_ = 0.0, mu0_ = 0.0, ortho_residual_ = 0.0;
    std::vector<std::vector<double>> qmat_;
    Eigen::MatrixXd diff_;
};

// Zeros of p_n (descending, matching the x_{1,n} > ... > x_{n,n} convention)
// and the Gauss weights lambda_{k,n}.
//
// Zeros are the eigenvalues of the Jacobi matrix. Weights are taken from the
// Christoffel function at those zeros: the squared first eigenvector
// component carries an absolute error floor near machine epsilon squared,
// which swamps the 1e-30-sized weights at the extreme zeros once n grows,
// while the kernel sum stays accurate there. The eigenvector values are kept
// as an independent cross-check at the scale of the rule.
struct GaussData {
    int n = 0;
    std::vector<double> zeros;
    std::vector<double> lambda;      // Christoffel function at the zeros
    std::vector<double> lambda_eig;  // mu0 * (first eigenvector component)^2
};

inline GaussData gauss_data(const RecurrenceTable& rec, int n) {
    if (n < 1 || n > rec.max_degree() + 1) throw std::invalid_argument("gauss_data: bad n");
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        J(k - 1, k) = rec.b(k);
        J(k, k - 1) = rec.b(k);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    if (es.info() != Eigen::Success) throw std::runtime_error("gauss_data: eigensolver failed");
    GaussData g;
    g.n = n;
    g.zeros.resize(std::size_t(n));
    g.lambda.resize(std::size_t(n));
    g.lambda_eig.resize(std::size_t(n));
    for (int k = 0; k < n; ++k) {
        // eigenvalues ascend; store descending
        double z = es.eigenvalues()(n - 1 - k);
        double v0 = es.eigenvectors()(0, n - 1 - k);
        g.zeros[std::size_t(k)] = z;
        g.lambda[std::size_t(k)] = rec.christoffel(n, z);
        g.lambda_eig[std::size_t(k)] = rec.mu0() * v0 * v0;
    }
    for (int k = 0; k < n; ++k) {
        // First-order eigenvector rounding perturbs the weight by about
        // sqrt(lambda mu0) eps; the eps^2 term floors the smallest weights.
        double lc = g.lambda[std::size_t(k)], le = g.lambda_eig[std::size_t(k)];
        double tol = 1e-6 * std::max(lc, le) +
                     1e-13 * std::sqrt(std::max(lc, le) * rec.mu0()) + 1e-28 * rec.mu0();
        if (std::abs(lc - le) > tol)
            throw std::runtime_error("gauss_data: weight/Christoffel mismatch at zero " +
                                     std::to_string(k + 1));
    }
    return g;
}

}  // namespace expw
