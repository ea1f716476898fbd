#pragma once

// Two polynomial representations.
//
// BasisPoly holds coefficients in the orthonormal basis {p_k}. Projections,
// norms (Parseval), and calculus via the derivative connection matrix all
// happen here; coefficients stay O(norm of the weighted function), so this
// form is stable at every supported degree.
//
// NodalPoly holds values at Chebyshev points of a degree-matched interval
// with barycentric evaluation and a spectral differentiation matrix. Raw
// nodal values grow like e^{Q(R)} towards the interval ends, which limits
// reliable nodal round trips to moderate degrees; conversions therefore go
// through Gauss nodes of the measure, and callers that need high degrees
// should stay in coefficient space.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "expw/orthopoly.hpp"

namespace expw {

class BasisPoly {
  public:
    BasisPoly(const RecurrenceTable& rec, std::vector<double> coeffs)
        : rec_(&rec), c_(std::move(coeffs)) {
        if (c_.empty()) c_.push_back(0.0);
        if (int(c_.size()) - 1 > rec.max_degree() + 1)
            throw std::invalid_argument("basis poly degree exceeds table");
    }

    static BasisPoly zero(const RecurrenceTable& rec) { return BasisPoly(rec, {0.0}); }

    static BasisPoly constant(const RecurrenceTable& rec, double value) {
        return BasisPoly(rec, {value / rec.norm0()});
    }

    static BasisPoly unit(const RecurrenceTable& rec, int k) {
        std::vector<double> c(std::size_t(k) + 1, 0.0);
        c.back() = 1.0;
        return BasisPoly(rec, std::move(c));
    }

    const RecurrenceTable& rec() const { return *rec_; }
    int degree() const { return int(c_.size()) - 1; }
    const std::vector<double>& coeffs() const { return c_; }
    double coeff(int k) const { return (k < int(c_.size())) ? c_[std::size_t(k)] : 0.0; }

    double operator()(double x) const {
        std::vector<double> buf(c_.size(), 0.0);
        rec_->eval_all(x, buf);
        double s = 0.0;
        for (std::size_t k = 0; k < c_.size(); ++k) s += c_[k] * buf[k];
        return s;
    }

    // P(x) w(x) through the weighted recurrence; bounded on the whole line.
    double eval_weighted(double x) const {
        std::vector<double> buf(c_.size(), 0.0);
        rec_->eval_all_weighted(x, buf);
        double s = 0.0;
        for (std::size_t k = 0; k < c_.size(); ++k) s += c_[k] * buf[k];
        return s;
    }

    // ||P w||_2 by Parseval.
    double l2w_norm() const {
        double s = 0.0;
        for (double v : c_) s += v * v;
        return std::sqrt(s);
    }

    BasisPoly derivative() const {
        const auto& d = rec_->diff_matrix();
        int deg = degree();
        if (deg == 0) return zero(*rec_);
        std::vector<double> out(std::size_t(deg), 0.0);
        for (int j = 0; j < deg; ++j) {
            double s = 0.0;
            for (int k = j + 1; k <= deg; ++k) s += c_[std::size_t(k)] * d(k, j);
            out[std::size_t(j)] = s;
        }
        return BasisPoly(*rec_, std::move(out));
    }

    // V with V' = P and V(0) = 0; degree rises by one. Solved by back
    // substitution against the connection matrix, whose subdiagonal entries
    // int p_{j+1}' p_j w^2 are strictly positive.
    BasisPoly antiderivative_from_zero() const {
        const auto& d = rec_->diff_matrix();
        int deg = degree();
        if (deg + 1 > rec_->max_degree())
            throw std::invalid_argument("antiderivative: degree would exceed table");
        std::vector<double> g(std::size_t(deg) + 2, 0.0);
        for (int j = deg; j >= 0; --j) {
            double s = c_[std::size_t(j)];
            for (int k = j + 2; k <= deg + 1; ++k) s -= g[std::size_t(k)] * d(k, j);
            g[std::size_t(j) + 1] = s / d(j + 1, j);
        }
        std::vector<double> p0(g.size(), 0.0);
        rec_->eval_all(0.0, p0);
        double v0 = 0.0;
        for (std::size_t k = 1; k < g.size(); ++k) v0 += g[k] * p0[k];
        g[0] = -v0 / rec_->norm0();
        return BasisPoly(*rec_, std::move(g));
    }

    BasisPoly truncated(int deg) const {
        std::vector<double> c(c_.begin(), c_.begin() + std::min<std::size_t>(c_.size(), std::size_t(deg) + 1));
        return BasisPoly(*rec_, std::move(c));
    }

    BasisPoly& operator+=(const BasisPoly& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
        for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
        return *this;
    }
    BasisPoly& operator-=(const BasisPoly& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
        for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
        return *this;
    }
    BasisPoly& operator*=(double s) {
        for (double& v : c_) v *= s;
        return *this;
    }
    friend BasisPoly operator+(BasisPoly a, const BasisPoly& b) { return a += b; }
    friend BasisPoly operator-(BasisPoly a, const BasisPoly& b) { return a -= b; }
    friend BasisPoly operator*(BasisPoly a, double s) { return a *= s; }

  private:
    const RecurrenceTable* rec_;
    std::vector<double> c_;
};

// ---------------------------------------------------------------------------

class NodalPoly {
  public:
    // Values at Chebyshev-Lobatto nodes R cos(j pi / m), stored ascending.
    NodalPoly(double radius, std::vector<double> values)
        : R_(radius), v_(std::move(values)) {
        if (v_.size() < 1) throw std::invalid_argument("nodal poly needs at least one value");
        if (!(radius > 0.0)) throw std::invalid_argument("nodal poly needs positive radius");
    }

    template <class F>
    static NodalPoly sample(double radius, int degree, F&& f) {
        std::vector<double> v(std::size_t(degree) + 1, 0.0);
        if (degree == 0) {
            v[0] = f(0.0);
            return NodalPoly(radius, std::move(v));
        }
        for (int j = 0; j <= degree; ++j)
            v[std::size_t(j)] = f(-radius * std::cos(M_PI * j / degree));
        return NodalPoly(radius, std::move(v));
    }

    int degree() const { return int(v_.size()) - 1; }
    double radius() const { return R_; }
    const std::vector<double>& values() const { return v_; }

    std::vector<double> nodes() const {
        const int m = degree();
        std::vector<double> x(v_.size(), 0.0);
        if (m == 0) return x;
        for (int j = 0; j <= m; ++j) x[std::size_t(j)] = -R_ * std::cos(M_PI * j / m);
        return x;
    }

    double operator()(double x) const {
        const int m = degree();
        if (m == 0) return v_[0];
        auto xs = nodes();
        double num = 0.0, den = 0.0;
        for (int j = 0; j <= m; ++j) {
            double dx = x - xs[std::size_t(j)];
            if (dx == 0.0) return v_[std::size_t(j)];
            double wj = ((j % 2 == 0) ? 1.0 : -1.0) * ((j == 0 || j == m) ? 0.5 : 1.0);
            double t = wj / dx;
            num += t * v_[std::size_t(j)];
            den += t;
        }
        return num / den;
    }

    // Exact polynomial derivative via the spectral differentiation matrix,
    // resampled onto the degree-reduced node set.
    NodalPoly derivative() const {
        const int m = degree();
        if (m == 0) return NodalPoly(R_, {0.0});
        auto xs = nodes();
        std::vector<double> dv(v_.size(), 0.0);
        auto cfac = [&](int j) { return (j == 0 || j == m) ? 2.0 : 1.0; };
        for (int i = 0; i <= m; ++i) {
            double row = 0.0, diag = 0.0;
            for (int j = 0; j <= m; ++j) {
                if (j == i) continue;
                double dij = (cfac(i) / cfac(j)) * (((i + j) % 2 == 0) ? 1.0 : -1.0) /
                             (xs[std::size_t(i)] - xs[std::size_t(j)]);
                row += dij * v_[std::size_t(j)];
                diag -= dij;  // negative-sum trick for the diagonal
            }
            dv[std::size_t(i)] = row + diag * v_[std::size_t(i)];
        }
        NodalPoly full(R_, std::move(dv));
        if (m == 1) return NodalPoly(R_, {full(0.0)});
        return NodalPoly::sample(R_, m - 1, [&](double x) { return full(x); });
    }

  private:
    double R_;
    std::vector<double> v_;
};

// Degree-matched interval: a_d (1 + 2 delta_d) covers the region where the
// weighted mass of a degree-d polynomial lives.
inline double nodal_radius(const RecurrenceTable& rec, int degree) {
    double d = std::max(degree, 1);
    return rec.mrs().a(d) * (1.0 + 2.0 * rec.mrs().delta(d));
}

inline NodalPoly to_nodal(const RecurrenceTable& rec, const BasisPoly& p) {
    double R = nodal_radius(rec, p.degree());
    return NodalPoly::sample(R, p.degree(), [&](double x) { return p(x); });
}

// Coefficients recovered by Gauss quadrature of the measure: exact for the
// stored degree since deg(P p_k) <= 2 deg <= 2 n_g - 1.
inline BasisPoly to_basis(const RecurrenceTable& rec, const NodalPoly& p) {
    const int deg = p.degree();
    GaussData g = gauss_data(rec, deg + 1);
    std::vector<double> c(std::size_t(deg) + 1, 0.0);
    std::vector<double> buf(std::size_t(deg) + 1, 0.0);
    for (int i = 0; i <= deg; ++i) {
        double xi = g.zeros[std::size_t(i)];
        rec.eval_all(xi, buf);
        double pv = p(xi) * g.lambda[std::size_t(i)];
        for (int k = 0; k <= deg; ++k) c[std::size_t(k)] += pv * buf[std::size_t(k)];
    }
    return BasisPoly(rec, std::move(c));
}

}  // namespace expw
