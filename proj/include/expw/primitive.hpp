#pragma once

// The polynomial primitive V_n(g) = a + int_0^x v_n(g')(t) dt, whose
// derivative is exactly the de la Vallee Poussin mean of g'. The additive
// constant is the best-constant fit to G = int_0^x (g' - v_n(g')), so the
// weighted distance to g is within a factor two of the degree-zero optimum.

#include <functional>

#include "expw/approx.hpp"
#include "expw/operators.hpp"
#include "expw/poly.hpp"

namespace expw {

struct VnPrimitive {
    NodalPoly nodal;
    BasisPoly basis;
    double shift = 0.0;  // the fitted constant a
};

inline VnPrimitive primitive_vp(const RecurrenceTable& rec, const RealFn& g, const RealFn& gp,
                                int n, Lp p, const NormGrid& grid) {
    BasisPoly v = vallee_poussin(rec, gp, n);
    BasisPoly W = v.antiderivative_from_zero();
    const double g0 = g(0.0);
    auto G = [&](double x) { return g(x) - g0 - W(x); };
    auto [c0, val] = best_const(G, p, grid);
    (void)val;
    double a = g0 + c0;
    BasisPoly V = W + BasisPoly::constant(rec, a);
    return VnPrimitive{to_nodal(rec, V), V, a};
}

}  // namespace expw
