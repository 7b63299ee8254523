#pragma once

#include "qdcav/errors.hpp"

#include <cmath>
#include <complex>
#include <queue>
#include <vector>

namespace qdcav {

// Adaptive Gauss-Kronrod (G7, K15) quadrature with interval bisection.
// Works for real or complex integrands; the error metric is the modulus.

namespace gk {

inline constexpr double xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr double wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

}  // namespace gk

template <class F>
auto gauss_kronrod_panel(F&& f, double a, double b, double& error)
    -> decltype(f(a)) {
    using T = decltype(f(a));
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);

    T fc = f(c);
    T result_k = gk::wgk[7] * fc;
    T result_g = gk::wg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double x = h * gk::xgk[j];
        T f1 = f(c - x);
        T f2 = f(c + x);
        result_k += gk::wgk[j] * (f1 + f2);
        if (j % 2 == 1) result_g += gk::wg[j / 2] * (f1 + f2);
    }
    result_k *= h;
    result_g *= h;
    error = std::abs(result_k - result_g);
    return result_k;
}

// Integrates f over [a, b] to the requested tolerance, bisecting the worst
// panel first. Throws NumericalError if the panel budget is exhausted.
template <class F>
auto integrate_adaptive_gk(F&& f, double a, double b, double rel_tol = 1e-10,
                           double abs_tol = 0.0, int max_panels = 4000)
    -> decltype(f(a)) {
    using T = decltype(f(a));
    struct Panel {
        double a, b, error;
        T value;
        bool operator<(const Panel& o) const { return error < o.error; }
    };

    std::priority_queue<Panel> queue;
    double err0;
    T total = gauss_kronrod_panel(f, a, b, err0);
    queue.push({a, b, err0, total});
    double total_error = err0;
    int panels = 1;

    while (total_error > abs_tol + rel_tol * std::abs(total)) {
        if (panels >= max_panels)
            throw NumericalError("integrate_adaptive_gk: panel budget exhausted "
                                 "before reaching the requested tolerance");
        Panel worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b))
            throw NumericalError("integrate_adaptive_gk: interval too small to bisect");
        double e1, e2;
        T v1 = gauss_kronrod_panel(f, worst.a, mid, e1);
        T v2 = gauss_kronrod_panel(f, mid, worst.b, e2);
        total += (v1 + v2) - worst.value;
        total_error += (e1 + e2) - worst.error;
        queue.push({worst.a, mid, e1, v1});
        queue.push({mid, worst.b, e2, v2});
        ++panels;
    }
    return total;
}

}  // namespace qdcav
