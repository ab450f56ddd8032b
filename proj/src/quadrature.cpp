#include "fracvar/quadrature.hpp"

#include "fracvar/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

namespace fracvar::quad {

namespace {

// Gauss 7 / Kronrod 15 nodes and weights on [-1, 1] (QUADPACK dqk15).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b;
    double value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel evaluate_panel(const std::function<double(double)>& f, double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);

    const double fc = f(mid);
    double resg = fc * kWg[3];
    double resk = fc * kWgk[7];
    double fv[15];
    fv[7] = fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double f1 = f(mid - dx);
        const double f2 = f(mid + dx);
        fv[j] = f1;
        fv[14 - j] = f2;
        resk += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
    }

    const double reskh = resk * 0.5;
    double resasc = kWgk[7] * std::abs(fc - reskh);
    for (int j = 0; j < 7; ++j)
        resasc += kWgk[j] * (std::abs(fv[j] - reskh) + std::abs(fv[14 - j] - reskh));
    resasc *= std::abs(half);

    double err = std::abs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));

    return Panel{a, b, resk * half, err};
}

} // namespace

Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opts, std::span<const double> breakpoints) {
    Result out;
    if (a == b) {
        out.converged = true;
        return out;
    }

    std::vector<double> edges;
    edges.push_back(a);
    for (double x : breakpoints)
        if (x > a && x < b) edges.push_back(x);
    edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    std::priority_queue<Panel> heap;
    double total = 0.0, total_err = 0.0;
    for (size_t i = 0; i + 1 < edges.size(); ++i) {
        Panel p = evaluate_panel(f, edges[i], edges[i + 1]);
        total += p.value;
        total_err += p.error;
        heap.push(p);
    }
    out.panels = static_cast<int>(heap.size());

    while (total_err > opts.abs_tol && out.panels < opts.max_panels) {
        Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // interval exhausted at machine precision
            heap.push(Panel{worst.a, worst.b, worst.value, 0.0});
            total_err -= worst.error;
            continue;
        }
        Panel left = evaluate_panel(f, worst.a, mid);
        Panel right = evaluate_panel(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++out.panels;
    }

    out.value = total;
    out.error = total_err;
    out.converged = total_err <= opts.abs_tol;
    return out;
}

double integrate_or_throw(const std::function<double(double)>& f, double a, double b,
                          const Options& opts, std::span<const double> breakpoints,
                          const char* what) {
    Result r = integrate(f, a, b, opts, breakpoints);
    if (!r.converged)
        throw NumericalError(std::string(what) + " (achieved error " +
                                 std::to_string(r.error) + ")",
                             r.error);
    return r.value;
}

} // namespace fracvar::quad
