#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace sphmult {

// Nodes and weights of a quadrature rule on a real interval.
struct QuadRule {
    std::vector<double> x;
    std::vector<double> w;

    std::size_t size() const noexcept { return x.size(); }
    void append(const QuadRule& other);
    template <class F>
    auto integrate(F&& f) const {
        using R = decltype(f(0.0));
        R s{};
        for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * f(x[i]);
        return s;
    }
};

// Gauss-Legendre rule with n nodes on [-1, 1]; cached and thread-safe.
const QuadRule& gauss_legendre(int n);

// Gauss-Legendre panels on consecutive break points.
QuadRule panel_rule(const std::vector<double>& breaks, int nodes_per_panel);

// Breaks on [a, b]: geometric grading towards each point in `focus` down to
// width `min_width`, uniform panels of width <= h elsewhere.
std::vector<double> graded_breaks(double a, double b, double h, const std::vector<double>& focus = {},
                                  double min_width = 1e-12, double ratio = 0.5);

// Rule on [0, upper] for oscillatory integrands e^{i lambda t} with |t| <= t_max,
// graded towards 0 (or the listed focus points).
QuadRule oscillatory_rule(double lower, double upper, double t_max, const std::vector<double>& focus = {},
                          double min_width = 1e-12);

struct AdaptiveResult {
    std::complex<double> value;
    double error;
    int evaluations;
};

// Adaptive Gauss-Kronrod (7/15) integration of a complex integrand.
AdaptiveResult integrate_adaptive(const std::function<std::complex<double>(double)>& f, double a, double b,
                                  double abs_tol = 1e-12, double rel_tol = 1e-10, int max_depth = 40);

}  // namespace sphmult
