#include "sphmult/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace sphmult {

void QuadRule::append(const QuadRule& other) {
    x.insert(x.end(), other.x.begin(), other.x.end());
    w.insert(w.end(), other.w.begin(), other.w.end());
}

namespace {

QuadRule build_gauss_legendre(int n) {
    QuadRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 1; k <= n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        r.x[i] = -z;
        r.x[n - 1 - i] = z;
        r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return r;
}

}  // namespace

const QuadRule& gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre needs n >= 1");
    static std::mutex mtx;
    static std::map<int, QuadRule> cache;
    std::lock_guard lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_gauss_legendre(n)).first;
    return it->second;
}

QuadRule panel_rule(const std::vector<double>& breaks, int nodes_per_panel) {
    const QuadRule& gl = gauss_legendre(nodes_per_panel);
    QuadRule r;
    r.x.reserve(breaks.size() * nodes_per_panel);
    r.w.reserve(breaks.size() * nodes_per_panel);
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        const double a = breaks[k], b = breaks[k + 1];
        const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
        for (int i = 0; i < nodes_per_panel; ++i) {
            r.x.push_back(mid + half * gl.x[i]);
            r.w.push_back(half * gl.w[i]);
        }
    }
    return r;
}

std::vector<double> graded_breaks(double a, double b, double h, const std::vector<double>& focus, double min_width,
                                  double ratio) {
    if (!(b > a)) throw std::invalid_argument("graded_breaks needs b > a");
    std::vector<double> pts{a, b};
    for (double f : focus) {
        if (f < a || f > b) continue;
        pts.push_back(f);
        for (double d = std::min(h, b - a); d > min_width; d *= ratio) {
            if (f - d > a) pts.push_back(f - d);
            if (f + d < b) pts.push_back(f + d);
        }
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::vector<double> out{pts.front()};
    for (std::size_t k = 1; k < pts.size(); ++k) {
        const double lo = out.back(), hi = pts[k];
        const int pieces = std::max(1, static_cast<int>(std::ceil((hi - lo) / h - 1e-12)));
        for (int j = 1; j <= pieces; ++j) out.push_back(lo + (hi - lo) * j / pieces);
    }
    return out;
}

QuadRule oscillatory_rule(double lower, double upper, double t_max, const std::vector<double>& focus,
                          double min_width) {
    const double h = std::min(1.0, 6.0 / std::max(t_max, 1e-3));
    return panel_rule(graded_breaks(lower, upper, h, focus, min_width), 16);
}

AdaptiveResult integrate_adaptive(const std::function<std::complex<double>(double)>& f, double a, double b,
                                  double abs_tol, double rel_tol, int max_depth) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    const auto& xk = GK::abscissa();
    const auto& wk = GK::weights();
    const auto& wg = boost::math::quadrature::gauss<double, 7>::weights();
    int evals = 0;

    auto panel = [&](double lo, double hi, std::complex<double>& kron, double& err) {
        const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
        std::complex<double> k{}, g{};
        for (std::size_t i = 0; i < xk.size(); ++i) {
            const std::complex<double> fp = f(mid + half * xk[i]);
            const std::complex<double> fm = (i == 0) ? fp : f(mid - half * xk[i]);
            evals += (i == 0) ? 1 : 2;
            const std::complex<double> s = (i == 0) ? fp : fp + fm;
            k += wk[i] * s;
            if (i % 2 == 0) g += wg[i / 2] * s;
        }
        kron = half * k;
        err = std::abs(half * (k - g));
    };

    struct Segment {
        double lo, hi;
        std::complex<double> value;
        double err;
        int depth;
    };
    std::vector<Segment> todo;
    {
        Segment s{a, b, {}, 0.0, 0};
        panel(a, b, s.value, s.err);
        todo.push_back(s);
    }
    std::complex<double> total{};
    double total_err = 0.0;
    while (!todo.empty()) {
        Segment s = todo.back();
        todo.pop_back();
        const double local_tol = std::max(abs_tol, rel_tol * std::abs(s.value)) * (s.hi - s.lo) / (b - a);
        if (s.err <= local_tol || s.depth >= max_depth) {
            total += s.value;
            total_err += s.err;
            continue;
        }
        const double mid = 0.5 * (s.lo + s.hi);
        Segment l{s.lo, mid, {}, 0.0, s.depth + 1}, r{mid, s.hi, {}, 0.0, s.depth + 1};
        panel(l.lo, l.hi, l.value, l.err);
        panel(r.lo, r.hi, r.value, r.err);
        todo.push_back(l);
        todo.push_back(r);
    }
    return {total, total_err, evals};
}

}  // namespace sphmult
