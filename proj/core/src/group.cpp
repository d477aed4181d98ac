#include "sphmult/group.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>

#include "sphmult/parallel.hpp"

namespace sphmult {

namespace {

constexpr double pi = std::numbers::pi;

double real_integral(const std::function<double(double)>& f, double a, double b, double abs_tol = 1e-13,
                     double rel_tol = 1e-11) {
    if (b <= a) return 0.0;
    return integrate_adaptive([&](double x) { return std::complex<double>(f(x), 0.0); }, a, b, abs_tol, rel_tol)
        .value.real();
}

// exp(1 - 1/(1 - u^2)) on |u| < 1.
double window(double u) {
    const double r = 1.0 - u * u;
    return r > 0.0 ? std::exp(1.0 - 1.0 / r) : 0.0;
}

void check_unimodular(const MatrixElement& g) {
    if (!std::isfinite(g.det()) || std::abs(g.det() - 1.0) > 1e-10)
        throw std::invalid_argument("group: matrix is not in SL(2,R) (det = " + std::to_string(g.det()) + ")");
}

// Higham's iteration for max ||A g||_p / ||g||_p; returns the best ratio seen.
template <class Apply, class ApplyT>
double boyd_norm(Apply&& apply, ApplyT&& apply_t, std::vector<double> g, double p, int iterations) {
    const double q = p / (p - 1.0);
    auto norm = [](const std::vector<double>& v, double r) {
        double s = 0.0;
        for (double e : v) s += std::pow(std::abs(e), r);
        return std::pow(s, 1.0 / r);
    };
    auto dual = [](std::vector<double>& v, double r, double nrm) {
        for (double& e : v) e = std::copysign(std::pow(std::abs(e) / nrm, r - 1.0), e);
    };
    double gn = norm(g, p);
    if (gn == 0.0) return 0.0;
    for (double& e : g) e /= gn;
    double best = 0.0;
    for (int it = 0; it < iterations; ++it) {
        std::vector<double> y = apply(g);
        const double yn = norm(y, p);
        best = std::max(best, yn);
        if (yn == 0.0) break;
        dual(y, p, yn);
        std::vector<double> z = apply_t(y);
        const double zn = norm(z, q);
        double zg = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) zg += z[i] * g[i];
        if (zn <= zg * (1.0 + 1e-12) || zn == 0.0) break;
        g = z;
        dual(g, q, zn);
    }
    return best;
}

struct Tap {
    int ds;
    double y;
    double weight;
};

// Right convolution by kappa on the N A grid, in the variables g = mu^{1/p} f with mu = e^t.
class GridConvolution {
public:
    GridConvolution(const GroupKernel& kernel, double p, int nx, int nt, double h) : nx_(nx), nt_(nt), h_(h) {
        x0_ = -0.5 * (nx - 1) * h;
        t0_ = -0.5 * (nt - 1) * h;
        const int ks = static_cast<int>(std::ceil(kernel.t_half_width / h));
        for (int ds = -ks; ds <= ks; ++ds) {
            const double s = ds * h;
            const double y_max = kernel.x_half_width * std::exp(-s);
            const int ky = static_cast<int>(std::ceil(y_max / h));
            for (int dy = -ky; dy <= ky; ++dy) {
                const double y = dy * h;
                const double w = kernel.value(-std::exp(s) * y, -s) * std::exp(s) * h * h;
                if (w != 0.0) taps_.push_back({ds, y, w * std::exp(-s / p)});
            }
        }
    }

    std::size_t size() const { return static_cast<std::size_t>(nx_) * nt_; }

    template <bool Transpose>
    std::vector<double> apply(const std::vector<double>& in) const {
        std::vector<double> out(size(), 0.0);
        for (int j = 0; j < nt_; ++j) {
            const double shrink = std::exp(-(t0_ + j * h_));
            for (const Tap& tap : taps_) {
                const int js = j + tap.ds;
                if (js < 0 || js >= nt_) continue;
                const double shift = shrink * tap.y / h_;
                for (int i = 0; i < nx_; ++i) {
                    const double u = i + shift;
                    if (u < 0.0 || u > nx_ - 1) continue;
                    const int i0 = std::min(static_cast<int>(u), nx_ - 2);
                    const double frac = u - i0;
                    const std::size_t out_idx = static_cast<std::size_t>(j) * nx_ + i;
                    const std::size_t src = static_cast<std::size_t>(js) * nx_ + i0;
                    if constexpr (Transpose) {
                        out[src] += tap.weight * (1.0 - frac) * in[out_idx];
                        out[src + 1] += tap.weight * frac * in[out_idx];
                    } else {
                        out[out_idx] += tap.weight * ((1.0 - frac) * in[src] + frac * in[src + 1]);
                    }
                }
            }
        }
        return out;
    }

private:
    int nx_, nt_;
    double h_, x0_ = 0.0, t0_ = 0.0;
    std::vector<Tap> taps_;
};

double group_norm_lower_bound(const GroupKernel& kernel, double p, int nx, int nt, double h, int iterations,
                              int starts, std::uint64_t seed) {
    const GridConvolution conv(kernel, p, nx, nt, h);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    double best = 0.0;
    for (int s = 0; s < starts; ++s) {
        std::vector<double> g(conv.size(), 1.0);
        if (s > 0)
            for (double& e : g) e = s == 1 ? 1.0 + 0.5 * unit(rng) : unit(rng);
        best = std::max(best, boyd_norm([&](const auto& v) { return conv.apply<false>(v); },
                                        [&](const auto& v) { return conv.apply<true>(v); }, std::move(g), p,
                                        iterations));
    }
    return best;
}

double rhs_integral(const GroupKernel& kernel, double p, double h, int iterations) {
    const int kx = static_cast<int>(std::ceil(kernel.x_half_width / h));
    const int ks = static_cast<int>(std::ceil(kernel.t_half_width / h));
    double total = 0.0;
    for (int dx = -kx; dx <= kx; ++dx) {
        std::vector<double> row(2 * ks + 1);
        bool nonzero = false;
        for (int ds = -ks; ds <= ks; ++ds) {
            const double s = ds * h;
            row[ds + ks] = std::exp(s / p) * kernel.value(dx * h, s);
            nonzero = nonzero || row[ds + ks] != 0.0;
        }
        if (nonzero) total += h * cvp_norm_1d(row, h, p, iterations);
    }
    return total;
}

}  // namespace

MatrixElement MatrixElement::torus(double t) { return {std::exp(0.5 * t), 0.0, 0.0, std::exp(-0.5 * t)}; }

MatrixElement MatrixElement::rotation(double angle) {
    return {std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle)};
}

MatrixElement MatrixElement::operator*(const MatrixElement& o) const noexcept {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
}

MatrixElement MatrixElement::inverse() const noexcept {
    const double D = det();
    return {d / D, -b / D, -c / D, a / D};
}

double MatrixElement::distance(const MatrixElement& o) const noexcept {
    return std::max({std::abs(a - o.a), std::abs(b - o.b), std::abs(c - o.c), std::abs(d - o.d)});
}

MatrixElement IwasawaCoords::matrix() const {
    return MatrixElement::nbar(x) * MatrixElement::torus(t) * MatrixElement::rotation(k_angle);
}

IwasawaCoords iwasawa(const MatrixElement& g) {
    check_unimodular(g);
    // g g^T = v a^2 v^T = [[e^t, x e^t], [x e^t, x^2 e^t + e^{-t}]]
    const double row1 = g.a * g.a + g.b * g.b;
    IwasawaCoords out;
    out.t = std::log(row1);
    out.x = (g.c * g.a + g.d * g.b) / row1;
    const MatrixElement k = MatrixElement::torus(-out.t) * MatrixElement::nbar(-out.x) * g;
    out.k_angle = std::atan2(k.c, k.a);
    return out;
}

double iwasawa_h(const MatrixElement& g) {
    check_unimodular(g);
    // g = k a(H) n with n upper unipotent: the first column is k (e^{H/2}, 0)^T.
    return std::log(g.a * g.a + g.c * g.c);
}

double poisson_weight(double x, double q) { return std::exp(-0.5 * q * iwasawa_h(MatrixElement::nbar(x))); }

double cartan_radius(const MatrixElement& g) {
    check_unimodular(g);
    // (a - d)^2 + (b + c)^2 = |g|_F^2 - 2 = 4 sinh^2(t+/2)
    const double r = std::hypot(g.a - g.d, g.b + g.c);
    return 2.0 * std::asinh(0.5 * r);
}

double cartan_radius_nbar_a(double x, double t) {
    const double sh = std::sinh(0.5 * t);
    return 2.0 * std::asinh(std::sqrt(sh * sh + 0.25 * x * x * std::exp(t)));
}

double iwasawa_cartan_gap(double x, double t_b) {
    if (!(t_b > 0.0)) throw std::invalid_argument("iwasawa_cartan_gap: b must lie in A+ (t_b > 0)");
    // e^{t+} = u A with A = e^t (1 + x^2), B = e^{-t}, u = 1 + (u - 1) below.
    const double A = std::exp(t_b) * (1.0 + x * x);
    const double B = std::exp(-t_b);
    const double diff = A - B;
    const double um1 = 4.0 * x * x / (2.0 * A * (std::sqrt(diff * diff + 4.0 * x * x) + diff));
    const double E = std::log1p(um1);
    const double bound = 2.0 * std::exp(-2.0 * t_b);
    if (E < -1e-9 || E > bound + 1e-9)
        throw std::logic_error("iwasawa_cartan_gap: E(v,b) outside [0, 2 e^{-2 t_b}]");
    return E;
}

double abel_horocycle(const RadialFunction& f, double t_b) {
    const auto& breaks = f.grid().breaks;
    if (breaks.empty()) return 0.0;
    const double t_end = breaks.back();
    if (f.decay().kind != DecayKind::compact) {
        double peak = 0.0;
        for (const cplx& v : f.values()) peak = std::max(peak, std::abs(v));
        if (std::abs(f.at(t_end * (1.0 - 1e-12))) > 1e-8 * std::max(peak, 1e-300))
            throw std::domain_error("abel_horocycle: f has not decayed by the end of its grid");
    }
    const double reach = 2.0 * (std::cosh(t_end) - std::cosh(t_b)) * std::exp(-t_b);
    if (reach <= 0.0) return 0.0;
    const double x_max = std::sqrt(reach);
    const double half = real_integral([&](double x) { return f.at(cartan_radius_nbar_a(x, t_b)).real(); }, 0.0,
                                      x_max, 1e-14, 1e-11);
    return std::exp(0.5 * t_b) * 2.0 * half / (2.0 * pi);
}

HaarComparison haar_consistency(const std::function<double(double)>& radial, double t_max) {
    HaarComparison out;
    const double ch = std::cosh(t_max);
    out.iwasawa = real_integral(
        [&](double t) {
            const double reach = 2.0 * (ch - std::cosh(t)) * std::exp(-t);
            if (reach <= 0.0) return 0.0;
            const double inner = real_integral([&](double x) { return radial(cartan_radius_nbar_a(x, t)); }, 0.0,
                                               std::sqrt(reach), 1e-15, 1e-11);
            return std::exp(t) * 2.0 * inner / (2.0 * pi);
        },
        -t_max, t_max, 1e-13, 1e-10);
    out.cartan = real_integral([&](double t) { return radial(t) * std::sinh(t); }, 0.0, t_max);
    out.relative_error = std::abs(out.iwasawa - out.cartan) / std::max(std::abs(out.cartan), 1e-300);
    return out;
}

TailReport poisson_tails(double q) {
    if (!(q > 1.0)) throw std::invalid_argument("poisson_tails: q must exceed 1");
    TailReport rep;
    rep.q = q;
    const double e = q - 1.0;
    // int_R^inf with x = 1/s, s = w^{1/(q-1)}
    auto tail = [&](double R, bool with_h) {
        return real_integral(
                   [&](double w) {
                       if (w <= 0.0) return 0.0;
                       const double s = std::pow(w, 1.0 / e);
                       const double base = std::pow(1.0 + s * s, -0.5 * q);
                       return with_h ? base * (std::log1p(s * s) - 2.0 * std::log(w) / e) : base;
                   },
                   0.0, std::pow(R, -e), 1e-15, 1e-10) /
               e;
    };
    auto head = [&](bool with_h) {
        return real_integral(
            [&](double x) {
                const double base = std::pow(1.0 + x * x, -0.5 * q);
                return with_h ? base * std::log1p(x * x) : base;
            },
            0.0, 1.0);
    };
    const double full_p = 2.0 * (head(false) + tail(1.0, false));
    const double full_hp = 2.0 * (head(true) + tail(1.0, true));
    std::vector<double> log_r, log_tail;
    bool monotone = true;
    double prev = INFINITY;
    for (double R = 10.0; R <= 1e6 * 1.0001; R *= 10.0) {
        const double tp = 2.0 * tail(R, false);
        const double thp = 2.0 * tail(R, true);
        rep.radii.push_back(R);
        rep.p_integrals.push_back(full_p - tp);
        rep.hp_integrals.push_back(full_hp - thp);
        monotone = monotone && tp > 0.0 && thp > 0.0 && thp < prev;
        prev = thp;
        log_r.push_back(std::log(R));
        log_tail.push_back(std::log(tp));
    }
    rep.p_tail_exponent = linear_fit(log_r, log_tail).slope;
    rep.converges = monotone && std::isfinite(full_p) && std::isfinite(full_hp) && rep.p_tail_exponent < 0.0;
    return rep;
}

GroupKernel random_group_kernel(std::uint64_t seed, double x_half_width, double t_half_width) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal;
    const bool positive = seed % 2 == 1;
    struct Bump {
        double cx, ct, wx, wt, amp;
    };
    std::vector<Bump> bumps(2 + rng() % 4);
    for (Bump& b : bumps) {
        b.cx = (1.2 * unit(rng) - 0.6) * x_half_width;
        b.ct = (1.2 * unit(rng) - 0.6) * t_half_width;
        b.wx = (0.15 + 0.2 * unit(rng)) * x_half_width;
        b.wt = (0.15 + 0.2 * unit(rng)) * t_half_width;
        b.amp = positive ? std::abs(normal(rng)) : normal(rng);
    }
    GroupKernel k;
    k.x_half_width = x_half_width;
    k.t_half_width = t_half_width;
    k.value = [bumps, x_half_width, t_half_width](double x, double t) {
        const double cut = window(x / x_half_width) * window(t / t_half_width);
        if (cut == 0.0) return 0.0;
        double s = 0.0;
        for (const Bump& b : bumps) {
            const double u = (x - b.cx) / b.wx, v = (t - b.ct) / b.wt;
            s += b.amp * std::exp(-0.5 * (u * u + v * v));
        }
        return cut * s;
    };
    return k;
}

double cvp_norm_1d(std::span<const double> phi, double h, double p, int power_iterations) {
    const int len = static_cast<int>(phi.size());
    const int K = len / 2;
    const int n = std::max(64 * len, 1024);
    auto conv = [&](const std::vector<double>& in, bool transpose) {
        std::vector<double> out(n, 0.0);
        for (int k = 0; k < len; ++k) {
            if (phi[k] == 0.0) continue;
            const int shift = transpose ? k - K : K - k;
            const double w = h * phi[k];
            const int lo = std::max(0, -shift), hi = std::min(n, n - shift);
            for (int i = lo; i < hi; ++i) out[i] += w * in[i + shift];
        }
        return out;
    };
    double best_freq = 0.0, best_amp = -1.0;
    for (int m = 0; m <= 512; ++m) {
        const double omega = pi * m / 512.0;
        std::complex<double> s;
        for (int k = 0; k < len; ++k) s += phi[k] * std::polar(1.0, omega * k);
        if (std::abs(s) > best_amp) {
            best_amp = std::abs(s);
            best_freq = omega;
        }
    }
    std::vector<std::vector<double>> starts(3, std::vector<double>(n));
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int i = 0; i < n; ++i) {
        starts[0][i] = 1.0;
        starts[1][i] = std::cos(best_freq * i);
        starts[2][i] = unit(rng);
    }
    double best = 0.0;
    for (auto& g : starts)
        best = std::max(best, boyd_norm([&](const auto& v) { return conv(v, false); },
                                        [&](const auto& v) { return conv(v, true); }, std::move(g), p,
                                        power_iterations));
    return best;
}

TransferenceTrial transference_trial(const GroupKernel& kernel, double p, const TransferenceOptions& opt) {
    if (!(p > 1.0 && p <= 2.0)) throw std::invalid_argument("transference: p must lie in (1, 2]");
    if (opt.nx < 8 || opt.nt < 8 || !(opt.spacing > 0.0))
        throw std::invalid_argument("transference: grid too small");
    TransferenceTrial out;
    out.lhs = group_norm_lower_bound(kernel, p, opt.nx, opt.nt, opt.spacing, opt.power_iterations, opt.starts,
                                     opt.seed);
    out.lhs_coarse = group_norm_lower_bound(kernel, p, opt.nx / 2, opt.nt / 2, 2.0 * opt.spacing,
                                            opt.power_iterations, opt.starts, opt.seed);
    out.rhs = rhs_integral(kernel, p, opt.spacing, 2 * opt.power_iterations);
    out.stable = std::abs(out.lhs - out.lhs_coarse) <= 0.1 * std::max(out.lhs, 1e-300);
    return out;
}

EstimateReport transference_check(double p, int trials, const TransferenceOptions& opt) {
    if (trials < 1) throw std::invalid_argument("transference_check: trials must be positive");
    std::vector<TransferenceTrial> results(static_cast<std::size_t>(trials));
    parallel_for(results.size(), [&](std::size_t i) {
        TransferenceOptions o = opt;
        o.seed = opt.seed + 1000 * (i + 1);
        results[i] = transference_trial(random_group_kernel(opt.seed + i), p, o);
    });
    EstimateReport rep;
    rep.name = "transference";
    rep.bound = "||kappa||_{Cv_p(G)} <= int_N ||D^{1/p} kappa(n .)||_{Cv_p(A)} dn";
    rep.surrogate = "power-iteration lower bound of the grid convolution norm against the row-wise Cv_p integral";
    rep.claimed = 1.0;
    rep.tolerance = 0.05;
    int violations = 0, unstable_violations = 0;
    double worst = 0.0;
    for (const auto& r : results) {
        rep.samples.emplace_back(r.lhs, r.rhs);
        const double ratio = r.lhs / r.rhs;
        worst = std::max(worst, ratio);
        if (ratio > 1.0 + rep.tolerance) (r.stable ? violations : unstable_violations)++;
    }
    rep.fitted = worst;
    rep.residual = violations + unstable_violations;
    rep.verdict = violations > 0 ? Verdict::fail : unstable_violations > 0 ? Verdict::inconclusive : Verdict::pass;
    return rep;
}

EstimateReport separable_factorization(double p, const TransferenceOptions& opt) {
    auto Q = [](double x) { return window(x / 0.5) * std::cos(3.0 * x); };
    auto phi = [](double t) { return window(t / 0.5) * (1.0 - 0.8 * t); };
    GroupKernel k;
    k.x_half_width = 0.5;
    k.t_half_width = 0.5;
    k.value = [&, p](double x, double t) { return Q(x) * std::exp(-t / p) * phi(t); };
    const double q1 = real_integral([&](double x) { return std::abs(Q(x)); }, -0.5, 0.5);
    const int ks = static_cast<int>(std::ceil(0.5 / opt.spacing));
    std::vector<double> row(2 * ks + 1);
    for (int ds = -ks; ds <= ks; ++ds) row[ds + ks] = phi(ds * opt.spacing);
    const double cv = cvp_norm_1d(row, opt.spacing, p, 2 * opt.power_iterations);
    const double rhs = rhs_integral(k, p, opt.spacing, 2 * opt.power_iterations);
    EstimateReport rep;
    rep.name = "transference_separable";
    rep.bound = "RHS = ||Q||_1 ||phi||_{Cv_p(A)}";
    rep.surrogate = "row-wise RHS against the product of ||Q||_1 and one Cv_p estimate";
    rep.claimed = 1.0;
    rep.tolerance = 0.02;
    rep.fitted = rhs / (q1 * cv);
    rep.fitted_constant = q1 * cv;
    rep.residual = std::abs(rep.fitted - 1.0);
    rep.samples.emplace_back(rhs, q1 * cv);
    rep.verdict = rep.residual <= rep.tolerance ? Verdict::pass : Verdict::fail;
    return rep;
}

TransferenceTrial identity_trial(double p, const TransferenceOptions& opt) {
    const double r = 2.0 * opt.spacing;
    auto shape = [r](double x, double t) { return window(x / r) * window(t / r); };
    double mass = 0.0;
    for (int j = -2; j <= 2; ++j)
        for (int i = -2; i <= 2; ++i) mass += shape(i * opt.spacing, j * opt.spacing) * std::exp(j * opt.spacing);
    mass *= opt.spacing * opt.spacing;
    GroupKernel k;
    k.x_half_width = r;
    k.t_half_width = r;
    k.value = [shape, mass](double x, double t) { return shape(x, t) / mass; };
    return transference_trial(k, p, opt);
}

}  // namespace sphmult
