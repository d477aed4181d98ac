// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Usage: sphmult_acceptance [criterion numbers...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sphmult/group.hpp"
#include "sphmult/harness.hpp"
#include "sphmult/kernels.hpp"
#include "sphmult/mult.hpp"
#include "sphmult/sphfn.hpp"
#include "sphmult/transform.hpp"

using namespace sphmult;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

const RankOneSpace kSpaces[] = {RankOneSpace::H2(), RankOneSpace::H3(), RankOneSpace::CH2()};

std::vector<double> log_grid(double a, double b, int n) {
    std::vector<double> v;
    for (int k = 0; k < n; ++k) v.push_back(a * std::pow(b / a, k / (n - 1.0)));
    return v;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    return linear_fit(lx, ly).slope;
}

void spherical_oracle(Outcome& o) {
    double e0 = 0, e1 = 0, ew = 0, res = 0;
    const std::vector<double> ts{0.1, 0.5, 1.0, 2.0, 5.0, 10.0};
    for (const auto& s : kSpaces) {
        for (double l : {0.0, 0.5, 3.0, 10.0}) e0 = std::max(e0, std::abs(phi_oracle(s, l, 0.0) - 1.0));
        for (double sign : {1.0, -1.0})
            for (const cplx& v : phi_oracle_table(s, cplx(0.0, sign * s.rho()), ts)) e1 = std::max(e1, std::abs(v - 1.0));
        for (cplx l : {cplx(0.5, 0.0), cplx(3.0, 0.2), cplx(10.0, -0.3), cplx(6.0, 0.0)}) {
            const auto a = phi_oracle_table(s, l, ts), b = phi_oracle_table(s, -l, ts);
            for (std::size_t i = 0; i < ts.size(); ++i) {
                ew = std::max(ew, std::abs(a[i] - b[i]));
                res = std::max(res, ode_residual(s, l, ts[i]));
            }
        }
    }
    o.detail << "|phi(0)-1|=" << e0 << " |phi_irho-1|=" << e1 << " weyl=" << ew << " ode=" << res;
    o.require(e0 <= 1e-10, "phi(0)");
    o.require(e1 <= 1e-8, "phi_{i rho}");
    o.require(ew <= 1e-8, "Weyl");
    o.require(res <= 1e-6, "ODE residual");
}

void harish_chandra(Outcome& o) {
    double worst = 0;
    int violations = 0;
    for (const auto& s : {RankOneSpace::H2(), RankOneSpace::H3()})
        for (double t : {1.0, 2.0, 4.0, 8.0})
            for (double l : {0.25, 1.0, 3.0, 6.0, 10.0}) {
                worst = std::max(worst, phi_hc(s, l, t, 12).est_error);
                double prev = INFINITY;
                for (int L = 0; L <= 12; ++L) {
                    const double e = phi_hc(s, l, t, L).est_error;
                    if (prev > 1e-13 && !(e < prev)) {
                        ++violations;
                        o.detail << " [" << s.name() << " t=" << t << " l=" << l << " L=" << L << ": " << prev
                                 << " -> " << e << "]";
                    }
                    prev = e;
                }
            }
    double prev = INFINITY;
    bool sweep = true;
    for (int L = 2; L <= 12; ++L) {
        const double e = phi_hc(RankOneSpace::H3(), 0.5, 1.0, L).est_error;
        sweep = sweep && e < prev;
        prev = e;
    }
    o.detail << " max error (L=12)=" << worst << " non-decreasing steps=" << violations
             << " H3 sweep decreasing=" << sweep;
    o.require(sweep, "H3 sweep");
    o.require(worst < 1e-6, "series error");
    o.require(violations == 0, "monotone in L");
}

void c_function_check(Outcome& o) {
    double rel = 0;
    for (const auto& s : kSpaces)
        for (double l : log_grid(0.5, 20.0, 10)) {
            const cplx c = c_function(s, l).value;
            rel = std::max(rel, std::abs(hc_fit(s, l).value - c) / std::abs(c));
        }
    o.detail << "closed form vs fit rel=" << rel << " growth exponents:";
    o.require(rel < 1e-5, "c-function fit");
    for (const auto& s : kSpaces) {
        const auto ls = log_grid(20.0, 200.0, 8);
        std::vector<double> pl;
        for (double l : ls) pl.push_back(plancherel_density(s, l));
        const double k = slope(ls, pl);
        o.detail << ' ' << s.name() << '=' << k;
        o.require(std::abs(k - (s.n() - 1)) <= 0.1, "Plancherel growth " + s.name());
    }
}

void local_expansion(Outcome& o) {
    const auto ts = log_grid(0.02, 0.2, 10);
    auto errors = [&](const RankOneSpace& s, double l) {
        std::vector<double> e;
        for (double t : ts) e.push_back(std::abs(phi_oracle(s, l, t) - local_term(s, l, t)));
        return e;
    };
    o.detail << "slopes:";
    // spaces where the t^2 coefficient is present
    for (const auto& s : {RankOneSpace::H2(), RankOneSpace(3, 0), RankOneSpace(4, 3)})
        for (double l : {0.5, 2.0}) {
            const double k = slope(ts, errors(s, l));
            o.detail << ' ' << s.name() << "@" << l << '=' << k;
            o.require(std::abs(k - 2.0) <= 0.2, "slope " + s.name());
        }
    // H3: exact; CH2: the t^2 coefficient vanishes and the error is o(t^2)
    const auto h3 = errors(RankOneSpace::H3(), 2.0);
    const double h3max = *std::max_element(h3.begin(), h3.end());
    const double ch2 = slope(ts, errors(RankOneSpace::CH2(), 2.0));
    o.detail << " H3 max=" << h3max << " CH2 slope=" << ch2;
    o.require(h3max < 1e-12, "H3 exact");
    o.require(ch2 >= 1.8, "CH2 bound");
}

void transforms(Outcome& o) {
    const RankOneSpace h2 = RankOneSpace::H2(), h3 = RankOneSpace::H3();
    const RadialGrid grid = RadialGrid::uniform(12.0, 0.5);
    const auto gauss = RadialFunction::sample([](double t) { return cplx(std::exp(-t * t), 0.0); }, grid);
    SpectralFunction hat{[&](cplx l) { return spherical_transform(h2, gauss, l.real()); }, true, 0.0, "hat"};
    const std::vector<double> ts{0.0, 0.5, 1.0, 2.0, 3.0};
    const auto back = inverse_spherical_transform(h2, hat, ts, 0.0, {.lambda_max = 25.0});
    double rt = 0, norm = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        rt = std::max(rt, std::abs(back[i] - std::exp(-ts[i] * ts[i])));
        norm = std::max(norm, std::exp(-ts[i] * ts[i]));
    }
    rt /= norm;

    const std::vector<double> bs{0.2, 0.8, 1.5, 3.0};
    const auto slice = abel_transform(h2, gauss, bs, 40.0);
    double abel = 0;
    for (std::size_t i = 0; i < bs.size(); ++i)
        abel = std::max(abel, std::abs(abel_horocycle(gauss, bs[i]) - slice[i].real()) / std::abs(slice[0]));

    // (t / sinh t) e^{-t^2/4e} <-> 2 sqrt(pi) e^{3/2} e^{-e l^2} on H3
    const double eps = 0.3;
    const auto heat = RadialFunction::sample(
        [&](double t) { return cplx((t == 0 ? 1.0 : t / std::sinh(t)) * std::exp(-t * t / (4 * eps)), 0.0); }, grid);
    const double scale = 2 * std::sqrt(std::numbers::pi) * std::pow(eps, 1.5);
    double pair = 0;
    for (double l : {0.0, 1.0, 3.0, 6.0})
        pair = std::max(pair, std::abs(spherical_transform(h3, heat, l) - scale * std::exp(-eps * l * l)) / scale);
    const auto inv = inverse_spherical_transform(h3, gaussian_1d(0.0), ts, eps);
    for (std::size_t i = 0; i < ts.size(); ++i) pair = std::max(pair, std::abs(scale * inv[i] - heat.at(ts[i])));

    o.detail << "round trip=" << rt << " abel routes=" << abel << " gaussian pair=" << pair;
    o.require(rt < 1e-4, "round trip");
    o.require(abel < 1e-4, "Abel routes");
    o.require(pair < 1e-4, "Gaussian pair");
}

void kernel_identities(Outcome& o) {
    const RankOneSpace h2 = RankOneSpace::H2();
    const Exponent p(4.0 / 3.0);
    const SpectralFunction m = product_1d(gaussian_1d(0.1), imaginary_power_1d(h2, 1.0));
    double k1 = 0;
    for (double t : {1.5, 3.0, 6.0}) {
        const cplx a = kernel_piece_eval(KernelPieceId::kappa_1, h2, m, p, {t, 0.0}, 0.0, {.lambda_max = 20.0});
        const cplx b = phi_p_eval(h2, m, p, t, PhiRoute::shifted_eps, {.lambda_max = 20.0});
        k1 = std::max(k1, std::abs(a - std::exp(-2.0 * h2.rho() * t / p.p()) * b));
    }
    const std::vector<double> ts{0.5, 1.5, 3.0, 6.0};
    const RankOneSplit split = rank_one_split(h2, imaginary_power_1d(h2, 1.0), ts, 0.1);
    const ProductSpace s = parse_product_space("H2xH2");
    const std::vector<double> grid{0.5, 1.5, 3.0};
    const ProductSplit ps_gauss = product_split(s, builtin_multiplier("gaussian", {0.1}, s), grid, grid, 0.0);
    const ProductSplit ps_mixed = product_split(
        s, tensor_product(boundary_power_1d(h2, p, 1.0), imaginary_power_1d(h2, 1.0)), grid, grid, 0.05);
    o.detail << "kappa_1=" << k1 << " local=" << split.local_residual << " global=" << split.global_residual
             << " product(gauss)=" << ps_gauss.residual << " product(mixed)=" << ps_mixed.residual;
    o.require(k1 < 1e-6, "kappa_1");
    o.require(split.local_residual < 1e-6 && split.global_residual < 1e-6, "rank-one split");
    o.require(ps_gauss.residual < 1e-6 && ps_mixed.residual < 1e-6, "product split");
}

void battery(Outcome& o) {
    int passed = 0, total = 0;
    for (double pv : {4.0 / 3.0, 1.5}) {
        for (const auto& r : estimate_battery(Exponent(pv))) {
            ++total;
            if (r.passed())
                ++passed;
            else
                o.require(false, r.name + " (p=" + std::to_string(pv).substr(0, 4) + ", fitted " +
                                     std::to_string(r.fitted) + ", claimed " + std::to_string(r.claimed) + ")");
        }
    }
    o.detail << passed << "/" << total << " targets over p in {4/3, 3/2}";
}

void iwasawa_cartan(Outcome& o) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> X(-50.0, 50.0), T(0.01, 18.0);
    double worst_low = 0, worst_high = 0;
    for (int i = 0; i < 10000; ++i) {
        const double x = X(rng), t = T(rng);
        const double e = iwasawa_cartan_gap(x, t);
        worst_low = std::max(worst_low, -e);
        worst_high = std::max(worst_high, e - 2.0 * std::exp(-2.0 * t));
    }
    std::vector<double> tb, ev;
    for (double t = 6.0; t <= 12.0; t += 1.0) {
        tb.push_back(t);
        ev.push_back(std::log(iwasawa_cartan_gap(0.7, t)));
    }
    const double decay = linear_fit(tb, ev).slope;
    const TailReport tails = poisson_tails(2.0);
    const bool hp_finite = std::all_of(tails.hp_integrals.begin(), tails.hp_integrals.end(),
                                       [](double v) { return std::isfinite(v); });
    o.detail << "max violation below 0=" << std::max(0.0, worst_low) << " above bound=" << std::max(0.0, worst_high)
             << " E-decay slope=" << decay << " tails converge=" << tails.converges;
    o.require(worst_low <= 1e-9 && worst_high <= 1e-9, "0 <= E <= 2 e^{-2 t_b}");
    o.require(std::abs(decay + 2.0) <= 0.1, "E decay");
    o.require(tails.converges && hp_finite, "integrable tails");
}

void transference(Outcome& o) {
    const EstimateReport t = transference_check(1.5, 20);
    const EstimateReport s = separable_factorization(1.5);
    o.detail << "max LHS/RHS=" << t.fitted << " (" << to_string(t.verdict) << "), separable ratio=" << s.fitted;
    o.require(t.passed(), "transference");
    o.require(std::abs(s.fitted - 1.0) <= 0.02, "separable factorisation");
}

void independence(Outcome& o) {
    const auto r = independence_witness(parse_product_space("H2xH2"), Exponent(1.5), {1, 1});
    o.detail << "regime A slope=" << r.regime_a_slope << " regime B marc=" << r.regime_b_marc_exponent
             << " joint=" << r.regime_b_joint_exponent;
    o.require(std::abs(r.regime_a_slope + 1.0) <= 0.05, "regime A");
    o.require(std::abs(r.regime_b_marc_exponent - 1.25) <= 0.05, "regime B marc");
    o.require(std::abs(r.regime_b_joint_exponent - 0.5) <= 0.05, "regime B joint");
}

void operator_harness(Outcome& o) {
    const auto start = std::chrono::steady_clock::now();
    const SuiteResult r = run_suite("operator", ExperimentConfig{});
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (const auto& rep : r.reports) {
        o.detail << rep.name << '=' << rep.fitted << ' ';
        o.require(rep.passed(), rep.name);
    }
    for (const auto& e : r.operators) {
        o.detail << "norm(p=" << e.p << ")=";
        for (const auto& [n, v] : e.resolution_curve) o.detail << n << ':' << v << ' ';
        o.require(e.verdict == Verdict::pass, "resolution stability at p=" + std::to_string(e.p));
    }
    o.require(secs < 1800.0, "runtime");
}

struct Criterion {
    int id;
    const char* title;
    std::function<void(Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {1, "spherical oracle", spherical_oracle},
        {2, "Harish-Chandra reconstruction", harish_chandra},
        {3, "c-function cross-validation", c_function_check},
        {4, "local expansion", local_expansion},
        {5, "transform round trip, Abel routes, Gaussian pair", transforms},
        {6, "kernel identities", kernel_identities},
        {7, "pointwise bound battery", battery},
        {8, "Iwasawa/Cartan comparison", iwasawa_cartan},
        {9, "transference inequality", transference},
        {10, "independence regimes", independence},
        {11, "operator harness", operator_harness},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::stoi(argv[i]));
    int failures = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && !only.count(c.id)) continue;
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!o.pass) ++failures;
        std::printf("criterion %2d %s: %s (%.1f s) %s\n", c.id, o.pass ? "PASS" : "FAIL", c.title, secs,
                    o.detail.str().c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
