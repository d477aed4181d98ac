#include "sphmult/sphfn.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sphmult {

namespace {

using State = std::array<double, 4>;  // Re psi, Im psi, Re psi', Im psi'

double drift(const RankOneSpace& s, double t) {
    return s.m_alpha() / std::tanh(t) + 2.0 * s.m_2alpha() / std::tanh(2.0 * t);
}

struct RadialSystem {
    RankOneSpace space;
    cplx lambda2_plus_rho2;
    double kappa;

    void operator()(const State& y, State& dy, double t) const {
        const double p = drift(space, t);
        const double r = 2.0 * kappa - p;
        const cplx q = kappa * p - kappa * kappa - lambda2_plus_rho2;
        const cplx psi{y[0], y[1]}, dpsi{y[2], y[3]};
        const cplx dd = r * dpsi + q * psi;
        dy = {y[2], y[3], dd.real(), dd.imag()};
    }
};

double scaling_rate(const RankOneSpace& space, cplx lambda) { return space.rho() - std::abs(lambda.imag()); }

}  // namespace

const char* to_string(SphericalMethod m) {
    switch (m) {
        case SphericalMethod::oracle: return "oracle";
        case SphericalMethod::local: return "local";
        case SphericalMethod::hc: return "hc";
    }
    return "?";
}

cplx phi_series(const RankOneSpace& space, cplx lambda, double t, cplx* derivative) {
    const cplx i{0.0, 1.0};
    const cplx a = 0.5 * (space.rho() + i * lambda), b = 0.5 * (space.rho() - i * lambda);
    const double c = 0.5 * space.n();
    const double sh = std::sinh(t);
    const double z = -sh * sh;
    if (std::abs(z) >= 1.0) throw std::domain_error("hypergeometric series needs sinh t < 1");
    auto hyp = [z](cplx a_, cplx b_, double c_) {
        cplx term = 1.0, sum = 1.0;
        for (int k = 0; k < 2000; ++k) {
            term *= (a_ + double(k)) * (b_ + double(k)) / ((c_ + k) * (k + 1.0)) * z;
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    };
    if (derivative) *derivative = a * b / c * hyp(a + 1.0, b + 1.0, c + 1.0) * (-std::sinh(2.0 * t));
    return hyp(a, b, c);
}

std::vector<cplx> phi_oracle_table(const RankOneSpace& space, cplx lambda, std::span<const double> ts,
                                   const OracleOptions& opt, std::vector<cplx>* derivative) {
    if (std::abs(lambda.imag()) > space.rho() + 1e-12)
        throw std::domain_error("phi_oracle requires |Im lambda| <= rho");
    std::vector<cplx> out(ts.size());
    if (derivative) derivative->assign(ts.size(), cplx{});
    const double t0 = opt.t_launch;
    std::vector<double> times{t0};
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const double t = ts[k];
        if (t < 0.0 || t > oracle_t_max + 1e-9) throw std::domain_error("phi_oracle requires t in [0, 30]");
        if (k > 0 && t < ts[k - 1]) throw std::invalid_argument("phi_oracle_table needs a nondecreasing grid");
        if (t <= t0) {
            cplx d;
            out[k] = phi_series(space, lambda, t, &d);
            if (derivative) (*derivative)[k] = d;
        } else if (t > times.back()) {
            times.push_back(t);
        }
    }
    if (times.size() == 1) return out;

    const double kappa = scaling_rate(space, lambda);
    const double rho = space.rho();
    cplx dphi0;
    const cplx phi0 = phi_series(space, lambda, t0, &dphi0);
    const double e0 = std::exp(kappa * t0);
    const cplx psi0 = e0 * phi0, dpsi0 = e0 * (dphi0 + kappa * phi0);
    State y{psi0.real(), psi0.imag(), dpsi0.real(), dpsi0.imag()};
    RadialSystem sys{space, lambda * lambda + rho * rho, kappa};

    std::vector<State> states;
    states.reserve(times.size());
    namespace ode = boost::numeric::odeint;
    auto stepper = ode::make_controlled<ode::runge_kutta_fehlberg78<State>>(opt.abs_tol, opt.rel_tol);
    try {
        ode::integrate_times(stepper, sys, y, times.begin(), times.end(), 1e-4,
                             [&](const State& s, double) { states.push_back(s); });
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("radial ODE integration failed: ") + e.what());
    }
    if (states.size() != times.size()) throw std::runtime_error("radial ODE integration stopped early");

    std::size_t j = 1;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const double t = ts[k];
        if (t <= t0) continue;
        while (times[j] < t) ++j;
        const State& s = states[j];
        const double e = std::exp(-kappa * t);
        const cplx psi{s[0], s[1]}, dpsi{s[2], s[3]};
        out[k] = e * psi;
        if (derivative) (*derivative)[k] = e * (dpsi - kappa * psi);
        if (!std::isfinite(out[k].real()) || !std::isfinite(out[k].imag()))
            throw std::runtime_error("radial ODE produced a non-finite value");
    }
    return out;
}

cplx phi_oracle(const RankOneSpace& space, cplx lambda, double t, const OracleOptions& opt) {
    const double ts[1] = {t};
    return phi_oracle_table(space, lambda, ts, opt)[0];
}

cplx local_term(const RankOneSpace& space, cplx lambda, double t) {
    if (t == 0.0) return 1.0;
    return weight_w(space, t) * bessel_cJ(0.5 * space.n() - 1.0, lambda * t);
}

SphericalSample phi_local(const RankOneSpace& space, cplx lambda, double t, double r0) {
    if (t < 0.0 || t > r0) throw std::domain_error("phi_local requires 0 <= t <= r0");
    SphericalSample s{lambda, t, local_term(space, lambda, t), SphericalMethod::local};
    s.est_error = std::abs(phi_oracle(space, lambda, t) - s.value);
    return s;
}

Evaluated hc_value(const RankOneSpace& space, cplx lambda, double t, int L) {
    if (t < 0.5) throw std::domain_error("Harish-Chandra series requires t >= 1/2");
    const cplx i{0.0, 1.0};
    const double rho = space.rho();
    cplx total = 0.0;
    for (double sign : {1.0, -1.0}) {
        const cplx l = sign * lambda;
        const CFunctionValue c = c_function(space, l);
        if (c.status != Status::ok) return {cplx{}, c.status};
        const Evaluated w = omega_partial(space, l, t, L);
        if (!w.ok()) return w;
        total += c.value * std::exp((i * l - rho) * t) * (1.0 + std::exp(-2.0 * t) * w.value);
    }
    return {total, Status::ok};
}

SphericalSample phi_hc(const RankOneSpace& space, cplx lambda, double t, int L) {
    const Evaluated v = hc_value(space, lambda, t, L);
    SphericalSample s{lambda, t, v.value, SphericalMethod::hc, v.status};
    if (v.ok()) s.est_error = std::abs(phi_oracle(space, lambda, t) - v.value);
    return s;
}

double ode_residual(const RankOneSpace& space, cplx lambda, double t, double h) {
    static constexpr std::array<double, 4> c{4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
    std::vector<double> ts;
    for (int k = -4; k <= 4; ++k) ts.push_back(t + k * h);
    std::vector<cplx> du;
    const std::vector<cplx> u = phi_oracle_table(space, lambda, ts, {}, &du);
    cplx d2 = 0.0;
    for (int k = 1; k <= 4; ++k) d2 += c[k - 1] * (du[4 + k] - du[4 - k]);
    d2 /= h;
    const double rho = space.rho();
    return std::abs(d2 + drift(space, t) * du[4] + (lambda * lambda + rho * rho) * u[4]);
}

EstimateReport weyl_symmetry_check(const RankOneSpace& space, std::span<const double> lambda_grid,
                                   std::span<const double> t_grid, double tol) {
    std::vector<double> ts(t_grid.begin(), t_grid.end());
    std::sort(ts.begin(), ts.end());
    double worst = 0.0;
    for (double l : lambda_grid) {
        const auto a = phi_oracle_table(space, l, ts);
        const auto b = phi_oracle_table(space, -l, ts);
        for (std::size_t k = 0; k < ts.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
    }
    EstimateReport r;
    r.name = "weyl_symmetry";
    r.bound = "max |phi(l,t) - phi(-l,t)|";
    r.surrogate = "oracle sweep";
    r.fitted = worst;
    r.claimed = 0.0;
    r.tolerance = tol;
    r.verdict = worst <= tol ? Verdict::pass : Verdict::fail;
    return r;
}

CFunctionValue hc_fit(const RankOneSpace& space, double lambda) {
    if (!(lambda > 0.0)) throw std::domain_error("hc_fit requires lambda > 0");
    const double rho = space.rho();
    const double h = std::min(0.5, std::numbers::pi / (3.0 * lambda));
    std::vector<double> ts;
    for (int k = 0; k < 8; ++k) ts.push_back(12.0 + k * h);
    const auto phi = phi_oracle_table(space, lambda, ts);
    // e^{rho t} phi(t) ~ 2 (Re c cos(l t) - Im c sin(l t))
    double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
    std::vector<double> y(ts.size());
    for (std::size_t k = 0; k < ts.size(); ++k) {
        y[k] = std::exp(rho * ts[k]) * phi[k].real();
        const double u = 2.0 * std::cos(lambda * ts[k]), v = -2.0 * std::sin(lambda * ts[k]);
        a11 += u * u;
        a12 += u * v;
        a22 += v * v;
        b1 += u * y[k];
        b2 += v * y[k];
    }
    const double det = a11 * a22 - a12 * a12;
    const double cr = (a22 * b1 - a12 * b2) / det, ci = (a11 * b2 - a12 * b1) / det;
    double ss = 0, norm = 0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const double m = 2.0 * (cr * std::cos(lambda * ts[k]) - ci * std::sin(lambda * ts[k]));
        ss += (y[k] - m) * (y[k] - m);
        norm += y[k] * y[k];
    }
    CFunctionValue out;
    out.lambda = lambda;
    out.value = {cr, ci};
    out.source = CSource::asymptotic_fit;
    out.fit_residual = std::sqrt(ss / std::max(norm, 1e-300));
    return out;
}

}  // namespace sphmult
