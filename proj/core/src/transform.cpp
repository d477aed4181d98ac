#include "sphmult/transform.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "sphmult/parallel.hpp"
#include "sphmult/space.hpp"
#include "sphmult/sphfn.hpp"

namespace sphmult {

namespace {

const std::vector<double>& barycentric_weights(int n) {
    static std::mutex mtx;
    static std::map<int, std::vector<double>> cache;
    std::lock_guard lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    const QuadRule& gl = gauss_legendre(n);
    std::vector<double> b(n, 1.0);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            if (k != j) b[j] /= (gl.x[j] - gl.x[k]);
    return cache.emplace(n, std::move(b)).first->second;
}

std::vector<double> densities(const RankOneSpace& space, std::span<const double> ts) {
    std::vector<double> d(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) d[i] = ts[i] > 0.0 ? density_delta(space, ts[i]) : 0.0;
    return d;
}

void check_tail(const RankOneSpace& space, const RadialFunction& f) {
    if (f.decay().kind == DecayKind::compact) return;
    const auto& t = f.t_grid();
    const auto& v = f.values();
    double peak = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] > 0.0) peak = std::max(peak, std::abs(v[i]) * density_delta(space, t[i]));
    const double tail = std::abs(v.back()) * density_delta(space, t.back());
    if (tail > 1e-8 * std::max(peak, 1e-300))
        throw std::domain_error("spherical transform: integrand has not decayed at the end of the grid");
}

// Sum_k weight_k phi_{lambda_k}(t) for every t; deterministic reduction over k.
std::vector<cplx> spectral_sum(const RankOneSpace& space, const QuadRule& lam, const std::vector<cplx>& weight,
                               std::span<const double> ts) {
    std::vector<std::size_t> order(ts.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return ts[a] < ts[b]; });
    std::vector<double> sorted(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) sorted[i] = ts[order[i]];

    const std::size_t chunk = 64;
    const std::size_t nchunks = (lam.size() + chunk - 1) / chunk;
    std::vector<std::vector<cplx>> partial(nchunks, std::vector<cplx>(ts.size()));
    parallel_for(nchunks, [&](std::size_t c) {
        auto& acc = partial[c];
        for (std::size_t k = c * chunk; k < std::min(lam.size(), (c + 1) * chunk); ++k) {
            if (weight[k] == cplx{}) continue;
            const auto phi = phi_oracle_table(space, lam.x[k], sorted);
            for (std::size_t i = 0; i < sorted.size(); ++i) acc[i] += weight[k] * phi[i];
        }
    });
    std::vector<cplx> out(ts.size());
    for (const auto& acc : partial)
        for (std::size_t i = 0; i < ts.size(); ++i) out[order[i]] += acc[i];
    return out;
}

QuadRule spectral_rule(double lambda_max, double t_max, const InverseOptions& opt) {
    const double h = std::min(0.5, 6.0 / std::max(t_max, 1e-3));
    return panel_rule(graded_breaks(0.0, lambda_max, h, {0.0}, opt.lambda_min_panel), opt.nodes_per_panel);
}

}  // namespace

RadialGrid RadialGrid::uniform(double t_max, double panel_width, int nodes_per_panel) {
    if (!(t_max > 0.0) || !(panel_width > 0.0)) throw std::invalid_argument("RadialGrid needs positive sizes");
    RadialGrid g;
    g.nodes_per_panel = nodes_per_panel;
    const int panels = std::max(1, static_cast<int>(std::ceil(t_max / panel_width - 1e-12)));
    for (int i = 0; i <= panels; ++i) g.breaks.push_back(t_max * i / panels);
    return g;
}

QuadRule RadialGrid::rule() const { return panel_rule(breaks, nodes_per_panel); }

RadialFunction::RadialFunction(RadialGrid grid, std::vector<cplx> values, DecayHint decay)
    : grid_(std::move(grid)), rule_(grid_.rule()), values_(std::move(values)), decay_(decay) {
    if (values_.size() != rule_.size()) throw std::invalid_argument("RadialFunction: value count does not match grid");
    for (const cplx& v : values_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw std::invalid_argument("RadialFunction: non-finite sample");
}

RadialFunction RadialFunction::sample(const std::function<cplx(double)>& f, RadialGrid grid, DecayHint decay) {
    const QuadRule r = grid.rule();
    std::vector<cplx> v(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) v[i] = f(r.x[i]);
    return RadialFunction(std::move(grid), std::move(v), decay);
}

cplx RadialFunction::at(double t) const {
    const auto& br = grid_.breaks;
    if (t > br.back() || br.size() < 2) return 0.0;
    std::size_t p = std::upper_bound(br.begin(), br.end(), t) - br.begin();
    p = std::clamp<std::size_t>(p, 1, br.size() - 1) - 1;
    const int n = grid_.nodes_per_panel;
    const double a = br[p], b = br[p + 1];
    const double s = (2.0 * t - a - b) / (b - a);
    const QuadRule& gl = gauss_legendre(n);
    const auto& bw = barycentric_weights(n);
    cplx num = 0.0;
    double den = 0.0;
    for (int j = 0; j < n; ++j) {
        const double d = s - gl.x[j];
        if (d == 0.0) return values_[p * n + j];
        num += bw[j] / d * values_[p * n + j];
        den += bw[j] / d;
    }
    return num / den;
}

bool SpectralFunction::check_weyl(double tol) const {
    for (double l : {0.37, 1.3, 4.1, 9.7}) {
        const cplx a = evaluator(l), b = evaluator(-l);
        if (std::abs(a - b) > tol * std::max(1.0, std::abs(a))) return false;
    }
    return true;
}

double spectral_cutoff(double epsilon, double fallback) {
    if (epsilon > 0.0) return std::sqrt(40.0 / epsilon);
    return fallback;
}

std::vector<cplx> spherical_transform(const RankOneSpace& space, const RadialFunction& f,
                                      std::span<const double> lambdas) {
    check_tail(space, f);
    const auto& t = f.t_grid();
    const auto d = densities(space, t);
    std::vector<cplx> fw(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) fw[i] = f.weights()[i] * f.values()[i] * d[i];
    std::vector<cplx> out(lambdas.size());
    parallel_for(lambdas.size(), [&](std::size_t k) {
        const auto phi = phi_oracle_table(space, -lambdas[k], t);
        cplx s = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) s += fw[i] * phi[i];
        out[k] = s;
    });
    return out;
}

cplx spherical_transform(const RankOneSpace& space, const RadialFunction& f, cplx lambda) {
    check_tail(space, f);
    const auto& t = f.t_grid();
    const auto d = densities(space, t);
    const auto phi = phi_oracle_table(space, -lambda, t);
    cplx s = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) s += f.weights()[i] * f.values()[i] * d[i] * phi[i];
    return s;
}

std::vector<cplx> inverse_spherical_transform(const RankOneSpace& space, const SpectralFunction& m,
                                              std::span<const double> ts, double epsilon,
                                              const InverseOptions& opt) {
    if (!m.weyl_symmetric || !m.check_weyl())
        throw std::invalid_argument("inverse transform of a bi-K-invariant kernel needs a Weyl-symmetric multiplier");
    if (epsilon < 0.0) throw std::invalid_argument("epsilon must be >= 0");
    if (ts.empty()) return {};
    const double lmax = opt.lambda_max > 0.0 ? opt.lambda_max : spectral_cutoff(epsilon);
    const double tmax = *std::max_element(ts.begin(), ts.end());
    const QuadRule lam = spectral_rule(lmax, tmax, opt);
    const double cnu = 2.0 * inversion_constant(space);
    std::vector<cplx> weight(lam.size());
    for (std::size_t k = 0; k < lam.size(); ++k) {
        const double l = lam.x[k];
        weight[k] = cnu * lam.w[k] * m(l) * std::exp(-epsilon * l * l) * plancherel_density(space, l);
    }
    return spectral_sum(space, lam, weight, ts);
}

cplx inverse_spherical_transform(const RankOneSpace& space, const SpectralFunction& m, double t, double epsilon,
                                 const InverseOptions& opt) {
    const double ts[1] = {t};
    return inverse_spherical_transform(space, m, std::span<const double>(ts), epsilon, opt)[0];
}

RadialFunction inverse_spherical_transform(const RankOneSpace& space, const SpectralFunction& m,
                                           const RadialGrid& grid, double epsilon, const InverseOptions& opt) {
    const QuadRule r = grid.rule();
    auto v = inverse_spherical_transform(space, m, std::span<const double>(r.x), epsilon, opt);
    return RadialFunction(grid, std::move(v), {DecayKind::gaussian, 0.0});
}

std::vector<cplx> abel_transform(const RankOneSpace& space, const RadialFunction& f, std::span<const double> b,
                                 double lambda_max) {
    double bmax = 1.0;
    for (double x : b) bmax = std::max(bmax, std::abs(x));
    const QuadRule lam = spectral_rule(lambda_max, bmax, {});
    const auto hf = spherical_transform(space, f, lam.x);
    std::vector<cplx> out(b.size());
    for (std::size_t j = 0; j < b.size(); ++j) {
        cplx s = 0.0;
        for (std::size_t k = 0; k < lam.size(); ++k) s += lam.w[k] * hf[k] * std::cos(lam.x[k] * b[j]);
        out[j] = s / std::numbers::pi;
    }
    return out;
}

RadialFunction convolve_radial(const RankOneSpace& space, const RadialFunction& f, const RadialFunction& k,
                               double lambda_max) {
    const auto& t = f.t_grid();
    const QuadRule lam = spectral_rule(lambda_max, t.back(), {});
    const auto hf = spherical_transform(space, f, lam.x);
    const auto hk = spherical_transform(space, k, lam.x);
    const double cnu = 2.0 * inversion_constant(space);
    std::vector<cplx> weight(lam.size());
    for (std::size_t j = 0; j < lam.size(); ++j)
        weight[j] = cnu * lam.w[j] * hf[j] * hk[j] * plancherel_density(space, lam.x[j]);
    return RadialFunction(f.grid(), spectral_sum(space, lam, weight, t), f.decay());
}

double plancherel_ratio(const RankOneSpace& space, const RadialFunction& f, double lambda_max) {
    const auto& t = f.t_grid();
    double lhs = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] > 0.0) lhs += f.weights()[i] * std::norm(f.values()[i]) * density_delta(space, t[i]);
    const QuadRule lam = spectral_rule(lambda_max, t.back(), {});
    const auto hf = spherical_transform(space, f, lam.x);
    double rhs = 0.0;
    for (std::size_t k = 0; k < lam.size(); ++k) rhs += 2.0 * lam.w[k] * std::norm(hf[k]) * plancherel_density(space, lam.x[k]);
    return lhs / rhs;
}

}  // namespace sphmult
