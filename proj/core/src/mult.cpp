#include "sphmult/mult.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "sphmult/parallel.hpp"

namespace sphmult {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

template <class T, class F>
T central_difference(const F& f, double x, int order, double h) {
    T s{};
    for (int k = 0; k <= order; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        s += sign * binomial(order, k) * f(x + (0.5 * order - k) * h);
    }
    return s / std::pow(h, order);
}

template <class T, class F>
T richardson(const F& f, double x, int order, double step) {
    if (order == 0) return f(x);
    T d[3];
    for (int l = 0; l < 3; ++l) d[l] = central_difference<T>(f, x, order, step / (1 << l));
    const T r1 = (4.0 * d[1] - d[0]) / 3.0;
    const T r2 = (4.0 * d[2] - d[1]) / 3.0;
    return (16.0 * r2 - r1) / 15.0;
}

double local_scale(const std::vector<double>& singular, double x) {
    if (singular.empty()) return 1.0;
    double s = kInf;
    for (double p : singular) s = std::min(s, std::abs(x - p));
    return s;
}

// Radius of a disc around z inside the declared holomorphy region.
double holomorphy_room(const MultiplierSpec& m, int var, cplx z) {
    double room = m.analytic_strip[var] - std::abs(z.imag());
    if (m.sector_holomorphic) room = std::max(room, (std::abs(z.real()) - std::abs(z.imag())) / std::sqrt(2.0));
    return room;
}

// Physicists' Hermite polynomial H_j(x).
cplx hermite(int j, cplx x) {
    cplx h0 = 1.0, h1 = 2.0 * x;
    if (j == 0) return h0;
    for (int k = 1; k < j; ++k) {
        const cplx h2 = 2.0 * x * h1 - 2.0 * k * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

// d^j/dz^j e^{-eps z^2}.
cplx gaussian_derivative(double eps, cplx z, int j) {
    const double s = std::sqrt(eps);
    return std::pow(-s, j) * hermite(j, s * z) * std::exp(-eps * z * z);
}

cplx ipow(cplx base, double u) {
    if (u == 0.0) return 1.0;
    return std::exp(cplx(0.0, u) * std::log(base));
}

bool is_finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Sampling of one spectral variable at refinement level k (Re >= 0 by Weyl symmetry).
// Tube grids refine geometrically toward the edge down to distance 1e-6 at the finest level.
std::vector<cplx> axis_points(double half_width, int level, int levels, NormDomain domain) {
    const bool real = domain == NormDomain::real_axis || half_width <= 0.0;
    const int per_decade = real ? 8 << level : 2 + level;
    const int decades = 5 + level;
    std::vector<double> re{0.0};
    for (int i = 0; i <= decades * per_decade; ++i) re.push_back(1e-3 * std::pow(10.0, double(i) / per_decade));

    std::vector<double> im{0.0};
    if (!real) {
        const int lin = 1 + level;
        for (int i = 1; i <= lin; ++i) {
            const double y = half_width * i / (lin + 1);
            im.push_back(y);
            im.push_back(-y);
        }
        const int steps = 2 + level;
        const double deepest = 1.0 + 5.0 * (level + 1) / std::max(levels, 1);
        for (int j = 1; j <= steps; ++j) {
            const double gap = half_width * std::pow(10.0, -deepest * j / steps);
            im.push_back(half_width - gap);
            im.push_back(-(half_width - gap));
        }
    }
    std::vector<cplx> pts;
    for (double y : im)
        for (double x : re) pts.emplace_back(x, y);
    return pts;
}

double condition_weight(Condition c, const ProductSpace& space, const Exponent& p, cplx z1, cplx z2, int j1, int j2) {
    switch (c) {
    case Condition::horm:
        return std::pow(theta_p(space.x1, p, z1), j1 + j2);
    case Condition::horm_infty:
        return std::pow(1.0 + theta_p(space.x1, p, z1), j1 + j2);
    case Condition::marc:
        return std::pow(theta_p(space.x1, p, z1), j1) * std::pow(theta_p(space.x2, p, z2), j2);
    case Condition::marc_infty:
        return std::pow(1.0 + theta_p(space.x1, p, z1), j1) * std::pow(1.0 + theta_p(space.x2, p, z2), j2);
    case Condition::marc_frastar:
        return std::pow(std::abs(z1), j1) * std::pow(std::abs(z2), j2);
    case Condition::ionescu:
        return std::pow(dp_ionescu(space, p, z1, z2), j1 + j2);
    }
    return 0.0;
}

// Multiplicative pattern search in the real parts around a sampled maximizer.
template <class F>
void polish_real_parts(const F& objective, double x_max, std::array<cplx, 2>& point, double& value) {
    double step = 0.1;
    while (step > 1e-4) {
        bool improved = false;
        for (int var = 0; var < 2; ++var)
            for (double dir : {1.0, -1.0}) {
                std::array<cplx, 2> trial = point;
                const double x = trial[var].real();
                const double nx = x > 0.0 ? x * std::exp(dir * step) : dir * step * 1e-3;
                if (nx < 0.0 || nx > x_max) continue;
                trial[var] = cplx(nx, trial[var].imag());
                const double v = objective(trial[0], trial[1]);
                if (v > value) {
                    value = v;
                    point = trial;
                    improved = true;
                }
            }
        if (!improved) step *= 0.5;
    }
}

bool product_weyl(const MultiplierSpec& m, double tol) {
    for (double a : {0.37, 2.1})
        for (double b : {0.81, 5.3}) {
            const cplx v = m(a, b);
            const double scale = std::max(1.0, std::abs(v));
            if (std::abs(m(-a, b) - v) > tol * scale || std::abs(m(a, -b) - v) > tol * scale) return false;
        }
    return true;
}

}  // namespace

Tube::Tube(const RankOneSpace& space, Exponent p) : rank_(1), half_width_{p.delta() * space.rho(), 0.0} {}

Tube::Tube(const ProductSpace& space, Exponent p)
    : rank_(2), half_width_{p.delta() * space.x1.rho(), p.delta() * space.x2.rho()} {}

bool Tube::contains(cplx z) const { return std::abs(z.imag()) < half_width_[0]; }

bool Tube::contains(cplx z1, cplx z2) const {
    if (rank_ != 2) throw std::logic_error("Tube: two-variable membership on a rank-one tube");
    return std::abs(z1.imag()) < half_width_[0] && std::abs(z2.imag()) < half_width_[1];
}

bool Tube::contains_closed(cplx z1, cplx z2) const {
    if (rank_ != 2) throw std::logic_error("Tube: two-variable membership on a rank-one tube");
    return std::abs(z1.imag()) <= half_width_[0] && std::abs(z2.imag()) <= half_width_[1];
}

double theta_p(const RankOneSpace& space, const Exponent& p, cplx zeta) {
    const cplx s(0.0, p.delta() * space.rho());
    return std::min(std::abs(zeta - s), std::abs(zeta + s));
}

double dp_ionescu(const ProductSpace& space, const Exponent& p, cplx z1, cplx z2) {
    const Tube tube(space, p);
    if (!tube.contains_closed(z1, z2)) throw std::domain_error("dp_ionescu: point outside the closed tube");
    const double dist = std::min(tube.half_width(0) - std::abs(z1.imag()), tube.half_width(1) - std::abs(z2.imag()));
    return std::sqrt(z1.real() * z1.real() + z2.real() * z2.real() + dist * dist);
}

bool MultiplierSpec::check_weyl(double tol) const { return product_weyl(*this, tol); }

SpectralFunction MultiplierSpec::slice_first(cplx z2) const {
    SpectralFunction f;
    f.evaluator = [ev = evaluator, z2](cplx z) { return ev(z, z2); };
    f.weyl_symmetric = weyl_symmetric;
    f.analytic_strip = analytic_strip[0];
    f.sector_holomorphic = sector_holomorphic;
    f.name = name + "|slice";
    return f;
}

double richardson_derivative(const std::function<double(double)>& f, double x, int order, double step) {
    return richardson<double>(f, x, order, step);
}

cplx richardson_derivative(const std::function<cplx(double)>& f, double x, int order, double step) {
    return richardson<cplx>(f, x, order, step);
}

std::vector<cplx> derivative_table(const MultiplierSpec& m, cplx z1, cplx z2, int N1, int N2,
                                   const DerivativeOptions& opt) {
    if (N1 > m.derivative_order_available[0] || N2 > m.derivative_order_available[1])
        throw std::invalid_argument("derivative_table: requested order exceeds the available order");
    const int stride = N2 + 1;
    std::vector<cplx> table((N1 + 1) * stride);

    DerivativeMethod method = opt.method;
    const double room1 = holomorphy_room(m, 0, z1);
    const double room2 = holomorphy_room(m, 1, z2);
    if (method == DerivativeMethod::automatic) {
        if (m.analytic_derivative)
            method = DerivativeMethod::analytic;
        else if (room1 > 0.0 && room2 > 0.0)
            method = DerivativeMethod::cauchy;
        else
            method = DerivativeMethod::richardson;
    }

    switch (method) {
    case DerivativeMethod::analytic: {
        if (!m.analytic_derivative) throw std::invalid_argument("derivative_table: no analytic derivative");
        for (int a = 0; a <= N1; ++a)
            for (int b = 0; b <= N2; ++b) table[a * stride + b] = m.analytic_derivative(z1, z2, a, b);
        break;
    }
    case DerivativeMethod::cauchy: {
        if (!(room1 > 0.0 && room2 > 0.0))
            throw std::domain_error("derivative_table: point outside the declared holomorphy strip");
        const int M = std::max(opt.contour_samples, 2 * std::max(N1, N2) + 4);
        const double r1 = std::isinf(room1) ? opt.max_radius : opt.radius_fraction * room1;
        const double r2 = std::isinf(room2) ? opt.max_radius : opt.radius_fraction * room2;
        std::vector<cplx> e(M);
        for (int k = 0; k < M; ++k) e[k] = std::polar(1.0, 2.0 * std::numbers::pi * k / M);
        // Samples on the torus, then a 2D discrete Fourier coefficient per order.
        std::vector<cplx> s(M * M);
        for (int a = 0; a < M; ++a)
            for (int b = 0; b < M; ++b) {
                s[a * M + b] = m(z1 + r1 * e[a], z2 + r2 * e[b]);
                if (!is_finite(s[a * M + b])) throw std::domain_error("derivative_table: non-finite multiplier value");
            }
        std::vector<cplx> row(M * stride);
        for (int a = 0; a < M; ++a)
            for (int j2 = 0; j2 <= N2; ++j2) {
                cplx acc = 0.0;
                for (int b = 0; b < M; ++b) acc += s[a * M + b] * std::conj(e[(j2 * b) % M]);
                row[a * stride + j2] = acc / double(M);
            }
        for (int j1 = 0; j1 <= N1; ++j1)
            for (int j2 = 0; j2 <= N2; ++j2) {
                cplx acc = 0.0;
                for (int a = 0; a < M; ++a) acc += row[a * stride + j2] * std::conj(e[(j1 * a) % M]);
                acc /= double(M);
                table[j1 * stride + j2] =
                    acc * factorial(j1) * factorial(j2) / (std::pow(r1, j1) * std::pow(r2, j2));
            }
        break;
    }
    case DerivativeMethod::richardson: {
        const double x1 = z1.real(), x2 = z2.real();
        const double y1 = z1.imag(), y2 = z2.imag();
        const double h1 = opt.step_fraction * local_scale(m.real_singularities, x1);
        const double h2 = opt.step_fraction * local_scale(m.real_singularities, x2);
        for (int a = 0; a <= N1; ++a)
            for (int b = 0; b <= N2; ++b) {
                auto inner = [&](double s1) {
                    auto g = [&](double s2) { return m(cplx(s1, y1), cplx(s2, y2)); };
                    return richardson<cplx>(g, x2, b, h2);
                };
                table[a * stride + b] = richardson<cplx>(inner, x1, a, h1);
            }
        break;
    }
    default:
        throw std::invalid_argument("derivative_table: unresolved method");
    }
    return table;
}

const char* to_string(Condition c) {
    switch (c) {
    case Condition::horm: return "horm";
    case Condition::horm_infty: return "horm_infty";
    case Condition::marc: return "marc";
    case Condition::marc_infty: return "marc_infty";
    case Condition::marc_frastar: return "marc_frastar";
    case Condition::ionescu: return "ionescu";
    }
    return "?";
}

Condition parse_condition(const std::string& s) {
    for (Condition c : {Condition::horm, Condition::horm_infty, Condition::marc, Condition::marc_infty,
                        Condition::marc_frastar, Condition::ionescu})
        if (s == to_string(c)) return c;
    throw std::invalid_argument("unknown condition: " + s);
}

nlohmann::json NormReport::to_json() const {
    nlohmann::json j;
    j["condition"] = to_string(condition);
    j["order"] = {order[0], order[1]};
    j["value"] = infinite ? nlohmann::json("inf") : nlohmann::json(value);
    j["infinite"] = infinite;
    j["argmax_point"] = {{argmax_point[0].real(), argmax_point[0].imag()},
                         {argmax_point[1].real(), argmax_point[1].imag()}};
    j["argmax_order"] = {argmax_order[0], argmax_order[1]};
    j["refinement_values"] = refinement_values;
    return j;
}

void check_branch_continuity(const MultiplierSpec& m, const ProductSpace& space, const Exponent& p) {
    const Tube tube(space, p);
    const int steps = 400;
    auto jump = [](cplx a, cplx b) { return std::abs(a - b) > 0.25 * (std::abs(a) + std::abs(b)) + 1e-12; };
    for (int var = 0; var < 2; ++var) {
        const double w = tube.half_width(var);
        const double w_other = tube.half_width(1 - var);
        for (double fy : {0.0, 0.5, 0.95})
            for (double other : {0.0, 0.5 * w_other})
                for (double other_re : {0.0, 1.3}) {
                    const cplx fixed(other_re, other);
                    auto eval = [&](cplx z) { return var == 0 ? m(z, fixed) : m(fixed, z); };
                    // Horizontal sweep across Re = 0, then a vertical sweep across the strip.
                    cplx prev = eval(cplx(-3.0, fy * w));
                    for (int k = 1; k <= steps; ++k) {
                        const cplx cur = eval(cplx(-3.0 + 6.0 * k / steps, fy * w));
                        if (jump(prev, cur)) throw std::domain_error("multiplier " + m.name + ": branch cut inside the tube");
                        prev = cur;
                    }
                    for (double x : {0.0, 0.7}) {
                        prev = eval(cplx(x, -0.999 * w));
                        for (int k = 1; k <= steps; ++k) {
                            const cplx cur = eval(cplx(x, -0.999 * w + 1.998 * w * k / steps));
                            if (jump(prev, cur))
                                throw std::domain_error("multiplier " + m.name + ": branch cut inside the tube");
                            prev = cur;
                        }
                    }
                }
    }
}

std::vector<NormReport> multiplier_norms(std::span<const Condition> conditions, const ProductSpace& space,
                                         const Exponent& p, const MultiplierSpec& m, std::array<int, 2> order,
                                         const NormOptions& opt) {
    if (!m.weyl_symmetric || !m.check_weyl()) throw std::invalid_argument("multiplier " + m.name + " is not Weyl-symmetric");
    NormDomain domain = opt.domain;
    for (Condition c : conditions)
        if (c == Condition::marc_frastar) domain = NormDomain::real_axis;
    const Tube tube(space, p);
    if (domain == NormDomain::tube) {
        const bool declared = m.analytic_derivative ||
                              (m.analytic_strip[0] > tube.half_width(0) && m.analytic_strip[1] > tube.half_width(1));
        if (!declared) throw std::domain_error("multiplier " + m.name + " is not declared holomorphic on the tube");
        check_branch_continuity(m, space, p);
    }

    const std::size_t nc = conditions.size();
    std::vector<NormReport> reps(nc);
    for (std::size_t c = 0; c < nc; ++c) {
        reps[c].condition = conditions[c];
        reps[c].order = order;
    }
    struct Best {
        double v = 0.0;
        std::size_t j = 0;
        int o1 = 0, o2 = 0;
    };
    const int stride = order[1] + 1;
    for (int level = 0; level < opt.refinements; ++level) {
        const auto a1 = axis_points(tube.half_width(0), level, opt.refinements, domain);
        const auto a2 = axis_points(tube.half_width(1), level, opt.refinements, domain);
        std::vector<Best> best(a1.size() * nc);
        parallel_for(a1.size(), [&](std::size_t i) {
            for (std::size_t j = 0; j < a2.size(); ++j) {
                const cplx z1 = a1[i], z2 = a2[j];
                if (domain == NormDomain::real_axis && (local_scale(m.real_singularities, z1.real()) == 0.0 ||
                                                        local_scale(m.real_singularities, z2.real()) == 0.0))
                    continue;
                const auto d = derivative_table(m, z1, z2, order[0], order[1], opt.derivative);
                for (std::size_t c = 0; c < nc; ++c) {
                    Best& b = best[i * nc + c];
                    for (int j1 = 0; j1 <= order[0]; ++j1)
                        for (int j2 = 0; j2 <= order[1]; ++j2) {
                            const double v = condition_weight(conditions[c], space, p, z1, z2, j1, j2) *
                                             std::abs(d[j1 * stride + j2]);
                            if (v > b.v) b = {v, j, j1, j2};
                        }
                }
            }
        });
        for (std::size_t c = 0; c < nc; ++c) {
            std::size_t bi = 0;
            for (std::size_t i = 1; i < a1.size(); ++i)
                if (best[i * nc + c].v > best[bi * nc + c].v) bi = i;
            const Best& b = best[bi * nc + c];
            std::array<cplx, 2> point{a1[bi], a2[b.j]};
            double value = b.v;
            if (value > 0.0) {
                auto objective = [&](cplx z1, cplx z2) {
                    if (domain == NormDomain::real_axis && (local_scale(m.real_singularities, z1.real()) == 0.0 ||
                                                            local_scale(m.real_singularities, z2.real()) == 0.0))
                        return 0.0;
                    const auto d = derivative_table(m, z1, z2, order[0], order[1], opt.derivative);
                    return condition_weight(conditions[c], space, p, z1, z2, b.o1, b.o2) *
                           std::abs(d[b.o1 * stride + b.o2]);
                };
                polish_real_parts(objective, std::max(a1.back().real(), a2.back().real()), point, value);
            }
            NormReport& rep = reps[c];
            rep.refinement_values.push_back(value);
            if (value >= rep.value) {
                rep.value = value;
                rep.argmax_point = point;
                rep.argmax_order = {b.o1, b.o2};
            }
        }
    }
    for (NormReport& rep : reps) {
        const auto& rv = rep.refinement_values;
        if (rv.size() >= 3 && rv.back() > opt.growth_flag * rv[rv.size() - 3]) {
            rep.infinite = true;
            rep.value = kInf;
        }
    }
    return reps;
}

NormReport multiplier_norm(Condition condition, const ProductSpace& space, const Exponent& p,
                           const MultiplierSpec& m, std::array<int, 2> order, const NormOptions& opt) {
    const Condition c[1] = {condition};
    return multiplier_norms(c, space, p, m, order, opt).front();
}

NormReport horm_norm(const RankOneSpace& space, const Exponent& p, const SpectralFunction& m, int N, bool at_infinity,
                     const NormOptions& opt) {
    if (!m.weyl_symmetric || !m.check_weyl()) throw std::invalid_argument("multiplier " + m.name + " is not Weyl-symmetric");
    const Tube tube(space, p);
    if (opt.domain == NormDomain::tube && !(m.analytic_strip > tube.half_width()))
        throw std::domain_error("multiplier " + m.name + " is not declared holomorphic on the tube");
    MultiplierSpec lifted;
    lifted.name = m.name;
    lifted.evaluator = [ev = m.evaluator](cplx z, cplx) { return ev(z); };
    lifted.analytic_strip = {m.analytic_strip, kInf};
    lifted.sector_holomorphic = m.sector_holomorphic;
    lifted.derivative_order_available = {std::max(N, 8), 0};
    DerivativeOptions dopt = opt.derivative;
    dopt.contour_samples = std::max(dopt.contour_samples, 2 * N + 4);

    NormReport rep;
    rep.condition = at_infinity ? Condition::horm_infty : Condition::horm;
    rep.order = {N, 0};
    for (int level = 0; level < opt.refinements; ++level) {
        const auto pts = axis_points(tube.half_width(), level, opt.refinements, opt.domain);
        double best = 0.0;
        for (const cplx z : pts) {
            std::vector<cplx> d(N + 1);
            if (opt.domain == NormDomain::tube) {
                const double r = opt.derivative.radius_fraction * holomorphy_room(lifted, 0, z);
                const int M = dopt.contour_samples;
                for (int k = 0; k < M; ++k) {
                    const cplx e = std::polar(1.0, 2.0 * std::numbers::pi * k / M);
                    const cplx v = m(z + r * e);
                    for (int j = 0; j <= N; ++j) d[j] += v * std::pow(std::conj(e), j);
                }
                for (int j = 0; j <= N; ++j) d[j] *= factorial(j) / (M * std::pow(r, j));
            } else {
                auto f = [&](double x) { return m(cplx(x, 0.0)); };
                const double h = opt.derivative.step_fraction * std::max(1.0, std::abs(z.real()));
                for (int j = 0; j <= N; ++j) d[j] = richardson<cplx>(f, z.real(), j, h);
            }
            const double th = theta_p(space, p, z);
            for (int j = 0; j <= N; ++j) {
                const double v = std::pow(at_infinity ? 1.0 + th : th, j) * std::abs(d[j]);
                if (v > best) {
                    best = v;
                    rep.argmax_point = {z, 0.0};
                    rep.argmax_order = {j, 0};
                }
            }
        }
        rep.refinement_values.push_back(best);
        rep.value = std::max(rep.value, best);
    }
    const auto& rv = rep.refinement_values;
    if (rv.size() >= 3 && rv.back() > opt.growth_flag * rv[rv.size() - 3]) {
        rep.infinite = true;
        rep.value = kInf;
    }
    return rep;
}

MultiplierSpec builtin_multiplier(const std::string& kind, const std::vector<double>& params, const ProductSpace& space) {
    auto need = [&](std::size_t k) {
        if (params.size() != k)
            throw std::invalid_argument(kind + " expects " + std::to_string(k) + " parameter(s)");
    };
    MultiplierSpec m;
    m.name = kind;
    const double r1 = space.x1.rho(), r2 = space.x2.rho();
    if (kind == "imaginary_powers") {
        need(3);
        const double t = params[0], u = params[1], v = params[2];
        m.evaluator = [=](cplx a, cplx b) {
            return ipow(a * a + r1 * r1, t) * ipow(a * a + b * b + r1 * r1 + r2 * r2, u) * ipow(b * b + r2 * r2, v);
        };
        m.analytic_strip = {r1, r2};
        m.sector_holomorphic = true;
    } else if (kind == "gaussian") {
        need(1);
        const double eps = params[0];
        if (!(eps > 0.0)) throw std::invalid_argument("gaussian needs eps > 0");
        m.evaluator = [=](cplx a, cplx b) { return std::exp(-eps * (a * a + b * b)); };
        m.analytic_derivative = [=](cplx a, cplx b, int j1, int j2) {
            return gaussian_derivative(eps, a, j1) * gaussian_derivative(eps, b, j2);
        };
        m.analytic_strip = {kInf, kInf};
        m.derivative_order_available = {64, 64};
    } else if (kind == "constant") {
        need(1);
        const double c = params[0];
        m.evaluator = [=](cplx, cplx) { return cplx(c, 0.0); };
        m.analytic_derivative = [=](cplx, cplx, int j1, int j2) { return (j1 == 0 && j2 == 0) ? cplx(c, 0.0) : cplx{}; };
        m.analytic_strip = {kInf, kInf};
        m.derivative_order_available = {64, 64};
    } else if (kind == "euclid_marc") {
        need(2);
        const double u = params[0], v = params[1];
        m.evaluator = [=](cplx a, cplx b) { return ipow(a * a, u) * ipow(b * b, v); };
        m.analytic_strip = {0.0, 0.0};
        m.real_singularities = {0.0};
    } else {
        throw std::invalid_argument("unknown multiplier kind: " + kind);
    }
    return m;
}

SpectralFunction gaussian_1d(double epsilon) {
    return {[epsilon](cplx l) { return std::exp(-epsilon * l * l); }, true, kInf, "gaussian"};
}

SpectralFunction imaginary_power_1d(const RankOneSpace& space, double u) {
    const double r = space.rho();
    return {[r, u](cplx l) { return ipow(l * l + r * r, u); }, true, r, "imaginary_power", true};
}

SpectralFunction boundary_power_1d(const RankOneSpace& space, const Exponent& p, double u) {
    const double s = p.delta() * space.rho();
    return {[s, u](cplx l) { return ipow(l * l + s * s, u); }, true, s, "boundary_power", true};
}

SpectralFunction product_1d(SpectralFunction a, SpectralFunction b) {
    SpectralFunction f;
    f.name = a.name + "*" + b.name;
    f.weyl_symmetric = a.weyl_symmetric && b.weyl_symmetric;
    f.analytic_strip = std::min(a.analytic_strip, b.analytic_strip);
    f.sector_holomorphic = a.sector_holomorphic && b.sector_holomorphic;
    f.evaluator = [ea = std::move(a.evaluator), eb = std::move(b.evaluator)](cplx l) { return ea(l) * eb(l); };
    return f;
}

MultiplierSpec tensor_product(SpectralFunction a, SpectralFunction b) {
    MultiplierSpec m;
    m.name = a.name + "(x)" + b.name;
    m.weyl_symmetric = a.weyl_symmetric && b.weyl_symmetric;
    m.analytic_strip = {a.analytic_strip, b.analytic_strip};
    m.sector_holomorphic = a.sector_holomorphic && b.sector_holomorphic;
    m.evaluator = [ea = std::move(a.evaluator), eb = std::move(b.evaluator)](cplx z1, cplx z2) { return ea(z1) * eb(z2); };
    return m;
}

MultiplierSpec times(MultiplierSpec m, SpectralFunction a, SpectralFunction b) {
    m.name += "*" + a.name + "(x)" + b.name;
    m.weyl_symmetric = m.weyl_symmetric && a.weyl_symmetric && b.weyl_symmetric;
    m.analytic_strip = {std::min(m.analytic_strip[0], a.analytic_strip), std::min(m.analytic_strip[1], b.analytic_strip)};
    m.analytic_derivative = nullptr;
    m.sector_holomorphic = m.sector_holomorphic && a.sector_holomorphic && b.sector_holomorphic;
    m.evaluator = [em = std::move(m.evaluator), ea = std::move(a.evaluator), eb = std::move(b.evaluator)](cplx z1, cplx z2) {
        return em(z1, z2) * ea(z1) * eb(z2);
    };
    return m;
}

nlohmann::json IndependenceReport::to_json() const {
    nlohmann::json j;
    j["J"] = {J[0], J[1]};
    j["regime_a_slope"] = regime_a_slope;
    j["regime_b_marc_exponent"] = regime_b_marc_exponent;
    j["regime_b_joint_exponent"] = regime_b_joint_exponent;
    j["zero_order_ratio"] = zero_order_ratio;
    j["regime_a"] = regime_a;
    j["regime_b"] = regime_b;
    return j;
}

IndependenceReport independence_witness(const ProductSpace& space, const Exponent& p, std::array<int, 2> J) {
    const Tube tube(space, p);
    const double w1 = tube.half_width(0), w2 = tube.half_width(1);
    auto marc_weight = [&](cplx z1, cplx z2) {
        return std::pow(theta_p(space.x1, p, z1), J[0]) * std::pow(theta_p(space.x2, p, z2), J[1]);
    };
    auto joint_weight = [&](cplx z1, cplx z2) { return std::pow(dp_ionescu(space, p, z1, z2), J[0] + J[1]); };

    IndependenceReport rep;
    rep.J = J;
    std::vector<double> lg, lr;
    for (int k = 0; k <= 12; ++k) {
        const double gap = std::pow(10.0, -1.0 - 0.25 * k);
        if (gap >= std::min(w1, w2)) continue;
        const cplx z1(0.0, w1 - gap), z2(0.0, 0.0);
        const double a = marc_weight(z1, z2), b = joint_weight(z1, z2);
        rep.regime_a.push_back({gap, a, b});
        lg.push_back(std::log(gap));
        lr.push_back(std::log(a / b));
    }
    rep.regime_a_slope = linear_fit(lg, lr).slope;

    std::vector<double> bg, bm, bj;
    for (int k = 0; k <= 12; ++k) {
        const double gap = std::pow(10.0, -6.0 - 0.5 * k);
        const cplx z1(0.0, w1 - gap), z2(std::pow(gap, 0.25), w2 - std::sqrt(gap));
        const double a = marc_weight(z1, z2), b = joint_weight(z1, z2);
        rep.regime_b.push_back({gap, a, b});
        bg.push_back(std::log(gap));
        bm.push_back(std::log(a));
        bj.push_back(std::log(b));
    }
    rep.regime_b_marc_exponent = linear_fit(bg, bm).slope;
    rep.regime_b_joint_exponent = linear_fit(bg, bj).slope;

    const cplx z1(0.0, w1 - 1e-3), z2(0.0, 0.0);
    const double a0 = std::pow(theta_p(space.x1, p, z1), 0) * std::pow(theta_p(space.x2, p, z2), 0);
    const double b0 = std::pow(dp_ionescu(space, p, z1, z2), 0);
    rep.zero_order_ratio = a0 / b0;
    return rep;
}

}  // namespace sphmult
