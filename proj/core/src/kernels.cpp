#include "sphmult/kernels.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <stdexcept>
#include <utility>

#include "sphmult/group.hpp"
#include "sphmult/parallel.hpp"
#include "sphmult/quadrature.hpp"
#include "sphmult/sphfn.hpp"

namespace sphmult {

namespace {

constexpr cplx I{0.0, 1.0};
constexpr double kStripSlack = 1e-12;
constexpr int kOmegaTerms = 30;

double glue(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }
double glue_derivative(double s) { return s > 0.0 ? std::exp(-1.0 / s) / (s * s) : 0.0; }

}  // namespace

double bump_bC(double x) {
    const double u = std::abs(x);
    if (u <= 1.0) return 1.0;
    if (u >= 2.0) return 0.0;
    const double a = glue(2.0 - u), b = glue(u - 1.0);
    return a / (a + b);
}

double bump_bC_derivative(double x) {
    const double u = std::abs(x);
    if (u <= 1.0 || u >= 2.0) return 0.0;
    const double a = glue(2.0 - u), b = glue(u - 1.0);
    const double da = -glue_derivative(2.0 - u), db = glue_derivative(u - 1.0);
    const double d = (da * b - a * db) / ((a + b) * (a + b));
    return x < 0.0 ? -d : d;
}

const char* to_string(PhiRoute r) {
    switch (r) {
        case PhiRoute::raw: return "raw";
        case PhiRoute::shifted_full: return "shifted_full";
        case PhiRoute::shifted_eps: return "shifted_eps";
    }
    return "?";
}

PhiRoute parse_route(const std::string& s) {
    for (PhiRoute r : {PhiRoute::raw, PhiRoute::shifted_full, PhiRoute::shifted_eps})
        if (s == to_string(r)) return r;
    throw std::invalid_argument("unknown contour route: " + s);
}

namespace {

constexpr std::pair<KernelPieceId, const char*> kPieceNames[] = {
    {KernelPieceId::kappa_A, "kappa_A"},
    {KernelPieceId::kappa_R, "kappa_R"},
    {KernelPieceId::kappa_1, "kappa_1"},
    {KernelPieceId::kappa_omega, "kappa_omega"},
    {KernelPieceId::phi_p, "phi_p"},
    {KernelPieceId::phi_p_dt, "phi_p_dt"},
    {KernelPieceId::tau_p1, "tau_p1"},
    {KernelPieceId::tau_p2, "tau_p2"},
    {KernelPieceId::tau_p3, "tau_p3"},
    {KernelPieceId::xi, "xi"},
    {KernelPieceId::xi_psi, "xi_psi"},
    {KernelPieceId::xi_one_minus_psi, "xi_one_minus_psi"},
    {KernelPieceId::AA, "AA"},
    {KernelPieceId::AR, "AR"},
    {KernelPieceId::RA, "RA"},
    {KernelPieceId::RR, "RR"},
    {KernelPieceId::k00, "k00"},
    {KernelPieceId::k10, "k10"},
    {KernelPieceId::k01, "k01"},
    {KernelPieceId::k11, "k11"},
    {KernelPieceId::oneA, "oneA"},
    {KernelPieceId::oneR, "oneR"},
    {KernelPieceId::omegaphi, "omegaphi"},
    {KernelPieceId::Aone, "Aone"},
    {KernelPieceId::Rone, "Rone"},
    {KernelPieceId::phiomega, "phiomega"},
    {KernelPieceId::oneone, "oneone"},
    {KernelPieceId::oneomega, "oneomega"},
    {KernelPieceId::omegaone, "omegaone"},
    {KernelPieceId::omegaomega, "omegaomega"},
    {KernelPieceId::phi_p_11, "phi_p_11"},
    {KernelPieceId::phi_p_11_d1, "phi_p_11_d1"},
    {KernelPieceId::phi_p_11_d2, "phi_p_11_d2"},
    {KernelPieceId::phi_p_11_d12, "phi_p_11_d12"},
    {KernelPieceId::phi_p_1A2, "phi_p_1A2"},
    {KernelPieceId::xi_00, "xi_00"},
    {KernelPieceId::xi_inf0, "xi_inf0"},
    {KernelPieceId::xi_0inf, "xi_0inf"},
    {KernelPieceId::xi_infinf, "xi_infinf"},
    {KernelPieceId::N1, "N1"},
    {KernelPieceId::J_average, "J_average"},
};

}  // namespace

const char* to_string(KernelPieceId id) {
    for (const auto& [k, name] : kPieceNames)
        if (k == id) return name;
    return "?";
}

KernelPieceId parse_piece(const std::string& s) {
    for (const auto& [k, name] : kPieceNames)
        if (s == name) return k;
    throw std::invalid_argument("unknown kernel piece: " + s);
}

bool is_rank_one(KernelPieceId id) {
    return static_cast<int>(id) <= static_cast<int>(KernelPieceId::xi_one_minus_psi);
}

const char* to_string(ParityCase c) {
    switch (c) {
        case ParityCase::even_even: return "even_even";
        case ParityCase::even_odd: return "even_odd";
        case ParityCase::odd_odd: return "odd_odd";
    }
    return "?";
}

namespace {

// ---------------------------------------------------------------------------
// Spectral profiles: each kernel piece is sum_k V(t, k) m_eps(lambda_k + i y(t)).

enum class Kind { A, R, local, full, one, omega, phip, phip_dt, xi };
enum class Weight { none, psi, one_minus_psi };

struct Factor {
    Kind kind;
    Weight weight = Weight::none;
};

bool needs_phi(Kind k) { return k == Kind::R || k == Kind::local || k == Kind::full; }
bool is_routed(Kind k) { return k == Kind::one || k == Kind::omega || k == Kind::phip || k == Kind::phip_dt; }
bool uses_delta(Kind k) { return k == Kind::phip || k == Kind::phip_dt || k == Kind::xi; }

double frequency_weight(Weight w, double l) {
    switch (w) {
        case Weight::none: return 1.0;
        case Weight::psi: return bump_bC(l);
        case Weight::one_minus_psi: return 1.0 - bump_bC(l);
    }
    return 1.0;
}

void require_p_le_2(const Exponent& p) {
    if (p.p() > 2.0) throw std::invalid_argument("kernel pieces with p > 2 are not supported; use the conjugate exponent");
}

double row_shift(Kind kind, const RankOneSpace& space, const Exponent& p, double t, const KernelOptions& opt) {
    const double rho = space.rho(), delta = p.delta();
    if (kind == Kind::xi) return delta * rho;
    if (!is_routed(kind)) return 0.0;
    switch (opt.route) {
        case PhiRoute::raw: return 0.0;
        case PhiRoute::shifted_full: return delta * rho;
        case PhiRoute::shifted_eps:
            if (bump_bC(t) == 1.0) return 0.0;
            return (delta - opt.contour_epsilon / std::abs(t)) * rho;
    }
    return 0.0;
}

struct Profile {
    std::vector<double> shift;  // Im zeta per row
    Eigen::MatrixXcd values;    // rows x nodes, quadrature and frequency weights included
};

Profile build_profile(const Factor& f, const RankOneSpace& space, const Exponent& p, std::span<const double> ts,
                      const QuadRule& nodes, double strip, const KernelOptions& opt) {
    if (uses_delta(f.kind) || (is_routed(f.kind) && opt.route != PhiRoute::raw)) require_p_le_2(p);
    const std::size_t rows = ts.size(), cols = nodes.size();
    Profile out;
    out.shift.resize(rows);
    out.values = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        if (!(ts[i] >= 0.0)) throw std::domain_error("kernel pieces are evaluated at t >= 0");
        out.shift[i] = row_shift(f.kind, space, p, ts[i], opt);
        if (std::abs(out.shift[i]) > strip + kStripSlack)
            throw std::domain_error("insufficient analytic strip for the shifted contour");
        if (needs_phi(f.kind) && ts[i] > oracle_t_max)
            throw std::domain_error("local pieces need t <= 30 (spherical function oracle range)");
    }

    std::vector<std::size_t> order(rows);
    std::vector<double> sorted(rows);
    if (needs_phi(f.kind)) {
        for (std::size_t i = 0; i < rows; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return ts[a] < ts[b]; });
        for (std::size_t i = 0; i < rows; ++i) sorted[i] = ts[order[i]];
    }

    const double rho = space.rho(), drho = p.delta() * space.rho();
    const double C = inversion_constant(space);
    parallel_for(cols, [&](std::size_t k) {
        const double l = nodes.x[k];
        const double wk = nodes.w[k] * frequency_weight(f.weight, l);
        if (wk == 0.0) return;
        const auto col = static_cast<Eigen::Index>(k);
        if (f.kind == Kind::A || needs_phi(f.kind)) {
            std::vector<cplx> phi(rows);
            if (needs_phi(f.kind)) {
                const auto table = phi_oracle_table(space, l, sorted);
                for (std::size_t i = 0; i < rows; ++i) phi[order[i]] = table[i];
            }
            const double pl = C * plancherel_density(space, l);
            for (std::size_t i = 0; i < rows; ++i) {
                const double t = ts[i], cut = bump_bC(t);
                cplx v;
                switch (f.kind) {
                    case Kind::A: v = cut == 0.0 ? cplx{} : cut * local_term(space, l, t); break;
                    case Kind::R: v = cut == 0.0 ? cplx{} : cut * (phi[i] - local_term(space, l, t)); break;
                    case Kind::local: v = cut * phi[i]; break;
                    default: v = phi[i]; break;
                }
                out.values(static_cast<Eigen::Index>(i), col) = wk * pl * v;
            }
            return;
        }
        for (std::size_t i = 0; i < rows; ++i) {
            const double t = ts[i], tail = 1.0 - bump_bC(t);
            if (tail == 0.0 && f.kind != Kind::xi) continue;
            const cplx z{l, out.shift[i]};
            const cplx ci = C * c_inverse(space, -z);
            cplx v;
            switch (f.kind) {
                case Kind::one: v = tail * std::exp((I * z - rho) * t); break;
                case Kind::omega: {
                    const GammaCoefficients g = gamma_ell(space, z, kOmegaTerms);
                    const Evaluated w = omega_partial(g, t);
                    if (!w.ok()) throw std::runtime_error("Harish-Chandra coefficients hit a resonance on the contour");
                    v = tail * std::exp((I * z - rho - 2.0) * t) * w.value;
                    break;
                }
                case Kind::phip: v = tail * std::exp((drho + I * z) * t); break;
                case Kind::phip_dt:
                    v = (tail * (drho + I * z) - bump_bC_derivative(t)) * std::exp((drho + I * z) * t);
                    break;
                default: v = std::exp((drho + I * z) * t); break;  // xi
            }
            out.values(static_cast<Eigen::Index>(i), col) = wk * ci * v;
        }
    });
    return out;
}

double cutoff_for(double epsilon, const KernelOptions& opt) {
    if (opt.lambda_max > 0.0) return opt.lambda_max;
    return spectral_cutoff(epsilon);
}

QuadRule spectral_nodes(double lambda_max, double t_max, double min_panel, int nodes_per_panel) {
    const double h = std::min(0.5, 6.0 / std::max(t_max, 1.0));
    auto br = graded_breaks(-lambda_max, lambda_max, h, {0.0}, min_panel);
    for (double s : {-2.0, -1.0, 1.0, 2.0})
        if (s > -lambda_max && s < lambda_max) br.push_back(s);
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }), br.end());
    return panel_rule(br, nodes_per_panel);
}

void check_decay(double epsilon, const KernelOptions& opt, cplx at_cutoff, cplx at_origin) {
    if (epsilon > 0.0 || opt.lambda_max > 0.0) return;
    if (std::abs(at_cutoff) > 1e-12 * std::max(1.0, std::abs(at_origin)))
        throw std::domain_error("multiplier has not decayed at the spectral cutoff; pass epsilon > 0 or lambda_max");
}

double max_of(std::span<const double> ts) {
    double m = 0.0;
    for (double t : ts) m = std::max(m, std::abs(t));
    return m;
}

std::map<double, std::vector<std::size_t>> rows_by_shift(const Profile& prof) {
    std::map<double, std::vector<std::size_t>> g;
    for (std::size_t i = 0; i < prof.shift.size(); ++i) g[prof.shift[i]].push_back(i);
    return g;
}

std::vector<cplx> rank_one_values(const Profile& prof, const QuadRule& nodes, const SpectralFunction& m,
                                  double epsilon) {
    std::vector<cplx> out(prof.shift.size());
    const std::size_t cols = nodes.size();
    for (const auto& [y, rows] : rows_by_shift(prof)) {
        std::vector<cplx> mv(cols);
        parallel_for(cols, [&](std::size_t k) {
            bool used = false;
            for (std::size_t i : rows) used = used || prof.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) != cplx{};
            if (!used) return;
            const cplx z{nodes.x[k], y};
            mv[k] = m(z) * std::exp(-epsilon * z * z);
        });
        for (std::size_t i : rows) {
            cplx s = 0.0;
            for (std::size_t k = 0; k < cols; ++k)
                s += prof.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) * mv[k];
            out[i] = s;
        }
    }
    return out;
}

struct ProductJob {
    const Profile* first;
    const Profile* second;
    Eigen::MatrixXcd out;  // rows1 x rows2
};

// Evaluates every job's V1 G V2^T, with G(k, l) = m_eps(zeta1_k, zeta2_l), one shift pair at a time.
void evaluate_products(std::vector<ProductJob>& jobs, const QuadRule& n1, const QuadRule& n2, const MultiplierSpec& m,
                       double epsilon) {
    std::set<std::pair<double, double>> pairs;
    for (auto& job : jobs) {
        job.out = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(job.first->shift.size()),
                                         static_cast<Eigen::Index>(job.second->shift.size()));
        for (double y1 : job.first->shift)
            for (double y2 : job.second->shift) pairs.insert({y1, y2});
    }
    auto rows_with = [](const Profile& p, double y) {
        std::vector<Eigen::Index> r;
        for (std::size_t i = 0; i < p.shift.size(); ++i)
            if (p.shift[i] == y && p.values.row(static_cast<Eigen::Index>(i)).squaredNorm() > 0.0)
                r.push_back(static_cast<Eigen::Index>(i));
        return r;
    };
    for (const auto& [y1, y2] : pairs) {
        struct Active {
            ProductJob* job;
            std::vector<Eigen::Index> r1, r2;
        };
        std::vector<Active> active;
        std::vector<char> used1(n1.size(), 0), used2(n2.size(), 0);
        for (auto& job : jobs) {
            Active a{&job, rows_with(*job.first, y1), rows_with(*job.second, y2)};
            if (a.r1.empty() || a.r2.empty()) continue;
            for (auto i : a.r1)
                for (Eigen::Index k = 0; k < job.first->values.cols(); ++k)
                    if (job.first->values(i, k) != cplx{}) used1[k] = 1;
            for (auto i : a.r2)
                for (Eigen::Index k = 0; k < job.second->values.cols(); ++k)
                    if (job.second->values(i, k) != cplx{}) used2[k] = 1;
            active.push_back(std::move(a));
        }
        if (active.empty()) continue;
        std::vector<Eigen::Index> k1, k2;
        for (std::size_t k = 0; k < n1.size(); ++k)
            if (used1[k]) k1.push_back(static_cast<Eigen::Index>(k));
        for (std::size_t k = 0; k < n2.size(); ++k)
            if (used2[k]) k2.push_back(static_cast<Eigen::Index>(k));

        std::vector<cplx> g1(k1.size()), g2(k2.size());
        for (std::size_t a = 0; a < k1.size(); ++a) {
            const cplx z{n1.x[k1[a]], y1};
            g1[a] = std::exp(-epsilon * z * z);
        }
        for (std::size_t b = 0; b < k2.size(); ++b) {
            const cplx z{n2.x[k2[b]], y2};
            g2[b] = std::exp(-epsilon * z * z);
        }

        std::vector<Eigen::MatrixXcd> left;  // V1 restricted to active rows and nodes
        for (const auto& a : active) {
            Eigen::MatrixXcd v(static_cast<Eigen::Index>(a.r1.size()), static_cast<Eigen::Index>(k1.size()));
            for (std::size_t i = 0; i < a.r1.size(); ++i)
                for (std::size_t c = 0; c < k1.size(); ++c) v(i, c) = a.job->first->values(a.r1[i], k1[c]);
            left.push_back(std::move(v));
        }

        const std::size_t block = 256;
        for (std::size_t b0 = 0; b0 < k2.size(); b0 += block) {
            const std::size_t bn = std::min(block, k2.size() - b0);
            Eigen::MatrixXcd G(static_cast<Eigen::Index>(k1.size()), static_cast<Eigen::Index>(bn));
            parallel_for(bn, [&](std::size_t c) {
                const cplx z2{n2.x[k2[b0 + c]], y2};
                for (std::size_t a = 0; a < k1.size(); ++a) {
                    const cplx z1{n1.x[k1[a]], y1};
                    G(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c)) = m(z1, z2) * g1[a] * g2[b0 + c];
                }
            });
            for (std::size_t j = 0; j < active.size(); ++j) {
                const auto& a = active[j];
                const Eigen::MatrixXcd W = left[j] * G;
                Eigen::MatrixXcd right(static_cast<Eigen::Index>(bn), static_cast<Eigen::Index>(a.r2.size()));
                for (std::size_t c = 0; c < bn; ++c)
                    for (std::size_t i = 0; i < a.r2.size(); ++i)
                        right(c, i) = a.job->second->values(a.r2[i], k2[b0 + c]);
                const Eigen::MatrixXcd contrib = W * right;
                for (std::size_t r = 0; r < a.r1.size(); ++r)
                    for (std::size_t s = 0; s < a.r2.size(); ++s) a.job->out(a.r1[r], a.r2[s]) += contrib(r, s);
            }
        }
    }
}

Factor rank_one_factor(KernelPieceId id) {
    switch (id) {
        case KernelPieceId::kappa_A: return {Kind::A};
        case KernelPieceId::kappa_R: return {Kind::R};
        case KernelPieceId::kappa_1: return {Kind::one};
        case KernelPieceId::kappa_omega: return {Kind::omega};
        case KernelPieceId::phi_p: return {Kind::phip};
        case KernelPieceId::phi_p_dt: return {Kind::phip_dt};
        case KernelPieceId::xi: return {Kind::xi};
        case KernelPieceId::xi_psi: return {Kind::xi, Weight::psi};
        case KernelPieceId::xi_one_minus_psi: return {Kind::xi, Weight::one_minus_psi};
        default: break;
    }
    throw std::invalid_argument(std::string("not a rank-one profile piece: ") + to_string(id));
}

std::pair<Factor, Factor> product_factors(KernelPieceId id) {
    using W = Weight;
    switch (id) {
        case KernelPieceId::AA: return {{Kind::A}, {Kind::A}};
        case KernelPieceId::AR: return {{Kind::A}, {Kind::R}};
        case KernelPieceId::RA: return {{Kind::R}, {Kind::A}};
        case KernelPieceId::RR: return {{Kind::R}, {Kind::R}};
        case KernelPieceId::k00: return {{Kind::A, W::psi}, {Kind::A, W::psi}};
        case KernelPieceId::k10: return {{Kind::A, W::one_minus_psi}, {Kind::A, W::psi}};
        case KernelPieceId::k01: return {{Kind::A, W::psi}, {Kind::A, W::one_minus_psi}};
        case KernelPieceId::k11: return {{Kind::A, W::one_minus_psi}, {Kind::A, W::one_minus_psi}};
        case KernelPieceId::oneA: return {{Kind::one}, {Kind::A}};
        case KernelPieceId::oneR: return {{Kind::one}, {Kind::R}};
        case KernelPieceId::omegaphi: return {{Kind::omega}, {Kind::local}};
        case KernelPieceId::Aone: return {{Kind::A}, {Kind::one}};
        case KernelPieceId::Rone: return {{Kind::R}, {Kind::one}};
        case KernelPieceId::phiomega: return {{Kind::local}, {Kind::omega}};
        case KernelPieceId::oneone: return {{Kind::one}, {Kind::one}};
        case KernelPieceId::oneomega: return {{Kind::one}, {Kind::omega}};
        case KernelPieceId::omegaone: return {{Kind::omega}, {Kind::one}};
        case KernelPieceId::omegaomega: return {{Kind::omega}, {Kind::omega}};
        case KernelPieceId::phi_p_11: return {{Kind::phip}, {Kind::phip}};
        case KernelPieceId::phi_p_11_d1: return {{Kind::phip_dt}, {Kind::phip}};
        case KernelPieceId::phi_p_11_d2: return {{Kind::phip}, {Kind::phip_dt}};
        case KernelPieceId::phi_p_11_d12: return {{Kind::phip_dt}, {Kind::phip_dt}};
        case KernelPieceId::phi_p_1A2: return {{Kind::phip}, {Kind::A}};
        case KernelPieceId::xi_00: return {{Kind::xi, W::psi}, {Kind::xi, W::psi}};
        case KernelPieceId::xi_inf0: return {{Kind::xi, W::one_minus_psi}, {Kind::xi, W::psi}};
        case KernelPieceId::xi_0inf: return {{Kind::xi, W::psi}, {Kind::xi, W::one_minus_psi}};
        case KernelPieceId::xi_infinf: return {{Kind::xi, W::one_minus_psi}, {Kind::xi, W::one_minus_psi}};
        default: break;
    }
    throw std::invalid_argument(std::string("not a product profile piece: ") + to_string(id));
}

void require_weyl(bool symmetric) {
    if (!symmetric) throw std::invalid_argument("kernel pieces need a Weyl-symmetric multiplier");
}

// Nodes and shared setup for the two variables of a product piece.
struct ProductNodes {
    QuadRule first, second;
};

ProductNodes product_nodes(const MultiplierSpec& m, std::span<const double> t1s, std::span<const double> t2s,
                           double epsilon, const KernelOptions& opt) {
    const double L = cutoff_for(epsilon, opt);
    check_decay(epsilon, opt, m(L, 0.0), m(0.0, 0.0));
    check_decay(epsilon, opt, m(0.0, L), m(0.0, 0.0));
    const double mp = std::max(opt.min_panel, 1e-6);
    return {spectral_nodes(L, max_of(t1s), mp, opt.nodes_per_panel),
            spectral_nodes(L, max_of(t2s), mp, opt.nodes_per_panel)};
}

SpectralFunction frozen_slice(const MultiplierSpec& m, double lambda2, double epsilon) {
    SpectralFunction s = m.slice_first(lambda2);
    const double g = std::exp(-epsilon * lambda2 * lambda2);
    s.evaluator = [ev = std::move(s.evaluator), g](cplx z) { return ev(z) * g; };
    return s;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<cplx> kernel_piece_table(KernelPieceId id, const RankOneSpace& space, const SpectralFunction& m,
                                     const Exponent& p, std::span<const double> ts, double epsilon,
                                     KernelOptions opt) {
    if (id == KernelPieceId::tau_p1 || id == KernelPieceId::tau_p2 || id == KernelPieceId::tau_p3)
        throw std::invalid_argument("tau pieces are evaluated at (x, t_b) points; use tau_decomposition");
    if (epsilon < 0.0) throw std::invalid_argument("epsilon must be >= 0");
    require_weyl(m.weyl_symmetric);
    if (ts.empty()) return {};
    opt.epsilon = epsilon;
    const double L = cutoff_for(epsilon, opt);
    check_decay(epsilon, opt, m(L), m(0.0));
    const QuadRule nodes = spectral_nodes(L, max_of(ts), opt.min_panel, opt.nodes_per_panel);
    const Profile prof = build_profile(rank_one_factor(id), space, p, ts, nodes, m.analytic_strip, opt);
    return rank_one_values(prof, nodes, m, epsilon);
}

cplx kernel_piece_eval(KernelPieceId id, const RankOneSpace& space, const SpectralFunction& m, const Exponent& p,
                       std::array<double, 2> point, double epsilon, KernelOptions opt) {
    if (id == KernelPieceId::tau_p1 || id == KernelPieceId::tau_p2 || id == KernelPieceId::tau_p3) {
        const double x[1] = {point[0]}, b[1] = {point[1]};
        const TauTables tau = tau_decomposition(space, m, p, x, b, epsilon, opt);
        if (id == KernelPieceId::tau_p1) return tau.tau1[0];
        if (id == KernelPieceId::tau_p2) return tau.tau2[0];
        return tau.tau3[0];
    }
    const double ts[1] = {point[0]};
    return kernel_piece_table(id, space, m, p, ts, epsilon, opt)[0];
}

cplx phi_p_eval(const RankOneSpace& space, const SpectralFunction& m, const Exponent& p, double t, PhiRoute route,
                const KernelOptions& opt) {
    const double ts[1] = {t};
    return phi_p_table(space, m, p, ts, route, opt)[0];
}

std::vector<cplx> phi_p_table(const RankOneSpace& space, const SpectralFunction& m, const Exponent& p,
                              std::span<const double> ts, PhiRoute route, const KernelOptions& opt) {
    KernelOptions o = opt;
    o.route = route;
    return kernel_piece_table(KernelPieceId::phi_p, space, m, p, ts, opt.epsilon, o);
}

std::vector<cplx> kernel_piece_grid(KernelPieceId id, const ProductSpace& space, const MultiplierSpec& m,
                                    const Exponent& p, std::span<const double> t1s, std::span<const double> t2s,
                                    double epsilon, KernelOptions opt) {
    if (is_rank_one(id)) throw std::invalid_argument(std::string("rank-one piece on a product space: ") + to_string(id));
    if (epsilon < 0.0) throw std::invalid_argument("epsilon must be >= 0");
    require_weyl(m.weyl_symmetric);
    opt.epsilon = epsilon;
    const std::size_t n1 = t1s.size(), n2 = t2s.size();
    std::vector<cplx> out(n1 * n2);
    if (out.empty()) return out;

    if (id == KernelPieceId::N1) {
        for (std::size_t j = 0; j < n2; ++j) {
            const auto col = phi_p_table(space.x1, frozen_slice(m, t2s[j], epsilon), p, t1s, opt.route, opt);
            for (std::size_t i = 0; i < n1; ++i) out[i * n2 + j] = col[i];
        }
        return out;
    }
    if (id == KernelPieceId::J_average) {
        const ParityCase parity = (space.x1.n() % 2 == 0 && space.x2.n() % 2 == 0)   ? ParityCase::even_even
                                  : (space.x1.n() % 2 == 1 && space.x2.n() % 2 == 1) ? ParityCase::odd_odd
                                                                                     : ParityCase::even_odd;
        for (std::size_t i = 0; i < n1; ++i)
            for (std::size_t j = 0; j < n2; ++j) out[i * n2 + j] = chebyshev_average(space, m, {t1s[i], t2s[j]}, parity);
        return out;
    }

    const auto [f1, f2] = product_factors(id);
    const ProductNodes nodes = product_nodes(m, t1s, t2s, epsilon, opt);
    const Profile p1 = build_profile(f1, space.x1, p, t1s, nodes.first, m.analytic_strip[0], opt);
    const Profile p2 = build_profile(f2, space.x2, p, t2s, nodes.second, m.analytic_strip[1], opt);
    std::vector<ProductJob> jobs{{&p1, &p2, {}}};
    evaluate_products(jobs, nodes.first, nodes.second, m, epsilon);
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n2; ++j)
            out[i * n2 + j] = jobs[0].out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return out;
}

cplx kernel_piece_eval(KernelPieceId id, const ProductSpace& space, const MultiplierSpec& m, const Exponent& p,
                       std::array<double, 2> point, double epsilon, KernelOptions opt) {
    const double a[1] = {point[0]}, b[1] = {point[1]};
    return kernel_piece_grid(id, space, m, p, a, b, epsilon, opt)[0];
}

RankOneSplit rank_one_split(const RankOneSpace& space, const SpectralFunction& m, std::span<const double> ts,
                            double epsilon, KernelOptions opt) {
    require_weyl(m.weyl_symmetric);
    RankOneSplit s;
    s.t.assign(ts.begin(), ts.end());
    if (ts.empty()) return s;
    opt.epsilon = epsilon;
    opt.route = PhiRoute::raw;
    const double L = cutoff_for(epsilon, opt);
    check_decay(epsilon, opt, m(L), m(0.0));
    const QuadRule nodes = spectral_nodes(L, max_of(ts), opt.min_panel, opt.nodes_per_panel);
    const Exponent p2(2.0);
    auto piece = [&](Kind k) {
        return rank_one_values(build_profile({k}, space, p2, ts, nodes, m.analytic_strip, opt), nodes, m, epsilon);
    };
    s.kappa_A = piece(Kind::A);
    s.kappa_R = piece(Kind::R);
    s.kappa_1 = piece(Kind::one);
    s.kappa_omega = piece(Kind::omega);
    InverseOptions io;
    io.lambda_max = L;
    s.inverse = inverse_spherical_transform(space, m, ts, epsilon, io);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double cut = bump_bC(ts[i]);
        s.local_residual = std::max(s.local_residual, std::abs(cut * s.inverse[i] - s.kappa_A[i] - s.kappa_R[i]));
        s.global_residual = std::max(
            s.global_residual, std::abs((1.0 - cut) * s.inverse[i] - 2.0 * s.kappa_1[i] - 2.0 * s.kappa_omega[i]));
    }
    return s;
}

ProductSplit product_split(const ProductSpace& space, const MultiplierSpec& m, std::span<const double> t1s,
                           std::span<const double> t2s, double epsilon, KernelOptions opt) {
    require_weyl(m.weyl_symmetric);
    ProductSplit s;
    s.t1.assign(t1s.begin(), t1s.end());
    s.t2.assign(t2s.begin(), t2s.end());
    const std::size_t n1 = t1s.size(), n2 = t2s.size();
    if (n1 == 0 || n2 == 0) return s;
    opt.epsilon = epsilon;
    opt.route = PhiRoute::raw;
    const ProductNodes nodes = product_nodes(m, t1s, t2s, epsilon, opt);
    const Exponent p2(2.0);
    std::map<Kind, Profile> first, second;
    for (Kind k : {Kind::A, Kind::R, Kind::local, Kind::full, Kind::one, Kind::omega}) {
        first.emplace(k, build_profile({k}, space.x1, p2, t1s, nodes.first, m.analytic_strip[0], opt));
        second.emplace(k, build_profile({k}, space.x2, p2, t2s, nodes.second, m.analytic_strip[1], opt));
    }
    struct Term {
        Kind a, b;
        int target;  // 0: kB0, 1: kB1, 2: kB2, 3: inverse
        double weight;
    };
    const std::vector<Term> terms{
        {Kind::A, Kind::A, 0, 1.0},       {Kind::A, Kind::R, 0, 1.0},         {Kind::R, Kind::A, 0, 1.0},
        {Kind::R, Kind::R, 0, 1.0},       {Kind::one, Kind::A, 1, 2.0},       {Kind::one, Kind::R, 1, 2.0},
        {Kind::omega, Kind::local, 1, 2.0}, {Kind::A, Kind::one, 1, 2.0},     {Kind::R, Kind::one, 1, 2.0},
        {Kind::local, Kind::omega, 1, 2.0}, {Kind::one, Kind::one, 2, 4.0},   {Kind::one, Kind::omega, 2, 4.0},
        {Kind::omega, Kind::one, 2, 4.0}, {Kind::omega, Kind::omega, 2, 4.0}, {Kind::full, Kind::full, 3, 1.0},
    };
    std::vector<ProductJob> jobs;
    for (const Term& t : terms) jobs.push_back({&first.at(t.a), &second.at(t.b), {}});
    evaluate_products(jobs, nodes.first, nodes.second, m, epsilon);

    std::array<std::vector<cplx>*, 4> targets{&s.kB0, &s.kB1, &s.kB2, &s.inverse};
    for (auto* v : targets) v->assign(n1 * n2, cplx{});
    for (std::size_t j = 0; j < terms.size(); ++j)
        for (std::size_t a = 0; a < n1; ++a)
            for (std::size_t b = 0; b < n2; ++b)
                (*targets[terms[j].target])[a * n2 + b] +=
                    terms[j].weight * jobs[j].out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    for (std::size_t i = 0; i < n1 * n2; ++i)
        s.residual = std::max(s.residual, std::abs(s.kB0[i] + s.kB1[i] + s.kB2[i] - s.inverse[i]));
    return s;
}

cplx n1_eval(const ProductSpace& space, const MultiplierSpec& m, const Exponent& p, double t1, double lambda2,
             double epsilon, KernelOptions opt) {
    return kernel_piece_eval(KernelPieceId::N1, space, m, p, {t1, lambda2}, epsilon, opt);
}

TauTables tau_decomposition(const RankOneSpace& space, const SpectralFunction& m, const Exponent& p,
                            std::span<const double> x_grid, std::span<const double> b_grid, double epsilon,
                            KernelOptions opt) {
    if (space != RankOneSpace::H2()) throw std::invalid_argument("tau decomposition is implemented on H2 only");
    require_p_le_2(p);
    TauTables out;
    out.x.assign(x_grid.begin(), x_grid.end());
    out.t_b.assign(b_grid.begin(), b_grid.end());
    const std::size_t nx = x_grid.size(), nb = b_grid.size();
    for (auto* v : {&out.tau1, &out.tau2, &out.tau3, &out.whole}) v->assign(nx * nb, cplx{});

    std::vector<double> rows;  // t+ for every (b, x) in A+, then every t_b in A+
    for (double tb : b_grid)
        if (tb > 0.0)
            for (double x : x_grid) rows.push_back(cartan_radius_nbar_a(x, tb));
    const std::size_t n_plus = rows.size();
    for (double tb : b_grid)
        if (tb > 0.0) rows.push_back(tb);
    if (rows.empty()) return out;

    const auto phi = kernel_piece_table(KernelPieceId::phi_p, space, m, p, rows, epsilon, opt);
    const auto kappa = kernel_piece_table(KernelPieceId::kappa_1, space, m, p, rows, epsilon, opt);

    const double rho = space.rho(), q = 2.0 / p.p();
    std::size_t plus = 0, base = n_plus;
    for (std::size_t ib = 0; ib < nb; ++ib) {
        const double tb = b_grid[ib];
        if (!(tb > 0.0)) continue;
        const cplx phi_b = phi[base++];
        for (std::size_t ix = 0; ix < nx; ++ix, ++plus) {
            const double x = x_grid[ix];
            const double P = std::exp(-rho * iwasawa_h(MatrixElement::nbar(x)));
            const double E = iwasawa_cartan_gap(x, tb);
            const double Pq = std::pow(P, q);
            const std::size_t k = ib * nx + ix;
            out.tau1[k] = Pq * std::expm1(-2.0 * rho * E / p.p()) * phi[plus];
            out.tau2[k] = Pq * (phi[plus] - phi_b);
            out.tau3[k] = Pq * phi_b;
            out.whole[k] = std::exp(2.0 * rho * tb / p.p()) * kappa[plus];
            out.residual =
                std::max(out.residual, std::abs(out.whole[k] - out.tau1[k] - out.tau2[k] - out.tau3[k]));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Chebyshev averages.

namespace {

int bessel_reduction(const RankOneSpace& s) { return s.n() % 2 == 0 ? s.n() / 2 - 1 : (s.n() - 1) / 2; }

double binomial(int n, int k) {
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
}

// g^{(r)}(l), r = 0..K, for g = (1 - Psi) |c|^{-2}; empty when |l| <= 1.
std::vector<double> spectral_weight_table(const RankOneSpace& space, double l, int K) {
    if (std::abs(l) <= 1.0) return {};
    const std::function<double(double)> g = [&space](double x) {
        return (1.0 - bump_bC(x)) * plancherel_density(space, x);
    };
    std::vector<double> d(K + 1);
    d[0] = g(l);
    for (int r = 1; r <= K; ++r) d[r] = richardson_derivative(g, l, r, 0.05);
    return d;
}

// Applies O* to a derivative table psi^{(0..K)}(l): returns (O* psi)^{(0..K-1)}.
std::vector<cplx> o_star(const std::vector<cplx>& psi, double l) {
    const int K = static_cast<int>(psi.size()) - 1;
    std::vector<double> inv(K + 1);  // (1/l)^{(r)}
    double fact = 1.0;
    for (int r = 0; r <= K; ++r) {
        if (r > 0) fact *= r;
        inv[r] = ((r % 2) ? -fact : fact) / std::pow(l, r + 1);
    }
    std::vector<cplx> q(K + 1);
    for (int r = 0; r <= K; ++r)
        for (int s = 0; s <= r; ++s) q[r] += binomial(r, s) * psi[s] * inv[r - s];
    std::vector<cplx> out(K);
    for (int k = 0; k < K; ++k) out[k] = -q[k + 1];
    return out;
}

cplx integrand_from_tables(const MultiplierSpec& m, std::array<double, 2> l, const std::vector<double>& g1,
                           const std::vector<double>& g2, std::array<int, 2> j, std::array<int, 2> d) {
    if (g1.empty() || g2.empty()) return 0.0;
    const int K1 = d[0] + j[0], K2 = d[1] + j[1];
    const auto mt = derivative_table(m, l[0], l[1], K1, K2);
    // M^{(a, b)} by Leibniz, stored as rows over the first variable.
    std::vector<std::vector<cplx>> M(K1 + 1, std::vector<cplx>(K2 + 1));
    for (int a = 0; a <= K1; ++a)
        for (int b = 0; b <= K2; ++b) {
            cplx s = 0.0;
            for (int a1 = 0; a1 <= a; ++a1)
                for (int b1 = 0; b1 <= b; ++b1)
                    s += binomial(a, a1) * binomial(b, b1) * g1[a1] * g2[b1] * mt[(a - a1) * (K2 + 1) + (b - b1)];
            M[a][b] = s;
        }
    for (int step = 0; step < j[1]; ++step)
        for (auto& row : M) row = o_star(row, l[1]);
    for (int step = 0; step < j[0]; ++step) {
        const std::size_t cols = M[0].size();
        std::vector<std::vector<cplx>> next(M.size() - 1, std::vector<cplx>(cols));
        for (std::size_t b = 0; b < cols; ++b) {
            std::vector<cplx> col(M.size());
            for (std::size_t a = 0; a < M.size(); ++a) col[a] = M[a][b];
            const auto t = o_star(col, l[0]);
            for (std::size_t a = 0; a < t.size(); ++a) next[a][b] = t[a];
        }
        M = std::move(next);
    }
    return M[d[0]][d[1]];
}

void check_depth(const MultiplierSpec& m, int K1, int K2) {
    if (m.derivative_order_available[0] < K1 || m.derivative_order_available[1] < K2)
        throw std::domain_error("multiplier derivative depth is below the orders needed by the Chebyshev average (" +
                                std::to_string(K1) + ", " + std::to_string(K2) + ")");
}

// Nodes s = sin(theta) on [0, pi/2] with weights sin(theta)^d dtheta, or the single point v.
struct AverageRule {
    std::vector<double> lambda, weight;
};

AverageRule average_rule(double v, bool averaged, int d) {
    AverageRule r;
    if (!averaged) {
        r.lambda.push_back(v);
        r.weight.push_back(1.0);
        return r;
    }
    const double av = std::abs(v);
    std::vector<double> br{0.0, std::numbers::pi / 2};
    for (double c : {1.0, 2.0})
        if (av > c) br.push_back(std::asin(c / av));
    std::sort(br.begin(), br.end());
    const double width = std::min(std::numbers::pi / 16, 2.0 / (av + 1.0));
    std::vector<double> fine{br[0]};
    for (std::size_t i = 1; i < br.size(); ++i) {
        const int n = std::max(1, static_cast<int>(std::ceil((br[i] - br[i - 1]) / width)));
        for (int k = 1; k <= n; ++k) fine.push_back(br[i - 1] + (br[i] - br[i - 1]) * k / n);
    }
    const QuadRule q = panel_rule(fine, 12);
    for (std::size_t i = 0; i < q.size(); ++i) {
        const double s = std::sin(q.x[i]);
        r.lambda.push_back(v * s);
        r.weight.push_back(q.w[i] * std::pow(s, d));
    }
    return r;
}

}  // namespace

cplx chebyshev_integrand(const ProductSpace& space, const MultiplierSpec& m, std::array<double, 2> lambda,
                         std::array<int, 2> o_star_count, std::array<int, 2> derivative) {
    const int K1 = derivative[0] + o_star_count[0], K2 = derivative[1] + o_star_count[1];
    check_depth(m, K1, K2);
    return integrand_from_tables(m, lambda, spectral_weight_table(space.x1, lambda[0], K1),
                                 spectral_weight_table(space.x2, lambda[1], K2), o_star_count, derivative);
}

cplx chebyshev_average(const ProductSpace& space, const MultiplierSpec& m, std::array<double, 2> v,
                       ParityCase parity, std::array<int, 2> v_derivative) {
    const bool even1 = space.x1.n() % 2 == 0, even2 = space.x2.n() % 2 == 0;
    const ParityCase actual = (even1 && even2)    ? ParityCase::even_even
                              : (!even1 && !even2) ? ParityCase::odd_odd
                                                   : ParityCase::even_odd;
    if (parity != actual)
        throw std::invalid_argument(std::string("parity case ") + to_string(parity) + " does not match " +
                                    space.name() + " (" + to_string(actual) + ")");
    if (v_derivative[0] < 0 || v_derivative[1] < 0) throw std::invalid_argument("derivative orders must be >= 0");
    const std::array<int, 2> j{bessel_reduction(space.x1), bessel_reduction(space.x2)};
    const int K1 = v_derivative[0] + j[0], K2 = v_derivative[1] + j[1];
    check_depth(m, K1, K2);

    const AverageRule r1 = average_rule(v[0], even1, v_derivative[0]);
    const AverageRule r2 = average_rule(v[1], even2, v_derivative[1]);
    std::vector<std::vector<double>> g1(r1.lambda.size()), g2(r2.lambda.size());
    parallel_for(g1.size(), [&](std::size_t i) { g1[i] = spectral_weight_table(space.x1, r1.lambda[i], K1); });
    parallel_for(g2.size(), [&](std::size_t i) { g2[i] = spectral_weight_table(space.x2, r2.lambda[i], K2); });

    std::vector<cplx> partial(r1.lambda.size());
    parallel_for(r1.lambda.size(), [&](std::size_t a) {
        if (g1[a].empty()) return;
        cplx s = 0.0;
        for (std::size_t b = 0; b < r2.lambda.size(); ++b)
            if (!g2[b].empty())
                s += r2.weight[b] * integrand_from_tables(m, {r1.lambda[a], r2.lambda[b]}, g1[a], g2[b], j, v_derivative);
        partial[a] = r1.weight[a] * s;
    });
    cplx total = 0.0;
    for (const cplx& s : partial) total += s;
    return total;
}

// ---------------------------------------------------------------------------
// Estimate battery.

std::vector<EstimateTarget> bound_targets(const Exponent& p) {
    std::vector<EstimateTarget> out;
    for (const char* space : {"H2", "H3"}) {
        const int n = parse_space(space).n();
        EstimateTarget t;
        t.name = std::string("kappa_R_local_") + space;
        t.piece = KernelPieceId::kappa_R;
        t.bound_family = "C Phi(a) / t^{n-1}";
        t.surrogate = "log-log slope of |kappa_R(t)|, m = (l^2 + rho^2)^{i}";
        t.space = space;
        t.window = {0.05, 0.5};
        t.expected_exponent = -(n - 1.0);
        t.tolerance = 0.15;
        out.push_back(t);
    }
    for (double ce : {0.01, 0.05, 0.1}) {
        EstimateTarget t;
        t.name = "phi_p_decay_eps" + std::to_string(ce).substr(0, 4);
        t.piece = KernelPieceId::phi_p;
        t.bound_family = "C (1 - Phi(a)) / t";
        t.surrogate = "log-log slope of |phi_p(t)|, m = (l^2 + delta^2 rho^2)^{i}";
        t.expected_exponent = 1.0;
        t.tolerance = 0.1;
        t.contour_epsilon = ce;
        out.push_back(t);
    }
    {
        EstimateTarget t;
        t.name = "phi_p_dt_decay";
        t.piece = KernelPieceId::phi_p_dt;
        t.bound_family = "C (1 - Phi(a)) / t^2";
        t.surrogate = "log-log slope of |d/dt phi_p(t)|, m = (l^2 + delta^2 rho^2)^{i}";
        t.expected_exponent = 2.0;
        t.tolerance = 0.1;
        out.push_back(t);
    }
    {
        EstimateTarget t;
        t.name = "kappa_omega_rate";
        t.piece = KernelPieceId::kappa_omega;
        t.bound_family = "C (1 - Phi(a)) e^{-((2/p - eps) rho + 2) t}";
        t.surrogate = "exponential rate of |kappa_omega(t)|, m = (l^2 + delta^2 rho^2)^{i}";
        t.exponential = true;
        t.contour_epsilon = 0.05;
        t.expected_exponent = (2.0 / p.p() - t.contour_epsilon) * parse_space(t.space).rho() + 2.0;
        t.tolerance = 0.05;
        out.push_back(t);
    }
    const std::pair<KernelPieceId, std::array<double, 2>> mixed[] = {
        {KernelPieceId::phi_p_11, {1.0, 1.0}},
        {KernelPieceId::phi_p_11_d1, {2.0, 1.0}},
        {KernelPieceId::phi_p_11_d2, {1.0, 2.0}},
        {KernelPieceId::phi_p_11_d12, {2.0, 2.0}},
    };
    for (const auto& [piece, claim] : mixed)
        for (int var = 0; var < 2; ++var) {
            EstimateTarget t;
            t.name = std::string(to_string(piece)) + "_t" + std::to_string(var + 1);
            t.piece = piece;
            t.bound_family = "C (1 - Phi1)(1 - Phi2) / (t1^{k1} t2^{k2})";
            t.surrogate = "2D log-log regression on a 5x5 grid, tensor boundary powers times a coupling factor";
            t.space = "H2xH2";
            t.variable = var;
            t.expected_exponent = claim[var];
            t.tolerance = 0.15;
            out.push_back(t);
        }
    for (double l2 : {0.0, 1.0, 5.0}) {
        EstimateTarget t;
        t.name = "N1_decay_l2_" + std::to_string(static_cast<int>(l2));
        t.piece = KernelPieceId::N1;
        t.bound_family = "C (1 - Phi1(a1)) / t1";
        t.surrogate = "log-log slope of |N1(t1, l2)| at fixed l2";
        t.space = "H2xH2";
        t.parameter = l2;
        t.expected_exponent = 1.0;
        t.tolerance = 0.15;
        out.push_back(t);
    }
    for (int a1 = 0; a1 <= 1; ++a1)
        for (int a2 = 0; a2 <= 1; ++a2)
            for (int var = 0; var < 2; ++var) {
                EstimateTarget t;
                t.name = "J_average_a" + std::to_string(a1) + std::to_string(a2) + "_v" + std::to_string(var + 1);
                t.piece = KernelPieceId::J_average;
                t.bound_family = "C / ((1 + |v1|)^{a1} (1 + |v2|)^{a2})";
                t.surrogate = "log-log slope of |d^{a+(1,1)} J(v)| in one variable, the other fixed at 3";
                t.space = "H2xH2";
                t.window = {2.0, 40.0};
                t.variable = var;
                t.parameter = 3.0;
                t.orders = {a1 + 1, a2 + 1};
                t.expected_exponent = var == 0 ? a1 : a2;
                t.tolerance = 0.15;
                out.push_back(t);
            }
    return out;
}

namespace {

std::vector<double> log_spaced(std::array<double, 2> w, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = w[0] * std::pow(w[1] / w[0], static_cast<double>(i) / (n - 1));
    return v;
}

MultiplierSpec coupled_boundary_model(const ProductSpace& space, const Exponent& p) {
    MultiplierSpec m = tensor_product(boundary_power_1d(space.x1, p, 1.0), boundary_power_1d(space.x2, p, 1.0));
    m.name = "boundary_powers*coupling";
    m.evaluator = [ev = std::move(m.evaluator)](cplx z1, cplx z2) {
        return ev(z1, z2) * (1.0 + 0.5 / (2.0 + z1 * z1 + z2 * z2));
    };
    return m;
}

void fill_verdict(EstimateReport& r, double decay, const LinearFit& fit, bool relative) {
    r.fitted = decay;
    r.fitted_constant = std::exp(fit.intercept);
    r.residual = fit.rms_residual;
    const double floor = relative ? r.claimed * (1.0 - r.tolerance) : r.claimed - r.tolerance;
    r.verdict = (decay >= floor && fit.rms_residual < 1.0) ? Verdict::pass : Verdict::fail;
}

// Fits log|f| against log x (or x for exponential targets); returns the decay = -slope.
void fit_samples(EstimateReport& r, std::span<const double> xs, std::span<const cplx> values, bool exponential) {
    std::vector<double> X, Y;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double a = std::abs(values[i]);
        r.samples.emplace_back(xs[i], a);
        if (a > 0.0 && std::isfinite(a)) {
            X.push_back(exponential ? xs[i] : std::log(xs[i]));
            Y.push_back(std::log(a));
        }
    }
    if (X.empty()) throw std::domain_error("piece vanishes identically on the fit window: " + r.name);
    if (X.size() < xs.size() || X.size() < 3) {
        r.verdict = Verdict::inconclusive;
        return;
    }
    const LinearFit fit = linear_fit(X, Y);
    fill_verdict(r, -fit.slope, fit, exponential);
}

}  // namespace

EstimateReport estimate_verify(const EstimateTarget& target, const Exponent& p) {
    EstimateReport r;
    r.name = target.name;
    r.bound = target.bound_family;
    r.surrogate = target.surrogate;
    r.claimed = target.expected_exponent;
    r.tolerance = target.tolerance;
    constexpr double regulariser = 0.1;

    KernelOptions opt;
    opt.contour_epsilon = target.contour_epsilon;
    switch (target.piece) {
        case KernelPieceId::kappa_R:
        case KernelPieceId::phi_p:
        case KernelPieceId::phi_p_dt:
        case KernelPieceId::kappa_omega: {
            const RankOneSpace space = parse_space(target.space);
            const bool local = target.piece == KernelPieceId::kappa_R;
            const SpectralFunction m = local ? imaginary_power_1d(space, 1.0) : boundary_power_1d(space, p, 1.0);
            opt.route = local ? PhiRoute::raw : PhiRoute::shifted_eps;
            std::vector<double> ts;
            if (target.exponential) {
                for (int i = 0; i < 12; ++i) ts.push_back(target.window[0] + (target.window[1] - target.window[0]) * i / 11.0);
            } else {
                ts = log_spaced(target.window, 12);
            }
            const auto v = kernel_piece_table(target.piece, space, m, p, ts, local ? 1e-3 : regulariser, opt);
            fit_samples(r, ts, v, target.exponential);
            return r;
        }
        case KernelPieceId::phi_p_11:
        case KernelPieceId::phi_p_11_d1:
        case KernelPieceId::phi_p_11_d2:
        case KernelPieceId::phi_p_11_d12: {
            const ProductSpace space = parse_product_space(target.space);
            const MultiplierSpec m = coupled_boundary_model(space, p);
            opt.route = PhiRoute::shifted_full;
            const auto ts = log_spaced(target.window, 5);
            const auto v = kernel_piece_grid(target.piece, space, m, p, ts, ts, regulariser, opt);
            Eigen::MatrixXd A(25, 3);
            Eigen::VectorXd y(25);
            for (int i = 0; i < 5; ++i)
                for (int j = 0; j < 5; ++j) {
                    const double a = std::abs(v[i * 5 + j]);
                    r.samples.emplace_back(target.variable == 0 ? ts[i] : ts[j], a);
                    if (!(a > 0.0)) throw std::domain_error("piece vanishes on the fit grid: " + r.name);
                    A.row(i * 5 + j) << 1.0, std::log(ts[i]), std::log(ts[j]);
                    y(i * 5 + j) = std::log(a);
                }
            const Eigen::VectorXd c = A.colPivHouseholderQr().solve(y);
            LinearFit fit;
            fit.slope = c(1 + target.variable);
            fit.intercept = c(0);
            fit.rms_residual = std::sqrt((A * c - y).squaredNorm() / 25.0);
            fill_verdict(r, -fit.slope, fit, false);
            return r;
        }
        case KernelPieceId::N1: {
            const ProductSpace space = parse_product_space(target.space);
            const MultiplierSpec m = coupled_boundary_model(space, p);
            opt.route = PhiRoute::shifted_eps;
            opt.epsilon = regulariser;
            const auto ts = log_spaced(target.window, 12);
            const auto v = phi_p_table(space.x1, frozen_slice(m, target.parameter, regulariser), p, ts, opt.route, opt);
            fit_samples(r, ts, v, false);
            return r;
        }
        case KernelPieceId::J_average: {
            const ProductSpace space = parse_product_space(target.space);
            const MultiplierSpec m = builtin_multiplier("gaussian", {regulariser}, space);
            const ParityCase parity = ParityCase::even_even;
            const auto vs = log_spaced(target.window, 8);
            std::vector<cplx> values(vs.size());
            std::vector<double> xs(vs.size());
            for (std::size_t i = 0; i < vs.size(); ++i) {
                std::array<double, 2> v{target.parameter, target.parameter};
                v[target.variable] = vs[i];
                values[i] = chebyshev_average(space, m, v, parity, target.orders);
                xs[i] = 1.0 + vs[i];
            }
            fit_samples(r, xs, values, false);
            return r;
        }
        default: break;
    }
    throw std::invalid_argument(std::string("no estimate model for piece ") + to_string(target.piece));
}

std::vector<EstimateReport> estimate_battery(const Exponent& p) {
    const auto targets = bound_targets(p);
    std::vector<EstimateReport> out(targets.size());
    parallel_for(targets.size(), [&](std::size_t i) { out[i] = estimate_verify(targets[i], p); });
    return out;
}

}  // namespace sphmult
