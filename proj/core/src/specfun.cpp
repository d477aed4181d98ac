#include "sphmult/specfun.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sphmult {

namespace {

constexpr double pi = std::numbers::pi;

constexpr std::array<double, 9> lanczos_coeff{
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

cplx lgamma_right(cplx z) {
    z -= 1.0;
    cplx x = lanczos_coeff[0];
    for (int i = 1; i < 9; ++i) x += lanczos_coeff[i] / (z + double(i));
    const cplx t = z + 7.5;
    return 0.5 * std::log(2.0 * pi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

// log sin(pi z), stable for large |Im z|.
cplx log_sin_pi(cplx z) {
    const cplx i{0.0, 1.0};
    if (z.imag() > 1.0) return -i * pi * z - std::log(-2.0 * i) + std::log(1.0 - std::exp(2.0 * i * pi * z));
    if (z.imag() < -1.0) return i * pi * z - std::log(2.0 * i) + std::log(1.0 - std::exp(-2.0 * i * pi * z));
    return std::log(std::sin(pi * z));
}

bool is_nonpositive_integer(cplx z, double tol = 1e-14) {
    if (std::abs(z.imag()) > tol) return false;
    const double r = std::round(z.real());
    return r <= 0.0 && std::abs(z.real() - r) <= tol * std::max(1.0, std::abs(r));
}

}  // namespace

const char* to_string(Status s) {
    switch (s) {
        case Status::ok: return "ok";
        case Status::pole: return "pole";
        case Status::resonance: return "resonance";
    }
    return "?";
}

const char* to_string(CSource s) { return s == CSource::closed_form ? "closed_form" : "asymptotic_fit"; }

cplx lgamma_complex(cplx z) {
    if (z.real() >= 0.5) return lgamma_right(z);
    return std::log(pi) - log_sin_pi(z) - lgamma_right(1.0 - z);
}

Evaluated gamma_complex(cplx z) {
    if (is_nonpositive_integer(z)) return {cplx{}, Status::pole};
    return {std::exp(lgamma_complex(z)), Status::ok};
}

cplx bessel_cJ_series(double mu, cplx z) {
    using lc = std::complex<long double>;
    const lc q = -lc(z) * lc(z) / 4.0L;
    lc term = 1.0L, sum = 1.0L;
    const long double m = mu;
    for (int k = 1; k < 500; ++k) {
        term *= q / ((long double)k * (m + k));
        sum += term;
        if (k > std::abs(z) && std::abs(term) < 1e-21L * std::abs(sum)) break;
    }
    return cplx(static_cast<double>(sum.real()), static_cast<double>(sum.imag()));
}

cplx bessel_cJ_asymptotic(double mu, cplx z) {
    if (z.real() < 0.0) z = -z;  // cJ is even
    const double m4 = 4.0 * mu * mu;
    cplx p = 1.0, q = 0.0;
    cplx a = 1.0;  // a_k / z^k
    double last = 1.0;
    for (int k = 1; k < 200; ++k) {
        a *= (m4 - (2.0 * k - 1) * (2.0 * k - 1)) / (k * 8.0 * z);
        const double mag = std::abs(a);
        if (mag > last && k > 2) break;
        last = mag;
        const double sign = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
        if (k % 2 == 0) p += sign * a;
        else q += sign * a;
        if (mag < 1e-18) break;
    }
    const cplx chi = z - (0.5 * mu + 0.25) * pi;
    const cplx j = std::sqrt(2.0 / (pi * z)) * (p * std::cos(chi) - q * std::sin(chi));
    return std::tgamma(mu + 1.0) * std::pow(2.0 / z, mu) * j;
}

cplx bessel_cJ(double mu, cplx z) {
    if (mu < -0.5) throw std::domain_error("bessel_cJ requires mu >= -1/2");
    if (std::abs(z) <= bessel_switch_radius) return bessel_cJ_series(mu, z);
    return bessel_cJ_asymptotic(mu, z);
}

CFunctionValue c_function(const RankOneSpace& space, cplx lambda) {
    const cplx i{0.0, 1.0};
    const cplx il = i * lambda;
    CFunctionValue out;
    out.lambda = lambda;
    if (is_nonpositive_integer(il)) {
        out.status = Status::pole;
        return out;
    }
    const double rho = space.rho();
    const cplx a1 = 0.5 * (il + rho);
    const cplx a2 = 0.5 * (il + 0.5 * space.m_alpha() + 1.0);
    if (is_nonpositive_integer(a1) || is_nonpositive_integer(a2)) {
        out.value = 0.0;
        return out;
    }
    const cplx logc = (rho - il) * std::log(2.0) + std::lgamma(0.5 * space.n()) + lgamma_complex(il) -
                      lgamma_complex(a1) - lgamma_complex(a2);
    out.value = std::exp(logc);
    return out;
}

cplx c_inverse(const RankOneSpace& space, cplx lambda) {
    const cplx i{0.0, 1.0};
    const cplx il = i * lambda;
    if (is_nonpositive_integer(il)) return 0.0;
    const double rho = space.rho();
    const cplx a1 = 0.5 * (il + rho);
    const cplx a2 = 0.5 * (il + 0.5 * space.m_alpha() + 1.0);
    const cplx logci = -(rho - il) * std::log(2.0) - std::lgamma(0.5 * space.n()) - lgamma_complex(il) +
                       lgamma_complex(a1) + lgamma_complex(a2);
    return std::exp(logci);
}

double plancherel_density(const RankOneSpace& space, double lambda) {
    if (lambda == 0.0) return 0.0;
    return std::norm(c_inverse(space, lambda));
}

double inversion_constant(const RankOneSpace& space) { return std::exp2(2.0 * space.rho()) / (4.0 * pi); }

GammaCoefficients gamma_ell(const RankOneSpace& space, cplx lambda, int L) {
    if (L < 0) throw std::invalid_argument("L must be >= 0");
    const cplx i{0.0, 1.0};
    const cplx il = i * lambda;
    const double rho = space.rho();
    GammaCoefficients g;
    g.lambda = lambda;
    g.values.assign(L + 1, cplx{});
    g.values[0] = 1.0;
    for (int l = 1; l <= L; ++l) {
        const cplx denom = 4.0 * l * (double(l) - il);
        if (std::abs(denom) < 1e-13 * l) {
            g.status = Status::resonance;
            g.resonance_index = l;
            g.values.resize(l);
            return g;
        }
        cplx s = 0.0;
        for (int j = 1; j <= l; ++j) {
            const double d = 2.0 * space.m_alpha() + ((j % 2 == 0) ? 4.0 * space.m_2alpha() : 0.0);
            s += d * (il - rho - 2.0 * (l - j)) * g.values[l - j];
        }
        g.values[l] = -s / denom;
    }
    return g;
}

Evaluated omega_partial(const GammaCoefficients& coeffs, double t) {
    if (coeffs.status != Status::ok) return {cplx{}, coeffs.status};
    cplx sum = 0.0;
    const double q = std::exp(-2.0 * t);
    double w = 1.0;
    for (std::size_t l = 1; l < coeffs.values.size(); ++l) {
        sum += coeffs.values[l] * w;
        w *= q;
    }
    return {sum, Status::ok};
}

Evaluated omega_partial(const RankOneSpace& space, cplx lambda, double t, int L) {
    if (t < 0.5) throw std::domain_error("omega_partial requires t >= 1/2");
    return omega_partial(gamma_ell(space, lambda, L), t);
}

}  // namespace sphmult
