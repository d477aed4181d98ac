#pragma once

#include <complex>
#include <vector>

#include "sphmult/space.hpp"

namespace sphmult {

using cplx = std::complex<double>;

enum class Status { ok, pole, resonance };
const char* to_string(Status s);

// Value with a distinguished outcome for poles and resonances.
struct Evaluated {
    cplx value{};
    Status status = Status::ok;
    bool ok() const noexcept { return status == Status::ok; }
};

// log Gamma(z) for complex z (principal branch away from the poles).
cplx lgamma_complex(cplx z);
// Gamma(z); returns a pole status at nonpositive integers.
Evaluated gamma_complex(cplx z);

// cJ_mu(z) = Gamma(mu+1) (2/z)^mu J_mu(z), normalized so cJ_mu(0) = 1.
cplx bessel_cJ(double mu, cplx z);
// Power-series and asymptotic branches, exposed for overlap checks.
cplx bessel_cJ_series(double mu, cplx z);
cplx bessel_cJ_asymptotic(double mu, cplx z);
inline constexpr double bessel_switch_radius = 20.0;

enum class CSource { closed_form, asymptotic_fit };
const char* to_string(CSource s);

struct CFunctionValue {
    cplx lambda{};
    cplx value{};
    CSource source = CSource::closed_form;
    Status status = Status::ok;
    double fit_residual = 0.0;
};

// Harish-Chandra c-function of the rank-one space (Gamma quotient).
CFunctionValue c_function(const RankOneSpace& space, cplx lambda);
// Reciprocal 1/c(lambda); entire where c has poles, zero there.
cplx c_inverse(const RankOneSpace& space, cplx lambda);
// c(lambda) extracted from large-t asymptotics of the spherical function
// (real lambda > 0); fit_residual is the rms misfit of the two-term model.
CFunctionValue hc_fit(const RankOneSpace& space, double lambda);
// |c(lambda)|^{-2} for real lambda.
double plancherel_density(const RankOneSpace& space, double lambda);
// Constant C with f(t) = C int_R Hf(l) phi_l(t) |c(l)|^{-2} dl for Hf(l) = int f phi_{-l} delta dt.
double inversion_constant(const RankOneSpace& space);

struct GammaCoefficients {
    cplx lambda{};
    std::vector<cplx> values;  // Gamma_0 .. Gamma_L
    Status status = Status::ok;
    int resonance_index = 0;   // first l with l = i*lambda, when resonant
};

GammaCoefficients gamma_ell(const RankOneSpace& space, cplx lambda, int L);
// omega_L(lambda, t) = sum_{l=1}^{L} Gamma_l e^{-2(l-1)t}.
Evaluated omega_partial(const RankOneSpace& space, cplx lambda, double t, int L);
Evaluated omega_partial(const GammaCoefficients& coeffs, double t);

}  // namespace sphmult
