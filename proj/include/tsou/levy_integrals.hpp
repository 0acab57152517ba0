#pragma once

#include <complex>
#include <functional>

#include "tsou/model.hpp"

namespace tsou {

using cplx = std::complex<double>;

// int_0^inf psi_alpha(s, u) u^{-1-alpha} du, with
// psi_alpha(s, u) = e^{isu} - 1 - isu h_alpha(u) and h_alpha = 0, 1[u<=1], 1 for alpha <, =, > 1.
cplx stable_levy_integral(double alpha, double s);
// Same integral against e^{-r u} (r > 0); alpha != 1.
cplx laplace_levy_integral(double alpha, double r, double s);

// int_0^hi psi_alpha(s,u) g(u) u^{-1-alpha} du by quadrature. `majorant(U)`
// bounds g on [U, inf) and is used to stop on an infinite range.
cplx levy_integral_quadrature(const std::function<double(double)>& g, double alpha, double s, double hi,
                              const std::function<double(double)>& majorant);

enum class LevyRoute { Auto, Quadrature };

// Per-atom integral against q (kappa = 0) or against q(u) - q(u kappa) (kappa > 1).
// Auto uses closed forms or the mixture route where available.
cplx levy_integral(const TsLaw& law, std::size_t atom, double s, double kappa = 0, LevyRoute route = LevyRoute::Auto);

// log of the CF of a TS law: i<b,z> + sum_xi w int psi_alpha q u^{-1-alpha} du
cplx ts_log_cf(const TsLaw& law, std::span<const double> z, LevyRoute route = LevyRoute::Auto);

}  // namespace tsou
