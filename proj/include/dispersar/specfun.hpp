#pragma once

// Spherical Bessel and Hankel functions of real positive argument and
// Legendre polynomials.
//
// j_n is evaluated with Miller's downward recurrence carried out on the
// ratios j_k / j_{k-1}, normalized against whichever of j_0, j_1 is larger.
// y_n (and therefore h_n^(1) = j_n + i y_n) uses the upward recurrence,
// which is stable for the Neumann functions.

#include <complex>
#include <vector>

namespace dispersar::specfun {

using complex = std::complex<double>;

double spherical_bessel_j(int n, double x);
double spherical_bessel_y(int n, double x);
complex spherical_hankel_h1(int n, double x);

/// j_0(x) ... j_nmax(x).
std::vector<double> spherical_bessel_j_all(int nmax, double x);
/// y_0(x) ... y_nmax(x).
std::vector<double> spherical_bessel_y_all(int nmax, double x);
/// h_0^(1)(x) ... h_nmax^(1)(x).
std::vector<complex> spherical_hankel_h1_all(int nmax, double x);

/// f_n'(x) = f_{n-1}(x) - (n+1)/x * f_n(x), valid for any solution f of the
/// spherical Bessel equation (j, y, h1). For n = 0 pass f_{-1}, e.g.
/// j_{-1}(x) = cos(x)/x.
template <typename T>
T sph_derivative(T f_prev, T f_n, int n, double x);

double spherical_bessel_j_derivative(int n, double x);
complex spherical_hankel_h1_derivative(int n, double x);

/// P_n(t) by the three-term recurrence, |t| <= 1.
double legendre_p(int n, double t);

}  // namespace dispersar::specfun
