#include "dispersar/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dispersar/errors.hpp"

namespace dispersar::specfun {

namespace {

void check_argument(int n, double x, const char* who) {
  if (n < 0) {
    throw DomainError(std::string(who) + ": negative order " + std::to_string(n));
  }
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError(std::string(who) + ": argument must be positive and finite, got " +
                      std::to_string(x));
  }
}

// r[k] = j_k(x) / j_{k-1}(x) for k = 1..kmax, by the backward recurrence
// r_k = x / (2k + 1 - x r_{k+1}) started well above max(kmax, x).
std::vector<double> bessel_ratios(int kmax, double x) {
  const int turning = static_cast<int>(std::ceil(x));
  const int start = std::max(kmax, turning) + 40 + turning / 2;
  std::vector<double> r(static_cast<std::size_t>(kmax) + 1, 0.0);
  double next = 0.0;
  for (int k = start; k >= 1; --k) {
    double denom = static_cast<double>(2 * k + 1) - x * next;
    if (denom == 0.0) {
      denom = 1e-300;
    }
    next = x / denom;
    if (k <= kmax) {
      r[static_cast<std::size_t>(k)] = next;
    }
  }
  return r;
}

}  // namespace

std::vector<double> spherical_bessel_j_all(int nmax, double x) {
  check_argument(nmax, x, "spherical_bessel_j");
  const int kmax = std::max(nmax, 1);
  const auto r = bessel_ratios(kmax, x);

  std::vector<double> j(static_cast<std::size_t>(kmax) + 1);
  const double s = std::sin(x);
  const double c = std::cos(x);
  const double j0 = s / x;
  const double j1 = s / (x * x) - c / x;

  j[0] = j0;
  if (std::abs(j0) >= std::abs(j1)) {
    for (int k = 1; k <= kmax; ++k) {
      j[k] = r[k] * j[k - 1];
    }
  } else {
    // j_0 is near one of its zeros; anchor the recurrence on j_1 instead.
    j[1] = j1;
    for (int k = 2; k <= kmax; ++k) {
      j[k] = r[k] * j[k - 1];
    }
  }
  j.resize(static_cast<std::size_t>(nmax) + 1);
  return j;
}

std::vector<double> spherical_bessel_y_all(int nmax, double x) {
  check_argument(nmax, x, "spherical_bessel_y");
  std::vector<double> y(static_cast<std::size_t>(std::max(nmax, 1)) + 1);
  const double s = std::sin(x);
  const double c = std::cos(x);
  y[0] = -c / x;
  y[1] = -c / (x * x) - s / x;
  for (int k = 1; k < nmax; ++k) {
    y[k + 1] = static_cast<double>(2 * k + 1) / x * y[k] - y[k - 1];
  }
  y.resize(static_cast<std::size_t>(nmax) + 1);
  return y;
}

std::vector<complex> spherical_hankel_h1_all(int nmax, double x) {
  const auto j = spherical_bessel_j_all(nmax, x);
  const auto y = spherical_bessel_y_all(nmax, x);
  std::vector<complex> h(j.size());
  for (std::size_t k = 0; k < j.size(); ++k) {
    h[k] = {j[k], y[k]};
  }
  return h;
}

double spherical_bessel_j(int n, double x) { return spherical_bessel_j_all(n, x).back(); }

double spherical_bessel_y(int n, double x) { return spherical_bessel_y_all(n, x).back(); }

complex spherical_hankel_h1(int n, double x) { return spherical_hankel_h1_all(n, x).back(); }

template <typename T>
T sph_derivative(T f_prev, T f_n, int n, double x) {
  check_argument(n, x, "sph_derivative");
  return f_prev - (static_cast<double>(n + 1) / x) * f_n;
}

template double sph_derivative<double>(double, double, int, double);
template complex sph_derivative<complex>(complex, complex, int, double);

double spherical_bessel_j_derivative(int n, double x) {
  const auto j = spherical_bessel_j_all(n + 1, x);
  if (n == 0) {
    return -j[1];
  }
  return sph_derivative(j[n - 1], j[n], n, x);
}

complex spherical_hankel_h1_derivative(int n, double x) {
  const auto h = spherical_hankel_h1_all(n + 1, x);
  if (n == 0) {
    return -h[1];
  }
  return sph_derivative(h[n - 1], h[n], n, x);
}

double legendre_p(int n, double t) {
  if (n < 0) {
    throw DomainError("legendre_p: negative order " + std::to_string(n));
  }
  if (!(std::abs(t) <= 1.0)) {
    throw DomainError("legendre_p: argument outside [-1, 1]: " + std::to_string(t));
  }
  if (n == 0) {
    return 1.0;
  }
  double prev = 1.0;
  double cur = t;
  for (int k = 1; k < n; ++k) {
    const double next = (static_cast<double>(2 * k + 1) * t * cur - k * prev) / (k + 1);
    prev = cur;
    cur = next;
  }
  return cur;
}

}  // namespace dispersar::specfun
