#pragma once

// Truncated Taylor series in one variable. a[k] holds f^(k)(x0)/k!.
// Only what the radial profiles need: ring ops, exp, sqrt, pow, sinh, series.

#include <array>
#include <cmath>
#include <cstddef>

namespace naheat {

template <std::size_t N>
struct Jet {
  std::array<double, N> a{};

  static Jet constant(double c) {
    Jet j;
    j.a[0] = c;
    return j;
  }
  static Jet variable(double x0) {
    Jet j;
    j.a[0] = x0;
    if constexpr (N > 1) j.a[1] = 1.0;
    return j;
  }

  double value() const { return a[0]; }
  // k-th derivative at the expansion point
  double derivative(std::size_t k) const {
    double f = 1.0;
    for (std::size_t i = 2; i <= k; ++i) f *= static_cast<double>(i);
    return a[k] * f;
  }

  Jet& operator+=(const Jet& o) {
    for (std::size_t i = 0; i < N; ++i) a[i] += o.a[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (std::size_t i = 0; i < N; ++i) a[i] -= o.a[i];
    return *this;
  }
  Jet& operator*=(double s) {
    for (auto& v : a) v *= s;
    return *this;
  }
};

template <std::size_t N>
Jet<N> operator+(Jet<N> x, const Jet<N>& y) { return x += y; }
template <std::size_t N>
Jet<N> operator-(Jet<N> x, const Jet<N>& y) { return x -= y; }
template <std::size_t N>
Jet<N> operator*(Jet<N> x, double s) { return x *= s; }
template <std::size_t N>
Jet<N> operator*(double s, Jet<N> x) { return x *= s; }
template <std::size_t N>
Jet<N> operator+(Jet<N> x, double s) {
  x.a[0] += s;
  return x;
}

template <std::size_t N>
Jet<N> operator*(const Jet<N>& x, const Jet<N>& y) {
  Jet<N> r;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; i + j < N; ++j) r.a[i + j] += x.a[i] * y.a[j];
  return r;
}

template <std::size_t N>
Jet<N> operator/(const Jet<N>& x, const Jet<N>& y) {
  Jet<N> r;
  for (std::size_t k = 0; k < N; ++k) {
    double s = x.a[k];
    for (std::size_t j = 1; j <= k; ++j) s -= y.a[j] * r.a[k - j];
    r.a[k] = s / y.a[0];
  }
  return r;
}

// exp via f' = f x'
template <std::size_t N>
Jet<N> exp(const Jet<N>& x) {
  Jet<N> r;
  r.a[0] = std::exp(x.a[0]);
  for (std::size_t k = 1; k < N; ++k) {
    double s = 0.0;
    for (std::size_t j = 1; j <= k; ++j) s += static_cast<double>(j) * x.a[j] * r.a[k - j];
    r.a[k] = s / static_cast<double>(k);
  }
  return r;
}

// x^p via x f' = p f x', needs x(x0) != 0
template <std::size_t N>
Jet<N> pow(const Jet<N>& x, double p) {
  Jet<N> r;
  r.a[0] = std::pow(x.a[0], p);
  for (std::size_t k = 1; k < N; ++k) {
    double s = 0.0;
    for (std::size_t j = 1; j <= k; ++j)
      s += (p * static_cast<double>(j) - static_cast<double>(k - j)) * x.a[j] * r.a[k - j];
    r.a[k] = s / (static_cast<double>(k) * x.a[0]);
  }
  return r;
}

template <std::size_t N>
Jet<N> sqrt(const Jet<N>& x) { return pow(x, 0.5); }

template <std::size_t N>
Jet<N> sinh(const Jet<N>& x) {
  Jet<N> e = exp(x);
  Jet<N> m = exp(x * -1.0);
  return (e - m) * 0.5;
}

// Sum_n c[n] x^n by Horner, x a jet.
template <std::size_t N, class Coeffs>
Jet<N> power_series(const Coeffs& c, const Jet<N>& x) {
  Jet<N> r;
  for (std::size_t n = c.size(); n-- > 0;) {
    r = r * x;
    r.a[0] += c[n];
  }
  return r;
}

}  // namespace naheat
