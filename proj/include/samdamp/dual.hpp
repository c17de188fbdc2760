#pragma once

#include <array>
#include <cmath>

namespace samdamp {

/// Forward-mode dual number carrying N directional derivatives.
///
/// T may itself be a Dual, which gives second derivatives by nesting.
template <class T, int N>
struct Dual {
  T v{};
  std::array<T, N> d{};

  Dual() = default;
  Dual(double value) : v(value) {}  // NOLINT: implicit from constants
  Dual(T value, std::array<T, N> derivs) : v(value), d(derivs) {}

  static Dual variable(T value, int direction) {
    Dual x(value, {});
    x.d[direction] = T(1.0);
    return x;
  }

  Dual& operator+=(const Dual& o) {
    v += o.v;
    for (int i = 0; i < N; ++i) d[i] += o.d[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    for (int i = 0; i < N; ++i) d[i] -= o.d[i];
    return *this;
  }
};

template <class T, int N>
Dual<T, N> operator-(const Dual<T, N>& a) {
  Dual<T, N> r;
  r.v = -a.v;
  for (int i = 0; i < N; ++i) r.d[i] = -a.d[i];
  return r;
}

template <class T, int N>
Dual<T, N> operator+(Dual<T, N> a, const Dual<T, N>& b) {
  return a += b;
}

template <class T, int N>
Dual<T, N> operator-(Dual<T, N> a, const Dual<T, N>& b) {
  return a -= b;
}

template <class T, int N>
Dual<T, N> operator*(const Dual<T, N>& a, const Dual<T, N>& b) {
  Dual<T, N> r;
  r.v = a.v * b.v;
  for (int i = 0; i < N; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
  return r;
}

template <class T, int N>
Dual<T, N> operator*(const Dual<T, N>& a, double s) {
  Dual<T, N> r;
  r.v = a.v * s;
  for (int i = 0; i < N; ++i) r.d[i] = a.d[i] * s;
  return r;
}

template <class T, int N>
Dual<T, N> operator*(double s, const Dual<T, N>& a) {
  return a * s;
}

template <class T, int N>
Dual<T, N> operator+(Dual<T, N> a, double s) {
  a.v += s;
  return a;
}

template <class T, int N>
Dual<T, N> operator+(double s, Dual<T, N> a) {
  a.v += s;
  return a;
}

template <class T, int N>
Dual<T, N> operator-(Dual<T, N> a, double s) {
  a.v -= s;
  return a;
}

template <class T, int N>
Dual<T, N> operator-(double s, const Dual<T, N>& a) {
  return -a + s;
}

template <class T, int N>
Dual<T, N> sin(const Dual<T, N>& a) {
  using std::cos;
  using std::sin;
  const T c = cos(a.v);
  Dual<T, N> r;
  r.v = sin(a.v);
  for (int i = 0; i < N; ++i) r.d[i] = a.d[i] * c;
  return r;
}

template <class T, int N>
Dual<T, N> cos(const Dual<T, N>& a) {
  using std::cos;
  using std::sin;
  const T s = sin(a.v);
  Dual<T, N> r;
  r.v = cos(a.v);
  for (int i = 0; i < N; ++i) r.d[i] = -(a.d[i] * s);
  return r;
}

}  // namespace samdamp
