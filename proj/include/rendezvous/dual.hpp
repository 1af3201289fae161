#pragma once

#include <Eigen/Dense>
#include <cmath>

// Forward-mode scalar types used to differentiate the vehicle dynamics and
// the constraint stack exactly. Dual<N> carries first derivatives against N
// seed directions, Dual2<N> additionally carries the (symmetric) Hessian.

namespace rendezvous {

template <int N>
struct Dual {
  using Grad = Eigen::Matrix<double, N, 1>;

  double v{0.0};
  Grad g{Grad::Zero()};

  Dual() = default;
  Dual(double value) : v(value) {}
  Dual(double value, const Grad& grad) : v(value), g(grad) {}

  static Dual seed(double value, int index) {
    Dual d(value);
    d.g[index] = 1.0;
    return d;
  }

  Dual operator-() const { return {-v, -g}; }

  Dual& operator+=(const Dual& o) {
    v += o.v;
    g += o.g;
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    g -= o.g;
    return *this;
  }

  friend Dual operator+(const Dual& a, const Dual& b) { return {a.v + b.v, a.g + b.g}; }
  friend Dual operator-(const Dual& a, const Dual& b) { return {a.v - b.v, a.g - b.g}; }
  friend Dual operator*(const Dual& a, const Dual& b) {
    return {a.v * b.v, a.v * b.g + b.v * a.g};
  }
  friend Dual operator/(const Dual& a, const Dual& b) {
    const double inv = 1.0 / b.v;
    const double q = a.v * inv;
    return {q, (a.g - q * b.g) * inv};
  }

  friend Dual operator+(double a, const Dual& b) { return {a + b.v, b.g}; }
  friend Dual operator+(const Dual& a, double b) { return {a.v + b, a.g}; }
  friend Dual operator-(double a, const Dual& b) { return {a - b.v, -b.g}; }
  friend Dual operator-(const Dual& a, double b) { return {a.v - b, a.g}; }
  friend Dual operator*(double a, const Dual& b) { return {a * b.v, a * b.g}; }
  friend Dual operator*(const Dual& a, double b) { return {a.v * b, a.g * b}; }
  friend Dual operator/(double a, const Dual& b) { return Dual(a) / b; }
  friend Dual operator/(const Dual& a, double b) { return {a.v / b, a.g / b}; }
};

template <int N>
Dual<N> chain(double f, double df, const Dual<N>& u) {
  return {f, df * u.g};
}

template <int N>
Dual<N> sin(const Dual<N>& u) { return chain(std::sin(u.v), std::cos(u.v), u); }
template <int N>
Dual<N> cos(const Dual<N>& u) { return chain(std::cos(u.v), -std::sin(u.v), u); }
template <int N>
Dual<N> sqrt(const Dual<N>& u) {
  const double s = std::sqrt(u.v);
  return chain(s, 0.5 / s, u);
}
template <int N>
Dual<N> asin(const Dual<N>& u) {
  return chain(std::asin(u.v), 1.0 / std::sqrt(1.0 - u.v * u.v), u);
}
template <int N>
Dual<N> log(const Dual<N>& u) { return chain(std::log(u.v), 1.0 / u.v, u); }

// Second-order dual: value, gradient and Hessian against N seed directions.
template <int N>
struct Dual2 {
  using Grad = Eigen::Matrix<double, N, 1>;
  using Hess = Eigen::Matrix<double, N, N>;

  double v{0.0};
  Grad g{Grad::Zero()};
  Hess h{Hess::Zero()};

  Dual2() = default;
  Dual2(double value) : v(value) {}

  static Dual2 seed(double value, int index) {
    Dual2 d(value);
    d.g[index] = 1.0;
    return d;
  }

  Dual2 operator-() const {
    Dual2 r;
    r.v = -v;
    r.g = -g;
    r.h = -h;
    return r;
  }

  friend Dual2 operator+(const Dual2& a, const Dual2& b) {
    Dual2 r;
    r.v = a.v + b.v;
    r.g = a.g + b.g;
    r.h = a.h + b.h;
    return r;
  }
  friend Dual2 operator-(const Dual2& a, const Dual2& b) {
    Dual2 r;
    r.v = a.v - b.v;
    r.g = a.g - b.g;
    r.h = a.h - b.h;
    return r;
  }
  friend Dual2 operator*(const Dual2& a, const Dual2& b) {
    Dual2 r;
    r.v = a.v * b.v;
    r.g = a.v * b.g + b.v * a.g;
    r.h = a.v * b.h + b.v * a.h + a.g * b.g.transpose() + b.g * a.g.transpose();
    return r;
  }
  friend Dual2 operator/(const Dual2& a, const Dual2& b) { return a * inverse(b); }

  friend Dual2 operator+(double a, const Dual2& b) {
    Dual2 r = b;
    r.v += a;
    return r;
  }
  friend Dual2 operator+(const Dual2& a, double b) { return b + a; }
  friend Dual2 operator-(double a, const Dual2& b) {
    Dual2 r = -b;
    r.v += a;
    return r;
  }
  friend Dual2 operator-(const Dual2& a, double b) {
    Dual2 r = a;
    r.v -= b;
    return r;
  }
  friend Dual2 operator*(double a, const Dual2& b) {
    Dual2 r;
    r.v = a * b.v;
    r.g = a * b.g;
    r.h = a * b.h;
    return r;
  }
  friend Dual2 operator*(const Dual2& a, double b) { return b * a; }
  friend Dual2 operator/(const Dual2& a, double b) { return (1.0 / b) * a; }
  friend Dual2 operator/(double a, const Dual2& b) { return a * inverse(b); }
};

// f(u) with f', f'' supplied by the caller.
template <int N>
Dual2<N> chain2(double f, double df, double d2f, const Dual2<N>& u) {
  Dual2<N> r;
  r.v = f;
  r.g = df * u.g;
  r.h = df * u.h + d2f * (u.g * u.g.transpose());
  return r;
}

template <int N>
Dual2<N> inverse(const Dual2<N>& u) {
  const double inv = 1.0 / u.v;
  return chain2(inv, -inv * inv, 2.0 * inv * inv * inv, u);
}
template <int N>
Dual2<N> sin(const Dual2<N>& u) {
  const double s = std::sin(u.v), c = std::cos(u.v);
  return chain2(s, c, -s, u);
}
template <int N>
Dual2<N> cos(const Dual2<N>& u) {
  const double s = std::sin(u.v), c = std::cos(u.v);
  return chain2(c, -s, -c, u);
}
template <int N>
Dual2<N> sqrt(const Dual2<N>& u) {
  const double s = std::sqrt(u.v);
  return chain2(s, 0.5 / s, -0.25 / (s * u.v), u);
}
template <int N>
Dual2<N> asin(const Dual2<N>& u) {
  const double w = 1.0 - u.v * u.v;
  const double rw = 1.0 / std::sqrt(w);
  return chain2(std::asin(u.v), rw, u.v * rw / w, u);
}
template <int N>
Dual2<N> log(const Dual2<N>& u) {
  const double inv = 1.0 / u.v;
  return chain2(std::log(u.v), inv, -inv * inv, u);
}

}  // namespace rendezvous
