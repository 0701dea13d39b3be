#pragma once

#include <cmath>

namespace hdg {

/// Forward-mode scalar carrying first and second derivatives with respect to
/// two independent variables. Used to turn closed-form manufactured fields
/// into the gradients/Hessians the forcing terms need.
struct Dual2 {
  double v = 0, dx = 0, dy = 0, dxx = 0, dxy = 0, dyy = 0;

  Dual2() = default;
  Dual2(double c) : v(c) {}
  static Dual2 var_x(double x) { Dual2 d(x); d.dx = 1; return d; }
  static Dual2 var_y(double y) { Dual2 d(y); d.dy = 1; return d; }

  Dual2 operator-() const { return {-v, -dx, -dy, -dxx, -dxy, -dyy}; }

private:
  Dual2(double v_, double dx_, double dy_, double dxx_, double dxy_, double dyy_)
      : v(v_), dx(dx_), dy(dy_), dxx(dxx_), dxy(dxy_), dyy(dyy_) {}
  friend Dual2 operator+(const Dual2& a, const Dual2& b);
  friend Dual2 operator-(const Dual2& a, const Dual2& b);
  friend Dual2 operator*(const Dual2& a, const Dual2& b);
  friend Dual2 chain(const Dual2& a, double f, double fp, double fpp);
};

inline Dual2 operator+(const Dual2& a, const Dual2& b) {
  return {a.v + b.v, a.dx + b.dx, a.dy + b.dy, a.dxx + b.dxx, a.dxy + b.dxy, a.dyy + b.dyy};
}
inline Dual2 operator-(const Dual2& a, const Dual2& b) {
  return {a.v - b.v, a.dx - b.dx, a.dy - b.dy, a.dxx - b.dxx, a.dxy - b.dxy, a.dyy - b.dyy};
}
inline Dual2 operator*(const Dual2& a, const Dual2& b) {
  return {a.v * b.v,
          a.dx * b.v + a.v * b.dx,
          a.dy * b.v + a.v * b.dy,
          a.dxx * b.v + 2 * a.dx * b.dx + a.v * b.dxx,
          a.dxy * b.v + a.dx * b.dy + a.dy * b.dx + a.v * b.dxy,
          a.dyy * b.v + 2 * a.dy * b.dy + a.v * b.dyy};
}

/// compose f(a) given f, f', f'' at a.v
inline Dual2 chain(const Dual2& a, double f, double fp, double fpp) {
  return {f,
          fp * a.dx,
          fp * a.dy,
          fp * a.dxx + fpp * a.dx * a.dx,
          fp * a.dxy + fpp * a.dx * a.dy,
          fp * a.dyy + fpp * a.dy * a.dy};
}

inline Dual2 operator/(const Dual2& a, const Dual2& b) {
  const double iv = 1.0 / b.v;
  return a * chain(b, iv, -iv * iv, 2 * iv * iv * iv);
}
inline Dual2 sin(const Dual2& a) { return chain(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }
inline Dual2 cos(const Dual2& a) { return chain(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }
inline Dual2 exp(const Dual2& a) {
  const double e = std::exp(a.v);
  return chain(a, e, e, e);
}
inline Dual2 pow(const Dual2& a, int n) {
  return chain(a, std::pow(a.v, n), n * std::pow(a.v, n - 1), n * (n - 1) * std::pow(a.v, n - 2));
}

/// One independent variable, first derivative only; enough for the pointwise
/// turbulence-source tangents.
struct Jet1 {
  double v = 0, d = 0;
  Jet1() = default;
  Jet1(double c) : v(c) {}
  Jet1(double v_, double d_) : v(v_), d(d_) {}
  static Jet1 var(double x) { return {x, 1.0}; }
  Jet1 operator-() const { return {-v, -d}; }
};

inline Jet1 operator+(const Jet1& a, const Jet1& b) { return {a.v + b.v, a.d + b.d}; }
inline Jet1 operator-(const Jet1& a, const Jet1& b) { return {a.v - b.v, a.d - b.d}; }
inline Jet1 operator*(const Jet1& a, const Jet1& b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
inline Jet1 operator/(const Jet1& a, const Jet1& b) {
  return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
}
inline Jet1 pow(const Jet1& a, double p) {
  return {std::pow(a.v, p), p * std::pow(a.v, p - 1) * a.d};
}
inline Jet1 sqrt(const Jet1& a) {
  const double s = std::sqrt(a.v);
  return {s, 0.5 / s * a.d};
}
inline Jet1 max(const Jet1& a, double floor) { return a.v >= floor ? a : Jet1(floor); }
inline Jet1 min(const Jet1& a, double cap) { return a.v <= cap ? a : Jet1(cap); }

} // namespace hdg
