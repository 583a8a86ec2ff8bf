#pragma once

#include "rmtlab/real.hpp"

namespace rmtlab {

// Complex arithmetic on Real, plus the 2x2 complex matrices used by the
// parametrix frames. Kept minimal: only what the frame algebra needs.
struct Cplx {
  Real re, im;

  Cplx() = default;
  explicit Cplx(mpfr_prec_t prec) : re(prec), im(prec) {}
  Cplx(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
  explicit Cplx(const Real& r) : re(r), im(Real(r.prec())) {}

  mpfr_prec_t prec() const { return re.prec() > im.prec() ? re.prec() : im.prec(); }

  Cplx operator-() const { return {-re, -im}; }
  friend Cplx operator+(const Cplx& a, const Cplx& b) { return {a.re + b.re, a.im + b.im}; }
  friend Cplx operator-(const Cplx& a, const Cplx& b) { return {a.re - b.re, a.im - b.im}; }
  friend Cplx operator*(const Cplx& a, const Cplx& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend Cplx operator*(const Cplx& a, const Real& s) { return {a.re * s, a.im * s}; }
  friend Cplx operator*(const Real& s, const Cplx& a) { return a * s; }
  friend Cplx operator/(const Cplx& a, const Real& s) { return {a.re / s, a.im / s}; }
  friend Cplx operator/(const Cplx& a, const Cplx& b) {
    Real d = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
  }
  Cplx& operator+=(const Cplx& o) { re += o.re; im += o.im; return *this; }
  Cplx& operator-=(const Cplx& o) { re -= o.re; im -= o.im; return *this; }
};

inline Cplx conj(const Cplx& z) { return {z.re, -z.im}; }
inline Real abs(const Cplx& z) { return sqrt(z.re * z.re + z.im * z.im); }
inline Cplx cis(const Real& theta) { return {cos(theta), sin(theta)}; }  // e^{i theta}
inline Cplx cexp(const Cplx& z) { return exp(z.re) * cis(z.im); }
inline Cplx cinv(const Cplx& z) {
  Real d = z.re * z.re + z.im * z.im;
  return {z.re / d, -z.im / d};
}

// Principal branch power z^p for real p (branch cut on the negative axis).
inline Cplx cpow(const Cplx& z, const Real& p) {
  Real r = abs(z);
  Real th = atan2(z.im, z.re);
  return pow(r, p) * cis(p * th);
}

struct Mat2 {
  Cplx m[2][2];

  Mat2() = default;
  explicit Mat2(mpfr_prec_t prec)
      : m{{Cplx(prec), Cplx(prec)}, {Cplx(prec), Cplx(prec)}} {}

  static Mat2 identity(mpfr_prec_t prec) {
    Mat2 r(prec);
    r.m[0][0].re = Real(1.0, prec);
    r.m[1][1].re = Real(1.0, prec);
    return r;
  }
  // diag(z, 1/z): the sigma_3 exponential pattern used throughout the frames.
  static Mat2 sigma_diag(const Cplx& z) {
    Mat2 r(z.prec());
    r.m[0][0] = z;
    r.m[1][1] = cinv(z);
    return r;
  }

  friend Mat2 operator*(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        r.m[i][j] = a.m[i][0] * b.m[0][j] + a.m[i][1] * b.m[1][j];
    return r;
  }
  friend Mat2 operator*(const Cplx& s, const Mat2& a) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r.m[i][j] = s * a.m[i][j];
    return r;
  }
  friend Mat2 operator*(const Real& s, const Mat2& a) { return Cplx(s) * a; }
};

inline Cplx det(const Mat2& a) { return a.m[0][0] * a.m[1][1] - a.m[0][1] * a.m[1][0]; }
inline Mat2 inverse(const Mat2& a) {
  Cplx d = cinv(det(a));
  Mat2 r;
  r.m[0][0] = a.m[1][1] * d;
  r.m[0][1] = -a.m[0][1] * d;
  r.m[1][0] = -a.m[1][0] * d;
  r.m[1][1] = a.m[0][0] * d;
  return r;
}

struct Vec2 {
  Cplx x, y;
};
inline Vec2 operator*(const Mat2& a, const Vec2& v) {
  return {a.m[0][0] * v.x + a.m[0][1] * v.y, a.m[1][0] * v.x + a.m[1][1] * v.y};
}

}  // namespace rmtlab
