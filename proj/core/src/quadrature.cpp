#include "rmtlab/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace rmtlab {

namespace {

std::string real_key(const Real& v) {
  char* s = nullptr;
  mpfr_asprintf(&s, "%Ra", v.raw());
  std::string out = s ? s : "?";
  if (s) mpfr_free_str(s);
  return out;
}

}  // namespace

JacobiRecurrence jacobi_recurrence(int n, const Real& a, const Real& b, mpfr_prec_t prec) {
  if (!(a > -1.0) || !(b > -1.0)) {
    throw std::invalid_argument("jacobi_recurrence: exponents must exceed -1");
  }
  JacobiRecurrence rec;
  rec.alpha.reserve(n);
  rec.sqrt_beta.reserve(n + 1);

  Real ab = a + b;
  // beta_0 = 2^{a+b+1} Gamma(a+1)Gamma(b+1)/Gamma(a+b+2)
  Real beta0 = pow(Real(2.0, prec), ab + 1) * tgamma(a + 1) * tgamma(b + 1) / tgamma(ab + 2);
  rec.sqrt_beta.push_back(sqrt(beta0));
  for (int k = 0; k < n; ++k) {
    if (k == 0) {
      rec.alpha.push_back((b - a) / (ab + 2));
    } else {
      Real t = 2 * k + ab;
      rec.alpha.push_back((b * b - a * a) / (t * (t + 2)));
    }
  }
  for (int k = 1; k <= n; ++k) {
    Real t = 2 * k + ab;
    Real beta_k;
    if (k == 1) {
      // (1+a+b) cancelled against the (2k+a+b-1) factor; valid for all a,b > -1.
      beta_k = 4 * (a + 1) * (b + 1) / ((ab + 2) * (ab + 2) * (ab + 3));
    } else {
      beta_k = 4 * k * (k + a) * (k + b) * (k + ab) / (t * t * (t + 1) * (t - 1));
    }
    rec.sqrt_beta.push_back(sqrt(beta_k));
  }
  return rec;
}

namespace {

// Orthonormal Jacobi polynomial p_n and derivative at x, by forward recurrence.
void eval_pn(const JacobiRecurrence& rec, int n, const Real& x, Real* pn, Real* dpn,
             mpfr_prec_t prec) {
  Real pm1(prec), p0 = 1 / rec.sqrt_beta[0];
  Real dpm1(prec), dp0(prec);
  for (int k = 0; k < n; ++k) {
    Real p1 = ((x - rec.alpha[k]) * p0 - rec.sqrt_beta[k] * pm1) / rec.sqrt_beta[k + 1];
    Real dp1 = (p0 + (x - rec.alpha[k]) * dp0 - rec.sqrt_beta[k] * dpm1) / rec.sqrt_beta[k + 1];
    pm1 = std::move(p0);
    p0 = std::move(p1);
    dpm1 = std::move(dp0);
    dp0 = std::move(dp1);
  }
  *pn = p0;
  *dpn = dp0;
}

std::unique_ptr<GaussRule> build_gauss(int n, const Real& a, const Real& b, mpfr_prec_t prec) {
  JacobiRecurrence rec = jacobi_recurrence(n, a, b, prec);

  // Double-precision Golub-Welsch pass for starting guesses.
  Eigen::VectorXd diag(n), sub(n > 1 ? n - 1 : 1);
  for (int k = 0; k < n; ++k) diag[k] = rec.alpha[k].to_double();
  for (int k = 0; k + 1 < n; ++k) sub[k] = rec.sqrt_beta[k + 1].to_double();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub.head(std::max(n - 1, 0)), Eigen::EigenvaluesOnly);

  auto rule = std::make_unique<GaussRule>();
  rule->x.reserve(n);
  rule->w.reserve(n);

  Real tol = pow2(-static_cast<long>(prec) + 4, prec);
  for (int i = 0; i < n; ++i) {
    Real xi(es.eigenvalues()[i], prec);
    for (int it = 0; it < 60; ++it) {
      Real pn(prec), dpn(prec);
      eval_pn(rec, n, xi, &pn, &dpn, prec);
      Real step = pn / dpn;
      xi -= step;
      if (abs(step) <= tol * (1 + abs(xi))) break;
    }
    // Christoffel weight: 1 / sum_{k<n} p_k(x_i)^2.
    Real pm1(prec), p0 = 1 / rec.sqrt_beta[0];
    Real s = p0 * p0;
    for (int k = 0; k + 1 < n; ++k) {
      Real p1 = ((xi - rec.alpha[k]) * p0 - rec.sqrt_beta[k] * pm1) / rec.sqrt_beta[k + 1];
      s += p1 * p1;
      pm1 = std::move(p0);
      p0 = std::move(p1);
    }
    rule->x.push_back(xi);
    rule->w.push_back(1 / s);
  }
  return rule;
}

std::mutex g_cache_mutex;
std::unordered_map<std::string, std::unique_ptr<GaussRule>> g_gauss_cache;
std::unordered_map<std::string, std::unique_ptr<TanhSinhRule>> g_ts_cache;

}  // namespace

const GaussRule& gauss_jacobi(int n, const Real& a, const Real& b, mpfr_prec_t prec) {
  std::string key = std::to_string(n) + "|" + std::to_string(prec) + "|" + real_key(a) + "|" +
                    real_key(b);
  std::lock_guard<std::mutex> lock(g_cache_mutex);
  auto it = g_gauss_cache.find(key);
  if (it == g_gauss_cache.end()) {
    it = g_gauss_cache.emplace(key, build_gauss(n, a, b, prec)).first;
  }
  return *it->second;
}

const GaussRule& gauss_legendre(int n, mpfr_prec_t prec) {
  return gauss_jacobi(n, Real(0.0, prec), Real(0.0, prec), prec);
}

const TanhSinhRule& tanh_sinh(mpfr_prec_t prec) {
  std::string key = std::to_string(prec);
  std::lock_guard<std::mutex> lock(g_cache_mutex);
  auto it = g_ts_cache.find(key);
  if (it != g_ts_cache.end()) return *it->second;

  // x(t) = tanh((pi/2) sinh t). Step h targets discretization error ~2^-prec;
  // t_max targets endpoint distance ~2^-(prec+8).
  auto rule = std::make_unique<TanhSinhRule>();
  Real pi = const_pi(prec);
  Real half_pi = pi / 2;
  double dprec = static_cast<double>(prec);
  // Endpoint distance down to 2^-(2 prec + 16): integrands may blow up like
  // dist^{-1/2+}, so truncation must overshoot the working precision.
  double u_max = (2.0 * dprec + 16.0) * 0.5 * 0.6931471805599453;
  double t_max = std::asinh(u_max * 2.0 / M_PI);
  // Effective analyticity strip shrinks to ~pi/4 for integrands with
  // algebraic endpoint singularities; size h accordingly.
  double h_d = (M_PI * M_PI / 2.0) / (dprec * 0.6931471805599453 + 16.0);
  long n_side = static_cast<long>(std::ceil(t_max / h_d));
  Real h(t_max / static_cast<double>(n_side), prec);

  // Build t >= 0 side; mirror for t < 0. dist = 1 - x = 2/(e^{2u}+1), exact.
  std::vector<Real> xs, ws, ds;
  for (long j = 0; j <= n_side; ++j) {
    Real t = h * j;
    Real u = half_pi * sinh(t);
    Real e2u = exp(2 * u);
    Real dist = 2 / (e2u + 1);
    Real x = 1 - dist;
    Real w = h * half_pi * cosh(t) / (cosh(u) * cosh(u));
    xs.push_back(x);
    ws.push_back(w);
    ds.push_back(dist);
  }
  for (long j = n_side; j >= 1; --j) {
    rule->x.push_back(-xs[j]);
    rule->w.push_back(ws[j]);
    rule->dist.push_back(ds[j]);
  }
  for (long j = 0; j <= n_side; ++j) {
    rule->x.push_back(xs[j]);
    rule->w.push_back(ws[j]);
    rule->dist.push_back(ds[j]);
  }
  auto ins = g_ts_cache.emplace(key, std::move(rule)).first;
  return *ins->second;
}

}  // namespace rmtlab
