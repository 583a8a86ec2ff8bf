#include "rmtlab/weight.hpp"

#include <algorithm>
#include <stdexcept>

#include "json.hpp"

namespace rmtlab {

void WeightSpec::validate() const {
  if (n < 1) throw std::invalid_argument("WeightSpec: n must be >= 1");
  if (epsilon <= 0) throw std::invalid_argument("WeightSpec: epsilon must be > 0");
  double prev = 1.0;
  for (const auto& s : sing) {
    if (!(s.lambda > -1.0 && s.lambda < 1.0)) {
      throw std::invalid_argument("WeightSpec: every lambda_i must lie in (-1,1)");
    }
    if (!(s.lambda < prev)) {
      throw std::invalid_argument("WeightSpec: lambda_i must be strictly decreasing");
    }
    if (!(s.alpha > -0.5)) {
      throw std::invalid_argument("WeightSpec: every alpha_i must exceed -1/2");
    }
    prev = s.lambda;
  }
}

int WeightSpec::deg_w0() const {
  int d = static_cast<int>(poly.size()) - 1;
  while (d > 0 && poly[d] == 0.0) --d;
  return d < 0 ? 0 : d;
}

double WeightSpec::total_alpha() const {
  double a = 0;
  for (const auto& s : sing) a += s.alpha;
  return a;
}

bool WeightSpec::is_even() const {
  for (std::size_t k = 1; k < poly.size(); k += 2) {
    if (poly[k] != 0.0) return false;
  }
  std::size_t m = sing.size();
  for (std::size_t i = 0; i < m; ++i) {
    const auto& mirror = sing[m - 1 - i];
    if (sing[i].lambda != -mirror.lambda || sing[i].alpha != mirror.alpha) return false;
  }
  return true;
}

WeightSpec WeightSpec::mirrored() const {
  WeightSpec out = *this;
  for (std::size_t k = 1; k < out.poly.size(); k += 2) out.poly[k] = -out.poly[k];
  out.sing.clear();
  for (auto it = sing.rbegin(); it != sing.rend(); ++it) {
    out.sing.push_back({-it->lambda, it->alpha});
  }
  return out;
}

Real smooth_step(const Real& t) {
  mpfr_prec_t p = t.prec();
  if (t <= 0.0) return Real(0.0, p);
  if (t >= 1.0) return Real(1.0, p);
  Real a = exp(-1 / t);
  Real b = exp(-1 / (1 - t));
  return a / (a + b);
}

Real mollifier(const Real& x, double eps) {
  // 1 on |x| <= 1+eps, 0 on |x| >= 1+2eps.
  Real e(eps, x.prec());
  return smooth_step((1 + 2 * e - abs(x)) / e);
}

Real mollifier_deriv(const Real& x, double eps) {
  mpfr_prec_t p = x.prec();
  Real e(eps, p);
  Real t = (1 + 2 * e - abs(x)) / e;
  if (t <= 0.0 || t >= 1.0) return Real(0.0, p);
  Real a = exp(-1 / t);
  Real b = exp(-1 / (1 - t));
  Real da = a / (t * t);
  Real db = b / ((1 - t) * (1 - t));
  // d/dt [a/(a+b)] = (da*b + a*db) / (a+b)^2, then dt/dx = -sign(x)/eps.
  Real dsdt = (da * b + a * db) / ((a + b) * (a + b));
  Real sgn(x.sign() >= 0 ? 1.0 : -1.0, p);
  return dsdt * (-sgn / e);
}

Real WeightSpec::w0(const Real& x) const {
  Real acc(0.0, x.prec());
  for (auto it = poly.rbegin(); it != poly.rend(); ++it) {
    acc = acc * x + Real(*it, x.prec());
  }
  return acc;
}

Real WeightSpec::w0_deriv(const Real& x) const {
  Real acc(0.0, x.prec());
  for (int k = static_cast<int>(poly.size()) - 1; k >= 1; --k) {
    acc = acc * x + Real(poly[k], x.prec()) * k;
  }
  return acc;
}

Real WeightSpec::potential(const Real& x) const {
  if (!tail) return w0(x);
  return w0(x) * mollifier(x, epsilon);
}

Real WeightSpec::potential_deriv(const Real& x) const {
  if (!tail) return w0_deriv(x);
  return w0_deriv(x) * mollifier(x, epsilon) + w0(x) * mollifier_deriv(x, epsilon);
}

Real WeightSpec::tail_part(const Real& x) const {
  if (!tail) return Real(0.0, x.prec());
  return w0(x) * (mollifier(x, epsilon) - 1);
}

Real WeightSpec::log_weight_smooth(const Real& x) const {
  return -2 * n * x * x + 2 * potential(x);
}

Real WeightSpec::weight(const Real& x) const { return weight_power(x, Real(1.0, x.prec())); }

Real WeightSpec::weight_power(const Real& x, const Real& p) const {
  return weight_power_reduced(x, p, -1);
}

Real WeightSpec::weight_power_reduced(const Real& x, const Real& p, int skip) const {
  mpfr_prec_t prec = x.prec() > p.prec() ? x.prec() : p.prec();
  Real out = exp(p * log_weight_smooth(x));
  for (int i = 0; i < static_cast<int>(sing.size()); ++i) {
    if (i == skip) continue;
    Real d = abs(x - Real(sing[i].lambda, prec));
    if (d.is_zero()) {
      if (sing[i].alpha > 0) return Real(0.0, prec);
      if (sing[i].alpha == 0) continue;
      throw std::domain_error("weight evaluated exactly at a singular point with alpha < 0");
    }
    out *= pow(d, Real(2 * sing[i].alpha, prec) * p);
  }
  return out;
}

Real WeightSpec::log_sqrtw_reduced_deriv(const Real& x, int skip) const {
  Real out = -2 * n * x + potential_deriv(x);
  for (int i = 0; i < static_cast<int>(sing.size()); ++i) {
    if (i == skip) continue;
    out += Real(sing[i].alpha, x.prec()) / (x - Real(sing[i].lambda, x.prec()));
  }
  return out;
}

std::string WeightSpec::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["poly"] = poly;
  j["singularities"] = nlohmann::json::array();
  for (const auto& s : sing) {
    j["singularities"].push_back({{"lambda", s.lambda}, {"alpha", s.alpha}});
  }
  j["epsilon"] = epsilon;
  j["tail"] = tail;
  return j.dump();
}

WeightSpec WeightSpec::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  WeightSpec spec;
  spec.n = j.at("n").get<long>();
  if (j.contains("poly")) spec.poly = j["poly"].get<std::vector<double>>();
  if (j.contains("singularities")) {
    for (const auto& s : j["singularities"]) {
      spec.sing.push_back({s.at("lambda").get<double>(), s.at("alpha").get<double>()});
    }
  }
  if (j.contains("epsilon")) spec.epsilon = j["epsilon"].get<double>();
  if (j.contains("tail")) spec.tail = j["tail"].get<bool>();
  spec.validate();
  return spec;
}

}  // namespace rmtlab
