#include "rmtlab/real.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace rmtlab {

Real Real::from_string(const std::string& s, mpfr_prec_t prec) {
  Real r(prec);
  if (mpfr_set_str(r.v_, s.c_str(), 10, MPFR_RNDN) != 0) {
    throw std::invalid_argument("Real::from_string: cannot parse '" + s + "'");
  }
  return r;
}

std::string Real::str(int digits) const {
  if (digits < 0) {
    digits = static_cast<int>(std::ceil(static_cast<double>(prec()) * 0.3010299956639812)) + 2;
  }
  char* out = nullptr;
  mpfr_asprintf(&out, "%.*Re", digits, v_);
  std::string s = out ? std::string(out) : std::string("nan");
  if (out) mpfr_free_str(out);
  return s;
}

}  // namespace rmtlab
