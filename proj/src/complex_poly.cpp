#include "borelsum/complex_poly.hpp"

namespace borelsum {

ComplexPolynomial::ComplexPolynomial(std::vector<cplx> c) : coeffs(std::move(c)) {
  if (coeffs.empty()) throw validation_error("polynomial needs at least one coefficient");
  if (coeffs.size() > 1 && coeffs.back() == cplx(0.0, 0.0))
    throw validation_error("polynomial leading coefficient must be nonzero");
}

cplx ComplexPolynomial::eval(cplx x) const {
  cplx acc(0.0, 0.0);
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

}  // namespace borelsum
