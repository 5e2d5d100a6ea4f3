#pragma once

#include <vector>

#include "borelsum/types.hpp"

namespace borelsum {

/// Polynomial with complex coefficients, stored in ascending degree.
/// The leading coefficient must be nonzero.
struct ComplexPolynomial {
  std::vector<cplx> coeffs;

  ComplexPolynomial() = default;
  explicit ComplexPolynomial(std::vector<cplx> c);

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  cplx leading() const { return coeffs.back(); }

  cplx eval(cplx x) const;
  /// Value at x = i*m, the symbol evaluation used throughout.
  cplx eval_im(double m) const { return eval(cplx(0.0, m)); }
};

}  // namespace borelsum
