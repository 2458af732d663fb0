#pragma once
/* Complex polynomials in one variable with Horner jet evaluation.
 * Coefficients are stored constant-term first. */

#include <complex>
#include <vector>

namespace fsforge {

using cplx = std::complex<double>;

class Polynomial {
 public:
  Polynomial() : coeff_{cplx(0.0, 0.0)} {}
  explicit Polynomial(std::vector<cplx> coefficients);

  int degree() const { return static_cast<int>(coeff_.size()) - 1; }
  const std::vector<cplx>& coefficients() const { return coeff_; }

  cplx operator()(cplx z) const;

  struct Jet {
    cplx f, df, ddf;
  };
  Jet jet(cplx z) const;  // value, first and second derivative in one pass

  Polynomial derivative() const;
  Polynomial scaled(cplx c) const;        // c * F
  Polynomial translated(cplx a) const;    // z -> F(z + a)
  Polynomial plus(const Polynomial&) const;

 private:
  std::vector<cplx> coeff_;
};

}  // namespace fsforge
