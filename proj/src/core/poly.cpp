#include "core/poly.hpp"

#include "core/error.hpp"

namespace fsforge {

Polynomial::Polynomial(std::vector<cplx> coefficients) : coeff_(std::move(coefficients)) {
  while (coeff_.size() > 1 && std::abs(coeff_.back()) == 0.0) coeff_.pop_back();
  if (coeff_.empty()) coeff_.push_back(cplx(0.0, 0.0));
}

cplx Polynomial::operator()(cplx z) const {
  cplx f = coeff_.back();
  for (int k = static_cast<int>(coeff_.size()) - 2; k >= 0; --k) f = f * z + coeff_[k];
  return f;
}

Polynomial::Jet Polynomial::jet(cplx z) const {
  cplx f = coeff_.back(), df = 0.0, ddf = 0.0;
  for (int k = static_cast<int>(coeff_.size()) - 2; k >= 0; --k) {
    ddf = ddf * z + df;
    df = df * z + f;
    f = f * z + coeff_[k];
  }
  return {f, df, 2.0 * ddf};
}

Polynomial Polynomial::derivative() const {
  if (coeff_.size() == 1) return Polynomial({cplx(0.0, 0.0)});
  std::vector<cplx> d(coeff_.size() - 1);
  for (size_t k = 1; k < coeff_.size(); ++k) d[k - 1] = double(k) * coeff_[k];
  return Polynomial(std::move(d));
}

Polynomial Polynomial::scaled(cplx c) const {
  std::vector<cplx> s = coeff_;
  for (auto& a : s) a *= c;
  return Polynomial(std::move(s));
}

Polynomial Polynomial::translated(cplx a) const {
  // Repeated synthetic division: F(z + a) coefficients via Taylor shift.
  std::vector<cplx> c = coeff_;
  const int n = static_cast<int>(c.size());
  for (int i = 0; i < n; ++i)
    for (int k = n - 2; k >= i; --k) c[k] += a * c[k + 1];
  return Polynomial(std::move(c));
}

Polynomial Polynomial::plus(const Polynomial& other) const {
  std::vector<cplx> s(std::max(coeff_.size(), other.coeff_.size()), cplx(0.0, 0.0));
  for (size_t k = 0; k < coeff_.size(); ++k) s[k] += coeff_[k];
  for (size_t k = 0; k < other.coeff_.size(); ++k) s[k] += other.coeff_[k];
  return Polynomial(std::move(s));
}

}  // namespace fsforge
