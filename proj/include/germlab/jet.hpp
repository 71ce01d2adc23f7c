#pragma once

// Truncated bivariate power series ("jets") in x, y with dense coefficient
// storage ordered by total degree. The scalar type is either Rational (exact)
// or double; it is fixed at construction time through the template parameter,
// so scalar kinds can never mix inside one expression.

#include <algorithm>
#include <stdexcept>
#include <utility>
#include <vector>

#include "germlab/rational.hpp"

namespace germlab {

inline constexpr int kDefaultJetOrder = 9;

inline constexpr int jet_size(int order) { return (order + 1) * (order + 2) / 2; }

// Coefficient of x^i y^j lives at triangular index T(i+j) + j.
inline constexpr int jet_index(int i, int j) {
  const int d = i + j;
  return d * (d + 1) / 2 + j;
}

template <class S>
class Jet {
 public:
  explicit Jet(int order = kDefaultJetOrder) : order_(order) {
    if (order < 0) throw std::invalid_argument("jet order must be nonnegative");
    coeffs_.assign(jet_size(order), S(0));
  }

  static Jet constant(const S& value, int order = kDefaultJetOrder) {
    Jet j(order);
    j.coeffs_[0] = value;
    return j;
  }

  // variable 0 -> x, 1 -> y
  static Jet variable(int which, int order = kDefaultJetOrder) {
    if (order < 1) throw std::invalid_argument("variable jet needs order >= 1");
    Jet j(order);
    j.set(1 - which, which, S(1));
    return j;
  }

  int order() const { return order_; }

  const S& coeff(int i, int j) const {
    check_degree(i, j);
    return coeffs_[jet_index(i, j)];
  }

  void set(int i, int j, const S& value) {
    check_degree(i, j);
    coeffs_[jet_index(i, j)] = value;
  }

  void add_to(int i, int j, const S& value) {
    check_degree(i, j);
    coeffs_[jet_index(i, j)] += value;
  }

  const std::vector<S>& raw() const { return coeffs_; }

  bool is_zero() const {
    for (const S& c : coeffs_)
      if (c != S(0)) return false;
    return true;
  }

  Jet truncated(int new_order) const {
    if (new_order >= order_) {
      Jet copy = *this;
      if (new_order > order_) {
        copy.order_ = new_order;
        copy.coeffs_.resize(jet_size(new_order), S(0));
      }
      return copy;
    }
    Jet out(new_order);
    for (int d = 0; d <= new_order; ++d)
      for (int j = 0; j <= d; ++j) out.set(d - j, j, coeff(d - j, j));
    return out;
  }

  Jet operator-() const {
    Jet out = *this;
    for (S& c : out.coeffs_) c = -c;
    return out;
  }

  friend Jet operator+(const Jet& a, const Jet& b) { return combine(a, b, false); }
  friend Jet operator-(const Jet& a, const Jet& b) { return combine(a, b, true); }

  // Product truncated to the smaller operand order.
  friend Jet operator*(const Jet& a, const Jet& b) {
    const int n = std::min(a.order_, b.order_);
    Jet out(n);
    for (int da = 0; da <= n; ++da)
      for (int ja = 0; ja <= da; ++ja) {
        const S& ca = a.coeff(da - ja, ja);
        if (ca == S(0)) continue;
        for (int db = 0; db + da <= n; ++db)
          for (int jb = 0; jb <= db; ++jb) {
            const S& cb = b.coeff(db - jb, jb);
            if (cb == S(0)) continue;
            out.add_to(da - ja + db - jb, ja + jb, ca * cb);
          }
      }
    return out;
  }

  Jet& operator+=(const Jet& b) { return *this = *this + b; }
  Jet& operator-=(const Jet& b) { return *this = *this - b; }
  Jet& operator*=(const Jet& b) { return *this = *this * b; }

  friend Jet operator*(const S& s, const Jet& a) {
    Jet out = a;
    for (S& c : out.coeffs_) c = s * c;
    return out;
  }
  friend Jet operator*(const Jet& a, const S& s) { return s * a; }

  bool operator==(const Jet& b) const { return order_ == b.order_ && coeffs_ == b.coeffs_; }
  bool operator!=(const Jet& b) const { return !(*this == b); }

 private:
  static Jet combine(const Jet& a, const Jet& b, bool subtract) {
    const int n = std::min(a.order_, b.order_);
    Jet out(n);
    for (int d = 0; d <= n; ++d)
      for (int j = 0; j <= d; ++j) {
        const S& cb = b.coeff(d - j, j);
        out.set(d - j, j, subtract ? S(a.coeff(d - j, j) - cb) : S(a.coeff(d - j, j) + cb));
      }
    return out;
  }

  void check_degree(int i, int j) const {
    if (i < 0 || j < 0 || i + j > order_)
      throw std::out_of_range("jet coefficient degree out of range");
  }

  int order_;
  std::vector<S> coeffs_;
};

using JetR = Jet<Rational>;
using JetD = Jet<double>;

// Formal partial derivative; result order = max(order-1, 0).
template <class S>
Jet<S> partial(const Jet<S>& f, int var) {
  if (var != 0 && var != 1) throw std::invalid_argument("partial: var must be 0 (x) or 1 (y)");
  const int n = std::max(f.order() - 1, 0);
  Jet<S> out(n);
  for (int d = 1; d <= f.order(); ++d)
    for (int j = 0; j <= d; ++j) {
      const int i = d - j;
      const S& c = f.coeff(i, j);
      if (c == S(0)) continue;
      if (var == 0 && i >= 1 && d - 1 <= n) out.add_to(i - 1, j, S(i) * c);
      if (var == 1 && j >= 1 && d - 1 <= n) out.add_to(i, j - 1, S(j) * c);
    }
  return out;
}

// f(g1, g2) truncated to min(order f, order g1, order g2). The inner jets must
// vanish at the origin so truncation commutes with substitution.
template <class S>
Jet<S> compose(const Jet<S>& f, const Jet<S>& g1, const Jet<S>& g2) {
  if (g1.coeff(0, 0) != S(0) || g2.coeff(0, 0) != S(0))
    throw std::invalid_argument("compose: inner jets must vanish at the origin");
  const int n = std::min({f.order(), g1.order(), g2.order()});
  const Jet<S> a = g1.truncated(n), b = g2.truncated(n);

  // powers[i] = a^i, truncated. a^i b^j vanishes to order i+j, so only i+j <= n matters.
  std::vector<Jet<S>> pow_a(n + 1, Jet<S>(n)), pow_b(n + 1, Jet<S>(n));
  pow_a[0] = Jet<S>::constant(S(1), n);
  pow_b[0] = pow_a[0];
  for (int i = 1; i <= n; ++i) {
    pow_a[i] = pow_a[i - 1] * a;
    pow_b[i] = pow_b[i - 1] * b;
  }

  Jet<S> out(n);
  for (int d = 0; d <= std::min(f.order(), n); ++d)
    for (int j = 0; j <= d; ++j) {
      const S& c = f.coeff(d - j, j);
      if (c == S(0)) continue;
      out += c * (pow_a[d - j] * pow_b[j]);
    }
  return out;
}

// Multiplicative inverse truncated at the operand order; requires a nonzero
// constant term. Newton doubling r <- r(2 - f r) converges in O(log order).
template <class S>
Jet<S> reciprocal(const Jet<S>& f) {
  const S c = f.coeff(0, 0);
  if (c == S(0)) throw std::invalid_argument("reciprocal: constant term must be nonzero");
  const int n = f.order();
  Jet<S> r = Jet<S>::constant(S(1) / c, n);
  const Jet<S> two = Jet<S>::constant(S(2), n);
  for (int correct = 1; correct <= n; correct *= 2) r = r * (two - f * r);
  return r;
}

template <class S>
S evaluate(const Jet<S>& f, const S& x, const S& y) {
  std::vector<S> px(f.order() + 1, S(1)), py(f.order() + 1, S(1));
  for (int k = 1; k <= f.order(); ++k) {
    px[k] = px[k - 1] * x;
    py[k] = py[k - 1] * y;
  }
  S acc(0);
  for (int d = 0; d <= f.order(); ++d)
    for (int j = 0; j <= d; ++j) {
      const S& c = f.coeff(d - j, j);
      if (c == S(0)) continue;
      acc += c * px[d - j] * py[j];
    }
  return acc;
}

// f(x + x0, y + y0) at unchanged order. Exact for polynomial data (binomial
// re-expansion); used to recentre polynomial unfoldings at a study point.
template <class S>
Jet<S> translate(const Jet<S>& f, const S& x0, const S& y0) {
  const int n = f.order();
  std::vector<std::vector<S>> binom(n + 1, std::vector<S>(n + 1, S(0)));
  for (int i = 0; i <= n; ++i) {
    binom[i][0] = S(1);
    for (int k = 1; k <= i; ++k)
      binom[i][k] = binom[i - 1][k - 1] + (k <= i - 1 ? binom[i - 1][k] : S(0));
  }
  std::vector<S> px(n + 1, S(1)), py(n + 1, S(1));
  for (int k = 1; k <= n; ++k) {
    px[k] = px[k - 1] * x0;
    py[k] = py[k - 1] * y0;
  }
  Jet<S> out(n);
  for (int d = 0; d <= n; ++d)
    for (int j = 0; j <= d; ++j) {
      const int i = d - j;
      const S& c = f.coeff(i, j);
      if (c == S(0)) continue;
      for (int p = 0; p <= i; ++p)
        for (int q = 0; q <= j; ++q)
          out.add_to(p, q, c * binom[i][p] * binom[j][q] * px[i - p] * py[j - q]);
    }
  return out;
}

template <class S>
double max_abs_coeff(const Jet<S>& f) {
  double m = 0.0;
  for (const S& c : f.raw()) m = std::max(m, std::fabs(to_double(c)));
  return m;
}

template <class S>
Jet<double> to_double_jet(const Jet<S>& f) {
  Jet<double> out(f.order());
  for (int d = 0; d <= f.order(); ++d)
    for (int j = 0; j <= d; ++j) out.set(d - j, j, to_double(f.coeff(d - j, j)));
  return out;
}

}  // namespace germlab
