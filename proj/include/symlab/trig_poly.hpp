// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace symlab {

/// Raised when operands live on tori of different dimension, or an axis is out of range.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Frequency = std::vector<int>;

/// Exact trigonometric polynomial on the flat m-torus with 2π-periodic coordinates.
///
/// Stored as  Σ_k  c_k cos(k·x) + s_k sin(k·x)  over a finite set of integer frequency
/// vectors. The canonical form keeps only the zero vector and lexicographically positive
/// vectors (a negative k is folded in by cos(-u) = cos u, sin(-u) = -sin u), and never
/// stores a term whose two coefficients are both zero.
class TrigPoly {
 public:
  struct Coeff {
    double cos = 0.0;
    double sin = 0.0;
  };
  using Terms = std::map<Frequency, Coeff>;

  TrigPoly() = default;
  explicit TrigPoly(std::size_t dim) : dim_(dim) {}

  static TrigPoly constant(std::size_t dim, double value) {
    TrigPoly p(dim);
    p.add_term(Frequency(dim, 0), value, 0.0);
    return p;
  }

  /// c·cos(k·x) + s·sin(k·x)
  static TrigPoly term(Frequency k, double c, double s) {
    TrigPoly p(k.size());
    p.add_term(std::move(k), c, s);
    return p;
  }

  /// sin(j·x_axis) on an m-torus.
  static TrigPoly sin_axis(std::size_t dim, std::size_t axis, int j = 1) {
    Frequency k(dim, 0);
    k.at(axis) = j;
    return term(std::move(k), 0.0, 1.0);
  }

  static TrigPoly cos_axis(std::size_t dim, std::size_t axis, int j = 1) {
    Frequency k(dim, 0);
    k.at(axis) = j;
    return term(std::move(k), 1.0, 0.0);
  }

  std::size_t dim() const { return dim_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// Largest |k_i| over all stored terms and axes.
  int max_frequency() const {
    int top = 0;
    for (const auto& [k, c] : terms_)
      for (int ki : k) top = std::max(top, std::abs(ki));
    return top;
  }

  /// Accumulate c·cos(k·x) + s·sin(k·x), restoring canonical form.
  void add_term(Frequency k, double c, double s) {
    if (k.size() != dim_) throw DimensionError("TrigPoly: frequency vector has wrong dimension");
    if (!lex_nonnegative(k)) {
      for (int& ki : k) ki = -ki;
      s = -s;
    }
    if (is_zero_vector(k)) s = 0.0;
    if (c == 0.0 && s == 0.0) return;
    auto it = terms_.find(k);
    if (it == terms_.end()) {
      terms_.emplace(std::move(k), Coeff{c, s});
      return;
    }
    it->second.cos += c;
    it->second.sin += s;
    if (it->second.cos == 0.0 && it->second.sin == 0.0) terms_.erase(it);
  }

  double operator()(std::span<const double> x) const {
    if (x.size() != dim_) throw DimensionError("TrigPoly: evaluation point has wrong dimension");
    double acc = 0.0;
    for (const auto& [k, c] : terms_) {
      double phase = 0.0;
      for (std::size_t i = 0; i < dim_; ++i) phase += k[i] * x[i];
      acc += c.cos * std::cos(phase) + c.sin * std::sin(phase);
    }
    return acc;
  }

  /// Mean over the torus (the constant term).
  double mean() const {
    auto it = terms_.find(Frequency(dim_, 0));
    return it == terms_.end() ? 0.0 : it->second.cos;
  }

  TrigPoly without_mean() const {
    TrigPoly p = *this;
    p.terms_.erase(Frequency(dim_, 0));
    return p;
  }

  /// Exact partial derivative along one coordinate axis.
  TrigPoly derive(std::size_t axis) const {
    if (axis >= dim_) throw DimensionError("TrigPoly::derive: axis out of range");
    TrigPoly out(dim_);
    for (const auto& [k, c] : terms_) {
      const int ki = k[axis];
      if (ki == 0) continue;
      out.add_term(k, ki * c.sin, -ki * c.cos);
    }
    return out;
  }

  TrigPoly& operator+=(const TrigPoly& o) {
    check_dim(o);
    for (const auto& [k, c] : o.terms_) add_term(k, c.cos, c.sin);
    return *this;
  }

  TrigPoly& operator-=(const TrigPoly& o) {
    check_dim(o);
    for (const auto& [k, c] : o.terms_) add_term(k, -c.cos, -c.sin);
    return *this;
  }

  TrigPoly& operator*=(double a) {
    if (a == 0.0) {
      terms_.clear();
      return *this;
    }
    for (auto& [k, c] : terms_) {
      c.cos *= a;
      c.sin *= a;
    }
    return *this;
  }

  friend TrigPoly operator+(TrigPoly a, const TrigPoly& b) { return a += b; }
  friend TrigPoly operator-(TrigPoly a, const TrigPoly& b) { return a -= b; }
  friend TrigPoly operator-(TrigPoly a) { return a *= -1.0; }
  friend TrigPoly operator*(TrigPoly a, double s) { return a *= s; }
  friend TrigPoly operator*(double s, TrigPoly a) { return a *= s; }

  /// Product-to-sum expansion; exact up to floating-point rounding of the coefficients.
  friend TrigPoly operator*(const TrigPoly& a, const TrigPoly& b) {
    a.check_dim(b);
    TrigPoly out(a.dim_);
    Frequency sum(a.dim_), diff(a.dim_);
    for (const auto& [ka, ca] : a.terms_) {
      for (const auto& [kb, cb] : b.terms_) {
        for (std::size_t i = 0; i < a.dim_; ++i) {
          sum[i] = ka[i] + kb[i];
          diff[i] = ka[i] - kb[i];
        }
        // cos A cos B = ½[cos(A-B) + cos(A+B)]
        // sin A sin B = ½[cos(A-B) - cos(A+B)]
        // sin A cos B = ½[sin(A+B) + sin(A-B)]
        // cos A sin B = ½[sin(A+B) - sin(A-B)]
        const double cc = 0.5 * ca.cos * cb.cos;
        const double ss = 0.5 * ca.sin * cb.sin;
        const double sc = 0.5 * ca.sin * cb.cos;
        const double cs = 0.5 * ca.cos * cb.sin;
        out.add_term(diff, cc + ss, sc - cs);
        out.add_term(sum, cc - ss, sc + cs);
      }
    }
    return out;
  }

  friend bool operator==(const TrigPoly& a, const TrigPoly& b) {
    if (a.dim_ != b.dim_ || a.terms_.size() != b.terms_.size()) return false;
    auto ia = a.terms_.begin();
    auto ib = b.terms_.begin();
    for (; ia != a.terms_.end(); ++ia, ++ib) {
      if (ia->first != ib->first || ia->second.cos != ib->second.cos ||
          ia->second.sin != ib->second.sin)
        return false;
    }
    return true;
  }

  /// Largest coefficient magnitude of a - b; zero iff equal.
  friend double max_coeff_diff(const TrigPoly& a, const TrigPoly& b) {
    const TrigPoly d = a - b;
    double m = 0.0;
    for (const auto& [k, c] : d.terms_) m = std::max({m, std::abs(c.cos), std::abs(c.sin)});
    return m;
  }

  friend std::ostream& operator<<(std::ostream& os, const TrigPoly& p) {
    if (p.terms_.empty()) return os << "0";
    bool first = true;
    for (const auto& [k, c] : p.terms_) {
      std::string freq = "(";
      for (std::size_t i = 0; i < k.size(); ++i) freq += (i ? "," : "") + std::to_string(k[i]);
      freq += ")";
      if (c.cos != 0.0) {
        os << (first ? "" : " + ") << c.cos << "cos" << freq;
        first = false;
      }
      if (c.sin != 0.0) {
        os << (first ? "" : " + ") << c.sin << "sin" << freq;
        first = false;
      }
    }
    return os;
  }

 private:
  static bool lex_nonnegative(const Frequency& k) {
    for (int ki : k) {
      if (ki > 0) return true;
      if (ki < 0) return false;
    }
    return true;
  }
  static bool is_zero_vector(const Frequency& k) {
    for (int ki : k)
      if (ki != 0) return false;
    return true;
  }
  void check_dim(const TrigPoly& o) const {
    if (o.dim_ != dim_) throw DimensionError("TrigPoly: dimension mismatch");
  }

  std::size_t dim_ = 0;
  Terms terms_;
};

}  // namespace symlab
