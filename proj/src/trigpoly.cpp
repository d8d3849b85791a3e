#include "resonance/trigpoly.hpp"

#include <cmath>
#include <string>

#include "resonance/errors.hpp"

namespace resonance {

namespace {

constexpr double kTruncationTol = 1e-12;
constexpr double kModeDropTol = 1e-8;

}  // namespace

Poly poly_add(const Poly& a, const Poly& b) {
  Poly out = Poly::Zero(std::max(a.size(), b.size()));
  out.head(a.size()) += a;
  out.head(b.size()) += b;
  return out;
}

Poly poly_multiply(const Poly& a, const Poly& b) {
  if (a.size() == 0 || b.size() == 0) return Poly();
  Poly out = Poly::Zero(a.size() + b.size() - 1);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) == Complex(0.0)) continue;
    out.segment(i, b.size()) += a(i) * b;
  }
  return out;
}

Complex poly_eval(const Poly& p, double x) {
  Complex v = 0.0;
  for (Eigen::Index i = p.size() - 1; i >= 0; --i) v = v * x + p(i);
  return v;
}

TrigPoly::TrigPoly(int varkappa) : varkappa_(varkappa) {
  if (varkappa < 1) throw DomainError("varkappa must be a positive integer");
}

TrigPoly TrigPoly::constant(double c, int varkappa) { return monomial(c, 0, varkappa); }

TrigPoly TrigPoly::monomial(double c, int degree, int varkappa) {
  TrigPoly t(varkappa);
  Poly p = Poly::Zero(degree + 1);
  p(degree) = c;
  t.add_to_mode(0, 0, p);
  return t;
}

TrigPoly TrigPoly::real_mode(int j, int l, Complex c, int degree, int varkappa) {
  TrigPoly t(varkappa);
  Poly p = Poly::Zero(degree + 1);
  if (j == 0 && l == 0) {
    p(degree) = 2.0 * c.real();
    t.add_to_mode(0, 0, p);
    return t;
  }
  p(degree) = c;
  t.add_to_mode(j, l, p);
  p(degree) = std::conj(c);
  t.add_to_mode(-j, -l, p);
  return t;
}

Poly TrigPoly::trim(const Poly& p) {
  Eigen::Index n = p.size();
  while (n > 0 && p(n - 1) == Complex(0.0)) --n;
  return p.head(n);
}

void TrigPoly::add_to_mode(int j, int l, const Poly& p) {
  if (p.size() == 0) return;
  const Poly q = trim(p);
  if (q.size() == 0) return;
  const double scale = q.cwiseAbs().maxCoeff();
  if (std::abs(j) > kMaxJ || std::abs(l) > kMaxSFrequency * varkappa_) {
    if (scale > kModeDropTol) {
      throw TruncationError("trigonometric mode (" + std::to_string(j) + ", " + std::to_string(l) +
                            ") exceeds the configured cap");
    }
    return;
  }
  if (q.size() > kMaxDegree + 1) {
    if (q.tail(q.size() - kMaxDegree - 1).cwiseAbs().maxCoeff() > kTruncationTol) {
      throw TruncationError("polynomial degree in R exceeds the configured cap");
    }
  }
  const Poly head = q.head(std::min<Eigen::Index>(q.size(), kMaxDegree + 1));
  auto it = modes_.find({j, l});
  if (it == modes_.end()) {
    modes_.emplace(Key{j, l}, head);
  } else {
    it->second = poly_add(it->second, head);
  }
}

Poly TrigPoly::coefficient(int j, int l) const {
  auto it = modes_.find({j, l});
  return it == modes_.end() ? Poly() : it->second;
}

int TrigPoly::degree() const {
  int d = -1;
  for (const auto& [key, p] : modes_) {
    for (Eigen::Index i = p.size() - 1; i >= 0; --i) {
      if (p(i) != Complex(0.0)) {
        d = std::max(d, static_cast<int>(i));
        break;
      }
    }
  }
  return d;
}

Complex TrigPoly::evaluate_complex(double R, double Psi, double S) const {
  Complex v = 0.0;
  const double sf = S / varkappa_;
  for (const auto& [key, p] : modes_) {
    const double arg = key.first * Psi + key.second * sf;
    v += poly_eval(p, R) * Complex(std::cos(arg), std::sin(arg));
  }
  return v;
}

double TrigPoly::evaluate(double R, double Psi, double S) const { return evaluate_complex(R, Psi, S).real(); }

TrigPoly TrigPoly::d_R() const {
  TrigPoly out(varkappa_);
  for (const auto& [key, p] : modes_) {
    if (p.size() < 2) continue;
    Poly d(p.size() - 1);
    for (Eigen::Index i = 1; i < p.size(); ++i) d(i - 1) = static_cast<double>(i) * p(i);
    out.add_to_mode(key.first, key.second, d);
  }
  return out;
}

TrigPoly TrigPoly::d_Psi() const {
  TrigPoly out(varkappa_);
  for (const auto& [key, p] : modes_) {
    if (key.first == 0) continue;
    out.add_to_mode(key.first, key.second, Complex(0.0, key.first) * p);
  }
  return out;
}

TrigPoly TrigPoly::d_S() const {
  TrigPoly out(varkappa_);
  for (const auto& [key, p] : modes_) {
    if (key.second == 0) continue;
    out.add_to_mode(key.first, key.second, Complex(0.0, static_cast<double>(key.second) / varkappa_) * p);
  }
  return out;
}

TrigPoly TrigPoly::average_S() const {
  TrigPoly out(varkappa_);
  for (const auto& [key, p] : modes_) {
    if (key.second == 0) out.add_to_mode(key.first, 0, p);
  }
  return out;
}

TrigPoly TrigPoly::solve_homological(double s0, double tol) const {
  if (s0 == 0.0) throw SolvabilityError("homological equation needs s0 != 0");
  TrigPoly out(varkappa_);
  for (const auto& [key, p] : modes_) {
    if (key.second == 0) {
      if (p.cwiseAbs().maxCoeff() > tol) {
        throw SolvabilityError("right-hand side has a non-zero S-average in mode j=" + std::to_string(key.first));
      }
      continue;
    }
    const Complex factor(0.0, s0 * static_cast<double>(key.second) / varkappa_);
    out.add_to_mode(key.first, key.second, p / factor);
  }
  return out;
}

TrigPoly TrigPoly::set_R(double R) const {
  TrigPoly out(varkappa_);
  for (const auto& [key, p] : modes_) {
    Poly c(1);
    c(0) = poly_eval(p, R);
    out.add_to_mode(key.first, key.second, c);
  }
  return out;
}

TrigPoly TrigPoly::resonant_substitute(int kappa, int varkappa) const {
  if (varkappa_ != 1) throw DomainError("resonant substitution expects modes in (phi, S)");
  TrigPoly out(varkappa);
  for (const auto& [key, p] : modes_) {
    out.add_to_mode(key.first, key.first * kappa + key.second * varkappa, p);
  }
  return out;
}

void TrigPoly::prune(double tol) {
  for (auto it = modes_.begin(); it != modes_.end();) {
    Poly& p = it->second;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      if (std::abs(p(i)) <= tol) p(i) = 0.0;
    }
    p = trim(p);
    it = p.size() == 0 ? modes_.erase(it) : std::next(it);
  }
}

double TrigPoly::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& [key, p] : modes_) {
    if (p.size() > 0) m = std::max(m, p.cwiseAbs().maxCoeff());
  }
  return m;
}

void TrigPoly::check_compatible(const TrigPoly& o) const {
  if (o.varkappa_ != varkappa_) throw DomainError("trigonometric polynomials with different varkappa");
}

TrigPoly& TrigPoly::operator+=(const TrigPoly& o) {
  check_compatible(o);
  for (const auto& [key, p] : o.modes_) add_to_mode(key.first, key.second, p);
  return *this;
}

TrigPoly& TrigPoly::operator-=(const TrigPoly& o) {
  check_compatible(o);
  for (const auto& [key, p] : o.modes_) add_to_mode(key.first, key.second, -p);
  return *this;
}

TrigPoly& TrigPoly::operator*=(double c) {
  if (c == 0.0) {
    modes_.clear();
    return *this;
  }
  for (auto& [key, p] : modes_) p *= c;
  return *this;
}

TrigPoly TrigPoly::operator-() const {
  TrigPoly out = *this;
  return out *= -1.0;
}

TrigPoly operator*(const TrigPoly& a, const TrigPoly& b) {
  a.check_compatible(b);
  TrigPoly out(a.varkappa_);
  for (const auto& [ka, pa] : a.modes_) {
    for (const auto& [kb, pb] : b.modes_) {
      out.add_to_mode(ka.first + kb.first, ka.second + kb.second, poly_multiply(pa, pb));
    }
  }
  return out;
}

}  // namespace resonance
