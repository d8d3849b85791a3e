#include "resonance/chebyshev.hpp"

#include <cmath>
#include <numbers>

#include "resonance/errors.hpp"

namespace resonance {

Eigen::VectorXd chebyshev_nodes(double x0, double delta, int nodes) {
  Eigen::VectorXd x(nodes);
  for (int i = 0; i < nodes; ++i) x(i) = x0 + delta * std::cos(std::numbers::pi * (i + 0.5) / nodes);
  return x;
}

namespace {

// values at the nodes -> coefficients of sum_k c_k T_k
Eigen::MatrixXd values_to_coeffs(int n) {
  Eigen::MatrixXd basis(n, n);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) basis(k, i) = std::cos(std::numbers::pi * k * (i + 0.5) / n) * 2.0 / n;
  }
  basis.row(0) *= 0.5;
  return basis;
}

}  // namespace

Eigen::MatrixXd chebyshev_diff_matrix(double delta, int nodes) {
  const int n = nodes;
  Eigen::MatrixXd dc = Eigen::MatrixXd::Zero(n, n);
  for (int col = 0; col < n; ++col) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
    c(col) = 1.0;
    Eigen::VectorXd d = Eigen::VectorXd::Zero(n + 1);
    for (int k = n - 2; k >= 0; --k) d(k) = d(k + 2) + 2.0 * (k + 1) * c(k + 1);
    d(0) *= 0.5;
    dc.col(col) = d.head(n);
  }
  Eigen::MatrixXd T(n, n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) T(i, k) = std::cos(std::numbers::pi * k * (i + 0.5) / n);
  }
  return T * dc * values_to_coeffs(n) / delta;
}

Eigen::MatrixXd chebyshev_taylor_from_values(const Eigen::MatrixXd& values, double delta, int q_max) {
  const int n = static_cast<int>(values.rows());
  if (!(delta > 0.0) || q_max < 0 || n <= q_max) throw DomainError("invalid Chebyshev-Taylor request");
  const Eigen::MatrixXd coeffs = values_to_coeffs(n) * values;

  // monomial content [x^q] T_k
  Eigen::MatrixXd mono = Eigen::MatrixXd::Zero(n, q_max + 1);
  Eigen::VectorXd tkm1 = Eigen::VectorXd::Zero(n + 1), tk = Eigen::VectorXd::Zero(n + 1);
  tkm1(0) = 1.0;
  tk(1) = 1.0;
  for (int k = 0; k < n; ++k) {
    const Eigen::VectorXd& cur = k == 0 ? tkm1 : tk;
    for (int q = 0; q <= q_max; ++q) mono(k, q) = cur(q);
    if (k >= 1) {
      Eigen::VectorXd next = -tkm1;
      next.tail(n) += 2.0 * tk.head(n);
      tkm1 = tk;
      tk = next;
    }
  }

  Eigen::MatrixXd taylor = mono.transpose() * coeffs;
  double scale = 1.0;
  for (int q = 0; q <= q_max; ++q) {
    taylor.row(q) /= scale;
    scale *= delta;
  }
  return taylor;
}

Eigen::MatrixXd chebyshev_taylor(const std::function<Eigen::VectorXd(double)>& f, double x0, double delta,
                                 int q_max, int nodes) {
  if (!(delta > 0.0) || q_max < 0 || nodes <= q_max) throw DomainError("invalid Chebyshev-Taylor request");
  const Eigen::VectorXd x = chebyshev_nodes(x0, delta, nodes);
  Eigen::MatrixXd values;
  for (int i = 0; i < nodes; ++i) {
    const Eigen::VectorXd v = f(x(i));
    if (i == 0) values.resize(nodes, v.size());
    values.row(i) = v.transpose();
  }
  return chebyshev_taylor_from_values(values, delta, q_max);
}

double chebyshev_taylor_scalar(const std::function<double(double)>& f, double x0, double delta, int q) {
  auto g = [&f](double x) {
    Eigen::VectorXd v(1);
    v(0) = f(x);
    return v;
  };
  return chebyshev_taylor(g, x0, delta, q)(q, 0);
}

}  // namespace resonance
