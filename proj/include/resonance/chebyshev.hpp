#pragma once

#include <Eigen/Dense>
#include <functional>

namespace resonance {

// Taylor coefficients f^{(q)}(x0)/q!, q = 0..q_max, of a vector-valued function from
// a Chebyshev interpolant on [x0 - delta, x0 + delta]. Row q holds order q.
Eigen::MatrixXd chebyshev_taylor(const std::function<Eigen::VectorXd(double)>& f, double x0, double delta,
                                 int q_max, int nodes = 24);

// Nodes x0 + delta cos(pi (i + 1/2) / n), i = 0..n-1.
Eigen::VectorXd chebyshev_nodes(double x0, double delta, int nodes);
// Derivative of the interpolant, as a map between values at the nodes.
Eigen::MatrixXd chebyshev_diff_matrix(double delta, int nodes);
// Same as chebyshev_taylor from values already sampled at chebyshev_nodes (one row per node).
Eigen::MatrixXd chebyshev_taylor_from_values(const Eigen::MatrixXd& values, double delta, int q_max);

double chebyshev_taylor_scalar(const std::function<double(double)>& f, double x0, double delta, int q);

}  // namespace resonance
