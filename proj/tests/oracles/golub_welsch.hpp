#pragma once

// Golub-Welsch oracle: the support of the N-extremal measure of the problem
// truncated at N is the spectrum of the (N+1)x(N+1) Jacobi block with its
// last diagonal entry replaced by b_N + a_N tau, and the masses are the
// squared first eigenvector components.

#include <Eigen/Dense>

#include <vector>

#include "indet/jacobi.hpp"
#include "indet/zeros.hpp"

namespace oracle {

struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline Quadrature golub_welsch(const indet::JacobiCoefficients& src, const indet::ExtensionParam& t,
                               std::size_t N) {
  indet::TruncationPolicy ext;
  ext.precision = indet::Precision::extended;
  const indet::PolyEval at0 = indet::eval_pq_fixed(src, 0.0, N + 1, ext);
  const double pN = at0.p[N].real(), pN1 = at0.p[N + 1].real();
  const double qN = at0.q[N].real(), qN1 = at0.q[N + 1].real();
  const double den = t.is_infinite() ? pN : qN + t.value() * pN;
  const double num = t.is_infinite() ? pN1 : qN1 + t.value() * pN1;
  // den == 0: the polynomial is p_N itself (degree drops by one).
  const std::size_t dim = den == 0.0 ? N : N + 1;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const indet::Coeff c = src.coeffs(i);
    J(i, i) = c.b;
    if (i + 1 < dim) J(i, i + 1) = J(i + 1, i) = c.a;
  }
  if (den != 0.0) J(N, N) += src.coeffs(N).a * num / den;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  Quadrature out;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    out.nodes.push_back(es.eigenvalues()(k));
    const double v0 = es.eigenvectors()(0, k);
    out.weights.push_back(v0 * v0);
  }
  return out;
}

}  // namespace oracle
