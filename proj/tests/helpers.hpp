#pragma once

// Deterministic random fixtures shared by the test suites. Every generator
// takes the engine by reference so a test controls its own seed.

#include <Eigen/Dense>
#include <random>

#include "genflow/catalog.hpp"
#include "genflow/courant.hpp"
#include "genflow/flow.hpp"
#include "genflow/liealg.hpp"
#include "genflow/soliton.hpp"

namespace testutil {

using namespace genflow;

inline Eigen::VectorXd random_vector(int n, std::mt19937& g) {
  std::normal_distribution<double> dist;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = dist(g);
  return v;
}

inline Endomorphism random_matrix(int rows, int cols, std::mt19937& g) {
  std::normal_distribution<double> dist;
  Endomorphism m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = dist(g);
  return m;
}

// Two-step nilpotent bracket: the first m basis vectors generate, the rest
// span a central ideal, and mu(V, V) lands in the center. Jacobi holds
// because every iterated bracket hits the center and dies.
inline LieBracket random_two_step(int n, int m, std::mt19937& g) {
  LieBracket mu(n);
  std::normal_distribution<double> dist;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      for (int k = m; k < n; ++k) mu.set_entry(i, j, k, dist(g));
  return mu;
}

// Almost-abelian solvable bracket: an abelian ideal spanned by e_1..e_{n-1}
// acted on by ad_{e_n} = A.
inline LieBracket random_almost_abelian(int n, std::mt19937& g) {
  LieBracket mu(n);
  Endomorphism A = random_matrix(n - 1, n - 1, g);
  for (int i = 0; i < n - 1; ++i)
    for (int k = 0; k < n - 1; ++k)
      if (A(k, i) != 0.0) mu.set_entry(i, n - 1, k, -A(k, i));
  return mu;
}

inline Endomorphism random_near_identity(int n, double eps, std::mt19937& g) {
  return Endomorphism::Identity(n, n) + eps * random_matrix(n, n, g);
}

// mu_g(x, y) = g mu(g^{-1} x, g^{-1} y); preserves Jacobi exactly up to
// roundoff and produces dense structure constants.
inline LieBracket conjugate(const LieBracket& mu, const Endomorphism& g) {
  const int n = mu.dim();
  Endomorphism ginv = g.inverse();
  LieBracket out(n);
  const TupleBasis& tb = tuple_basis(n, 2);
  for (std::size_t r = 0; r < tb.tuples.size(); ++r) {
    int i = tb.tuples[r][0], j = tb.tuples[r][1];
    out.table().col(long(r)) = g * mu.eval(ginv.col(i), ginv.col(j));
  }
  return out;
}

// Random element of ker d restricted to 3-forms (H = 0 when the kernel is
// trivial), rescaled to max-abs ~ 1.
inline KForm random_closed_3form(const LieBracket& mu, std::mt19937& g) {
  const int n = mu.dim();
  KForm H(n, 3);
  Eigen::MatrixXd null = nullspace(d_matrix(mu, 3), 1e-12);
  if (null.cols() == 0) return H;
  H.comps() = null * random_vector(int(null.cols()), g);
  double m = H.max_abs();
  if (m > 0) H *= 1.0 / m;
  return H;
}

// Random harmonic 3-form: simultaneous kernel of d and d*.
inline KForm random_harmonic_3form(const LieBracket& mu, std::mt19937& g) {
  const int n = mu.dim();
  KForm H(n, 3);
  LinearOperatorMatrix d3 = d_matrix(mu, 3);
  LinearOperatorMatrix d2t = d_matrix(mu, 2).transpose();
  LinearOperatorMatrix stacked(d3.rows() + d2t.rows(), d3.cols());
  stacked.topRows(d3.rows()) = d3;
  stacked.bottomRows(d2t.rows()) = d2t;
  Eigen::MatrixXd null = nullspace(stacked, 1e-12);
  if (null.cols() == 0) return H;
  H.comps() = null * random_vector(int(null.cols()), g);
  double m = H.max_abs();
  if (m > 0) H *= 1.0 / m;
  return H;
}

// A generic valid Dorfman bracket: random nilpotent or solvable mu (optionally
// conjugated by a near-identity transformation) with a random closed H.
inline DorfmanBracket random_dorfman(int n, bool nilpotent, bool conjugated,
                                     std::mt19937& g) {
  LieBracket mu = nilpotent ? random_two_step(n, n - 1, g)
                            : random_almost_abelian(n, g);
  if (conjugated) mu = conjugate(mu, random_near_identity(n, 0.1, g));
  KForm H = random_closed_3form(mu, g);
  return DorfmanBracket::checked(std::move(mu), std::move(H), 1e-7);
}

}  // namespace testutil
