#pragma once

#include <vector>

#include "genflow/multilinear.hpp"

// Metric Lie algebra computations in a fixed orthonormal basis: Jacobi test,
// structure classification, Killing form, mean curvature, moment map, Ricci
// endomorphism and derivation algebra.

namespace genflow {

class LieBracket {
 public:
  LieBracket() = default;
  explicit LieBracket(int dim);

  int dim() const { return dim_; }

  // Column r holds mu(e_i, e_j) for the r-th increasing pair (i, j).
  const Eigen::MatrixXd& table() const { return table_; }
  Eigen::MatrixXd& table() { return table_; }

  Eigen::VectorXd bracket(int i, int j) const;  // sign-aware in (i, j)
  Eigen::VectorXd eval(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
  double comp(int i, int j, int k) const;    // <mu(e_i,e_j), e_k>
  void set_entry(int i, int j, int k, double v);  // accumulates, sign-aware

  Eigen::MatrixXd ad(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd ad_basis(int i) const;

  double inner_full(const LieBracket& other) const;  // sum over all i,j,k
  double norm2_full() const { return inner_full(*this); }
  double max_abs() const;

  LieBracket& operator+=(const LieBracket& o);
  LieBracket& operator-=(const LieBracket& o);
  LieBracket& operator*=(double c);
  friend LieBracket operator+(LieBracket a, const LieBracket& b) { return a += b; }
  friend LieBracket operator-(LieBracket a, const LieBracket& b) { return a -= b; }
  friend LieBracket operator*(double c, LieBracket a) { return a *= c; }

 private:
  int dim_ = 0;
  Eigen::MatrixXd table_;  // n x binomial(n, 2)
};

struct AlgebraReport {
  bool is_lie = false;
  bool is_nilpotent = false;
  bool is_solvable = false;
  bool is_unimodular = false;
  double jacobi_residual = 0.0;
  int lower_central_length = 0;  // nilpotency step; 0 when not nilpotent
};

// Vector-valued 3-form J(x,y,z) = mu(mu(x,y),z) + mu(mu(y,z),x) + mu(mu(z,x),y),
// stored as an n x binomial(n,3) table over increasing triples.
Eigen::MatrixXd jacobiator(const LieBracket& mu);
double jacobi_residual(const LieBracket& mu);  // max |component|
bool is_lie(const LieBracket& mu, double tol);

AlgebraReport structure_report(const LieBracket& mu, double tol = 1e-10);

Endomorphism killing_endo(const LieBracket& mu);
Eigen::VectorXd mean_curvature(const LieBracket& mu);

// theta(A)mu (x,y) = A mu(x,y) - mu(Ax,y) - mu(x,Ay).
LieBracket theta_action(const Endomorphism& A, const LieBracket& mu);

// Unique symmetric M with tr(M A^T) = 1/4 <theta(A)mu, mu>_full for all A.
Endomorphism moment_map_mu(const LieBracket& mu);

// Ric_mu = M_mu - 1/2 B - 1/2 (ad_U + ad_U^T).
Endomorphism ricci(const LieBracket& mu);
double scalar_curvature(const LieBracket& mu);

// Basis of Der(mu) = ker(A -> theta(A)mu).
std::vector<Endomorphism> derivation_algebra(const LieBracket& mu,
                                             double tol = 1e-10);

// Matrix of A -> theta(A)mu in flattened coordinates (used for kernels).
LinearOperatorMatrix theta_matrix(const LieBracket& mu);

}  // namespace genflow
