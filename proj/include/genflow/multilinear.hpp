#pragma once

#include <Eigen/Dense>
#include <initializer_list>
#include <span>
#include <vector>

// Dense exterior algebra over R^n (n <= 8) together with the small linear
// solves (nullspace, one-parameter least squares) used by the other modules.
// All values are immutable after construction; every operation is pure.

namespace genflow {

using Endomorphism = Eigen::MatrixXd;
using LinearOperatorMatrix = Eigen::MatrixXd;

inline constexpr int kMaxDim = 8;

long binomial(int n, int k);

// Basis of strictly increasing k-tuples of {0,...,n-1}, lexicographic order.
struct TupleBasis {
  int n = 0;
  int k = 0;
  std::vector<std::vector<int>> tuples;
  // rank indexed by bitmask of the tuple; -1 where popcount != k
  std::vector<int> rank_of_mask;

  int rank_sorted(std::span<const int> sorted) const;
};

const TupleBasis& tuple_basis(int n, int k);

// Sorts idx increasingly in place; returns the permutation sign, or 0 if an
// index repeats.
int sort_sign(std::span<int> idx);

class KForm {
 public:
  KForm() = default;
  KForm(int dim, int degree);
  static KForm basis(int dim, std::initializer_list<int> indices);  // 0-based

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  const Eigen::VectorXd& comps() const { return comps_; }
  Eigen::VectorXd& comps() { return comps_; }

  // Evaluation on an arbitrary tuple: stored value times permutation sign,
  // exactly 0 on repeated indices.
  double eval(std::span<const int> indices) const;
  double eval(std::initializer_list<int> indices) const;
  // Sign-aware accumulation on an arbitrary tuple.
  void add(std::span<const int> indices, double value);
  void add(std::initializer_list<int> indices, double value);

  KForm& operator+=(const KForm& o);
  KForm& operator-=(const KForm& o);
  KForm& operator*=(double c);
  friend KForm operator+(KForm a, const KForm& b) { return a += b; }
  friend KForm operator-(KForm a, const KForm& b) { return a -= b; }
  friend KForm operator*(double c, KForm a) { return a *= c; }
  friend KForm operator*(KForm a, double c) { return a *= c; }

  double max_abs() const;

 private:
  int dim_ = 0;
  int degree_ = 0;
  Eigen::VectorXd comps_;
};

enum class InnerConvention { full, increasing };

// full = sum over all ordered index tuples = k! * increasing.
double form_inner(const KForm& a, const KForm& b, InnerConvention conv);

// (iota_X w)(Y1,...,Y_{k-1}) = w(X, Y1, ..., Y_{k-1}); degree >= 1 required.
KForm interior_product(const Eigen::VectorXd& X, const KForm& w);

// (rho(A)w)(x1,...,xk) = -sum_s w(x1,...,A x_s,...,xk).
KForm rho_action(const Endomorphism& A, const KForm& w);

// Orthonormal basis (columns) of the span of right-singular directions with
// singular value <= tol * (largest singular value, or 1 if M = 0).
Eigen::MatrixXd nullspace(const LinearOperatorMatrix& M, double tol = 1e-10);

struct ScalarFit {
  double lambda = 0.0;
  double residual = 0.0;
};

// Minimizes |v0 + lambda*v1|; if v1 = 0 returns lambda = 0, residual |v0|.
ScalarFit least_squares_scalar(const Eigen::VectorXd& v0,
                               const Eigen::VectorXd& v1);

}  // namespace genflow
