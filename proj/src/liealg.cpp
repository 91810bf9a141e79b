#include "genflow/liealg.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace genflow {

LieBracket::LieBracket(int dim) : dim_(dim) {
  if (dim < 0 || dim > kMaxDim)
    throw std::invalid_argument("LieBracket: bad dim");
  table_ = Eigen::MatrixXd::Zero(dim, binomial(dim, 2));
}

Eigen::VectorXd LieBracket::bracket(int i, int j) const {
  if (i == j) return Eigen::VectorXd::Zero(dim_);
  int a = i, b = j;
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  int pair[2] = {a, b};
  int r = tuple_basis(dim_, 2).rank_sorted(pair);
  return sign * table_.col(r);
}

Eigen::VectorXd LieBracket::eval(const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& y) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim_);
  const TupleBasis& tb = tuple_basis(dim_, 2);
  for (std::size_t r = 0; r < tb.tuples.size(); ++r) {
    int i = tb.tuples[r][0], j = tb.tuples[r][1];
    out += (x[i] * y[j] - x[j] * y[i]) * table_.col(int(r));
  }
  return out;
}

double LieBracket::comp(int i, int j, int k) const { return bracket(i, j)[k]; }

void LieBracket::set_entry(int i, int j, int k, double v) {
  if (i == j) {
    if (v != 0.0) throw std::invalid_argument("LieBracket: mu(e_i,e_i) != 0");
    return;
  }
  int a = i, b = j;
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  int pair[2] = {a, b};
  int r = tuple_basis(dim_, 2).rank_sorted(pair);
  if (r < 0 || k < 0 || k >= dim_)
    throw std::out_of_range("LieBracket: index out of range");
  table_(k, r) += sign * v;
}

Eigen::MatrixXd LieBracket::ad(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd m(dim_, dim_);
  for (int j = 0; j < dim_; ++j)
    m.col(j) = eval(x, Eigen::VectorXd::Unit(dim_, j));
  return m;
}

Eigen::MatrixXd LieBracket::ad_basis(int i) const {
  Eigen::MatrixXd m(dim_, dim_);
  for (int j = 0; j < dim_; ++j) m.col(j) = bracket(i, j);
  return m;
}

double LieBracket::inner_full(const LieBracket& other) const {
  if (dim_ != other.dim_) throw std::invalid_argument("LieBracket: dim mismatch");
  return 2.0 * (table_.array() * other.table_.array()).sum();
}

double LieBracket::max_abs() const {
  return table_.size() == 0 ? 0.0 : table_.cwiseAbs().maxCoeff();
}

LieBracket& LieBracket::operator+=(const LieBracket& o) {
  if (dim_ != o.dim_) throw std::invalid_argument("LieBracket: dim mismatch");
  table_ += o.table_;
  return *this;
}

LieBracket& LieBracket::operator-=(const LieBracket& o) {
  if (dim_ != o.dim_) throw std::invalid_argument("LieBracket: dim mismatch");
  table_ -= o.table_;
  return *this;
}

LieBracket& LieBracket::operator*=(double c) {
  table_ *= c;
  return *this;
}

Eigen::MatrixXd jacobiator(const LieBracket& mu) {
  const int n = mu.dim();
  const TupleBasis& tb = tuple_basis(n, 3);
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, long(tb.tuples.size()));
  for (std::size_t r = 0; r < tb.tuples.size(); ++r) {
    int x = tb.tuples[r][0], y = tb.tuples[r][1], z = tb.tuples[r][2];
    Eigen::VectorXd v = mu.eval(mu.bracket(x, y), Eigen::VectorXd::Unit(n, z)) +
                        mu.eval(mu.bracket(y, z), Eigen::VectorXd::Unit(n, x)) +
                        mu.eval(mu.bracket(z, x), Eigen::VectorXd::Unit(n, y));
    J.col(int(r)) = v;
  }
  return J;
}

double jacobi_residual(const LieBracket& mu) {
  Eigen::MatrixXd J = jacobiator(mu);
  return J.size() == 0 ? 0.0 : J.cwiseAbs().maxCoeff();
}

bool is_lie(const LieBracket& mu, double tol) {
  return jacobi_residual(mu) <= tol;
}

namespace {

// Orthonormal basis of span{ mu(v, w) : v in V, w in W } (columns).
Eigen::MatrixXd bracket_span(const LieBracket& mu, const Eigen::MatrixXd& V,
                             const Eigen::MatrixXd& W, double tol) {
  const int n = mu.dim();
  if (V.cols() == 0 || W.cols() == 0) return Eigen::MatrixXd(n, 0);
  Eigen::MatrixXd gen(n, V.cols() * W.cols());
  for (int a = 0; a < V.cols(); ++a)
    for (int b = 0; b < W.cols(); ++b)
      gen.col(a * W.cols() + b) = mu.eval(V.col(a), W.col(b));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(gen, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  double smax = sv.size() > 0 ? sv[0] : 0.0;
  double thresh = tol * (smax > 0.0 ? smax : 1.0);
  // Decide rank relative to the overall bracket scale so that a series that
  // has genuinely died is not resurrected by roundoff.
  double scale = std::max(mu.max_abs(), 1.0);
  thresh = std::max(thresh, tol * scale);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > thresh) ++rank;
  return svd.matrixU().leftCols(rank);
}

}  // namespace

AlgebraReport structure_report(const LieBracket& mu, double tol) {
  AlgebraReport rep;
  const int n = mu.dim();
  rep.jacobi_residual = jacobi_residual(mu);
  rep.is_lie = rep.jacobi_residual <= tol * std::max(1.0, mu.norm2_full());

  Eigen::MatrixXd g = Eigen::MatrixXd::Identity(n, n);

  // Lower central series: g^{m+1} = [g, g^m].
  Eigen::MatrixXd lcs = bracket_span(mu, g, g, tol);
  int steps = 1;
  while (lcs.cols() > 0 && steps <= n + 1) {
    Eigen::MatrixXd next = bracket_span(mu, g, lcs, tol);
    if (next.cols() >= lcs.cols()) break;  // stabilized nonzero
    lcs = next;
    ++steps;
  }
  rep.is_nilpotent = lcs.cols() == 0;
  rep.lower_central_length = rep.is_nilpotent ? steps : 0;

  // Derived series.
  Eigen::MatrixXd der = bracket_span(mu, g, g, tol);
  for (int it = 0; it <= n && der.cols() > 0; ++it) {
    Eigen::MatrixXd next = bracket_span(mu, der, der, tol);
    if (next.cols() >= der.cols()) break;
    der = next;
  }
  rep.is_solvable = der.cols() == 0;

  double trace_scale = std::max(1.0, mu.max_abs());
  rep.is_unimodular = true;
  for (int i = 0; i < n; ++i)
    if (std::abs(mu.ad_basis(i).trace()) > tol * trace_scale)
      rep.is_unimodular = false;
  return rep;
}

Endomorphism killing_endo(const LieBracket& mu) {
  const int n = mu.dim();
  std::vector<Eigen::MatrixXd> ads(n);
  for (int i = 0; i < n; ++i) ads[i] = mu.ad_basis(i);
  Endomorphism B(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) B(i, j) = (ads[i] * ads[j]).trace();
  return B;
}

Eigen::VectorXd mean_curvature(const LieBracket& mu) {
  const int n = mu.dim();
  Eigen::VectorXd u(n);
  for (int i = 0; i < n; ++i) u[i] = mu.ad_basis(i).trace();
  return u;
}

LieBracket theta_action(const Endomorphism& A, const LieBracket& mu) {
  const int n = mu.dim();
  if (A.rows() != n || A.cols() != n)
    throw std::invalid_argument("theta_action: dim mismatch");
  LieBracket out(n);
  const TupleBasis& tb = tuple_basis(n, 2);
  for (std::size_t r = 0; r < tb.tuples.size(); ++r) {
    int i = tb.tuples[r][0], j = tb.tuples[r][1];
    Eigen::VectorXd v = A * mu.bracket(i, j);
    for (int m = 0; m < n; ++m) {
      if (A(m, i) != 0.0) v -= A(m, i) * mu.bracket(m, j);
      if (A(m, j) != 0.0) v -= A(m, j) * mu.bracket(i, m);
    }
    out.table().col(int(r)) = v;
  }
  return out;
}

Endomorphism moment_map_mu(const LieBracket& mu) {
  const int n = mu.dim();
  Endomorphism T = Endomorphism::Zero(n, n);
  Endomorphism S = Endomorphism::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      Eigen::VectorXd bij = mu.bracket(i, j);
      S += bij * bij.transpose();
    }
  }
  for (int k = 0; k < n; ++k) {
    Eigen::MatrixXd adk = mu.ad_basis(k);
    for (int l = 0; l <= k; ++l) {
      double t = (adk.array() * mu.ad_basis(l).array()).sum();
      T(k, l) = t;
      T(l, k) = t;
    }
  }
  return -0.5 * T + 0.25 * S;
}

Endomorphism ricci(const LieBracket& mu) {
  Endomorphism B = killing_endo(mu);
  Eigen::MatrixXd adU = mu.ad(mean_curvature(mu));
  return moment_map_mu(mu) - 0.5 * B - 0.5 * (adU + adU.transpose());
}

double scalar_curvature(const LieBracket& mu) { return ricci(mu).trace(); }

LinearOperatorMatrix theta_matrix(const LieBracket& mu) {
  const int n = mu.dim();
  const long cols = long(n) * n;
  const long rows = n * binomial(n, 2);
  LinearOperatorMatrix M(rows, cols);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      Endomorphism E = Endomorphism::Zero(n, n);
      E(a, b) = 1.0;
      LieBracket th = theta_action(E, mu);
      M.col(long(b) * n + a) =
          Eigen::Map<const Eigen::VectorXd>(th.table().data(), rows);
    }
  }
  return M;
}

std::vector<Endomorphism> derivation_algebra(const LieBracket& mu, double tol) {
  const int n = mu.dim();
  Eigen::MatrixXd basis = nullspace(theta_matrix(mu), tol);
  std::vector<Endomorphism> out;
  out.reserve(basis.cols());
  for (int c = 0; c < basis.cols(); ++c)
    out.push_back(Eigen::Map<const Eigen::MatrixXd>(basis.col(c).data(), n, n));
  return out;
}

}  // namespace genflow
