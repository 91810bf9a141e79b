#include "genflow/multilinear.hpp"

#include <Eigen/SVD>
#include <map>
#include <mutex>
#include <stdexcept>

namespace genflow {

long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

int TupleBasis::rank_sorted(std::span<const int> sorted) const {
  unsigned mask = 0;
  for (int i : sorted) {
    if (i < 0 || i >= n) return -1;
    mask |= 1u << i;
  }
  return rank_of_mask[mask];
}

const TupleBasis& tuple_basis(int n, int k) {
  if (n < 0 || n > kMaxDim || k < 0 || k > 63)
    throw std::invalid_argument("tuple_basis: bad (n, k)");
  static std::mutex mu;
  static std::map<int, TupleBasis> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto [it, inserted] = cache.try_emplace(n * 64 + k);
  TupleBasis& tb = it->second;
  if (inserted) {
    tb.n = n;
    tb.k = k;
    tb.rank_of_mask.assign(std::size_t(1) << n, -1);
    if (k > n) return tb;  // Lambda^k vanishes: empty basis
    std::vector<int> t(k);
    for (int i = 0; i < k; ++i) t[i] = i;
    while (true) {
      unsigned mask = 0;
      for (int i : t) mask |= 1u << i;
      tb.rank_of_mask[mask] = int(tb.tuples.size());
      tb.tuples.push_back(t);
      int p = k - 1;
      while (p >= 0 && t[p] == n - k + p) --p;
      if (p < 0) break;
      ++t[p];
      for (int q = p + 1; q < k; ++q) t[q] = t[q - 1] + 1;
    }
  }
  return tb;
}

int sort_sign(std::span<int> idx) {
  int sign = 1;
  for (std::size_t i = 1; i < idx.size(); ++i) {
    int v = idx[i];
    std::size_t j = i;
    while (j > 0 && idx[j - 1] > v) {
      idx[j] = idx[j - 1];
      --j;
      sign = -sign;
    }
    idx[j] = v;
  }
  for (std::size_t i = 1; i < idx.size(); ++i)
    if (idx[i] == idx[i - 1]) return 0;
  return sign;
}

KForm::KForm(int dim, int degree) : dim_(dim), degree_(degree) {
  // degree > dim is legal: Lambda^k vanishes and the form has no components.
  if (dim < 0 || dim > kMaxDim || degree < 0 || degree > 63)
    throw std::invalid_argument("KForm: bad (dim, degree)");
  comps_ = Eigen::VectorXd::Zero(binomial(dim, degree));
}

KForm KForm::basis(int dim, std::initializer_list<int> indices) {
  KForm w(dim, int(indices.size()));
  w.add(indices, 1.0);
  return w;
}

double KForm::eval(std::span<const int> indices) const {
  if (int(indices.size()) != degree_)
    throw std::invalid_argument("KForm::eval: wrong arity");
  if (degree_ > dim_) return 0.0;
  int buf[kMaxDim];
  for (std::size_t i = 0; i < indices.size(); ++i) buf[i] = indices[i];
  std::span<int> s(buf, indices.size());
  int sign = sort_sign(s);
  if (sign == 0) return 0.0;
  int r = tuple_basis(dim_, degree_).rank_sorted(s);
  if (r < 0) throw std::out_of_range("KForm::eval: index out of range");
  return sign * comps_[r];
}

double KForm::eval(std::initializer_list<int> indices) const {
  return eval(std::span<const int>(indices.begin(), indices.size()));
}

void KForm::add(std::span<const int> indices, double value) {
  if (int(indices.size()) != degree_)
    throw std::invalid_argument("KForm::add: wrong arity");
  if (degree_ > dim_) return;  // alternation kills every such entry
  int buf[kMaxDim];
  for (std::size_t i = 0; i < indices.size(); ++i) buf[i] = indices[i];
  std::span<int> s(buf, indices.size());
  int sign = sort_sign(s);
  if (sign == 0) return;
  int r = tuple_basis(dim_, degree_).rank_sorted(s);
  if (r < 0) throw std::out_of_range("KForm::add: index out of range");
  comps_[r] += sign * value;
}

void KForm::add(std::initializer_list<int> indices, double value) {
  add(std::span<const int>(indices.begin(), indices.size()), value);
}

KForm& KForm::operator+=(const KForm& o) {
  if (dim_ != o.dim_ || degree_ != o.degree_)
    throw std::invalid_argument("KForm: shape mismatch");
  comps_ += o.comps_;
  return *this;
}

KForm& KForm::operator-=(const KForm& o) {
  if (dim_ != o.dim_ || degree_ != o.degree_)
    throw std::invalid_argument("KForm: shape mismatch");
  comps_ -= o.comps_;
  return *this;
}

KForm& KForm::operator*=(double c) {
  comps_ *= c;
  return *this;
}

double KForm::max_abs() const {
  return comps_.size() == 0 ? 0.0 : comps_.cwiseAbs().maxCoeff();
}

double form_inner(const KForm& a, const KForm& b, InnerConvention conv) {
  if (a.dim() != b.dim() || a.degree() != b.degree())
    throw std::invalid_argument("form_inner: shape mismatch");
  double inc = a.comps().dot(b.comps());
  if (conv == InnerConvention::increasing) return inc;
  double fact = 1.0;
  for (int i = 2; i <= a.degree(); ++i) fact *= i;
  return fact * inc;
}

KForm interior_product(const Eigen::VectorXd& X, const KForm& w) {
  if (w.degree() < 1)
    throw std::invalid_argument("interior_product: degree 0 form");
  if (X.size() != w.dim())
    throw std::invalid_argument("interior_product: dim mismatch");
  const int n = w.dim();
  const int k = w.degree();
  KForm out(n, k - 1);
  const TupleBasis& tb = tuple_basis(n, k - 1);
  int args[kMaxDim];
  for (std::size_t r = 0; r < tb.tuples.size(); ++r) {
    const auto& J = tb.tuples[r];
    for (int q = 0; q < k - 1; ++q) args[q + 1] = J[q];
    double v = 0.0;
    for (int i = 0; i < n; ++i) {
      if (X[i] == 0.0) continue;
      args[0] = i;
      v += X[i] * w.eval(std::span<const int>(args, k));
    }
    out.comps()[r] = v;
  }
  return out;
}

KForm rho_action(const Endomorphism& A, const KForm& w) {
  if (A.rows() != w.dim() || A.cols() != w.dim())
    throw std::invalid_argument("rho_action: dim mismatch");
  const int n = w.dim();
  const int k = w.degree();
  KForm out(n, k);
  const TupleBasis& tb = tuple_basis(n, k);
  int args[kMaxDim];
  for (std::size_t r = 0; r < tb.tuples.size(); ++r) {
    const auto& I = tb.tuples[r];
    double v = 0.0;
    for (int s = 0; s < k; ++s) {
      for (int q = 0; q < k; ++q) args[q] = I[q];
      for (int m = 0; m < n; ++m) {
        double c = A(m, I[s]);
        if (c == 0.0) continue;
        args[s] = m;
        v -= c * w.eval(std::span<const int>(args, k));
      }
    }
    out.comps()[r] = v;
  }
  return out;
}

Eigen::MatrixXd nullspace(const LinearOperatorMatrix& M, double tol) {
  if (tol <= 0) throw std::invalid_argument("nullspace: tol must be > 0");
  if (M.size() == 0) return Eigen::MatrixXd::Identity(M.cols(), M.cols());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double smax = sv.size() > 0 ? sv[0] : 0.0;
  double thresh = tol * (smax > 0.0 ? smax : 1.0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > thresh) ++rank;
  return svd.matrixV().rightCols(M.cols() - rank);
}

ScalarFit least_squares_scalar(const Eigen::VectorXd& v0,
                               const Eigen::VectorXd& v1) {
  if (v0.size() != v1.size())
    throw std::invalid_argument("least_squares_scalar: size mismatch");
  double denom = v1.squaredNorm();
  if (denom == 0.0) return {0.0, v0.norm()};
  double lambda = -v0.dot(v1) / denom;
  return {lambda, (v0 + lambda * v1).norm()};
}

}  // namespace genflow
