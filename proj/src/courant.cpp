#include "genflow/courant.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace genflow {

DorfmanBracket DorfmanBracket::unchecked(LieBracket mu, KForm H) {
  DorfmanBracket d;
  d.mu = std::move(mu);
  d.H = std::move(H);
  if (d.H.dim() != d.mu.dim() || d.H.degree() != 3)
    throw std::invalid_argument("DorfmanBracket: H must be a 3-form on g");
  return d;
}

DorfmanBracket DorfmanBracket::checked(LieBracket mu, KForm H, double tol) {
  DorfmanBracket d = unchecked(std::move(mu), std::move(H));
  double jr = jacobi_residual_rel(d);
  if (jr > tol) {
    std::ostringstream os;
    os << "DorfmanBracket: Jacobi residual " << jr << " exceeds tol " << tol;
    throw std::invalid_argument(os.str());
  }
  double hr = dH_residual_rel(d);
  if (hr > tol) {
    std::ostringstream os;
    os << "DorfmanBracket: dH residual " << hr << " exceeds tol " << tol;
    throw std::invalid_argument(os.str());
  }
  return d;
}

Eigen::MatrixXd GenEndo::to_matrix() const {
  const long n = gg.rows();
  Eigen::MatrixXd m(2 * n, 2 * n);
  m.topLeftCorner(n, n) = gg;
  m.topRightCorner(n, n) = ggs;
  m.bottomLeftCorner(n, n) = gsg;
  m.bottomRightCorner(n, n) = gsgs;
  return m;
}

double GenEndo::frobenius2() const {
  return gg.squaredNorm() + ggs.squaredNorm() + gsg.squaredNorm() +
         gsgs.squaredNorm();
}

KForm ce_differential(const LieBracket& mu, const KForm& w) {
  const int n = w.dim();
  const int k = w.degree();
  if (mu.dim() != n) throw std::invalid_argument("ce_differential: dim mismatch");
  KForm out(n, k + 1);
  if (k >= n) return out;  // Lambda^{k+1} vanishes

  const TupleBasis& tb = tuple_basis(n, k + 1);
  int args[kMaxDim];
  for (std::size_t r = 0; r < tb.tuples.size(); ++r) {
    const auto& I = tb.tuples[r];
    double val = 0.0;
    for (int p = 0; p < k + 1; ++p) {
      for (int q = p + 1; q < k + 1; ++q) {
        Eigen::VectorXd v = mu.bracket(I[p], I[q]);
        if (v.isZero(0.0)) continue;
        int pos = 1;
        for (int s = 0; s < k + 1; ++s)
          if (s != p && s != q) args[pos++] = I[s];
        double sign = ((p + q) % 2 == 0) ? 1.0 : -1.0;
        double acc = 0.0;
        for (int m = 0; m < n; ++m) {
          if (v[m] == 0.0) continue;
          args[0] = m;
          acc += v[m] * w.eval(std::span<const int>(args, k));
        }
        val += sign * acc;
      }
    }
    out.comps()[int(r)] = val;
  }
  return out;
}

LinearOperatorMatrix d_matrix(const LieBracket& mu, int k) {
  const int n = mu.dim();
  if (k < 0) throw std::invalid_argument("d_matrix: bad degree");
  const long cols = binomial(n, k);
  const long rows = binomial(n, k + 1);
  LinearOperatorMatrix M(rows, cols);
  for (long c = 0; c < cols; ++c) {
    KForm w(n, k);
    w.comps()[c] = 1.0;
    M.col(c) = ce_differential(mu, w).comps();
  }
  return M;
}

KForm codifferential(const LieBracket& mu, const KForm& w) {
  const int n = w.dim();
  const int k = w.degree();
  if (k < 1) throw std::invalid_argument("codifferential: degree 0 form");
  KForm out(n, k - 1);
  out.comps() = d_matrix(mu, k - 1).transpose() * w.comps();
  return out;
}

KForm laplacian(const LieBracket& mu, const KForm& w) {
  const int n = w.dim();
  const int k = w.degree();
  KForm out(n, k);
  if (k >= 1) out -= ce_differential(mu, codifferential(mu, w));
  out -= codifferential(mu, ce_differential(mu, w));
  return out;
}

Endomorphism h_squared(const KForm& H) {
  const int n = H.dim();
  if (H.degree() != 3) throw std::invalid_argument("h_squared: need a 3-form");
  Endomorphism M = Endomorphism::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double v = 0.0;
      for (int k = 0; k < n; ++k)
        for (int l = k + 1; l < n; ++l)
          v += 2.0 * H.eval({i, k, l}) * H.eval({j, k, l});
      M(i, j) = v;
      M(j, i) = v;
    }
  }
  return M;
}

Endomorphism bismut_ricci(const DorfmanBracket& mud) {
  return ricci(mud.mu) - 0.25 * h_squared(mud.H);
}

Eigen::VectorXd dorfman_eval(const DorfmanBracket& mud,
                             const Eigen::VectorXd& a,
                             const Eigen::VectorXd& b) {
  const int n = mud.dim();
  if (a.size() != 2 * n || b.size() != 2 * n)
    throw std::invalid_argument("dorfman_eval: need 2n coordinates");
  Eigen::VectorXd X = a.head(n), xi = a.tail(n);
  Eigen::VectorXd Y = b.head(n), eta = b.tail(n);
  Eigen::VectorXd out(2 * n);
  out.head(n) = mud.mu.eval(X, Y);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd ei = Eigen::VectorXd::Unit(n, i);
    double v = -eta.dot(mud.mu.eval(X, ei)) + xi.dot(mud.mu.eval(Y, ei));
    int idx[3];
    double h = 0.0;
    for (int p = 0; p < n; ++p) {
      if (X[p] == 0.0) continue;
      for (int q = 0; q < n; ++q) {
        if (Y[q] == 0.0) continue;
        idx[0] = p;
        idx[1] = q;
        idx[2] = i;
        h += X[p] * Y[q] * mud.H.eval(std::span<const int>(idx, 3));
      }
    }
    out[n + i] = v + h;
  }
  return out;
}

Eigen::MatrixXd coord_matrix(const KForm& alpha) {
  const int n = alpha.dim();
  if (alpha.degree() != 2)
    throw std::invalid_argument("coord_matrix: need a 2-form");
  Eigen::MatrixXd C(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) C(j, i) = alpha.eval({i, j});
  return C;
}

GenEndo lift(const LElement& L) {
  GenEndo g;
  g.gg = L.A;
  g.ggs = Eigen::MatrixXd::Zero(L.A.rows(), L.A.cols());
  g.gsg = coord_matrix(L.alpha);
  g.gsgs = -L.A.transpose();
  return g;
}

GenEndo gen_ricci(const DorfmanBracket& mud) {
  const int n = mud.dim();
  Endomorphism R = bismut_ricci(mud);
  Eigen::MatrixXd C = coord_matrix(codifferential(mud.mu, mud.H));
  GenEndo g;
  g.gg = R;
  g.ggs = 0.5 * C;
  g.gsg = -0.5 * C;
  g.gsgs = -R.transpose();
  (void)n;
  return g;
}

GenEndo a_term(const DorfmanBracket& mud) {
  const int n = mud.dim();
  Eigen::MatrixXd C = coord_matrix(codifferential(mud.mu, mud.H));
  GenEndo g;
  g.gg = Eigen::MatrixXd::Zero(n, n);
  g.ggs = 0.5 * C;
  g.gsg = 0.5 * C;
  g.gsgs = Eigen::MatrixXd::Zero(n, n);
  return g;
}

std::pair<LieBracket, KForm> big_theta(const LElement& L,
                                       const DorfmanBracket& mud) {
  return {theta_action(L.A, mud.mu),
          rho_action(L.A, mud.H) - ce_differential(mud.mu, L.alpha)};
}

double l_inner(const LElement& L1, const LElement& L2) {
  return 2.0 * (L1.A.array() * L2.A.array()).sum() +
         form_inner(L1.alpha, L2.alpha, InnerConvention::increasing);
}

LElement l_moment_map(const DorfmanBracket& mud) {
  LElement m;
  m.A = moment_map_mu(mud.mu) - 0.25 * h_squared(mud.H);
  m.alpha = -1.0 * codifferential(mud.mu, mud.H);
  return m;
}

LElement l_moment_map_defining(const DorfmanBracket& mud) {
  const int n = mud.dim();
  const long na = long(n) * n;
  const long nf = binomial(n, 2);
  // Solve g_l(M, L_b) = 1/6 <Theta(L_b) mud, mud> over the basis
  // L_b in { (E_ab, 0) } union { (0, e^i ^ e^j) }.  The pairing is diagonal
  // in these coordinates: weight 2 on A entries, 1 on increasing alpha.
  LElement m;
  m.A = Endomorphism::Zero(n, n);
  m.alpha = KForm(n, 2);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      LElement L{Endomorphism::Zero(n, n), KForm(n, 2)};
      L.A(a, b) = 1.0;
      auto [tm, th] = big_theta(L, mud);
      double rhs = (3.0 * tm.inner_full(mud.mu) +
                    form_inner(th, mud.H, InnerConvention::full)) /
                   6.0;
      m.A(a, b) = rhs / 2.0;
    }
  }
  for (long r = 0; r < nf; ++r) {
    LElement L{Endomorphism::Zero(n, n), KForm(n, 2)};
    L.alpha.comps()[r] = 1.0;
    auto [tm, th] = big_theta(L, mud);
    double rhs = (3.0 * tm.inner_full(mud.mu) +
                  form_inner(th, mud.H, InnerConvention::full)) /
                 6.0;
    m.alpha.comps()[r] = rhs;
  }
  (void)na;
  return m;
}

double dorfman_norm2(const DorfmanBracket& mud) {
  return 3.0 * mud.mu.norm2_full() +
         form_inner(mud.H, mud.H, InnerConvention::full);
}

double dorfman_inner(const LieBracket& mu1, const KForm& H1,
                     const LieBracket& mu2, const KForm& H2) {
  return 3.0 * mu1.inner_full(mu2) + form_inner(H1, H2, InnerConvention::full);
}

double gen_scalar(const DorfmanBracket& mud) {
  return scalar_curvature(mud.mu) -
         form_inner(mud.H, mud.H, InnerConvention::full) / 12.0;
}

double jacobi_residual_rel(const DorfmanBracket& mud) {
  return jacobi_residual(mud.mu) / std::max(1.0, dorfman_norm2(mud));
}

double dH_residual_rel(const DorfmanBracket& mud) {
  KForm dh = ce_differential(mud.mu, mud.H);
  return dh.max_abs() / std::max(1.0, dorfman_norm2(mud));
}

}  // namespace genflow
