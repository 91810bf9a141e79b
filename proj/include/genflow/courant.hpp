#pragma once

#include <utility>

#include "genflow/liealg.hpp"

// Quantities attached to a Dorfman bracket (mu, H) on g + g*: the
// Chevalley-Eilenberg complex, Bismut Ricci curvature, generalized Ricci
// endomorphism, moment map and the Theta action of gl(g) x Lambda^2 g*.

namespace genflow {

struct DorfmanBracket {
  LieBracket mu;
  KForm H;  // degree 3

  // Validates Jacobi and dH = 0 with a tolerance relative to max(1, |mud|^2).
  static DorfmanBracket checked(LieBracket mu, KForm H, double tol = 1e-9);
  // No validation; used by integrators whose drift is monitored separately.
  static DorfmanBracket unchecked(LieBracket mu, KForm H);

  int dim() const { return mu.dim(); }
};

struct LElement {
  Endomorphism A;
  KForm alpha;  // degree 2
};

// Endomorphism of g + g* in blocks: [gg, ggs; gsg, gsgs] where ggs maps g*
// coordinates to g coordinates, etc.
struct GenEndo {
  Eigen::MatrixXd gg, ggs, gsg, gsgs;
  Eigen::MatrixXd to_matrix() const;
  double frobenius2() const;
};

// Chevalley-Eilenberg differential:
// (dw)(x_0..x_k) = sum_{i<j} (-1)^{i+j} w(mu(x_i,x_j), ..hat i..hat j..).
// Inputs of degree >= n yield the zero (k+1)-form.
KForm ce_differential(const LieBracket& mu, const KForm& w);

// Matrix of d on degree-k forms in increasing-tuple coordinates.
LinearOperatorMatrix d_matrix(const LieBracket& mu, int k);

// Adjoint of d with respect to the increasing-tuple inner product.
KForm codifferential(const LieBracket& mu, const KForm& w);

// Delta = -(d d* + d* d).
KForm laplacian(const LieBracket& mu, const KForm& w);

// (H^2)_ij = sum_{k,l} H_ikl H_jkl (all ordered pairs k,l).
Endomorphism h_squared(const KForm& H);

Endomorphism bismut_ricci(const DorfmanBracket& mud);

// Dorfman bracket evaluation on g + g* coordinate vectors (size 2n):
// mud(X+xi, Y+eta) = mu(X,Y) - eta.mu_X + xi.mu_Y + i_Y i_X H.
Eigen::VectorXd dorfman_eval(const DorfmanBracket& mud,
                             const Eigen::VectorXd& a,
                             const Eigen::VectorXd& b);

// Coordinate matrix of X -> i_X alpha as a map g -> g*.
Eigen::MatrixXd coord_matrix(const KForm& alpha);

// lift(A, alpha) = [A, 0; C(alpha), -A^T], the gl(2n) image of an l-element.
GenEndo lift(const LElement& L);

// Rc = [Ric^B, 1/2 C; -1/2 C, -(Ric^B)^T] with C = coord_matrix(d* H).
GenEndo gen_ricci(const DorfmanBracket& mud);
// A = [0, 1/2 C; 1/2 C, 0].
GenEndo a_term(const DorfmanBracket& mud);

// (Theta(L)mud)_g = theta(A)mu, (Theta(L)mud)_{Lambda^3} = rho(A)H - d alpha.
std::pair<LieBracket, KForm> big_theta(const LElement& L,
                                       const DorfmanBracket& mud);

// g_l((A1,a1),(A2,a2)) = 2 tr(A1 A2^T) + <a1, a2>_increasing.
double l_inner(const LElement& L1, const LElement& L2);

// Closed form M_mud = (m_mu - 1/4 H^2, -d* H); satisfies
// g_l(M_mud, L) = 1/6 <Theta(L)mud, mud> for every L.
LElement l_moment_map(const DorfmanBracket& mud);
// Same element recovered by solving the defining identity on a basis of l
// (test oracle; quadratic cost).
LElement l_moment_map_defining(const DorfmanBracket& mud);

// |mud|^2 = 3 |mu|^2_full + |H|^2_full.
double dorfman_norm2(const DorfmanBracket& mud);
// Pairing with the same weights, applied to tangent pairs.
double dorfman_inner(const LieBracket& mu1, const KForm& H1,
                     const LieBracket& mu2, const KForm& H2);

// S = scal(mu) - |H|^2_full / 12.
double gen_scalar(const DorfmanBracket& mud);

// Residuals used for construction checks and flow monitoring, both relative
// to max(1, |mud|^2).
double jacobi_residual_rel(const DorfmanBracket& mud);
double dH_residual_rel(const DorfmanBracket& mud);

}  // namespace genflow
