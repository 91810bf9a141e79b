// Acceptance suite: one line per criterion, nonzero exit if any fails.
// Tolerances are pinned in-line; nothing here is adaptive.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"

using namespace genflow;

namespace {

int g_failures = 0;

void report(int num, const std::string& name, bool ok,
            const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << "  criterion " << num << ": " << name;
  if (!detail.empty()) std::cout << "  [" << detail << "]";
  std::cout << std::endl;
  if (!ok) ++g_failures;
}

std::string sci(double v) {
  std::ostringstream os;
  os << std::scientific;
  os.precision(2);
  os << v;
  return os.str();
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

DorfmanBracket fixture(const char* name) {
  return to_dorfman(catalog_find(name)->spec);
}

// mu = heis3 + R, H = e^{123} + e^{234}: closed and coclosed at t = 0.
DorfmanBracket harmonic_n3R_start() {
  AlgebraSpec s;
  s.name = "n3R-harmonic-start";
  s.dim = 4;
  s.mu.push_back({1, 2, 3, 1.0});
  s.H.push_back({1, 2, 3, 1.0});
  s.H.push_back({2, 3, 4, 1.0});
  return to_dorfman(s);
}

void criterion_1() {
  auto t0 = Clock::now();
  SolitonVerification v = verify_soliton(to_dorfman(make_n3(1.0, 1.0)));
  double dt = seconds_since(t0);
  Endomorphism d_expected = Eigen::Vector3d(1, 1, 2).asDiagonal();
  double lam_err = std::abs(v.certificate.lambda + 2.0);
  double d_err = (v.certificate.D - d_expected).cwiseAbs().maxCoeff();
  bool ok = v.passed && lam_err <= 1e-9 && d_err <= 1e-9 &&
            v.certificate.soliton_class == SolitonClass::Expanding && dt < 1.0;
  report(1, "Heisenberg soliton certificate", ok,
         "lambda err " + sci(lam_err) + ", D err " + sci(d_err) + ", " +
             sci(dt) + " s");
}

void criterion_2() {
  auto t0 = Clock::now();
  ClassificationReport rep = reproduce_classification(1e-8);
  double dt = seconds_since(t0);
  long controls = 0, circle = 0;
  double worst_resid = 0.0, worst_lam = 0.0, worst_d = 0.0;
  bool rows_ok = true;
  for (const ClassificationRow& r : rep.rows) {
    rows_ok = rows_ok && r.passed;
    if (r.is_control) {
      ++controls;
      continue;
    }
    if (r.name.rfind("n3R-item2-circle-", 0) == 0) ++circle;
    worst_resid = std::max({worst_resid, r.residual_metric, r.residual_torsion});
    worst_lam = std::max(worst_lam, r.lambda_error);
    worst_d = std::max(worst_d, r.d_error);
  }
  bool ok = rep.all_passed && rows_ok && rep.rows.size() == 24 &&
            controls == 3 && circle == 8 && worst_resid < 1e-8 &&
            worst_lam < 1e-8 && worst_d < 1e-8 && dt < 5.0;
  report(2, "dimension-4 classification with controls", ok,
         std::to_string(rep.rows.size()) + " rows, " +
             std::to_string(controls) + " controls rejected, residual " +
             sci(worst_resid) + ", " + sci(dt) + " s");
}

void criterion_3() {
  DorfmanBracket start = to_dorfman(make_n3(1.0, 1.0));
  double worst = 0.0;
  for (double t_max : {1.0, 10.0, 100.0}) {
    FlowOptions opts;
    opts.t_max = t_max;
    FlowOutcome res = integrate(start, opts);
    double exact = 12.0 / (1.0 + 4.0 * t_max);
    if (res.kind != OutcomeKind::ReachedTMax) {
      worst = 1.0;
      break;
    }
    worst = std::max(worst,
                     std::abs(res.trajectory.back().norm2_mud - exact) / exact);
  }
  report(3, "soliton scaling law |mud(t)|^2 = 12/(1+4t)", worst <= 1e-6,
         "worst rel err " + sci(worst) + " at t in {1,10,100}");
}

void criterion_4() {
  FlowOptions opts;
  opts.t_max = 2.0;
  FlowOutcome res = integrate(fixture("so3"), opts);
  bool monotone = true;
  for (std::size_t i = 1; i < res.trajectory.size(); ++i)
    monotone = monotone && res.trajectory[i].gen_scalar >=
                               res.trajectory[i - 1].gen_scalar;
  double s_end = res.trajectory.back().gen_scalar;
  bool ok = res.kind == OutcomeKind::BlowUp && res.blowup_time >= 0.99 &&
            res.blowup_time <= 1.01 && monotone && s_end > 1e5;
  report(4, "compact blow-up with T close to 1", ok,
         "T = " + sci(res.blowup_time) + ", S_end = " + sci(s_end) +
             (monotone ? ", S monotone" : ", S NOT monotone"));
}

void criterion_5() {
  FlowOptions opts;
  opts.t_max = 100.0;
  FlowOutcome res = integrate(fixture("sol3"), opts);
  double s_max = -std::numeric_limits<double>::infinity();
  for (const TrajectorySample& s : res.trajectory)
    s_max = std::max(s_max, s.gen_scalar);
  bool ok = res.kind == OutcomeKind::ReachedTMax && s_max < 0.0;
  report(5, "solvable immortality to t = 100 with S < 0", ok,
         "max S = " + sci(s_max) + ", t_end = " +
             sci(res.trajectory.back().t));
}

void criterion_6() {
  std::mt19937 g(2026);
  double worst = 0.0, worst_nil = 0.0;
  int draws = 0, nil_draws = 0;
  for (int i = 0; i < 100; ++i) {
    int n = 3 + i % 3;
    bool nilpotent = (i / 3) % 2 == 0;
    DorfmanBracket mud = testutil::random_dorfman(n, nilpotent, true, g);
    ++draws;
    Eigen::MatrixXd rc_minus_a =
        gen_ricci(mud).to_matrix() - a_term(mud).to_matrix();
    LElement rhs{bismut_ricci(mud),
                 -1.0 * codifferential(mud.mu, mud.H)};
    worst = std::max(
        worst,
        (rc_minus_a - lift(rhs).to_matrix()).cwiseAbs().maxCoeff());
    if (nilpotent) {
      ++nil_draws;
      worst_nil = std::max(
          worst_nil,
          (rc_minus_a - lift(l_moment_map(mud)).to_matrix())
              .cwiseAbs()
              .maxCoeff());
    }
  }
  bool ok = draws == 100 && worst < 1e-10 && nil_draws >= 30 &&
            worst_nil < 1e-10;
  report(6, "moment-map identity on 100 random brackets", ok,
         "Rc - A gap " + sci(worst) + ", nilpotent moment-map gap " +
             sci(worst_nil) + " over " + std::to_string(nil_draws) +
             " nilpotent draws");
}

void criterion_7() {
  std::mt19937 g(2027);
  double worst_id = 0.0;
  for (int i = 0; i < 30; ++i) {
    int n = 3 + i % 3;
    DorfmanBracket mud = testutil::random_dorfman(n, true, true, g);
    double n2 = dorfman_norm2(mud);
    worst_id = std::max(
        worst_id, std::abs(gen_scalar(mud) + n2 / 12.0) / std::max(1.0, n2));
  }

  double worst_fd = 0.0;
  for (const char* name : {"n3-b2a", "sol3"}) {
    FlowOptions opts;
    opts.t_max = 0.5;
    FlowOutcome res = integrate(fixture(name), opts);
    const auto& traj = res.trajectory;
    for (int q = 1; q <= 5; ++q) {
      const TrajectorySample& s = traj[q * (traj.size() - 1) / 6];
      const int n = s.mud.dim();
      auto [dmu, dH] = vector_field(s.mud);
      Eigen::VectorXd y = pack_state(s.mud);
      Eigen::VectorXd v =
          pack_state(DorfmanBracket::unchecked(std::move(dmu), std::move(dH)));
      double h = 1e-6 / std::max(1.0, v.norm());
      double fd = (gen_scalar(unpack_state(n, y + h * v)) -
                   gen_scalar(unpack_state(n, y - h * v))) /
                  (2.0 * h);
      double rc2 = gen_ricci(s.mud).frobenius2();
      worst_fd = std::max(worst_fd, std::abs(fd - rc2) / std::abs(rc2));
    }
  }
  bool ok = worst_id <= 1e-12 && worst_fd <= 1e-4;
  report(7, "scalar identities S = -|mud|^2/12 and dS/dt = |Rc|^2", ok,
         "nilpotent identity gap " + sci(worst_id) + ", FD rel err " +
             sci(worst_fd));
}

void criterion_8() {
  DorfmanBracket start = harmonic_n3R_start();
  FlowOptions opts;
  opts.t_max = 10.0;
  FlowOutcome res = integrate(start, opts);
  double worst_jac = 0.0, worst_dh = 0.0, worst_dstar = 0.0;
  for (const TrajectorySample& s : res.trajectory) {
    worst_jac = std::max(worst_jac, s.jacobi_residual);
    worst_dh = std::max(worst_dh, s.dH_residual);
    worst_dstar = std::max(worst_dstar, s.dstarH_norm);
  }

  FlowOptions nopts;
  nopts.t_max = 10.0;
  nopts.normalized = true;
  FlowOutcome nres = integrate(start, nopts);
  double n0 = dorfman_norm2(start);
  double worst_norm = 0.0;
  for (const TrajectorySample& s : nres.trajectory)
    worst_norm = std::max(worst_norm, std::abs(s.norm2_mud - n0) / n0);

  bool ok = res.kind == OutcomeKind::ReachedTMax && worst_jac < 1e-7 &&
            worst_dh < 1e-7 && worst_dstar < 1e-7 && worst_norm <= 1e-9;
  report(8, "structure preservation along the harmonic n3+R flow", ok,
         "jacobi " + sci(worst_jac) + ", dH " + sci(worst_dh) + ", d*H " +
             sci(worst_dstar) + ", normalized |mud|^2 drift " +
             sci(worst_norm));
}

void criterion_9() {
  SearchReport rep = search_soliton(harmonic_n3R_start());
  struct Family {
    const char* name;
    double lambda;
    std::array<double, 4> eigs;  // ascending, unit bracket norm
  };
  const std::vector<Family> families = {
      {"item1", -2.0 / 12.0, {1.0 / 12, 1.0 / 12, 2.0 / 12, 2.0 / 12}},
      {"item2", -1.5 / 12.0, {0.5 / 12, 1.0 / 12, 1.0 / 12, 1.5 / 12}},
  };
  Eigen::SelfAdjointEigenSolver<Endomorphism> es(rep.verification.certificate.D);
  std::string matched = "none";
  double best_gap = 1e300;
  for (const Family& f : families) {
    double gap = std::abs(rep.verification.certificate.lambda - f.lambda);
    for (int i = 0; i < 4; ++i)
      gap = std::max(gap, std::abs(es.eigenvalues()[i] - f.eigs[i]));
    if (gap < best_gap) best_gap = gap;
    if (gap <= 1e-6) matched = f.name;
  }
  bool ok = rep.converged && rep.verification.passed && matched != "none";
  report(9, "normalized flow converges into the n3+R soliton families", ok,
         "matched " + matched + ", certificate gap " + sci(best_gap) +
             ", lambda = " + sci(rep.verification.certificate.lambda));
}

void criterion_10() {
  bool ok = true;
  std::string detail;
  for (const char* name : {"n3-b2a", "n4-l3-control"}) {
    FlowOptions opts;
    opts.t_max = 1e4;
    opts.monitor_every = 5;
    FlowOutcome res = integrate(fixture(name), opts);
    auto fit = asymptotic_scalar_fit(res.trajectory);
    bool this_ok = res.kind == OutcomeKind::ReachedTMax && fit.has_value() &&
                   fit->limit < 0.0 && fit->spread < 0.01;
    ok = ok && this_ok;
    if (!detail.empty()) detail += "; ";
    detail += std::string(name) + ": t*S -> " +
              (fit ? sci(fit->limit) + " (spread " + sci(fit->spread) + ")"
                   : std::string("no fit"));
  }
  report(10, "nilpotent flows stabilize t * S on [1e3, 1e4]", ok, detail);
}

void criterion_11() {
  double worst = 0.0;
  auto consider = [&](double e) { worst = std::max(worst, e); };

  for (const char* name :
       {"aff1", "n3-soliton", "so3", "sol3", "n3R-item1", "n4", "heis3xR2"}) {
    DorfmanBracket mud = fixture(name);
    const int n = mud.dim();

    // d / d* adjointness on every pair of basis forms, every degree.
    for (int k = 0; k + 1 <= n; ++k) {
      const TupleBasis& bk = tuple_basis(n, k);
      const TupleBasis& bk1 = tuple_basis(n, k + 1);
      std::vector<KForm> d_of_basis;
      d_of_basis.reserve(bk.tuples.size());
      for (const std::vector<int>& tup : bk.tuples) {
        KForm w(n, k);
        w.add(std::span<const int>(tup.data(), tup.size()), 1.0);
        d_of_basis.push_back(ce_differential(mud.mu, w));
      }
      for (std::size_t r1 = 0; r1 < bk1.tuples.size(); ++r1) {
        KForm eta(n, k + 1);
        eta.add(std::span<const int>(bk1.tuples[r1].data(),
                                     bk1.tuples[r1].size()),
                1.0);
        KForm cod = codifferential(mud.mu, eta);
        for (std::size_t r0 = 0; r0 < bk.tuples.size(); ++r0)
          consider(std::abs(d_of_basis[r0].comps()[long(r1)] -
                            cod.comps()[long(r0)]));
      }
    }

    // Alternation of eval on every basis form against every raw index tuple.
    for (int k = 1; k <= n; ++k) {
      const TupleBasis& bk = tuple_basis(n, k);
      std::vector<int> tuple(k, 0);
      for (std::size_t r = 0; r < bk.tuples.size(); ++r) {
        KForm w(n, k);
        w.add(std::span<const int>(bk.tuples[r].data(),
                                   bk.tuples[r].size()),
              1.0);
        // Odometer over {0..n-1}^k.
        std::fill(tuple.begin(), tuple.end(), 0);
        while (true) {
          std::vector<int> sorted = tuple;
          int sign = sort_sign(std::span<int>(sorted.data(), sorted.size()));
          double expected =
              (sign != 0 && sorted == bk.tuples[r]) ? double(sign) : 0.0;
          consider(std::abs(
              w.eval(std::span<const int>(tuple.data(), tuple.size())) -
              expected));
          int pos = k - 1;
          while (pos >= 0 && tuple[pos] == n - 1) tuple[pos--] = 0;
          if (pos < 0) break;
          ++tuple[pos];
        }
      }
    }

    // theta / rho linearity over all pairs of matrix units.
    std::vector<Endomorphism> units;
    std::vector<LieBracket> theta_units;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        Endomorphism E = Endomorphism::Zero(n, n);
        E(a, b) = 1.0;
        units.push_back(E);
        theta_units.push_back(theta_action(E, mud.mu));
      }
    const TupleBasis& b3 = tuple_basis(n, 3);
    for (std::size_t p = 0; p < units.size(); ++p)
      for (std::size_t q = 0; q < units.size(); ++q) {
        Endomorphism A = 2.0 * units[p] - 3.0 * units[q];
        consider((theta_action(A, mud.mu) -
                  (2.0 * theta_units[p] - 3.0 * theta_units[q]))
                     .max_abs());
        for (const std::vector<int>& tup : b3.tuples) {
          KForm w(n, 3);
          w.add(std::span<const int>(tup.data(), tup.size()), 1.0);
          consider((rho_action(A, w) -
                    (2.0 * rho_action(units[p], w) -
                     3.0 * rho_action(units[q], w)))
                       .max_abs());
        }
      }

    // Moment-map defining identity over a basis of l = gl(g) + Lambda^2 g*.
    LElement m = l_moment_map(mud);
    auto check_defining = [&](const LElement& L) {
      auto [tmu, tH] = big_theta(L, mud);
      double rhs = dorfman_inner(tmu, tH, mud.mu, mud.H) / 6.0;
      consider(std::abs(l_inner(m, L) - rhs));
    };
    for (const Endomorphism& E : units) check_defining({E, KForm(n, 2)});
    const TupleBasis& b2 = tuple_basis(n, 2);
    for (const std::vector<int>& tup : b2.tuples) {
      KForm alpha(n, 2);
      alpha.add(std::span<const int>(tup.data(), tup.size()), 1.0);
      check_defining({Endomorphism::Zero(n, n), alpha});
    }
  }

  report(11, "kernel identities exhaustively on basis elements, n <= 5",
         worst <= 1e-12, "worst deviation " + sci(worst));
}

}  // namespace

int main() {
  std::cout << "genflow acceptance suite\n";
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  if (g_failures == 0) {
    std::cout << "all 11 criteria PASS\n";
    return 0;
  }
  std::cout << g_failures << " criteria FAILED\n";
  return 1;
}
