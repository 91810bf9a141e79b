#include "genflow/flow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>

namespace genflow {

std::pair<LieBracket, KForm> vector_field(const DorfmanBracket& mud) {
  Endomorphism R = bismut_ricci(mud);
  LieBracket dmu = -1.0 * theta_action(R, mud.mu);
  KForm dH = laplacian(mud.mu, mud.H) - rho_action(R, mud.H);
  return {std::move(dmu), std::move(dH)};
}

NormalizedField normalized_vector_field(const DorfmanBracket& mud) {
  double n2 = dorfman_norm2(mud);
  if (n2 <= 0.0)
    throw std::invalid_argument("normalized_vector_field: zero bracket");
  auto [dmu, dH] = vector_field(mud);
  // d|mud|^2/dt = 2<field, mud>, so ell = <Theta(Rc-A)mud, mud>/|mud|^2
  // equals -<field, mud>/|mud|^2.
  double ell = -dorfman_inner(dmu, dH, mud.mu, mud.H) / n2;
  NormalizedField out{std::move(dmu), std::move(dH), ell};
  out.dmu += ell * mud.mu;
  out.dH += ell * mud.H;
  return out;
}

Eigen::VectorXd pack_state(const DorfmanBracket& mud) {
  const int n = mud.dim();
  const long nm = long(n) * binomial(n, 2);
  const long nh = binomial(n, 3);
  Eigen::VectorXd y(nm + nh);
  y.head(nm) = Eigen::Map<const Eigen::VectorXd>(mud.mu.table().data(), nm);
  y.tail(nh) = mud.H.comps();
  return y;
}

DorfmanBracket unpack_state(int dim, const Eigen::VectorXd& y) {
  const long nm = long(dim) * binomial(dim, 2);
  const long nh = binomial(dim, 3);
  LieBracket mu(dim);
  Eigen::Map<Eigen::VectorXd>(mu.table().data(), nm) = y.head(nm);
  KForm H(dim, 3);
  H.comps() = y.tail(nh);
  return DorfmanBracket::unchecked(std::move(mu), std::move(H));
}

namespace {

// Dormand-Prince RK5(4) tableau.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
constexpr double kB5[7] = {35.0 / 384,      0.0,          500.0 / 1113,
                           125.0 / 192,     -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr double kB4[7] = {5179.0 / 57600,  0.0,           7571.0 / 16695,
                           393.0 / 640,     -92097.0 / 339200,
                           187.0 / 2100,    1.0 / 40};

struct RhsResult {
  Eigen::VectorXd dy;
  double ell = 0.0;
  bool finite = true;
};

RhsResult eval_rhs(int dim, const Eigen::VectorXd& y, bool normalized) {
  RhsResult r;
  DorfmanBracket mud = unpack_state(dim, y);
  if (normalized) {
    NormalizedField f = normalized_vector_field(mud);
    r.ell = f.ell;
    DorfmanBracket pair = DorfmanBracket::unchecked(f.dmu, f.dH);
    r.dy = pack_state(pair);
  } else {
    auto [dmu, dH] = vector_field(mud);
    DorfmanBracket pair = DorfmanBracket::unchecked(std::move(dmu), std::move(dH));
    r.dy = pack_state(pair);
  }
  r.finite = r.dy.allFinite();
  return r;
}

TrajectorySample make_sample(double t, const DorfmanBracket& mud, double ell,
                             double h) {
  TrajectorySample s;
  s.t = t;
  s.mud = mud;
  s.norm2_mud = dorfman_norm2(mud);
  s.gen_scalar = gen_scalar(mud);
  s.scal = scalar_curvature(mud.mu);
  s.norm2_H = form_inner(mud.H, mud.H, InnerConvention::full);
  s.jacobi_residual = jacobi_residual_rel(mud);
  s.dH_residual = dH_residual_rel(mud);
  s.dstarH_norm = std::sqrt(form_inner(codifferential(mud.mu, mud.H),
                                       codifferential(mud.mu, mud.H),
                                       InnerConvention::increasing));
  s.ell = ell;
  s.step_size = h;
  return s;
}

}  // namespace

FlowOutcome integrate(const DorfmanBracket& start, const FlowOptions& opts) {
  if (opts.t_max <= 0 || opts.rtol <= 0 || opts.atol <= 0 || opts.min_step <= 0)
    throw std::invalid_argument("integrate: bad options");
  const int dim = start.dim();
  const double construction_tol = 1e-9;

  FlowOutcome out;
  Eigen::VectorXd y = pack_state(start);
  const double target_norm2 = dorfman_norm2(start);
  if (opts.normalized && target_norm2 <= 0.0)
    throw std::invalid_argument("integrate: normalized flow from zero bracket");

  double t = 0.0;
  double err_prev = 1.0;
  int consecutive_converged = 0;

  auto cap_for = [&](const Eigen::VectorXd& state) {
    double n2 = dorfman_norm2(unpack_state(dim, state));
    return n2 > 0.0 ? 0.1 / n2 : std::numeric_limits<double>::infinity();
  };

  {
    RhsResult r0 = eval_rhs(dim, y, opts.normalized);
    out.trajectory.push_back(
        make_sample(0.0, unpack_state(dim, y), r0.ell, 0.0));
  }

  double h = std::min({1e-4, cap_for(y), opts.t_max});
  std::array<Eigen::VectorXd, 7> k;
  const double t_done = opts.t_max * (1.0 - 1e-14);

  while (t < t_done && out.steps_accepted < opts.max_steps) {
    h = std::min({h, cap_for(y), opts.t_max - t});
    if (h < opts.min_step && opts.t_max - t > opts.min_step) {
      out.kind = OutcomeKind::StepUnderflow;
      return out;
    }

    bool stage_ok = true;
    double ell0 = 0.0;
    for (int s = 0; s < 7; ++s) {
      Eigen::VectorXd ys = y;
      for (int q = 0; q < s; ++q)
        if (kA[s][q] != 0.0) ys += (h * kA[s][q]) * k[q];
      RhsResult r = eval_rhs(dim, ys, opts.normalized);
      if (!r.finite) {
        stage_ok = false;
        break;
      }
      if (s == 0) ell0 = r.ell;
      k[s] = std::move(r.dy);
    }

    Eigen::VectorXd y5, err;
    double err_norm = std::numeric_limits<double>::infinity();
    if (stage_ok) {
      y5 = y;
      err = Eigen::VectorXd::Zero(y.size());
      for (int s = 0; s < 7; ++s) {
        if (kB5[s] != 0.0) y5 += (h * kB5[s]) * k[s];
        double db = kB5[s] - kB4[s];
        if (db != 0.0) err += (h * db) * k[s];
      }
      if (y5.allFinite()) {
        double acc = 0.0;
        for (long i = 0; i < y.size(); ++i) {
          double sc = opts.atol +
                      opts.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
          double q = err[i] / sc;
          acc += q * q;
        }
        err_norm = std::sqrt(acc / double(y.size()));
      }
    }

    if (!stage_ok || !std::isfinite(err_norm) || err_norm > 1.0) {
      double fac = std::isfinite(err_norm) && err_norm > 0.0
                       ? std::max(0.2, 0.9 * std::pow(err_norm, -0.2))
                       : 0.2;
      h *= std::min(fac, 0.9);
      ++out.steps_rejected;
      continue;
    }

    // Accept.
    t += h;
    double h_used = h;
    y = std::move(y5);
    if (opts.normalized) {
      double n2 = dorfman_norm2(unpack_state(dim, y));
      if (n2 > 0.0) y *= std::sqrt(target_norm2 / n2);
    }
    ++out.steps_accepted;

    double e = std::max(err_norm, 1e-10);
    double fac = 0.9 * std::pow(e, -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
    fac = std::clamp(fac, 0.2, 5.0);
    err_prev = e;
    h = h_used * fac;

    bool final_point = t >= t_done;
    if (out.steps_accepted % opts.monitor_every == 0 || final_point) {
      DorfmanBracket cur = unpack_state(dim, y);
      TrajectorySample s = make_sample(t, cur, ell0, h_used);
      if (opts.normalized) {
        NormalizedField f = normalized_vector_field(cur);
        s.ell = f.ell;
        double field_norm =
            std::sqrt(std::max(0.0, dorfman_inner(f.dmu, f.dH, f.dmu, f.dH)));
        if (field_norm < 1e-8 * std::sqrt(s.norm2_mud))
          ++consecutive_converged;
        else
          consecutive_converged = 0;
      }
      out.trajectory.push_back(s);

      if (s.jacobi_residual > 1e3 * construction_tol ||
          s.dH_residual > 1e3 * construction_tol)
        throw std::runtime_error(
            "integrate: invariant drift exceeded 1e3 x construction tolerance");

      if (opts.normalized && consecutive_converged >= 10) {
        out.kind = OutcomeKind::Converged;
        out.limit = cur;
        return out;
      }
      if (!opts.normalized && s.norm2_mud > opts.blowup_norm_cap) {
        if (auto T = detect_blowup(out.trajectory)) {
          out.kind = OutcomeKind::BlowUp;
          out.blowup_time = *T;
          return out;
        }
      }
    }
  }

  if (out.trajectory.empty() || out.trajectory.back().t < t) {
    double ell = 0.0;
    if (opts.normalized)
      ell = normalized_vector_field(unpack_state(dim, y)).ell;
    out.trajectory.push_back(make_sample(t, unpack_state(dim, y), ell, 0.0));
  }
  out.kind = t >= t_done ? OutcomeKind::ReachedTMax : OutcomeKind::StepUnderflow;
  return out;
}

std::vector<FlowOutcome> integrate_batch(std::span<const DorfmanBracket> starts,
                                         const FlowOptions& opts) {
  std::vector<std::future<FlowOutcome>> futs;
  futs.reserve(starts.size());
  for (const DorfmanBracket& s : starts)
    futs.push_back(std::async(std::launch::async,
                              [&opts, s]() { return integrate(s, opts); }));
  std::vector<FlowOutcome> out;
  out.reserve(starts.size());
  for (auto& f : futs) out.push_back(f.get());
  return out;
}

std::optional<double> detect_blowup(const std::vector<TrajectorySample>& traj) {
  // Growing tail: walk backwards while the norm is increasing forward.
  int end = int(traj.size());
  int begin = end - 1;
  while (begin > 0 && traj[begin - 1].norm2_mud < traj[begin].norm2_mud)
    --begin;
  if (end - begin < 10) return std::nullopt;
  // Use the last decades of growth where 1/norm2 is closest to linear.
  double last = traj[end - 1].norm2_mud;
  int window_begin = begin;
  for (int i = begin; i < end; ++i)
    if (traj[i].norm2_mud >= last * 1e-4) {
      window_begin = i;
      break;
    }
  if (end - window_begin < 10) window_begin = std::max(begin, end - 10);
  if (end - window_begin < 10) return std::nullopt;

  const int m = end - window_begin;
  Eigen::MatrixXd X(m, 2);
  Eigen::VectorXd Y(m);
  for (int i = 0; i < m; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = traj[window_begin + i].t;
    Y[i] = 1.0 / traj[window_begin + i].norm2_mud;
  }
  Eigen::Vector2d ab = X.colPivHouseholderQr().solve(Y);
  double rel_resid = (X * ab - Y).norm() / std::max(Y.norm(), 1e-300);
  if (rel_resid >= 1e-3) return std::nullopt;
  if (ab[1] >= 0.0) return std::nullopt;  // norm must be heading to infinity
  double T = -ab[0] / ab[1];
  if (!(T > traj[end - 1].t)) return std::nullopt;
  return T;
}

std::optional<AsymptoticFit> asymptotic_scalar_fit(
    const std::vector<TrajectorySample>& traj) {
  if (traj.empty()) return std::nullopt;
  double t_end = traj.back().t;
  if (t_end <= 0.0) return std::nullopt;
  double t_begin = t_end / 10.0;
  double sum = 0.0, lo = std::numeric_limits<double>::infinity(),
         hi = -std::numeric_limits<double>::infinity();
  int count = 0;
  for (const auto& s : traj) {
    if (s.t < t_begin) continue;
    double v = s.t * s.gen_scalar;
    sum += v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    ++count;
  }
  if (count < 5) return std::nullopt;
  AsymptoticFit fit;
  fit.limit = sum / count;
  fit.spread = (hi - lo) / std::max(std::abs(fit.limit), 1e-300);
  fit.samples = count;
  return fit;
}

}  // namespace genflow
