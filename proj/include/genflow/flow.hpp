#pragma once

#include <optional>
#include <span>
#include <vector>

#include "genflow/courant.hpp"

// Time integration of the generalized bracket flow and its scalar-normalized
// variant: adaptive embedded RK5(4), invariant monitoring, blow-up and
// convergence detection, asymptotic fits.

namespace genflow {

struct FlowOptions {
  double t_max = 10.0;
  double rtol = 1e-9;
  double atol = 1e-12;
  long max_steps = 1'000'000;
  double min_step = 1e-13;
  bool normalized = false;
  int monitor_every = 1;
  double blowup_norm_cap = 1e8;
};

struct TrajectorySample {
  double t = 0.0;
  DorfmanBracket mud;
  double norm2_mud = 0.0;
  double gen_scalar = 0.0;
  double scal = 0.0;
  double norm2_H = 0.0;
  double jacobi_residual = 0.0;
  double dH_residual = 0.0;
  double dstarH_norm = 0.0;
  double ell = 0.0;
  double step_size = 0.0;
};

enum class OutcomeKind { ReachedTMax, BlowUp, Converged, StepUnderflow };

struct FlowOutcome {
  OutcomeKind kind = OutcomeKind::ReachedTMax;
  double blowup_time = 0.0;                // valid when kind == BlowUp
  std::optional<DorfmanBracket> limit;     // set when kind == Converged
  std::vector<TrajectorySample> trajectory;
  long steps_accepted = 0;
  long steps_rejected = 0;
};

// dmu/dt = -theta(Ric^B)mu, dH/dt = Delta H - rho(Ric^B)H.
std::pair<LieBracket, KForm> vector_field(const DorfmanBracket& mud);

struct NormalizedField {
  LieBracket dmu;
  KForm dH;
  double ell = 0.0;
};

// Adds ell * mud with ell = <Theta(Rc - A)mud, mud> / |mud|^2, which keeps
// |mud| constant along the flow.
NormalizedField normalized_vector_field(const DorfmanBracket& mud);

FlowOutcome integrate(const DorfmanBracket& start, const FlowOptions& opts);

// Independent trajectories; deterministic per-start results.
std::vector<FlowOutcome> integrate_batch(std::span<const DorfmanBracket> starts,
                                         const FlowOptions& opts);

// Least-squares fit of 1/|mud(t)|^2 against a + b t on the growing tail;
// returns the root when the fit's relative residual is below 1e-3.
std::optional<double> detect_blowup(const std::vector<TrajectorySample>& traj);

struct AsymptoticFit {
  double limit = 0.0;   // estimate of lim t * S(t)
  double spread = 0.0;  // (max - min) / |mean| over the window
  int samples = 0;
};

// Fit over the final decade [t_end/10, t_end] of samples.
std::optional<AsymptoticFit> asymptotic_scalar_fit(
    const std::vector<TrajectorySample>& traj);

// Flat coordinates used by the integrator (mu table then H components).
Eigen::VectorXd pack_state(const DorfmanBracket& mud);
DorfmanBracket unpack_state(int dim, const Eigen::VectorXd& y);

}  // namespace genflow
