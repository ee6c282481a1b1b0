#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <string>
#include <vector>

#include "er/beltrami.hpp"
#include "er/fields.hpp"
#include "er/params.hpp"
#include "er/timeline.hpp"
#include "er/transport.hpp"

namespace er {

// ---------------------------------------------------------------------------
// One level of the iteration: an Euler-Reynolds triple (v, p, R) presented as
// functions of time, subordinate to a time partition.  The providers accept
// any t in [0, 1]; v and R vanish identically near t = 0 and t = 1, and the
// level-q support window shrinks as the iteration proceeds.
//
// dv_dt, when non-empty, returns the exact time derivative of v; the residual
// checker then needs no finite differences at this level.  Levels produced by
// Stepper leave it empty (their residual is checked with the shared-stencil
// scheme, see Stepper::stress).
// ---------------------------------------------------------------------------
struct Triple {
  int q = 0;
  Partition partition;
  VectorProvider v;
  ScalarProvider p;
  TensorProvider R;
  VectorProvider dv_dt;  // optional
  // Optional: the stress with an explicit width for its internal d/dt w
  // stencil (see Stepper::stress).  Stepped levels provide it so that a
  // residual checker can match its own d/dt v stencil to the stress and make
  // the two cancel; closed-form levels leave it empty.
  std::function<SymTensorField(double, double)> R_fd;
};

// ---------------------------------------------------------------------------
// Seed level.
// ---------------------------------------------------------------------------

// Smooth on/off profile of the seed flow: identically 0 outside (3/8, 5/8),
// identically 1 on [7/16, 9/16], C^infinity monotone ramps in between.
// _d1/_d2 are its exact first and second time derivatives.
double initial_time_profile(double t);
double initial_time_profile_d1(double t);
double initial_time_profile_d2(double t);

// The seed triple on the given grid: a one-mode shear flow at spatial
// frequency lambda0 with amplitude lambda0^{-beta0}, switched on and off by
// initial_time_profile; zero pressure; and the explicit one-mode stress whose
// divergence equals d/dt of the velocity exactly, so the Euler-Reynolds
// residual vanishes identically (the quadratic term div(v x v) is zero for
// this shear).  dv_dt is provided in closed form.  Requires an integer
// lambda0 with 2 <= lambda0 <= g.K; throws er::Error otherwise.
Triple initial_triple(const ParamSet& P, Grid3 g);

// ---------------------------------------------------------------------------
// Grid placement of the oscillation frequency.
//
// The perturbation oscillates at frequency lambda_{q+1} * |k| with |k| =
// lambda_bar, and its products must stay inside the retained spectral ball:
// representing the construction on the grid needs
//     lambda_{q+1} * lambda_bar + 2 * lambda_q <= g.K.
// In strict mode a violation throws.  In toy mode the oscillation frequency
// is clamped to floor((g.K - 2 lambda_q) / lambda_bar) -- every amplitude
// (rho, a) still uses the true lambda_{q+1}, only the carrier frequency is
// reduced so the fields fit on the grid -- and a warning is recorded.  A
// clamp below 1 is an error even in toy mode.
// ---------------------------------------------------------------------------
std::int64_t oscillation_frequency(const ParamSet& P, int q, Grid3 g,
                                   int lambda_bar, bool toy_mode,
                                   std::vector<std::string>* warnings);

// ---------------------------------------------------------------------------
// Options of a single refinement step q -> q+1.
// ---------------------------------------------------------------------------
struct StepOptions {
  FlowOptions flow;      // characteristics of the mollified velocity
  SmoothOptions smooth;  // trajectory averaging of the stress (j = 0 cutoffs)
  // Carrier frequency of the perturbation; 0 = choose automatically via
  // oscillation_frequency (with toy clamping iff toy_mode is set).
  std::int64_t lambda_osc = 0;
  // Width of the five-point stencil that realizes d/dt w inside the new
  // stress; 0 = tau / 512.  The residual checker must use the same width for
  // its d/dt v_{q+1} so that the two stencils cancel exactly (Stepper::stress
  // takes the width explicitly for that purpose).
  double time_fd_dt = 0.0;
  // Toy mode: admissibility violations (stress/rho ratio beyond the
  // well-definedness radius, negative gamma arguments, oversized flow
  // windows) record warnings instead of throwing.
  bool toy_mode = false;
};

// ---------------------------------------------------------------------------
// The refinement step.  Construction precomputes the refined partition, the
// cutoff family, the wave set and the frequencies; field-level work happens
// lazily per evaluation time and is memoized (bounded caches), so repeated
// queries at the same time -- as made by the finite-difference stencils of
// the stress and of the residual checker -- cost one evaluation.
//
// All evaluation-time state lives behind a shared pointer: the providers of
// the Triple returned by next() keep it alive after the Stepper is gone.
// ---------------------------------------------------------------------------
class Stepper {
 public:
  // base.q is the level being improved; base providers must be callable for
  // any t in [0, 1].  Throws er::Error if the grid cannot represent the
  // construction (strict mode) or the partition cannot be refined.
  Stepper(const ParamSet& P, Grid3 g, Triple base, StepOptions opt = {});

  // Static geometry of the step.
  const RefinedPartition& refined() const;
  const CutoffFamily& cutoffs() const;
  const WaveSet& waves() const;
  std::int64_t lambda_next() const;  // true lambda_{q+1}
  std::int64_t lambda_osc() const;   // carrier frequency placed on the grid
  double ell() const;                // spatial mollification length
  double tau() const;                // trajectory-averaging half width
  double default_fd_dt() const;      // resolved time_fd_dt
  // Center of the support of cutoff s; the flow anchor of that cutoff.
  double anchor_time(int s) const;
  // Index j of cutoff s (inherited from its parent interval).
  int index_j(int s) const;
  // rho_s = 4 r0^{-1} lambda_{q+1}^{-2 beta_j(s)}; 0 for the two boundary
  // cutoffs by the endpoint convention.
  double rho(int s) const;

  // Warnings accumulated so far (toy clamps, admissibility violations, CFL).
  const std::vector<std::string>& warnings() const;

  // Mollified velocity at time t (cached).  Defined for any t; clamps t to
  // [0, 1] per the provider contract.
  const VectorField& v_ell(double t);

  // Per-cutoff evaluation at time t for an interior cutoff s with
  // chi_s(t) != 0: the inverse flow anchored at anchor_time(s), the
  // regularized stress (trajectory average for j = 0, transport along the
  // anchored flow for j >= 1), and the admissibility ratio
  // sup_x |Rs(x)| / rho (operator norm).
  struct CutoffData {
    int s = 0;
    int j = 0;
    double t = 0.0;
    double t_anchor = 0.0;
    double rho = 0.0;
    FlowMap phi;          // inverse flow: anchored coordinates at time t
    SymTensorField Rs;    // regularized stress
    double stress_ratio = 0.0;
    double transport_tail = 0.0;  // projection tail of the composition
  };
  const CutoffData& cutoff_data(int s, double t);

  // The perturbation at time t.  wo is the principal (Beltrami) part, wc the
  // corrector; w = wo + wc is exactly divergence-free and mean-free: the
  // solenoidal/mean projection residue of the assembled samples (a spectral
  // truncation tail) is absorbed into wc.  sum_chi2_R / sum_chi2_rho hold
  // sum_s chi_s(t)^2 Rs and sum_s chi_s(t)^2 rho_s over the active interior
  // cutoffs, reused by the stress assembly.
  struct Wave {
    double t = 0.0;
    VectorField wo, wc;
    SymTensorField sum_chi2_R;
    double sum_chi2_rho = 0.0;
    double max_stress_ratio = 0.0;
    std::vector<int> active;  // interior cutoffs with chi != 0
  };
  const Wave& wave(double t);
  // w = wo + wc of wave(t).
  VectorField w_field(double t);

  // New stress at time t.  fd_dt is the five-point stencil width for d/dt w
  // (<= 0 selects default_fd_dt()).  The algebraic structure guarantees, on
  // the stored fields and up to roundoff,
  //   d/dt v_{q+1} + div(v_{q+1} x v_{q+1}) + grad p_{q+1} - div R_{q+1} = S,
  // where d/dt is the same five-point stencil applied to v_{q+1} and S is
  // spatially constant (the stencil of the mean drift); so a residual check
  // with matching stencil width measures only the d/dt v_q stencil error,
  // which converges at fourth order.
  SymTensorField stress(double t, double fd_dt = 0.0);
  // Pressure increment of the step at time t: p_{q+1}(t) - p_q(t).
  Field pressure_increment(double t);

  // The next triple.  Its providers share this Stepper's state (and caches).
  Triple next();

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

}  // namespace er
