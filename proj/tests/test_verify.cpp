// The measurement harness: inductive-estimate records, the Euler-Reynolds
// residual with its step-halving order, energy / L1-Hoelder accounting, and
// the property suite for the supporting inequalities.
//
// Oracles are independent closed forms:
//  - the seed triple is a single-mode shear, so every record (measured value,
//    bound, ratio, hardness) is predictable to rounding: the weighted
//    velocity norm is 2 lambda0^{-beta0} nu(t), the stress norm is
//    3 sqrt(2) lambda0^{-beta0-1} |nu'(t)|, the advective norm reduces to the
//    time stencil of nu' (the advection term vanishes for a shear);
//  - a constant-amplitude eigenfield of curl with p = -|W|^2/2 solves the
//    Euler equations exactly on the grid, calibrating the residual floor;
//  - the stepped stress telescopes the residual to the d/dt stencil error of
//    the scalar seed profile, whose step-halving order is 4;
//  - the seed energy is (2pi)^3 lambda0^{-2 beta0} nu(t)^2 / 2, and the
//    one-mode spatial Hoelder seminorm obeys the sharp two-point bound
//    2^{1-a} ||v||_0^{1-a} ||v||_1^a, an upper envelope for the sampled
//    estimator;
//  - the slope windows of the property suite (2 for the mollification
//    commutator, -1 for the oscillatory anti-divergence, alpha - 2 for the
//    multiplier commutator) are analytic exponents, not tuned numbers.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "er/beltrami.hpp"
#include "er/error.hpp"
#include "er/field_ops.hpp"
#include "er/fields.hpp"
#include "er/iteration.hpp"
#include "er/params.hpp"
#include "er/timeline.hpp"
#include "er/transport.hpp"
#include "er/verify.hpp"

namespace {

constexpr double kTwoPiCubed = 248.05021344239853;  // (2 pi)^3

// Desk-scale parameter set: lambda0 = 4, lambda1 = ceil(4^1.5) = 8.
er::ParamSet toy4() {
  er::ParamSet P;
  P.eps = 0.1;
  P.b = 1.5;
  P.beta0 = 0.105;
  P.beta_inf = 0.3;
  P.beta_m1 = P.b * P.beta0 + (1.0 - P.b) * P.beta_inf;
  P.eps0 = 1e-3;
  P.lambda0 = 4;
  P.M = 3.0;
  P.toy_mode = true;
  return P;
}

// Five-point fourth-order first derivative, matching the harness stencil.
double fd5(const std::function<double(double)>& f, double t, double h) {
  return (f(t - 2 * h) - 8 * f(t - h) + 8 * f(t + h) - f(t + 2 * h)) /
         (12 * h);
}

const er::EstimateRecord& find_rec(const std::vector<er::EstimateRecord>& recs,
                                   int time_index, const std::string& q) {
  for (const auto& r : recs)
    if (r.time_index == time_index && r.quantity == q) return r;
  REQUIRE_MESSAGE(false, "record not found: ", q, " @ ", time_index);
  static er::EstimateRecord dummy;
  return dummy;
}

// A steady exact Euler solution: W a constant-amplitude eigenfield of curl
// (one wave family, unit frequency multiplier), p = -|W|^2 / 2, R = 0.
er::Triple steady_beltrami_triple(const er::Grid3& g) {
  const er::WaveSet ws = er::build_waveset();
  std::array<std::complex<double>, 6> a = {{{0.12, 0.03},
                                            {0.08, -0.02},
                                            {0.05, 0.01},
                                            {0.10, 0.00},
                                            {0.07, 0.04},
                                            {0.06, -0.05}}};
  const er::VectorField W = er::beltrami_field(ws, 0, a, 1, g);
  er::Field p = er::dot(W, W);
  p *= -0.5;
  er::Triple T;
  T.q = 0;
  T.partition = er::seed_partition();
  T.v = [W](double) { return W; };
  T.p = [p](double) { return p; };
  T.R = [g](double) { return er::make_tensor(g); };
  T.dv_dt = [g](double) { return er::make_vector(g); };
  return T;
}

}  // namespace

TEST_CASE("inductive records: seed triple closed forms") {
  const er::ParamSet P = toy4();
  const er::Grid3 g = er::Grid3::make(24);
  const er::Triple T = er::initial_triple(P, g);

  const double A = std::pow(4.0, -P.beta0);        // velocity amplitude
  const double cr = std::pow(4.0, -P.beta0 - 1.0); // stress amplitude
  const double l1 = 8.0;                           // lambda_1 = ceil(4^1.5)

  er::InductiveOptions opt;
  opt.times = {0.2, 0.41, 0.5, 0.57};
  const auto recs = er::check_inductive(T, T.partition, P, opt);

  // Six records per sample time.
  CHECK(recs.size() == opt.times.size() * 6);
  for (const auto& r : recs) {
    CHECK(std::isfinite(r.ratio));
    CHECK(r.ratio >= 0.0);
    CHECK(r.bound > 0.0);
    CHECK(r.effective_j == 0);  // every seed interval has index 0
  }

  // Region tags: 0.2 falls in the left boundary interval, the rest in the
  // single interior interval.
  CHECK(find_rec(recs, 0, "velocity_c1c2_local").region == "I[0]");
  CHECK(find_rec(recs, 2, "velocity_c1c2_local").region == "I[1]");

  const double dtv = er::tau(P, 0) / 512.0;  // default advective stencil
  for (int i = 0; i < static_cast<int>(opt.times.size()); ++i) {
    const double t = opt.times[static_cast<size_t>(i)];
    const double nu = er::initial_time_profile(t);
    const double nu1 = er::initial_time_profile_d1(t);

    // ||v||_1 / lambda0 + ||v||_2 / lambda0^2 = 2 A nu(t)  vs  M A.
    const auto& rv = find_rec(recs, i, "velocity_c1c2_local");
    CHECK(rv.hard);
    CHECK(rv.measured == doctest::Approx(2.0 * A * nu).epsilon(1e-10));
    CHECK(rv.bound == doctest::Approx(3.0 * A).epsilon(1e-12));
    CHECK(rv.ratio ==
          doctest::Approx(rv.measured / rv.bound).epsilon(1e-12));

    // p = 0: trivial pass with bound M^2 lambda0^{-2 beta0}.
    const auto& rp = find_rec(recs, i, "pressure_c1c2_local");
    CHECK(rp.hard);
    CHECK(rp.measured == 0.0);
    CHECK(rp.bound ==
          doctest::Approx(9.0 * std::pow(4.0, -2 * P.beta0)).epsilon(1e-12));
    CHECK(rp.ratio == 0.0);

    // Stress: 3 sqrt(2) lambda0^{-beta0-1} |nu'(t)|  vs  lambda1^{-2 beta0}.
    const auto& rr = find_rec(recs, i, "stress_c0c1c2");
    CHECK_FALSE(rr.hard);
    CHECK(rr.measured ==
          doctest::Approx(3.0 * std::sqrt(2.0) * cr * std::abs(nu1))
              .epsilon(1e-10));
    CHECK(rr.bound ==
          doctest::Approx(std::pow(l1, -2 * P.beta0)).epsilon(1e-12));

    // Advective norm: the advection term vanishes for the shear, so the
    // measured value is exactly the five-point stencil applied to nu'.
    const auto& ra = find_rec(recs, i, "stress_advective_c0");
    CHECK_FALSE(ra.hard);
    const double want =
        std::sqrt(2.0) * cr *
        std::abs(fd5(er::initial_time_profile_d1, t, dtv));
    CHECK(ra.measured == doctest::Approx(want).epsilon(1e-8));
    CHECK(ra.bound == doctest::Approx(std::pow(4.0, 1.0 - P.beta_m1) *
                                      std::pow(l1, -2 * P.beta0))
                          .epsilon(1e-12));

    // Global sup bounds.
    const auto& rgv = find_rec(recs, i, "velocity_c0_global");
    CHECK(rgv.hard);
    CHECK(rgv.measured == doctest::Approx(A * nu).epsilon(1e-10));
    CHECK(rgv.bound == doctest::Approx(3.0 * (1.0 + A)).epsilon(1e-12));

    const auto& rgp = find_rec(recs, i, "pressure_c0_global");
    CHECK(rgp.hard);
    CHECK(rgp.measured == 0.0);
    CHECK(rgp.bound ==
          doctest::Approx(9.0 * (1.0 + std::pow(4.0, -2 * P.beta0)))
              .epsilon(1e-12));
  }

  // The seed passes every M-calibrated bound with M = 3, while the
  // constant-free stress records exceed 1 at this desk scale (they shrink
  // below 1 only for large lambda0) -- the hard/soft split keeps them apart.
  const auto s = er::summarize(recs);
  CHECK(s.n == static_cast<int>(recs.size()));
  CHECK(s.hard_pass);
  CHECK(s.worst_hard_ratio == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
  CHECK(s.worst_ratio > 1.0);
  CHECK(s.worst_quantity == "stress_advective_c0");

  // Default sampling: one midpoint per interval plus the two interior
  // endpoints of the seed partition.
  er::InductiveOptions dopt;
  const auto drecs = er::check_inductive(T, T.partition, P, dopt);
  CHECK(drecs.size() == 5 * 6);

  // CSV: one header plus one line per record, stable column set.
  const std::string csv = er::records_csv(recs);
  CHECK(csv.rfind("time_index,time,region,effective_j,quantity,measured,"
                  "bound,ratio,hard\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') ==
        static_cast<long>(recs.size()) + 1);
  CHECK(csv.find("velocity_c1c2_local") != std::string::npos);
}

TEST_CASE("energy and L1-Hoelder accounting") {
  const er::ParamSet P = toy4();
  const er::Grid3 g = er::Grid3::make(24);
  const er::Triple T0 = er::initial_triple(P, g);
  const double A = std::pow(4.0, -P.beta0);
  const double alpha = 1.0 / 3.0 - P.eps;

  er::EnergyOptions eo;
  eo.energy_samples = 65;
  eo.holder_samples = 17;

  SUBCASE("seed level: closed forms") {
    const auto rep = er::energy_and_l1_holder({T0}, P, eo);

    REQUIRE(rep.levels.size() == 1);
    CHECK(rep.holder_exponent == doctest::Approx(alpha).epsilon(1e-15));
    CHECK(static_cast<int>(rep.energy.size()) == eo.energy_samples);

    // E(t) = (2pi)^3 lambda0^{-2 beta0} nu(t)^2 / 2 on the sample grid.
    for (const auto& es : rep.energy) {
      const double nu = er::initial_time_profile(es.time);
      const double want = 0.5 * kTwoPiCubed * A * A * nu * nu;
      if (want == 0.0) {
        CHECK(es.value == 0.0);
      } else {
        CHECK(es.value == doctest::Approx(want).epsilon(1e-11));
      }
    }
    CHECK(rep.e_half ==
          doctest::Approx(0.5 * kTwoPiCubed * A * A).epsilon(1e-11));
    CHECK(rep.levels[0].e_half == rep.e_half);
    CHECK(rep.levels[0].q == 0);

    // Support: the seed vanishes outside (3/8, 5/8), well inside the
    // level-0 window [1/4, 3/4].
    CHECK(rep.levels[0].outside_max == 0.0);
    CHECK(rep.levels[0].support_pass);
    CHECK(rep.all_support_pass);

    // Majorant with one level: |V_0| lambda0^{1/3 - eps - beta_{-1}} and
    // |V_0| = 1/4 (the single interior interval).
    const double term0 =
        0.25 * std::pow(4.0, 1.0 / 3.0 - P.eps - P.beta_m1);
    CHECK(rep.levels[0].majorant_term ==
          doctest::Approx(term0).epsilon(1e-12));
    CHECK(rep.majorant == doctest::Approx(term0).epsilon(1e-12));

    // L1 Hoelder estimate: the sampled seminorm of the one-mode shear obeys
    // [v(t)]_a <= 2^{1-a} ||v||_0^{1-a} ||v||_1^a = 2^{1-a} A nu lambda0^a,
    // and with 17 uniform nodes the time quadrature of nu is exact (3/16),
    // so the measured integral sits in a fixed fraction of the envelope.
    const double envelope =
        std::pow(2.0, 1.0 - alpha) * A * std::pow(4.0, alpha) * (3.0 / 16.0);
    CHECK(rep.l1_holder > 0.6 * envelope);
    CHECK(rep.l1_holder <= envelope * (1.0 + 1e-9));
  }

  SUBCASE("second level: majorant terms from the partition; a level without "
          "compact support is flagged") {
    const er::Partition part1 =
        er::next_partition(er::refine_intervals(er::seed_partition(), P));

    // Static synthetic level: nonzero for all t, so the support check must
    // fail; its energy is time-independent with a closed form.
    er::VectorField vs = er::make_vector(g);
    vs[0].set_mode_pair(0, 0, 2, {0.25, 0.0});
    vs[1].set_mode_pair(0, 0, 2, {0.0, -0.25});
    vs[2].set_mode_pair(2, 0, 0, {0.0, -0.20});
    er::Triple T1;
    T1.q = 1;
    T1.partition = part1;
    T1.v = [vs](double) { return vs; };
    T1.p = [g](double) { return er::Field(g); };
    T1.R = [g](double) { return er::make_tensor(g); };

    er::EnergyOptions fast = eo;
    fast.energy_samples = 17;
    fast.holder_samples = 5;
    const auto rep = er::energy_and_l1_holder({T0, T1}, P, fast);

    REQUIRE(rep.levels.size() == 2);
    CHECK(rep.levels[0].support_pass);
    CHECK_FALSE(rep.levels[1].support_pass);
    CHECK_FALSE(rep.all_support_pass);
    CHECK(rep.levels[1].outside_max > 0.0);

    // E = (2pi)^3 (2 * 0.0625 + 2 * 0.0625 + 2 * 0.04) / 2 at every time.
    const double e1 = 0.5 * kTwoPiCubed * 0.33;
    CHECK(rep.e_half == doctest::Approx(e1).epsilon(1e-11));
    CHECK(rep.levels[1].e_half == doctest::Approx(e1).epsilon(1e-11));

    // Majorant term of the refined level, recomputed here from the interval
    // measures of the actual partition.
    double v0 = 0.0, v1 = 0.0;
    for (size_t i = 1; i + 1 < part1.I.size(); ++i) {
      const auto& iv = part1.I[i];
      (iv.j == 0 ? v0 : v1) += iv.length();
      REQUIRE(iv.j <= 1);
    }
    const double lam1 = 8.0;
    const double term1 =
        v0 * std::pow(lam1, 1.0 / 3.0 - P.eps - P.beta_m1) +
        v1 * std::pow(lam1, 1.0 / 3.0 - P.eps - P.beta0);
    CHECK(rep.levels[1].majorant_term ==
          doctest::Approx(term1).epsilon(1e-12));
    CHECK(rep.majorant ==
          doctest::Approx(rep.levels[0].majorant_term + term1)
              .epsilon(1e-12));
  }
}

TEST_CASE("residual: exact solutions, stepped telescoping, halving order") {
  const er::ParamSet P = toy4();

  // (a) Steady eigenfield of curl with p = -|W|^2/2: an exact Euler
  // solution representable on the grid; calibrates the harness floor.
  {
    const er::Grid3 g = er::Grid3::make(48);
    const er::Triple Tb = steady_beltrami_triple(g);
    er::ResidualOptions ro;
    ro.times = {0.3, 0.55};
    const auto rep = er::residual(Tb, ro);
    CHECK(rep.exact_time_derivative);
    REQUIRE(rep.samples.size() == 2);
    for (const auto& s : rep.samples) CHECK(s.value < 1e-9);
    CHECK(rep.sup < 1e-9);
  }

  // (b) The seed triple: closed-form time derivative, residual at rounding.
  {
    const er::Grid3 g = er::Grid3::make(24);
    const er::Triple T0 = er::initial_triple(P, g);
    er::ResidualOptions ro;
    ro.times = {0.2, 0.41, 0.5, 0.61};
    const auto rep = er::residual(T0, ro);
    CHECK(rep.exact_time_derivative);
    CHECK(rep.sup < 1e-10);
  }

  // (c) One toy step: the shared-stencil residual telescopes to the d/dt
  // stencil error of the scalar profile; halving the width divides it by
  // ~16 (fourth order).
  {
    const er::Grid3 g = er::Grid3::make(48);
    const er::Triple T0 = er::initial_triple(P, g);
    er::StepOptions so;
    so.toy_mode = true;
    er::Stepper st(P, g, T0, so);
    er::Triple T1 = st.next();
    REQUIRE(static_cast<bool>(T1.R_fd));
    CHECK_FALSE(static_cast<bool>(T1.dv_dt));

    const double t = 0.41, h = 2.5e-3;
    er::ResidualOptions ro;
    ro.times = {t};
    ro.fd_dt = h;
    ro.order_study = true;
    const auto rep = er::residual(T1, ro);
    CHECK_FALSE(rep.exact_time_derivative);
    REQUIRE(rep.samples.size() == 1);

    const double amp = std::pow(4.0, -P.beta0);
    const double want =
        std::abs(fd5(er::initial_time_profile, t, h) -
                 er::initial_time_profile_d1(t)) * amp;
    CHECK(rep.samples[0].value == doctest::Approx(want).epsilon(1e-3));
    const double want_half =
        std::abs(fd5(er::initial_time_profile, t, h / 2) -
                 er::initial_time_profile_d1(t)) * amp;
    CHECK(rep.samples[0].value_half ==
          doctest::Approx(want_half).epsilon(1e-3));
    CHECK(rep.samples[0].order > 3.5);
    CHECK(rep.samples[0].order < 4.5);
    CHECK(rep.min_order > 3.5);

    // Stencil underflow is a hard error.
    er::ResidualOptions bad;
    bad.times = {t};
    bad.fd_dt = 1e-10;
    CHECK_THROWS_WITH_AS(er::residual(T1, bad),
                         doctest::Contains("underflow"), er::Error);

    // Energy accounting across the real step: positive at t = 1/2,
    // compactly supported within the level-1 window.
    er::EnergyOptions eo;
    eo.energy_samples = 9;
    eo.holder_samples = 3;
    const auto erep = er::energy_and_l1_holder({T0, T1}, P, eo);
    REQUIRE(erep.levels.size() == 2);
    CHECK(erep.levels[0].e_half > 0.0);
    CHECK(erep.levels[1].e_half > 0.0);
    CHECK(erep.levels[1].e_half > erep.levels[0].e_half);
    CHECK(erep.all_support_pass);
    CHECK(erep.l1_holder > 0.0);
    CHECK(erep.majorant > 0.0);
  }
}

TEST_CASE("appendix property suite: slopes, trivial cases, transport "
          "inequalities, reported constants") {
  const er::ParamSet P = toy4();
  const er::Grid3 g = er::Grid3::make(48);
  const auto rep = er::appendix_suite(g, P);

  // Mollification commutator: quadratic in the mollification length.
  REQUIRE(rep.cet.x.size() >= 5);
  CHECK(rep.cet.slope > 1.8);
  CHECK(rep.cet.slope < 2.2);
  CHECK(rep.cet_trivial < 1e-12);
  CHECK(rep.cet_pass);

  // Oscillatory anti-divergence: one inverse power of the frequency; the
  // averaged-integral bounds hold outright, and a constant amplitude has a
  // zero average at nonzero frequency.
  REQUIRE(rep.stat_phase.x.size() >= 3);
  CHECK(rep.stat_phase.slope <= -0.9);
  CHECK(rep.sp_worst_integral_ratio <= 1.0);
  CHECK(rep.sp_worst_integral_ratio > 0.05);
  CHECK(rep.sp_trivial == 0.0);
  CHECK(rep.stat_phase_pass);

  // Multiplier commutator with the anti-divergence: order alpha - 2.
  CHECK(rep.holder_alpha == doctest::Approx(P.eps / 2).epsilon(1e-15));
  CHECK(rep.commutator.slope <= -2.0 + rep.holder_alpha + 0.1);
  CHECK(rep.commutator_pass);

  // Transport along an integrated flow: sup and gradient growth within the
  // explicit-constant bounds (5% numerical allowance), and the Jacobian of
  // the inverse flow within exp(L dt) - 1 of the identity.
  CHECK(rep.transport_sup_ratio <= 1.05);
  CHECK(rep.transport_sup_ratio > 0.5);
  CHECK(rep.transport_grad_ratio <= 1.05);
  CHECK(rep.transport_grad_ratio > 0.1);
  CHECK(rep.flow_jacobian_ratio <= 1.05);
  CHECK(rep.flow_jacobian_ratio > 0.02);
  CHECK(rep.transport_pass);

  // Reported constants: finite, positive, unspectacular.
  CHECK(rep.schauder_r_const > 0.01);
  CHECK(rep.schauder_r_const < 100.0);
  CHECK(rep.schauder_rdiv_const > 0.01);
  CHECK(rep.schauder_rdiv_const < 100.0);
  CHECK(rep.product_rule_const > 0.01);
  CHECK(rep.product_rule_const < 10.0);

  CHECK(rep.hard_pass);

  // JSON summary carries the headline numbers.
  const std::string j = er::appendix_json(rep);
  CHECK(j.find("\"cet\"") != std::string::npos);
  CHECK(j.find("\"slope\"") != std::string::npos);
  CHECK(j.find("\"hard_pass\"") != std::string::npos);
}
