#include "er/iteration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <utility>

#include "er/error.hpp"
#include "er/field_ops.hpp"

namespace er {

namespace {

double clamp01(double t) { return t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t); }

// The seed profile ramps over [3/8, 7/16] and [9/16, 5/8], both of width
// 1/16, around a plateau at 1.
constexpr double kRiseLo = 0.375;     // 3/8
constexpr double kPlateauLo = 0.4375; // 7/16
constexpr double kPlateauHi = 0.5625; // 9/16
constexpr double kFallHi = 0.625;     // 5/8
constexpr double kRate = 16.0;        // inverse ramp width

std::string fmt(const char* f, ...) {
  char buf[256];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return std::string(buf);
}

}  // namespace

double initial_time_profile(double t) {
  if (t <= kRiseLo || t >= kFallHi) return 0.0;
  if (t < kPlateauLo) return ramp_profile((t - kRiseLo) * kRate);
  if (t <= kPlateauHi) return 1.0;
  return ramp_profile((kFallHi - t) * kRate);
}

double initial_time_profile_d1(double t) {
  if (t <= kRiseLo || t >= kFallHi) return 0.0;
  if (t < kPlateauLo) return kRate * ramp_profile_d1((t - kRiseLo) * kRate);
  if (t <= kPlateauHi) return 0.0;
  return -kRate * ramp_profile_d1((kFallHi - t) * kRate);
}

double initial_time_profile_d2(double t) {
  if (t <= kRiseLo || t >= kFallHi) return 0.0;
  if (t < kPlateauLo)
    return kRate * kRate * ramp_profile_d2((t - kRiseLo) * kRate);
  if (t <= kPlateauHi) return 0.0;
  return kRate * kRate * ramp_profile_d2((kFallHi - t) * kRate);
}

Triple initial_triple(const ParamSet& P, Grid3 g) {
  const double l0d = P.lambda0;
  const int l0 = static_cast<int>(std::llround(l0d));
  if (static_cast<double>(l0) != l0d || l0 < 2)
    throw Error("initial_triple: lambda0 must be an integer >= 2");
  if (l0 > g.K)
    throw Error(fmt(
        "initial_triple: lambda0 = %d exceeds the grid's spectral ball K = %d",
        l0, g.K));

  const double amp = std::pow(l0d, -P.beta0);        // velocity amplitude
  const double cr = std::pow(l0d, -P.beta0 - 1.0);   // stress amplitude

  Triple T;
  T.q = 0;
  T.partition = seed_partition();

  // v = amp * nu(t) * (cos(l0 x3), sin(l0 x3), 0)
  auto shear = [g, l0](double scale) {
    VectorField v = make_vector(g);
    v[0].set_mode_pair(0, 0, l0, {0.5 * scale, 0.0});
    v[1].set_mode_pair(0, 0, l0, {0.0, -0.5 * scale});
    return v;
  };
  T.v = [shear, amp](double t) { return shear(amp * initial_time_profile(t)); };
  T.dv_dt = [shear, amp](double t) {
    return shear(amp * initial_time_profile_d1(t));
  };
  T.p = [g](double) { return Field(g); };
  // R has the two off-diagonal slots (xz, yz) = cr nu'(t) (sin l0 x3,
  // -cos l0 x3); then div R = d/dt v exactly, row by row.
  T.R = [g, l0, cr](double t) {
    const double c = cr * initial_time_profile_d1(t);
    SymTensorField R = make_tensor(g);
    R.comp(0, 2).set_mode_pair(0, 0, l0, {0.0, -0.5 * c});
    R.comp(1, 2).set_mode_pair(0, 0, l0, {-0.5 * c, 0.0});
    return R;
  };
  return T;
}

std::int64_t oscillation_frequency(const ParamSet& P, int q, Grid3 g,
                                   int lambda_bar, bool toy_mode,
                                   std::vector<std::string>* warnings) {
  const std::int64_t lam_q = lambda(P, q);
  const std::int64_t lam_nx = lambda(P, q + 1);
  const std::int64_t budget = static_cast<std::int64_t>(g.K) - 2 * lam_q;
  if (lam_nx * lambda_bar <= budget) return lam_nx;
  if (!toy_mode)
    throw Error(fmt("oscillation_frequency: lambda_{q+1} lambda_bar + "
                    "2 lambda_q = %lld exceeds the spectral ball K = %d",
                    static_cast<long long>(lam_nx * lambda_bar + 2 * lam_q),
                    g.K));
  const std::int64_t clamped = budget / lambda_bar;
  if (clamped < 1)
    throw Error(fmt("oscillation_frequency: grid with K = %d cannot host any "
                    "carrier above the level-%d band (lambda_q = %lld)",
                    g.K, q, static_cast<long long>(lam_q)));
  if (warnings)
    warnings->push_back(
        fmt("toy mode: oscillation carrier clamped to %lld (true "
            "lambda_{q+1} = %lld, lambda_bar = %d, K = %d)",
            static_cast<long long>(clamped), static_cast<long long>(lam_nx),
            lambda_bar, g.K));
  return clamped;
}

// ---------------------------------------------------------------------------
// Stepper
// ---------------------------------------------------------------------------

struct Stepper::Impl {
  ParamSet P;
  Grid3 g;
  Triple base;
  StepOptions opt;
  int q = 0;
  RefinedPartition ref;
  CutoffFamily cuts;
  Partition pnext;
  WaveSet ws;

  std::int64_t lam_q = 0, lam_nx = 0, losc = 0;
  double ell_len = 0.0, tau_len = 0.0, fd_default = 0.0;
  std::vector<double> anchors, rhos;
  std::vector<std::string> warn;

  struct VlEnt {
    double t;
    VectorField v;
  };
  std::deque<VlEnt> vl_cache;
  std::deque<std::shared_ptr<CutoffData>> cd_cache;
  std::deque<std::shared_ptr<Wave>> wv_cache;

  Impl(const ParamSet& P_, Grid3 g_, Triple base_, StepOptions opt_)
      : P(P_),
        g(g_),
        base(std::move(base_)),
        opt(opt_),
        q(base.q),
        ref(refine_intervals(base.partition, P_)),
        cuts(ref),
        pnext(next_partition(ref)),
        ws(build_waveset()) {
    // One toy switch governs every guard of the step.
    opt.flow.toy_mode = opt.toy_mode;
    opt.smooth.flow.toy_mode = opt.toy_mode;

    lam_q = lambda(P, q);
    lam_nx = lambda(P, q + 1);
    if (opt.lambda_osc > 0) {
      if (opt.lambda_osc * ws.lambda_bar + 2 * lam_q > g.K)
        throw Error(fmt("Stepper: requested carrier %lld does not fit the "
                        "spectral ball K = %d",
                        static_cast<long long>(opt.lambda_osc), g.K));
      losc = opt.lambda_osc;
      if (losc != lam_nx)
        warn.push_back(fmt("carrier frequency %lld overrides the true "
                           "lambda_{q+1} = %lld",
                           static_cast<long long>(losc),
                           static_cast<long long>(lam_nx)));
    } else {
      losc = oscillation_frequency(P, q, g, ws.lambda_bar, opt.toy_mode, &warn);
    }
    ell_len = er::ell(P, q);
    tau_len = er::tau(P, q);
    fd_default = opt.time_fd_dt > 0.0 ? opt.time_fd_dt : tau_len / 512.0;

    warn.insert(warn.end(), ref.warnings.begin(), ref.warnings.end());

    const int n = cuts.size();
    anchors.resize(static_cast<size_t>(n));
    rhos.assign(static_cast<size_t>(n), 0.0);
    for (int s = 0; s < n; ++s) {
      anchors[static_cast<size_t>(s)] =
          0.5 * (tick_time(cuts.support_lo(s)) + tick_time(cuts.support_hi(s)));
      if (s >= 1 && s + 1 < n)
        rhos[static_cast<size_t>(s)] =
            (4.0 / ws.r0) * delta(P, q + 1, ref.J[static_cast<size_t>(s)].j);
    }
  }

  VectorProvider vl_provider() {
    // The provider is only handed to transport calls that finish within a
    // method of this Impl, so the raw capture is safe.
    return [this](double t) { return v_ell_at(t); };
  }

  TensorProvider rl_provider() {
    return [this](double t) { return mollify(base.R(clamp01(t)), ell_len); };
  }

  const VectorField& v_ell_at(double t) {
    const double tc = clamp01(t);
    for (auto& e : vl_cache)
      if (e.t == tc) return e.v;
    vl_cache.push_back({tc, mollify(base.v(tc), ell_len)});
    if (vl_cache.size() > 8) vl_cache.pop_front();
    return vl_cache.back().v;
  }

  std::shared_ptr<const CutoffData> cutoff_data_at(int s, double t) {
    for (auto& e : cd_cache)
      if (e->s == s && e->t == t) return e;
    if (s <= 0 || s + 1 >= cuts.size())
      throw Error("cutoff_data: boundary cutoffs carry no field data");

    auto cd = std::make_shared<CutoffData>();
    cd->s = s;
    cd->t = t;
    cd->j = ref.J[static_cast<size_t>(s)].j;
    cd->t_anchor = anchors[static_cast<size_t>(s)];
    cd->rho = rhos[static_cast<size_t>(s)];

    const VectorProvider vp = vl_provider();
    cd->phi = inverse_flow(vp, g, cd->t_anchor, t, opt.flow);
    warn.insert(warn.end(), cd->phi.warnings.begin(), cd->phi.warnings.end());

    if (cd->j == 0) {
      SmoothOptions so = opt.smooth;
      so.warn_sink = &warn;
      cd->Rs = smooth_reynolds_average(rl_provider(), vp, g, t, tau_len, so);
    } else {
      cd->Rs = smooth_reynolds_transport(
          mollify(base.R(clamp01(cd->t_anchor)), ell_len), cd->phi,
          &cd->transport_tail);
    }

    // Admissibility: sup |Rs|_op / rho must stay within the radius where the
    // amplitude functionals are defined.
    std::array<PhysicalField, 6> rp;
    for (int c = 0; c < 6; ++c)
      to_phys_into(cd->Rs.c[static_cast<size_t>(c)], rp[static_cast<size_t>(c)]);
    double mx = 0.0;
    const std::int64_t np = g.n_phys();
    for (std::int64_t n = 0; n < np; ++n) {
      const Sym3 m = {rp[0].v[static_cast<size_t>(n)],
                      rp[3].v[static_cast<size_t>(n)],
                      rp[5].v[static_cast<size_t>(n)],
                      rp[1].v[static_cast<size_t>(n)],
                      rp[2].v[static_cast<size_t>(n)],
                      rp[4].v[static_cast<size_t>(n)]};
      mx = std::max(mx, sym3_op_norm(m));
    }
    cd->stress_ratio = mx / cd->rho;
    const double lim = ws.r0 / 4.0;
    if (cd->stress_ratio > lim * (1.0 + 1e-12)) {
      const std::string msg =
          fmt("cutoff %d at t = %.6f: stress/rho ratio %.3e exceeds the "
              "well-definedness radius r0/4 = %.3e",
              s, t, cd->stress_ratio, lim);
      if (!opt.toy_mode) throw Error(msg);
      warn.push_back("toy mode: " + msg);
    }

    cd_cache.push_back(cd);
    if (cd_cache.size() > 3) cd_cache.pop_front();
    return cd;
  }

  // Adds the contribution of one cutoff to the physical sample accumulators
  // of the principal wave and of the corrector.
  void accumulate_cutoff(const CutoffData& cd, double chi,
                         std::array<std::vector<double>, 3>& wo_p,
                         std::array<std::vector<double>, 3>& wc_p) {
    const WaveFamily& fam = ws.family[static_cast<size_t>(cd.s % 2)];
    const double rho_s = cd.rho;
    const double sqrho = std::sqrt(rho_s);
    const double inv_rho = 1.0 / rho_s;
    const double losc_d = static_cast<double>(losc);
    const double lb2 =
        static_cast<double>(ws.lambda_bar) * static_cast<double>(ws.lambda_bar);
    const double h = g.h();
    const std::int64_t np = g.n_phys();

    std::array<PhysicalField, 6> rp;
    for (int c = 0; c < 6; ++c)
      to_phys_into(cd.Rs.c[static_cast<size_t>(c)], rp[static_cast<size_t>(c)]);
    const FlowJacobian dphi = flow_jacobian(cd.phi);

    long clamped = 0;
    double min_g = 1e300;
    std::vector<double> a(static_cast<size_t>(np));
    PhysicalField pa;
    pa.g = g;
    std::array<PhysicalField, 3> ga;

    for (int p = 0; p < 6; ++p) {
      const auto& row = fam.g[static_cast<size_t>(p)];
      // Affine amplitude functional of M = Id - Rs/rho; Sym3 packing is
      // (xx, yy, zz, xy, xz, yz), tensor storage is (xx, xy, xz, yy, yz, zz).
      const double gid = row[0] + row[1] + row[2];
      for (std::int64_t n = 0; n < np; ++n) {
        const size_t u = static_cast<size_t>(n);
        const double gv =
            gid - inv_rho * (row[0] * rp[0].v[u] + row[1] * rp[3].v[u] +
                             row[2] * rp[5].v[u] + row[3] * rp[1].v[u] +
                             row[4] * rp[2].v[u] + row[5] * rp[4].v[u]);
        min_g = std::min(min_g, gv);
        if (gv > 0.0) {
          a[u] = sqrho * std::sqrt(gv);
        } else {
          a[u] = 0.0;
          ++clamped;
        }
      }
      // Spectral gradient of the stored amplitude.
      pa.v = a;
      const VectorField ga_spec = grad(from_phys(pa));
      for (int i = 0; i < 3; ++i)
        to_phys_into(ga_spec[static_cast<size_t>(i)],
                     ga[static_cast<size_t>(i)]);

      const WavePair& pr = fam.pairs[static_cast<size_t>(p)];
      const double kv[3] = {static_cast<double>(pr.k[0]),
                            static_cast<double>(pr.k[1]),
                            static_cast<double>(pr.k[2])};
      const double Br[3] = {pr.B[0].real(), pr.B[1].real(), pr.B[2].real()};
      const double Bi[3] = {pr.B[0].imag(), pr.B[1].imag(), pr.B[2].imag()};
      // (k x B) / |k|^2, complex.
      double kbr[3], kbi[3];
      kbr[0] = (kv[1] * Br[2] - kv[2] * Br[1]) / lb2;
      kbr[1] = (kv[2] * Br[0] - kv[0] * Br[2]) / lb2;
      kbr[2] = (kv[0] * Br[1] - kv[1] * Br[0]) / lb2;
      kbi[0] = (kv[1] * Bi[2] - kv[2] * Bi[1]) / lb2;
      kbi[1] = (kv[2] * Bi[0] - kv[0] * Bi[2]) / lb2;
      kbi[2] = (kv[0] * Bi[1] - kv[1] * Bi[0]) / lb2;

      const double two_chi = 2.0 * chi;
      std::int64_t n = 0;
      for (int ix = 0; ix < g.N; ++ix)
        for (int iy = 0; iy < g.N; ++iy)
          for (int iz = 0; iz < g.N; ++iz, ++n) {
            const size_t u = static_cast<size_t>(n);
            const double kd =
                h * (kv[0] * ix + kv[1] * iy + kv[2] * iz) +
                kv[0] * cd.phi.disp[0].v[u] + kv[1] * cd.phi.disp[1].v[u] +
                kv[2] * cd.phi.disp[2].v[u];
            const double th = losc_d * kd;
            const double cth = std::cos(th), sth = std::sin(th);
            const double an = a[u];

            // Principal part: 2 chi a Re(B e^{i th}).
            for (int i = 0; i < 3; ++i)
              wo_p[static_cast<size_t>(i)][u] +=
                  two_chi * an * (Br[i] * cth - Bi[i] * sth);

            // Corrector integrand c1 = i grad(a)/losc - a (DPhi - Id) k.
            double c1r[3], c1i[3];
            for (int i = 0; i < 3; ++i) {
              const double mi =
                  dphi.d[static_cast<size_t>(i)][0].v[u] * kv[0] +
                  dphi.d[static_cast<size_t>(i)][1].v[u] * kv[1] +
                  dphi.d[static_cast<size_t>(i)][2].v[u] * kv[2] - kv[i];
              c1r[i] = -an * mi;
              c1i[i] = ga[static_cast<size_t>(i)].v[u] / losc_d;
            }
            // e = c1 x (k x B)/|k|^2, complex cross product.
            double er[3], ei[3];
            er[0] = c1r[1] * kbr[2] - c1r[2] * kbr[1] -
                    (c1i[1] * kbi[2] - c1i[2] * kbi[1]);
            er[1] = c1r[2] * kbr[0] - c1r[0] * kbr[2] -
                    (c1i[2] * kbi[0] - c1i[0] * kbi[2]);
            er[2] = c1r[0] * kbr[1] - c1r[1] * kbr[0] -
                    (c1i[0] * kbi[1] - c1i[1] * kbi[0]);
            ei[0] = c1r[1] * kbi[2] - c1r[2] * kbi[1] + c1i[1] * kbr[2] -
                    c1i[2] * kbr[1];
            ei[1] = c1r[2] * kbi[0] - c1r[0] * kbi[2] + c1i[2] * kbr[0] -
                    c1i[0] * kbr[2];
            ei[2] = c1r[0] * kbi[1] - c1r[1] * kbi[0] + c1i[0] * kbr[1] -
                    c1i[1] * kbr[0];
            for (int i = 0; i < 3; ++i)
              wc_p[static_cast<size_t>(i)][u] +=
                  two_chi * (er[i] * cth - ei[i] * sth);
          }
    }

    if (clamped > 0) {
      const std::string msg =
          fmt("cutoff %d at t = %.6f: amplitude functional nonpositive at %ld "
              "sample(s), min value %.3e; amplitudes clamped to zero",
              cd.s, cd.t, clamped, min_g);
      if (!opt.toy_mode) throw Error(msg);
      warn.push_back("toy mode: " + msg);
    }
  }

  std::shared_ptr<const Wave> wave_at(double t) {
    for (auto& e : wv_cache)
      if (e->t == t) return e;

    auto wv = std::make_shared<Wave>();
    wv->t = t;
    wv->sum_chi2_R = make_tensor(g);

    const std::int64_t np = g.n_phys();
    std::array<std::vector<double>, 3> wo_p, wc_p;
    for (int i = 0; i < 3; ++i) {
      wo_p[static_cast<size_t>(i)].assign(static_cast<size_t>(np), 0.0);
      wc_p[static_cast<size_t>(i)].assign(static_cast<size_t>(np), 0.0);
    }

    for (int s = 1; s + 1 < cuts.size(); ++s) {
      const double chi = cuts.value(s, t);
      if (chi == 0.0) continue;
      wv->active.push_back(s);
      const auto cd = cutoff_data_at(s, t);
      wv->sum_chi2_rho += chi * chi * cd->rho;
      {
        SymTensorField tmp = cd->Rs;
        tmp *= chi * chi;
        wv->sum_chi2_R += tmp;
      }
      wv->max_stress_ratio = std::max(wv->max_stress_ratio, cd->stress_ratio);
      accumulate_cutoff(*cd, chi, wo_p, wc_p);
    }

    PhysicalField tmp;
    tmp.g = g;
    VectorField wo = make_vector(g), wsum = make_vector(g);
    for (int i = 0; i < 3; ++i) {
      tmp.v = std::move(wo_p[static_cast<size_t>(i)]);
      wo[static_cast<size_t>(i)] = from_phys(tmp);
      tmp.v = std::move(wc_p[static_cast<size_t>(i)]);
      wsum[static_cast<size_t>(i)] = from_phys(tmp);
      wsum[static_cast<size_t>(i)] += wo[static_cast<size_t>(i)];
    }
    // The assembled samples are divergence-free only up to the spectral
    // truncation tail of the phases; the residue is absorbed into the
    // corrector so that w is exactly solenoidal and mean-free.
    wsum = leray(wsum);
    for (int i = 0; i < 3; ++i) {
      wsum[static_cast<size_t>(i)].set(0, 0, 0, 0.0);
      wv->wc[static_cast<size_t>(i)] =
          wsum[static_cast<size_t>(i)] - wo[static_cast<size_t>(i)];
    }
    wv->wo = std::move(wo);

    wv_cache.push_back(wv);
    if (wv_cache.size() > 8) wv_cache.pop_front();
    return wv;
  }

  VectorField bundle_w(const Wave& wv) {
    VectorField w = wv.wo;
    for (int i = 0; i < 3; ++i) w[static_cast<size_t>(i)] += wv.wc[static_cast<size_t>(i)];
    return w;
  }

  SymTensorField stress_at(double t, double fd) {
    if (fd <= 0.0) fd = fd_default;
    const auto c0 = wave_at(t);
    const auto m2 = wave_at(t - 2.0 * fd);
    const auto m1 = wave_at(t - fd);
    const auto p1 = wave_at(t + fd);
    const auto p2 = wave_at(t + 2.0 * fd);

    // Five-point fourth-order d/dt of the stored perturbation.
    const double a1 = 8.0 / (12.0 * fd), a2 = 1.0 / (12.0 * fd);
    VectorField wm2 = bundle_w(*m2), wm1 = bundle_w(*m1);
    VectorField wp1 = bundle_w(*p1), wp2 = bundle_w(*p2);
    VectorField dw = make_vector(g);
    for (int i = 0; i < 3; ++i) {
      const size_t u = static_cast<size_t>(i);
      dw[u] = (wm2[u] - wp2[u]) * a2 + (wp1[u] - wm1[u]) * a1;
    }

    const VectorField Vl = v_ell_at(t);  // copy: cache entries can rotate
    const VectorField Vq = base.v(clamp01(t));
    const VectorField W0 = bundle_w(*c0);

    // Transport part, in divergence form so the update telescopes exactly
    // against div(v_{q+1} x v_{q+1}) on the stored fields.
    SymTensorField so = sym_outer(Vl, W0);
    so *= 2.0;
    VectorField arg0 = divergence(so);
    for (int i = 0; i < 3; ++i) arg0[static_cast<size_t>(i)] += dw[static_cast<size_t>(i)];
    SymTensorField out = inverse_divergence(arg0);

    // Oscillation part: wo x wo minus the stress it was built to cancel.
    {
      SymTensorField t1 = sym_outer(c0->wo, c0->wo);
      t1 += c0->sum_chi2_R;
      Field iso = dot(c0->wo, c0->wo);
      iso *= -0.5;
      iso.add(0, 0, 0, -c0->sum_chi2_rho);
      t1 = add_isotropic(std::move(t1), iso);
      out += inverse_divergence(divergence(t1));
    }

    // Corrector part (deviatoric by construction).
    {
      SymTensorField t2 = sym_outer(c0->wo, c0->wc);
      t2 *= 2.0;
      t2 += sym_outer(c0->wc, c0->wc);
      Field iso = dot(c0->wc, c0->wc) + dot(c0->wo, c0->wc) * 2.0;
      iso *= -1.0 / 3.0;
      out += add_isotropic(std::move(t2), iso);
    }

    // Mollification gap of the transport velocity.
    {
      VectorField dv = Vq;
      for (int i = 0; i < 3; ++i) dv[static_cast<size_t>(i)] -= Vl[static_cast<size_t>(i)];
      SymTensorField t3 = sym_outer(W0, dv);
      t3 *= 2.0;
      Field iso = dot(dv, W0) * (-2.0 / 3.0);
      out += add_isotropic(std::move(t3), iso);
    }

    // Smoothing gap of the stress itself.
    {
      SymTensorField t4 = base.R(clamp01(t));
      t4 -= c0->sum_chi2_R;
      out += t4;
    }
    return out;
  }

  Field pressure_increment_at(double t) {
    const auto c0 = wave_at(t);
    const VectorField Vl = v_ell_at(t);
    const VectorField Vq = base.v(clamp01(t));
    const VectorField W0 = bundle_w(*c0);
    VectorField dv = Vq;
    for (int i = 0; i < 3; ++i) dv[static_cast<size_t>(i)] -= Vl[static_cast<size_t>(i)];

    Field out = dot(c0->wo, c0->wo) * (-0.5);
    out += dot(c0->wc, c0->wc) * (-1.0 / 3.0);
    out += dot(c0->wo, c0->wc) * (-2.0 / 3.0);
    out += dot(dv, W0) * (-2.0 / 3.0);
    return out;
  }
};

Stepper::Stepper(const ParamSet& P, Grid3 g, Triple base, StepOptions opt)
    : impl_(std::make_shared<Impl>(P, g, std::move(base), opt)) {}

const RefinedPartition& Stepper::refined() const { return impl_->ref; }
const CutoffFamily& Stepper::cutoffs() const { return impl_->cuts; }
const WaveSet& Stepper::waves() const { return impl_->ws; }
std::int64_t Stepper::lambda_next() const { return impl_->lam_nx; }
std::int64_t Stepper::lambda_osc() const { return impl_->losc; }
double Stepper::ell() const { return impl_->ell_len; }
double Stepper::tau() const { return impl_->tau_len; }
double Stepper::default_fd_dt() const { return impl_->fd_default; }

double Stepper::anchor_time(int s) const {
  if (s < 0 || s >= impl_->cuts.size())
    throw Error("anchor_time: cutoff index out of range");
  return impl_->anchors[static_cast<size_t>(s)];
}

int Stepper::index_j(int s) const {
  if (s < 0 || s >= impl_->cuts.size())
    throw Error("index_j: cutoff index out of range");
  return impl_->ref.J[static_cast<size_t>(s)].j;
}

double Stepper::rho(int s) const {
  if (s < 0 || s >= impl_->cuts.size())
    throw Error("rho: cutoff index out of range");
  return impl_->rhos[static_cast<size_t>(s)];
}

const std::vector<std::string>& Stepper::warnings() const {
  return impl_->warn;
}

const VectorField& Stepper::v_ell(double t) { return impl_->v_ell_at(t); }

const Stepper::CutoffData& Stepper::cutoff_data(int s, double t) {
  // The shared_ptr keeps the entry alive inside the cache; the reference is
  // stable until several newer entries displace it.
  static thread_local std::shared_ptr<const CutoffData> keep;
  keep = impl_->cutoff_data_at(s, t);
  return *keep;
}

const Stepper::Wave& Stepper::wave(double t) {
  static thread_local std::shared_ptr<const Wave> keep;
  keep = impl_->wave_at(t);
  return *keep;
}

VectorField Stepper::w_field(double t) {
  return impl_->bundle_w(*impl_->wave_at(t));
}

SymTensorField Stepper::stress(double t, double fd_dt) {
  return impl_->stress_at(t, fd_dt);
}

Field Stepper::pressure_increment(double t) {
  return impl_->pressure_increment_at(t);
}

Triple Stepper::next() {
  auto impl = impl_;
  Triple T;
  T.q = impl->q + 1;
  T.partition = impl->pnext;
  T.v = [impl](double t) {
    VectorField v = impl->base.v(clamp01(t));
    const auto wv = impl->wave_at(t);
    for (int i = 0; i < 3; ++i) {
      v[static_cast<size_t>(i)] += wv->wo[static_cast<size_t>(i)];
      v[static_cast<size_t>(i)] += wv->wc[static_cast<size_t>(i)];
    }
    return v;
  };
  T.p = [impl](double t) {
    Field p = impl->base.p(clamp01(t));
    p += impl->pressure_increment_at(t);
    return p;
  };
  T.R = [impl](double t) { return impl->stress_at(t, 0.0); };
  T.R_fd = [impl](double t, double fd_dt) { return impl->stress_at(t, fd_dt); };
  return T;
}

}  // namespace er
