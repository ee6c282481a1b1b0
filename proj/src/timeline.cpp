#include "er/timeline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "er/error.hpp"
#include "er/quadrature.hpp"
#include "json.hpp"

namespace er {

namespace {

constexpr double kRampMargin = 1.0 / 16.0;  // flat fraction at each ramp end

double bump(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return std::exp(-1.0 / (x * (1.0 - x)));
}

double bump_d1(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double d = x * (1.0 - x);
  return bump(x) * (1.0 - 2.0 * x) / (d * d);
}

// Cumulative integral of the bump on [0, 1]: 256 cached segment integrals
// plus an on-the-fly Gauss tail, accurate to machine precision.
struct BumpTable {
  std::array<double, 257> cum{};
  double total = 0.0;
  BumpTable() {
    const GaussLegendre q = gauss_legendre(32);
    cum[0] = 0.0;
    for (int i = 0; i < 256; ++i) {
      const double a = i / 256.0, b = (i + 1) / 256.0;
      double s = 0.0;
      for (size_t n = 0; n < q.x.size(); ++n) {
        const double x = 0.5 * (a + b) + 0.5 * (b - a) * q.x[n];
        s += q.w[n] * bump(x);
      }
      cum[static_cast<size_t>(i + 1)] =
          cum[static_cast<size_t>(i)] + 0.5 * (b - a) * s;
    }
    total = cum[256];
  }
};

const BumpTable& bump_table() {
  static const BumpTable t;
  return t;
}

double bump_cumulative(double w) {
  const BumpTable& t = bump_table();
  if (w <= 0.0) return 0.0;
  if (w >= 1.0) return t.total;
  const int i = std::min(255, static_cast<int>(w * 256.0));
  const double a = i / 256.0;
  static const GaussLegendre q = gauss_legendre(16);
  double s = 0.0;
  for (size_t n = 0; n < q.x.size(); ++n) {
    const double x = 0.5 * (a + w) + 0.5 * (w - a) * q.x[n];
    s += q.w[n] * bump(x);
  }
  return t.cum[static_cast<size_t>(i)] + 0.5 * (w - a) * s;
}

}  // namespace

double ramp_profile(double u) {
  const double w = (u - kRampMargin) / (1.0 - 2.0 * kRampMargin);
  return bump_cumulative(w) / bump_table().total;
}

double ramp_profile_d1(double u) {
  const double w = (u - kRampMargin) / (1.0 - 2.0 * kRampMargin);
  return bump(w) / (bump_table().total * (1.0 - 2.0 * kRampMargin));
}

double ramp_profile_d2(double u) {
  const double c = 1.0 - 2.0 * kRampMargin;
  const double w = (u - kRampMargin) / c;
  return bump_d1(w) / (bump_table().total * c * c);
}

// ---------------------------------------------------------------------------
// Partition
// ---------------------------------------------------------------------------

Partition seed_partition() {
  Partition p;
  p.q = 0;
  const std::int64_t t38 = 3 * (kTickDenom >> 3);
  const std::int64_t t58 = 5 * (kTickDenom >> 3);
  p.I = {{0, t38, 0}, {t38, t58, 0}, {t58, kTickDenom, 0}};
  return p;
}

std::int64_t region_measure_ticks(const Partition& p, int j) {
  std::int64_t m = 0;
  for (size_t a = 1; a + 1 < p.I.size(); ++a)
    if (p.I[a].j <= j) m += p.I[a].hi - p.I[a].lo;
  return m;
}

PartitionReport validate_partition(const Partition& p, const ParamSet& P) {
  PartitionReport rep;
  auto add = [&rep](const std::string& name, double margin) {
    const bool pass = margin >= -1e-9;
    rep.checks.push_back({name, margin, pass});
    rep.all_pass = rep.all_pass && pass;
  };

  if (p.I.size() < 3) {
    add("chaining: consecutive intervals share exactly one endpoint", -1.0);
    return rep;
  }

  // Chaining and coverage (exact tick arithmetic).
  {
    bool ok = p.I.front().lo == 0 && p.I.back().hi == kTickDenom;
    for (size_t a = 0; ok && a < p.I.size(); ++a) {
      ok = p.I[a].lo < p.I[a].hi;
      if (ok && a + 1 < p.I.size()) ok = p.I[a].hi == p.I[a + 1].lo;
    }
    add("chaining: consecutive intervals share exactly one endpoint", ok ? 0.0 : -1.0);
  }

  // Index ranges: endpoints 0, interior within [0, q].
  {
    bool ok = p.I.front().j == 0 && p.I.back().j == 0;
    for (const TimeInterval& iv : p.I) ok = ok && iv.j >= 0 && iv.j <= p.q;
    add("index map: j in [0,q], zero on the outermost intervals", ok ? 0.0 : -1.0);
  }

  // Minimum lengths |I| >= 4 / mu_{q+1, j} for interior intervals.
  {
    double worst = 1.0;
    for (size_t a = 1; a + 1 < p.I.size(); ++a) {
      const double need = 4.0 / mu(P, p.q, p.I[a].j);
      worst = std::min(worst, p.I[a].length() / need - 1.0);
    }
    add("minimum interval length vs 4/mu", worst);
  }

  // Region measures: |union_{i<=j} V_i| <= lambda0 * lambda_{q+1}^{beta_j -
  // beta_inf + eps/4}.
  {
    double worst = 1.0;
    const double lam1 = lambda_ideal(P, p.q + 1);
    for (int j = 0; j <= p.q; ++j) {
      const double meas = tick_time(region_measure_ticks(p, j));
      const double bound =
          P.lambda0 * std::pow(lam1, beta(P, j) - P.beta_inf + P.eps / 4.0);
      if (meas > 0.0) worst = std::min(worst, bound / meas - 1.0);
    }
    add("region measure vs lambda0 * lambda^{beta_j - beta_inf + eps/4}", worst);
  }

  // Support window: interior union within [2^{-q-2}, 1 - 2^{-q-2}].
  {
    if (p.q > 40) throw Error("validate_partition: level too deep for tick grid");
    const std::int64_t gap = kTickDenom >> (p.q + 2);
    const double lo_slack = double(p.I[1].lo - gap) / double(gap);
    const double hi_slack =
        double((kTickDenom - gap) - p.I[p.I.size() - 2].hi) / double(gap);
    add("support window: interior within [2^{-q-2}, 1 - 2^{-q-2}]",
        std::min(lo_slack, hi_slack));
  }
  return rep;
}

std::string PartitionReport::to_string() const {
  std::ostringstream os;
  for (const PartitionCheck& c : checks)
    os << (c.pass ? "[pass] " : "[FAIL] ") << c.name
       << "  margin=" << c.margin << "\n";
  return os.str();
}

std::string partition_json(const Partition& p) {
  nlohmann::ordered_json j;
  j["q"] = p.q;
  j["tick_denom"] = kTickDenom;
  j["intervals"] = nlohmann::ordered_json::array();
  for (const TimeInterval& iv : p.I)
    j["intervals"].push_back({{"lo", iv.lo}, {"hi", iv.hi}, {"j", iv.j}});
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Refinement
// ---------------------------------------------------------------------------

OverlapSide overlap_side(int j_left, int j_right) {
  if (j_left <= j_right) return {true, j_left};
  return {false, j_right};
}

RefinedPartition refine_intervals(const Partition& p, const ParamSet& P) {
  if (p.I.size() < 3) throw Error("refine: partition needs interior intervals");
  RefinedPartition r;
  r.q = p.q;

  auto fail_or_warn = [&](const std::string& msg) {
    if (!P.toy_mode) throw Error(msg);
    r.warnings.push_back(msg);
  };

  // J list: the untouched left boundary interval, then each interior parent
  // subdivided, then the untouched right boundary interval.
  r.J.push_back({p.I.front().lo, p.I.front().hi, 0, true, p.I.front().j});
  for (int alpha = 1; alpha + 1 < static_cast<int>(p.I.size()); ++alpha) {
    const TimeInterval& I = p.I[static_cast<size_t>(alpha)];
    const double mu_j = mu(P, p.q, I.j);
    const std::int64_t len_ticks = I.hi - I.lo;
    const double len = tick_time(len_ticks);
    std::int64_t unit = std::llround(2.0 / mu_j * double(kTickDenom));
    if (unit < 16 || len_ticks < 32)
      throw Error("refine: time tick grid too coarse for mu = " +
                  std::to_string(mu_j));

    bool too_short = len < 4.0 / mu_j * (1.0 - 1e-9);
    std::int64_t n;
    if (too_short) {
      fail_or_warn("refine: interval too short, |I| = " + std::to_string(len) +
                   " < 4/mu_{q+1,j} = " + std::to_string(4.0 / mu_j) +
                   " (minimum-length constraint at level " +
                   std::to_string(p.q) + ", j = " + std::to_string(I.j) + ")");
      n = 2;
      unit = len_ticks / 2;  // clamp: two (nearly) equal halves
    } else {
      // Largest integer strictly below mu |I| / 2, floored at 2 so the exact
      // boundary case |I| = 4/mu splits into two intervals of length 2/mu.
      const double ratio = mu_j * len / 2.0;
      n = static_cast<std::int64_t>(std::ceil(ratio)) - 1;
      if (n < 2) n = 2;
      while (n > 2 && (n - 1) * unit >= len_ticks) --n;  // tick-rounding guard
    }

    for (std::int64_t a = 0; a < n; ++a) {
      const std::int64_t lo = I.lo + a * unit;
      const std::int64_t hi = (a == n - 1) ? I.hi : I.lo + (a + 1) * unit;
      r.J.push_back({lo, hi, alpha, a == 0 || a == n - 1, I.j});
    }
  }
  const int last_alpha = static_cast<int>(p.I.size()) - 1;
  r.J.push_back({p.I.back().lo, p.I.back().hi, last_alpha, true, p.I.back().j});

  // Overlap regions between consecutive J's: length eta/mu at the smaller
  // index, attached on the side of that index.
  const int np = static_cast<int>(r.J.size()) - 1;  // N' + 1 overlaps
  for (int s = 0; s < np; ++s) {
    const JInterval& L = r.J[static_cast<size_t>(s)];
    const JInterval& R = r.J[static_cast<size_t>(s + 1)];
    const OverlapSide side = overlap_side(L.j, R.j);
    KRegion K;
    K.a1 = side.a1;
    K.j_left = L.j;
    K.j_right = R.j;
    K.j_star = side.j_star;
    std::int64_t kt = std::llround(eta(P, p.q, side.j_star) /
                                   mu(P, p.q, side.j_star) * double(kTickDenom));
    const JInterval& host = side.a1 ? R : L;
    const std::int64_t cap = (host.hi - host.lo) / 4;
    if (kt > cap) {
      fail_or_warn("refine: overlap length " + std::to_string(tick_time(kt)) +
                   " exceeds a quarter of its host interval (overlap " +
                   std::to_string(s) + ")");
      kt = cap;
    }
    if (kt < 1) kt = 1;
    const std::int64_t shared = L.hi;
    if (side.a1) {
      K.lo = shared;
      K.hi = shared + kt;
    } else {
      K.lo = shared - kt;
      K.hi = shared;
    }
    r.K.push_back(K);
  }

  // Plateaus: from the end of the previous overlap to the start of the next.
  for (int s = 0; s < static_cast<int>(r.J.size()); ++s) {
    TimeInterval H;
    H.lo = (s == 0) ? r.J.front().lo : r.K[static_cast<size_t>(s - 1)].hi;
    H.hi = (s == np) ? r.J.back().hi : r.K[static_cast<size_t>(s)].lo;
    H.j = (s == 0 || s == np) ? 0 : r.J[static_cast<size_t>(s)].j + 1;
    if (H.lo >= H.hi)
      throw Error("refine: empty plateau at index " + std::to_string(s));
    r.H.push_back(H);
  }
  return r;
}

Partition next_partition(const RefinedPartition& r) {
  Partition out;
  out.q = r.q + 1;
  for (size_t s = 0; s < r.H.size(); ++s) {
    out.I.push_back(r.H[s]);
    if (s < r.K.size())
      out.I.push_back({r.K[s].lo, r.K[s].hi, 0});
  }
  for (size_t a = 0; a + 1 < out.I.size(); ++a)
    if (out.I[a].hi != out.I[a + 1].lo)
      throw Error("next_partition: internal chaining failure");
  return out;
}

LocateResult locate(const RefinedPartition& r, double t) {
  // Ordered regions: H_0, K_0, H_1, ..., K_{N'}, H_{N'+1}; first region whose
  // right endpoint is >= t wins (left-closed tie break).
  for (size_t s = 0; s < r.H.size(); ++s) {
    if (t <= tick_time(r.H[s].hi))
      return {'H', static_cast<int>(s), r.J[s].j};
    if (s < r.K.size() && t <= tick_time(r.K[s].hi))
      return {'K', static_cast<int>(s), r.K[s].j_star};
  }
  return {'H', static_cast<int>(r.H.size()) - 1, 0};
}

// ---------------------------------------------------------------------------
// Cutoffs
// ---------------------------------------------------------------------------

CutoffFamily::CutoffFamily(const RefinedPartition& r) {
  const int n = static_cast<int>(r.J.size());
  for (int s = 0; s < n; ++s) {
    up_lo_.push_back(s == 0 ? r.J.front().lo : r.K[static_cast<size_t>(s - 1)].lo);
    up_hi_.push_back(s == 0 ? r.J.front().lo : r.K[static_cast<size_t>(s - 1)].hi);
    down_lo_.push_back(s == n - 1 ? r.J.back().hi : r.K[static_cast<size_t>(s)].lo);
    down_hi_.push_back(s == n - 1 ? r.J.back().hi : r.K[static_cast<size_t>(s)].hi);
    plateau_lo_.push_back(r.H[static_cast<size_t>(s)].lo);
    plateau_hi_.push_back(r.H[static_cast<size_t>(s)].hi);
  }
}

std::int64_t CutoffFamily::support_lo(int s) const {
  return up_lo_[static_cast<size_t>(s)];
}
std::int64_t CutoffFamily::support_hi(int s) const {
  return down_hi_[static_cast<size_t>(s)];
}

namespace {
inline double frac_in(std::int64_t lo, std::int64_t hi, double t) {
  return (t - tick_time(lo)) / (tick_time(hi) - tick_time(lo));
}
}  // namespace

double CutoffFamily::value(int s, double t) const {
  const size_t i = static_cast<size_t>(s);
  if (t < tick_time(up_lo_[i]) || t > tick_time(down_hi_[i])) return 0.0;
  if (up_lo_[i] < up_hi_[i] && t < tick_time(up_hi_[i]))
    return std::sin(M_PI_2 * ramp_profile(frac_in(up_lo_[i], up_hi_[i], t)));
  if (down_lo_[i] < down_hi_[i] && t > tick_time(down_lo_[i])) {
    const double r = ramp_profile(frac_in(down_lo_[i], down_hi_[i], t));
    return r >= 1.0 ? 0.0 : std::cos(M_PI_2 * r);  // exact zero past the ramp
  }
  return 1.0;
}

double CutoffFamily::d1(int s, double t) const {
  const size_t i = static_cast<size_t>(s);
  if (t < tick_time(up_lo_[i]) || t > tick_time(down_hi_[i])) return 0.0;
  if (up_lo_[i] < up_hi_[i] && t < tick_time(up_hi_[i])) {
    const double len = tick_time(up_hi_[i]) - tick_time(up_lo_[i]);
    const double u = frac_in(up_lo_[i], up_hi_[i], t);
    return M_PI_2 * ramp_profile_d1(u) * std::cos(M_PI_2 * ramp_profile(u)) / len;
  }
  if (down_lo_[i] < down_hi_[i] && t > tick_time(down_lo_[i])) {
    const double len = tick_time(down_hi_[i]) - tick_time(down_lo_[i]);
    const double u = frac_in(down_lo_[i], down_hi_[i], t);
    return -M_PI_2 * ramp_profile_d1(u) * std::sin(M_PI_2 * ramp_profile(u)) / len;
  }
  return 0.0;
}

double CutoffFamily::d2(int s, double t) const {
  const size_t i = static_cast<size_t>(s);
  if (t < tick_time(up_lo_[i]) || t > tick_time(down_hi_[i])) return 0.0;
  if (up_lo_[i] < up_hi_[i] && t < tick_time(up_hi_[i])) {
    const double len = tick_time(up_hi_[i]) - tick_time(up_lo_[i]);
    const double u = frac_in(up_lo_[i], up_hi_[i], t);
    const double rp = ramp_profile(u), r1 = ramp_profile_d1(u),
                 r2 = ramp_profile_d2(u);
    return M_PI_2 *
           (r2 * std::cos(M_PI_2 * rp) -
            M_PI_2 * r1 * r1 * std::sin(M_PI_2 * rp)) /
           (len * len);
  }
  if (down_lo_[i] < down_hi_[i] && t > tick_time(down_lo_[i])) {
    const double len = tick_time(down_hi_[i]) - tick_time(down_lo_[i]);
    const double u = frac_in(down_lo_[i], down_hi_[i], t);
    const double rp = ramp_profile(u), r1 = ramp_profile_d1(u),
                 r2 = ramp_profile_d2(u);
    return -M_PI_2 *
           (r2 * std::sin(M_PI_2 * rp) +
            M_PI_2 * r1 * r1 * std::cos(M_PI_2 * rp)) /
           (len * len);
  }
  return 0.0;
}

}  // namespace er
