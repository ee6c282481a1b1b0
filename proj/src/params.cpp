#include "er/params.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "er/error.hpp"
#include "er/hash.hpp"
#include "json.hpp"

namespace er {

namespace {

constexpr double kThird = 1.0 / 3.0;

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

double beta(const ParamSet& P, int j) {
  if (j < -1) throw Error("beta(j): j must be >= -1, got " + std::to_string(j));
  if (j == -1) return P.beta_m1;
  // Closed form of the recursion b*(beta_{j+1}-beta_inf) = beta_j-beta_inf.
  const double bj = std::pow(P.b, j);
  return P.beta0 / bj + (1.0 - 1.0 / bj) * P.beta_inf;
}

double lambda_ideal(const ParamSet& P, int q) {
  if (q < 0) throw Error("lambda(q): q must be >= 0, got " + std::to_string(q));
  return std::pow(P.lambda0, std::pow(P.b, q));
}

std::int64_t lambda(const ParamSet& P, int q) {
  const double e = std::pow(P.b, q) * std::log2(P.lambda0);
  if (!(e < 62.0)) {
    throw Error("lambda(q=" + std::to_string(q) +
                ") exceeds representable range (lambda0=" + fmt17(P.lambda0) +
                ", b=" + fmt17(P.b) + ")");
  }
  const double ideal = lambda_ideal(P, q);
  auto lam = static_cast<std::int64_t>(std::ceil(ideal));
  // ceil can land one below when pow overshoots an exact integer power by a
  // few ulp; snap to the true ceiling.
  if (static_cast<double>(lam - 1) >= ideal) --lam;
  if (static_cast<double>(lam) < ideal) ++lam;
  return lam;
}

double delta_of_lambda(const ParamSet& P, double lam, int j) {
  return std::pow(lam, -2.0 * beta(P, j));
}

double mu_of_lambda(const ParamSet& P, double lam, int j) {
  if (j < 0) throw Error("mu(j): j must be >= 0, got " + std::to_string(j));
  const double e =
      (j >= 2) ? 1.0 - beta(P, j)
               : (1.0 - P.beta0) * (P.b + 1.0) / (2.0 * P.b) +
                     (P.b - 1.0) * P.beta_inf / 2.0;
  return std::pow(lam, e);
}

double eta_of_lambda(const ParamSet& P, double lam, int j) {
  if (j < 0) throw Error("eta(j): j must be >= 0, got " + std::to_string(j));
  return std::pow(lam, P.beta_m1 - beta(P, j));
}

double delta(const ParamSet& P, int q, int j) {
  return delta_of_lambda(P, static_cast<double>(lambda(P, q)), j);
}

double mu(const ParamSet& P, int q, int j) {
  return mu_of_lambda(P, static_cast<double>(lambda(P, q + 1)), j);
}

double eta(const ParamSet& P, int q, int j) {
  return eta_of_lambda(P, static_cast<double>(lambda(P, q + 1)), j);
}

double ell(const ParamSet& P, int q) {
  return std::pow(static_cast<double>(lambda(P, q + 1)), P.eps0 - 1.0);
}

double tau(const ParamSet& P, int q) {
  return std::pow(static_cast<double>(lambda(P, q + 1)), -1.0 + P.beta0);
}

double omega(const ParamSet& P) {
  return (P.b - 1.0) * (1.0 - P.beta0 + P.b * P.beta_inf) / (2.0 * P.b);
}

// ---------------------------------------------------------------------------
// derive_params
// ---------------------------------------------------------------------------

ParamSet derive_params(double eps, double lambda0, double M) {
  if (!(eps > 0.0 && eps < kThird))
    throw Error("derive_params: eps must lie in (0, 1/3), got " + fmt17(eps));
  if (!(lambda0 >= 2.0) || lambda0 != std::floor(lambda0))
    throw Error("derive_params: lambda0 must be an integer >= 2, got " +
                fmt17(lambda0));

  ParamSet P;
  P.eps = eps;
  P.beta_inf = kThird - eps / 16.0;
  // beta_-1 = eps/32 keeps beta_inf + beta_-1 strictly below 1/3; with the
  // pair summing to exactly 1/3 the amplitude-sum constraint would reduce to
  // -6(b-1)*beta_inf > 0, impossible for any b > 1.
  P.beta_m1 = eps / 32.0;

  // 8b*eps0_max = (b-1)(1 - 3b(beta0(b)+beta_inf)) = (b-1)(u - 2 d b) with
  // u = 1 - 3 beta_-1 + 3 beta_inf and d = 3 beta_inf, maximized at
  // b = sqrt(u/(2d)).  The same u/(2d) is the largest admissible b, so the
  // choice sits at the geometric mean of the admissible interval (1, u/2d).
  const double u = 1.0 - 3.0 * P.beta_m1 + 3.0 * P.beta_inf;
  const double d2 = 6.0 * P.beta_inf;
  if (!(u > d2))
    throw Error("derive_params: no admissible b for eps = " + fmt17(eps));
  P.b = std::sqrt(u / d2);
  P.beta0 = (P.beta_m1 + (P.b - 1.0) * P.beta_inf) / P.b;

  const double headroom =
      (P.b - 1.0) * (1.0 - 3.0 * P.b * (P.beta0 + P.beta_inf)) / (8.0 * P.b);
  P.eps0 = headroom / 2.0;
  P.lambda0 = lambda0;
  P.M = M;
  P.toy_mode = false;
  validate(P);
  return P;
}

// ---------------------------------------------------------------------------
// check_constraints
// ---------------------------------------------------------------------------

ConstraintReport check_constraints(const ParamSet& P) {
  ConstraintReport rep;
  auto add = [&rep](const std::string& name, double margin, bool strict) {
    ConstraintCheck c;
    c.name = name;
    c.margin = margin;
    c.strict = strict;
    c.pass = strict ? (margin > 0.0) : (margin >= 0.0);
    rep.checks.push_back(c);
  };

  add("b > 1", P.b - 1.0, true);
  add("eps in (0, 1/3)", std::min(P.eps, kThird - P.eps), true);
  add("beta_-1 > 0", P.beta_m1, true);
  add("beta0 > 0", P.beta0, true);
  add("beta0 < beta_inf", P.beta_inf - P.beta0, true);
  add("beta_inf < 1/3", kThird - P.beta_inf, true);
  add("beta_-1 identity: beta_-1 = b beta0 + (1-b) beta_inf",
      1e-12 - std::abs(P.beta_m1 -
                       (P.b * P.beta0 + (1.0 - P.b) * P.beta_inf)),
      false);
  add("amplitude-sum: 1 - 3b(beta0 + beta_inf) > 0",
      1.0 - 3.0 * P.b * (P.beta0 + P.beta_inf), true);
  add("time-scale: 5 beta_inf - b(1 + 3 beta0) > 0",
      5.0 * P.beta_inf - P.b * (1.0 + 3.0 * P.beta0), true);
  add("eps0 > 0", P.eps0, true);
  add("eps0 within headroom (b-1)(1-3b(beta0+beta_inf))/(8b)",
      (P.b - 1.0) * (1.0 - 3.0 * P.b * (P.beta0 + P.beta_inf)) / (8.0 * P.b) -
          P.eps0,
      false);
  add("lambda0 >= 2", P.lambda0 - 2.0, false);
  add("lambda0 integer-valued", 0.5 - std::abs(P.lambda0 - std::round(P.lambda0)),
      true);

  rep.all_pass = true;
  for (const auto& c : rep.checks) {
    if (!c.pass) {
      rep.all_pass = false;
      if (P.toy_mode)
        rep.warnings.push_back("toy_mode: constraint violated: " + c.name +
                               " (margin " + fmt17(c.margin) + ")");
    }
  }
  rep.accepted = rep.all_pass || P.toy_mode;
  return rep;
}

void validate(const ParamSet& P) {
  const ConstraintReport rep = check_constraints(P);
  if (rep.accepted) return;
  std::string msg = "parameter set rejected:";
  for (const auto& c : rep.checks)
    if (!c.pass) msg += " [" + c.name + ", margin " + fmt17(c.margin) + "]";
  throw Error(msg);
}

std::string ConstraintReport::to_string() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << (c.pass ? "  ok   " : "  FAIL ") << c.name << "  (margin "
       << fmt17(c.margin) << ")\n";
  }
  for (const auto& w : warnings) os << "  warn " << w << "\n";
  os << (all_pass ? "all constraints hold"
                  : (accepted ? "violations tolerated (toy_mode)"
                              : "constraint violations"))
     << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// check_orderings
// ---------------------------------------------------------------------------

namespace {

// One (q, i) instance of an ordering, with both sides in log space.
struct Instance {
  int check = 0;
  int q = 0;
  int i = 0;
  double lhs = 0.0;  // ln of left side
  double rhs = 0.0;  // ln of right side
};

struct CheckDef {
  const char* name;
  bool equality;
};

const CheckDef kChecks[] = {
    {"delta decreasing in q", false},
    {"delta decreasing in i", false},
    {"mu decreasing in i", false},
    {"mu/eta ratio increasing in i", false},
    {"mu/eta ratio saturates at sqrt(delta_{q+1,-1}) lambda_{q+1}", true},
    {"velocity scale increasing across levels", false},
    {"flow-window chain, link 1", false},
    {"flow-window chain, link 2", false},
    {"flow-window chain, link 3", false},
    {"advective scale below mu", false},
    {"overlap amplitude bound", false},
    {"overlap window refinable", false},
    {"plateau window refinable", false},
    {"exceptional-set geometric sum controlled", false},
    {"overlap fraction at most half", false},
    {"endpoint window clearance", false},
};
constexpr int kNumChecks = sizeof(kChecks) / sizeof(kChecks[0]);
constexpr double kLn2 = 0.6931471805599453;

// Emit every instance, given ln(lambda_q) as a function of q.  The emission
// order must be deterministic: the lambda0-sensitivity pass relies on
// matching instances produced at two different base frequencies.
std::vector<Instance> build_instances(
    const ParamSet& P, int q_max, int i_max,
    const std::function<double(int)>& lnlam) {
  std::vector<Instance> out;
  auto ln_delta = [&](int q, int j) { return -2.0 * beta(P, j) * lnlam(q); };
  auto ln_mu = [&](int q1, int j) {
    const double e = (j >= 2) ? 1.0 - beta(P, j)
                              : (1.0 - P.beta0) * (P.b + 1.0) / (2.0 * P.b) +
                                    (P.b - 1.0) * P.beta_inf / 2.0;
    return e * lnlam(q1);
  };
  auto ln_eta = [&](int q1, int j) {
    return (P.beta_m1 - beta(P, j)) * lnlam(q1);
  };
  auto push = [&out](int check, int q, int i, double lhs, double rhs) {
    out.push_back({check, q, i, lhs, rhs});
  };

  const double lomega = omega(P);
  for (int q = 0; q <= q_max; ++q) {
    const double Lq = lnlam(q), Lq1 = lnlam(q + 1), Lq2 = lnlam(q + 2);
    for (int i = 0; i <= i_max; ++i) {
      push(0, q, i, ln_delta(q + 1, i), ln_delta(q, i));
      push(1, q, i, ln_delta(q + 1, i + 1), ln_delta(q + 1, i));
      push(2, q, i, ln_mu(q + 1, i + 1), ln_mu(q + 1, i));
      if (i <= 1)
        push(3, q, i, ln_mu(q + 1, i) - ln_eta(q + 1, i),
             ln_mu(q + 1, i + 1) - ln_eta(q + 1, i + 1));
      if (i >= 2)
        push(4, q, i, ln_mu(q + 1, i) - ln_eta(q + 1, i),
             0.5 * ln_delta(q + 1, -1) + Lq1);
      push(5, q, i, 0.5 * ln_delta(q, i) + Lq,
           0.5 * ln_delta(q + 1, i + 1) + Lq1);
      const int im = std::max(i - 1, 0);
      push(6, q, i, 0.5 * ln_delta(q, i - 1) + Lq -
                        (0.5 * ln_delta(q + 1, i) + Lq1),
           kLn2 + 0.5 * ln_delta(q, im) + Lq - ln_mu(q + 1, i));
      push(7, q, i, kLn2 + 0.5 * ln_delta(q, im) + Lq - ln_mu(q + 1, i),
           2.0 * kLn2 - lomega * Lq1);
      push(8, q, i, 2.0 * kLn2 - lomega * Lq1,
           ln_delta(q + 2, i + 1) - ln_delta(q + 1, i) - 2.0 * P.eps0 * Lq1);
      push(9, q, i, 0.5 * ln_delta(q, i - 1) + Lq, ln_mu(q + 1, i));
      push(10, q, i,
           0.5 * ln_delta(q + 1, i) + ln_mu(q + 1, i) - Lq1 - ln_eta(q + 1, i),
           kLn2 + ln_delta(q + 2, 0) - 2.0 * P.eps0 * Lq1);
      push(11, q, i, 2.0 * kLn2,
           ln_eta(q + 1, i) + ln_mu(q + 2, 0) - ln_mu(q + 1, i));
      push(12, q, i, 2.0 * kLn2, ln_mu(q + 2, i + 1) - ln_mu(q + 1, i));
    }
    push(13, q, 0, std::log(2.0 * (q + 1)),
         (P.b - 1.0) * P.eps / 4.0 * Lq1);
    push(14, q, 0, ln_eta(q + 1, 0), -kLn2);
    push(15, q, 0, -kLn2 + (P.beta_inf - 1.0) * Lq1, -(q + 3) * kLn2);
    (void)Lq2;
  }
  return out;
}

}  // namespace

OrderingReport check_orderings(const ParamSet& P, int q_max, int i_max,
                               LambdaMode mode,
                               double log10_lambda0_override) {
  if (q_max < 0 || i_max < 0)
    throw Error("check_orderings: q_max and i_max must be >= 0");

  std::function<double(int)> lnlam;
  std::vector<double> lam_table;
  if (mode == LambdaMode::kInteger) {
    if (log10_lambda0_override > 0.0)
      throw Error("check_orderings: lambda0 override requires ideal mode");
    for (int q = 0; q <= q_max + 2; ++q)
      lam_table.push_back(std::log(static_cast<double>(lambda(P, q))));
    lnlam = [&lam_table](int q) { return lam_table[static_cast<size_t>(q)]; };
  } else {
    const double L = (log10_lambda0_override > 0.0)
                         ? log10_lambda0_override * std::log(10.0)
                         : std::log(P.lambda0);
    const double b = P.b;
    lnlam = [L, b](int q) { return std::pow(b, q) * L; };
  }

  const std::vector<Instance> inst = build_instances(P, q_max, i_max, lnlam);

  // lambda0-sensitivity: in ideal mode every margin is affine in
  // ln(lambda0), so two extra evaluations determine slope and intercept.
  std::vector<Instance> at2, at2e;
  if (mode == LambdaMode::kIdeal) {
    const double b = P.b;
    auto lnA = [b](int q) { return std::pow(b, q) * kLn2; };
    auto lnB = [b](int q) { return std::pow(b, q) * (kLn2 + 1.0); };
    at2 = build_instances(P, q_max, i_max, lnA);
    at2e = build_instances(P, q_max, i_max, lnB);
  }

  OrderingReport rep;
  rep.checks.resize(kNumChecks);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  for (int c = 0; c < kNumChecks; ++c) {
    auto& chk = rep.checks[static_cast<size_t>(c)];
    chk.name = kChecks[c].name;
    chk.equality = kChecks[c].equality;
    chk.worst_margin = inf;
    chk.pass = true;
    chk.lambda0_free = (mode == LambdaMode::kIdeal);
    chk.min_log10_lambda0 = nan;
  }

  for (size_t n = 0; n < inst.size(); ++n) {
    const Instance& I = inst[n];
    auto& chk = rep.checks[static_cast<size_t>(I.check)];
    const double scale = std::max({1.0, std::abs(I.lhs), std::abs(I.rhs)});
    const double margin = I.rhs - I.lhs;
    const double eff = chk.equality ? -std::abs(margin) : margin;
    if (eff < chk.worst_margin) {
      chk.worst_margin = eff;
      chk.worst_q = I.q;
      chk.worst_i = I.i;
    }
    const bool ok = chk.equality ? (std::abs(margin) <= 1e-12 * scale)
                                 : (margin >= -1e-12 * scale);
    if (!ok) chk.pass = false;

    if (mode == LambdaMode::kIdeal && !chk.equality) {
      const double m0 = at2[n].rhs - at2[n].lhs;    // margin at lambda0 = 2
      const double slope = (at2e[n].rhs - at2e[n].lhs) - m0;  // per ln-unit
      const double tol = 1e-12 * scale;
      if (slope >= -tol && m0 >= -tol) {
        // holds for every lambda0 >= 2; leave lambda0_free as-is
      } else {
        chk.lambda0_free = false;
        double need;
        if (slope > tol)
          need = (kLn2 + std::max(0.0, -m0 / slope)) / std::log(10.0);
        else
          need = inf;  // larger lambda0 does not help
        if (std::isnan(chk.min_log10_lambda0) || need > chk.min_log10_lambda0)
          chk.min_log10_lambda0 = need;
      }
    }
  }

  rep.all_pass = true;
  rep.required_log10_lambda0 = std::log10(2.0);
  for (const auto& c : rep.checks) {
    if (!c.pass) rep.all_pass = false;
    if (!std::isnan(c.min_log10_lambda0))
      rep.required_log10_lambda0 =
          std::max(rep.required_log10_lambda0, c.min_log10_lambda0);
  }
  return rep;
}

std::string OrderingReport::to_string() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << (c.pass ? "  ok   " : "  FAIL ") << c.name << "  (worst ln-margin "
       << fmt17(c.worst_margin) << " at q=" << c.worst_q << ", i=" << c.worst_i;
    if (!std::isnan(c.min_log10_lambda0))
      os << "; needs log10(lambda0) >= " << fmt17(c.min_log10_lambda0);
    os << ")\n";
  }
  os << (all_pass ? "all orderings hold" : "ordering violations") << "\n";
  if (required_log10_lambda0 > std::log10(2.0))
    os << "smallest base frequency satisfying every ordering: log10(lambda0) "
          ">= "
       << fmt17(required_log10_lambda0) << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

ParamSet load_params(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const std::exception& e) {
    throw Error(std::string("parameter JSON parse failure: ") + e.what());
  }
  ParamSet P;
  try {
    P.eps = j.at("eps").get<double>();
    P.b = j.at("b").get<double>();
    P.beta_inf = j.at("beta_inf").get<double>();
    P.eps0 = j.at("eps0").get<double>();
    P.lambda0 = j.at("lambda0").get<double>();
    P.M = j.value("M", 3.0);
    P.toy_mode = j.value("toy_mode", false);
    const bool has0 = j.contains("beta0"), hasm1 = j.contains("beta_m1");
    if (!has0 && !hasm1)
      throw Error("parameter JSON needs beta0 or beta_m1");
    if (has0) P.beta0 = j.at("beta0").get<double>();
    if (hasm1) P.beta_m1 = j.at("beta_m1").get<double>();
    if (has0 && !hasm1)
      P.beta_m1 = P.b * P.beta0 + (1.0 - P.b) * P.beta_inf;
    if (!has0 && hasm1)
      P.beta0 = (P.beta_m1 + (P.b - 1.0) * P.beta_inf) / P.b;
    if (has0 && hasm1) {
      const double dev =
          std::abs(P.beta_m1 - (P.b * P.beta0 + (1.0 - P.b) * P.beta_inf));
      if (dev > 1e-12)
        throw Error("parameter JSON: beta0 and beta_m1 disagree by " +
                    fmt17(dev));
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(std::string("parameter JSON field failure: ") + e.what());
  }
  return P;
}

ParamSet load_params_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open parameter file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_params(ss.str());
}

std::string save_params(const ParamSet& P) {
  nlohmann::ordered_json j;
  j["eps"] = P.eps;
  j["b"] = P.b;
  j["beta0"] = P.beta0;
  j["beta_inf"] = P.beta_inf;
  j["beta_m1"] = P.beta_m1;
  j["eps0"] = P.eps0;
  j["lambda0"] = P.lambda0;
  j["M"] = P.M;
  j["toy_mode"] = P.toy_mode;
  return j.dump(2) + "\n";
}

std::uint64_t params_hash(const ParamSet& P) {
  // Canonical key=value lines with %.17g, independent of the JSON library's
  // shortest-round-trip formatting.
  std::string s;
  s += "eps=" + fmt17(P.eps) + "\n";
  s += "b=" + fmt17(P.b) + "\n";
  s += "beta0=" + fmt17(P.beta0) + "\n";
  s += "beta_inf=" + fmt17(P.beta_inf) + "\n";
  s += "beta_m1=" + fmt17(P.beta_m1) + "\n";
  s += "eps0=" + fmt17(P.eps0) + "\n";
  s += "lambda0=" + fmt17(P.lambda0) + "\n";
  s += "M=" + fmt17(P.M) + "\n";
  s += std::string("toy_mode=") + (P.toy_mode ? "1" : "0") + "\n";
  return fnv1a64(s);
}

}  // namespace er
