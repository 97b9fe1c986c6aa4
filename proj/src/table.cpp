#include "subcausal/table.hpp"

#include <cmath>
#include <limits>

#include "subcausal/errors.hpp"
#include "subcausal/stats.hpp"

namespace subcausal {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::string to_string(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::M1: return "M1";
    case MechanismKind::M2: return "M2";
    case MechanismKind::M3: return "M3";
    case MechanismKind::M4: return "M4";
    case MechanismKind::M5: return "M5";
    case MechanismKind::Sens: return "SENS";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// MechanismSpec

MechanismSpec MechanismSpec::m1(std::vector<double> p, int K) {
  if (static_cast<int>(p.size()) != 2 * K) throw DataError("M1 table must be 2 x K");
  MechanismSpec s;
  s.kind_ = MechanismKind::M1;
  s.K_ = K;
  s.table_ = std::move(p);
  return s;
}

MechanismSpec MechanismSpec::m2(std::vector<double> p, int J) {
  if (static_cast<int>(p.size()) != 2 * J) throw DataError("M2 table must be 2 x J");
  MechanismSpec s;
  s.kind_ = MechanismKind::M2;
  s.J_ = J;
  s.table_ = std::move(p);
  return s;
}

MechanismSpec MechanismSpec::m3(std::vector<double> p, int J, int K) {
  if (static_cast<int>(p.size()) != J * K) throw DataError("M3 table must be J x K");
  MechanismSpec s;
  s.kind_ = MechanismKind::M3;
  s.J_ = J;
  s.K_ = K;
  s.table_ = std::move(p);
  return s;
}

MechanismSpec MechanismSpec::m4(M4Coefficients beta) {
  MechanismSpec s;
  s.kind_ = MechanismKind::M4;
  s.m4_ = beta;
  return s;
}

MechanismSpec MechanismSpec::m5() {
  MechanismSpec s;
  s.kind_ = MechanismKind::M5;
  return s;
}

MechanismSpec MechanismSpec::m5_logit(SaturatedLogit beta) {
  MechanismSpec s;
  s.kind_ = MechanismKind::M5;
  s.sat_ = beta;
  return s;
}

MechanismSpec MechanismSpec::sensitivity(SensCoefficients beta) {
  MechanismSpec s;
  s.kind_ = MechanismKind::Sens;
  s.sens_ = beta;
  return s;
}

bool MechanismSpec::has_parameters() const {
  return kind_ != MechanismKind::M5 || sat_.has_value();
}

double MechanismSpec::miss_prob(int t, int x, int y) const {
  switch (kind_) {
    case MechanismKind::M1: return table_[t * K_ + y];
    case MechanismKind::M2: return table_[t * J_ + x];
    case MechanismKind::M3: return table_[x * K_ + y];
    case MechanismKind::M4:
      return expit(m4_.b0 + m4_.bt * t + m4_.bx * x + m4_.by * y);
    case MechanismKind::Sens:
      // parameterizes P(M=0 | .)
      return 1.0 - expit(sens_.b0 + sens_.bt * t + sens_.bx * x + sens_.btx * t * x +
                         sens_.by * y);
    case MechanismKind::M5:
      if (!sat_) throw DataError("unrestricted mechanism carries no missingness law");
      return expit(sat_->b0 + sat_->bt * t + sat_->bx * x + sat_->by * y + sat_->btx * t * x +
                   sat_->bty * t * y + sat_->bxy * x * y + sat_->btxy * t * x * y);
  }
  throw DataError("unknown mechanism kind");
}

const std::vector<double>& MechanismSpec::table() const {
  if (table_.empty()) throw DataError("mechanism has no conditional table");
  return table_;
}

std::vector<double>& MechanismSpec::table() {
  if (table_.empty()) throw DataError("mechanism has no conditional table");
  return table_;
}

const M4Coefficients& MechanismSpec::m4_coefficients() const {
  if (kind_ != MechanismKind::M4) throw DataError("not an M4 mechanism");
  return m4_;
}

M4Coefficients& MechanismSpec::m4_coefficients() {
  if (kind_ != MechanismKind::M4) throw DataError("not an M4 mechanism");
  return m4_;
}

const SensCoefficients& MechanismSpec::sens_coefficients() const {
  if (kind_ != MechanismKind::Sens) throw DataError("not a sensitivity mechanism");
  return sens_;
}

SensCoefficients& MechanismSpec::sens_coefficients() {
  if (kind_ != MechanismKind::Sens) throw DataError("not a sensitivity mechanism");
  return sens_;
}

const SaturatedLogit& MechanismSpec::saturated_logit() const {
  if (!sat_) throw DataError("mechanism has no saturated logit");
  return *sat_;
}

void MechanismSpec::validate(bool strict) const {
  for (double v : table_) {
    if (!(v >= 0.0 && v <= 1.0)) throw DataError("missingness probability outside [0,1]");
    if (strict && (v <= 0.0 || v >= 1.0))
      throw DataError("missingness probability must lie strictly inside (0,1)");
    if (v >= 1.0) throw DataError("P(M=0|...) must be positive");
  }
}

// ---------------------------------------------------------------------------
// ObservedTable

double ObservedTable::total() const {
  double s = 0.0;
  for (double v : n_obs) s += v;
  for (double v : n_mis) s += v;
  return s;
}

double ObservedTable::arm_total(int t) const {
  double s = 0.0;
  for (int x = 0; x < J; ++x)
    for (int y = 0; y < K; ++y) s += obs(t, x, y);
  for (int y = 0; y < K; ++y) s += mis(t, y);
  return s;
}

double ObservedTable::total_missing() const {
  double s = 0.0;
  for (double v : n_mis) s += v;
  return s;
}

bool ObservedTable::integer_counts(double tol) const {
  auto near_int = [tol](double v) { return std::fabs(v - std::round(v)) <= tol; };
  for (double v : n_obs)
    if (!near_int(v)) return false;
  for (double v : n_mis)
    if (!near_int(v)) return false;
  return true;
}

void ObservedTable::validate() const {
  if (J < 2 || K < 2) throw DataError("table needs J >= 2 and K >= 2");
  if (static_cast<int>(n_obs.size()) != 2 * J * K || static_cast<int>(n_mis.size()) != 2 * K)
    throw DataError("table storage does not match J, K");
  for (double v : n_obs)
    if (!(v >= 0.0)) throw DataError("negative or NaN count");
  for (double v : n_mis)
    if (!(v >= 0.0)) throw DataError("negative or NaN count");
  if (!(total() > 0.0)) throw DataError("table is empty");
}

// ---------------------------------------------------------------------------
// JointDistribution

double JointDistribution::p_tx(int t, int x) const {
  double s = 0.0;
  for (int y = 0; y < K; ++y) s += p_txy(t, x, y);
  return s;
}

double JointDistribution::p_t(int t) const {
  double s = 0.0;
  for (int x = 0; x < J; ++x) s += p_tx(t, x);
  return s;
}

double JointDistribution::p_x(int x) const {
  double s = 0.0;
  for (int t = 0; t < 2; ++t) s += p_tx(t, x);
  return s;
}

double JointDistribution::p_mis_margin(int t, int y) const {
  double s = 0.0;
  for (int x = 0; x < J; ++x) s += cell(t, x, y, 1);
  return s;
}

double JointDistribution::p_y_given_tx(int y, int t, int x) const {
  const double denom = p_tx(t, x);
  if (denom <= 0.0) throw DataError("conditioning event P(T,X) has zero probability");
  return p_txy(t, x, y) / denom;
}

double JointDistribution::p_m1_given_txy(int t, int x, int y) const {
  const double denom = p_txy(t, x, y);
  if (denom <= 0.0) throw DataError("conditioning event P(T,X,Y) has zero probability");
  return cell(t, x, y, 1) / denom;
}

double JointDistribution::p_x_given_t_m(int x, int t, int m) const {
  double num = 0.0, den = 0.0;
  for (int xx = 0; xx < J; ++xx)
    for (int y = 0; y < K; ++y) {
      const double v = cell(t, xx, y, m);
      den += v;
      if (xx == x) num += v;
    }
  if (den <= 0.0) throw DataError("conditioning event P(T,M) has zero probability");
  return num / den;
}

double JointDistribution::sum() const {
  double s = 0.0;
  for (double v : p) s += v;
  return s;
}

void JointDistribution::validate(double tol) const {
  for (double v : p)
    if (!(v >= 0.0)) throw DataError("negative or NaN joint probability");
  if (std::fabs(sum() - 1.0) > tol) throw DataError("joint does not sum to one");
}

ObservedTable JointDistribution::expected_counts(double n) const {
  ObservedTable t(J, K);
  for (int tt = 0; tt < 2; ++tt) {
    for (int x = 0; x < J; ++x)
      for (int y = 0; y < K; ++y) t.obs(tt, x, y) = n * cell(tt, x, y, 0);
    for (int y = 0; y < K; ++y) t.mis(tt, y) = n * p_mis_margin(tt, y);
  }
  return t;
}

// ---------------------------------------------------------------------------
// FactoredParams

void FactoredParams::validate() const {
  if (static_cast<int>(pi_x.size()) != J || static_cast<int>(p_t1_given_x.size()) != J ||
      static_cast<int>(p_y_given_tx.size()) != 2 * J * K)
    throw DataError("factor storage does not match J, K");
  double s = 0.0;
  for (double v : pi_x) {
    if (!(v >= 0.0 && v <= 1.0)) throw DataError("pi_x outside [0,1]");
    s += v;
  }
  if (std::fabs(s - 1.0) > 1e-9) throw DataError("pi_x does not sum to one");
  for (double v : p_t1_given_x)
    if (!(v >= 0.0 && v <= 1.0)) throw DataError("P(T=1|X) outside [0,1]");
  if (randomized) {
    for (int x = 1; x < J; ++x)
      if (std::fabs(p_t1_given_x[x] - p_t1_given_x[0]) > 1e-9)
        throw DataError("randomized flag requires P(T|X) constant in x");
  }
  for (int t = 0; t < 2; ++t)
    for (int x = 0; x < J; ++x) {
      double row = 0.0;
      for (int y = 0; y < K; ++y) {
        const double v = p_y(y, t, x);
        if (!(v >= 0.0 && v <= 1.0)) throw DataError("P(Y|T,X) outside [0,1]");
        row += v;
      }
      if (std::fabs(row - 1.0) > 1e-9) throw DataError("P(Y|T,X) row does not sum to one");
    }
  missingness.validate();
}

JointDistribution compose_joint(const FactoredParams& params) {
  params.validate();
  JointDistribution joint(params.J, params.K);
  for (int t = 0; t < 2; ++t)
    for (int x = 0; x < params.J; ++x) {
      const double pt = t == 1 ? params.p_t1_given_x[x] : 1.0 - params.p_t1_given_x[x];
      for (int y = 0; y < params.K; ++y) {
        const double base = params.pi_x[x] * pt * params.p_y(y, t, x);
        const double lam = params.missingness.miss_prob(t, x, y);
        joint.cell(t, x, y, 1) = base * lam;
        joint.cell(t, x, y, 0) = base * (1.0 - lam);
      }
    }
  return joint;
}

// ---------------------------------------------------------------------------
// Likelihood and empirical summaries

double observed_loglik(const ObservedTable& table, const JointDistribution& joint) {
  if (table.J != joint.J || table.K != joint.K)
    throw DataError("table and joint dimensions disagree");
  double ll = 0.0;
  for (int t = 0; t < 2; ++t) {
    for (int x = 0; x < table.J; ++x)
      for (int y = 0; y < table.K; ++y) {
        const double n = table.obs(t, x, y);
        if (n == 0.0) continue;
        const double p = joint.cell(t, x, y, 0);
        if (p <= 0.0) return -kInf;
        ll += n * std::log(p);
      }
    for (int y = 0; y < table.K; ++y) {
      const double n = table.mis(t, y);
      if (n == 0.0) continue;
      const double p = joint.p_mis_margin(t, y);
      if (p <= 0.0) return -kInf;
      ll += n * std::log(p);
    }
  }
  return ll;
}

double saturated_loglik(const ObservedTable& table) {
  const double n = table.total();
  if (n <= 0.0) return 0.0;
  double ll = 0.0;
  for (double v : table.n_obs)
    if (v > 0.0) ll += v * std::log(v / n);
  for (double v : table.n_mis)
    if (v > 0.0) ll += v * std::log(v / n);
  return ll;
}

EmpiricalConditionals empirical_conditionals(const ObservedTable& table) {
  table.validate();
  EmpiricalConditionals out;
  out.J = table.J;
  out.K = table.K;
  out.p_obs_given_t.assign(2 * table.J * table.K, 0.0);
  out.p_mis_given_t.assign(2 * table.K, 0.0);
  out.p_t.assign(2, 0.0);
  const double n = table.total();
  for (int t = 0; t < 2; ++t) {
    const double nt = table.arm_total(t);
    if (nt <= 0.0) throw DataError("treatment arm " + std::to_string(t) + " has no observations");
    out.p_t[t] = nt / n;
    for (int x = 0; x < table.J; ++x)
      for (int y = 0; y < table.K; ++y)
        out.p_obs_given_t[(t * table.J + x) * table.K + y] = table.obs(t, x, y) / nt;
    for (int y = 0; y < table.K; ++y) out.p_mis_given_t[t * table.K + y] = table.mis(t, y) / nt;
  }
  return out;
}

LogOddsRatio population_log_or(const ObservedTable& table) {
  table.validate();
  if (table.K != 2) throw DataError("population log OR needs a binary outcome");
  double n_ty[2][2] = {{0.0, 0.0}, {0.0, 0.0}};  // pooled over x and m
  for (int t = 0; t < 2; ++t)
    for (int y = 0; y < 2; ++y) {
      for (int x = 0; x < table.J; ++x) n_ty[t][y] += table.obs(t, x, y);
      n_ty[t][y] += table.mis(t, y);
    }
  LogOddsRatio out;
  const double a = n_ty[1][1], b = n_ty[1][0], c = n_ty[0][1], d = n_ty[0][0];
  if (a <= 0.0 || b <= 0.0 || c <= 0.0 || d <= 0.0) {
    out.finite = false;
    out.estimate = (a * d > 0.0 || b * c == 0.0) ? kInf : -kInf;
    out.se = kInf;
    return out;
  }
  out.estimate = std::log(a * d / (b * c));
  out.se = std::sqrt(1.0 / a + 1.0 / b + 1.0 / c + 1.0 / d);
  return out;
}

}  // namespace subcausal
