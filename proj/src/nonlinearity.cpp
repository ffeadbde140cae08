#include "fplap/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fplap {

namespace {

// Lower incomplete gamma, gamma(a,x) = int_0^x t^{a-1} e^{-t} dt, by the
// classic series (x < a+1) / continued-fraction (x >= a+1) split.
double lower_incomplete_gamma(double a, double x) {
  if (x <= 0.0) return 0.0;
  if (x < a + 1.0) {
    double term = 1.0 / a;
    double sum = term;
    for (int k = 1; k < 500; ++k) {
      term *= x / (a + k);
      sum += term;
      if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x));
  }
  // Upper gamma via modified Lentz, then gamma = Gamma(a) - Gamma(a,x).
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int k = 1; k < 500; ++k) {
    const double an = -k * (k - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  const double upper = std::exp(-x + a * std::log(x)) * h;
  return std::tgamma(a) - upper;
}

// Adaptive Simpson on a smooth integrand; used only for F of the built-in
// exp-damped form at negative arguments.
double adaptive_simpson(double (*fn)(double, double), double param, double a,
                        double b, double fa, double fm, double fb, double whole,
                        double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = fn(lm, param), frm = fn(rm, param);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * eps)
    return left + right + delta / 15.0;
  return adaptive_simpson(fn, param, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
         adaptive_simpson(fn, param, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

double integrate(double (*fn)(double, double), double param, double a, double b,
                 double eps) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = fn(a, param), fm = fn(m, param), fb = fn(b, param);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(fn, param, a, b, fa, fm, fb, whole, eps, 48);
}

double exp_damped_integrand(double t, double p) {
  return std::pow(std::fabs(t), p) * std::exp(-t);
}

double signed_abs_pow(double t, double e) {
  // |t|^{e-1} t with the t=0 case handled (pow(0, negative) is inf)
  if (t == 0.0) return 0.0;
  return std::pow(std::fabs(t), e - 1.0) * t;
}

}  // namespace

double Nonlinearity::f(int vertex, double t) const {
  if (positive_part && t <= 0.0) return 0.0;
  double base = 0.0;
  switch (form) {
    case Form::zero:
      return 0.0;
    case Form::power:
      base = amplitude * signed_abs_pow(t, r - 1.0);
      break;
    case Form::exp_damped_power:
      base = amplitude * std::pow(std::fabs(t), p_ref) * std::exp(-t);
      break;
    case Form::table: {
      if (table_t.empty()) return 0.0;
      if (t < table_t.front() || t > table_t.back())
        throw std::domain_error("tabulated nonlinearity evaluated at t=" +
                                std::to_string(t) + " outside its range [" +
                                std::to_string(table_t.front()) + "," +
                                std::to_string(table_t.back()) + "]");
      const auto it = std::upper_bound(table_t.begin(), table_t.end(), t);
      const std::size_t hi = std::min<std::size_t>(
          std::max<std::size_t>(it - table_t.begin(), 1), table_t.size() - 1);
      const std::size_t lo = hi - 1;
      const double w = (t - table_t[lo]) / (table_t[hi] - table_t[lo]);
      base = table_f[lo] + w * (table_f[hi] - table_f[lo]);
      break;
    }
  }
  if (!spatial_weight.empty()) {
    if (vertex < 0 || static_cast<std::size_t>(vertex) >= spatial_weight.size())
      throw std::invalid_argument("spatial weight index out of range");
    base *= spatial_weight[vertex];
  }
  return base;
}

double Nonlinearity::F(int vertex, double t) const {
  if (positive_part && t <= 0.0) return 0.0;
  double base = 0.0;
  switch (form) {
    case Form::zero:
      return 0.0;
    case Form::power:
      base = (amplitude / r) * std::pow(std::fabs(t), r);
      break;
    case Form::exp_damped_power:
      if (t >= 0.0)
        base = amplitude * lower_incomplete_gamma(p_ref + 1.0, t);
      else
        base = amplitude * integrate(exp_damped_integrand, p_ref, 0.0, t, 1e-14);
      break;
    case Form::table: {
      if (table_t.empty()) return 0.0;
      if (t < table_t.front() || t > table_t.back() || 0.0 < table_t.front() ||
          0.0 > table_t.back())
        throw std::domain_error(
            "tabulated primitive needs [0,t] inside the table range");
      // Exact primitive of the linear interpolant: trapezoid over full
      // segments plus the partial segment.
      const double lo = std::min(0.0, t), hi = std::max(0.0, t);
      double acc = 0.0;
      for (std::size_t k = 0; k + 1 < table_t.size(); ++k) {
        const double a = std::max(lo, table_t[k]);
        const double b = std::min(hi, table_t[k + 1]);
        if (a >= b) continue;
        const double seg = table_t[k + 1] - table_t[k];
        auto fat = [&](double x) {
          const double w = (x - table_t[k]) / seg;
          return table_f[k] + w * (table_f[k + 1] - table_f[k]);
        };
        acc += 0.5 * (fat(a) + fat(b)) * (b - a);
      }
      base = t >= 0.0 ? acc : -acc;
      break;
    }
  }
  if (!spatial_weight.empty()) {
    if (vertex < 0 || static_cast<std::size_t>(vertex) >= spatial_weight.size())
      throw std::invalid_argument("spatial weight index out of range");
    base *= spatial_weight[vertex];
  }
  return base;
}

Nonlinearity Nonlinearity::zero_reaction() {
  Nonlinearity nl;
  nl.form = Form::zero;
  nl.amplitude = 0.0;
  return nl;
}

Nonlinearity Nonlinearity::power(double amplitude, double r) {
  if (!(r > 1.0)) throw std::invalid_argument("power form needs r > 1");
  Nonlinearity nl;
  nl.form = Form::power;
  nl.amplitude = amplitude;
  nl.r = r;
  nl.beta = std::max(amplitude, 1.0);
  nl.q_growth = r;
  return nl;
}

Nonlinearity Nonlinearity::exp_damped_power(double amplitude, double p_ref) {
  if (!(p_ref > 0.0))
    throw std::invalid_argument("exp_damped_power needs a positive exponent");
  Nonlinearity nl;
  nl.form = Form::exp_damped_power;
  nl.amplitude = amplitude;
  nl.p_ref = p_ref;
  nl.beta = std::max(amplitude, 1.0);
  nl.q_growth = p_ref + 1.0;
  return nl;
}

Nonlinearity Nonlinearity::from_table(std::vector<double> t,
                                      std::vector<double> f) {
  if (t.size() != f.size() || t.size() < 2)
    throw std::invalid_argument("table form needs >= 2 matching (t,f) samples");
  if (!std::is_sorted(t.begin(), t.end()) ||
      std::adjacent_find(t.begin(), t.end()) != t.end())
    throw std::invalid_argument("table t samples must be strictly increasing");
  Nonlinearity nl;
  nl.form = Form::table;
  nl.table_t = std::move(t);
  nl.table_f = std::move(f);
  return nl;
}

std::string Nonlinearity::describe() const {
  std::ostringstream os;
  switch (form) {
    case Form::zero: os << "f = 0"; break;
    case Form::power:
      os << "f = " << amplitude << " |t|^" << (r - 1.0) << " sign(t)";
      break;
    case Form::exp_damped_power:
      os << "f = " << amplitude << " |t|^" << p_ref << " exp(-t)";
      break;
    case Form::table:
      os << "f tabulated on [" << table_t.front() << "," << table_t.back() << "]";
      break;
  }
  if (positive_part) os << ", truncated to t > 0";
  return os.str();
}

namespace {

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> g(count);
  const double a = std::log(lo), b = std::log(hi);
  for (int k = 0; k < count; ++k)
    g[k] = std::exp(a + (b - a) * k / (count - 1));
  return g;
}

}  // namespace

ConditionReport check_growth_f1(const Nonlinearity& nl, ConditionGrid grid) {
  ConditionReport rep;
  rep.condition = "f1";
  rep.worst_margin = std::numeric_limits<double>::infinity();
  const auto mags = log_grid(grid.t_min, grid.t_max, grid.count);
  auto probe = [&](double t) {
    const double bound = nl.beta * (1.0 + std::pow(std::fabs(t), nl.q_growth - 1.0));
    const double margin = (bound - std::fabs(nl.f(0, t))) / bound;
    ++rep.samples;
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_t = t;
    }
  };
  probe(0.0);
  for (double m : mags) {
    probe(m);
    probe(-m);
  }
  rep.pass = rep.worst_margin >= -1e-12;
  std::ostringstream os;
  os << "|f| <= beta(1+|t|^{q-1}) with beta=" << nl.beta << ", q=" << nl.q_growth
     << "; worst relative margin " << rep.worst_margin << " at t=" << rep.worst_t;
  rep.detail = os.str();
  return rep;
}

ConditionReport check_limit_f2(const Nonlinearity& nl, double t_max,
                               double threshold) {
  ConditionReport rep;
  rep.condition = "f2";
  double tail = 0.0;
  for (double sign : {1.0, -1.0}) {
    const double t = sign * t_max;
    tail = std::max(tail, std::fabs(nl.f(0, t)) / std::pow(std::fabs(t), nl.q_growth - 1.0));
  }
  rep.samples = 2;
  rep.worst_t = t_max;
  rep.worst_margin = threshold - tail;
  rep.pass = tail <= threshold;
  std::ostringstream os;
  os << "|f(t)|/|t|^{q-1} = " << tail << " at |t|=" << t_max << " (threshold "
     << threshold << ")";
  rep.detail = os.str();
  return rep;
}

ConditionReport check_limit_f3(const Nonlinearity& nl, double p, double z_min,
                               double threshold) {
  ConditionReport rep;
  rep.condition = "f3";
  double tail = 0.0;
  for (double sign : {1.0, -1.0}) {
    const double z = sign * z_min;
    tail = std::max(tail, std::fabs(nl.f(0, z)) / std::pow(std::fabs(z), p - 1.0));
  }
  rep.samples = 2;
  rep.worst_t = z_min;
  rep.worst_margin = threshold - tail;
  rep.pass = tail <= threshold;
  std::ostringstream os;
  os << "|f(z)|/|z|^{p-1} = " << tail << " at |z|=" << z_min << " (threshold "
     << threshold << ")";
  rep.detail = os.str();
  return rep;
}

ConditionReport check_ar_f4(const Nonlinearity& nl, double mu_ar, double p,
                            ConditionGrid grid) {
  if (!(mu_ar > p))
    throw std::invalid_argument("AR condition needs mu_ar > p; got mu_ar=" +
                                std::to_string(mu_ar) + ", p=" + std::to_string(p));
  ConditionReport rep;
  rep.condition = "f4";
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (double t : log_grid(grid.t_min, grid.t_max, grid.count)) {
    const double Ft = nl.F(0, t);
    const double tf = t * nl.f(0, t);
    const double scale = std::max({std::fabs(Ft) * mu_ar, std::fabs(tf), 1e-300});
    // both requirements of 0 < mu F <= t f, as a signed relative margin
    const double margin = std::min(tf - mu_ar * Ft, Ft) / scale;
    ++rep.samples;
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_t = t;
    }
  }
  rep.pass = rep.worst_margin >= -1e-10;
  std::ostringstream os;
  os << "0 < " << mu_ar << "*F(t) <= t*f(t); worst relative margin "
     << rep.worst_margin << " at t=" << rep.worst_t;
  rep.detail = os.str();
  return rep;
}

ConditionReport check_monotone_f5(const Nonlinearity& nl, double p,
                                  ConditionGrid grid) {
  ConditionReport rep;
  rep.condition = "f5";
  const auto ts = log_grid(grid.t_min, grid.t_max, grid.count);
  auto h = [&](double t) { return nl.f(0, t) / std::pow(t, p - 1.0); };
  rep.pass = true;
  double prev = h(ts[0]);
  rep.samples = 1;
  for (std::size_t k = 1; k < ts.size(); ++k) {
    const double cur = h(ts[k]);
    ++rep.samples;
    if (!(cur < prev)) {
      rep.pass = false;
      rep.worst_t = ts[k];
      rep.worst_margin = prev - cur;  // <= 0 here
      std::ostringstream os;
      os << "h(t)=f(t)/t^{p-1} fails strict decrease between t=" << ts[k - 1]
         << " and t=" << ts[k] << " (h=" << prev << " -> " << cur << ")";
      rep.detail = os.str();
      return rep;
    }
    prev = cur;
  }
  rep.worst_margin = 0.0;
  rep.detail = "h(t)=f(t)/t^{p-1} strictly decreasing across all samples";
  return rep;
}

std::vector<ConditionReport> check_all_conditions(const Nonlinearity& nl,
                                                  double p) {
  std::vector<ConditionReport> reports;
  reports.push_back(check_growth_f1(nl));
  reports.push_back(check_limit_f2(nl));
  reports.push_back(check_limit_f3(nl, p));
  if (nl.mu_ar && *nl.mu_ar > p)
    reports.push_back(check_ar_f4(nl, *nl.mu_ar, p));
  reports.push_back(check_monotone_f5(nl, p));
  return reports;
}

}
