#include "cibp/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace cibp {

double poisson_pmf(double lambda, unsigned long k) {
  if (!(lambda >= 0.0)) throw std::domain_error("poisson_pmf: lambda must be nonnegative");
  if (lambda == 0.0) return k == 0 ? 1.0 : 0.0;
  const double kd = static_cast<double>(k);
  return std::exp(kd * std::log(lambda) - lambda - std::lgamma(kd + 1.0));
}

namespace {

// Lower regularized incomplete gamma P(a,x) by its power series, for x < a+1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 2000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized incomplete gamma Q(a,x) by modified Lentz continued
// fraction, for x >= a+1.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 2000; ++i) {
    const double an = -i * (i - a);
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
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_q(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0)) throw std::domain_error("gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi_square_upper_tail(double statistic, unsigned long df) {
  if (statistic <= 0.0) return 1.0;
  return gamma_q(0.5 * static_cast<double>(df), 0.5 * statistic);
}

GofResult chisq_gof(const CountTable& observed,
                    const std::function<double(std::uint64_t)>& pmf,
                    double min_expected) {
  const std::uint64_t total = observed.total();
  if (total == 0) throw std::invalid_argument("chisq_gof: empty observed table");

  // One cell per observed outcome key; everything unobserved lands in the
  // overflow cell. Keys may be arbitrary (feature counts, class
  // fingerprints), so only observed keys are enumerated.
  const auto n = static_cast<double>(total);
  std::vector<std::pair<double, double>> cells;  // (observed, expected)
  double tail_obs = 0.0;
  double prob_covered = 0.0;
  for (const auto& [key, count] : observed.counts) {
    const double prob = pmf(key);
    prob_covered += prob;
    cells.emplace_back(static_cast<double>(count), n * prob);
  }

  // Overflow cell: all mass beyond the observed range, plus every cell whose
  // expected count is below the pooling threshold. Rounding dust near full
  // coverage must not spawn a phantom cell.
  double remaining = 1.0 - prob_covered;
  if (remaining < 1e-12) remaining = 0.0;
  double tail_exp = n * remaining;
  std::vector<std::pair<double, double>> kept;
  for (const auto& [obs, exp] : cells) {
    if (exp < min_expected) {
      tail_obs += obs;
      tail_exp += exp;
    } else {
      kept.emplace_back(obs, exp);
    }
  }
  if (tail_exp > 0.0) kept.emplace_back(tail_obs, tail_exp);

  if (kept.size() < 2) throw std::invalid_argument("chisq_gof: degenerate binning");

  double stat = 0.0;
  for (const auto& [obs, exp] : kept) {
    const double diff = obs - exp;
    stat += diff * diff / exp;
  }
  const unsigned long df = kept.size() - 1;
  return GofResult{stat, chi_square_upper_tail(stat, df), df, kept.size()};
}

double tv_distance(const CountTable& a, const CountTable& b) {
  const std::uint64_t ta = a.total();
  const std::uint64_t tb = b.total();
  if (ta == 0 || tb == 0) throw std::invalid_argument("tv_distance: empty table");
  const double na = static_cast<double>(ta);
  const double nb = static_cast<double>(tb);

  double sum = 0.0;
  auto ia = a.counts.begin();
  auto ib = b.counts.begin();
  while (ia != a.counts.end() || ib != b.counts.end()) {
    if (ib == b.counts.end() || (ia != a.counts.end() && ia->first < ib->first)) {
      sum += static_cast<double>(ia->second) / na;
      ++ia;
    } else if (ia == a.counts.end() || ib->first < ia->first) {
      sum += static_cast<double>(ib->second) / nb;
      ++ib;
    } else {
      sum += std::fabs(static_cast<double>(ia->second) / na -
                       static_cast<double>(ib->second) / nb);
      ++ia;
      ++ib;
    }
  }
  return 0.5 * sum;
}

}  // namespace cibp
