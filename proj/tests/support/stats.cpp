#include "support/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace qcor::test {

namespace {

// regularized incomplete gamma: series expansion for x < a+1,
// continued fraction (modified Lentz) otherwise
double gamma_p_series(double a, double x) {
  double sum = 1.0 / a;
  double term = sum;
  for (int n = 1; n < 1000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-15) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double chi_square_pvalue(double statistic, int dof) {
  if (dof < 1) throw std::invalid_argument("chi_square_pvalue: dof must be >= 1");
  if (statistic <= 0.0) return 1.0;
  const double a = dof / 2.0;
  const double x = statistic / 2.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi_square_statistic(std::span<const long> counts, std::span<const double> probs) {
  if (counts.size() != probs.size()) {
    throw std::invalid_argument("chi_square_statistic: size mismatch");
  }
  long total = 0;
  for (long c : counts) total += c;
  double stat = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double expected = total * probs[i];
    if (expected <= 0.0) throw std::invalid_argument("chi_square_statistic: zero expected count");
    const double diff = counts[i] - expected;
    stat += diff * diff / expected;
  }
  return stat;
}

}  // namespace qcor::test
