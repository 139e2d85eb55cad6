#include "multilora/stats.hpp"

#include <cmath>

namespace multilora {

double student_t_975(long df) {
  // Two-sided 95% quantiles; beyond the table the normal value is close.
  static constexpr double table[] = {
      12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
      2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
      2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
  if (df < 1) return 1.96;
  if (df <= 30) return table[df - 1];
  if (df <= 40) return 2.021;
  if (df <= 60) return 2.000;
  if (df <= 120) return 1.980;
  return 1.96;
}

StatsSummary summarize(std::span<const double> samples, CiMethod method) {
  StatsSummary s;
  s.n = static_cast<long>(samples.size());
  if (s.n == 0) {
    return s;
  }
  double sum = 0.0;
  for (double v : samples) sum += v;
  s.mean = sum / s.n;

  if (s.n > 1) {
    double sq = 0.0;
    for (double v : samples) {
      const double d = v - s.mean;
      sq += d * d;
    }
    s.std_dev = std::sqrt(sq / (s.n - 1));
  }
  s.std_error = s.std_dev / std::sqrt(static_cast<double>(s.n));
  const double q =
      method == CiMethod::StudentT ? student_t_975(s.n - 1) : 1.96;
  s.ci95_low = s.mean - q * s.std_error;
  s.ci95_high = s.mean + q * s.std_error;
  return s;
}

}  // namespace multilora
