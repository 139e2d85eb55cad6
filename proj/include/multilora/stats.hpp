#ifndef MULTILORA_STATS_HPP
#define MULTILORA_STATS_HPP

#include <span>

namespace multilora {

enum class CiMethod { NormalZ, StudentT };

// Mean, sample standard deviation, standard error of the mean S_m = S/sqrt(N)
// and the 95% confidence interval mean +/- q * S_m, with q = 1.96 for the
// normal approximation or the Student-t 0.975 quantile at N-1 degrees of
// freedom.
struct StatsSummary {
  double mean = 0.0;
  double std_dev = 0.0;
  double std_error = 0.0;
  long n = 0;
  double ci95_low = 0.0;
  double ci95_high = 0.0;

  bool operator==(const StatsSummary&) const = default;
};

StatsSummary summarize(std::span<const double> samples,
                       CiMethod method = CiMethod::NormalZ);

double student_t_975(long degrees_of_freedom);

}  // namespace multilora

#endif  // MULTILORA_STATS_HPP
