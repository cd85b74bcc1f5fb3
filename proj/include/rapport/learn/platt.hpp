#ifndef RAPPORT_LEARN_PLATT_HPP
#define RAPPORT_LEARN_PLATT_HPP

#include <utility>
#include <vector>

namespace rapport::learn {

// Platt scaling: fits p(y=1|f) = 1 / (1 + exp(a*f + b)) on decision values
// by regularized maximum likelihood with targets (N+ + 1)/(N+ + 2) and
// 1/(N- + 2). Newton steps with backtracking, run to gradient norm <= 1e-8.
// Throws SingleClass when only one label is present.
std::pair<double, double> platt_fit(const std::vector<double>& decision_values,
                                    const std::vector<int>& labels);

// Calibrated probability for a decision value.
double platt_prob(double a, double b, double decision_value);

}  // namespace rapport::learn

#endif  // RAPPORT_LEARN_PLATT_HPP
