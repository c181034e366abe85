#pragma once

// One binary feature plus intercept logistic regression, and the plain
// agreement rate used when a period has a single ground-truth class.

#include <vector>

namespace ward {

struct LogisticFit {
  double intercept = 0.0;
  double slope = 0.0;
  double accuracy = 0.0;  // in-sample, predicting 1 when p > 0.5
  int iterations = 0;
};

inline constexpr double kLogisticRidge = 1e-6;
inline constexpr double kLogisticGradTol = 1e-8;
inline constexpr int kLogisticMaxIter = 50;

// Damped Newton-Raphson on the mean log-likelihood with an L2 ridge on both
// weights. Throws MisalignedFrames, EmptyPeriod, SingleClassTarget or
// NonConvergence.
LogisticFit fit_logistic(const std::vector<bool>& x, const std::vector<bool>& y);

// Fraction of positions where x and y agree. Throws EmptyPeriod / MisalignedFrames.
double manual_accuracy(const std::vector<bool>& x, const std::vector<bool>& y);

}  // namespace ward
