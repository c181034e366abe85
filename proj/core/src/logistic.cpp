#include "ward/logistic.hpp"

#include <array>
#include <cmath>
#include <string>

#include "ward/errors.hpp"

namespace ward {

namespace {

void check_aligned(const std::vector<bool>& x, const std::vector<bool>& y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::MisalignedFrames,
                "feature and target lengths differ (" + std::to_string(x.size()) + " vs " + std::to_string(y.size()) + ")");
  }
  if (x.empty()) throw Error(ErrorCode::EmptyPeriod, "no samples");
}

// -log(sigmoid(z)) without overflow.
double softplus_neg(double z) { return z > 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// n[g][t]: samples with feature g and target t.
using Counts = std::array<std::array<double, 2>, 2>;

double objective(const Counts& n, double total, double w0, double w1) {
  double f = 0.0;
  for (int g = 0; g < 2; ++g) {
    const double z = w0 + w1 * g;
    f += n[g][1] * softplus_neg(z) + n[g][0] * softplus_neg(-z);
  }
  return f / total + 0.5 * kLogisticRidge * (w0 * w0 + w1 * w1);
}

}  // namespace

LogisticFit fit_logistic(const std::vector<bool>& x, const std::vector<bool>& y) {
  check_aligned(x, y);
  Counts n{};
  for (std::size_t i = 0; i < x.size(); ++i) n[x[i]][y[i]] += 1.0;
  const double total = static_cast<double>(x.size());
  const double pos = n[0][1] + n[1][1];
  if (pos == 0.0 || pos == total) {
    throw Error(ErrorCode::SingleClassTarget, "target has a single class; use manual accuracy");
  }

  double w0 = 0.0, w1 = 0.0;
  double f = objective(n, total, w0, w1);
  int iter = 0;
  for (;; ++iter) {
    double g0 = kLogisticRidge * w0, g1 = kLogisticRidge * w1;
    double h00 = kLogisticRidge, h01 = 0.0, h11 = kLogisticRidge;
    for (int g = 0; g < 2; ++g) {
      const double m = n[g][0] + n[g][1];
      if (m == 0.0) continue;
      const double p = sigmoid(w0 + w1 * g);
      const double r = (m * p - n[g][1]) / total;
      const double v = m * p * (1.0 - p) / total;
      g0 += r;
      g1 += r * g;
      h00 += v;
      h01 += v * g;
      h11 += v * g * g;
    }
    if (std::hypot(g0, g1) < kLogisticGradTol) break;
    if (iter == kLogisticMaxIter) {
      throw Error(ErrorCode::NonConvergence, "logistic fit did not converge in " + std::to_string(kLogisticMaxIter) +
                                                 " iterations");
    }
    const double det = h00 * h11 - h01 * h01;
    const double s0 = (h11 * g0 - h01 * g1) / det;
    const double s1 = (h00 * g1 - h01 * g0) / det;
    double t = 1.0;
    double nf = objective(n, total, w0 - s0, w1 - s1);
    while (nf > f + 1e-14 && t > 1e-10) {
      t *= 0.5;
      nf = objective(n, total, w0 - t * s0, w1 - t * s1);
    }
    w0 -= t * s0;
    w1 -= t * s1;
    f = nf;
  }

  double correct = 0.0;
  for (int g = 0; g < 2; ++g) correct += (w0 + w1 * g > 0.0) ? n[g][1] : n[g][0];
  return {w0, w1, correct / total, iter};
}

double manual_accuracy(const std::vector<bool>& x, const std::vector<bool>& y) {
  check_aligned(x, y);
  std::size_t same = 0;
  for (std::size_t i = 0; i < x.size(); ++i) same += x[i] == y[i];
  return static_cast<double>(same) / static_cast<double>(x.size());
}

}  // namespace ward
