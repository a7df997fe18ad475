#include "acns/legendre.hpp"

namespace acns::legendre {

void eval(int n, double s, std::vector<double>& p, std::vector<double>& dp) {
  p.assign(n + 1, 0.0);
  dp.assign(n + 1, 0.0);
  p[0] = 1.0;
  if (n == 0) return;
  p[1] = s;
  dp[1] = 1.0;
  for (int k = 1; k < n; ++k) {
    p[k + 1] = ((2.0 * k + 1.0) * s * p[k] - k * p[k - 1]) / (k + 1.0);
    // P'_{k+1} = P'_{k-1} + (2k+1) P_k
    dp[k + 1] = dp[k - 1] + (2.0 * k + 1.0) * p[k];
  }
}

double value(int n, double s) {
  if (n == 0) return 1.0;
  double a = 1.0, b = s;
  for (int k = 1; k < n; ++k) {
    const double c = ((2.0 * k + 1.0) * s * b - k * a) / (k + 1.0);
    a = b;
    b = c;
  }
  return b;
}

}  // namespace acns::legendre
