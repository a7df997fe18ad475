#pragma once

#include <vector>

namespace acns::legendre {

// P_0..P_n and first derivatives at s in [-1,1].
void eval(int n, double s, std::vector<double>& p, std::vector<double>& dp);

double value(int n, double s);

}  // namespace acns::legendre
