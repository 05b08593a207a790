#include "fiberamp/bessel.hpp"

#include <cmath>
#include <cstdlib>

namespace fiberamp {

double bessel_j(int order, double x) {
  const int n = std::abs(order);
  double v = std::cyl_bessel_j(static_cast<double>(n), x);
  if (order < 0 && (n & 1)) v = -v;
  return v;
}

double bessel_k(int order, double x) {
  return std::cyl_bessel_k(static_cast<double>(std::abs(order)), x);
}

}  // namespace fiberamp
