#pragma once

namespace fiberamp {

// Cylindrical Bessel functions of integer order, extended to negative
// orders via J_{-n} = (-1)^n J_n and K_{-n} = K_n.
double bessel_j(int order, double x);
double bessel_k(int order, double x);

}  // namespace fiberamp
