#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qcsd/su2param.hpp"

namespace qcsd {

// Ordered family of 2x2 unitaries indexed by control bitstring, together
// with the per-member weak-axis flip flags.
struct U2Subset {
  std::vector<Eigen::Matrix2cd> members;
  std::vector<int> flags;
};

struct AxisSolution {
  double kx = 0.0;
  double ky = 0.0;
  Triad triad;                          // triad_from_k(kx, ky)
  double cost = 0.0;                    // correction_cost at that triad
  Eigen::Vector2d residuals{0.0, 0.0};  // stationarity residuals (F1, F2)
};

// Frame whose weak axis is (kx, ky, 1) normalized, with s1 on the equator;
// (0, 0) returns the plain (x, y, z) frame by convention.
Triad triad_from_k(double kx, double ky);

// L = 4 sum_b (1 - cos gamma_b) over the left factorization of every member
// under the triad; zero exactly when every member's rotation axis lies in
// the strong plane.
double correction_cost(const U2Subset& subset, const Triad& triad);

// Stationarity residuals (F1, F2) of the correction cost at (kx, ky).
// Throws std::runtime_error when a member's denominator is singular
// (the solver perturbs and retries).
Eigen::Vector2d residuals(double kx, double ky, const U2Subset& subset);

// Minimize the correction cost over (kx, ky): coarse scan, then damped
// Newton on the residuals with a cost line search, then Nelder-Mead if
// Newton stalls.  Never returns a cost above the initialization's.
AxisSolution optimum_axis(const U2Subset& subset, double kx_init = 0.0,
                          double ky_init = 0.0);

}  // namespace qcsd
