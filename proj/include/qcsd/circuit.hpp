#pragma once

#include <Eigen/Dense>
#include <vector>

namespace qcsd {

// Gate semantics (qubit 0 = least significant bit of the basis index):
//   CNOT  : flips `target` when `control` is |1>
//   ROTN  : e^{+i angle (sigma . axis)} on `target`, axis a unit 3-vector
//   PHASE : global scalar e^{i angle}
struct Gate {
  enum class Kind { Cnot, Rotn, Phase };
  Kind kind;
  int control = -1;
  int target = -1;
  Eigen::Vector3d axis = Eigen::Vector3d::Zero();
  double angle = 0.0;

  static Gate cnot(int control, int target);
  static Gate rotn(const Eigen::Vector3d& axis, double angle, int target);
  static Gate phase(double angle);
};

// Gates are listed in time order: gates[0] acts first, so the assembled
// operator is gates[n-1] * ... * gates[0].
struct Circuit {
  int nb = 0;
  std::vector<Gate> gates;
};

struct CompileStats {
  int cnot_count = 0;
  int rotation_count = 0;
  double reconstruction_error = 0.0;
  char mode = 'n';  // 'n' = single pass, 'r' = relaxation
};

// Dense 2^nb x 2^nb operator of the circuit. Guard: nb <= 10.
Eigen::MatrixXcd simulate(const Circuit& c);

// The 2x2 matrix of a ROTN gate (or of any axis/angle pair).
Eigen::Matrix2cd rotation_matrix(const Eigen::Vector3d& axis, double angle);

// Inverse of rotation_matrix: recover a ROTN gate from a special-unitary 2x2.
// Throws if |det(m) - 1| > 1e-9.
Gate rotation_gate_from_su2(const Eigen::Matrix2cd& m, int target);

int cnot_count(const Circuit& c);
int rotation_count(const Circuit& c);

// Gate list of c2 appended after c1 (same nb).
Circuit concat(const Circuit& c1, const Circuit& c2);

}  // namespace qcsd
