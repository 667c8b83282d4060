#pragma once

#include <Eigen/Dense>
#include <complex>

namespace qcsd {

// Orthonormal right-handed frame attached to a one-qubit rotation family:
// s1, s2 span the "strong" plane (axes we may rotate about freely) and
// w = s1 x s2 is the weak direction.
struct Triad {
  Eigen::Vector3d s1{1.0, 0.0, 0.0};
  Eigen::Vector3d s2{0.0, 1.0, 0.0};
  Eigen::Vector3d w{0.0, 0.0, 1.0};

  static Triad orthogonal();  // the (x, y, z) frame
  bool valid(double tol = 1e-9) const;
};

enum class Side { left, right };

// Factorization of a 2x2 unitary V against a triad:
//   side == left :  V = e^{i eta} e^{i gamma sigma_z} e^{i sigma.theta} (i sigma_w)^f
//   side == right:  V = (i sigma_w)^f e^{i sigma.theta} e^{i gamma sigma_z} e^{i eta}
// with theta = alpha*s1 + beta*s2 confined to the strong plane.
struct SU2Params {
  double eta = 0.0;
  double gamma = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  int f = 0;  // 0 or 1: presence of the weak-axis flip factor
  Side side = Side::left;
};

struct SU2Split {
  Eigen::Matrix2cd v;  // special unitary part
  double eta = 0.0;    // U = e^{i eta} v
};

// First row (x, y) of an SU(2) matrix [[x, y], [-conj(y), conj(x)]].
struct XYPair {
  std::complex<double> x;
  std::complex<double> y;
};

// Split a 2x2 unitary into phase times special unitary; eta is half the
// principal angle of det U, so eta lies in (-pi/2, pi/2].
SU2Split project_su2(const Eigen::Matrix2cd& u);

// Left factorization against the plain (x, y, z) frame, closed form.
SU2Params dol_orthogonal(const Eigen::Matrix2cd& v);

// Root of the gamma equation for an oblique triad with slopes
// kx = w_x/w_z, ky = w_y/w_z.  Scans 256 brackets over [-pi, pi), refines
// sign changes by bisection, adds closed-form candidates for the double-root
// degeneracies, and keeps only roots whose full back-substitution
// reconstructs (x, y) with cos(theta) >= 0; among those, smallest |gamma|.
// Throws std::runtime_error when no candidate survives.
double solve_gamma(const XYPair& pair, double kx, double ky);

// Left/right factorization of special unitary V against an oblique triad.
// f = 1 means the flip factor is stripped first (right side for left
// factorization, left side for right factorization).  Requires
// |w_z| >= 1e-8; rotate the frame first when the weak axis sits on the
// equator.  If the gamma solve fails with f = 0, retries with f = 1.
SU2Params dol_oblique(const Eigen::Matrix2cd& v, const Triad& triad, int f);
SU2Params dor_oblique(const Eigen::Matrix2cd& v, const Triad& triad, int f);

// Evaluate the factorization product back into a 2x2 unitary.
Eigen::Matrix2cd su2_reconstruct(const SU2Params& params, const Triad& triad);

// Special unitary R with R sigma_from R^dag = sigma_to, built as
// e^{i (pi/2) sigma.m} about the unit bisector m (or any perpendicular axis
// for antipodal inputs).
Eigen::Matrix2cd rotation_taking(const Eigen::Vector3d& from_dir,
                                 const Eigen::Vector3d& to_dir);

}  // namespace qcsd
