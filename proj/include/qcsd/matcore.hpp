#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

namespace qcsd {

// Cosine-sine factors of a 2n x 2n unitary split into n x n blocks:
//   U = [L0 0; 0 L1] * [C S; -S C] * [R0 0; 0 R1]
// with C = diag(cos theta_k), S = diag(sin theta_k), theta ascending in
// [0, pi/2]. The middle factor is the block form of e^{i sigma_y (x) Theta}
// acting on the most significant qubit.
struct CSDFactors {
  Eigen::MatrixXcd l0, l1, r0, r1;
  Eigen::VectorXd thetas;
};

bool is_unitary(const Eigen::MatrixXcd& m, double tol);

// U = e^{i phase} * U_norm with det(U_norm) = 1; phase is the principal
// dim-th root branch: arg(det U) / dim with arg in (-pi, pi].
struct DetNormalized {
  Eigen::MatrixXcd u_norm;
  double phase;
};
DetNormalized normalize_det(const Eigen::MatrixXcd& u);

// Deterministic Haar-distributed unitary of dimension 2^nb (QR of a complex
// Gaussian matrix with the R diagonal's phases folded back into Q). The
// Gaussian stream is generated locally so results are identical across
// platforms for a fixed seed. 1 <= nb <= 10.
Eigen::MatrixXcd haar_random_unitary(int nb, std::uint64_t seed);

CSDFactors csd(const Eigen::MatrixXcd& u);

// Reassemble the product defined by CSDFactors (test/verification helper).
Eigen::MatrixXcd csd_reconstruct(const CSDFactors& f);

// Deterministic stream of standard normals used by haar_random_unitary.
// Uses mt19937_64 with a hand-rolled uniform + Box-Muller, because the
// standard library distributions are implementation-defined and would break
// fixture reproducibility across toolchains.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : eng_(seed) {}
  double normal();
  double uniform01();  // in [0, 1)

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace qcsd
