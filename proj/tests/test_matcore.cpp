#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "qcsd/matcore.hpp"

using namespace qcsd;
using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

namespace {

Eigen::MatrixXcd random_gaussian(Eigen::Index n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = cd(nd(rng), nd(rng));
  return m;
}

// Independent construction of a unitary: plain Householder QR, no phase fix.
Eigen::MatrixXcd qr_unitary(Eigen::Index n, unsigned seed) {
  return Eigen::HouseholderQR<Eigen::MatrixXcd>(random_gaussian(n, seed)).householderQ();
}

}  // namespace

TEST_CASE("is_unitary basic verdicts") {
  CHECK(is_unitary(Eigen::MatrixXcd::Identity(4, 4), 1e-12));
  CHECK_FALSE(is_unitary(2.0 * Eigen::MatrixXcd::Identity(2, 2), 1e-12));
  CHECK(is_unitary(qr_unitary(8, 42), 1e-10));
}

TEST_CASE("normalize_det scalar phase matrix") {
  const Eigen::MatrixXcd u = std::exp(cd(0, kPi / 4)) * Eigen::MatrixXcd::Identity(2, 2);
  const DetNormalized dn = normalize_det(u);
  CHECK((dn.u_norm - Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-14);
  CHECK(dn.phase == doctest::Approx(kPi / 4).epsilon(1e-12));
}

TEST_CASE("normalize_det leaves det-one input alone") {
  Eigen::MatrixXcd u(2, 2);
  u << std::cos(0.7), std::sin(0.7), -std::sin(0.7), std::cos(0.7);  // det = 1
  const DetNormalized dn = normalize_det(u);
  CHECK(std::abs(dn.phase) < 1e-14);
  CHECK((dn.u_norm - u).norm() < 1e-14);
}

TEST_CASE("normalize_det random 4x4") {
  for (unsigned s = 0; s < 8; ++s) {
    const Eigen::MatrixXcd u = qr_unitary(4, 100 + s);
    const DetNormalized dn = normalize_det(u);
    CHECK(std::abs(dn.u_norm.determinant() - cd(1, 0)) < 1e-12);
    // exact reconstruction U = e^{i phase} U_norm
    CHECK((std::exp(cd(0, dn.phase)) * dn.u_norm - u).norm() < 1e-13);
  }
}

TEST_CASE("haar_random_unitary is unitary and deterministic") {
  CHECK(is_unitary(haar_random_unitary(1, 0), 1e-12));
  const Eigen::MatrixXcd a = haar_random_unitary(3, 7);
  const Eigen::MatrixXcd b = haar_random_unitary(3, 7);
  CHECK((a - b).norm() == 0.0);  // bit-identical
  CHECK((haar_random_unitary(2, 1) - haar_random_unitary(2, 2)).norm() > 1e-6);
  CHECK_THROWS(haar_random_unitary(0, 1));
  CHECK_THROWS(haar_random_unitary(11, 1));
}

TEST_CASE("gaussian stream determinism") {
  GaussianStream a(5), b(5);
  for (int i = 0; i < 16; ++i) CHECK(a.normal() == b.normal());
}

TEST_CASE("csd of identity is the canonical gauge") {
  const CSDFactors f = csd(Eigen::MatrixXcd::Identity(4, 4));
  CHECK((f.l0 - Eigen::MatrixXcd::Identity(2, 2)).norm() == 0.0);
  CHECK((f.l1 - Eigen::MatrixXcd::Identity(2, 2)).norm() == 0.0);
  CHECK((f.r0 - Eigen::MatrixXcd::Identity(2, 2)).norm() == 0.0);
  CHECK((f.r1 - Eigen::MatrixXcd::Identity(2, 2)).norm() == 0.0);
  CHECK(f.thetas.norm() == 0.0);
}

TEST_CASE("csd recovers forward-constructed angles") {
  // D = [[C, S], [-S, C]] with angles (0.3, 0.7)
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(4, 4);
  const double t0 = 0.3, t1 = 0.7;
  d(0, 0) = std::cos(t0);
  d(1, 1) = std::cos(t1);
  d(0, 2) = std::sin(t0);
  d(1, 3) = std::sin(t1);
  d(2, 0) = -std::sin(t0);
  d(3, 1) = -std::sin(t1);
  d(2, 2) = std::cos(t0);
  d(3, 3) = std::cos(t1);
  const CSDFactors f = csd(d);
  CHECK(f.thetas[0] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(f.thetas[1] == doctest::Approx(0.7).epsilon(1e-12));
  CHECK((csd_reconstruct(f) - d).norm() < 1e-12);
  CHECK((f.l0 - Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("csd reconstructs a Haar 16x16") {
  const Eigen::MatrixXcd u = haar_random_unitary(4, 3);
  const CSDFactors f = csd(u);
  CHECK((csd_reconstruct(f) - u).norm() <= 1e-10 * 16);
}

TEST_CASE("csd factors pass unitarity and angle canonicalization") {
  for (const Eigen::Index n : {2, 4, 6, 8, 12, 16, 32}) {
    const Eigen::MatrixXcd u = qr_unitary(n, 700 + unsigned(n));
    const CSDFactors f = csd(u);
    CHECK(is_unitary(f.l0, 1e-10));
    CHECK(is_unitary(f.l1, 1e-10));
    CHECK(is_unitary(f.r0, 1e-10));
    CHECK(is_unitary(f.r1, 1e-10));
    CHECK((csd_reconstruct(f) - u).norm() <= 1e-10 * double(n));
    for (Eigen::Index k = 0; k < f.thetas.size(); ++k) {
      CHECK(f.thetas[k] >= -1e-14);
      CHECK(f.thetas[k] <= kPi / 2 + 1e-14);
      if (k) CHECK(f.thetas[k] >= f.thetas[k - 1] - 1e-12);  // ascending
    }
  }
}

TEST_CASE("csd is deterministic") {
  const Eigen::MatrixXcd u = haar_random_unitary(3, 9);
  const CSDFactors a = csd(u), b = csd(u);
  CHECK((a.l0 - b.l0).norm() == 0.0);
  CHECK((a.r1 - b.r1).norm() == 0.0);
  CHECK((a.thetas - b.thetas).norm() == 0.0);
}

TEST_CASE("csd degenerate angle zero: block-diagonal input") {
  const Eigen::MatrixXcd a = qr_unitary(4, 21), b = qr_unitary(4, 22);
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(8, 8);
  u.topLeftCorner(4, 4) = a;
  u.bottomRightCorner(4, 4) = b;
  const CSDFactors f = csd(u);
  CHECK(f.thetas.cwiseAbs().maxCoeff() < 1e-12);
  CHECK((csd_reconstruct(f) - u).norm() <= 1e-10 * 8);
}

TEST_CASE("csd degenerate angle pi/2: block-antidiagonal input") {
  const Eigen::MatrixXcd a = qr_unitary(4, 23), b = qr_unitary(4, 24);
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(8, 8);
  u.topRightCorner(4, 4) = a;
  u.bottomLeftCorner(4, 4) = -b;
  const CSDFactors f = csd(u);
  CHECK((f.thetas.array() - kPi / 2).abs().maxCoeff() < 1e-12);
  CHECK((csd_reconstruct(f) - u).norm() <= 1e-10 * 8);
}

TEST_CASE("csd mixed degenerate and generic angles") {
  // direct sum of a rotation with theta=0 block structure plus a generic part
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(4, 4);
  u(0, 0) = 1;  // theta = 0 for sub-index 0
  u(2, 2) = 1;
  u(1, 1) = std::cos(1.1);
  u(1, 3) = std::sin(1.1);
  u(3, 1) = -std::sin(1.1);
  u(3, 3) = std::cos(1.1);
  const CSDFactors f = csd(u);
  CHECK((csd_reconstruct(f) - u).norm() < 1e-12);
  CHECK(f.thetas.minCoeff() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(f.thetas.maxCoeff() == doctest::Approx(1.1).epsilon(1e-12));
}

TEST_CASE("csd rejects bad inputs") {
  CHECK_THROWS(csd(Eigen::MatrixXcd::Identity(3, 3)));         // odd dimension
  CHECK_THROWS(csd(2.0 * Eigen::MatrixXcd::Identity(4, 4)));   // not unitary
}
