#include "qcsd/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qcsd {

using cd = std::complex<double>;

bool is_unitary(const Eigen::MatrixXcd& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const Eigen::Index n = m.rows();
  return (m * m.adjoint() - Eigen::MatrixXcd::Identity(n, n)).norm() <= tol;
}

DetNormalized normalize_det(const Eigen::MatrixXcd& u) {
  // arg(det) accumulated factor-by-factor from the LU diagonal; the raw
  // determinant product would under/overflow past dim ~ 512.
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(u);
  cd phase_acc(1.0, 0.0);
  const auto& lum = lu.matrixLU();
  for (Eigen::Index k = 0; k < u.rows(); ++k) {
    cd d = lum(k, k);
    phase_acc *= d / std::abs(d);
  }
  int det_p = lu.permutationP().determinant();  // +1 or -1
  phase_acc *= double(det_p);
  double det_arg = std::arg(phase_acc);  // principal in (-pi, pi]
  double phase = det_arg / double(u.rows());
  DetNormalized out;
  out.phase = phase;
  out.u_norm = std::exp(cd(0.0, -phase)) * u;
  return out;
}

double GaussianStream::uniform01() {
  return double(eng_() >> 11) * (1.0 / 9007199254740992.0);  // 53-bit mantissa
}

double GaussianStream::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform01();
  } while (u1 <= 0.0);
  double u2 = uniform01();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * M_PI * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

Eigen::MatrixXcd haar_random_unitary(int nb, std::uint64_t seed) {
  if (nb < 1 || nb > 10)
    throw std::invalid_argument("haar_random_unitary: nb out of range [1, 10]");
  const Eigen::Index n = Eigen::Index(1) << nb;
  GaussianStream g(seed);
  Eigen::MatrixXcd z(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) z(r, c) = cd(g.normal(), g.normal());
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ();
  Eigen::MatrixXcd rm = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index c = 0; c < n; ++c) {
    cd d = rm(c, c);
    q.col(c) *= d / std::abs(d);
  }
  return q;
}

namespace {

// Modified Gram-Schmidt projection of col against the accumulated columns.
void project_out(const std::vector<Eigen::VectorXcd>& basis, Eigen::VectorXcd& col) {
  for (const auto& q : basis) col -= q * (q.dot(col));
}

}  // namespace

CSDFactors csd(const Eigen::MatrixXcd& u) {
  const Eigen::Index dim = u.rows();
  if (dim < 2 || dim % 2 != 0)
    throw std::invalid_argument("csd: dimension must be even and >= 2");
  if (!is_unitary(u, 1e-8 * double(dim))) {
    double res = (u * u.adjoint() - Eigen::MatrixXcd::Identity(dim, dim)).norm();
    throw std::invalid_argument("csd: input not unitary, residual " + std::to_string(res));
  }
  const Eigen::Index n = dim / 2;
  Eigen::MatrixXcd u00 = u.topLeftCorner(n, n);
  Eigen::MatrixXcd u01 = u.topRightCorner(n, n);
  Eigen::MatrixXcd u10 = u.bottomLeftCorner(n, n);
  Eigen::MatrixXcd u11 = u.bottomRightCorner(n, n);

  // BDCSVD: divide-and-conquer is far faster than one-sided Jacobi once the
  // half-dimension reaches ~64, and falls back to Jacobi for small blocks.
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(u00, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::MatrixXcd w = svd.matrixU();
  Eigen::MatrixXcd vh = svd.matrixV().adjoint();
  Eigen::VectorXd sv = svd.singularValues();

  Eigen::MatrixXcd x = u10 * vh.adjoint();  // = -L1 * S
  Eigen::VectorXd theta0(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    double s = std::clamp(sv(k), 0.0, 1.0);
    theta0(k) = std::atan2(x.col(k).norm(), s);
  }
  // Ascending theta via a stable sort: ties keep SVD order, so identity-like
  // inputs keep identity factors instead of picking up a column exchange.
  std::vector<Eigen::Index> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return theta0(a) < theta0(b); });
  CSDFactors f;
  f.l0.resize(n, n);
  f.r0.resize(n, n);
  f.thetas.resize(n);
  Eigen::MatrixXcd xp(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    f.l0.col(k) = w.col(perm[k]);
    f.r0.row(k) = vh.row(perm[k]);
    xp.col(k) = x.col(perm[k]);
    f.thetas(k) = theta0(perm[k]);
  }

  Eigen::MatrixXcd m = f.l0.adjoint() * u01;  // = S * R1
  f.l1 = Eigen::MatrixXcd::Zero(n, n);
  Eigen::VectorXd svals = f.thetas.array().sin();

  // L1 columns from -X/s in decreasing-s order (MGS); columns with tiny s or
  // that collapse under projection are completed from the canonical basis.
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return svals(a) > svals(b); });
  std::vector<Eigen::VectorXcd> have;
  std::vector<bool> col_ok(n, false);
  for (Eigen::Index k : order) {
    double s = svals(k);
    if (s < 1e-13) continue;
    Eigen::VectorXcd col = -xp.col(k) / s;
    project_out(have, col);
    double nc = col.norm();
    if (nc < 0.5 * s || nc < 1e-13) continue;
    col /= nc;
    f.l1.col(k) = col;
    col_ok[k] = true;
    have.push_back(col);
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    if (col_ok[k]) continue;
    for (Eigen::Index e = 0; e < n; ++e) {
      Eigen::VectorXcd col = Eigen::VectorXcd::Zero(n);
      col(e) = 1.0;
      project_out(have, col);
      double nc = col.norm();
      if (nc > 0.5) {
        col /= nc;
        f.l1.col(k) = col;
        col_ok[k] = true;
        have.push_back(col);
        break;
      }
    }
    if (!col_ok[k]) throw std::runtime_error("csd: failed to complete L1 basis");
  }

  // R1 rows: prefer the C-equation when cos is healthy, else the S-equation.
  f.r1.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    double c = std::cos(f.thetas(k));
    double s = std::sin(f.thetas(k));
    if (c >= 1e-3)
      f.r1.row(k) = (f.l1.col(k).adjoint() * u11) / c;
    else
      f.r1.row(k) = m.row(k) / s;
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index j = 0; j < k; ++j)
      f.r1.row(k) -= f.r1.row(j) * (f.r1.row(j).conjugate().cwiseProduct(f.r1.row(k)).sum());
    f.r1.row(k) /= f.r1.row(k).norm();
  }
  return f;
}

Eigen::MatrixXcd csd_reconstruct(const CSDFactors& f) {
  const Eigen::Index n = f.thetas.size();
  Eigen::MatrixXcd c = f.thetas.array().cos().matrix().asDiagonal().toDenseMatrix().cast<cd>();
  Eigen::MatrixXcd s = f.thetas.array().sin().matrix().asDiagonal().toDenseMatrix().cast<cd>();
  Eigen::MatrixXcd out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = f.l0 * c * f.r0;
  out.topRightCorner(n, n) = f.l0 * s * f.r1;
  out.bottomLeftCorner(n, n) = -f.l1 * s * f.r0;
  out.bottomRightCorner(n, n) = f.l1 * c * f.r1;
  return out;
}

}  // namespace qcsd
