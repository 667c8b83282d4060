#include "qcsd/circuit.hpp"

#include <complex>
#include <stdexcept>

namespace qcsd {

using cd = std::complex<double>;

Gate Gate::cnot(int control, int target) {
  if (control == target) throw std::invalid_argument("cnot: control == target");
  Gate g;
  g.kind = Kind::Cnot;
  g.control = control;
  g.target = target;
  return g;
}

Gate Gate::rotn(const Eigen::Vector3d& axis, double angle, int target) {
  if (std::abs(axis.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("rotn: axis must be unit length");
  Gate g;
  g.kind = Kind::Rotn;
  g.axis = axis;
  g.angle = angle;
  g.target = target;
  return g;
}

Gate Gate::phase(double angle) {
  Gate g;
  g.kind = Kind::Phase;
  g.angle = angle;
  return g;
}

Eigen::Matrix2cd rotation_matrix(const Eigen::Vector3d& n, double angle) {
  const cd i(0.0, 1.0);
  Eigen::Matrix2cd sn;
  sn << n.z(), cd(n.x(), -n.y()), cd(n.x(), n.y()), -n.z();
  return std::cos(angle) * Eigen::Matrix2cd::Identity() + i * std::sin(angle) * sn;
}

Gate rotation_gate_from_su2(const Eigen::Matrix2cd& m, int target) {
  const cd det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  if (std::abs(det - cd(1.0, 0.0)) > 1e-9)
    throw std::invalid_argument("rotation_gate_from_su2: determinant is not 1");
  // m = cos(t) I + i sin(t) (sigma . n); read off the four Pauli coordinates.
  const double c = 0.5 * std::real(m(0, 0) + m(1, 1));
  Eigen::Vector3d v(0.5 * std::imag(m(0, 1) + m(1, 0)),
                    0.5 * std::real(m(0, 1) - m(1, 0)),
                    0.5 * std::imag(m(0, 0) - m(1, 1)));
  const double s = v.norm();
  const double theta = std::atan2(s, c);
  Eigen::Vector3d axis = s > 1e-14 ? Eigen::Vector3d(v / s) : Eigen::Vector3d::UnitZ();
  return Gate::rotn(axis, theta, target);
}

namespace {

// Left-multiply U by a one-qubit operator m acting on qubit q: combines row
// pairs (r, r | 1<<q) for every r with bit q clear.
void apply_one_qubit(Eigen::MatrixXcd& U, const Eigen::Matrix2cd& m, int q) {
  const Eigen::Index n = U.rows();
  const Eigen::Index bit = Eigen::Index(1) << q;
  for (Eigen::Index r = 0; r < n; ++r) {
    if (r & bit) continue;
    Eigen::RowVectorXcd row0 = U.row(r);
    Eigen::RowVectorXcd row1 = U.row(r | bit);
    U.row(r) = m(0, 0) * row0 + m(0, 1) * row1;
    U.row(r | bit) = m(1, 0) * row0 + m(1, 1) * row1;
  }
}

void apply_cnot(Eigen::MatrixXcd& U, int control, int target) {
  const Eigen::Index n = U.rows();
  const Eigen::Index cbit = Eigen::Index(1) << control;
  const Eigen::Index tbit = Eigen::Index(1) << target;
  for (Eigen::Index r = 0; r < n; ++r) {
    if ((r & cbit) && !(r & tbit)) U.row(r).swap(U.row(r | tbit));
  }
}

}  // namespace

Eigen::MatrixXcd simulate(const Circuit& c) {
  if (c.nb < 1 || c.nb > 10)
    throw std::invalid_argument("simulate: nb out of range [1, 10]");
  const Eigen::Index n = Eigen::Index(1) << c.nb;
  Eigen::MatrixXcd U = Eigen::MatrixXcd::Identity(n, n);
  for (const Gate& g : c.gates) {
    switch (g.kind) {
      case Gate::Kind::Cnot:
        if (g.control < 0 || g.control >= c.nb || g.target < 0 || g.target >= c.nb)
          throw std::invalid_argument("simulate: cnot qubit index out of range");
        apply_cnot(U, g.control, g.target);
        break;
      case Gate::Kind::Rotn:
        if (g.target < 0 || g.target >= c.nb)
          throw std::invalid_argument("simulate: rotn target out of range");
        apply_one_qubit(U, rotation_matrix(g.axis, g.angle), g.target);
        break;
      case Gate::Kind::Phase:
        U *= std::exp(cd(0.0, g.angle));
        break;
    }
  }
  return U;
}

int cnot_count(const Circuit& c) {
  int n = 0;
  for (const Gate& g : c.gates)
    if (g.kind == Gate::Kind::Cnot) ++n;
  return n;
}

int rotation_count(const Circuit& c) {
  int n = 0;
  for (const Gate& g : c.gates)
    if (g.kind == Gate::Kind::Rotn) ++n;
  return n;
}

Circuit concat(const Circuit& c1, const Circuit& c2) {
  Circuit out = c1;
  out.gates.insert(out.gates.end(), c2.gates.begin(), c2.gates.end());
  return out;
}

}  // namespace qcsd
