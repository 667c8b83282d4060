#include "qcsd/muxseo.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace qcsd {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

int ctz(int x) {
  int n = 0;
  while (!(x & 1)) {
    x >>= 1;
    ++n;
  }
  return n;
}

Eigen::Matrix2cd iw_flip(const Eigen::Vector3d& w) { return rotation_matrix(w, kPi / 2); }

int span_nb(int target, const std::vector<int>& controls) {
  int m = target;
  for (int c : controls) m = std::max(m, c);
  return m + 1;
}

// In-place +/-1 Walsh-Hadamard butterfly (unnormalized).
void wht(Eigen::VectorXd& v) {
  const int n = static_cast<int>(v.size());
  for (int half = 1; half < n; half *= 2) {
    for (int start = 0; start < n; start += 2 * half) {
      for (int j = start; j < start + half; ++j) {
        const double a = v[j], b = v[j + half];
        v[j] = a + b;
        v[j + half] = a - b;
      }
    }
  }
}

}  // namespace

int gray_code(int j) { return j ^ (j >> 1); }

GrayOrder gray_order(int nk) {
  if (nk < 1) throw std::invalid_argument("gray_order: nk must be >= 1");
  const int n = 1 << nk;
  GrayOrder g;
  g.order.resize(n);
  g.flip_positions.resize(n);
  for (int j = 0; j < n; ++j) {
    g.order[j] = gray_code(j);
    g.flip_positions[j] = j + 1 < n ? ctz(j + 1) : nk - 1;
  }
  return g;
}

Eigen::VectorXd hadamard_transform_angles(const Eigen::VectorXd& phi) {
  const int n = static_cast<int>(phi.size());
  if (n < 1 || (n & (n - 1)))
    throw std::invalid_argument("hadamard_transform_angles: length must be a power of two");
  Eigen::VectorXd out = phi;
  wht(out);
  return out / double(n);
}

Eigen::Matrix2cd ConvenientMultiplexor::member(int b) const {
  Eigen::Vector3d v = phi1[b] * triad.s1 + phi2[b] * triad.s2;
  const double t = v.norm();
  Eigen::Matrix2cd e = t > 0.0 ? rotation_matrix(Eigen::Vector3d(v / t), t)
                               : Eigen::Matrix2cd::Identity();
  if (flags[b]) e = e * iw_flip(triad.w);
  return e;
}

Multiplexor ConvenientMultiplexor::as_multiplexor() const {
  Multiplexor m;
  m.target = target;
  m.controls = controls;
  m.subset = subset;
  return m;
}

DiagonalUnitary DiagonalUnitary::identity(int nb) {
  return DiagonalUnitary{nb, Eigen::VectorXd::Zero(Eigen::Index(1) << nb)};
}

Eigen::VectorXcd DiagonalUnitary::diag() const {
  return (cd(0, 1) * phases.cast<cd>().array()).exp();
}

Eigen::MatrixXcd mux_operator(const Multiplexor& mux, int nb) {
  const int nk = mux.nk();
  if (static_cast<int>(mux.subset.members.size()) != (1 << nk))
    throw std::invalid_argument("mux_operator: member count != 2^nk");
  if (span_nb(mux.target, mux.controls) > nb)
    throw std::invalid_argument("mux_operator: qubit index out of range");
  const Eigen::Index dim = Eigen::Index(1) << nb;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index x = 0; x < dim; ++x) {
    int b = 0;
    for (int j = 0; j < nk; ++j) b |= int((x >> mux.controls[j]) & 1) << j;
    const int t = int(x >> mux.target) & 1;
    const Eigen::Index x0 = x & ~(Eigen::Index(1) << mux.target);
    const Eigen::Matrix2cd& u = mux.subset.members[b];
    out(x0, x) += u(0, t);
    out(x0 | (Eigen::Index(1) << mux.target), x) += u(1, t);
  }
  return out;
}

Eigen::MatrixXcd mux_operator(const ConvenientMultiplexor& mux, int nb) {
  return mux_operator(mux.as_multiplexor(), nb);
}

namespace {

// Shared layout of both Gray expansions: conjugator T mapping the controlled
// flip axis to x (so flips emit as plain CNOTs), and per-slot rotation
// generators already in Gray order.
struct GrayLayout {
  Eigen::Matrix2cd t = Eigen::Matrix2cd::Identity();
  bool t_is_identity = true;
  std::vector<Eigen::Vector3d> slot_vecs;  // generator of slot i (original frame)
};

Eigen::Matrix2cd slot_rotation(const Eigen::Vector3d& v) {
  const double t = v.norm();
  if (t < 1e-300) return Eigen::Matrix2cd::Identity();
  return rotation_matrix(Eigen::Vector3d(v / t), t);
}

void set_conjugator(GrayLayout& lay, const Eigen::Vector3d& flip_axis) {
  if ((flip_axis - Eigen::Vector3d::UnitX()).norm() < 1e-12) {
    lay.t = Eigen::Matrix2cd::Identity();
    lay.t_is_identity = true;
  } else {
    lay.t = rotation_taking(flip_axis, Eigen::Vector3d::UnitX());
    lay.t_is_identity = false;
  }
}

}  // namespace

Circuit expand_d_multiplexor(const ConvenientMultiplexor& mux) {
  const int nk = mux.nk();
  for (int f : mux.flags)
    if (f) throw std::invalid_argument("expand_d_multiplexor: flags must all be 0");
  if (nk < 1) throw std::invalid_argument("expand_d_multiplexor: needs at least one control");
  const int n = 1 << nk;

  // Member generators and collinearity test.
  std::vector<Eigen::Vector3d> vecs(n);
  double vmax = 0.0;
  int imax = 0;
  for (int b = 0; b < n; ++b) {
    vecs[b] = mux.phi1[b] * mux.triad.s1 + mux.phi2[b] * mux.triad.s2;
    if (vecs[b].norm() > vmax) {
      vmax = vecs[b].norm();
      imax = b;
    }
  }
  bool collinear = true;
  Eigen::Vector3d u = mux.triad.s2;  // direction carrier when all angles vanish
  if (vmax > 1e-14) {
    u = vecs[imax] / vmax;
    for (int b = 0; b < n && collinear; ++b)
      if (vecs[b].cross(u).norm() > 1e-10 * (1.0 + vecs[b].norm())) collinear = false;
  }

  GrayLayout lay;
  Eigen::VectorXd h1, h2;
  if (collinear) {
    // Any flip axis orthogonal to the common direction works; prefer one that
    // makes the conjugator trivial.
    Eigen::Vector3d flip = Eigen::Vector3d::UnitX() - Eigen::Vector3d::UnitX().dot(u) * u;
    if (flip.norm() < 1e-8)
      flip = Eigen::Vector3d::UnitZ() - Eigen::Vector3d::UnitZ().dot(u) * u;
    flip.normalize();
    set_conjugator(lay, flip);
    Eigen::VectorXd phi(n);
    for (int b = 0; b < n; ++b) phi[b] = vecs[b].dot(u);
    h1 = hadamard_transform_angles(phi);
    lay.slot_vecs.resize(n);
    for (int i = 0; i < n; ++i) lay.slot_vecs[i] = h1[gray_code(i)] * u;
  } else {
    set_conjugator(lay, mux.triad.w);
    h1 = hadamard_transform_angles(mux.phi1);
    h2 = hadamard_transform_angles(mux.phi2);
    lay.slot_vecs.resize(n);
    for (int i = 0; i < n; ++i)
      lay.slot_vecs[i] = h1[gray_code(i)] * mux.triad.s1 + h2[gray_code(i)] * mux.triad.s2;
  }

  Circuit c;
  c.nb = span_nb(mux.target, mux.controls);
  const Eigen::Matrix2cd tdag = lay.t.adjoint();
  for (int i = 0; i < n; ++i) {
    Eigen::Matrix2cd ri = slot_rotation(lay.slot_vecs[i]);
    Eigen::Matrix2cd m = lay.t_is_identity
                             ? ri
                             : (i == 0 ? Eigen::Matrix2cd(lay.t * ri)
                                       : Eigen::Matrix2cd(lay.t * ri * tdag));
    c.gates.push_back(rotation_gate_from_su2(m, mux.target));
    const int flip = i + 1 < n ? ctz(i + 1) : nk - 1;
    c.gates.push_back(Gate::cnot(mux.controls[flip], mux.target));
  }
  if (!lay.t_is_identity)
    c.gates.push_back(rotation_gate_from_su2(tdag, mux.target));
  return c;
}

ConvenientMultiplexor absorb_boundary_cnot(const ConvenientMultiplexor& mux, int mu) {
  int jmu = -1;
  for (int j = 0; j < mux.nk(); ++j)
    if (mux.controls[j] == mu) jmu = j;
  if (jmu < 0) throw std::invalid_argument("absorb_boundary_cnot: mu is not a control");
  for (int f : mux.flags)
    if (f) throw std::invalid_argument("absorb_boundary_cnot: multiplexor already has flags");
  ConvenientMultiplexor out = mux;
  const int n = 1 << mux.nk();
  for (int b = 0; b < n; ++b) out.flags[b] = 1 - ((b >> jmu) & 1);
  out.subset.flags = out.flags;
  for (int b = 0; b < n; ++b) out.subset.members[b] = out.member(b);
  return out;
}

Circuit expand_convenient(const ConvenientMultiplexor& mux) {
  const int nk = mux.nk();
  Circuit c;
  c.nb = span_nb(mux.target, mux.controls);
  if (nk == 0) {
    c.gates.push_back(rotation_gate_from_su2(mux.member(0), mux.target));
    return c;
  }
  const int n = 1 << nk;

  // The construction needs the absorbed flag pattern f(b) = 1 - b_mu.
  int jmu = -1;
  for (int j = 0; j < nk && jmu < 0; ++j) {
    bool match = true;
    for (int b = 0; b < n && match; ++b)
      if (mux.flags[b] != 1 - ((b >> j) & 1)) match = false;
    if (match) jmu = j;
  }
  if (jmu < 0) {
    // No absorbed pattern: realize up to a diagonal and keep the gate body,
    // which preserves the exact CNOT and rotation counts.
    DemuxedMux dm = demux_multiplexor(mux.as_multiplexor(), c.nb);
    c.gates.push_back(Gate::phase(dm.phase));
    c.gates.insert(c.gates.end(), dm.gates.begin(), dm.gates.end());
    return c;
  }

  // Roles reorder the controls so the absorbed control takes the Gray cycle's
  // closing slot; bit r of a role pattern rho is bit role_to_slot[r] of the
  // control pattern c.
  std::vector<int> role_to_slot;
  for (int j = 0; j < nk; ++j)
    if (j != jmu) role_to_slot.push_back(j);
  role_to_slot.push_back(jmu);

  Eigen::VectorXd th1(n), th2(n);
  for (int rho = 0; rho < n; ++rho) {
    int cpat = 0;
    for (int r = 0; r < nk; ++r) cpat |= ((rho >> r) & 1) << role_to_slot[r];
    const double sgn = ((cpat >> jmu) & 1) ? -1.0 : 1.0;
    th1[rho] = sgn * mux.phi1[cpat];
    th2[rho] = sgn * mux.phi2[cpat];
  }
  const Eigen::VectorXd h1 = hadamard_transform_angles(th1);
  const Eigen::VectorXd h2 = hadamard_transform_angles(th2);

  const Eigen::Matrix2cd t =
      (mux.triad.w - Eigen::Vector3d::UnitX()).norm() < 1e-12
          ? Eigen::Matrix2cd::Identity()
          : rotation_taking(mux.triad.w, Eigen::Vector3d::UnitX());
  const Eigen::Matrix2cd tdag = t.adjoint();
  auto rt = [&](int slot) {
    const int g = gray_code(slot);
    Eigen::Vector3d v = h1[g] * mux.triad.s1 + h2[g] * mux.triad.s2;
    return Eigen::Matrix2cd(t * slot_rotation(v) * tdag);
  };

  c.gates.push_back(Gate::phase(-kPi / 4));
  c.gates.push_back(Gate::rotn(Eigen::Vector3d::UnitZ(), kPi / 4, mux.controls[jmu]));
  const Eigen::Matrix2cd isx = rotation_matrix(Eigen::Vector3d::UnitX(), kPi / 2);
  c.gates.push_back(rotation_gate_from_su2(Eigen::Matrix2cd(rt(0) * isx * t), mux.target));
  for (int i = 1; i < n; ++i) {
    c.gates.push_back(Gate::cnot(mux.controls[role_to_slot[ctz(i)]], mux.target));
    Eigen::Matrix2cd m = i + 1 < n ? rt(i) : Eigen::Matrix2cd(tdag * rt(i));
    c.gates.push_back(rotation_gate_from_su2(m, mux.target));
  }
  return c;
}

Multiplexor multiply_by_diagonal(const Multiplexor& mux, const DiagonalUnitary& delta,
                                 Side side) {
  if (delta.phases.size() != (Eigen::Index(1) << delta.nb))
    throw std::invalid_argument("multiply_by_diagonal: bad diagonal length");
  if (span_nb(mux.target, mux.controls) > delta.nb)
    throw std::invalid_argument("multiply_by_diagonal: dimension mismatch");
  Multiplexor out = mux;
  const int n = 1 << mux.nk();
  for (int b = 0; b < n; ++b) {
    Eigen::Index idx0 = 0;
    for (int j = 0; j < mux.nk(); ++j)
      idx0 |= Eigen::Index((b >> j) & 1) << mux.controls[j];
    const Eigen::Index idx1 = idx0 | (Eigen::Index(1) << mux.target);
    Eigen::Matrix2cd d = Eigen::Matrix2cd::Zero();
    d(0, 0) = std::exp(cd(0, delta.phases[idx0]));
    d(1, 1) = std::exp(cd(0, delta.phases[idx1]));
    out.subset.members[b] = side == Side::left ? Eigen::Matrix2cd(d * mux.subset.members[b])
                                               : Eigen::Matrix2cd(mux.subset.members[b] * d);
  }
  return out;
}

std::pair<DiagonalUnitary, ConvenientMultiplexor> split_convenient(
    const Multiplexor& mux, const Triad& triad, Side side,
    const std::vector<int>& flags, int nb) {
  const int nk = mux.nk();
  const int n = 1 << nk;
  if (static_cast<int>(flags.size()) != n)
    throw std::invalid_argument("split_convenient: flags length != 2^nk");
  if (span_nb(mux.target, mux.controls) > nb)
    throw std::invalid_argument("split_convenient: qubit index out of range");

  ConvenientMultiplexor conv;
  conv.target = mux.target;
  conv.controls = mux.controls;
  conv.triad = triad;
  conv.phi1.resize(n);
  conv.phi2.resize(n);
  conv.flags.resize(n);

  Eigen::VectorXd eta(n), gamma(n);
  for (int b = 0; b < n; ++b) {
    const SU2Split sp = project_su2(mux.subset.members[b]);
    SU2Params p = side == Side::left ? dol_oblique(sp.v, triad, flags[b])
                                     : dor_oblique(sp.v, triad, flags[b]);
    eta[b] = sp.eta + p.eta;
    gamma[b] = p.gamma;
    conv.flags[b] = p.f;
    if (side == Side::right && p.f) {
      // Canonical storage keeps the flip factor on the right of the rotation:
      // (i sigma_w) e^{iv.sigma} = e^{-iv.sigma} (i sigma_w) for v in the plane.
      conv.phi1[b] = -p.alpha;
      conv.phi2[b] = -p.beta;
    } else {
      conv.phi1[b] = p.alpha;
      conv.phi2[b] = p.beta;
    }
  }
  conv.subset.flags = conv.flags;
  conv.subset.members.resize(n);
  for (int b = 0; b < n; ++b) conv.subset.members[b] = conv.member(b);

  DiagonalUnitary delta = DiagonalUnitary::identity(nb);
  const Eigen::Index dim = Eigen::Index(1) << nb;
  for (Eigen::Index x = 0; x < dim; ++x) {
    int b = 0;
    for (int j = 0; j < nk; ++j) b |= int((x >> mux.controls[j]) & 1) << j;
    const int z = int(x >> mux.target) & 1;
    delta.phases[x] = eta[b] + (z == 0 ? gamma[b] : -gamma[b]);
  }
  return {delta, conv};
}

// ---------------------------------------------------------------------------
// Exact multiplexor realization up to a diagonal.

namespace {

const Eigen::Matrix2cd kD14 = [] {
  Eigen::Matrix2cd d = Eigen::Matrix2cd::Zero();
  d(0, 0) = std::exp(cd(0, kPi / 4));
  d(1, 1) = std::exp(cd(0, -kPi / 4));
  return d;
}();

struct PairDemux {
  Eigen::Vector2cd r;   // diagonal entries of the balancing phase
  Eigen::Matrix2cd u;   // axis rotation
  Eigen::Matrix2cd v;   // shared remainder
};

// Factor a member pair as u0 = r*.u.D14.v and u1 = r.u.D14*.v, with r a
// diagonal of unit phases: splits the pair into one CNOT level plus shared work.
PairDemux pair_demux(const Eigen::Matrix2cd& u0, const Eigen::Matrix2cd& u1) {
  const Eigen::Matrix2cd x = u0 * u1.adjoint();
  double a1, a2;
  if (std::abs(x(0, 0)) >= 1e-6) {
    a1 = (kPi / 2 - std::arg(x(0, 0))) / 2;
    a2 = (-kPi / 2 - std::arg(x(1, 1))) / 2;
  } else {
    a1 = 0.0;
    a2 = (kPi - std::arg(x(0, 1)) - std::arg(x(1, 0))) / 2;
  }
  Eigen::Matrix2cd r = Eigen::Matrix2cd::Zero();
  r(0, 0) = std::exp(cd(0, a1));
  r(1, 1) = std::exp(cd(0, a2));

  Eigen::Matrix2cd h = cd(0, -1) * (r * x * r);
  h = ((h + Eigen::Matrix2cd(h.adjoint())) / 2).eval();
  h -= (h.trace() / 2.0) * Eigen::Matrix2cd::Identity();
  Eigen::Vector3d axis(std::real(h(1, 0)), std::imag(h(1, 0)), std::real(h(0, 0)));
  if (axis.norm() < 1e-12)
    axis = Eigen::Vector3d::UnitZ();
  else
    axis.normalize();

  PairDemux out;
  out.r = Eigen::Vector2cd(r(0, 0), r(1, 1));
  out.u = rotation_taking(Eigen::Vector3d::UnitZ(), axis);
  out.v = kD14 * out.u.adjoint() * r.adjoint() * u1;
  return out;
}

struct DemuxRec {
  Eigen::MatrixXcd d;                   // 2^k x 2: per-pattern diagonal entries
  std::vector<Eigen::Matrix2cd> rots;   // 2^k target rotations, time order
  std::vector<int> bits;                // control slot between consecutive rotations
  double phase = 0.0;
};

DemuxRec demux_members(const std::vector<Eigen::Matrix2cd>& members) {
  const int n = static_cast<int>(members.size());
  if (n == 1) {
    const SU2Split sp = project_su2(members[0]);
    DemuxRec out;
    out.d.resize(1, 2);
    out.d(0, 0) = out.d(0, 1) = std::exp(cd(0, sp.eta));
    out.rots = {sp.v};
    out.phase = 0.0;
    return out;
  }
  const int h = n / 2;
  const int k = [&] {
    int kk = 0, m = n;
    while (m > 1) {
      m >>= 1;
      ++kk;
    }
    return kk;
  }();

  static const Eigen::Matrix2cd kGa =
      rotation_taking(Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitZ());
  static const Eigen::Matrix2cd kGb =
      std::exp(cd(0, -kPi / 4)) * Eigen::Matrix2cd(kGa.adjoint() * kD14);
  static const auto kGbSplit = project_su2(kGb);

  std::vector<PairDemux> pairs(h);
  std::vector<Eigen::Matrix2cd> vs(h);
  for (int c = 0; c < h; ++c) {
    pairs[c] = pair_demux(members[c], members[c + h]);
    vs[c] = pairs[c].v;
  }
  DemuxRec a = demux_members(vs);
  std::vector<Eigen::Matrix2cd> ups(h);
  for (int c = 0; c < h; ++c) {
    Eigen::Matrix2cd da = Eigen::Matrix2cd::Zero();
    da(0, 0) = a.d(c, 0);
    da(1, 1) = a.d(c, 1);
    ups[c] = pairs[c].u * da;
  }
  DemuxRec b = demux_members(ups);

  a.rots.back() = kGbSplit.v * a.rots.back();
  b.rots.front() = b.rots.front() * kGa;

  DemuxRec out;
  out.phase = a.phase + b.phase + kGbSplit.eta;
  out.d.resize(n, 2);
  const cd gk[2] = {std::exp(cd(0, kPi / 4)), std::exp(cd(0, -kPi / 4))};
  for (int c = 0; c < h; ++c)
    for (int z = 0; z < 2; ++z)
      for (int t = 0; t < 2; ++t)
        out.d(c + z * h, t) =
            b.d(c, t) * (z ? pairs[c].r(t) : std::conj(pairs[c].r(t))) * gk[z];
  out.rots = std::move(a.rots);
  out.rots.insert(out.rots.end(), b.rots.begin(), b.rots.end());
  out.bits = std::move(a.bits);
  out.bits.push_back(k - 1);
  out.bits.insert(out.bits.end(), b.bits.begin(), b.bits.end());
  return out;
}

}  // namespace

DemuxedMux demux_multiplexor(const Multiplexor& mux, int nb) {
  const int nk = mux.nk();
  if (static_cast<int>(mux.subset.members.size()) != (1 << nk))
    throw std::invalid_argument("demux_multiplexor: member count != 2^nk");
  if (span_nb(mux.target, mux.controls) > nb)
    throw std::invalid_argument("demux_multiplexor: qubit index out of range");
  DemuxRec rec = demux_members(mux.subset.members);

  DemuxedMux out;
  out.phase = rec.phase;
  for (size_t i = 0; i < rec.rots.size(); ++i) {
    out.gates.push_back(rotation_gate_from_su2(rec.rots[i], mux.target));
    if (i < rec.bits.size())
      out.gates.push_back(Gate::cnot(mux.controls[rec.bits[i]], mux.target));
  }
  const Eigen::Index dim = Eigen::Index(1) << nb;
  out.diag.resize(dim);
  for (Eigen::Index x = 0; x < dim; ++x) {
    int b = 0;
    for (int j = 0; j < nk; ++j) b |= int((x >> mux.controls[j]) & 1) << j;
    const int t = int(x >> mux.target) & 1;
    out.diag[x] = rec.d(b, t);
  }
  return out;
}

bool is_diagonal_mux(const Multiplexor& mux, double tol) {
  for (const auto& m : mux.subset.members)
    if (std::abs(m(0, 1)) > tol || std::abs(m(1, 0)) > tol) return false;
  return true;
}

}  // namespace qcsd
