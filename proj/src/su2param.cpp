#include "qcsd/su2param.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qcsd/circuit.hpp"

namespace qcsd {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

Eigen::Matrix2cd pauli_dot(const Eigen::Vector3d& n) {
  Eigen::Matrix2cd m;
  m << cd(n.z(), 0.0), cd(n.x(), -n.y()), cd(n.x(), n.y()), cd(-n.z(), 0.0);
  return m;
}

double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a <= 0.0) a += 2.0 * kPi;
  return a - kPi;  // in (-pi, pi]
}

cd det2(const Eigen::Matrix2cd& m) {
  return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
}

// Given gamma, recover the strong-plane rotation vector and measure how well
// it reproduces (x, y).  tz is forced onto the strong plane via the slopes,
// so err stays large for inadmissible gamma even when the scalar residual
// vanishes.
struct BackSub {
  double tx = 0.0, ty = 0.0, tz = 0.0;
  double err = 0.0;
  bool branch_ok = false;
};

BackSub back_substitute(cd x, cd y, double kx, double ky, double g) {
  const cd ph = std::polar(1.0, -g);
  const cd xr = x * ph;
  const cd yr = y * ph;
  const double c = std::clamp(xr.real(), -1.0, 1.0);
  const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
  const double theta = std::atan2(s, c);
  const double scale = (s > 1e-12) ? theta / s : 1.0;

  BackSub b;
  b.tx = yr.imag() * scale;
  b.ty = yr.real() * scale;
  b.tz = -kx * b.tx - ky * b.ty;
  b.branch_ok = (c >= -1e-12);

  const double th = std::sqrt(b.tx * b.tx + b.ty * b.ty + b.tz * b.tz);
  double nx = 0.0, ny = 0.0, nz = 0.0;
  if (th > 0.0) {
    nx = b.tx / th;
    ny = b.ty / th;
    nz = b.tz / th;
  }
  const double cc = std::cos(th), ss = std::sin(th);
  const cd phg = std::polar(1.0, g);
  const cd xrec = phg * cd(cc, nz * ss);
  const cd yrec = phg * (cd(ny, nx) * ss);
  b.err = std::abs(xrec - x) + std::abs(yrec - y);
  return b;
}

}  // namespace

Triad Triad::orthogonal() { return Triad{}; }

bool Triad::valid(double tol) const {
  return std::abs(s1.norm() - 1.0) <= tol && std::abs(s2.norm() - 1.0) <= tol &&
         std::abs(w.norm() - 1.0) <= tol && std::abs(s1.dot(s2)) <= tol &&
         (s1.cross(s2) - w).norm() <= 10.0 * tol;
}

SU2Split project_su2(const Eigen::Matrix2cd& u) {
  if ((u * u.adjoint() - Eigen::Matrix2cd::Identity()).norm() > 1e-8)
    throw std::invalid_argument("project_su2: input not unitary");
  SU2Split s;
  s.eta = 0.5 * std::arg(det2(u));
  s.v = std::polar(1.0, -s.eta) * u;
  return s;
}

SU2Params dol_orthogonal(const Eigen::Matrix2cd& v) {
  const cd x = v(0, 0);
  const cd y = v(0, 1);
  const double mx = std::abs(x), my = std::abs(y);
  SU2Params p;
  double theta;
  if (mx < 1e-14) {
    p.gamma = 0.0;
    theta = 0.5 * kPi;
  } else {
    p.gamma = std::arg(x);
    theta = std::acos(std::min(1.0, mx));
  }
  if (my >= 1e-14) {
    const cd u = (mx < 1e-14) ? y / my : y * std::conj(x) / (mx * my);
    p.beta = u.real() * theta;
    p.alpha = u.imag() * theta;
  }
  return p;
}

double solve_gamma(const XYPair& pair, double kx, double ky) {
  const cd x = pair.x, y = pair.y;
  const double mx2 = std::norm(x), my2 = std::norm(y);
  if (std::abs(mx2 + my2 - 1.0) > 1e-6)
    throw std::invalid_argument("solve_gamma: |x|^2 + |y|^2 must be 1");
  const double ax = std::arg(x), ay = std::arg(y);

  // Scalar residual in sin/cos form (no tangent poles): zero at every true
  // root, plus possibly at pole-cancellation points that back-substitution
  // rejects below.
  auto residual = [&](double g) {
    const double u = ky * std::cos(ay - g) + kx * std::sin(ay - g);
    const double v = std::sin(ax - g);
    return u * u * my2 - v * v * mx2;
  };

  std::vector<double> cands;
  const int n_brackets = 256;
  double pg = -kPi, pv = residual(pg);
  for (int i = 1; i <= n_brackets; ++i) {
    const double g = -kPi + 2.0 * kPi * i / n_brackets;
    const double v = residual(g);
    if (pv == 0.0) {
      cands.push_back(pg);
    } else if ((pv < 0.0) != (v < 0.0)) {
      double lo = pg, hi = g, flo = pv;
      while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        const double fm = residual(mid);
        if ((flo < 0.0) == (fm < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      cands.push_back(0.5 * (lo + hi));
    }
    pg = g;
    pv = v;
  }

  // Closed-form candidates cover the double roots the sign scan cannot see:
  // gamma aligning x (diagonal-ish V, or kx = ky = 0) and gamma placing a
  // theta = pi/2 rotation inside the strong plane (anti-diagonal-ish V).
  cands.push_back(wrap_angle(ax));
  cands.push_back(wrap_angle(ax + kPi));
  if (std::hypot(kx, ky) >= 1e-14) {
    const double g0 = ay - std::atan2(-ky, kx);
    cands.push_back(wrap_angle(g0));
    cands.push_back(wrap_angle(g0 + kPi));
  }
  cands.push_back(0.0);

  bool found = false;
  double best = 0.0;
  for (double g : cands) {
    g = wrap_angle(g);
    const BackSub b = back_substitute(x, y, kx, ky, g);
    if (!b.branch_ok || b.err > 1e-8) continue;
    if (!found || std::abs(g) < std::abs(best)) {
      best = g;
      found = true;
    }
  }
  if (!found) throw std::runtime_error("solve_gamma: no admissible root");
  return best;
}

SU2Params dol_oblique(const Eigen::Matrix2cd& v, const Triad& triad, int f) {
  if (!triad.valid())
    throw std::invalid_argument("dol_oblique: triad not orthonormal right-handed");
  if (std::abs(triad.w.z()) < 1e-8)
    throw std::invalid_argument(
        "dol_oblique: weak axis on the equator; rotate the frame first");
  if (std::abs(det2(v) - cd(1.0, 0.0)) > 1e-6)
    throw std::invalid_argument("dol_oblique: input must be special unitary");

  Eigen::Matrix2cd m = v;
  if (f) m = m * (cd(0.0, -1.0) * pauli_dot(triad.w));
  const cd x = m(0, 0), y = m(0, 1);
  const double kx = triad.w.x() / triad.w.z();
  const double ky = triad.w.y() / triad.w.z();
  const double mx = std::abs(x), my = std::abs(y);

  double gamma;
  if (my < 1e-10) {
    gamma = std::arg(x);
  } else if (mx < 1e-10) {
    if (std::hypot(kx, ky) < 1e-14) {
      gamma = 0.0;
    } else {
      const double g0 = wrap_angle(std::arg(y) - std::atan2(-ky, kx));
      const double g1 = wrap_angle(g0 + kPi);
      gamma = (std::abs(g1) < std::abs(g0)) ? g1 : g0;
    }
  } else {
    try {
      gamma = solve_gamma(XYPair{x, y}, kx, ky);
    } catch (const std::runtime_error&) {
      if (f == 0) return dol_oblique(v, triad, 1);
      throw;
    }
  }

  const BackSub b = back_substitute(x, y, kx, ky, gamma);
  const double wz = triad.w.z();
  SU2Params p;
  p.gamma = gamma;
  p.alpha = (triad.s2.y() * b.tx - triad.s2.x() * b.ty) / wz;
  p.beta = (triad.s1.x() * b.ty - triad.s1.y() * b.tx) / wz;
  p.f = f;
  p.side = Side::left;
  return p;
}

SU2Params dor_oblique(const Eigen::Matrix2cd& v, const Triad& triad, int f) {
  Eigen::Matrix2cd m = v;
  if (f) m = (cd(0.0, -1.0) * pauli_dot(triad.w)) * m;

  // Transposing maps the right factorization to a left one against the
  // y-mirrored frame, with identical (alpha, beta, gamma).
  Triad tm;
  tm.s1 = Eigen::Vector3d(triad.s1.x(), -triad.s1.y(), triad.s1.z());
  tm.s2 = Eigen::Vector3d(triad.s2.x(), -triad.s2.y(), triad.s2.z());
  tm.w = tm.s1.cross(tm.s2);

  SU2Params p = dol_oblique(m.transpose(), tm, 0);
  const int internal_flip = p.f;  // set only by the fallback retry
  p.side = Side::right;
  p.eta = 0.0;
  if (internal_flip == 0) {
    p.f = f;
  } else if (f == 0) {
    // m = -(i sigma_w) E Z, i.e. an f = 1 right factorization with eta = pi.
    p.f = 1;
    p.eta = kPi;
  } else {
    // The two flips cancel: (i sigma_w)^2 = -I absorbs the stray sign.
    p.f = 0;
  }
  return p;
}

Eigen::Matrix2cd su2_reconstruct(const SU2Params& params, const Triad& triad) {
  const Eigen::Vector3d tv = params.alpha * triad.s1 + params.beta * triad.s2;
  const double th = tv.norm();
  Eigen::Matrix2cd e = Eigen::Matrix2cd::Identity();
  if (th > 0.0) e = rotation_matrix(tv / th, th);
  const Eigen::Matrix2cd z =
      rotation_matrix(Eigen::Vector3d::UnitZ(), params.gamma);
  Eigen::Matrix2cd fm = Eigen::Matrix2cd::Identity();
  if (params.f) fm = cd(0.0, 1.0) * pauli_dot(triad.w);
  const cd ph = std::polar(1.0, params.eta);
  if (params.side == Side::left) return ph * (z * (e * fm));
  return (fm * (e * z)) * ph;
}

Eigen::Matrix2cd rotation_taking(const Eigen::Vector3d& from_dir,
                                 const Eigen::Vector3d& to_dir) {
  if (std::abs(from_dir.norm() - 1.0) > 1e-9 ||
      std::abs(to_dir.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("rotation_taking: directions must be unit");
  Eigen::Vector3d m = from_dir + to_dir;
  if (m.norm() < 1e-12) {
    m = from_dir.cross(Eigen::Vector3d::UnitX());
    if (m.norm() < 1e-6) m = from_dir.cross(Eigen::Vector3d::UnitY());
  }
  m.normalize();
  return rotation_matrix(m, 0.5 * kPi);  // = i sigma.m
}

}  // namespace qcsd
