#include "qcsd/axisopt.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "qcsd/matcore.hpp"

namespace qcsd {

namespace {

struct MemberParams {
  double gamma = 0.0, theta = 0.0, alpha = 0.0, beta = 0.0;
  int f = 0;
};

void check_subset(const U2Subset& subset) {
  if (subset.members.empty())
    throw std::invalid_argument("axis search: empty subset");
  if (subset.flags.size() != subset.members.size())
    throw std::invalid_argument("axis search: one flag per member required");
  for (const auto& m : subset.members)
    if (!is_unitary(m, 1e-10))
      throw std::invalid_argument("axis search: member not unitary");
}

std::vector<MemberParams> parameterize(const U2Subset& subset,
                                       const Triad& triad) {
  std::vector<MemberParams> out;
  out.reserve(subset.members.size());
  for (std::size_t b = 0; b < subset.members.size(); ++b) {
    const SU2Split split = project_su2(subset.members[b]);
    const SU2Params p = dol_oblique(split.v, triad, subset.flags[b]);
    MemberParams mp;
    mp.gamma = p.gamma;
    mp.alpha = p.alpha;
    mp.beta = p.beta;
    mp.theta = std::hypot(p.alpha, p.beta);  // s1 _|_ s2, so |theta| splits
    mp.f = p.f;
    out.push_back(mp);
  }
  return out;
}

}  // namespace

Triad triad_from_k(double kx, double ky) {
  const double kk = std::hypot(kx, ky);
  if (kk < 1e-15) return Triad::orthogonal();
  Triad t;
  const double wn = std::sqrt(1.0 + kx * kx + ky * ky);
  t.w = Eigen::Vector3d(kx, ky, 1.0) / wn;
  t.s1 = Eigen::Vector3d(ky, -kx, 0.0) / kk;
  t.s2 = t.w.cross(t.s1);
  return t;
}

double correction_cost(const U2Subset& subset, const Triad& triad) {
  check_subset(subset);
  double cost = 0.0;
  for (const MemberParams& mp : parameterize(subset, triad))
    cost += 4.0 * (1.0 - std::cos(mp.gamma));
  return cost;
}

Eigen::Vector2d residuals(double kx, double ky, const U2Subset& subset) {
  check_subset(subset);
  const Triad t = triad_from_k(kx, ky);
  const double wz = t.w.z();
  const double s1z = t.s1.z(), s2z = t.s2.z();
  Eigen::Vector2d f_out(0.0, 0.0);
  for (const MemberParams& mp : parameterize(subset, t)) {
    const double p = std::cos(mp.theta);
    const double q = std::sin(mp.theta);
    double x1 = 0.0, x2 = 0.0;
    Eigen::Vector3d r = Eigen::Vector3d::Zero();
    if (mp.theta >= 1e-12) {
      x1 = mp.alpha / mp.theta;
      x2 = mp.beta / mp.theta;
      r = (mp.alpha * t.s1 + mp.beta * t.s2) * (q / mp.theta);
    }
    const Eigen::Vector3d h(r.y(), -r.x(), p);
    const double denom = p - s1z * h.dot(t.s1) - s2z * h.dot(t.s2);
    if (std::abs(denom) < 1e-10)
      throw std::runtime_error("residuals: singular stationarity denominator");
    const double sg = std::sin(mp.gamma);
    const double fb = static_cast<double>(mp.f);
    f_out(0) += sg * (q * wz * x1 + fb * p * s1z) / denom;
    f_out(1) += sg * (q * wz * x2 + fb * p * s2z) / denom;
  }
  return f_out;
}

AxisSolution optimum_axis(const U2Subset& subset, double kx_init,
                          double ky_init) {
  check_subset(subset);

  int failures = 0, probes = 0;
  auto cost_at = [&](double kx, double ky) -> double {
    ++probes;
    try {
      return correction_cost(subset, triad_from_k(kx, ky));
    } catch (const std::exception&) {
      ++failures;
      return std::numeric_limits<double>::infinity();
    }
  };
  // Residuals with the perturb-on-singular fallback: nudge by 1e-6 in a
  // rotating direction until the denominators clear.
  auto res_at = [&](double kx, double ky) -> std::optional<Eigen::Vector2d> {
    for (int a = 0; a < 8; ++a) {
      const double ang = 0.37 + 0.25 * std::numbers::pi * a;
      const double px = (a == 0) ? 0.0 : 1e-6 * std::cos(ang);
      const double py = (a == 0) ? 0.0 : 1e-6 * std::sin(ang);
      try {
        return residuals(kx + px, ky + py, subset);
      } catch (const std::exception&) {
      }
    }
    return std::nullopt;
  };

  double best_kx = kx_init, best_ky = ky_init;
  double best_cost = cost_at(kx_init, ky_init);
  const double init_cost = best_cost;

  // Coarse scan seeds Newton; strict improvement only, so a zero-cost
  // initialization is returned untouched.
  for (int i = -4; i <= 4; ++i) {
    for (int j = -4; j <= 4; ++j) {
      const double c = cost_at(double(i), double(j));
      if (c < best_cost - 1e-15) {
        best_cost = c;
        best_kx = double(i);
        best_ky = double(j);
      }
    }
  }
  if (!std::isfinite(best_cost))
    throw std::runtime_error("optimum_axis: parameterization failed everywhere");

  double cx = best_kx, cy = best_ky, ccost = best_cost;
  bool converged = false;
  for (int it = 0; it < 100; ++it) {
    const auto f0 = res_at(cx, cy);
    if (!f0) break;
    if (f0->norm() <= 1e-6) {
      if (ccost <= init_cost + 1e-12) {
        best_kx = cx;
        best_ky = cy;
        best_cost = ccost;
        converged = true;
      }
      break;
    }
    const double h = 1e-6;
    const auto fx = res_at(cx + h, cy);
    const auto fy = res_at(cx, cy + h);
    if (!fx || !fy) break;
    Eigen::Matrix2d jac;
    jac.col(0) = (*fx - *f0) / h;
    jac.col(1) = (*fy - *f0) / h;
    if (std::abs(jac.determinant()) < 1e-14) break;
    const Eigen::Vector2d step = jac.partialPivLu().solve(-*f0);
    double s = 1.0;
    bool moved = false;
    for (int half = 0; half < 8; ++half, s *= 0.5) {
      const double nx = cx + s * step(0), ny = cy + s * step(1);
      const double nc = cost_at(nx, ny);
      if (nc <= ccost + 1e-12) {
        cx = nx;
        cy = ny;
        ccost = nc;
        moved = true;
        break;
      }
    }
    if (ccost < best_cost - 1e-15) {
      best_cost = ccost;
      best_kx = cx;
      best_ky = cy;
    }
    if (!moved) break;  // stalled: hand over to Nelder-Mead
  }

  // Nelder-Mead polish on the scalar cost from the best point so far;
  // skipped when Newton already met the residual target or nothing is left
  // to gain.
  if (!converged && best_cost > 1e-12) {
    struct Vtx {
      double x, y, c;
    };
    std::array<Vtx, 3> sx{{{best_kx, best_ky, best_cost},
                           {best_kx + 0.25, best_ky, 0.0},
                           {best_kx, best_ky + 0.25, 0.0}}};
    sx[1].c = cost_at(sx[1].x, sx[1].y);
    sx[2].c = cost_at(sx[2].x, sx[2].y);
    for (int it = 0; it < 120; ++it) {
      std::sort(sx.begin(), sx.end(),
                [](const Vtx& a, const Vtx& b) { return a.c < b.c; });
      if (std::abs(sx[2].c - sx[0].c) < 1e-14) break;
      const double mx = 0.5 * (sx[0].x + sx[1].x);
      const double my = 0.5 * (sx[0].y + sx[1].y);
      Vtx ref{mx + (mx - sx[2].x), my + (my - sx[2].y), 0.0};
      ref.c = cost_at(ref.x, ref.y);
      if (ref.c < sx[0].c) {
        Vtx ex{mx + 2.0 * (mx - sx[2].x), my + 2.0 * (my - sx[2].y), 0.0};
        ex.c = cost_at(ex.x, ex.y);
        sx[2] = (ex.c < ref.c) ? ex : ref;
      } else if (ref.c < sx[1].c) {
        sx[2] = ref;
      } else {
        Vtx con{mx + 0.5 * (sx[2].x - mx), my + 0.5 * (sx[2].y - my), 0.0};
        con.c = cost_at(con.x, con.y);
        if (con.c < sx[2].c) {
          sx[2] = con;
        } else {
          for (int k = 1; k < 3; ++k) {
            sx[k].x = 0.5 * (sx[k].x + sx[0].x);
            sx[k].y = 0.5 * (sx[k].y + sx[0].y);
            sx[k].c = cost_at(sx[k].x, sx[k].y);
          }
        }
      }
    }
    std::sort(sx.begin(), sx.end(),
              [](const Vtx& a, const Vtx& b) { return a.c < b.c; });
    if (sx[0].c < best_cost - 1e-15) {
      best_cost = sx[0].c;
      best_kx = sx[0].x;
      best_ky = sx[0].y;
    }
  }

  if (failures == probes)
    throw std::runtime_error("optimum_axis: parameterization failed everywhere");

  AxisSolution sol;
  sol.kx = best_kx;
  sol.ky = best_ky;
  sol.triad = triad_from_k(best_kx, best_ky);
  sol.cost = correction_cost(subset, sol.triad);
  const auto fr = res_at(best_kx, best_ky);
  sol.residuals = fr ? *fr : Eigen::Vector2d(0.0, 0.0);
  return sol;
}

}  // namespace qcsd
