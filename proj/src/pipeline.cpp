#include "qcsd/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "qcsd/axisopt.hpp"
#include "qcsd/matcore.hpp"
#include "qcsd/su2param.hpp"

namespace qcsd {

namespace {

using cd = std::complex<double>;

int ctz(int x) {
  int n = 0;
  while (!(x & 1)) {
    x >>= 1;
    ++n;
  }
  return n;
}

int log2_dim(Eigen::Index dim) {
  int nb = 0;
  Eigen::Index d = dim;
  while (d > 1) {
    if (d & 1) throw std::invalid_argument("dimension is not a power of two");
    d >>= 1;
    ++nb;
  }
  if (nb < 1) throw std::invalid_argument("dimension must be at least 2");
  return nb;
}

// Member-level fold of a full-space unit diagonal into a multiplexor.
void fold_diag(Multiplexor& m, const Eigen::VectorXcd& dv, bool left) {
  const int nk = m.nk();
  const int n = 1 << nk;
  for (int b = 0; b < n; ++b) {
    Eigen::Index idx0 = 0;
    for (int j = 0; j < nk; ++j) idx0 |= Eigen::Index((b >> j) & 1) << m.controls[j];
    const Eigen::Index idx1 = idx0 | (Eigen::Index(1) << m.target);
    Eigen::Matrix2cd d = Eigen::Matrix2cd::Zero();
    d(0, 0) = dv[idx0];
    d(1, 1) = dv[idx1];
    m.subset.members[b] = left ? Eigen::Matrix2cd(d * m.subset.members[b])
                               : Eigen::Matrix2cd(m.subset.members[b] * d);
  }
}

// Full-space diagonal vector of a multiplexor whose members are all diagonal.
Eigen::VectorXcd mux_diag_to_carry(const Multiplexor& m, int nb) {
  const int nk = m.nk();
  const Eigen::Index dim = Eigen::Index(1) << nb;
  Eigen::VectorXcd dv(dim);
  for (Eigen::Index x = 0; x < dim; ++x) {
    int b = 0;
    for (int j = 0; j < nk; ++j) b |= int((x >> m.controls[j]) & 1) << j;
    const int t = int(x >> m.target) & 1;
    dv[x] = m.subset.members[b](t, t);
  }
  return dv;
}

// ---------------------------------------------------------------------------
// Recursive cosine-sine factorization.

void tree_rec(const std::vector<Eigen::MatrixXcd>& blocks, const std::vector<int>& qubits,
              int nb, std::vector<Multiplexor>& out) {
  const int nq = static_cast<int>(qubits.size());
  std::vector<int> fixed;
  for (int q = 0; q < nb; ++q)
    if (std::find(qubits.begin(), qubits.end(), q) == qubits.end()) fixed.push_back(q);

  if (nq == 1) {
    Multiplexor m;
    m.target = qubits[0];
    m.controls = fixed;
    const int n = static_cast<int>(blocks.size());
    m.subset.members.resize(n);
    for (int i = 0; i < n; ++i) m.subset.members[i] = blocks[i];
    m.subset.flags.assign(n, 0);
    out.push_back(std::move(m));
    return;
  }

  const int split = qubits.back();
  const std::vector<int> subq(qubits.begin(), qubits.end() - 1);
  const int nblocks = static_cast<int>(blocks.size());

  std::vector<int> fixed_pos(nb, -1), subq_pos(nb, -1);
  for (int j = 0; j < static_cast<int>(fixed.size()); ++j) fixed_pos[fixed[j]] = j;
  for (int j = 0; j < static_cast<int>(subq.size()); ++j) subq_pos[subq[j]] = j;

  std::vector<Eigen::MatrixXcd> l0(nblocks), l1(nblocks), r0(nblocks), r1(nblocks);
  std::vector<Eigen::VectorXd> thetas(nblocks);
  for (int hi = 0; hi < nblocks; ++hi) {
    CSDFactors f = csd(blocks[hi]);
    l0[hi] = std::move(f.l0);
    l1[hi] = std::move(f.l1);
    r0[hi] = std::move(f.r0);
    r1[hi] = std::move(f.r1);
    thetas[hi] = std::move(f.thetas);
  }

  // Central Ry-style multiplexor: target at the split qubit, every other
  // qubit a control.
  Multiplexor d;
  d.target = split;
  for (int q = 0; q < nb; ++q)
    if (q != split) d.controls.push_back(q);
  const int nd = 1 << d.nk();
  d.subset.members.resize(nd);
  d.subset.flags.assign(nd, 0);
  for (int cpat = 0; cpat < nd; ++cpat) {
    int hi = 0, low = 0;
    for (int j = 0; j < d.nk(); ++j) {
      const int bit = (cpat >> j) & 1;
      const int q = d.controls[j];
      if (fixed_pos[q] >= 0)
        hi |= bit << fixed_pos[q];
      else
        low |= bit << subq_pos[q];
    }
    d.subset.members[cpat] = rotation_matrix(Eigen::Vector3d::UnitY(), thetas[hi][low]);
  }

  // Re-index the L/R halves over fixed + split.
  std::vector<int> nfixed = fixed;
  nfixed.push_back(split);
  std::sort(nfixed.begin(), nfixed.end());
  std::vector<Eigen::MatrixXcd> lblocks(2 * nblocks), rblocks(2 * nblocks);
  for (int hi = 0; hi < nblocks; ++hi) {
    for (int z = 0; z < 2; ++z) {
      int nidx = 0;
      for (int p = 0; p < static_cast<int>(nfixed.size()); ++p) {
        const int q = nfixed[p];
        const int bit = q == split ? z : ((hi >> fixed_pos[q]) & 1);
        nidx |= bit << p;
      }
      lblocks[nidx] = z ? l1[hi] : l0[hi];
      rblocks[nidx] = z ? r1[hi] : r0[hi];
    }
  }

  tree_rec(rblocks, subq, nb, out);  // right factor is applied first
  out.push_back(std::move(d));
  tree_rec(lblocks, subq, nb, out);
}

// ---------------------------------------------------------------------------
// Diagonal emission.

void mux_rz_gray(Circuit& c, int target, const std::vector<int>& controls,
                 const Eigen::VectorXd& thetas) {
  const int k = static_cast<int>(controls.size());
  const int n = 1 << k;
  const Eigen::VectorXd phis = hadamard_transform_angles(thetas);
  for (int j = 0; j < n; ++j) {
    c.gates.push_back(Gate::rotn(Eigen::Vector3d::UnitZ(), phis[gray_code(j)], target));
    const int flip = j + 1 < n ? ctz(j + 1) : k - 1;
    c.gates.push_back(Gate::cnot(controls[flip], target));
  }
}

// padded: never skip zero-angle groups and widen the qubit-0 term to a
// one-control multiplexed rotation, so the CNOT count is 2^nb for every
// input (the count the compile formulas rely on). extra_phase joins the
// emitted global phase gate.
Circuit diagonal_to_seo_impl(const DiagonalUnitary& delta, bool padded, double extra_phase) {
  const int nb = delta.nb;
  if (delta.phases.size() != (Eigen::Index(1) << nb))
    throw std::invalid_argument("diagonal_to_seo: bad phase vector length");
  Eigen::VectorXd d = delta.phases;
  std::vector<Eigen::VectorXd> psis(nb);
  for (int k = nb - 1; k >= 0; --k) {
    const Eigen::Index h = Eigen::Index(1) << k;
    psis[k] = (d.head(h) - d.segment(h, h)) / 2;
    d = ((d.head(h) + d.segment(h, h)) / 2).eval();
  }
  const double gphase = d[0] + extra_phase;

  Circuit c;
  c.nb = nb;
  if (padded || gphase != 0.0) c.gates.push_back(Gate::phase(gphase));
  if (padded && nb >= 2) {
    Eigen::VectorXd two(2);
    two << psis[0][0], psis[0][0];
    mux_rz_gray(c, 0, {1}, two);
  } else if (padded || psis[0][0] != 0.0) {
    c.gates.push_back(Gate::rotn(Eigen::Vector3d::UnitZ(), psis[0][0], 0));
  }
  for (int k = 1; k < nb; ++k) {
    if (!padded && psis[k].isZero(0.0)) continue;
    std::vector<int> controls(k);
    for (int j = 0; j < k; ++j) controls[j] = j;
    mux_rz_gray(c, k, controls, psis[k]);
  }
  return c;
}

double circular_mean(const Eigen::VectorXcd& dv) {
  const cd s = dv.sum();
  return std::abs(s) < 1e-300 ? 0.0 : std::arg(s);
}

// Rebuild a multiplexor's members as the per-block product of a gate
// fragment (nullopt = the fragment was folded away entirely).
void rebuild_members(Multiplexor& m, const std::optional<std::vector<Gate>>& frag) {
  const int nk = m.nk();
  const int n = 1 << nk;
  for (int b = 0; b < n; ++b) m.subset.members[b] = Eigen::Matrix2cd::Identity();
  m.subset.flags.assign(n, 0);
  if (!frag) return;
  Eigen::Matrix2cd sx;
  sx << 0, 1, 1, 0;
  for (const Gate& g : *frag) {
    if (g.kind == Gate::Kind::Rotn) {
      const Eigen::Matrix2cd w = rotation_matrix(g.axis, g.angle);
      for (int b = 0; b < n; ++b) m.subset.members[b] = w * m.subset.members[b];
    } else if (g.kind == Gate::Kind::Cnot) {
      int slot = -1;
      for (int j = 0; j < nk; ++j)
        if (m.controls[j] == g.control) slot = j;
      if (slot < 0) throw std::logic_error("rebuild_members: control not in multiplexor");
      for (int b = 0; b < n; ++b)
        if ((b >> slot) & 1) m.subset.members[b] = sx * m.subset.members[b];
    } else {
      throw std::logic_error("rebuild_members: unexpected phase gate");
    }
  }
}

}  // namespace

MuxSequence csd_tree(const Eigen::MatrixXcd& u_in) {
  if (u_in.rows() != u_in.cols()) throw std::invalid_argument("csd_tree: matrix not square");
  const int nb = log2_dim(u_in.rows());
  if (!is_unitary(u_in, 1e-8)) throw std::invalid_argument("csd_tree: input is not unitary");
  MuxSequence seq;
  seq.nb = nb;
  std::vector<int> qubits(nb);
  for (int q = 0; q < nb; ++q) qubits[q] = q;
  tree_rec({u_in}, qubits, nb, seq.muxes);
  return seq;
}

Circuit diagonal_to_seo(const DiagonalUnitary& delta) {
  return diagonal_to_seo_impl(delta, false, 0.0);
}

double diagonal_deviation(const Eigen::VectorXcd& diag) {
  const double mean = circular_mean(diag);
  const cd em = std::exp(cd(0, -mean));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    const double mag = std::abs(diag[i]);
    if (mag < 1e-300) continue;
    acc += 2.0 * (1.0 - std::real(diag[i] * em) / mag);
  }
  return acc;
}

double residual_gamma_cost(const DiagonalUnitary& delta, int target) {
  const Eigen::Index bit = Eigen::Index(1) << target;
  double acc = 0.0;
  for (Eigen::Index x = 0; x < delta.phases.size(); ++x) {
    if (x & bit) continue;
    const double gamma = (delta.phases[x] - delta.phases[x | bit]) / 2;
    acc += 4.0 * (1.0 - std::cos(gamma));
  }
  return acc;
}

long nr_cnot_formula(int nb) {
  return ((1L << nb) - 1) * ((1L << (nb - 1)) - 1) + (1L << nb);
}

long r_cnot_formula(int nb) { return ((1L << nb) - 1) * ((1L << (nb - 1)) - 1); }

long cnot_lower_bound(int nb) { return ((1L << (2 * nb)) - 3L * nb - 1 + 3) / 4; }

SweepResult sweep(const MuxSequence& seq, SweepDirection direction, AxisMode axis_mode) {
  const int nb = seq.nb;
  const Eigen::Index dim = Eigen::Index(1) << nb;
  const int m_count = static_cast<int>(seq.muxes.size());
  const bool r2l = direction == SweepDirection::right_to_left;

  auto run_plan = [&](bool optimized) {
    SweepResult res;
    res.convs.resize(m_count);
    Eigen::VectorXcd dv = Eigen::VectorXcd::Ones(dim);
    double kx = 0.0, ky = 0.0;
    for (int step = 0; step < m_count; ++step) {
      const int i = r2l ? step : m_count - 1 - step;
      Multiplexor m = seq.muxes[i];
      fold_diag(m, dv, /*left=*/!r2l);
      const int nk = m.nk();
      const int n = 1 << nk;
      std::vector<int> flags(n, 0);
      if (nk >= 1)
        for (int b = 0; b < n; ++b) flags[b] = 1 - (b & 1);
      Triad triad = Triad::orthogonal();
      if (optimized) {
        try {
          U2Subset ss;
          ss.members = m.subset.members;
          ss.flags = flags;
          const AxisSolution sol = optimum_axis(ss, kx, ky);
          triad = sol.triad;
          kx = sol.kx;
          ky = sol.ky;
        } catch (const std::exception&) {
          triad = Triad::orthogonal();
          kx = ky = 0.0;
        }
      }
      try {
        auto [delta, conv] =
            split_convenient(m, triad, r2l ? Side::left : Side::right, flags, nb);
        res.convs[i] = std::move(conv);
        dv = delta.diag();
      } catch (const std::exception& e) {
        throw std::runtime_error("sweep: multiplexor " + std::to_string(i) + ": " + e.what());
      }
    }
    res.residual = DiagonalUnitary{nb, dv.array().arg()};
    return res;
  };

  if (axis_mode == AxisMode::fixed_z) return run_plan(false);
  // Keep whichever of the optimized and fixed-z plans leaves the smaller
  // residual, so the optimized mode can never do worse than the fixed frame.
  SweepResult opt = run_plan(true);
  SweepResult fixed = run_plan(false);
  const int cmp_target = r2l ? seq.muxes.back().target : seq.muxes.front().target;
  return residual_gamma_cost(opt.residual, cmp_target) <=
                 residual_gamma_cost(fixed.residual, cmp_target)
             ? opt
             : fixed;
}

std::pair<Circuit, CompileStats> compile_nr(const Eigen::MatrixXcd& u) {
  const int nb = log2_dim(u.rows());
  if (nb > 10) throw std::invalid_argument("compile_nr: nb > 10");
  if (!is_unitary(u, 1e-8)) throw std::invalid_argument("compile_nr: input is not unitary");
  const DetNormalized dn = normalize_det(u);
  const MuxSequence seq = csd_tree(dn.u_norm);
  const Eigen::Index dim = Eigen::Index(1) << nb;

  Eigen::VectorXcd dv = Eigen::VectorXcd::Ones(dim);
  double phase_acc = dn.phase;
  Circuit c;
  c.nb = nb;
  for (const Multiplexor& mux : seq.muxes) {
    Multiplexor m = mux;
    fold_diag(m, dv, /*left=*/false);
    DemuxedMux dm = demux_multiplexor(m, nb);
    c.gates.insert(c.gates.end(), dm.gates.begin(), dm.gates.end());
    dv = std::move(dm.diag);
    phase_acc += dm.phase;
  }
  const DiagonalUnitary delta{nb, dv.array().arg()};
  const Circuit tail = diagonal_to_seo_impl(delta, true, phase_acc);
  c.gates.insert(c.gates.end(), tail.gates.begin(), tail.gates.end());

  CompileStats stats;
  stats.cnot_count = cnot_count(c);
  stats.rotation_count = rotation_count(c);
  stats.mode = 'n';
  stats.reconstruction_error = (simulate(c) - u).norm();
  return {c, stats};
}

RelaxedCompile compile_r(const Eigen::MatrixXcd& u, double tol, int max_sweeps) {
  const int nb = log2_dim(u.rows());
  if (nb > 10) throw std::invalid_argument("compile_r: nb > 10");
  if (!(tol > 0.0)) throw std::invalid_argument("compile_r: tol must be positive");
  if (max_sweeps < 1) throw std::invalid_argument("compile_r: max_sweeps must be >= 1");
  if (!is_unitary(u, 1e-8)) throw std::invalid_argument("compile_r: input is not unitary");
  const DetNormalized dn = normalize_det(u);
  MuxSequence seq = csd_tree(dn.u_norm);
  const Eigen::Index dim = Eigen::Index(1) << nb;
  const int m_count = static_cast<int>(seq.muxes.size());

  std::vector<Multiplexor>& muxes = seq.muxes;
  std::vector<std::optional<std::vector<Gate>>> frags(m_count);
  Eigen::VectorXcd dv = Eigen::VectorXcd::Ones(dim);
  double phase_acc = dn.phase;

  RelaxedCompile out;
  out.circuit.nb = nb;
  bool last_r2l = true;

  for (int s = 0; s < max_sweeps; ++s) {
    const bool r2l = (s % 2 == 0);
    last_r2l = r2l;
    for (int step = 0; step < m_count; ++step) {
      const int i = r2l ? step : m_count - 1 - step;
      fold_diag(muxes[i], dv, /*left=*/!r2l);
      if (is_diagonal_mux(muxes[i])) {
        dv = mux_diag_to_carry(muxes[i], nb);
        frags[i].reset();
        continue;
      }
      if (r2l) {
        DemuxedMux dm = demux_multiplexor(muxes[i], nb);
        frags[i] = std::move(dm.gates);
        dv = std::move(dm.diag);
        phase_acc += dm.phase;
      } else {
        // Demux the adjoint so the residual diagonal comes out on the right
        // (first-applied) side, then invert the gate list back.
        Multiplexor md = muxes[i];
        for (auto& mm : md.subset.members) mm = mm.adjoint().eval();
        DemuxedMux dm = demux_multiplexor(md, nb);
        std::vector<Gate> g;
        g.reserve(dm.gates.size());
        for (auto it = dm.gates.rbegin(); it != dm.gates.rend(); ++it) {
          if (it->kind == Gate::Kind::Rotn)
            g.push_back(Gate::rotn(it->axis, -it->angle, it->target));
          else
            g.push_back(*it);
        }
        frags[i] = std::move(g);
        dv = dm.diag.conjugate();
        phase_acc -= dm.phase;
      }
    }

    const double dev = diagonal_deviation(dv);
    out.report.cost_history.push_back(dev);
    out.report.sweeps_run = s + 1;

    const double mean = circular_mean(dv);
    const cd em = std::exp(cd(0, mean));
    double sup = 0.0;
    for (Eigen::Index x = 0; x < dim; ++x) sup = std::max(sup, std::abs(dv[x] - em));

    // The residual may be dropped only when doing so is invisible at the
    // verification tolerance; otherwise it is folded back and re-split.
    if (dev <= tol && sup <= 0.5e-8 * double(dim)) {
      const double total_phase = phase_acc + mean;
      if (total_phase != 0.0) out.circuit.gates.push_back(Gate::phase(total_phase));
      for (int i = 0; i < m_count; ++i)
        if (frags[i])
          out.circuit.gates.insert(out.circuit.gates.end(), frags[i]->begin(),
                                   frags[i]->end());
      out.report.converged = true;
      out.report.final_residual = dev;
      break;
    }

    if (s + 1 < max_sweeps) {
      for (int i = 0; i < m_count; ++i) rebuild_members(muxes[i], frags[i]);
      const Eigen::VectorXcd res_diag = dv * std::exp(cd(0, phase_acc));
      if (r2l)
        fold_diag(muxes[m_count - 1], res_diag, /*left=*/true);
      else
        fold_diag(muxes[0], res_diag, /*left=*/false);
      dv = Eigen::VectorXcd::Ones(dim);
      phase_acc = 0.0;
    }
  }

  if (!out.report.converged) {
    out.report.final_residual = out.report.cost_history.back();
    const DiagonalUnitary delta{nb, dv.array().arg()};
    const Circuit tail = diagonal_to_seo_impl(delta, true, phase_acc);
    if (last_r2l) {
      for (int i = 0; i < m_count; ++i)
        if (frags[i])
          out.circuit.gates.insert(out.circuit.gates.end(), frags[i]->begin(),
                                   frags[i]->end());
      out.circuit.gates.insert(out.circuit.gates.end(), tail.gates.begin(),
                               tail.gates.end());
    } else {
      out.circuit.gates.insert(out.circuit.gates.end(), tail.gates.begin(),
                               tail.gates.end());
      for (int i = 0; i < m_count; ++i)
        if (frags[i])
          out.circuit.gates.insert(out.circuit.gates.end(), frags[i]->begin(),
                                   frags[i]->end());
    }
  }

  out.stats.cnot_count = cnot_count(out.circuit);
  out.stats.rotation_count = rotation_count(out.circuit);
  out.stats.mode = 'r';
  out.stats.reconstruction_error = (simulate(out.circuit) - u).norm();
  return out;
}

}  // namespace qcsd
