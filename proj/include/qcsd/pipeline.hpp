#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "qcsd/circuit.hpp"
#include "qcsd/muxseo.hpp"

namespace qcsd {

// Ordered multiplexor factorization of a unitary: muxes[0] is applied first
// (rightmost factor of the assembled product).
struct MuxSequence {
  int nb = 0;
  std::vector<Multiplexor> muxes;
};

enum class SweepDirection { right_to_left, left_to_right };
enum class AxisMode { fixed_z, optimized };

struct SweepResult {
  std::vector<ConvenientMultiplexor> convs;  // in application order
  DiagonalUnitary residual;  // applied last (right_to_left) or first (left_to_right)
};

struct RelaxationReport {
  int sweeps_run = 0;
  std::vector<double> cost_history;  // residual deviation after each sweep
  bool converged = false;
  double final_residual = 0.0;
};

struct RelaxedCompile {
  Circuit circuit;
  RelaxationReport report;
  CompileStats stats;
};

// Recursive cosine-sine factorization into 2^nb - 1 single-target
// multiplexors, splitting on the most significant remaining qubit. Ry-style
// factors target the split qubit; leaf factors target qubit 0. Expects a
// det-1 input (run normalize_det first).
MuxSequence csd_tree(const Eigen::MatrixXcd& u_in);

// One relaxation pass: walk the sequence (right_to_left starts at muxes[0],
// uses diagonal-on-left splits; left_to_right mirrors with diagonal-on-right),
// folding each extracted diagonal into the next multiplexor. axis_mode
// optimized solves for a per-multiplexor axis, keeps the better of that plan
// and the fixed-z plan, and falls back to the fixed frame for any multiplexor
// whose axis solve fails.
SweepResult sweep(const MuxSequence& seq, SweepDirection direction, AxisMode axis_mode);

// Single-pass compilation: exactly (2^nb - 1)(2^{nb-1} - 1) + 2^nb CNOTs for
// nb >= 2 (a single qubit needs none).
std::pair<Circuit, CompileStats> compile_nr(const Eigen::MatrixXcd& u);

// Alternating-sweep compilation: on convergence the residual diagonal is
// dropped (only when that is exact within the verification budget) and the
// circuit has exactly (2^nb - 1)(2^{nb-1} - 1) CNOTs; otherwise the final
// residual is emitted explicitly and converged = false is reported.
RelaxedCompile compile_r(const Eigen::MatrixXcd& u, double tol = 1e-8,
                         int max_sweeps = 20);

// Cascade of multiplexed z-rotations, at most 2^nb - 2 CNOTs (none at nb = 1);
// all-zero angle groups are skipped, so the identity gives an empty circuit.
Circuit diagonal_to_seo(const DiagonalUnitary& delta);

// Residual-closeness monitor: sum over entries of 2(1 - cos(angle - mean)),
// where mean is the circular mean phase of the diagonal.
double diagonal_deviation(const Eigen::VectorXcd& diag);

// Correction-cost of a diagonal's 2x2 blocks paired across `target`:
// sum of 4(1 - cos gamma_block) with gamma = half the in-pair phase difference.
double residual_gamma_cost(const DiagonalUnitary& delta, int target);

// Theoretical CNOT counts.
long nr_cnot_formula(int nb);    // (2^nb - 1)(2^{nb-1} - 1) + 2^nb
long r_cnot_formula(int nb);     // (2^nb - 1)(2^{nb-1} - 1)
long cnot_lower_bound(int nb);   // ceil((4^nb - 3 nb - 1) / 4)

}  // namespace qcsd
