#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "qcsd/axisopt.hpp"
#include "qcsd/circuit.hpp"
#include "qcsd/su2param.hpp"

namespace qcsd {

// One-target multiplexor: applies subset.members[b] to `target` when the
// control qubits spell b (bit j of b = value of qubit controls[j]).
struct Multiplexor {
  int target = 0;
  std::vector<int> controls;  // ascending qubit order
  U2Subset subset;

  int nk() const { return static_cast<int>(controls.size()); }
};

// Multiplexor whose members are e^{i(phi1[b] s1 + phi2[b] s2).sigma} (i sigma_w)^flags[b]
// for a shared triad. Stores both the parameters and the materialized members
// so reassembly can be checked.
struct ConvenientMultiplexor {
  int target = 0;
  std::vector<int> controls;
  Triad triad;
  Eigen::VectorXd phi1, phi2;  // length 2^nk
  std::vector<int> flags;      // f(b) in {0, 1}
  U2Subset subset;             // materialized members (flags duplicated here)

  int nk() const { return static_cast<int>(controls.size()); }
  // Member built from (triad, phi1, phi2, flags) alone.
  Eigen::Matrix2cd member(int b) const;
  Multiplexor as_multiplexor() const;
};

// diag(e^{i phases}) over the full 2^nb space.
struct DiagonalUnitary {
  int nb = 0;
  Eigen::VectorXd phases;

  static DiagonalUnitary identity(int nb);
  Eigen::VectorXcd diag() const;
};

struct GrayOrder {
  std::vector<int> order;           // 2^nk codes, starting at 0
  std::vector<int> flip_positions;  // bit flipped between order[i] and order[i+1 mod N]
};

int gray_code(int j);
GrayOrder gray_order(int nk);

// theta = (1/2^nk) * (plus/minus-1 Hadamard matrix) * phi.  Involution up to
// the 2^nk scaling: applying it twice and multiplying by 2^nk returns phi.
Eigen::VectorXd hadamard_transform_angles(const Eigen::VectorXd& phi);

// Brute-force dense operator of a multiplexor embedded in nb qubits.
Eigen::MatrixXcd mux_operator(const Multiplexor& mux, int nb);
Eigen::MatrixXcd mux_operator(const ConvenientMultiplexor& mux, int nb);

// Gray-ordered expansion of a flags-all-zero multiplexor into 2^nk CNOTs and
// 2^nk target rotations (plus one boundary rotation when the flip axis needs
// conjugation).  Exact when all members share one rotation axis; otherwise the
// circuit equals the Gray-ordered product of the transformed factors.
Circuit expand_d_multiplexor(const ConvenientMultiplexor& mux);

// Right-multiplies the multiplexor by the controlled flip (i sigma_w)^{n(mu)},
// turning flags into f(b) = 1 - b_mu.  The original operator is recovered by
// appending the inverse controlled flip.
ConvenientMultiplexor absorb_boundary_cnot(const ConvenientMultiplexor& mux, int mu);

// Expansion with exactly 2^nk - 1 CNOTs and 2^nk target rotations (plus a
// z-rotation and phase on the absorbed control).  Exact for single-axis
// members with the absorbed flag pattern f(b) = 1 - b_mu.
Circuit expand_convenient(const ConvenientMultiplexor& mux);

// Members become D_b * U_b (left) or U_b * D_b (right) where D_b is delta's
// 2x2 block at control pattern b.  Qubits outside target/controls are read at
// bit value 0; delta must be constant across them for the product to remain a
// multiplexor over the same controls.
Multiplexor multiply_by_diagonal(const Multiplexor& mux, const DiagonalUnitary& delta,
                                 Side side);

// Factor each member as [e^{i eta} e^{i gamma sigma_z}] * [convenient form]
// (side = left) or the mirror (side = right).  The diagonal lives on the full
// nb-qubit space; uninvolved qubits get identity blocks.
std::pair<DiagonalUnitary, ConvenientMultiplexor> split_convenient(
    const Multiplexor& mux, const Triad& triad, Side side,
    const std::vector<int>& flags, int nb);

// Exact gate realization of an arbitrary U(2)-multiplexor up to a diagonal:
//   mux operator = e^{i phase} * diag(e^{i arg(diag)}) * (gates product),
// with exactly 2^nk - 1 CNOTs and 2^nk target rotations.  `diag` is the
// full-space unit-modulus diagonal (length 2^nb).
struct DemuxedMux {
  std::vector<Gate> gates;
  Eigen::VectorXcd diag;
  double phase = 0.0;
};

DemuxedMux demux_multiplexor(const Multiplexor& mux, int nb);

// True when every member is diagonal within tol (off-diagonal magnitudes).
bool is_diagonal_mux(const Multiplexor& mux, double tol = 1e-14);

}  // namespace qcsd
