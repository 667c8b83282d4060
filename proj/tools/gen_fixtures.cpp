// Generates the fixture corpus: Haar-random matrices, identity, peeled
// matrices on which the relaxation compiler converges, and deliberately
// malformed files for parser-diagnostic tests.
#include <Eigen/Dense>
#include <complex>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "qcsd/circuit_io.hpp"
#include "qcsd/matcore.hpp"
#include "qcsd/muxseo.hpp"
#include "qcsd/pipeline.hpp"

namespace {

using qcsd::DiagonalUnitary;
using cd = std::complex<double>;

// One demux pass over the factor chain; returns the residual diagonal and
// accumulated phase so the caller can strip them off the input.
void chain_residual(const Eigen::MatrixXcd& u, Eigen::VectorXcd& dv_out, double& phase_out) {
  const qcsd::DetNormalized dn = qcsd::normalize_det(u);
  const qcsd::MuxSequence seq = qcsd::csd_tree(dn.u_norm);
  const int nb = seq.nb;
  const Eigen::Index dim = Eigen::Index(1) << nb;
  Eigen::VectorXcd dv = Eigen::VectorXcd::Ones(dim);
  double phase = dn.phase;
  for (const qcsd::Multiplexor& mux : seq.muxes) {
    const qcsd::Multiplexor folded =
        qcsd::multiply_by_diagonal(mux, DiagonalUnitary{nb, dv.array().arg()}, qcsd::Side::right);
    qcsd::DemuxedMux dm = qcsd::demux_multiplexor(folded, nb);
    dv = std::move(dm.diag);
    phase += dm.phase;
  }
  dv_out = dv;
  phase_out = phase;
}

// Repeatedly strips the compilation residual until the compiler's first
// sweep lands on an (effectively) exact gate realization.
bool peel_to_converged(int nb, std::uint64_t seed, int max_iters, Eigen::MatrixXcd& out) {
  Eigen::MatrixXcd u = qcsd::haar_random_unitary(nb, seed);
  for (int it = 0; it < max_iters; ++it) {
    Eigen::VectorXcd dv;
    double phase = 0;
    chain_residual(u, dv, phase);
    u = (dv.conjugate().asDiagonal() * u * std::exp(cd(0, -phase))).eval();
    const qcsd::RelaxedCompile rc = qcsd::compile_r(u, 1e-8, 4);
    if (rc.report.converged && rc.report.sweeps_run == 1 &&
        rc.stats.cnot_count == qcsd::r_cnot_formula(nb) &&
        rc.stats.reconstruction_error <= 1e-8 * double(Eigen::Index(1) << nb)) {
      out = u;
      return true;
    }
  }
  return false;
}

void write_text(const std::filesystem::path& p, const std::string& body) {
  std::ofstream f(p);
  f << body;
  std::cout << "wrote " << p.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path dir = argc > 1 ? argv[1] : "fixtures";
  std::filesystem::create_directories(dir);

  const auto write_mat = [&](const std::string& name, const Eigen::MatrixXcd& u) {
    qcsd::write_matrix((dir / name).string(), u);
    std::cout << "wrote " << (dir / name).string() << "\n";
  };

  write_mat("identity_nb2.mat", Eigen::MatrixXcd::Identity(4, 4));
  for (const int nb : {1, 2, 3, 4})
    for (const std::uint64_t seed : {11u, 12u})
      write_mat("haar_nb" + std::to_string(nb) + "_seed" + std::to_string(seed) + ".mat",
                qcsd::haar_random_unitary(nb, seed));

  // Matrices on which compile_r converges on its first sweep.
  for (const int nb : {2, 3}) {
    bool done = false;
    for (std::uint64_t seed = 100; seed < 140 && !done; ++seed) {
      Eigen::MatrixXcd u;
      if (peel_to_converged(nb, seed, 6, u)) {
        write_mat("converged_nb" + std::to_string(nb) + ".mat", u);
        std::cout << "  (peeled from seed " << seed << ", " << qcsd::r_cnot_formula(nb)
                  << " CNOTs)\n";
        done = true;
      }
    }
    if (!done) {
      std::cerr << "failed to build a converged fixture at nb = " << nb << "\n";
      return 1;
    }
  }

  // Malformed inputs for diagnostic tests.
  write_text(dir / "malformed_rowcount.mat",
             "2\n1,0 0,0 0,0 0,0\n0,0 1,0 0,0 0,0\n0,0 0,0 1,0 0,0\n");
  write_text(dir / "malformed_entry.mat", "1\n1,0 0,0\n0,0 one,0\n");
  write_text(dir / "malformed_header.mat", "zebra\n");
  write_text(dir / "circuit_badop.qc", "NB 2\nFOO 0.5\n");
  write_text(dir / "circuit_badidx.qc", "NB 4\nCNOT 5 5\n");
  write_text(dir / "tiny_identity.mat", "1\n1,0 0,0\n0,0 1,0\n");
  return 0;
}
