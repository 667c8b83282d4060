#include "qcsd/cli.hpp"

#include <CLI11.hpp>
#include <Eigen/Dense>
#include <cstdint>
#include <iostream>
#include <string>

#include "qcsd/circuit.hpp"
#include "qcsd/circuit_io.hpp"
#include "qcsd/matcore.hpp"
#include "qcsd/pipeline.hpp"

namespace qcsd {

namespace {

double verify_threshold(int nb) { return 1e-6 * double(Eigen::Index(1) << nb); }

void print_stats(const CompileStats& st, int sweeps_run, bool converged, int nb) {
  std::cout << "cnot_count = " << st.cnot_count << "\n"
            << "rotation_count = " << st.rotation_count << "\n"
            << "sweeps_run = " << sweeps_run << "\n"
            << "converged = " << (converged ? "true" : "false") << "\n"
            << "theoretical_nr_cnots = " << nr_cnot_formula(nb) << "\n"
            << "theoretical_r_cnots = " << r_cnot_formula(nb) << "\n";
}

}  // namespace

int cmd_compile(const CliConfig& cfg) {
  Eigen::MatrixXcd u;
  try {
    u = read_matrix(cfg.in);
  } catch (const ParseError& e) {
    std::cerr << "error: " << cfg.in << ": " << e.what() << "\n";
    return 2;
  }

  Circuit circuit;
  CompileStats stats;
  int sweeps_run = 0;
  bool converged = true;
  try {
    if (cfg.mode == "r") {
      RelaxedCompile rc = compile_r(u, cfg.tol, cfg.max_sweeps);
      circuit = std::move(rc.circuit);
      stats = rc.stats;
      sweeps_run = rc.report.sweeps_run;
      converged = rc.report.converged;
    } else {
      auto [c, st] = compile_nr(u);
      circuit = std::move(c);
      stats = st;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    write_circuit(cfg.out, circuit);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  if (cfg.stats) print_stats(stats, sweeps_run, converged, circuit.nb);
  if (cfg.verify) {
    const double thr = verify_threshold(circuit.nb);
    std::cout << "reconstruction_error = " << stats.reconstruction_error << "\n";
    if (!(stats.reconstruction_error <= thr)) {
      std::cerr << "error: reconstruction error " << stats.reconstruction_error
                << " exceeds " << thr << "\n";
      return 3;
    }
  }
  return 0;
}

int cmd_verify(const CliConfig& cfg) {
  Eigen::MatrixXcd u;
  Circuit circuit;
  try {
    u = read_matrix(cfg.in);
    circuit = read_circuit(cfg.out);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  if ((Eigen::Index(1) << circuit.nb) != u.rows()) {
    std::cerr << "error: circuit acts on " << circuit.nb
              << " qubits but the matrix has dimension " << u.rows() << "\n";
    return 2;
  }
  double err = 0.0;
  try {
    err = (simulate(circuit) - u).norm();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  const double thr = verify_threshold(circuit.nb);
  std::cout << "frobenius_error = " << err << "\n";
  if (err <= thr) {
    std::cout << "pass (threshold " << thr << ")\n";
    return 0;
  }
  std::cout << "fail (threshold " << thr << ")\n";
  return 3;
}

int cmd_rand(const CliConfig& cfg) {
  if (cfg.nb < 1 || cfg.nb > 10) {
    std::cerr << "error: --nb must be in [1, 10]\n";
    return 2;
  }
  const Eigen::MatrixXcd u = haar_random_unitary(cfg.nb, std::uint64_t(cfg.seed));
  try {
    write_matrix(cfg.out, u);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

int run_cli(int argc, const char* const* argv) {
  CliConfig cfg;
  CLI::App app{"Unitary-to-circuit compiler"};
  app.require_subcommand(1);

  CLI::App* compile = app.add_subcommand("compile", "Decompose a unitary into a circuit");
  compile->add_option("--in", cfg.in, "input matrix file")->required();
  compile->add_option("--out", cfg.out, "output circuit file")->required();
  compile->add_option("--mode", cfg.mode, "nr or r")
      ->check(CLI::IsMember({"nr", "r"}))
      ->capture_default_str();
  compile->add_option("--tol", cfg.tol, "relaxation tolerance")->capture_default_str();
  compile->add_option("--max-sweeps", cfg.max_sweeps, "relaxation sweep budget")
      ->capture_default_str();
  compile->add_flag("--verify", cfg.verify, "re-simulate and check the output");
  compile->add_flag("--stats", cfg.stats, "print gate statistics");

  CLI::App* verify = app.add_subcommand("verify", "Check a circuit against a matrix");
  verify->add_option("--in", cfg.in, "matrix file")->required();
  verify->add_option("--out", cfg.out, "circuit file")->required();

  CLI::App* rand = app.add_subcommand("rand", "Write a Haar-random unitary");
  rand->add_option("--out", cfg.out, "output matrix file")->required();
  rand->add_option("--nb", cfg.nb, "qubit count")->required();
  rand->add_option("--seed", cfg.seed, "random seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (compile->parsed()) return cmd_compile(cfg);
  if (verify->parsed()) return cmd_verify(cfg);
  if (rand->parsed()) return cmd_rand(cfg);
  std::cerr << "error: no command selected\n";
  return 2;
}

}  // namespace qcsd
