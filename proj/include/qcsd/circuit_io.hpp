#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "qcsd/circuit.hpp"

namespace qcsd {

// Malformed text input; carries a human-readable location diagnostic.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MatrixReadOptions {
  double unitarity_tol = 1e-8;
  bool require_unitary = false;  // true: violation throws instead of warning
};

// Matrix text format: line 1 holds nb, then 2^nb lines each carrying 2^nb
// whitespace-separated complex entries written "re,im" in decimal.
Eigen::MatrixXcd read_matrix(std::istream& in, const MatrixReadOptions& opts = {});
Eigen::MatrixXcd read_matrix(const std::string& path, const MatrixReadOptions& opts = {});
void write_matrix(std::ostream& out, const Eigen::MatrixXcd& u);
void write_matrix(const std::string& path, const Eigen::MatrixXcd& u);

// Circuit text format: header "NB <nb>", then one gate per line:
//   PHASE <angle>
//   ROTN <nx> <ny> <nz> <angle> <target>
//   CNOT <control> <target>
// Angles in radians; gates listed in application (time) order.
Circuit read_circuit(std::istream& in);
Circuit read_circuit(const std::string& path);
void write_circuit(std::ostream& out, const Circuit& c);
void write_circuit(const std::string& path, const Circuit& c);

}  // namespace qcsd
