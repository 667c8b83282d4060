#include "qcsd/circuit_io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qcsd/matcore.hpp"

namespace qcsd {

namespace {

[[noreturn]] void fail(int line, const std::string& what) {
  throw ParseError("line " + std::to_string(line) + ": " + what);
}

[[noreturn]] void fail_at(int line, int column, const std::string& what) {
  throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(column) +
                   ": " + what);
}

// Splits a line on whitespace.
std::vector<std::string> tokens_of(const std::string& line) {
  std::vector<std::string> toks;
  std::istringstream iss(line);
  std::string t;
  while (iss >> t) toks.push_back(t);
  return toks;
}

double parse_real(const std::string& tok, int line, int column, const char* what) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    fail_at(line, column, std::string("cannot parse ") + what + " from '" + tok + "'");
  }
  if (used != tok.size())
    fail_at(line, column, std::string("trailing junk in ") + what + " '" + tok + "'");
  if (!std::isfinite(v)) fail_at(line, column, std::string(what) + " is not finite");
  return v;
}

long parse_int(const std::string& tok, int line, int column, const char* what) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(tok, &used);
  } catch (const std::exception&) {
    fail_at(line, column, std::string("cannot parse ") + what + " from '" + tok + "'");
  }
  if (used != tok.size())
    fail_at(line, column, std::string("trailing junk in ") + what + " '" + tok + "'");
  return v;
}

std::complex<double> parse_entry(const std::string& tok, int line, int column) {
  const std::size_t comma = tok.find(',');
  if (comma == std::string::npos)
    fail_at(line, column, "expected 're,im' complex entry, got '" + tok + "'");
  const double re = parse_real(tok.substr(0, comma), line, column, "real part");
  const double im = parse_real(tok.substr(comma + 1), line, column, "imaginary part");
  return {re, im};
}

// Reads the next line that is not blank and not a '#' comment.
bool next_content_line(std::istream& in, std::string& line, int& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos) continue;
    if (line[pos] == '#') continue;
    return true;
  }
  return false;
}

}  // namespace

Eigen::MatrixXcd read_matrix(std::istream& in, const MatrixReadOptions& opts) {
  std::string line;
  int lineno = 0;
  if (!next_content_line(in, line, lineno)) fail(lineno, "missing header line");
  const auto head = tokens_of(line);
  if (head.size() != 1) fail(lineno, "header must be a single qubit count");
  const long nb = parse_int(head[0], lineno, 1, "qubit count");
  if (nb < 1 || nb > 16) fail(lineno, "qubit count out of range [1, 16]");
  const Eigen::Index dim = Eigen::Index(1) << nb;

  Eigen::MatrixXcd u(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    if (!next_content_line(in, line, lineno))
      fail(lineno, "matrix has " + std::to_string(r) + " rows, expected " + std::to_string(dim));
    const auto toks = tokens_of(line);
    if (Eigen::Index(toks.size()) != dim)
      fail(lineno, "row has " + std::to_string(toks.size()) + " entries, expected " +
                       std::to_string(dim));
    for (Eigen::Index col = 0; col < dim; ++col)
      u(r, col) = parse_entry(toks[col], lineno, int(col) + 1);
  }
  if (next_content_line(in, line, lineno))
    fail(lineno, "unexpected extra content after " + std::to_string(dim) + " rows");

  if (!is_unitary(u, opts.unitarity_tol)) {
    if (opts.require_unitary)
      throw ParseError("matrix is not unitary within " + std::to_string(opts.unitarity_tol));
    std::cerr << "warning: matrix is not unitary within " << opts.unitarity_tol << "\n";
  }
  return u;
}

Eigen::MatrixXcd read_matrix(const std::string& path, const MatrixReadOptions& opts) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "' for reading");
  return read_matrix(in, opts);
}

void write_matrix(std::ostream& out, const Eigen::MatrixXcd& u) {
  if (u.rows() != u.cols()) throw std::invalid_argument("write_matrix: matrix not square");
  int nb = 0;
  Eigen::Index d = u.rows();
  while (d > 1) {
    if (d & 1) throw std::invalid_argument("write_matrix: dimension is not a power of two");
    d >>= 1;
    ++nb;
  }
  if (nb < 1) throw std::invalid_argument("write_matrix: dimension must be at least 2");
  out << nb << "\n";
  out << std::setprecision(17);
  for (Eigen::Index r = 0; r < u.rows(); ++r) {
    for (Eigen::Index c = 0; c < u.cols(); ++c) {
      if (c) out << ' ';
      out << u(r, c).real() << ',' << u(r, c).imag();
    }
    out << "\n";
  }
}

void write_matrix(const std::string& path, const Eigen::MatrixXcd& u) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_matrix(out, u);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

Circuit read_circuit(std::istream& in) {
  std::string line;
  int lineno = 0;
  if (!next_content_line(in, line, lineno)) fail(lineno, "missing 'NB <n>' header");
  auto toks = tokens_of(line);
  if (toks.size() != 2 || toks[0] != "NB") fail(lineno, "expected 'NB <n>' header");
  const long nb = parse_int(toks[1], lineno, 2, "qubit count");
  if (nb < 1) fail(lineno, "qubit count must be at least 1");

  Circuit c;
  c.nb = int(nb);
  auto check_qubit = [&](long q, const char* what) {
    if (q < 0 || q >= nb)
      fail(lineno, std::string(what) + " " + std::to_string(q) + " out of range [0, " +
                       std::to_string(nb - 1) + "]");
  };
  while (next_content_line(in, line, lineno)) {
    toks = tokens_of(line);
    const std::string& op = toks[0];
    if (op == "PHASE") {
      if (toks.size() != 2) fail(lineno, "PHASE takes exactly one angle");
      c.gates.push_back(Gate::phase(parse_real(toks[1], lineno, 2, "angle")));
    } else if (op == "ROTN") {
      if (toks.size() != 6) fail(lineno, "ROTN takes nx ny nz angle target");
      Eigen::Vector3d axis(parse_real(toks[1], lineno, 2, "axis x"),
                           parse_real(toks[2], lineno, 3, "axis y"),
                           parse_real(toks[3], lineno, 4, "axis z"));
      const double angle = parse_real(toks[4], lineno, 5, "angle");
      const long target = parse_int(toks[5], lineno, 6, "target");
      check_qubit(target, "target");
      const double norm = axis.norm();
      if (std::abs(norm - 1.0) > 1e-6) fail(lineno, "rotation axis is not unit length");
      c.gates.push_back(Gate::rotn(axis / norm, angle, int(target)));
    } else if (op == "CNOT") {
      if (toks.size() != 3) fail(lineno, "CNOT takes control target");
      const long control = parse_int(toks[1], lineno, 2, "control");
      const long target = parse_int(toks[2], lineno, 3, "target");
      check_qubit(control, "control");
      check_qubit(target, "target");
      if (control == target) fail(lineno, "CNOT control equals target");
      c.gates.push_back(Gate::cnot(int(control), int(target)));
    } else {
      fail(lineno, "unknown opcode '" + op + "'");
    }
  }
  return c;
}

Circuit read_circuit(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "' for reading");
  return read_circuit(in);
}

void write_circuit(std::ostream& out, const Circuit& c) {
  out << "NB " << c.nb << "\n";
  out << std::setprecision(17);
  for (const Gate& g : c.gates) {
    switch (g.kind) {
      case Gate::Kind::Phase:
        out << "PHASE " << g.angle << "\n";
        break;
      case Gate::Kind::Rotn:
        out << "ROTN " << g.axis.x() << ' ' << g.axis.y() << ' ' << g.axis.z() << ' '
            << g.angle << ' ' << g.target << "\n";
        break;
      case Gate::Kind::Cnot:
        out << "CNOT " << g.control << ' ' << g.target << "\n";
        break;
    }
  }
}

void write_circuit(const std::string& path, const Circuit& c) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_circuit(out, c);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace qcsd
