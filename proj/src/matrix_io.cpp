#include "wcs/matrix_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "wcs/error.hpp"

namespace wcs {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);  // drop the sign of -0
  return buf;
}

bool read_double(const char*& p, double& out) {
  char* end = nullptr;
  errno = 0;
  out = std::strtod(p, &end);
  if (end == p || errno == ERANGE || !std::isfinite(out)) return false;
  p = end;
  return true;
}

[[noreturn]] void parse_fail(const std::string& origin, std::size_t line, const std::string& what) {
  fail(ErrorCode::Parse, origin + ": line " + std::to_string(line) + ": " + what);
}

}  // namespace

std::string format_entry(std::complex<double> z, bool real) {
  if (real) return num(z.real());
  const double im = z.imag() == 0.0 ? 0.0 : z.imag();
  std::string s = num(z.real());
  s += std::signbit(im) ? "-" : "+";
  s += num(std::abs(im));
  s += 'j';
  return s;
}

bool parse_entry(const std::string& token, bool complex_allowed, std::complex<double>& out) {
  if (token.empty()) return false;
  const char* p = token.c_str();
  double re = 0.0;
  if (!read_double(p, re)) return false;
  if (*p == '\0') {
    out = {re, 0.0};
    return true;
  }
  if (!complex_allowed || (*p != '+' && *p != '-')) return false;
  double im = 0.0;
  if (!read_double(p, im)) return false;
  if (*p != 'j' || p[1] != '\0') return false;
  out = {re, im};
  return true;
}

void write_matrix(std::ostream& os, const SenseMatrix& a) {
  const bool real = is_real(a.values);
  os << "WCSMAT 1 " << (real ? "real" : "complex") << ' ' << a.rows() << ' ' << a.cols() << '\n';
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      if (j) os << ' ';
      os << format_entry(a.values(i, j), real);
    }
    os << '\n';
  }
  const Provenance& p = a.provenance;
  os << "# source " << to_string(p.source) << '\n';
  if (p.seed) os << "# seed " << *p.seed << '\n';
  if (!p.rows.empty()) {
    os << "# rows";
    for (Index r : p.rows) os << ' ' << r;
    os << '\n';
  }
  if (!p.note.empty()) {
    std::string note = p.note;
    for (char& c : note)
      if (c == '\n' || c == '\r') c = ' ';
    os << "# note " << note << '\n';
  }
}

std::string format_matrix(const SenseMatrix& a) {
  std::ostringstream os;
  write_matrix(os, a);
  return os.str();
}

void write_matrix(const std::filesystem::path& path, const SenseMatrix& a) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  write_matrix(os, a);
  os.flush();
  if (!os) fail(ErrorCode::Io, "write to '" + path.string() + "' failed");
}

SenseMatrix read_matrix(std::istream& is, const std::string& origin) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(is, line)) parse_fail(origin, 1, "missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::istringstream hs(line);
  std::string magic, kind, extra;
  int version = 0;
  long long m = -1, n = -1;
  if (!(hs >> magic >> version >> kind >> m >> n) || (hs >> extra) || magic != "WCSMAT")
    parse_fail(origin, lineno, "malformed header, expected 'WCSMAT 1 <real|complex> <m> <N>'");
  if (version != 1) parse_fail(origin, lineno, "unsupported format version " + std::to_string(version));
  if (kind != "real" && kind != "complex") parse_fail(origin, lineno, "unknown entry kind '" + kind + "'");
  if (m < 1 || n < 1) parse_fail(origin, lineno, "dimensions must be positive");
  const bool complex_allowed = kind == "complex";

  CMatrix a(m, n);
  for (long long i = 0; i < m; ++i) {
    ++lineno;
    if (!std::getline(is, line))
      parse_fail(origin, lineno, "expected " + std::to_string(m) + " rows, found " + std::to_string(i));
    std::istringstream rs(line);
    std::string tok;
    long long j = 0;
    while (rs >> tok) {
      if (j >= n) parse_fail(origin, lineno, "more than " + std::to_string(n) + " entries");
      std::complex<double> z;
      if (!parse_entry(tok, complex_allowed, z)) parse_fail(origin, lineno, "bad entry '" + tok + "'");
      a(i, j++) = z;
    }
    if (j != n)
      parse_fail(origin, lineno, "expected " + std::to_string(n) + " entries, found " + std::to_string(j));
  }

  Provenance p;
  p.source = MatrixSource::ExplicitFile;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line[0] != '#') parse_fail(origin, lineno, "unexpected content after the data rows");
    std::istringstream ts(line.substr(1));
    std::string key;
    ts >> key;
    if (key == "source") {
      std::string v;
      ts >> v;
      try {
        p.source = parse_source(v);
      } catch (const Error&) {
        parse_fail(origin, lineno, "unknown source '" + v + "'");
      }
    } else if (key == "seed") {
      std::uint64_t s = 0;
      if (!(ts >> s)) parse_fail(origin, lineno, "bad seed");
      p.seed = s;
    } else if (key == "rows") {
      long long r;
      while (ts >> r) p.rows.push_back(static_cast<Index>(r));
      if (!ts.eof()) parse_fail(origin, lineno, "bad row index");
      if (static_cast<long long>(p.rows.size()) != m)
        parse_fail(origin, lineno, "row list has " + std::to_string(p.rows.size()) + " entries for " +
                                       std::to_string(m) + " rows");
    } else if (key == "note") {
      std::getline(ts >> std::ws, p.note);
    }
  }
  try {
    return SenseMatrix(std::move(a), std::move(p));
  } catch (const Error& e) {
    parse_fail(origin, lineno, e.what());
  }
}

SenseMatrix read_matrix(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCode::Io, "cannot open '" + path.string() + "'");
  return read_matrix(is, path.string());
}

void write_vector(const std::filesystem::path& path, const CVector& v, const std::string& note) {
  Provenance p;
  p.note = note;
  write_matrix(path, SenseMatrix(CMatrix(v), p));
}

CVector read_vector(const std::filesystem::path& path) {
  const SenseMatrix a = read_matrix(path);
  if (a.cols() == 1) return a.values.col(0);
  if (a.rows() == 1) return a.values.row(0).transpose();
  fail(ErrorCode::DimensionMismatch, "'" + path.string() + "' holds a " + std::to_string(a.rows()) + " x " +
                                         std::to_string(a.cols()) + " matrix, expected a vector");
}

}  // namespace wcs
