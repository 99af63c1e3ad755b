#include "usm/cmx_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace usm {

namespace {

bool parse_token(const std::string& tok, Complex& out) {
  auto comma = tok.find(',');
  if (comma == std::string::npos) return false;
  const std::string re = tok.substr(0, comma);
  const std::string im = tok.substr(comma + 1);
  if (re.empty() || im.empty()) return false;
  char* end = nullptr;
  double re_v = std::strtod(re.c_str(), &end);
  if (end != re.c_str() + re.size()) return false;
  double im_v = std::strtod(im.c_str(), &end);
  if (end != im.c_str() + im.size()) return false;
  out = Complex(re_v, im_v);
  return true;
}

}  // namespace

CMatrix read_cmatrix(std::istream& in) {
  std::string line;
  int lineno = 0;
  // Comment lines are only allowed before the header.
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line[0] == '#') continue;
    break;
  }
  if (!in && line.empty()) throw FormatError("missing header", lineno);

  long rows = 0, cols = 0;
  {
    std::istringstream hs(line);
    std::string extra;
    if (!(hs >> rows >> cols) || (hs >> extra) || rows < 1 || cols < 1)
      throw FormatError("malformed header, expected '<rows> <cols>'", lineno);
  }

  CMatrix a(rows, cols);
  for (long i = 0; i < rows; ++i) {
    if (!std::getline(in, line))
      throw FormatError("unexpected end of file", lineno);
    ++lineno;
    std::istringstream rs(line);
    std::string tok;
    long j = 0;
    while (rs >> tok) {
      if (j >= cols) throw FormatError("too many tokens on row", lineno);
      Complex v;
      if (!parse_token(tok, v))
        throw FormatError("unparsable token '" + tok + "'", lineno);
      a(i, j++) = v;
    }
    if (j != cols) throw FormatError("too few tokens on row", lineno);
  }
  if (!is_finite(a)) throw FormatError("non-finite entry", lineno);
  return a;
}

CMatrix read_cmatrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  return read_cmatrix(in);
}

void write_cmatrix(std::ostream& out, const CMatrix& a) {
  if (!is_finite(a)) throw InvalidInput("write_cmatrix: non-finite entries");
  out << a.rows() << ' ' << a.cols() << '\n';
  char buf[64];
  for (long i = 0; i < a.rows(); ++i) {
    for (long j = 0; j < a.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g", a(i, j).real(),
                    a(i, j).imag());
      if (j) out << ' ';
      out << buf;
    }
    out << '\n';
  }
}

void write_cmatrix(const std::string& path, const CMatrix& a) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open " + path);
  write_cmatrix(out, a);
  if (!out) throw InvalidInput("write failed for " + path);
}

}  // namespace usm
