#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "elliptope/sym_matrix.hpp"

namespace elliptope {

namespace {

std::string lower_copy(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

bool parse_int(const std::string& s, long long& out) {
  try {
    std::size_t pos = 0;
    out = std::stoll(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

bool parse_double(const std::string& s, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

SymMatrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");

  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) throw ParseError(path, 1, "empty file");
  ++lineno;
  auto header = split_ws(line);
  if (header.size() != 5 || lower_copy(header[0]) != "%%matrixmarket" ||
      lower_copy(header[1]) != "matrix") {
    throw ParseError(path, lineno, "malformed MatrixMarket header");
  }
  const std::string fmt = lower_copy(header[2]);
  if (fmt != "coordinate" && fmt != "array") {
    throw ParseError(path, lineno, "unsupported format '" + header[2] + "'");
  }
  if (lower_copy(header[3]) != "real" || lower_copy(header[4]) != "symmetric") {
    throw ParseError(path, lineno, "expected 'real symmetric' qualifiers");
  }

  // Skip comments and blank lines up to the size line.
  auto next_content_line = [&](std::string& out) -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || line[0] == '%') continue;
      if (split_ws(line).empty()) continue;
      out = line;
      return true;
    }
    return false;
  };

  std::string size_line;
  if (!next_content_line(size_line)) throw ParseError(path, lineno, "missing size line");
  auto size_tok = split_ws(size_line);

  if (fmt == "coordinate") {
    if (size_tok.size() != 3) throw ParseError(path, lineno, "coordinate size line needs 'rows cols nnz'");
    long long rows, cols, nnz;
    if (!parse_int(size_tok[0], rows) || !parse_int(size_tok[1], cols) ||
        !parse_int(size_tok[2], nnz) || rows < 1 || cols < 1 || nnz < 0) {
      throw ParseError(path, lineno, "bad size line");
    }
    if (rows != cols) throw ParseError(path, lineno, "symmetric matrix must be square");

    struct Entry {
      int r, c, line;
      double v;
    };
    std::vector<Entry> raw;
    raw.reserve(static_cast<std::size_t>(nnz));
    for (long long e = 0; e < nnz; ++e) {
      std::string entry_line;
      if (!next_content_line(entry_line)) {
        throw ParseError(path, lineno, "unexpected end of file: expected " +
                                           std::to_string(nnz) + " entries");
      }
      auto tok = split_ws(entry_line);
      long long i, j;
      double v;
      if (tok.size() != 3 || !parse_int(tok[0], i) || !parse_int(tok[1], j) ||
          !parse_double(tok[2], v)) {
        throw ParseError(path, lineno, "bad coordinate entry");
      }
      if (i < 1 || i > rows || j < 1 || j > cols) {
        throw ParseError(path, lineno, "index out of range");
      }
      int r = static_cast<int>(i - 1), c = static_cast<int>(j - 1);
      if (c > r) std::swap(r, c);  // normalize to lower triangle
      raw.push_back({r, c, lineno, v});
    }
    std::string extra;
    if (next_content_line(extra)) throw ParseError(path, lineno, "trailing data after entries");

    auto sorted = raw;
    std::sort(sorted.begin(), sorted.end(), [](const Entry& a, const Entry& b) {
      if (a.r != b.r) return a.r < b.r;
      if (a.c != b.c) return a.c < b.c;
      return a.line < b.line;
    });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
      if (sorted[i].r == sorted[i - 1].r && sorted[i].c == sorted[i - 1].c) {
        throw ParseError(path, sorted[i].line, "duplicate entry for (" +
                                                   std::to_string(sorted[i].r + 1) + "," +
                                                   std::to_string(sorted[i].c + 1) + ")");
      }
    }
    std::vector<Triplet> trip;
    trip.reserve(raw.size());
    for (const auto& e : raw) trip.push_back({e.r, e.c, e.v});
    return SymMatrix::from_triplets(static_cast<int>(rows), std::move(trip));
  }

  // array real symmetric: column-major lower triangle, n(n+1)/2 values
  if (size_tok.size() != 2) throw ParseError(path, lineno, "array size line needs 'rows cols'");
  long long rows, cols;
  if (!parse_int(size_tok[0], rows) || !parse_int(size_tok[1], cols) || rows < 1 || cols < 1) {
    throw ParseError(path, lineno, "bad size line");
  }
  if (rows != cols) throw ParseError(path, lineno, "symmetric matrix must be square");
  const int n = static_cast<int>(rows);
  const std::size_t need = static_cast<std::size_t>(n) * (n + 1) / 2;
  std::vector<double> vals;
  vals.reserve(need);
  std::string content;
  while (vals.size() < need) {
    if (!next_content_line(content)) {
      throw ParseError(path, lineno, "unexpected end of file: expected " +
                                         std::to_string(need) + " values");
    }
    for (const auto& tok : split_ws(content)) {
      double v;
      if (!parse_double(tok, v)) throw ParseError(path, lineno, "bad numeric value '" + tok + "'");
      if (vals.size() >= need) throw ParseError(path, lineno, "trailing data after values");
      vals.push_back(v);
    }
  }
  std::string extra;
  if (next_content_line(extra)) throw ParseError(path, lineno, "trailing data after values");

  // File order is for j: for i >= j; repack row-major.
  std::vector<double> low(need, 0.0);
  std::size_t pos = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = j; i < n; ++i) {
      low[static_cast<std::size_t>(i) * (i + 1) / 2 + j] = vals[pos++];
    }
  }
  return SymMatrix::from_lower(n, std::move(low));
}

void write_matrix_market(const SymMatrix& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  const int n = a.n();
  if (a.is_sparse()) {
    out << "%%MatrixMarket matrix coordinate real symmetric\n";
    const auto& trip = a.triplets();
    out << n << " " << n << " " << trip.size() << "\n";
    for (const auto& t : trip) {
      out << (t.row + 1) << " " << (t.col + 1) << " " << fmt17(t.value) << "\n";
    }
  } else {
    out << "%%MatrixMarket matrix array real symmetric\n";
    out << n << " " << n << "\n";
    for (int j = 0; j < n; ++j) {
      for (int i = j; i < n; ++i) out << fmt17(a.coeff(i, j)) << "\n";
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace elliptope
