#pragma once

// Dense matrices over exact rationals (and doubles for the numeric kernels),
// with named row-block annotations and a line-oriented text format:
//
//   rip-matrix v1 <rows> <cols> <rational|float>
//   <entry> <entry> ...          one line per row
//   c block <name> <row_begin> <row_end>   trailing annotations, 0-based half-open
//
// Rational entries are "p/q" with "/q" omitted when q == 1; float entries are
// shortest round-trip decimals.

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "ripcert/errors.hpp"
#include "ripcert/rational.hpp"

namespace ripcert {

struct BlockSpan {
  std::string name;
  int row_begin = 0;
  int row_end = 0;  // exclusive
  friend bool operator==(const BlockSpan&, const BlockSpan&) = default;
};

enum class MatrixMode { rational, floating };

template <class T>
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<T> data;
  std::vector<BlockSpan> blocks;
  MatrixMode mode = MatrixMode::rational;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c) {
    if (r < 0 || c < 0) throw input_error("negative matrix dimension");
  }

  T& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  const T& at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows == b.rows && a.cols == b.cols && a.data == b.data;
  }
};

using RatMatrix = Matrix<Rat>;
using DMatrix = Matrix<double>;

inline RatMatrix rat_identity(int n) {
  RatMatrix m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

template <class T>
Matrix<T> transpose(const Matrix<T>& a) {
  Matrix<T> t(a.cols, a.rows);
  t.mode = a.mode;
  for (int r = 0; r < a.rows; ++r)
    for (int c = 0; c < a.cols; ++c) t.at(c, r) = a.at(r, c);
  return t;
}

template <class T>
Matrix<T> matmul(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.cols != b.rows) throw input_error("matmul dimension mismatch");
  Matrix<T> p(a.rows, b.cols);
  p.mode = a.mode;
  for (int r = 0; r < a.rows; ++r)
    for (int k = 0; k < a.cols; ++k) {
      const T& ark = a.at(r, k);
      if (ark == T()) continue;
      for (int c = 0; c < b.cols; ++c) p.at(r, c) += ark * b.at(k, c);
    }
  return p;
}

// Exact Gram matrix Xᵀ·X.
inline RatMatrix gram(const RatMatrix& x) {
  RatMatrix g(x.cols, x.cols);
  for (int i = 0; i < x.cols; ++i)
    for (int j = i; j < x.cols; ++j) {
      Rat s = 0;
      for (int r = 0; r < x.rows; ++r) s += x.at(r, i) * x.at(r, j);
      g.at(i, j) = s;
      if (i != j) g.at(j, i) = s;
    }
  return g;
}

template <class T>
Matrix<T> scalar_mul(const std::type_identity_t<T>& s, const Matrix<T>& a) {
  Matrix<T> out = a;
  for (auto& v : out.data) v = s * v;
  return out;
}

// Stacks a on top of b, keeping a's annotations and shifting b's.
template <class T>
Matrix<T> vstack(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.cols != b.cols) throw input_error("vstack column mismatch");
  Matrix<T> out(a.rows + b.rows, a.cols);
  out.mode = (a.mode == MatrixMode::rational && b.mode == MatrixMode::rational)
                 ? MatrixMode::rational
                 : MatrixMode::floating;
  for (int r = 0; r < a.rows; ++r)
    for (int c = 0; c < a.cols; ++c) out.at(r, c) = a.at(r, c);
  for (int r = 0; r < b.rows; ++r)
    for (int c = 0; c < b.cols; ++c) out.at(a.rows + r, c) = b.at(r, c);
  out.blocks = a.blocks;
  for (BlockSpan s : b.blocks) {
    s.row_begin += a.rows;
    s.row_end += a.rows;
    out.blocks.push_back(std::move(s));
  }
  return out;
}

inline std::vector<Rat> matvec(const RatMatrix& a, const std::vector<Rat>& x) {
  if (static_cast<int>(x.size()) != a.cols) throw input_error("matvec dimension mismatch");
  std::vector<Rat> y(a.rows);
  for (int r = 0; r < a.rows; ++r) {
    Rat s = 0;
    for (int c = 0; c < a.cols; ++c) s += a.at(r, c) * x[c];
    y[r] = s;
  }
  return y;
}

inline Rat norm_sq(const std::vector<Rat>& x) {
  Rat s = 0;
  for (const Rat& v : x) s += v * v;
  return s;
}

inline DMatrix to_double_matrix(const RatMatrix& a) {
  DMatrix d(a.rows, a.cols);
  d.mode = MatrixMode::floating;
  d.blocks = a.blocks;
  for (std::size_t i = 0; i < a.data.size(); ++i) d.data[i] = rat_to_double(a.data[i]);
  return d;
}

inline RatMatrix to_rational_matrix(const DMatrix& a) {
  RatMatrix r(a.rows, a.cols);
  r.mode = MatrixMode::floating;
  r.blocks = a.blocks;
  for (std::size_t i = 0; i < a.data.size(); ++i) r.data[i] = rat_from_double(a.data[i]);
  return r;
}

inline std::string double_str_roundtrip(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw input_error("unprintable float entry");
  return std::string(buf, ptr);
}

inline void write_matrix(std::ostream& os, const RatMatrix& m) {
  os << "rip-matrix v1 " << m.rows << ' ' << m.cols << ' '
     << (m.mode == MatrixMode::rational ? "rational" : "float") << '\n';
  for (int r = 0; r < m.rows; ++r) {
    for (int c = 0; c < m.cols; ++c) {
      if (c) os << ' ';
      if (m.mode == MatrixMode::rational)
        os << rat_str(m.at(r, c));
      else
        os << double_str_roundtrip(rat_to_double(m.at(r, c)));
    }
    os << '\n';
  }
  for (const BlockSpan& b : m.blocks)
    os << "c block " << b.name << ' ' << b.row_begin << ' ' << b.row_end << '\n';
}

inline std::string matrix_str(const RatMatrix& m) {
  std::ostringstream os;
  write_matrix(os, m);
  return os.str();
}

inline RatMatrix read_matrix(std::istream& is) {
  std::string line;
  long lineno = 0;
  if (!std::getline(is, line)) throw parse_error("empty matrix file", 1);
  ++lineno;
  std::istringstream head(line);
  std::string magic, version, modeword;
  long rows = -1, cols = -1;
  if (!(head >> magic >> version >> rows >> cols >> modeword) || magic != "rip-matrix" ||
      version != "v1")
    throw parse_error("expected header 'rip-matrix v1 <rows> <cols> <rational|float>'", lineno);
  if (rows < 0 || cols < 0) throw parse_error("negative dimensions in header", lineno);
  std::string trailing;
  if (head >> trailing) throw parse_error("unexpected token after header: " + trailing, lineno);
  MatrixMode mode;
  if (modeword == "rational")
    mode = MatrixMode::rational;
  else if (modeword == "float")
    mode = MatrixMode::floating;
  else
    throw parse_error("unknown matrix mode: " + modeword, lineno);

  RatMatrix m(static_cast<int>(rows), static_cast<int>(cols));
  m.mode = mode;
  for (long r = 0; r < rows; ++r) {
    if (!std::getline(is, line)) throw parse_error("missing matrix row", lineno + 1);
    ++lineno;
    std::istringstream row(line);
    std::string tok;
    for (long c = 0; c < cols; ++c) {
      if (!(row >> tok)) throw parse_error("row has too few entries", lineno);
      try {
        if (mode == MatrixMode::rational) {
          m.at(static_cast<int>(r), static_cast<int>(c)) = parse_rat(tok);
        } else {
          double v = 0;
          auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
          if (ec != std::errc{} || p != tok.data() + tok.size())
            throw input_error("bad float entry: " + tok);
          m.at(static_cast<int>(r), static_cast<int>(c)) = rat_from_double(v);
        }
      } catch (const input_error& e) {
        throw parse_error(e.what(), lineno);
      }
    }
    if (row >> tok) throw parse_error("row has too many entries", lineno);
  }
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream cs(line);
    std::string cword;
    cs >> cword;
    if (cword != "c") throw parse_error("expected comment line after matrix rows", lineno);
    std::string kind;
    if (!(cs >> kind) || kind != "block") continue;  // plain comments are ignored
    BlockSpan b;
    if (!(cs >> b.name >> b.row_begin >> b.row_end))
      throw parse_error("malformed block annotation", lineno);
    if (b.row_begin < 0 || b.row_end > m.rows || b.row_begin > b.row_end)
      throw parse_error("block annotation out of range", lineno);
    m.blocks.push_back(std::move(b));
  }
  return m;
}

inline RatMatrix matrix_from_str(const std::string& text) {
  std::istringstream is(text);
  return read_matrix(is);
}

}  // namespace ripcert
