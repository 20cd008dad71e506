#include "msd/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "msd/io_util.hpp"

namespace msd {

bool ImageGrid::all_finite() const {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

double ImageGrid::l2_norm() const {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s) * spacing;
}

double ImageGrid::l1_norm() const {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s * spacing * spacing;
}

double ImageGrid::l2_inner(const ImageGrid& o) const {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * o.v[i];
  return s * spacing * spacing;
}

ImageGrid operator+(const ImageGrid& a, const ImageGrid& b) {
  ImageGrid r = a;
  for (std::size_t i = 0; i < r.v.size(); ++i) r.v[i] += b.v[i];
  return r;
}

ImageGrid operator-(const ImageGrid& a, const ImageGrid& b) {
  ImageGrid r = a;
  for (std::size_t i = 0; i < r.v.size(); ++i) r.v[i] -= b.v[i];
  return r;
}

ImageGrid operator*(double s, const ImageGrid& a) {
  ImageGrid r = a;
  for (double& x : r.v) x *= s;
  return r;
}

namespace {

struct PgmParser {
  const std::string& data;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw std::runtime_error("pgm parse error at byte " + std::to_string(pos) + ": " + what);
  }

  void skip_ws_and_comments() {
    while (pos < data.size()) {
      char c = data[pos];
      if (c == '#') {
        while (pos < data.size() && data[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos;
      } else {
        break;
      }
    }
  }

  long next_int() {
    skip_ws_and_comments();
    if (pos >= data.size()) fail("unexpected end of file");
    if (!std::isdigit(static_cast<unsigned char>(data[pos]))) fail("expected integer");
    long value = 0;
    while (pos < data.size() && std::isdigit(static_cast<unsigned char>(data[pos]))) {
      value = value * 10 + (data[pos] - '0');
      if (value > 1000000000L) fail("integer out of range");
      ++pos;
    }
    return value;
  }
};

} // namespace

ImageGrid load_pgm(const std::string& path) {
  const std::string data = read_text_file(path);
  PgmParser p{data};
  if (data.size() < 2 || data[0] != 'P' || (data[1] != '2' && data[1] != '5')) p.fail("not a P2/P5 pgm");
  const bool binary = data[1] == '5';
  p.pos = 2;
  const long w = p.next_int();
  const long h = p.next_int();
  const long maxval = p.next_int();
  if (w <= 0 || h <= 0) p.fail("non-positive dimensions");
  if (maxval <= 0 || maxval > 65535) p.fail("maxval out of range (1..65535)");

  ImageGrid g(static_cast<int>(w), static_cast<int>(h));
  const std::size_t n = g.size();
  if (binary) {
    ++p.pos; // single whitespace after maxval
    const int bytes = maxval > 255 ? 2 : 1;
    if (data.size() - p.pos < n * bytes) p.fail("truncated raster");
    for (std::size_t i = 0; i < n; ++i) {
      long raw;
      if (bytes == 1) {
        raw = static_cast<unsigned char>(data[p.pos++]);
      } else {
        const long hi = static_cast<unsigned char>(data[p.pos++]);
        const long lo = static_cast<unsigned char>(data[p.pos++]);
        raw = (hi << 8) | lo;
      }
      if (raw > maxval) p.fail("sample exceeds maxval");
      g.v[i] = static_cast<double>(raw) / static_cast<double>(maxval);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const long raw = p.next_int();
      if (raw > maxval) p.fail("sample exceeds maxval");
      g.v[i] = static_cast<double>(raw) / static_cast<double>(maxval);
    }
  }
  return g;
}

void save_pgm(const ImageGrid& g, const std::string& path, int maxval, bool binary) {
  if (maxval <= 0 || maxval > 65535) throw std::invalid_argument("save_pgm: maxval out of range");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << (binary ? "P5" : "P2") << "\n" << g.width << " " << g.height << "\n" << maxval << "\n";
  const int bytes = maxval > 255 ? 2 : 1;
  int column = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double clamped = std::clamp(g.v[i], 0.0, 1.0);
    const long q = std::lround(clamped * maxval);
    if (binary) {
      if (bytes == 2) out.put(static_cast<char>((q >> 8) & 0xff));
      out.put(static_cast<char>(q & 0xff));
    } else {
      out << q;
      if (++column == 16) {
        out << "\n";
        column = 0;
      } else {
        out << " ";
      }
    }
  }
  if (!binary && column) out << "\n";
}

ImageGrid load_csv_image(const std::string& path, double spacing) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error("csv image: ragged rows in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("csv image: empty file " + path);
  ImageGrid g(static_cast<int>(rows.front().size()), static_cast<int>(rows.size()), 0.0, spacing);
  for (int y = 0; y < g.height; ++y)
    for (int x = 0; x < g.width; ++x) g.at(x, y) = rows[y][x];
  return g;
}

void save_csv_image(const ImageGrid& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x < g.width; ++x) {
      if (x) out << ',';
      out << fmt_double(g.at(x, y));
    }
    out << "\n";
  }
}

} // namespace msd
