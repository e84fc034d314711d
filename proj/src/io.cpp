#include "ringct/io.hpp"

#include "ringct/errors.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

namespace ringct::io {

namespace {

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  return f;
}

std::ifstream open_in(const std::filesystem::path& path, bool binary = false) {
  std::ifstream f(path, binary ? std::ios::binary : std::ios::in);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  return f;
}

double parse_double(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  if (s == "nan" || s == "NaN") return std::nan("");
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw InvalidArgument("malformed number '" + std::string(s) + "'");
  return x;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(',', start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

void write_row(std::ostream& os, std::span<const double> row) {
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (j) os << ',';
    os << format_double(row[j]);
  }
  os << '\n';
}

void put_le(std::ostream& os, double x) {
  auto bits = std::bit_cast<std::uint64_t>(x);
  char buf[8];
  for (int b = 0; b < 8; ++b) buf[b] = static_cast<char>((bits >> (8 * b)) & 0xff);
  os.write(buf, 8);
}

double get_le(std::istream& is) {
  unsigned char buf[8];
  if (!is.read(reinterpret_cast<char*>(buf), 8)) throw InvalidArgument("truncated binary sinogram");
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(buf[b]) << (8 * b);
  return std::bit_cast<double>(bits);
}

} // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (x == 0.0) return "0";
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return {buf.data(), res.ptr};
}

std::string to_string(SinogramKind kind) {
  switch (kind) {
  case SinogramKind::counts: return "counts";
  case SinogramKind::line_integrals: return "line_integrals";
  case SinogramKind::log_ratio: return "log_ratio";
  }
  return "unknown";
}

SinogramKind sinogram_kind_from_string(const std::string& s) {
  for (SinogramKind k : {SinogramKind::counts, SinogramKind::line_integrals, SinogramKind::log_ratio})
    if (to_string(k) == s) return k;
  throw InvalidArgument("unknown sinogram kind '" + s + "'");
}

void write_sinogram_csv(const std::filesystem::path& path, const Sinogram& s) {
  auto f = open_out(path);
  f << s.detectors << ',' << s.projections << ',' << to_string(s.kind) << '\n';
  for (std::size_t i = 0; i < s.detectors; ++i) write_row(f, s.row(i));
}

Sinogram read_sinogram_csv(const std::filesystem::path& path) {
  auto f = open_in(path);
  std::string line;
  if (!std::getline(f, line)) throw InvalidArgument("empty sinogram file " + path.string());
  const auto head = split(line);
  if (head.size() != 3) throw InvalidArgument("sinogram header must be r,p,kind");
  const auto r = static_cast<std::size_t>(parse_double(head[0]));
  const auto p = static_cast<std::size_t>(parse_double(head[1]));
  Sinogram s = Sinogram::zeros(r, p, sinogram_kind_from_string(std::string(head[2])));
  for (std::size_t i = 0; i < r; ++i) {
    if (!std::getline(f, line)) throw InvalidArgument("sinogram file has too few rows");
    const auto cells = split(line);
    if (cells.size() != p) throw InvalidArgument("sinogram row has wrong length");
    for (std::size_t j = 0; j < p; ++j) s.at(i, j) = parse_double(cells[j]);
  }
  return s;
}

void write_sinogram_bin(const std::filesystem::path& path, const Sinogram& s) {
  auto f = open_out(path, true);
  put_le(f, 1.0);
  put_le(f, static_cast<double>(s.detectors));
  put_le(f, static_cast<double>(s.projections));
  put_le(f, static_cast<double>(static_cast<int>(s.kind)));
  for (int k = 0; k < 4; ++k) put_le(f, 0.0);
  for (double x : s.values) put_le(f, x);
}

Sinogram read_sinogram_bin(const std::filesystem::path& path) {
  auto f = open_in(path, true);
  if (get_le(f) != 1.0) throw InvalidArgument("unsupported binary sinogram version");
  const auto r = static_cast<std::size_t>(get_le(f));
  const auto p = static_cast<std::size_t>(get_le(f));
  const auto kind = static_cast<int>(get_le(f));
  if (kind < 0 || kind > 2) throw InvalidArgument("bad sinogram kind code");
  for (int k = 0; k < 4; ++k) get_le(f);
  Sinogram s = Sinogram::zeros(r, p, static_cast<SinogramKind>(kind));
  for (double& x : s.values) x = get_le(f);
  return s;
}

void write_image_csv(const std::filesystem::path& path, const Image& img) {
  auto f = open_out(path);
  for (std::size_t row = 0; row < img.n; ++row)
    write_row(f, std::span<const double>(img.values.data() + row * img.n, img.n));
}

Image read_image_csv(const std::filesystem::path& path, double pixel_size) {
  auto f = open_in(path);
  std::vector<double> values;
  std::string line;
  std::size_t rows = 0;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    for (auto c : split(line)) values.push_back(parse_double(c));
    ++rows;
  }
  if (rows * rows != values.size()) throw InvalidArgument("image CSV is not square");
  Image img = Image::zeros(rows, pixel_size);
  img.values = std::move(values);
  return img;
}

void write_image_pgm(const std::filesystem::path& path, const Image& img, double lo, double hi) {
  if (!(hi > lo)) throw InvalidArgument("PGM window must satisfy hi > lo");
  auto f = open_out(path, true);
  f << "P5\n" << img.n << ' ' << img.n << "\n65535\n";
  for (std::size_t k = 0; k < img.n; ++k) {
    const std::size_t row = img.n - 1 - k;
    for (std::size_t col = 0; col < img.n; ++col) {
      const double t = std::clamp((img.at(row, col) - lo) / (hi - lo), 0.0, 1.0);
      const auto v = static_cast<std::uint16_t>(std::lround(t * 65535.0));
      const char bytes[2] = {static_cast<char>(v >> 8), static_cast<char>(v & 0xff)};
      f.write(bytes, 2);
    }
  }
}

void write_table_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows) {
  auto f = open_out(path);
  auto emit = [&](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) f << ',';
      f << cells[k];
    }
    f << '\n';
  };
  emit(header);
  for (const auto& row : rows) emit(row);
}

void write_columns_csv(const std::filesystem::path& path, const std::vector<std::string>& names,
                       const std::vector<std::vector<double>>& columns) {
  if (names.size() != columns.size()) throw InvalidArgument("column names and data differ");
  const std::size_t n = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns)
    if (c.size() != n) throw InvalidArgument("columns differ in length");
  std::vector<std::vector<std::string>> rows(n);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& c : columns) rows[i].push_back(format_double(c[i]));
  write_table_csv(path, names, rows);
}

std::vector<double> read_vector_csv(const std::filesystem::path& path, std::size_t column) {
  auto f = open_in(path);
  std::string line;
  std::getline(f, line); // header
  std::vector<double> out;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (column >= cells.size()) throw InvalidArgument("CSV row has too few columns");
    out.push_back(parse_double(cells[column]));
  }
  return out;
}

namespace {

class Sha256 {
public:
  Sha256() : ctx_(EVP_MD_CTX_new(), EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1)
      throw std::runtime_error("SHA-256 unavailable");
  }
  void update(const char* data, std::size_t n) { EVP_DigestUpdate(ctx_.get(), data, n); }
  std::string hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_.get(), md, &len);
    static const char* digits = "0123456789abcdef";
    std::string out;
    for (unsigned int k = 0; k < len; ++k) {
      out += digits[md[k] >> 4];
      out += digits[md[k] & 0xf];
    }
    return out;
  }

private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

} // namespace

std::string sha256_file(const std::filesystem::path& path) {
  auto f = open_in(path, true);
  Sha256 h;
  std::array<char, 1 << 16> buf{};
  while (f) {
    f.read(buf.data(), buf.size());
    const std::streamsize got = f.gcount();
    if (got > 0) h.update(buf.data(), static_cast<std::size_t>(got));
  }
  return h.hex();
}

std::string sha256_string(const std::string& data) {
  Sha256 h;
  h.update(data.data(), data.size());
  return h.hex();
}

} // namespace ringct::io
