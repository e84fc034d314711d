#pragma once

#include "ringct/geometry.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace ringct::io {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

std::string to_string(SinogramKind kind);
SinogramKind sinogram_kind_from_string(const std::string& s);

/// CSV sinogram: header line "r,p,kind", then r lines of p values.
void write_sinogram_csv(const std::filesystem::path& path, const Sinogram& s);
Sinogram read_sinogram_csv(const std::filesystem::path& path);

/// Binary sinogram: 8 little-endian doubles (version 1, rows, cols, kind
/// code, 4 reserved) followed by the values in storage order.
void write_sinogram_bin(const std::filesystem::path& path, const Sinogram& s);
Sinogram read_sinogram_bin(const std::filesystem::path& path);

/// Image CSV: N lines of N values, first line is row 0 (lowest y).
void write_image_csv(const std::filesystem::path& path, const Image& img);
Image read_image_csv(const std::filesystem::path& path, double pixel_size);

/// 16-bit binary PGM, linear window [lo, hi] mapped to [0, 65535], rows
/// written top (largest y) first.
void write_image_pgm(const std::filesystem::path& path, const Image& img, double lo, double hi);

/// Header followed by one row per entry.
void write_table_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows);

/// Named columns of equal length.
void write_columns_csv(const std::filesystem::path& path, const std::vector<std::string>& names,
                       const std::vector<std::vector<double>>& columns);

std::vector<double> read_vector_csv(const std::filesystem::path& path, std::size_t column = 0);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_string(const std::string& data);

} // namespace ringct::io
