#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "swachan/ltv.hpp"

namespace swa {

/// Free-form header lines, emitted with a leading "# ".
using HeaderLines = std::vector<std::string>;

/// Delimited text, one row per line, columns space-separated.
void write_columns_text(const std::filesystem::path& path, const HeaderLines& header,
                        std::span<const std::string> column_names,
                        std::span<const std::span<const double>> columns);

/// Matrix with a leading axis column. Text: one row per line. Binary: values
/// as little-endian float64 row-major in <path>, header and axis column in
/// <path>.meta.txt.
void write_matrix_text(const std::filesystem::path& path, const HeaderLines& header,
                       const std::string& axis_name, std::span<const double> axis,
                       const std::vector<std::vector<double>>& rows);
void write_matrix_binary(const std::filesystem::path& path, const HeaderLines& header,
                         const std::string& axis_name, std::span<const double> axis,
                         const std::vector<std::vector<double>>& rows);

struct MatrixFile {
  HeaderLines header;
  std::vector<double> axis;
  std::vector<std::vector<double>> rows;
};

/// Reads either format back; binary is detected by the .meta.txt sidecar.
MatrixFile read_matrix(const std::filesystem::path& path);

struct ColumnsFile {
  HeaderLines header;
  std::vector<std::string> column_names;
  std::vector<std::vector<double>> columns;
};

ColumnsFile read_columns(const std::filesystem::path& path);

/// Single-column amplitude stream. Text carries "# fs_hz = ..."; binary is
/// raw float64 and needs the rate supplied by the caller.
void write_waveform(const std::filesystem::path& path, const SignalBuffer& x,
                    const HeaderLines& extra_header, bool binary);
SignalBuffer read_waveform(const std::filesystem::path& path, double fs_if_binary = 0.0);

/// Header value lookup: returns the text after "key = " in a header line,
/// empty when absent.
std::string header_value(const HeaderLines& header, const std::string& key);

}  // namespace swa
