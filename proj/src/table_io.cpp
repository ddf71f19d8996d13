#include "swachan/table_io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace swa {

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path, bool binary) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  return in;
}

void write_header(std::ofstream& out, const HeaderLines& header) {
  for (const std::string& line : header) out << "# " << line << '\n';
}

void check_write(const std::ofstream& out, const std::filesystem::path& path) {
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

// Reads "# ..." header lines, leaving the stream at the first data line.
HeaderLines read_header(std::istream& in) {
  HeaderLines header;
  while (in.peek() == '#') {
    std::string line;
    std::getline(in, line);
    header.push_back(line.size() > 2 ? line.substr(2) : "");
  }
  return header;
}

std::vector<double> parse_row(const std::string& line, const std::filesystem::path& path) {
  std::istringstream ss(line);
  std::vector<double> row;
  double v;
  while (ss >> v) row.push_back(v);
  if (!ss.eof()) throw std::runtime_error("bad numeric row in '" + path.string() + "'");
  return row;
}

std::filesystem::path meta_path(const std::filesystem::path& path) {
  return path.string() + ".meta.txt";
}

}  // namespace

void write_columns_text(const std::filesystem::path& path, const HeaderLines& header,
                        std::span<const std::string> column_names,
                        std::span<const std::span<const double>> columns) {
  if (column_names.size() != columns.size())
    throw std::invalid_argument("write_columns_text: name/column count mismatch");
  std::size_t n_rows = 0;
  for (const auto& col : columns) {
    if (n_rows == 0) n_rows = col.size();
    if (col.size() != n_rows)
      throw std::invalid_argument("write_columns_text: ragged columns");
  }

  auto out = open_out(path, false);
  write_header(out, header);
  out << "# columns:";
  for (const std::string& name : column_names) out << ' ' << name;
  out << '\n';
  for (std::size_t i = 0; i < n_rows; ++i) {
    for (std::size_t c = 0; c < columns.size(); ++c)
      out << (c == 0 ? "" : " ") << g17(columns[c][i]);
    out << '\n';
  }
  check_write(out, path);
}

namespace {

void check_matrix(const std::string& axis_name, std::span<const double> axis,
                  const std::vector<std::vector<double>>& rows) {
  if (axis_name.find(' ') != std::string::npos)
    throw std::invalid_argument("matrix axis name must not contain spaces");
  if (axis.size() != rows.size())
    throw std::invalid_argument("matrix axis length does not match row count");
  for (const auto& row : rows)
    if (row.size() != rows.front().size())
      throw std::invalid_argument("matrix rows must share one length");
}

}  // namespace

void write_matrix_text(const std::filesystem::path& path, const HeaderLines& header,
                       const std::string& axis_name, std::span<const double> axis,
                       const std::vector<std::vector<double>>& rows) {
  check_matrix(axis_name, axis, rows);
  auto out = open_out(path, false);
  write_header(out, header);
  out << "# matrix: rows = " << rows.size() << ", cols = "
      << (rows.empty() ? 0 : rows.front().size()) << ", first column = " << axis_name << '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << g17(axis[i]);
    for (double v : rows[i]) out << ' ' << g17(v);
    out << '\n';
  }
  check_write(out, path);
}

void write_matrix_binary(const std::filesystem::path& path, const HeaderLines& header,
                         const std::string& axis_name, std::span<const double> axis,
                         const std::vector<std::vector<double>>& rows) {
  check_matrix(axis_name, axis, rows);
  {
    auto meta = open_out(meta_path(path), false);
    write_header(meta, header);
    meta << "# matrix: rows = " << rows.size() << ", cols = "
         << (rows.empty() ? 0 : rows.front().size()) << ", first column = " << axis_name
         << ", payload = float64 little-endian row-major\n";
    for (double v : axis) meta << g17(v) << '\n';
    check_write(meta, meta_path(path));
  }
  auto out = open_out(path, true);
  for (const auto& row : rows)
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(double)));
  check_write(out, path);
}

MatrixFile read_matrix(const std::filesystem::path& path) {
  MatrixFile m;
  const auto meta = meta_path(path);
  if (std::filesystem::exists(meta)) {
    auto min = open_in(meta, false);
    m.header = read_header(min);
    std::string line;
    while (std::getline(min, line)) {
      if (line.empty()) continue;
      m.axis.push_back(std::stod(line));
    }
    auto in = open_in(path, true);
    const auto bytes = std::filesystem::file_size(path);
    if (m.axis.empty() || bytes % (m.axis.size() * sizeof(double)) != 0)
      throw std::runtime_error("binary matrix '" + path.string() +
                               "' does not divide into its axis rows");
    const std::size_t cols = bytes / sizeof(double) / m.axis.size();
    m.rows.assign(m.axis.size(), std::vector<double>(cols));
    for (auto& row : m.rows) {
      in.read(reinterpret_cast<char*>(row.data()),
              static_cast<std::streamsize>(cols * sizeof(double)));
      if (!in) throw std::runtime_error("short read of '" + path.string() + "'");
    }
    return m;
  }

  auto in = open_in(path, false);
  m.header = read_header(in);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    auto row = parse_row(line, path);
    if (row.empty()) continue;
    m.axis.push_back(row.front());
    m.rows.emplace_back(row.begin() + 1, row.end());
  }
  return m;
}

ColumnsFile read_columns(const std::filesystem::path& path) {
  auto in = open_in(path, false);
  ColumnsFile f;
  f.header = read_header(in);

  for (auto it = f.header.rbegin(); it != f.header.rend(); ++it) {
    if (it->starts_with("columns:")) {
      std::istringstream ss(it->substr(8));
      std::string name;
      while (ss >> name) f.column_names.push_back(name);
      break;
    }
  }

  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    auto row = parse_row(line, path);
    if (row.empty()) continue;
    if (f.columns.empty()) f.columns.resize(row.size());
    if (row.size() != f.columns.size())
      throw std::runtime_error("ragged row in '" + path.string() + "'");
    for (std::size_t c = 0; c < row.size(); ++c) f.columns[c].push_back(row[c]);
  }
  return f;
}

void write_waveform(const std::filesystem::path& path, const SignalBuffer& x,
                    const HeaderLines& extra_header, bool binary) {
  if (binary) {
    auto out = open_out(path, true);
    out.write(reinterpret_cast<const char*>(x.samples.data()),
              static_cast<std::streamsize>(x.samples.size() * sizeof(double)));
    check_write(out, path);
    return;
  }
  HeaderLines header = extra_header;
  header.push_back("fs_hz = " + g17(x.fs));
  header.push_back("start_sample = " + std::to_string(x.start));
  const std::span<const double> col(x.samples);
  const std::string name = "amplitude";
  write_columns_text(path, header, std::span<const std::string>(&name, 1),
                     std::span<const std::span<const double>>(&col, 1));
}

SignalBuffer read_waveform(const std::filesystem::path& path, double fs_if_binary) {
  SignalBuffer x;
  // A supplied rate selects the raw-float64 route; text files carry their
  // rate in the header and need none.
  if (fs_if_binary > 0.0) {
    auto in = open_in(path, true);
    x.fs = fs_if_binary;
    const auto bytes = std::filesystem::file_size(path);
    if (bytes % sizeof(double) != 0)
      throw std::runtime_error("binary waveform '" + path.string() +
                               "' is not whole float64 samples");
    x.samples.resize(bytes / sizeof(double));
    in.read(reinterpret_cast<char*>(x.samples.data()), static_cast<std::streamsize>(bytes));
    if (!in && bytes > 0) throw std::runtime_error("short read of '" + path.string() + "'");
    return x;
  }
  const ColumnsFile f = read_columns(path);
  const std::string fs_text = header_value(f.header, "fs_hz");
  if (fs_text.empty())
    throw std::runtime_error("waveform '" + path.string() + "' lacks an fs_hz header");
  x.fs = std::stod(fs_text);
  const std::string start_text = header_value(f.header, "start_sample");
  x.start = start_text.empty() ? 0 : std::stoll(start_text);
  if (f.columns.empty())
    throw std::runtime_error("waveform '" + path.string() + "' holds no samples");
  x.samples = f.columns.front();
  return x;
}

std::string header_value(const HeaderLines& header, const std::string& key) {
  const std::string prefix = key + " = ";
  for (const std::string& line : header)
    if (line.starts_with(prefix)) return line.substr(prefix.size());
  return {};
}

}  // namespace swa
