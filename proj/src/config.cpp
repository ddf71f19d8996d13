#include "swachan/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <variant>
#include <vector>

namespace swa {

namespace {

using Field = std::variant<double RunConfig::*, std::int64_t RunConfig::*,
                           std::string RunConfig::*>;

struct KeyEntry {
  const char* name;
  Field field;
};

const std::vector<KeyEntry>& key_table() {
  static const std::vector<KeyEntry> table = {
      {"arrival_threshold_db", &RunConfig::arrival_threshold_db},
      {"bottom_density_rho_b", &RunConfig::bottom_density_rho_b},
      {"bottom_speed_cb", &RunConfig::bottom_speed_cb},
      {"cache_quantum_m", &RunConfig::cache_quantum_m},
      {"case_kind", &RunConfig::case_kind},
      {"d0", &RunConfig::d0},
      {"depth_w", &RunConfig::depth_w},
      {"duration_samples", &RunConfig::duration_samples},
      {"f_max", &RunConfig::f_max},
      {"format", &RunConfig::format},
      {"fs", &RunConfig::fs},
      {"kernel_halfwidth", &RunConfig::kernel_halfwidth},
      {"lag_max_s", &RunConfig::lag_max_s},
      {"lag_min_s", &RunConfig::lag_min_s},
      {"max_reflections_pmax", &RunConfig::max_reflections_pmax},
      {"n_bins", &RunConfig::n_bins},
      {"n_stride", &RunConfig::n_stride},
      {"out_dir", &RunConfig::out_dir},
      {"ref_freq", &RunConfig::ref_freq},
      {"row_spacing_m", &RunConfig::row_spacing_m},
      {"sound_speed_c", &RunConfig::sound_speed_c},
      {"spreading_exponent_k", &RunConfig::spreading_exponent_k},
      {"sweep_distance_m", &RunConfig::sweep_distance_m},
      {"threads", &RunConfig::threads},
      {"transceiver_height", &RunConfig::transceiver_height},
      {"truncation_floor_db", &RunConfig::truncation_floor_db},
      {"v", &RunConfig::v},
      {"water_density_rho", &RunConfig::water_density_rho},
  };
  return table;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': cannot parse '" + value + "' as a number");
  }
  if (used != value.size())
    throw ConfigError("key '" + key + "': trailing text after number in '" + value + "'");
  return v;
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &used);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': cannot parse '" + value + "' as an integer");
  }
  if (used != value.size())
    throw ConfigError("key '" + key + "': trailing text after integer in '" + value + "'");
  return v;
}

std::string render(const RunConfig& cfg, const Field& field) {
  if (auto d = std::get_if<double RunConfig::*>(&field)) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", cfg.**d);
    return buf;
  }
  if (auto i = std::get_if<std::int64_t RunConfig::*>(&field))
    return std::to_string(cfg.**i);
  return cfg.*std::get<std::string RunConfig::*>(field);
}

}  // namespace

Waveguide RunConfig::waveguide() const {
  Waveguide wg;
  wg.depth_w = depth_w;
  wg.sound_speed_c = sound_speed_c;
  wg.bottom_speed_cb = bottom_speed_cb;
  wg.bottom_density_rho_b = bottom_density_rho_b;
  wg.water_density_rho = water_density_rho;
  wg.spreading_exponent_k = spreading_exponent_k;
  wg.max_reflections_pmax = static_cast<int>(max_reflections_pmax);
  return wg;
}

SynthParams RunConfig::synth_params() const {
  SynthParams p;
  p.kernel_halfwidth = static_cast<int>(kernel_halfwidth);
  p.ref_freq_hz = ref_freq;
  p.truncation_floor_db = truncation_floor_db;
  p.cache_quantum_m = cache_quantum_m;
  return p;
}

CaseSpec RunConfig::case_spec() const {
  CaseSpec spec;
  spec.kind = case_kind_from_string(case_kind);
  spec.d0 = d0;
  spec.v = v;
  spec.wg = waveguide();
  spec.transceiver_height = transceiver_height;
  spec.fs = fs;
  spec.duration_samples = duration_samples;
  spec.synth = synth_params();
  return spec;
}

OutputFormat RunConfig::output_format() const {
  if (format == "text") return OutputFormat::Text;
  if (format == "binary") return OutputFormat::Binary;
  throw ConfigError("format must be 'text' or 'binary', not '" + format + "'");
}

void RunConfig::validate() const {
  try {
    waveguide().validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  case_kind_from_string(case_kind);
  output_format();
  if (!(d0 > 0.0)) throw ConfigError("d0 must be > 0");
  if (v < 0.0) throw ConfigError("v must be >= 0");
  if (v >= sound_speed_c) throw ConfigError("v must stay below sound_speed_c");
  if (transceiver_height < 0.0 || transceiver_height > depth_w)
    throw ConfigError("transceiver_height must lie within [0, depth_w]");
  if (!(f_max > 0.0)) throw ConfigError("f_max must be > 0");
  if (n_bins < 2) throw ConfigError("n_bins must be >= 2");
  if (!(fs > 0.0)) throw ConfigError("fs must be > 0");
  if (!(cache_quantum_m > 0.0)) throw ConfigError("cache_quantum_m must be > 0");
  if (kernel_halfwidth < 1) throw ConfigError("kernel_halfwidth must be >= 1");
  if (ref_freq < 0.0) throw ConfigError("ref_freq must be >= 0");
  if (truncation_floor_db < 0.0) throw ConfigError("truncation_floor_db must be >= 0");
  if (n_stride < 0) throw ConfigError("n_stride must be >= 0");
  if (!(row_spacing_m > 0.0)) throw ConfigError("row_spacing_m must be > 0");
  if (!(sweep_distance_m > 0.0)) throw ConfigError("sweep_distance_m must be > 0");
  if (lag_min_s >= 0.0 && lag_max_s >= 0.0 && lag_min_s >= lag_max_s)
    throw ConfigError("lag_min_s must stay below lag_max_s");
  if (duration_samples < 0) throw ConfigError("duration_samples must be >= 0");
  if (!(arrival_threshold_db > 0.0)) throw ConfigError("arrival_threshold_db must be > 0");
  if (threads < 0) throw ConfigError("threads must be >= 0");
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");

  RunConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": expected 'key = value'");
    apply_override(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value) {
  for (const KeyEntry& entry : key_table()) {
    if (key != entry.name) continue;
    if (auto d = std::get_if<double RunConfig::*>(&entry.field))
      cfg.**d = parse_double(key, value);
    else if (auto i = std::get_if<std::int64_t RunConfig::*>(&entry.field))
      cfg.**i = parse_int(key, value);
    else
      cfg.*std::get<std::string RunConfig::*>(entry.field) = value;
    return;
  }
  throw ConfigError("unknown config key '" + key + "'");
}

std::string canonical_config(const RunConfig& cfg) {
  std::string out;
  for (const KeyEntry& entry : key_table()) {  // table is kept sorted by name
    out += entry.name;
    out += " = ";
    out += render(cfg, entry.field);
    out += '\n';
  }
  return out;
}

std::uint64_t config_hash(const RunConfig& cfg) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (const char ch : canonical_config(cfg)) {
    hash ^= static_cast<unsigned char>(ch);
    hash *= 1099511628211ULL;
  }
  return hash;
}

}  // namespace swa
