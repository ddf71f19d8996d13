#include "swachan/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "swachan/analysis.hpp"
#include "swachan/table_io.hpp"

namespace swa {

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

HeaderLines base_header(const RunConfig& cfg, const HeaderLines& extra) {
  HeaderLines h;
  h.push_back("generator = swachan");
  h.push_back("config_hash = " + hex64(config_hash(cfg)));
  h.push_back("units = SI (meters, seconds, hertz), amplitudes linear");
  h.push_back("sign_convention = positive v increases the Tx-Rx separation");
  h.insert(h.end(), extra.begin(), extra.end());
  std::string line;
  for (const char ch : canonical_config(cfg)) {
    if (ch == '\n') {
      h.push_back("config " + line);
      line.clear();
    } else {
      line += ch;
    }
  }
  return h;
}

std::filesystem::path out_path(const RunConfig& cfg, const std::string& name, bool binary) {
  std::filesystem::create_directories(cfg.out_dir);
  return std::filesystem::path(cfg.out_dir) / (name + (binary ? ".bin" : ".txt"));
}

/// Columns in the configured format; binary reuses the matrix layout with the
/// first column as the axis.
std::filesystem::path emit_columns(const RunConfig& cfg, const std::string& name,
                                   const HeaderLines& header,
                                   std::span<const std::string> names,
                                   std::span<const std::span<const double>> cols) {
  const bool binary = cfg.output_format() == OutputFormat::Binary;
  const auto path = out_path(cfg, name, binary);
  if (!binary) {
    write_columns_text(path, header, names, cols);
    return path;
  }
  std::vector<std::vector<double>> rows(cols.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].resize(cols.size() - 1);
    for (std::size_t c = 1; c < cols.size(); ++c) rows[i][c - 1] = cols[c][i];
  }
  write_matrix_binary(path, header, names.front(),
                      std::span<const double>(cols.front()), rows);
  return path;
}

std::filesystem::path emit_matrix(const RunConfig& cfg, const std::string& name,
                                  const HeaderLines& header, const std::string& axis_name,
                                  std::span<const double> axis,
                                  const std::vector<std::vector<double>>& rows) {
  const bool binary = cfg.output_format() == OutputFormat::Binary;
  const auto path = out_path(cfg, name, binary);
  if (binary)
    write_matrix_binary(path, header, axis_name, axis, rows);
  else
    write_matrix_text(path, header, axis_name, axis, rows);
  return path;
}

HeaderLines grid_header(const LtvCirGrid& grid, const std::string& case_name) {
  HeaderLines h;
  h.push_back("case = " + case_name);
  h.push_back(std::string("structure = ") +
              (grid.kind == CirKind::TypeI ? "type1" : "type2"));
  h.push_back("fs_hz = " + g17(grid.fs));
  h.push_back("lag_offset = " + std::to_string(grid.lag_offset));
  h.push_back("axis = distance_m (Tx-Rx separation at the row's sample time n)");
  h.push_back("column j holds lag (lag_offset + j); lag_s = (lag_offset + j) / fs_hz");
  return h;
}

struct SweepSetup {
  std::vector<std::int64_t> n_values;
  std::int64_t n_end = 0;
  DynamicScenario rx_s;  // moving receiver
  DynamicScenario tx_s;  // moving transmitter
  LagWindow window;
};

SweepSetup make_sweep(const RunConfig& cfg) {
  if (!(cfg.v > 0.0))
    throw ConfigError("the distance sweep needs v > 0; set v or duration_samples");
  const double fs = cfg.fs;

  SweepSetup s;
  s.n_end = cfg.duration_samples > 0
                ? cfg.duration_samples
                : std::llround(cfg.sweep_distance_m * fs / cfg.v);
  if (s.n_end < 1) s.n_end = 1;
  const std::int64_t stride =
      cfg.n_stride > 0 ? cfg.n_stride
                       : std::max<std::int64_t>(1, std::llround(cfg.row_spacing_m * fs / cfg.v));
  for (std::int64_t n = 0; n <= s.n_end; n += stride) s.n_values.push_back(n);
  if (s.n_values.back() != s.n_end) s.n_values.push_back(s.n_end);

  CaseSpec rx_spec = cfg.case_spec();
  rx_spec.kind = CaseKind::MovingRx;
  rx_spec.duration_samples = s.n_end;
  CaseSpec tx_spec = rx_spec;
  tx_spec.kind = CaseKind::MovingTx;

  {
    const DynamicScenario rx0 = build_scenario(rx_spec);
    const DynamicScenario tx0 = build_scenario(tx_spec);
    const LagWindow w_rx = auto_lag_window(rx0, s.n_values, CirKind::TypeII);
    const LagWindow w_tx = auto_lag_window(tx0, s.n_values, CirKind::TypeII);
    const std::int64_t first = std::min(w_rx.first, w_tx.first);
    const std::int64_t last =
        std::max(w_rx.first + w_rx.count, w_tx.first + w_tx.count) - 1;
    s.window = {first, last - first + 1};
  }
  if (cfg.lag_min_s >= 0.0) s.window.first = std::llround(cfg.lag_min_s * fs);
  if (cfg.lag_max_s >= 0.0)
    s.window.count = std::llround(cfg.lag_max_s * fs) - s.window.first + 1;
  if (s.window.count < 1)
    throw ConfigError("lag window is empty; check lag_min_s / lag_max_s");

  // Extend the nominal durations so in-sweep rows evaluate inside the
  // trajectories; the extrapolation counters then report only genuine
  // out-of-range evaluations (e.g. type I lags reaching before n = 0).
  rx_spec.duration_samples = s.n_end + s.window.first + s.window.count;
  tx_spec.duration_samples = rx_spec.duration_samples;
  s.rx_s = build_scenario(rx_spec);
  s.tx_s = build_scenario(tx_spec);
  return s;
}

void note_regime(const RunConfig& cfg, RunResult& result) {
  CaseSpec spec = cfg.case_spec();
  if (auto warning = regime_warning(spec)) result.notes.push_back(*warning);
}

}  // namespace

RunResult run_static(const RunConfig& cfg) {
  cfg.validate();
  RunResult result;

  const Waveguide wg = cfg.waveguide();
  const FrequencyGrid grid{cfg.f_max, static_cast<int>(cfg.n_bins)};
  const Position tx{0.0, cfg.transceiver_height};
  const Position rx{cfg.d0, cfg.transceiver_height};

  const StaticCfr cfr = static_cfr(wg, tx, rx, grid);
  const StaticCir cir = static_cir(cfr);

  {
    std::vector<double> freq(cfr.values.size()), re(cfr.values.size()), im(cfr.values.size());
    for (std::size_t i = 0; i < cfr.values.size(); ++i) {
      freq[i] = grid.freq(static_cast<int>(i));
      re[i] = cfr.values[i].real();
      im[i] = cfr.values[i].imag();
    }
    const std::string names[] = {"freq_hz", "re", "im"};
    const std::span<const double> cols[] = {freq, re, im};
    HeaderLines extra;
    extra.push_back("table = static channel frequency response, one-sided");
    extra.push_back("distance_m = " + g17(cfg.d0));
    result.files.push_back(
        emit_columns(cfg, "static_cfr", base_header(cfg, extra), names, cols));
  }

  const double fs_cir = cir.sample_rate_fs;
  double measured = 0.0;
  bool arrival_found = true;
  try {
    measured = first_arrival_time(cir.taps, fs_cir, 0, cfg.arrival_threshold_db);
  } catch (const std::runtime_error&) {
    arrival_found = false;
  }
  const double predicted = cfg.d0 / cfg.sound_speed_c;

  {
    std::vector<double> lag(cir.taps.size());
    for (std::size_t i = 0; i < lag.size(); ++i) lag[i] = static_cast<double>(i) / fs_cir;
    const std::string names[] = {"lag_s", "amplitude"};
    const std::span<const double> cols[] = {lag, cir.taps};
    HeaderLines extra;
    extra.push_back("table = static channel impulse response");
    extra.push_back("fs_hz = " + g17(fs_cir));
    extra.push_back("distance_m = " + g17(cfg.d0));
    extra.push_back("first_arrival_s = " + (arrival_found ? g17(measured) : "none"));
    extra.push_back("predicted_line_of_sight_s = " + g17(predicted));
    result.files.push_back(
        emit_columns(cfg, "static_cir", base_header(cfg, extra), names, cols));
  }

  result.verify_ok = arrival_found && std::abs(measured - predicted) <= 1.0 / fs_cir;
  result.notes.push_back("static first arrival " + (arrival_found ? g17(measured) : "none") +
                         " s vs line of sight " + g17(predicted) + " s");
  return result;
}

RunResult run_fig3(const RunConfig& cfg) {
  cfg.validate();
  RunResult result;
  note_regime(cfg, result);

  const SweepSetup s = make_sweep(cfg);
  const int threads = static_cast<int>(cfg.threads);
  const LtvCirGrid rx_grid = type2_grid(s.rx_s, s.n_values, s.window, threads);
  const LtvCirGrid tx_grid = type2_grid(s.tx_s, s.n_values, s.window, threads);

  {
    HeaderLines extra = grid_header(rx_grid, "moving_rx");
    result.files.push_back(emit_matrix(cfg, "fig3_moving_rx_type2",
                                       base_header(cfg, extra), "distance_m",
                                       rx_grid.row_distance_m, rx_grid.rows));
  }
  {
    HeaderLines extra = grid_header(tx_grid, "moving_tx");
    extra.push_back(
        "note = each row equals the same-n type1 row of the moving_rx case; both sample "
        "the static channel at the emission-time separation");
    result.files.push_back(emit_matrix(cfg, "fig3_moving_tx_type2",
                                       base_header(cfg, extra), "distance_m",
                                       tx_grid.row_distance_m, tx_grid.rows));
  }

  result.extrapolated_evaluations =
      s.rx_s.extrapolation_count->load() + s.tx_s.extrapolation_count->load();
  result.notes.push_back(std::to_string(s.n_values.size()) + " rows x " +
                         std::to_string(s.window.count) + " lags per grid, lag offset " +
                         std::to_string(s.window.first));
  return result;
}

RunResult run_fig4(const RunConfig& cfg) {
  cfg.validate();
  RunResult result;
  note_regime(cfg, result);

  const SweepSetup s = make_sweep(cfg);
  const std::vector<double> tx_row0 = type2_cir(s.tx_s, 0, s.window);
  const std::vector<double> rx_row0 = type2_cir(s.rx_s, 0, s.window);

  CaseSpec static_spec = cfg.case_spec();
  static_spec.kind = CaseKind::Static;
  static_spec.v = 0.0;
  static_spec.duration_samples = s.window.first + s.window.count;
  const std::vector<double> static_row =
      type2_cir(build_scenario(static_spec), 0, s.window);

  CaseSpec co_spec = cfg.case_spec();
  co_spec.kind = CaseKind::CoMoving;
  co_spec.duration_samples = s.window.first + s.window.count;
  const std::vector<double> co_row = dynamic_lti_response(co_spec, s.window);

  auto max_diff = [](const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
  };
  const double static_diff = max_diff(static_row, tx_row0);
  const double co_diff = max_diff(co_row, rx_row0);

  std::vector<double> lag(static_cast<std::size_t>(s.window.count));
  for (std::size_t i = 0; i < lag.size(); ++i)
    lag[i] = static_cast<double>(s.window.first + static_cast<std::int64_t>(i)) / cfg.fs;

  {
    const std::string names[] = {"lag_s", "amplitude"};
    const std::span<const double> cols[] = {lag, static_row};
    HeaderLines extra;
    extra.push_back("table = static case impulse response (time invariant)");
    extra.push_back("distance_m = " + g17(cfg.d0));
    extra.push_back("max_abs_diff_vs_moving_tx_row0 = " + g17(static_diff));
    result.files.push_back(
        emit_columns(cfg, "fig4_static", base_header(cfg, extra), names, cols));
  }
  {
    const std::string names[] = {"lag_s", "amplitude"};
    const std::span<const double> cols[] = {lag, co_row};
    HeaderLines extra;
    extra.push_back(
        "table = co-moving case impulse response (time invariant; lag m taps the static "
        "channel at distance d0 + v m / fs)");
    extra.push_back("d0_m = " + g17(cfg.d0));
    extra.push_back("max_abs_diff_vs_moving_rx_row0 = " + g17(co_diff));
    result.files.push_back(
        emit_columns(cfg, "fig4_co_moving", base_header(cfg, extra), names, cols));
  }

  const double tol = 1e-9;
  result.verify_ok = static_diff <= tol && co_diff <= tol;
  result.notes.push_back("static trace vs moving_tx row 0: max |diff| = " + g17(static_diff));
  result.notes.push_back("co-moving trace vs moving_rx row 0: max |diff| = " + g17(co_diff));
  result.extrapolated_evaluations =
      s.rx_s.extrapolation_count->load() + s.tx_s.extrapolation_count->load();
  return result;
}

RunResult run_filter(const RunConfig& cfg, const std::filesystem::path& input,
                     const std::filesystem::path& output, CirKind structure,
                     std::optional<double> input_fs) {
  cfg.validate();
  RunResult result;
  note_regime(cfg, result);

  const SignalBuffer x = read_waveform(input, input_fs.value_or(0.0));
  if (std::abs(x.fs / cfg.fs - 1.0) > 1e-9)
    throw ConfigError("input waveform rate " + g17(x.fs) +
                      " Hz does not match the configured fs " + g17(cfg.fs) + " Hz");

  CaseSpec spec = cfg.case_spec();
  const std::int64_t x_end = x.start + static_cast<std::int64_t>(x.samples.size());
  spec.duration_samples = std::max<std::int64_t>(x_end, 1);
  {
    const DynamicScenario probe = build_scenario(spec);
    const std::int64_t probes[] = {std::max<std::int64_t>(x.start, 0),
                                   std::max<std::int64_t>(x_end - 1, 0)};
    const LagWindow w = auto_lag_window(probe, probes, CirKind::TypeII);
    spec.duration_samples = x_end + w.first + w.count;
  }
  const DynamicScenario s = build_scenario(spec);
  const SignalBuffer y =
      structure == CirKind::TypeI ? filter_type1(x, s) : filter_type2(x, s);

  HeaderLines extra;
  extra.push_back(std::string("structure = ") +
                  (structure == CirKind::TypeI ? "type1" : "type2"));
  extra.push_back("input = " + input.string());
  extra.push_back("input_samples = " + std::to_string(x.samples.size()));
  extra.push_back("output_samples = " + std::to_string(y.samples.size()));
  extra.push_back("retained_paths = " + std::to_string(s.cache->retained_paths().size()));
  extra.push_back("extrapolated_evaluations = " +
                  std::to_string(s.extrapolation_count->load()));

  std::filesystem::create_directories(output.parent_path().empty()
                                          ? std::filesystem::path(".")
                                          : output.parent_path());
  write_waveform(output, y, base_header(cfg, extra),
                 cfg.output_format() == OutputFormat::Binary);
  result.files.push_back(output);
  result.extrapolated_evaluations = s.extrapolation_count->load();
  result.notes.push_back(std::to_string(x.samples.size()) + " samples in, " +
                         std::to_string(y.samples.size()) + " samples out");
  return result;
}

RunResult run_analyze(const RunConfig& cfg) {
  cfg.validate();
  RunResult result;
  note_regime(cfg, result);

  const double c = cfg.sound_speed_c;
  const double v = cfg.v;
  const double tol = 1.0 / cfg.fs;
  std::vector<std::string> lines;

  auto report_line = [&](const DelayReport& r) {
    lines.push_back("report case=" + std::string(to_string(r.kind)) + " d_m=" + g17(r.d) +
                    " los_delay_s=" + g17(r.los_delay_s) + " time_shift_vs_moving_tx_s=" +
                    g17(r.time_shift_vs_moving_tx_s) + " doppler_factor=" +
                    g17(r.doppler_factor));
  };
  auto check_line = [&](const std::string& case_name, const GridCheck& chk) {
    lines.push_back("check case=" + case_name + " row=" + std::to_string(chk.row_index) +
                    " d_m=" + g17(chk.row_distance_m) + " measured_s=" + g17(chk.measured_s) +
                    " predicted_s=" + g17(chk.predicted_s) + " residual_s=" +
                    g17(chk.residual_s) + " pass=" + (chk.pass ? "1" : "0"));
  };

  std::size_t checks = 0, passed = 0;
  auto tally = [&](const GridCheck& chk) {
    ++checks;
    if (chk.pass) ++passed;
  };

  const SweepSetup s = make_sweep(cfg);
  const double d_end = cfg.d0 + cfg.v * static_cast<double>(s.n_end) / cfg.fs;

  for (const CaseKind kind :
       {CaseKind::MovingRx, CaseKind::MovingTx, CaseKind::Static, CaseKind::CoMoving}) {
    report_line(make_delay_report(kind, cfg.d0, c, v));
    if (kind == CaseKind::MovingRx || kind == CaseKind::MovingTx)
      report_line(make_delay_report(kind, d_end, c, v));
  }
  lines.push_back("note doppler factors: moving_rx (c-v)/c = " + g17((c - v) / c) +
                  ", moving_tx c/(c+v) = " + g17(c / (c + v)) +
                  ", ratio rx/tx = " + g17(((c - v) * (c + v)) / (c * c)));

  const int threads = static_cast<int>(cfg.threads);
  const LtvCirGrid rx_grid = type2_grid(s.rx_s, s.n_values, s.window, threads);
  const LtvCirGrid tx_grid = type2_grid(s.tx_s, s.n_values, s.window, threads);
  for (const GridCheck& chk : verify_grid_rows(rx_grid, CaseKind::MovingRx, c, v, tol,
                                               cfg.arrival_threshold_db)) {
    check_line("moving_rx", chk);
    tally(chk);
  }
  for (const GridCheck& chk : verify_grid_rows(tx_grid, CaseKind::MovingTx, c, v, tol,
                                               cfg.arrival_threshold_db)) {
    check_line("moving_tx", chk);
    tally(chk);
  }

  {
    CaseSpec static_spec = cfg.case_spec();
    static_spec.kind = CaseKind::Static;
    static_spec.v = 0.0;
    static_spec.duration_samples = 1;
    const DynamicScenario st = build_scenario(static_spec);
    const std::int64_t n0[] = {0};
    const LagWindow w = auto_lag_window(st, n0, CirKind::TypeII);
    const std::vector<double> row = type2_cir(st, 0, w);
    GridCheck chk;
    chk.row_distance_m = cfg.d0;
    chk.measured_s = first_arrival_time(row, cfg.fs, w.first, cfg.arrival_threshold_db);
    chk.predicted_s = los_delay(CaseKind::Static, cfg.d0, c, 0.0);
    chk.residual_s = chk.measured_s - chk.predicted_s;
    chk.pass = std::abs(chk.residual_s) <= tol;
    check_line("static", chk);
    tally(chk);
  }
  {
    CaseSpec co_spec = cfg.case_spec();
    co_spec.kind = CaseKind::CoMoving;
    const std::vector<double> row = dynamic_lti_response(co_spec);
    GridCheck chk;
    chk.row_distance_m = cfg.d0;
    chk.measured_s = first_arrival_time(row, cfg.fs, 0, cfg.arrival_threshold_db);
    chk.predicted_s = los_delay(CaseKind::CoMoving, cfg.d0, c, v);
    chk.residual_s = chk.measured_s - chk.predicted_s;
    chk.pass = std::abs(chk.residual_s) <= tol;
    check_line("co_moving", chk);
    tally(chk);
  }

  lines.push_back("summary checks_passed=" + std::to_string(passed) + "/" +
                  std::to_string(checks) + " tolerance_s=" + g17(tol));

  HeaderLines extra;
  extra.push_back("table = closed-form delay/Doppler reports and measured residuals");
  HeaderLines header = base_header(cfg, extra);
  const auto path = out_path(cfg, "analysis", false);
  {
    std::vector<std::string> all;
    for (const std::string& h : header) all.push_back("# " + h);
    all.insert(all.end(), lines.begin(), lines.end());
    std::string text;
    for (const std::string& l : all) {
      text += l;
      text += '\n';
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
  }
  result.files.push_back(path);
  result.verify_ok = passed == checks;
  result.extrapolated_evaluations =
      s.rx_s.extrapolation_count->load() + s.tx_s.extrapolation_count->load();
  result.notes.push_back("delay checks passed: " + std::to_string(passed) + "/" +
                         std::to_string(checks));
  return result;
}

}  // namespace swa
