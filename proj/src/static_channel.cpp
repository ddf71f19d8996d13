#include "swachan/static_channel.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "swachan/errors.hpp"

namespace swa {

namespace {

constexpr double kPi = std::numbers::pi;

// FFTW plan creation/destruction is not thread-safe.
std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

void FrequencyGrid::validate() const {
  if (n_bins < 2) throw std::invalid_argument("frequency grid: n_bins must be >= 2");
  if (!(f_max > 0.0)) throw std::invalid_argument("frequency grid: f_max must be > 0");
}

double absorption_db_per_km(double f_hz) {
  if (f_hz < 0.0) throw std::domain_error("absorption: negative frequency");
  const double F2 = (f_hz / 1000.0) * (f_hz / 1000.0);
  return 0.11 * F2 / (1.0 + F2) + 44.0 * F2 / (4100.0 + F2) + 2.75e-4 * F2 + 0.003;
}

double absorption_per_meter(double f_hz) {
  return std::pow(10.0, absorption_db_per_km(f_hz) / 10.0 / 1000.0);
}

double bottom_reflection(const Waveguide& wg, double grazing_rad) {
  if (!(grazing_rad > 0.0) || grazing_rad > kPi / 2.0)
    throw std::domain_error("bottom reflection: grazing angle outside (0, pi/2]");
  const double density_ratio = wg.bottom_density_rho_b / wg.water_density_rho;
  const double cos_g = std::cos(grazing_rad);
  const double under_root =
      (wg.sound_speed_c / wg.bottom_speed_cb) * (wg.sound_speed_c / wg.bottom_speed_cb) -
      cos_g * cos_g;
  if (under_root < 0.0) return 1.0;  // past critical angle: total reflection
  const double root = std::sqrt(under_root);
  const double a = density_ratio * std::sin(grazing_rad);
  return (a - root) / (a + root);
}

double path_gain(const Waveguide& wg, const Eigenpath& path, double f_hz) {
  if (!(path.length_m > 0.0)) throw std::domain_error("path gain: nonpositive path length");
  const double attenuation_db = 10.0 * wg.spreading_exponent_k * std::log10(path.length_m) +
                                absorption_db_per_km(f_hz) * path.length_m / 1000.0;
  return path.cum_reflection * std::pow(10.0, -attenuation_db / 20.0);
}

StaticCfr cfr_from_paths(const Waveguide& wg, const std::vector<Eigenpath>& paths,
                         const FrequencyGrid& grid, Position tx, Position rx) {
  grid.validate();
  StaticCfr cfr;
  cfr.grid = grid;
  cfr.tx = tx;
  cfr.rx = rx;
  cfr.values.resize(static_cast<std::size_t>(grid.n_bins));
  for (int i = 0; i < grid.n_bins; ++i) {
    const double f = grid.freq(i);
    std::complex<double> h = 0.0;
    for (const Eigenpath& p : paths) {
      const double phase = -2.0 * kPi * f * p.delay_s;
      h += path_gain(wg, p, f) * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    cfr.values[static_cast<std::size_t>(i)] = h;
  }
  return cfr;
}

StaticCfr static_cfr(const Waveguide& wg, const Position& tx, const Position& rx,
                     const FrequencyGrid& grid) {
  return cfr_from_paths(wg, enumerate_eigenpaths(wg, tx, rx), grid, tx, rx);
}

StaticCfr hermitian_symmetrized(const StaticCfr& cfr) {
  StaticCfr out = cfr;
  if (!out.values.empty()) {
    out.values.front() = out.values.front().real();
    out.values.back() = out.values.back().real();
  }
  return out;
}

StaticCir static_cir(const StaticCfr& cfr) {
  cfr.grid.validate();
  if (cfr.values.size() != static_cast<std::size_t>(cfr.grid.n_bins))
    throw std::invalid_argument("static_cir: value count does not match grid");

  const std::size_t n_bins = cfr.values.size();
  const std::size_t n = 2 * (n_bins - 1);

  fftw_complex* in = fftw_alloc_complex(n_bins);
  double* out = fftw_alloc_real(n);
  for (std::size_t k = 0; k < n_bins; ++k) {
    in[k][0] = cfr.values[k].real();
    in[k][1] = cfr.values[k].imag();
  }
  in[0][1] = 0.0;  // Hermitian extension forces DC and band-edge bins real
  in[n_bins - 1][1] = 0.0;

  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    plan = fftw_plan_dft_c2r_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_destroy_plan(plan);
  }

  StaticCir cir;
  cir.sample_rate_fs = 2.0 * cfr.grid.f_max;
  cir.taps.resize(n);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t m = 0; m < n; ++m) cir.taps[m] = out[m] * scale;

  fftw_free(in);
  fftw_free(out);
  return cir;
}

std::vector<std::complex<double>> cfr_of_cir(const StaticCir& cir) {
  const std::size_t n = cir.taps.size();
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("cfr_of_cir: tap count must be even and >= 2");
  const std::size_t n_bins = n / 2 + 1;

  double* in = fftw_alloc_real(n);
  fftw_complex* out = fftw_alloc_complex(n_bins);
  std::copy(cir.taps.begin(), cir.taps.end(), in);

  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_destroy_plan(plan);
  }

  std::vector<std::complex<double>> values(n_bins);
  for (std::size_t k = 0; k < n_bins; ++k) values[k] = {out[k][0], out[k][1]};
  fftw_free(in);
  fftw_free(out);
  return values;
}

double frac_delay_kernel(double x, int halfwidth) {
  const double ax = std::abs(x);
  if (ax >= halfwidth) return 0.0;
  const double s = x == 0.0 ? 1.0 : std::sin(kPi * x) / (kPi * x);
  const double window = 0.5 * (1.0 + std::cos(kPi * x / halfwidth));
  return s * window;
}

namespace {

SparseTapList taps_for_paths(const Waveguide& wg, const std::vector<Eigenpath>& paths, double fs,
                             int kernel_halfwidth, double ref_freq) {
  SparseTapList list;
  list.sample_rate_fs = fs;
  list.ref_freq_hz = ref_freq;
  list.kernel_halfwidth = kernel_halfwidth;
  list.taps.reserve(paths.size());
  for (const Eigenpath& p : paths) list.taps.push_back({p, path_gain(wg, p, ref_freq)});
  return list;
}

}  // namespace

SparseTapList sparse_cir(const Waveguide& wg, const Position& tx, const Position& rx, double fs,
                         int kernel_halfwidth, double ref_freq_hz, double floor_db) {
  if (kernel_halfwidth < 1) throw ConfigError("sparse_cir: kernel_halfwidth must be >= 1");
  if (!(fs > 0.0)) throw ConfigError("sparse_cir: fs must be > 0");
  if (ref_freq_hz == 0.0) ref_freq_hz = fs / 4.0;

  auto paths = enumerate_eigenpaths(wg, tx, rx);
  SparseTapList all = taps_for_paths(wg, paths, fs, kernel_halfwidth, ref_freq_hz);

  double peak = 0.0;
  for (const PathTap& t : all.taps) peak = std::max(peak, std::abs(t.gain_ref));
  const double floor = peak * std::pow(10.0, -floor_db / 20.0);

  SparseTapList kept = all;
  kept.taps.clear();
  for (const PathTap& t : all.taps)
    if (std::abs(t.gain_ref) >= floor) kept.taps.push_back(t);
  return kept;
}

double synthesize(const SparseTapList& taps, double lag) {
  double acc = 0.0;
  for (const PathTap& t : taps.taps)
    acc += t.gain_ref * frac_delay_kernel(lag - t.path.delay_s * taps.sample_rate_fs,
                                          taps.kernel_halfwidth);
  return acc;
}

ChannelCache::ChannelCache(const Waveguide& wg, double tx_height, double rx_height, double fs,
                           double reference_distance_m, const SynthParams& params)
    : wg_(wg), tx_height_(tx_height), rx_height_(rx_height), fs_(fs), params_(params) {
  if (params_.kernel_halfwidth < 1)
    throw ConfigError("channel cache: kernel_halfwidth must be >= 1");
  if (!(params_.cache_quantum_m > 0.0))
    throw ConfigError("channel cache: cache_quantum_m must be > 0");
  ref_freq_ = params_.ref_freq_hz != 0.0 ? params_.ref_freq_hz : fs_ / 4.0;

  // Freeze the retained path set at the reference distance so every cache
  // entry carries the same paths in the same order.
  const SparseTapList ref =
      sparse_cir(wg_, {0.0, tx_height_}, {reference_distance_m, rx_height_}, fs_,
                 params_.kernel_halfwidth, ref_freq_, params_.truncation_floor_db);
  path_ids_.reserve(ref.taps.size());
  path_verticals_.reserve(ref.taps.size());
  for (const PathTap& t : ref.taps) {
    path_ids_.emplace_back(t.path.n_surface, t.path.n_bottom);
    const double l = t.path.length_m;
    const double vert =
        std::sqrt(std::max(l * l - reference_distance_m * reference_distance_m, 0.0));
    path_verticals_.push_back(vert);
    max_vertical_ = std::max(max_vertical_, vert);
  }
}

double ChannelCache::quantize(double d) const {
  return std::round(d / params_.cache_quantum_m) * params_.cache_quantum_m;
}

SparseTapList ChannelCache::build(double d) const {
  const Position tx{0.0, tx_height_};
  const Position rx{d, rx_height_};
  auto all = enumerate_eigenpaths(wg_, tx, rx);

  std::vector<Eigenpath> chosen;
  chosen.reserve(path_ids_.size());
  for (const auto& [ns, nb] : path_ids_) {
    // Degenerate equal-height (j, j) variants share counts; consume in order.
    auto it = std::find_if(all.begin(), all.end(), [&](const Eigenpath& p) {
      return p.n_surface == ns && p.n_bottom == nb && p.length_m >= 0.0;
    });
    if (it == all.end()) throw std::logic_error("channel cache: path id lost at new distance");
    chosen.push_back(*it);
    it->length_m = -1.0;  // mark consumed
  }
  return taps_for_paths(wg_, chosen, fs_, params_.kernel_halfwidth, ref_freq_);
}

std::shared_ptr<const SparseTapList> ChannelCache::at_distance(double d) const {
  const double dq = quantize(d);
  const auto key = static_cast<std::int64_t>(std::llround(dq / params_.cache_quantum_m));
  {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(key);
    if (it != entries_.end()) return it->second;
  }
  auto value = std::make_shared<const SparseTapList>(build(dq));
  std::unique_lock lock(mutex_);
  auto [it, inserted] = entries_.emplace(key, std::move(value));
  return it->second;
}

}  // namespace swa
