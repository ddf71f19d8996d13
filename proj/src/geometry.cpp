#include "swachan/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "swachan/static_channel.hpp"

namespace swa {

void Waveguide::validate() const {
  if (!(depth_w > 0.0)) throw std::invalid_argument("waveguide: depth_w must be > 0");
  if (!(sound_speed_c > 0.0)) throw std::invalid_argument("waveguide: sound_speed_c must be > 0");
  if (!(bottom_speed_cb > 0.0)) throw std::invalid_argument("waveguide: bottom_speed_cb must be > 0");
  if (!(bottom_density_rho_b > 0.0) || !(water_density_rho > 0.0))
    throw std::invalid_argument("waveguide: densities must be > 0");
  if (!(spreading_exponent_k >= 1.0))
    throw std::invalid_argument("waveguide: spreading_exponent_k must be >= 1");
  if (max_reflections_pmax < 0)
    throw std::invalid_argument("waveguide: max_reflections_pmax must be >= 0");
}

Position Trajectory::at(std::int64_t n) const {
  if (n < 0 || n > duration_samples)
    throw std::out_of_range("trajectory: sample " + std::to_string(n) + " outside [0, " +
                            std::to_string(duration_samples) + "]");
  return extrapolated(static_cast<double>(n));
}

Position position_at(const Trajectory& traj, std::int64_t n) { return traj.at(n); }

namespace {

void check_height(const Waveguide& wg, const Position& p, const char* label) {
  if (p.height_above_bottom < 0.0 || p.height_above_bottom > wg.depth_w)
    throw std::invalid_argument(std::string(label) + " height " +
                                std::to_string(p.height_above_bottom) +
                                " outside water column [0, " + std::to_string(wg.depth_w) + "]");
}

}  // namespace

std::vector<Eigenpath> enumerate_eigenpaths(const Waveguide& wg, const Position& tx,
                                            const Position& rx) {
  wg.validate();
  check_height(wg, tx, "tx");
  check_height(wg, rx, "rx");

  const double d = std::abs(tx.x - rx.x);
  if (d == 0.0) throw std::domain_error("eigenpaths: zero horizontal separation");

  const double w = wg.depth_w;
  const double zs = tx.height_above_bottom;
  const double zr = rx.height_above_bottom;
  const int pmax = wg.max_reflections_pmax;

  std::vector<Eigenpath> paths;
  paths.reserve(1 + 4 * static_cast<std::size_t>(pmax));

  auto add = [&](int ns, int nb, double vertical) {
    const double vert = std::abs(vertical);
    if (nb + ns > 0 && vert == 0.0) return;  // bounce path collapsed onto a boundary
    Eigenpath p;
    p.n_surface = ns;
    p.n_bottom = nb;
    p.length_m = std::hypot(d, vert);
    p.delay_s = p.length_m / wg.sound_speed_c;
    p.grazing_rad = std::atan(vert / d);
    double gb = nb > 0 ? bottom_reflection(wg, p.grazing_rad) : 1.0;
    p.cum_reflection = (ns % 2 == 0 ? 1.0 : -1.0) * std::pow(gb, nb);
    paths.push_back(p);
  };

  add(0, 0, zs - zr);
  for (int j = 1; j <= pmax; ++j) {
    add(j, j, 2.0 * j * w - zs + zr);  // first bounce on the surface
    add(j, j, 2.0 * j * w + zs - zr);  // first bounce on the bottom
  }
  for (int j = 0; j + 1 <= pmax; ++j) {
    add(j + 1, j, 2.0 * (j + 1) * w - zs - zr);
    add(j, j + 1, 2.0 * j * w + zs + zr);
  }

  std::sort(paths.begin(), paths.end(), [](const Eigenpath& a, const Eigenpath& b) {
    if (a.delay_s != b.delay_s) return a.delay_s < b.delay_s;
    if (a.n_surface != b.n_surface) return a.n_surface < b.n_surface;
    return a.n_bottom < b.n_bottom;
  });
  return paths;
}

}  // namespace swa
