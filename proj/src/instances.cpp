#include "acrp/instances.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <fmt/format.h>

#include "acrp/errors.hpp"
#include "acrp/rng.hpp"

namespace acrp {

namespace {

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);  // [-pi, pi]
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

AircraftState radial(double angle, double radius, double speed) {
  AircraftState s;
  s.x = radius * std::cos(angle);
  s.y = radius * std::sin(angle);
  s.speed = speed;
  s.heading = wrap_angle(angle + kPi);
  return s;
}

void add_flow(Instance& inst, int n_per_stream, double axis, double alpha, double spacing,
              double radius, double speed, double ox, double oy) {
  for (double anchor : {axis - alpha / 2.0, axis + alpha / 2.0}) {
    for (int k = 0; k < n_per_stream; ++k) {
      AircraftState s = radial(anchor, radius - spacing * k, speed);
      s.x += ox;
      s.y += oy;
      inst.aircraft.push_back(s);
    }
  }
}

}  // namespace

void check_initial_separation(const Instance& inst) {
  for (int i = 0; i < inst.size(); ++i) {
    for (int j = i + 1; j < inst.size(); ++j) {
      const auto& a = inst.aircraft[static_cast<std::size_t>(i)];
      const auto& b = inst.aircraft[static_cast<std::size_t>(j)];
      const double dist = std::hypot(a.x - b.x, a.y - b.y);
      if (dist < inst.d) throw InitialLossOfSeparation(i, j, dist, inst.d);
    }
  }
}

Instance gen_cp(int n, const CircleParams& p) {
  if (n < 2) throw std::invalid_argument("CP needs at least 2 aircraft");
  Instance inst;
  inst.family = "CP";
  for (int k = 0; k < n; ++k) inst.aircraft.push_back(radial(2.0 * kPi * k / n, p.radius, p.speed));
  check_initial_separation(inst);
  return inst;
}

Instance gen_rcp(int n, std::uint64_t seed, const RandomCircleParams& p) {
  if (n < 2) throw std::invalid_argument("RCP needs at least 2 aircraft");
  Instance inst;
  inst.family = "RCP";
  inst.seed = seed;
  for (int k = 0; k < n; ++k) {
    Rng rng(seed, static_cast<std::uint64_t>(k));
    AircraftState s = radial(2.0 * kPi * k / n, p.radius, rng.uniform(p.speed_lo, p.speed_hi));
    s.heading = wrap_angle(s.heading + rng.uniform(-p.heading_jitter, p.heading_jitter));
    inst.aircraft.push_back(s);
  }
  try {
    check_initial_separation(inst);
  } catch (const InitialLossOfSeparation& e) {
    throw GenerationFailed(fmt::format("RCP-{} layout is not initially separated: {}", n, e.what()));
  }
  return inst;
}

Instance gen_fp(int n_per_stream, const FlowParams& p) {
  if (n_per_stream < 2) throw std::invalid_argument("FP needs at least 2 aircraft per stream");
  Instance inst;
  inst.family = "FP";
  add_flow(inst, n_per_stream, p.axis, p.alpha, p.spacing, p.radius, p.speed, 0.0, 0.0);
  check_initial_separation(inst);
  return inst;
}

Instance gen_gp(int n_per_stream, const GridParams& p) {
  if (n_per_stream < 2) throw std::invalid_argument("GP needs at least 2 aircraft per stream");
  Instance inst;
  inst.family = "GP";
  const double spacing = p.trail_outside ? -p.spacing : p.spacing;
  add_flow(inst, n_per_stream, p.axis, p.alpha, spacing, p.radius, p.speed, 0.0, 0.0);
  add_flow(inst, n_per_stream, p.axis, p.alpha, spacing, p.radius, p.speed, p.offset_x, p.offset_y);
  check_initial_separation(inst);
  return inst;
}

Instance assign_fls(Instance inst, int fl_count, std::uint64_t seed) {
  if (fl_count < 1) throw std::invalid_argument("fl_count must be at least 1");
  for (std::size_t i = 0; i < inst.aircraft.size(); ++i) {
    // Streams disjoint from the generators' (which use ids below 2^32).
    Rng rng(seed, (std::uint64_t{1} << 32) + i);
    auto& a = inst.aircraft[i];
    const int base = static_cast<int>(rng.uniform_int(1, fl_count));
    a.fl = base;
    a.fl_set.clear();
    for (int k = std::max(1, base - 1); k <= std::min(fl_count, base + 1); ++k) a.fl_set.push_back(k);
  }
  return inst;
}

int count_conflicts(const Instance& inst) {
  int count = 0;
  for (int i = 0; i < inst.size(); ++i) {
    for (int j = i + 1; j < inst.size(); ++j) {
      const auto& a = inst.aircraft[static_cast<std::size_t>(i)];
      const auto& b = inst.aircraft[static_cast<std::size_t>(j)];
      const PairGeometry pg = relative_state(a, b, inst.d, i, j);
      const auto v = relative_velocity(a, b, 1.0, 0.0, 1.0, 0.0);
      if (is_conflict(pg, v[0], v[1])) ++count;
    }
  }
  return count;
}

Instance generate(const std::string& family, int n, std::uint64_t seed, int fl_count) {
  std::string f = family;
  std::transform(f.begin(), f.end(), f.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  Instance inst;
  if (f == "CP") inst = gen_cp(n);
  else if (f == "RCP") inst = gen_rcp(n, seed);
  else if (f == "FP") inst = gen_fp(n);
  else if (f == "GP") inst = gen_gp(n);
  else throw std::invalid_argument(fmt::format("unknown instance family '{}'", family));
  inst.seed = seed;
  if (fl_count > 0) inst = assign_fls(std::move(inst), fl_count, seed);
  return inst;
}

std::string instance_id(const Instance& inst) {
  int n = inst.size();
  if (inst.family == "FP") n /= 2;
  if (inst.family == "GP") n /= 4;
  std::string id = fmt::format("{}-{}", inst.family.empty() ? "X" : inst.family, n);
  if (inst.family == "RCP") id += fmt::format("-s{}", inst.seed);
  return id;
}

}  // namespace acrp
