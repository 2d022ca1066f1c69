#include "acrp/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

#include "acrp/errors.hpp"

namespace acrp {

namespace {

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                 "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

struct Frame {
  double x_lo = 0.0;
  double y_lo = 0.0;
  double scale = 1.0;
  double width = 0.0;
  double height = 0.0;

  // Equal-aspect fit of [x_lo, x_hi] x [y_lo, y_hi] with a margin, y up.
  Frame(double x0, double x1, double y0, double y1, double w, double h) : width(w), height(h) {
    const double pad = 0.08 * std::max({x1 - x0, y1 - y0, 1e-9});
    x0 -= pad;
    x1 += pad;
    y0 -= pad;
    y1 += pad;
    scale = std::min(w / (x1 - x0), h / (y1 - y0));
    x_lo = 0.5 * (x0 + x1) - 0.5 * w / scale;
    y_lo = 0.5 * (y0 + y1) - 0.5 * h / scale;
  }
  double sx(double x) const { return (x - x_lo) * scale; }
  double sy(double y) const { return height - (y - y_lo) * scale; }
  double extent() const { return std::max(width, height) / scale; }
};

std::string f3(double v) {
  const std::string s = fmt::format("{:.3f}", v);
  return s == "-0.000" ? "0.000" : s;
}

std::string header(double w, double h) {
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
      "<defs><clipPath id=\"view\"><rect x=\"0\" y=\"0\" width=\"{0}\" height=\"{1}\"/></clipPath></defs>\n"
      "<rect x=\"0\" y=\"0\" width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n"
      "<g clip-path=\"url(#view)\">\n",
      f3(w), f3(h));
}

std::string line(const Frame& fr, double x0, double y0, double x1, double y1, const std::string& attrs) {
  return fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" {}/>\n", f3(fr.sx(x0)), f3(fr.sy(y0)), f3(fr.sx(x1)),
                     f3(fr.sy(y1)), attrs);
}

std::string dot(const Frame& fr, double x, double y, double r, const std::string& attrs) {
  return fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"{}\" {}/>\n", f3(fr.sx(x)), f3(fr.sy(y)), f3(r), attrs);
}

std::string label(const Frame& fr, double x, double y, const std::string& text) {
  return fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
                     f3(fr.sx(x) + 4.0), f3(fr.sy(y) - 4.0), text);
}

Controls control_of(const std::vector<Controls>& controls, std::size_t i) {
  return i < controls.size() ? controls[i] : Controls{};
}

std::string trajectories(const Instance& inst, const std::vector<Controls>& controls, const PlotOptions& opts) {
  double horizon = opts.horizon_h;
  if (horizon <= 0.0) {
    double cx = 0.0;
    double cy = 0.0;
    for (const auto& a : inst.aircraft) {
      cx += a.x;
      cy += a.y;
    }
    cx /= std::max(1, inst.size());
    cy /= std::max(1, inst.size());
    for (const auto& a : inst.aircraft) horizon = std::max(horizon, 2.0 * std::hypot(a.x - cx, a.y - cy) / a.speed);
    if (horizon <= 0.0) horizon = 1.0;
  }
  struct Ray {
    double x0, y0, x1, y1, x2, y2;
  };
  std::vector<Ray> rays;
  double x_lo = 0.0, x_hi = 0.0, y_lo = 0.0, y_hi = 0.0;
  bool first = true;
  auto grow = [&](double x, double y) {
    x_lo = first ? x : std::min(x_lo, x);
    x_hi = first ? x : std::max(x_hi, x);
    y_lo = first ? y : std::min(y_lo, y);
    y_hi = first ? y : std::max(y_hi, y);
    first = false;
  };
  for (std::size_t i = 0; i < inst.aircraft.size(); ++i) {
    const auto& a = inst.aircraft[i];
    const Controls c = control_of(controls, i);
    const double len = a.speed * horizon;
    const double lq = len * c.q;
    Ray r{a.x, a.y, a.x + len * std::cos(a.heading), a.y + len * std::sin(a.heading),
          a.x + lq * std::cos(a.heading + c.theta), a.y + lq * std::sin(a.heading + c.theta)};
    grow(r.x0, r.y0);
    grow(r.x1, r.y1);
    grow(r.x2, r.y2);
    rays.push_back(r);
  }
  const Frame fr(x_lo, x_hi, y_lo, y_hi, opts.width, opts.height);
  std::string s = header(opts.width, opts.height);
  for (std::size_t i = 0; i < rays.size(); ++i) {
    const Ray& r = rays[i];
    const std::string colour = kPalette[i % kPalette.size()];
    s += line(fr, r.x0, r.y0, r.x1, r.y1,
              fmt::format("stroke=\"{}\" stroke-opacity=\"0.45\" stroke-dasharray=\"4 3\" stroke-width=\"1\"", colour));
    if (!controls.empty()) {
      s += line(fr, r.x0, r.y0, r.x2, r.y2, fmt::format("stroke=\"{}\" stroke-width=\"1.5\"", colour));
    }
    s += dot(fr, r.x0, r.y0, 3.0, fmt::format("fill=\"{}\"", colour));
    s += dot(fr, r.x0, r.y0, inst.d / 2.0 * fr.scale, fmt::format("fill=\"none\" stroke=\"{}\" stroke-width=\"0.5\"", colour));
    s += label(fr, r.x0, r.y0, std::to_string(i));
  }
  return s + "</g>\n</svg>\n";
}

std::string velocity_plane(const Instance& inst, const std::vector<Controls>& controls, const PlotOptions& opts) {
  const auto [i, j] = opts.pair;
  if (i < 0 || j < 0 || i >= inst.size() || j >= inst.size() || i == j) {
    throw UnknownPair(fmt::format("no pair ({}, {}) in an instance of {} aircraft", i, j, inst.size()));
  }
  const auto& a = inst.aircraft[static_cast<std::size_t>(i)];
  const auto& b = inst.aircraft[static_cast<std::size_t>(j)];
  const PairGeometry pg = relative_state(a, b, inst.d, i, j);
  const VelocityBox box = velocity_box(a, b, inst.bounds, inst.bounds);
  const auto nominal = relative_velocity(a, b, 1.0, 0.0, 1.0, 0.0);
  const Controls ca = control_of(controls, static_cast<std::size_t>(i));
  const Controls cb = control_of(controls, static_cast<std::size_t>(j));
  const auto solved = relative_velocity(a, b, ca.q, ca.theta, cb.q, cb.theta);

  double x_lo = std::min({box.vx_lo, 0.0, nominal[0], solved[0]});
  double x_hi = std::max({box.vx_hi, 0.0, nominal[0], solved[0]});
  double y_lo = std::min({box.vy_lo, 0.0, nominal[1], solved[1]});
  double y_hi = std::max({box.vy_hi, 0.0, nominal[1], solved[1]});
  const Frame fr(x_lo, x_hi, y_lo, y_hi, opts.width, opts.height);
  const double far = 4.0 * fr.extent();

  std::string s = header(opts.width, opts.height);
  // Conflict wedge: directions within asin(d / |p|) of -p.
  const double base = std::atan2(-pg.y, -pg.x);
  const double half = pg.cone_half_angle();
  s += fmt::format("<polygon id=\"conflict-wedge\" points=\"{},{} {},{} {},{}\" fill=\"#d62728\" fill-opacity=\"0.18\" stroke=\"none\"/>\n",
                   f3(fr.sx(0.0)), f3(fr.sy(0.0)), f3(fr.sx(far * std::cos(base - half))),
                   f3(fr.sy(far * std::sin(base - half))), f3(fr.sx(far * std::cos(base + half))),
                   f3(fr.sy(far * std::sin(base + half))));
  s += fmt::format("<rect id=\"velocity-box\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n",
                   f3(fr.sx(box.vx_lo)), f3(fr.sy(box.vy_hi)), f3((box.vx_hi - box.vx_lo) * fr.scale),
                   f3((box.vy_hi - box.vy_lo) * fr.scale));
  const auto through_origin = [&](const LineCoeffs& l, const char* id, const char* style) {
    const double n = l.norm();
    if (n <= 0.0) return std::string{};
    const double ux = l.gamma / n;
    const double uy = l.phi / n;
    return fmt::format("<g id=\"{}\">", id) + line(fr, -far * ux, -far * uy, far * ux, far * uy, style) + "</g>\n";
  };
  s += through_origin(pg.p_line, "line-P", "stroke=\"#555555\" stroke-dasharray=\"6 3\" stroke-width=\"1\"");
  s += through_origin(pg.n_line, "line-N", "stroke=\"#555555\" stroke-dasharray=\"2 2\" stroke-width=\"1\"");
  s += through_origin(pg.lower, "line-R1", "stroke=\"#1f77b4\" stroke-width=\"1\"");
  s += through_origin(pg.upper, "line-R2", "stroke=\"#2ca02c\" stroke-width=\"1\"");
  s += line(fr, x_lo - far, 0.0, x_hi + far, 0.0, "stroke=\"#bbbbbb\" stroke-width=\"0.5\"");
  s += line(fr, 0.0, y_lo - far, 0.0, y_hi + far, "stroke=\"#bbbbbb\" stroke-width=\"0.5\"");
  s += "<g id=\"nominal\">" + dot(fr, nominal[0], nominal[1], 3.5, "fill=\"none\" stroke=\"black\" stroke-width=\"1\"") + "</g>\n";
  if (!controls.empty()) {
    s += fmt::format("<circle id=\"solution\" cx=\"{}\" cy=\"{}\" r=\"3.5\" fill=\"black\"/>\n", f3(fr.sx(solved[0])),
                     f3(fr.sy(solved[1])));
  }
  s += label(fr, x_lo, y_hi, fmt::format("pair ({}, {})", i, j));
  return s + "</g>\n</svg>\n";
}

}  // namespace

std::string plot_svg(const Instance& inst, const std::vector<Controls>& controls, const PlotOptions& opts) {
  return opts.mode == PlotMode::Trajectories ? trajectories(inst, controls, opts)
                                             : velocity_plane(inst, controls, opts);
}

}  // namespace acrp
