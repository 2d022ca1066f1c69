#include "acrp/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "acrp/errors.hpp"

namespace acrp {

bool Instance::has_fl() const {
  return !aircraft.empty() &&
         std::all_of(aircraft.begin(), aircraft.end(), [](const AircraftState& a) { return a.has_fl(); });
}

std::vector<ControlBounds> Instance::bounds_per_aircraft() const {
  return std::vector<ControlBounds>(aircraft.size(), bounds);
}

Instance Instance::subset(const std::vector<int>& ids) const {
  Instance out;
  out.family = family;
  out.seed = seed;
  out.d = d;
  out.bounds = bounds;
  out.aircraft.reserve(ids.size());
  for (int id : ids) out.aircraft.push_back(aircraft.at(static_cast<std::size_t>(id)));
  return out;
}

const char* to_string(Meaning m) {
  switch (m) {
    case Meaning::DeltaX: return "dx";
    case Meaning::DeltaY: return "dy";
    case Meaning::TildeDx: return "tdx";
    case Meaning::TildeDy: return "tdy";
    case Meaning::Vx: return "vx";
    case Meaning::Vy: return "vy";
    case Meaning::Z: return "z";
    case Meaning::Sigma: return "sigma";
    case Meaning::Rho: return "rho";
    case Meaning::Phi: return "phi";
    case Meaning::SegX: return "sx";
    case Meaning::SegY: return "sy";
    case Meaning::DRho: return "drho";
  }
  return "?";
}

const char* to_string(Formulation f) {
  switch (f) {
    case Formulation::Disjunctive2D: return "disjunctive-2d";
    case Formulation::Shadow2D: return "shadow-2d";
    case Formulation::MiqpRelax: return "miqp-relax";
    case Formulation::Miqcp: return "miqcp";
    case Formulation::FlAssign: return "fl-assign";
  }
  return "?";
}

const char* to_string(Separation s) {
  return s == Separation::Disjunctive ? "disjunctive" : "shadow";
}

std::string VarTag::name() const {
  std::string s = to_string(meaning);
  for (int k : {a, b, c}) {
    if (k >= 0) s += fmt::format("_{}", k);
  }
  return s;
}

std::size_t VarTagHash::operator()(const VarTag& t) const {
  std::size_t h = static_cast<std::size_t>(t.meaning);
  for (int k : {t.a, t.b, t.c}) h = h * 1000003u ^ static_cast<std::size_t>(k + 1);
  return h;
}

double LinearConstraint::lhs(std::span<const double> x) const {
  double s = 0.0;
  for (const auto& t : terms) s += t.coef * x[static_cast<std::size_t>(t.var)];
  return s;
}

double LinearConstraint::violation(std::span<const double> x) const {
  const double l = lhs(x);
  switch (sense) {
    case Sense::LessEqual: return std::max(0.0, l - rhs);
    case Sense::GreaterEqual: return std::max(0.0, rhs - l);
    case Sense::Equal: return std::abs(l - rhs);
  }
  return 0.0;
}

double QuadConstraint::lhs(std::span<const double> x) const {
  double s = 0.0;
  for (const auto& q : quad) {
    s += q.coef * x[static_cast<std::size_t>(q.i)] * x[static_cast<std::size_t>(q.j)];
  }
  for (const auto& t : lin) s += t.coef * x[static_cast<std::size_t>(t.var)];
  return s;
}

double QuadConstraint::violation(std::span<const double> x) const {
  return std::max(0.0, lhs(x) - rhs);
}

double Objective::value(std::span<const double> x) const {
  double s = constant;
  for (const auto& q : quad) {
    s += q.coef * x[static_cast<std::size_t>(q.i)] * x[static_cast<std::size_t>(q.j)];
  }
  for (const auto& t : lin) s += t.coef * x[static_cast<std::size_t>(t.var)];
  return s;
}

int MixedIntegerModel::add_var(VarKind kind, double lo, double hi, VarTag tag) {
  if (index_.count(tag) != 0) {
    throw std::logic_error(fmt::format("duplicate variable {}", tag.name()));
  }
  const int id = static_cast<int>(vars.size());
  vars.push_back({kind, lo, hi, tag});
  index_.emplace(tag, id);
  return id;
}

int MixedIntegerModel::find(const VarTag& tag) const {
  auto it = index_.find(tag);
  return it == index_.end() ? -1 : it->second;
}

int MixedIntegerModel::require(const VarTag& tag) const {
  const int id = find(tag);
  if (id < 0) throw std::out_of_range(fmt::format("model has no variable {}", tag.name()));
  return id;
}

int MixedIntegerModel::num_binaries() const {
  return static_cast<int>(std::count_if(vars.begin(), vars.end(),
                                        [](const Variable& v) { return v.kind == VarKind::Binary; }));
}

int MixedIntegerModel::count(Meaning m) const {
  return static_cast<int>(std::count_if(vars.begin(), vars.end(),
                                        [m](const Variable& v) { return v.tag.meaning == m; }));
}

namespace {

double max_violation_over_bounds(const std::vector<Variable>& vars, const LinearConstraint& c) {
  double lo = 0.0;
  double hi = 0.0;
  for (const auto& t : c.terms) {
    const auto& v = vars[static_cast<std::size_t>(t.var)];
    lo += std::min(t.coef * v.lo, t.coef * v.hi);
    hi += std::max(t.coef * v.lo, t.coef * v.hi);
  }
  switch (c.sense) {
    case Sense::LessEqual: return std::max(0.0, hi - c.rhs);
    case Sense::GreaterEqual: return std::max(0.0, c.rhs - lo);
    case Sense::Equal: return std::max({0.0, hi - c.rhs, c.rhs - lo});
  }
  return 0.0;
}

}  // namespace

void MixedIntegerModel::compute_big_ms() {
  for (auto& ind : indicators) ind.big_m = max_violation_over_bounds(vars, ind.con);
}

double MixedIntegerModel::max_violation(std::span<const double> x) const {
  double worst = 0.0;
  for (std::size_t k = 0; k < vars.size(); ++k) {
    const auto& v = vars[k];
    worst = std::max({worst, v.lo - x[k], x[k] - v.hi});
    if (v.kind == VarKind::Binary) worst = std::max(worst, std::abs(x[k] - std::round(x[k])));
  }
  for (const auto& c : linear) worst = std::max(worst, c.violation(x));
  for (const auto& q : quad) worst = std::max(worst, q.violation(x));
  for (const auto& ind : indicators) {
    const double b = x[static_cast<std::size_t>(ind.binary)];
    if (std::abs(b - ind.active_value) < 0.5) worst = std::max(worst, ind.con.violation(x));
  }
  return worst;
}

namespace {

bool quad_form_psd(const std::vector<QuadEntry>& entries, std::size_t n) {
  if (entries.empty()) return true;
  std::vector<int> ids;
  for (const auto& e : entries) {
    ids.push_back(e.i);
    ids.push_back(e.j);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  (void)n;
  const auto k = static_cast<Eigen::Index>(ids.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(k, k);
  auto pos = [&](int v) {
    return static_cast<Eigen::Index>(std::lower_bound(ids.begin(), ids.end(), v) - ids.begin());
  };
  double scale = 0.0;
  for (const auto& e : entries) {
    const auto a = pos(e.i);
    const auto b = pos(e.j);
    if (a == b) {
      h(a, a) += e.coef;
    } else {
      h(a, b) += 0.5 * e.coef;
      h(b, a) += 0.5 * e.coef;
    }
    scale = std::max(scale, std::abs(e.coef));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  return es.eigenvalues().minCoeff() >= -1e-9 * std::max(1.0, scale);
}

}  // namespace

std::vector<std::string> MixedIntegerModel::lint() const {
  std::vector<std::string> problems;
  const int n = static_cast<int>(vars.size());
  auto check_ref = [&](int v, const std::string& where) {
    if (v < 0 || v >= n) problems.push_back(fmt::format("{} references unknown variable {}", where, v));
  };
  std::unordered_map<VarTag, int, VarTagHash> seen;
  for (int k = 0; k < n; ++k) {
    const auto& v = vars[static_cast<std::size_t>(k)];
    if (!seen.emplace(v.tag, k).second) problems.push_back("duplicate tag " + v.tag.name());
    if (v.kind == VarKind::Binary && (v.lo != 0.0 || v.hi != 1.0)) {
      problems.push_back("binary " + v.tag.name() + " must have bounds [0, 1]");
    }
    if (v.lo > v.hi) problems.push_back("empty bounds on " + v.tag.name());
  }
  for (const auto& c : linear) {
    for (const auto& t : c.terms) check_ref(t.var, "constraint " + c.name);
  }
  for (const auto& q : quad) {
    for (const auto& e : q.quad) {
      check_ref(e.i, "quadratic constraint " + q.name);
      check_ref(e.j, "quadratic constraint " + q.name);
    }
    for (const auto& t : q.lin) check_ref(t.var, "quadratic constraint " + q.name);
    if (!quad_form_psd(q.quad, vars.size())) problems.push_back("quadratic constraint " + q.name + " is not convex");
  }
  for (const auto& ind : indicators) {
    check_ref(ind.binary, "indicator " + ind.con.name);
    if (ind.binary >= 0 && ind.binary < n &&
        vars[static_cast<std::size_t>(ind.binary)].kind != VarKind::Binary) {
      problems.push_back("indicator " + ind.con.name + " is keyed on a continuous variable");
    }
    if (ind.active_value != 0 && ind.active_value != 1) {
      problems.push_back("indicator " + ind.con.name + " has active value outside {0, 1}");
    }
    for (const auto& t : ind.con.terms) check_ref(t.var, "indicator " + ind.con.name);
  }
  for (const auto& e : objective.quad) {
    check_ref(e.i, "objective");
    check_ref(e.j, "objective");
  }
  for (const auto& t : objective.lin) check_ref(t.var, "objective");
  if (!quad_form_psd(objective.quad, vars.size())) problems.push_back("objective is not convex");
  return problems;
}

std::array<MotionRow, 2> relative_motion(const AircraftState& a, const AircraftState& b) {
  const double ca = std::cos(a.heading);
  const double sa = std::sin(a.heading);
  const double cb = std::cos(b.heading);
  const double sb = std::sin(b.heading);
  MotionRow rx{a.speed * ca, -a.speed * sa, -b.speed * cb, b.speed * sb};
  MotionRow ry{a.speed * sa, a.speed * ca, -b.speed * sb, -b.speed * cb};
  return {rx, ry};
}

DeltaBounds delta_bounds(const ControlBounds& cb) {
  return {cb.q_lo * std::cos(cb.theta_abs_max()), cb.q_hi, cb.q_hi * std::sin(cb.theta_lo),
          cb.q_hi * std::sin(cb.theta_hi)};
}

double objective_term(double dx, double dy, double w) {
  return w * dy * dy + (1.0 - w) * (1.0 - dx) * (1.0 - dx);
}

Controls recover_controls(double dx, double dy) {
  const double q = std::hypot(dx, dy);
  if (q < 1e-12) throw DegenerateControl("control vector (dx, dy) is zero; heading undefined");
  return {q, std::atan2(dy, dx)};
}

namespace {

struct PairVars {
  int vx = -1;
  int vy = -1;
};

void add_controls(MixedIntegerModel& m, const Instance& inst, std::span<const ControlBounds> cb,
                  double w, bool relax_speed) {
  if (!(w > 0.0 && w < 1.0)) throw std::invalid_argument("preference weight w must lie in (0, 1)");
  if (cb.size() != inst.aircraft.size()) {
    throw std::invalid_argument("one ControlBounds entry is required per aircraft");
  }
  m.controls.assign(cb.begin(), cb.end());
  m.w = w;
  const int n = inst.size();
  for (int i = 0; i < n; ++i) {
    const auto& b = cb[static_cast<std::size_t>(i)];
    b.validate();
    const DeltaBounds db = delta_bounds(b);
    const int dx = m.add_var(VarKind::Continuous, db.dx_lo, db.dx_hi, {Meaning::DeltaX, i});
    const int dy = m.add_var(VarKind::Continuous, db.dy_lo, db.dy_hi, {Meaning::DeltaY, i});
    m.linear.push_back({{{dy, 1.0}, {dx, -std::tan(b.theta_lo)}},
                        Sense::GreaterEqual,
                        0.0,
                        fmt::format("heading_lo_{}", i)});
    m.linear.push_back({{{dy, 1.0}, {dx, -std::tan(b.theta_hi)}},
                        Sense::LessEqual,
                        0.0,
                        fmt::format("heading_hi_{}", i)});
    if (!relax_speed) {
      m.quad.push_back({{{dx, dx, 1.0}, {dy, dy, 1.0}}, {}, b.q_hi * b.q_hi,
                        fmt::format("speed_hi_{}", i)});
    }
    m.objective.quad.push_back({dx, dx, 1.0 - w});
    m.objective.quad.push_back({dy, dy, w});
    m.objective.lin.push_back({dx, -2.0 * (1.0 - w)});
    m.objective.constant += 1.0 - w;
  }
}

PairVars add_pair_motion(MixedIntegerModel& m, const Instance& inst, const PairGeometry& pg) {
  const int i = pg.i;
  const int j = pg.j;
  PairVars pv;
  pv.vx = m.add_var(VarKind::Continuous, pg.box.vx_lo, pg.box.vx_hi, {Meaning::Vx, i, j});
  pv.vy = m.add_var(VarKind::Continuous, pg.box.vy_lo, pg.box.vy_hi, {Meaning::Vy, i, j});
  const auto rows = relative_motion(inst.aircraft[static_cast<std::size_t>(i)],
                                    inst.aircraft[static_cast<std::size_t>(j)]);
  const int dxi = m.require({Meaning::DeltaX, i});
  const int dyi = m.require({Meaning::DeltaY, i});
  const int dxj = m.require({Meaning::DeltaX, j});
  const int dyj = m.require({Meaning::DeltaY, j});
  const int vars[2] = {pv.vx, pv.vy};
  const char* axis[2] = {"x", "y"};
  for (int k = 0; k < 2; ++k) {
    const auto& r = rows[static_cast<std::size_t>(k)];
    m.linear.push_back({{{vars[k], 1.0}, {dxi, -r.dxi}, {dyi, -r.dyi}, {dxj, -r.dxj}, {dyj, -r.dyj}},
                        Sense::Equal,
                        0.0,
                        fmt::format("motion_{}_{}_{}", axis[k], i, j)});
  }
  return pv;
}

// (ax, ay) . v  <sense>  0 with unit-norm coefficients.
LinearConstraint velocity_row(const PairVars& pv, double ax, double ay, Sense s, std::string name) {
  const double n = std::hypot(ax, ay);
  return {{{pv.vx, ax / n}, {pv.vy, ay / n}}, s, 0.0, std::move(name)};
}

// gamma vy - phi vx expressed as (ax, ay) = (-phi, gamma).
LinearConstraint line_row(const PairVars& pv, const LineCoeffs& l, Sense s, std::string name) {
  return velocity_row(pv, -l.phi, l.gamma, s, std::move(name));
}

}  // namespace

MixedIntegerModel build_2d_disjunctive(const Instance& inst, const Partition& part,
                                       std::span<const ControlBounds> cb, double w,
                                       bool relax_speed) {
  MixedIntegerModel m;
  m.formulation = relax_speed ? Formulation::MiqpRelax : Formulation::Disjunctive2D;
  m.separation = Separation::Disjunctive;
  add_controls(m, inst, cb, w, relax_speed);
  for (const auto& [i, j] : part.separable) {
    const PairGeometry& pg = part.pair(i, j);
    const PairVars pv = add_pair_motion(m, inst, pg);
    const int z = m.add_var(VarKind::Binary, 0.0, 1.0, {Meaning::Z, i, j});
    m.indicators.push_back({z, 1, line_row(pv, pg.n_line, Sense::LessEqual, fmt::format("normal_z1_{}_{}", i, j))});
    m.indicators.push_back({z, 1, line_row(pv, pg.lower, Sense::LessEqual, fmt::format("root_lo_{}_{}", i, j))});
    m.indicators.push_back({z, 0, line_row(pv, pg.n_line, Sense::GreaterEqual, fmt::format("normal_z0_{}_{}", i, j))});
    m.indicators.push_back({z, 0, line_row(pv, pg.upper, Sense::GreaterEqual, fmt::format("root_hi_{}_{}", i, j))});
  }
  m.compute_big_ms();
  return m;
}

ShadowAngles shadow_angles(const PairGeometry& pg) {
  const double beta = pg.cone_half_angle();
  const double closing = std::atan2(-pg.y, -pg.x);
  auto wrap = [](double a) {
    while (a > kPi) a -= 2 * kPi;
    while (a <= -kPi) a += 2 * kPi;
    return a;
  };
  return {wrap(closing + beta), wrap(closing - beta), beta};
}

ShadowSystem shadow_system(const PairGeometry& pg) {
  const ShadowAngles sa = shadow_angles(pg);
  const double dist = pg.distance();
  const double e1x = -pg.x / dist;
  const double e1y = -pg.y / dist;
  const double e2x = -e1y;
  const double e2y = e1x;
  const double lx = std::cos(sa.left);
  const double ly = std::sin(sa.left);
  const double rx = std::cos(sa.right);
  const double ry = std::sin(sa.right);
  ShadowSystem s;
  // 1: closing, passing left of the left tangent    (-u <= 0, -(l x v) <= 0)
  // 2: closing, passing right of the right tangent  (-u <= 0,  (r x v) <= 0)
  // 3: opening, w <= 0                              ( u <= 0,  w <= 0)
  // 4: opening, w >= 0                              ( u <= 0, -w <= 0)
  s.a[0] = {{{-e1x, -e1y}, {ly, -lx}}};
  s.a[1] = {{{-e1x, -e1y}, {-ry, rx}}};
  s.a[2] = {{{e1x, e1y}, {e2x, e2y}}};
  s.a[3] = {{{e1x, e1y}, {-e2x, -e2y}}};
  return s;
}

bool shadow_feasible(const PairGeometry& pg, double vx, double vy, double slack) {
  const ShadowSystem s = shadow_system(pg);
  for (const auto& sys : s.a) {
    bool ok = true;
    for (const auto& row : sys) {
      const double n = std::hypot(row[0], row[1]);
      if ((row[0] * vx + row[1] * vy) / n > slack) ok = false;
    }
    if (ok) return true;
  }
  return false;
}

MixedIntegerModel build_2d_shadow(const Instance& inst, const Partition& part,
                                  std::span<const ControlBounds> cb, double w,
                                  bool relax_speed) {
  MixedIntegerModel m;
  m.formulation = relax_speed ? Formulation::MiqpRelax : Formulation::Shadow2D;
  m.separation = Separation::Shadow;
  add_controls(m, inst, cb, w, relax_speed);
  for (const auto& [i, j] : part.separable) {
    const PairGeometry& pg = part.pair(i, j);
    const PairVars pv = add_pair_motion(m, inst, pg);
    const ShadowSystem s = shadow_system(pg);
    LinearConstraint choose{{}, Sense::GreaterEqual, 1.0, fmt::format("shadow_choice_{}_{}", i, j)};
    for (int k = 0; k < 4; ++k) {
      const int sigma = m.add_var(VarKind::Binary, 0.0, 1.0, {Meaning::Sigma, i, j, k + 1});
      choose.terms.push_back({sigma, 1.0});
      for (int r = 0; r < 2; ++r) {
        const auto& a = s.a[static_cast<std::size_t>(k)][static_cast<std::size_t>(r)];
        m.indicators.push_back(
            {sigma, 1, velocity_row(pv, a[0], a[1], Sense::LessEqual,
                                    fmt::format("shadow_{}_{}_{}_{}", i, j, k + 1, r))});
      }
    }
    m.linear.push_back(std::move(choose));
  }
  m.compute_big_ms();
  return m;
}

std::vector<std::pair<int, int>> fl_candidate_pairs(const Instance& inst, const Partition& part) {
  std::vector<std::pair<int, int>> out;
  for (std::size_t k = 0; k < part.all.size(); ++k) {
    if (part.classes[k] == PairClass::ConflictFree) continue;
    const auto [i, j] = part.all[k];
    const auto& zi = inst.aircraft[static_cast<std::size_t>(i)].fl_set;
    const auto& zj = inst.aircraft[static_cast<std::size_t>(j)].fl_set;
    const bool share = std::any_of(zi.begin(), zi.end(), [&](int l) {
      return std::find(zj.begin(), zj.end(), l) != zj.end();
    });
    if (share) out.emplace_back(i, j);
  }
  return out;
}

MixedIntegerModel build_2dfl_model(const Instance& inst, const Partition& part,
                                   std::span<const ControlBounds> cb, double w) {
  for (int i = 0; i < inst.size(); ++i) {
    if (!inst.aircraft[static_cast<std::size_t>(i)].has_fl()) {
      throw MissingFLData(fmt::format("aircraft {} has no flight-level data", i));
    }
  }
  MixedIntegerModel m;
  m.formulation = Formulation::Disjunctive2D;
  m.separation = Separation::Disjunctive;
  add_controls(m, inst, cb, w, false);
  // The 2D deviation is the secondary objective; the container carries the
  // primary (FL deviation) objective only.
  m.objective = {};

  for (int i = 0; i < inst.size(); ++i) {
    const auto& a = inst.aircraft[static_cast<std::size_t>(i)];
    const int base = *a.fl;
    double max_dev = 0.0;
    LinearConstraint assign{{}, Sense::Equal, 1.0, fmt::format("fl_assign_{}", i)};
    std::vector<Term> level;
    for (int k : a.fl_set) {
      const int r = m.add_var(VarKind::Binary, 0.0, 1.0, {Meaning::Rho, i, k});
      assign.terms.push_back({r, 1.0});
      level.push_back({r, static_cast<double>(k)});
      max_dev = std::max(max_dev, std::abs(static_cast<double>(k - base)));
    }
    m.linear.push_back(std::move(assign));
    const int drho = m.add_var(VarKind::Continuous, 0.0, max_dev, {Meaning::DRho, i});
    LinearConstraint up{{{drho, 1.0}}, Sense::GreaterEqual, -static_cast<double>(base), fmt::format("fl_dev_up_{}", i)};
    LinearConstraint down{{{drho, 1.0}}, Sense::GreaterEqual, static_cast<double>(base), fmt::format("fl_dev_down_{}", i)};
    for (const auto& t : level) {
      up.terms.push_back({t.var, -t.coef});
      down.terms.push_back({t.var, t.coef});
    }
    m.linear.push_back(std::move(up));
    m.linear.push_back(std::move(down));
    m.objective.lin.push_back({drho, 1.0});
  }

  for (const auto& [i, j] : fl_candidate_pairs(inst, part)) {
    const PairGeometry& pg = part.pair(i, j);
    const PairVars pv = add_pair_motion(m, inst, pg);
    const int z = m.add_var(VarKind::Binary, 0.0, 1.0, {Meaning::Z, i, j});
    const int phi = m.add_var(VarKind::Binary, 0.0, 1.0, {Meaning::Phi, i, j});
    const auto& zi = inst.aircraft[static_cast<std::size_t>(i)].fl_set;
    const auto& zj = inst.aircraft[static_cast<std::size_t>(j)].fl_set;
    for (int k : zi) {
      if (std::find(zj.begin(), zj.end(), k) == zj.end()) continue;
      m.linear.push_back({{{m.require({Meaning::Rho, i, k}), 1.0},
                           {m.require({Meaning::Rho, j, k}), 1.0},
                           {phi, -1.0}},
                          Sense::LessEqual,
                          1.0,
                          fmt::format("fl_share_{}_{}_{}", i, j, k)});
    }
    // Separation rows a.v <= 0 (after orienting), relaxed unless z and phi hold.
    struct Row {
      LinearConstraint con;
      int z_value;
    };
    std::vector<Row> rows;
    rows.push_back({line_row(pv, pg.n_line, Sense::LessEqual, fmt::format("normal_z1_{}_{}", i, j)), 1});
    rows.push_back({line_row(pv, pg.lower, Sense::LessEqual, fmt::format("root_lo_{}_{}", i, j)), 1});
    rows.push_back({line_row(pv, pg.n_line, Sense::GreaterEqual, fmt::format("normal_z0_{}_{}", i, j)), 0});
    rows.push_back({line_row(pv, pg.upper, Sense::GreaterEqual, fmt::format("root_hi_{}_{}", i, j)), 0});
    for (auto& r : rows) {
      if (r.con.sense == Sense::GreaterEqual) {
        for (auto& t : r.con.terms) t.coef = -t.coef;
        r.con.sense = Sense::LessEqual;
      }
      double big_m = 0.0;
      for (const auto& t : r.con.terms) {
        const auto& v = m.vars[static_cast<std::size_t>(t.var)];
        big_m += std::max(t.coef * v.lo, t.coef * v.hi);
      }
      big_m = std::max(big_m, 0.0);
      // z_value = 1:  a.v <= M(1 - z) + M(1 - phi)
      // z_value = 0:  a.v <= M z     + M(1 - phi)
      if (r.z_value == 1) {
        r.con.terms.push_back({z, big_m});
        r.con.rhs = 2.0 * big_m;
      } else {
        r.con.terms.push_back({z, -big_m});
        r.con.rhs = big_m;
      }
      r.con.terms.push_back({phi, big_m});
      r.con.name = "fl_" + r.con.name;
      m.linear.push_back(std::move(r.con));
    }
  }
  m.compute_big_ms();
  return m;
}

}  // namespace acrp
