#include "acrp/bnb.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <unordered_map>

#include <fmt/format.h>

#include "acrp/events.hpp"

namespace acrp {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::TimeOut: return "timeout";
  }
  return "?";
}

double CompiledRow::lhs(std::span<const double> x) const {
  double s = 0.0;
  for (const auto& [c, a] : coefs) s += a * x[static_cast<std::size_t>(c)];
  return s;
}

double CompiledRow::scaled_violation(std::span<const double> x) const {
  double nrm = 0.0;
  for (const auto& [c, a] : coefs) nrm += a * a;
  nrm = std::sqrt(nrm);
  if (nrm == 0.0) nrm = 1.0;
  const double l = lhs(x);
  double v = 0.0;
  switch (sense) {
    case Sense::LessEqual: v = l - rhs; break;
    case Sense::GreaterEqual: v = rhs - l; break;
    case Sense::Equal: v = std::abs(l - rhs); break;
  }
  return std::max(0.0, v) / nrm;
}

double CompiledQuad::lhs(std::span<const double> x) const {
  double s = 0.0;
  for (const auto& [i, j, a] : quad) s += a * x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(j)];
  for (const auto& [c, a] : lin) s += a * x[static_cast<std::size_t>(c)];
  return s;
}

CompiledRow CompiledQuad::tangent(std::span<const double> x0) const {
  // g(x) = x'Qx + l'x;  g(x0) + grad(x0)'(x - x0) = grad'x - x0'Qx0.
  std::unordered_map<int, double> grad;
  double qx0 = 0.0;
  for (const auto& [i, j, a] : quad) {
    const double xi = x0[static_cast<std::size_t>(i)];
    const double xj = x0[static_cast<std::size_t>(j)];
    grad[i] += a * xj;
    grad[j] += a * xi;
    qx0 += a * xi * xj;
  }
  for (const auto& [c, a] : lin) grad[c] += a;
  CompiledRow row;
  row.sense = Sense::LessEqual;
  row.rhs = rhs + qx0;
  for (const auto& [c, a] : grad) {
    if (a != 0.0) row.coefs.emplace_back(c, a);
  }
  std::sort(row.coefs.begin(), row.coefs.end());
  return row;
}

std::vector<double> CompiledModel::expand(std::span<const double> cols,
                                          std::span<const int> literal) const {
  const auto& vars = model->vars;
  std::vector<double> x(vars.size(), 0.0);
  for (std::size_t v = 0; v < vars.size(); ++v) {
    if (col_of_var[v] >= 0) {
      x[v] = cols[static_cast<std::size_t>(col_of_var[v])];
    } else if (eliminated[v]) {
      double s = eliminated[v]->constant;
      for (const auto& [c, a] : eliminated[v]->terms) s += a * cols[static_cast<std::size_t>(c)];
      x[v] = s;
    } else if (!std::isnan(fixed_value[v])) {
      x[v] = fixed_value[v];
    }
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const int lit = g < literal.size() ? literal[g] : -1;
    if (lit < 0) continue;
    const auto& grp = groups[g];
    if (grp.kind == DisjunctionGroup::Kind::Toggle) {
      x[static_cast<std::size_t>(grp.binaries[0])] = lit;
    } else {
      x[static_cast<std::size_t>(grp.binaries[static_cast<std::size_t>(lit)])] = 1.0;
    }
  }
  return x;
}

namespace {

bool has_meaning(const std::vector<Meaning>& list, Meaning m) {
  return std::find(list.begin(), list.end(), m) != list.end();
}

}  // namespace

CompiledModel compile(const MixedIntegerModel& m, const CompileOptions& opts) {
  CompiledModel cm;
  cm.model = &m;
  const std::size_t nv = m.vars.size();
  std::vector<char> dropped(nv, 0);
  for (std::size_t v = 0; v < nv; ++v) dropped[v] = has_meaning(opts.drop_meanings, m.vars[v].tag.meaning);
  cm.fixed_value.assign(nv, std::nan(""));
  for (const auto& [v, val] : opts.fixed) cm.fixed_value[static_cast<std::size_t>(v)] = val;

  auto mentions_dropped = [&](const std::vector<Term>& terms) {
    return std::any_of(terms.begin(), terms.end(), [&](const Term& t) { return dropped[static_cast<std::size_t>(t.var)] != 0; });
  };

  std::vector<char> lin_live(m.linear.size(), 0);
  for (std::size_t k = 0; k < m.linear.size(); ++k) lin_live[k] = !mentions_dropped(m.linear[k].terms);
  std::vector<char> quad_live(m.quad.size(), 0);
  for (std::size_t k = 0; k < m.quad.size(); ++k) {
    bool dead = opts.drop_quadratic || mentions_dropped(m.quad[k].lin);
    for (const auto& e : m.quad[k].quad) {
      dead = dead || dropped[static_cast<std::size_t>(e.i)] || dropped[static_cast<std::size_t>(e.j)];
    }
    quad_live[k] = !dead;
  }
  std::vector<char> ind_live(m.indicators.size(), 0);
  for (std::size_t k = 0; k < m.indicators.size(); ++k) {
    ind_live[k] = !dropped[static_cast<std::size_t>(m.indicators[k].binary)] &&
                  !mentions_dropped(m.indicators[k].con.terms);
  }

  // Usage counts.
  std::vector<int> in_linear(nv, 0), in_eq(nv, 0), in_quad(nv, 0), in_obj(nv, 0), keyed(nv, 0);
  std::vector<char> keyed0(nv, 0);
  for (std::size_t k = 0; k < m.linear.size(); ++k) {
    if (!lin_live[k]) continue;
    for (const auto& t : m.linear[k].terms) {
      in_linear[static_cast<std::size_t>(t.var)] += 1;
      if (m.linear[k].sense == Sense::Equal) in_eq[static_cast<std::size_t>(t.var)] += 1;
    }
  }
  for (std::size_t k = 0; k < m.quad.size(); ++k) {
    if (!quad_live[k]) continue;
    for (const auto& e : m.quad[k].quad) {
      in_quad[static_cast<std::size_t>(e.i)] += 1;
      in_quad[static_cast<std::size_t>(e.j)] += 1;
    }
    for (const auto& t : m.quad[k].lin) in_quad[static_cast<std::size_t>(t.var)] += 1;
  }
  for (const auto& e : m.objective.quad) {
    in_obj[static_cast<std::size_t>(e.i)] += 1;
    in_obj[static_cast<std::size_t>(e.j)] += 1;
  }
  for (const auto& t : m.objective.lin) in_obj[static_cast<std::size_t>(t.var)] += 1;
  for (std::size_t k = 0; k < m.indicators.size(); ++k) {
    if (!ind_live[k]) continue;
    const auto b = static_cast<std::size_t>(m.indicators[k].binary);
    keyed[b] += 1;
    if (m.indicators[k].active_value == 0) keyed0[b] = 1;
  }
  auto is_free_binary = [&](std::size_t v) {
    return !dropped[v] && m.vars[v].kind == VarKind::Binary && std::isnan(cm.fixed_value[v]);
  };

  // Disjunction groups: choices first, then toggles.
  cm.group_of_var.assign(nv, -1);
  std::vector<char> choice_row(m.linear.size(), 0);
  for (std::size_t k = 0; k < m.linear.size(); ++k) {
    if (!lin_live[k]) continue;
    const auto& c = m.linear[k];
    if (c.rhs != 1.0 || c.sense == Sense::LessEqual || c.terms.size() < 2) continue;
    bool ok = true;
    for (const auto& t : c.terms) {
      const auto v = static_cast<std::size_t>(t.var);
      ok = ok && t.coef == 1.0 && is_free_binary(v) && in_linear[v] == 1 && in_quad[v] == 0 &&
           in_obj[v] == 0 && !keyed0[v] && cm.group_of_var[v] < 0;
    }
    if (!ok) continue;
    DisjunctionGroup g;
    g.kind = DisjunctionGroup::Kind::Choice;
    for (const auto& t : c.terms) {
      g.binaries.push_back(t.var);
      cm.group_of_var[static_cast<std::size_t>(t.var)] = static_cast<int>(cm.groups.size());
    }
    g.literals.resize(g.binaries.size());
    cm.groups.push_back(std::move(g));
    choice_row[k] = 1;
  }
  for (std::size_t v = 0; v < nv; ++v) {
    if (!is_free_binary(v) || cm.group_of_var[v] >= 0) continue;
    if (keyed[v] == 0 || in_linear[v] != 0 || in_quad[v] != 0 || in_obj[v] != 0) continue;
    DisjunctionGroup g;
    g.kind = DisjunctionGroup::Kind::Toggle;
    g.binaries.push_back(static_cast<int>(v));
    g.literals.resize(2);
    cm.group_of_var[v] = static_cast<int>(cm.groups.size());
    cm.groups.push_back(std::move(g));
  }

  // Substitution of continuous variables defined by one equality row.
  cm.eliminated.assign(nv, std::nullopt);
  std::vector<char> candidate(nv, 0);
  for (std::size_t v = 0; v < nv; ++v) {
    candidate[v] = !dropped[v] && m.vars[v].kind == VarKind::Continuous && in_obj[v] == 0 &&
                   in_quad[v] == 0 && in_eq[v] == 1;
  }
  std::vector<char> eq_used(m.linear.size(), 0);
  std::vector<int> elim_row(nv, -1);
  for (std::size_t k = 0; k < m.linear.size(); ++k) {
    const auto& c = m.linear[k];
    if (!lin_live[k] || c.sense != Sense::Equal || choice_row[k]) continue;
    int pick = -1;
    int n_cand = 0;
    for (const auto& t : c.terms) {
      if (candidate[static_cast<std::size_t>(t.var)]) {
        ++n_cand;
        pick = t.var;
      }
    }
    if (n_cand != 1) continue;
    bool ok = true;
    for (const auto& t : c.terms) {
      if (t.var == pick) ok = ok && std::abs(t.coef) > 1e-12;
      else ok = ok && cm.group_of_var[static_cast<std::size_t>(t.var)] < 0;
    }
    if (!ok) continue;
    eq_used[k] = 1;
    elim_row[static_cast<std::size_t>(pick)] = static_cast<int>(k);
  }

  // Columns.
  cm.col_of_var.assign(nv, -1);
  for (std::size_t v = 0; v < nv; ++v) {
    if (dropped[v] || elim_row[v] >= 0 || cm.group_of_var[v] >= 0 || !std::isnan(cm.fixed_value[v])) continue;
    cm.col_of_var[v] = cm.num_cols++;
    cm.var_of_col.push_back(static_cast<int>(v));
    cm.col_is_binary.push_back(m.vars[v].kind == VarKind::Binary);
    cm.col_lo.push_back(m.vars[v].lo);
    cm.col_hi.push_back(m.vars[v].hi);
  }
  // Affine forms of eliminated variables (rows reference only columns or fixed values).
  for (std::size_t v = 0; v < nv; ++v) {
    if (elim_row[v] < 0) continue;
    const auto& c = m.linear[static_cast<std::size_t>(elim_row[v])];
    double a_v = 0.0;
    for (const auto& t : c.terms) {
      if (static_cast<std::size_t>(t.var) == v) a_v += t.coef;
    }
    Affine aff;
    aff.constant = c.rhs / a_v;
    for (const auto& t : c.terms) {
      const auto u = static_cast<std::size_t>(t.var);
      if (u == v) continue;
      if (cm.col_of_var[u] >= 0) {
        aff.terms.emplace_back(cm.col_of_var[u], -t.coef / a_v);
      } else if (!std::isnan(cm.fixed_value[u])) {
        aff.constant -= t.coef * cm.fixed_value[u] / a_v;
      } else {
        throw std::logic_error("substitution chain in model compilation");
      }
    }
    cm.eliminated[v] = std::move(aff);
  }

  // Translate a linear constraint into a row over columns.
  auto translate = [&](const LinearConstraint& c) {
    std::unordered_map<int, double> acc;
    CompiledRow row;
    row.sense = c.sense;
    row.rhs = c.rhs;
    for (const auto& t : c.terms) {
      const auto v = static_cast<std::size_t>(t.var);
      if (cm.col_of_var[v] >= 0) {
        acc[cm.col_of_var[v]] += t.coef;
      } else if (cm.eliminated[v]) {
        row.rhs -= t.coef * cm.eliminated[v]->constant;
        for (const auto& [col, a] : cm.eliminated[v]->terms) acc[col] += t.coef * a;
      } else if (!std::isnan(cm.fixed_value[v])) {
        row.rhs -= t.coef * cm.fixed_value[v];
      } else {
        throw std::logic_error(fmt::format("constraint {} mixes a disjunction binary with other terms", c.name));
      }
    }
    for (const auto& [col, a] : acc) {
      if (a != 0.0) row.coefs.emplace_back(col, a);
    }
    std::sort(row.coefs.begin(), row.coefs.end());
    return row;
  };
  auto row_range = [&](const CompiledRow& r) {
    double lo = 0.0;
    double hi = 0.0;
    for (const auto& [col, a] : r.coefs) {
      lo += std::min(a * cm.col_lo[static_cast<std::size_t>(col)], a * cm.col_hi[static_cast<std::size_t>(col)]);
      hi += std::max(a * cm.col_lo[static_cast<std::size_t>(col)], a * cm.col_hi[static_cast<std::size_t>(col)]);
    }
    return std::pair{lo, hi};
  };

  for (std::size_t k = 0; k < m.linear.size(); ++k) {
    if (!lin_live[k] || eq_used[k] || choice_row[k]) continue;
    CompiledRow r = translate(m.linear[k]);
    if (r.coefs.empty()) {
      // Constant row: keep it only if violated, as an infeasibility marker.
      const double v = r.scaled_violation(std::span<const double>{});
      if (v <= 1e-12) continue;
    }
    cm.rows.push_back(std::move(r));
  }
  // Bounds of eliminated variables.
  for (std::size_t v = 0; v < nv; ++v) {
    if (!cm.eliminated[v]) continue;
    LinearConstraint c{{{static_cast<int>(v), 1.0}}, Sense::GreaterEqual, m.vars[v].lo, ""};
    if (std::isfinite(m.vars[v].lo)) cm.rows.push_back(translate(c));
    c.sense = Sense::LessEqual;
    c.rhs = m.vars[v].hi;
    if (std::isfinite(m.vars[v].hi)) cm.rows.push_back(translate(c));
  }
  // Indicators.
  for (std::size_t k = 0; k < m.indicators.size(); ++k) {
    if (!ind_live[k]) continue;
    const auto& ind = m.indicators[k];
    const auto b = static_cast<std::size_t>(ind.binary);
    if (!std::isnan(cm.fixed_value[b])) {
      if (static_cast<int>(cm.fixed_value[b]) == ind.active_value) cm.rows.push_back(translate(ind.con));
      continue;
    }
    if (cm.group_of_var[b] >= 0) {
      auto& g = cm.groups[static_cast<std::size_t>(cm.group_of_var[b])];
      std::size_t lit = 0;
      if (g.kind == DisjunctionGroup::Kind::Toggle) {
        lit = static_cast<std::size_t>(ind.active_value);
      } else {
        lit = static_cast<std::size_t>(std::find(g.binaries.begin(), g.binaries.end(), ind.binary) - g.binaries.begin());
      }
      g.literals[lit].push_back(translate(ind.con));
      continue;
    }
    // General binary column: big-M rows.
    const int ycol = cm.col_of_var[b];
    CompiledRow base = translate(ind.con);
    std::vector<CompiledRow> parts;
    if (base.sense == Sense::Equal) {
      CompiledRow le = base;
      le.sense = Sense::LessEqual;
      CompiledRow ge = base;
      ge.sense = Sense::GreaterEqual;
      parts = {le, ge};
    } else {
      parts = {base};
    }
    for (auto& r : parts) {
      if (r.sense == Sense::GreaterEqual) {
        for (auto& [col, a] : r.coefs) a = -a;
        r.rhs = -r.rhs;
        r.sense = Sense::LessEqual;
      }
      const double big_m = std::max(0.0, row_range(r).second - r.rhs);
      // active 1:  a.x <= b + M (1 - y);  active 0:  a.x <= b + M y
      if (ind.active_value == 1) {
        r.coefs.emplace_back(ycol, big_m);
        r.rhs += big_m;
      } else {
        r.coefs.emplace_back(ycol, -big_m);
      }
      cm.rows.push_back(std::move(r));
    }
  }
  // Quadratic constraints.
  for (std::size_t k = 0; k < m.quad.size(); ++k) {
    if (!quad_live[k]) continue;
    const auto& q = m.quad[k];
    CompiledQuad cq;
    cq.rhs = q.rhs;
    auto col = [&](int v) {
      const int c = cm.col_of_var[static_cast<std::size_t>(v)];
      if (c < 0) throw std::logic_error("quadratic constraint references a non-column variable");
      return c;
    };
    for (const auto& e : q.quad) cq.quad.emplace_back(col(e.i), col(e.j), e.coef);
    for (const auto& t : q.lin) cq.lin.emplace_back(col(t.var), t.coef);
    cm.quads.push_back(std::move(cq));
  }
  // Objective.
  cm.H = Eigen::MatrixXd::Zero(cm.num_cols, cm.num_cols);
  cm.c = Eigen::VectorXd::Zero(cm.num_cols);
  cm.constant = m.objective.constant;
  for (const auto& e : m.objective.quad) {
    const int a = cm.col_of_var[static_cast<std::size_t>(e.i)];
    const int b = cm.col_of_var[static_cast<std::size_t>(e.j)];
    const double fa = cm.fixed_value[static_cast<std::size_t>(e.i)];
    const double fb = cm.fixed_value[static_cast<std::size_t>(e.j)];
    if ((a < 0 && std::isnan(fa)) || (b < 0 && std::isnan(fb))) {
      throw std::logic_error("objective references a non-column variable");
    }
    if (a < 0 && b < 0) {
      cm.constant += e.coef * fa * fb;
    } else if (a < 0) {
      cm.c(b) += e.coef * fa;
    } else if (b < 0) {
      cm.c(a) += e.coef * fb;
    } else if (a == b) {
      cm.H(a, a) += 2.0 * e.coef;
    } else {
      cm.H(a, b) += e.coef;
      cm.H(b, a) += e.coef;
    }
  }
  for (const auto& t : m.objective.lin) {
    const auto v = static_cast<std::size_t>(t.var);
    if (cm.col_of_var[v] >= 0) {
      cm.c(cm.col_of_var[v]) += t.coef;
    } else if (!std::isnan(cm.fixed_value[v])) {
      cm.constant += t.coef * cm.fixed_value[v];
    } else {
      throw std::logic_error("objective references a non-column variable");
    }
  }
  return cm;
}

QpProblem make_qp(const CompiledModel& cm, std::span<const CompiledRow> extra,
                  std::span<const double> lo, std::span<const double> hi) {
  const Eigen::Index n = cm.num_cols;
  QpProblem qp = QpProblem::with_size(n);
  qp.H = cm.H;
  qp.c = cm.c;
  qp.constant = cm.constant;
  int n_eq = 0;
  int n_ge = 0;
  auto count = [&](const CompiledRow& r) { (r.sense == Sense::Equal ? n_eq : n_ge) += 1; };
  for (const auto& r : cm.rows) count(r);
  for (const auto& r : extra) count(r);
  qp.A_eq = Eigen::MatrixXd::Zero(n_eq, n);
  qp.b_eq = Eigen::VectorXd::Zero(n_eq);
  qp.A_ge = Eigen::MatrixXd::Zero(n_ge, n);
  qp.b_ge = Eigen::VectorXd::Zero(n_ge);
  int ie = 0;
  int ig = 0;
  auto put = [&](const CompiledRow& r) {
    if (r.sense == Sense::Equal) {
      for (const auto& [c, a] : r.coefs) qp.A_eq(ie, c) += a;
      qp.b_eq(ie++) = r.rhs;
    } else {
      const double s = r.sense == Sense::GreaterEqual ? 1.0 : -1.0;
      for (const auto& [c, a] : r.coefs) qp.A_ge(ig, c) += s * a;
      qp.b_ge(ig++) = s * r.rhs;
    }
  };
  for (const auto& r : cm.rows) put(r);
  for (const auto& r : extra) put(r);
  for (Eigen::Index k = 0; k < n; ++k) {
    qp.lo(k) = lo[static_cast<std::size_t>(k)];
    qp.hi(k) = hi[static_cast<std::size_t>(k)];
  }
  return qp;
}

double BnbResult::gap() const {
  if (!has_incumbent()) return std::numeric_limits<double>::infinity();
  if (ub <= 0.0) return std::max(0.0, ub - lb);
  return std::max(0.0, (ub - lb) / ub);
}

namespace {

struct Node {
  double lb = -std::numeric_limits<double>::infinity();
  std::int64_t seq = 0;
  int depth = 0;
  std::vector<int> literal;
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<int> warm;
  std::vector<int> cuts;  ///< pool cuts handed down from the parent
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.lb != b.lb) return a.lb > b.lb;
    return a.seq > b.seq;
  }
};

}  // namespace

BnbResult branch_and_bound(const MixedIntegerModel& m, const BnbOptions& opts) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - t0).count(); };

  const CompiledModel cm = compile(m, opts.compile);
  const auto ng = cm.groups.size();
  BnbResult res;
  std::vector<CompiledRow> cut_pool;

  double ub = opts.cutoff;
  bool have_incumbent = false;
  std::vector<int> best_literal;
  std::vector<double> best_cols;
  double pruned_lb = std::numeric_limits<double>::infinity();
  bool limit_hit = false;

  auto prune_level = [&]() { return ub - std::max(opts.abs_gap, opts.eps * std::abs(ub)); };

  std::vector<Node> stack;
  std::priority_queue<Node, std::vector<Node>, NodeOrder> heap;
  std::int64_t seq = 0;
  {
    Node root;
    root.literal.assign(ng, -1);
    root.lo = cm.col_lo;
    root.hi = cm.col_hi;
    root.seq = seq++;
    stack.push_back(std::move(root));
  }
  if (opts.events) opts.events->write("bnb_start", opts.label, {{"columns", cm.num_cols}, {"groups", static_cast<double>(ng)}, {"rows", static_cast<double>(cm.rows.size())}});

  std::vector<CompiledRow> extra;
  while (!stack.empty() || !heap.empty()) {
    if (elapsed() > opts.time_limit || (opts.node_limit >= 0 && res.nodes >= opts.node_limit)) {
      limit_hit = true;
      break;
    }
    Node node;
    if (!stack.empty()) {
      node = std::move(stack.back());
      stack.pop_back();
    } else {
      node = heap.top();
      heap.pop();
    }
    if (have_incumbent && node.lb >= prune_level()) {
      pruned_lb = std::min(pruned_lb, node.lb);
      continue;
    }
    ++res.nodes;

    extra.clear();
    for (std::size_t g = 0; g < ng; ++g) {
      if (node.literal[g] < 0) continue;
      const auto& rows = cm.groups[g].literals[static_cast<std::size_t>(node.literal[g])];
      extra.insert(extra.end(), rows.begin(), rows.end());
    }
    const std::size_t n_fixed_rows = extra.size();

    QpResult qr;
    bool infeasible = false;
    std::vector<int> sel = node.cuts;
    std::vector<char> in_sel(cut_pool.size(), 0);
    for (int id : sel) in_sel[static_cast<std::size_t>(id)] = 1;
    for (int round = 0; round <= opts.max_cut_rounds; ++round) {
      extra.resize(n_fixed_rows);
      for (int id : sel) extra.push_back(cut_pool[static_cast<std::size_t>(id)]);
      QpOptions qo;
      qo.warm_active = node.warm;
      qr = solve_qp(make_qp(cm, extra, node.lo, node.hi), qo);
      if (qr.status != QpStatus::Optimal) {
        infeasible = true;
        break;
      }
      const std::span<const double> x(qr.x.data(), static_cast<std::size_t>(qr.x.size()));
      // Pool cuts first, fresh tangents only when the pool has nothing to add.
      bool added = false;
      for (std::size_t id = 0; id < cut_pool.size(); ++id) {
        if (!in_sel[id] && cut_pool[id].scaled_violation(x) > opts.feasibility_tol) {
          sel.push_back(static_cast<int>(id));
          in_sel[id] = 1;
          added = true;
        }
      }
      if (added) continue;
      for (const auto& q : cm.quads) {
        if (q.lhs(x) - q.rhs > opts.quad_tol * (1.0 + std::abs(q.rhs))) {
          cut_pool.push_back(q.tangent(x));
          sel.push_back(static_cast<int>(cut_pool.size()) - 1);
          in_sel.push_back(1);
          ++res.cuts;
          added = true;
        }
      }
      if (!added) break;
    }
    if (infeasible) continue;
    const double obj = qr.objective;
    if (obj >= prune_level()) {
      pruned_lb = std::min(pruned_lb, obj);
      continue;
    }
    const std::span<const double> x(qr.x.data(), static_cast<std::size_t>(qr.x.size()));
    std::vector<int> tight_cuts;
    for (int id : sel) {
      const auto& cut = cut_pool[static_cast<std::size_t>(id)];
      if (cut.rhs - cut.lhs(x) <= 1e-7 * (1.0 + std::abs(cut.rhs))) tight_cuts.push_back(id);
    }

    // Which unfixed groups are already satisfied?
    std::vector<int> implied = node.literal;
    int branch_group = -1;
    double branch_score = -1.0;
    std::vector<double> branch_viol;
    for (std::size_t g = 0; g < ng; ++g) {
      if (node.literal[g] >= 0) continue;
      const auto& grp = cm.groups[g];
      std::vector<double> viol(grp.literals.size(), 0.0);
      int sat = -1;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t l = 0; l < grp.literals.size(); ++l) {
        for (const auto& r : grp.literals[l]) viol[l] = std::max(viol[l], r.scaled_violation(x));
        if (viol[l] <= opts.feasibility_tol && sat < 0) sat = static_cast<int>(l);
        best = std::min(best, viol[l]);
      }
      if (sat >= 0) {
        implied[g] = sat;
        continue;
      }
      if (best > branch_score) {
        branch_score = best;
        branch_group = static_cast<int>(g);
        branch_viol = std::move(viol);
      }
    }
    int branch_col = -1;
    if (branch_group < 0) {
      double frac_best = opts.integrality_tol;
      for (int c = 0; c < cm.num_cols; ++c) {
        if (!cm.col_is_binary[static_cast<std::size_t>(c)]) continue;
        const double v = x[static_cast<std::size_t>(c)];
        const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
        if (frac > frac_best) {
          frac_best = frac;
          branch_col = c;
        }
      }
    }

    if (branch_group < 0 && branch_col < 0) {
      if (obj < ub) {
        ub = obj;
        have_incumbent = true;
        best_literal = implied;
        best_cols.assign(x.begin(), x.end());
        for (int c = 0; c < cm.num_cols; ++c) {
          if (cm.col_is_binary[static_cast<std::size_t>(c)]) {
            best_cols[static_cast<std::size_t>(c)] = std::round(best_cols[static_cast<std::size_t>(c)]);
          }
        }
        if (opts.events) opts.events->write("incumbent", opts.label, {{"objective", ub}, {"nodes", static_cast<double>(res.nodes)}, {"seconds", elapsed()}});
        // Leave the plunge: remaining work is best-first.
        for (auto& s : stack) heap.push(std::move(s));
        stack.clear();
      }
      continue;
    }

    std::vector<Node> children;
    if (branch_group >= 0) {
      const auto& grp = cm.groups[static_cast<std::size_t>(branch_group)];
      std::vector<int> order(grp.literals.size());
      for (std::size_t l = 0; l < order.size(); ++l) order[l] = static_cast<int>(l);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return branch_viol[static_cast<std::size_t>(a)] < branch_viol[static_cast<std::size_t>(b)];
      });
      for (int l : order) {
        Node ch;
        ch.lb = obj;
        ch.depth = node.depth + 1;
        ch.literal = node.literal;
        ch.literal[static_cast<std::size_t>(branch_group)] = l;
        ch.lo = node.lo;
        ch.hi = node.hi;
        ch.warm = qr.active_ge;
        ch.cuts = tight_cuts;
        children.push_back(std::move(ch));
      }
    } else {
      const double v = x[static_cast<std::size_t>(branch_col)];
      const int first = v >= 0.5 ? 1 : 0;
      for (int val : {first, 1 - first}) {
        Node ch;
        ch.lb = obj;
        ch.depth = node.depth + 1;
        ch.literal = node.literal;
        ch.lo = node.lo;
        ch.hi = node.hi;
        ch.lo[static_cast<std::size_t>(branch_col)] = val;
        ch.hi[static_cast<std::size_t>(branch_col)] = val;
        ch.warm = qr.active_ge;
        ch.cuts = tight_cuts;
        children.push_back(std::move(ch));
      }
    }
    if (!have_incumbent) {
      for (auto it = children.rbegin(); it != children.rend(); ++it) {
        it->seq = seq++;
        stack.push_back(std::move(*it));
      }
    } else {
      for (auto& ch : children) {
        ch.seq = seq++;
        heap.push(std::move(ch));
      }
    }
    if (opts.events && res.nodes % 1000 == 0) {
      opts.events->write("progress", opts.label, {{"nodes", static_cast<double>(res.nodes)}, {"ub", ub}, {"open", static_cast<double>(stack.size() + heap.size())}, {"seconds", elapsed()}});
    }
  }

  double open_lb = std::numeric_limits<double>::infinity();
  for (const auto& s : stack) open_lb = std::min(open_lb, s.lb);
  if (!heap.empty()) open_lb = std::min(open_lb, heap.top().lb);

  res.seconds = elapsed();
  res.ub = have_incumbent ? ub : std::numeric_limits<double>::infinity();
  const double lb_all = std::min({pruned_lb, open_lb, ub});
  res.lb = std::isfinite(lb_all) ? lb_all : res.lb;
  if (!limit_hit && !have_incumbent && !std::isfinite(opts.cutoff)) res.lb = std::numeric_limits<double>::infinity();
  if (have_incumbent) {
    res.x = cm.expand(best_cols, best_literal);
    res.lb = std::min(res.lb, res.ub);
    res.status = limit_hit ? SolveStatus::TimeOut : SolveStatus::Optimal;
    if (limit_hit && res.gap() <= opts.eps) res.status = SolveStatus::Optimal;
  } else {
    res.status = limit_hit ? SolveStatus::TimeOut : SolveStatus::Infeasible;
  }
  if (opts.events) {
    opts.events->write("bnb_end", opts.label, {{"lb", res.lb}, {"ub", res.ub}, {"nodes", static_cast<double>(res.nodes)}, {"cuts", res.cuts}, {"seconds", res.seconds}});
  }
  return res;
}

}  // namespace acrp
