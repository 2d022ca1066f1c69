#include <ostream>

#include <fmt/format.h>

#include "acrp/model.hpp"

namespace acrp {

namespace {

std::string linear_expr(const MixedIntegerModel& m, const std::vector<Term>& terms) {
  std::string s;
  for (const auto& t : terms) {
    const std::string name = m.vars[static_cast<std::size_t>(t.var)].tag.name();
    if (s.empty()) {
      s += fmt::format("{:.12g} {}", t.coef, name);
    } else {
      s += fmt::format(" {} {:.12g} {}", t.coef < 0 ? '-' : '+', std::abs(t.coef), name);
    }
  }
  return s.empty() ? "0" : s;
}

std::string quad_expr(const MixedIntegerModel& m, const std::vector<QuadEntry>& quad) {
  std::string s;
  for (const auto& q : quad) {
    const std::string a = m.vars[static_cast<std::size_t>(q.i)].tag.name();
    const std::string b = m.vars[static_cast<std::size_t>(q.j)].tag.name();
    const std::string mono = q.i == q.j ? a + " ^ 2" : a + " * " + b;
    s += fmt::format("{}{:.12g} {}", s.empty() ? "" : " + ", q.coef, mono);
  }
  return s;
}

const char* sense_str(Sense s) {
  switch (s) {
    case Sense::LessEqual: return "<=";
    case Sense::GreaterEqual: return ">=";
    case Sense::Equal: return "=";
  }
  return "?";
}

}  // namespace

void dump_lp(const MixedIntegerModel& m, std::ostream& out) {
  out << "\\ formulation: " << to_string(m.formulation) << "\n";
  out << "\\ separation: " << to_string(m.separation) << "\n";
  out << "Minimize\n obj: " << linear_expr(m, m.objective.lin);
  if (!m.objective.quad.empty()) out << " + [ " << quad_expr(m, m.objective.quad) << " ]";
  out << fmt::format(" + {:.12g}\n", m.objective.constant);
  out << "Subject To\n";
  for (const auto& c : m.linear) {
    out << fmt::format(" {}: {} {} {:.12g}\n", c.name, linear_expr(m, c.terms), sense_str(c.sense), c.rhs);
  }
  for (const auto& q : m.quad) {
    out << fmt::format(" {}: {}[ {} ] <= {:.12g}\n", q.name,
                       q.lin.empty() ? "" : linear_expr(m, q.lin) + " + ", quad_expr(m, q.quad), q.rhs);
  }
  for (const auto& ind : m.indicators) {
    out << fmt::format(" {}: {} = {} -> {} {} {:.12g}  \\ M = {:.12g}\n", ind.con.name,
                       m.vars[static_cast<std::size_t>(ind.binary)].tag.name(), ind.active_value,
                       linear_expr(m, ind.con.terms), sense_str(ind.con.sense), ind.con.rhs, ind.big_m);
  }
  out << "Bounds\n";
  for (const auto& v : m.vars) {
    if (v.kind == VarKind::Binary) continue;
    out << fmt::format(" {:.12g} <= {} <= {:.12g}\n", v.lo, v.tag.name(), v.hi);
  }
  out << "Binaries\n";
  for (const auto& v : m.vars) {
    if (v.kind == VarKind::Binary) out << " " << v.tag.name() << "\n";
  }
  out << "End\n";
}

}  // namespace acrp
