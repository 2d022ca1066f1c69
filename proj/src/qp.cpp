#include "acrp/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace acrp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();

}  // namespace

QpProblem QpProblem::with_size(Eigen::Index n) {
  QpProblem qp;
  qp.H = Eigen::MatrixXd::Zero(n, n);
  qp.c = Eigen::VectorXd::Zero(n);
  qp.A_eq.resize(0, n);
  qp.b_eq.resize(0);
  qp.A_ge.resize(0, n);
  qp.b_ge.resize(0);
  qp.lo = Eigen::VectorXd::Constant(n, -kInf);
  qp.hi = Eigen::VectorXd::Constant(n, kInf);
  return qp;
}

double QpProblem::objective(const Eigen::VectorXd& x) const {
  return 0.5 * x.dot(H * x) + c.dot(x) + constant;
}

const char* to_string(QpStatus s) {
  switch (s) {
    case QpStatus::Optimal: return "optimal";
    case QpStatus::Infeasible: return "infeasible";
    case QpStatus::MaxIterations: return "max-iterations";
  }
  return "?";
}

namespace {

// Constraint kinds after assembly; all rows are stored as n'x >= b with |n| = 1.
enum class RowKind { Eq, Ge, Lo, Hi };

struct Rows {
  Eigen::MatrixXd N;  // n x m, one column per row
  Eigen::VectorXd b;
  std::vector<RowKind> kind;
  std::vector<int> source;   // index into A_eq / A_ge / variable
  std::vector<double> scale; // original row norm
  int p = 0;                 // number of equality rows (first p columns)
};

struct GiState {
  Eigen::MatrixXd J;
  Eigen::MatrixXd R;
  Eigen::VectorXd x;
  Eigen::VectorXd u;
  std::vector<int> A;
  int iq = 0;
  double f = 0.0;
  double r_norm = 1.0;
};

struct GiResult {
  QpStatus status = QpStatus::MaxIterations;
  Eigen::VectorXd x;
  std::vector<int> active;
  Eigen::VectorXd u;
  int witness = -1;
  int iterations = 0;
};

// Append d (already rotated) as a new column of R, rotating J so that the
// trailing part of d vanishes. Returns false when the new normal is linearly
// dependent on the active ones.
bool add_constraint(GiState& s, Eigen::VectorXd& d) {
  const auto n = s.J.rows();
  for (Eigen::Index j = n - 1; j >= s.iq + 1; --j) {
    double cc = d(j - 1);
    double ss = d(j);
    const double h = std::hypot(cc, ss);
    if (h == 0.0) continue;
    d(j) = 0.0;
    ss /= h;
    cc /= h;
    if (cc < 0.0) {
      cc = -cc;
      ss = -ss;
      d(j - 1) = -h;
    } else {
      d(j - 1) = h;
    }
    const double xny = ss / (1.0 + cc);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double t1 = s.J(k, j - 1);
      const double t2 = s.J(k, j);
      s.J(k, j - 1) = t1 * cc + t2 * ss;
      s.J(k, j) = xny * (t1 + s.J(k, j - 1)) - t2;
    }
  }
  s.iq += 1;
  for (int i = 0; i < s.iq; ++i) s.R(i, s.iq - 1) = d(i);
  if (std::abs(d(s.iq - 1)) <= kEps * s.r_norm) return false;
  s.r_norm = std::max(s.r_norm, std::abs(d(s.iq - 1)));
  return true;
}

// Remove the active constraint at position `pos` and restore R to upper
// triangular form. u and A entries beyond iq (the constraint being added)
// shift down with the rest.
void delete_constraint(GiState& s, int pos) {
  const auto n = s.J.rows();
  for (int i = pos; i < s.iq - 1; ++i) {
    s.A[static_cast<std::size_t>(i)] = s.A[static_cast<std::size_t>(i + 1)];
    s.u(i) = s.u(i + 1);
    s.R.col(i) = s.R.col(i + 1);
  }
  s.A[static_cast<std::size_t>(s.iq - 1)] = s.A[static_cast<std::size_t>(s.iq)];
  s.u(s.iq - 1) = s.u(s.iq);
  s.A[static_cast<std::size_t>(s.iq)] = -1;
  s.u(s.iq) = 0.0;
  s.R.col(s.iq - 1).setZero();
  s.iq -= 1;
  if (s.iq == 0) return;
  for (int j = pos; j < s.iq; ++j) {
    double cc = s.R(j, j);
    double ss = s.R(j + 1, j);
    const double h = std::hypot(cc, ss);
    if (h == 0.0) continue;
    cc /= h;
    ss /= h;
    s.R(j + 1, j) = 0.0;
    if (cc < 0.0) {
      s.R(j, j) = -h;
      cc = -cc;
      ss = -ss;
    } else {
      s.R(j, j) = h;
    }
    const double xny = ss / (1.0 + cc);
    for (int k = j + 1; k < s.iq; ++k) {
      const double t1 = s.R(j, k);
      const double t2 = s.R(j + 1, k);
      s.R(j, k) = t1 * cc + t2 * ss;
      s.R(j + 1, k) = xny * (t1 + s.R(j, k)) - t2;
    }
    for (Eigen::Index k = 0; k < n; ++k) {
      const double t1 = s.J(k, j);
      const double t2 = s.J(k, j + 1);
      s.J(k, j) = t1 * cc + t2 * ss;
      s.J(k, j + 1) = xny * (s.J(k, j) + t1) - t2;
    }
  }
}

GiResult goldfarb_idnani(const Eigen::MatrixXd& G, const Eigen::VectorXd& g0, const Rows& rows,
                         const std::vector<char>& prefer, const QpOptions& opts) {
  const auto n = G.rows();
  const auto m = static_cast<int>(rows.N.cols());
  GiResult res;

  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success) throw std::runtime_error("QP Hessian is not positive definite");

  GiState s;
  const Eigen::MatrixXd L = llt.matrixL();
  s.J = L.transpose().triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(n, n));
  s.R = Eigen::MatrixXd::Zero(n, n);
  s.x = -llt.solve(g0);
  s.f = 0.5 * g0.dot(s.x);
  s.u = Eigen::VectorXd::Zero(n + 1);
  s.A.assign(static_cast<std::size_t>(n + 1), -1);

  Eigen::VectorXd d(n), z(n), r(n + 1);
  auto compute_step = [&](const Eigen::VectorXd& np) {
    d.noalias() = s.J.transpose() * np;
    if (s.iq < n) {
      z.noalias() = s.J.rightCols(n - s.iq) * d.tail(n - s.iq);
    } else {
      z.setZero();
    }
    if (s.iq > 0) {
      r.head(s.iq) = s.R.topLeftCorner(s.iq, s.iq).triangularView<Eigen::Upper>().solve(d.head(s.iq));
    }
  };

  for (int i = 0; i < rows.p; ++i) {
    const Eigen::VectorXd np = rows.N.col(i);
    compute_step(np);
    double t2 = 0.0;
    const double znp = z.dot(np);
    if (z.squaredNorm() > kEps) t2 = (rows.b(i) - np.dot(s.x)) / znp;
    s.x += t2 * z;
    s.u(s.iq) = t2;
    if (s.iq > 0) s.u.head(s.iq) -= t2 * r.head(s.iq);
    s.f += 0.5 * t2 * t2 * znp;
    s.A[static_cast<std::size_t>(s.iq)] = i;
    if (!add_constraint(s, d)) {
      // Dependent equality: consistent rows are redundant, others infeasible.
      delete_constraint(s, s.iq - 1);
      if (std::abs(np.dot(s.x) - rows.b(i)) > opts.feasibility_tol * (1.0 + std::abs(rows.b(i)))) {
        res.status = QpStatus::Infeasible;
        res.witness = i;
        res.x = s.x;
        return res;
      }
    }
  }
  const int n_eq_active = s.iq;

  std::vector<char> excluded(static_cast<std::size_t>(m), 0);
  std::vector<char> is_active(static_cast<std::size_t>(m), 0);
  for (int k = 0; k < s.iq; ++k) is_active[static_cast<std::size_t>(s.A[static_cast<std::size_t>(k)])] = 1;
  Eigen::VectorXd slack(m);

  int iter = 0;
  while (true) {
    if (++iter > opts.max_iterations) {
      res.status = QpStatus::MaxIterations;
      break;
    }
    // Pick the violated inequality to add.
    int ip = -1;
    double worst = 0.0;
    bool worst_preferred = false;
    for (int i = rows.p; i < m; ++i) {
      if (is_active[static_cast<std::size_t>(i)] || excluded[static_cast<std::size_t>(i)]) continue;
      slack(i) = rows.N.col(i).dot(s.x) - rows.b(i);
      const double tol = opts.feasibility_tol * (1.0 + std::abs(rows.b(i)));
      if (slack(i) >= -tol) continue;
      const bool pref = !prefer.empty() && prefer[static_cast<std::size_t>(i)];
      if (ip < 0 || (pref && !worst_preferred) || (pref == worst_preferred && slack(i) < worst)) {
        ip = i;
        worst = slack(i);
        worst_preferred = pref;
      }
    }
    if (ip < 0) {
      res.status = QpStatus::Optimal;
      break;
    }

    const GiState saved = s;
    const Eigen::VectorXd np = rows.N.col(ip);
    double sp = slack(ip);
    s.u(s.iq) = 0.0;
    s.A[static_cast<std::size_t>(s.iq)] = ip;
    bool restart = false;
    bool infeasible = false;
    while (true) {
      if (++iter > opts.max_iterations) break;
      compute_step(np);
      double t1 = kInf;
      int l = -1;
      for (int k = n_eq_active; k < s.iq; ++k) {
        if (r(k) > 0.0 && s.u(k) / r(k) < t1) {
          t1 = s.u(k) / r(k);
          l = k;
        }
      }
      const double znp = z.dot(np);
      const double t2 = (z.squaredNorm() > kEps && znp > 0.0) ? -sp / znp : kInf;
      const double t = std::min(t1, t2);
      if (t == kInf) {
        infeasible = true;
        break;
      }
      if (t2 == kInf) {
        if (s.iq > 0) s.u.head(s.iq) -= t * r.head(s.iq);
        s.u(s.iq) += t;
        is_active[static_cast<std::size_t>(s.A[static_cast<std::size_t>(l)])] = 0;
        delete_constraint(s, l);
        continue;
      }
      s.x += t * z;
      s.f += t * znp * (0.5 * t + s.u(s.iq));
      if (s.iq > 0) s.u.head(s.iq) -= t * r.head(s.iq);
      s.u(s.iq) += t;
      if (t == t2) {
        if (!add_constraint(s, d)) {
          s = saved;
          excluded[static_cast<std::size_t>(ip)] = 1;
          for (auto& a : is_active) a = 0;
          for (int k = 0; k < s.iq; ++k) is_active[static_cast<std::size_t>(s.A[static_cast<std::size_t>(k)])] = 1;
          restart = true;
        } else {
          is_active[static_cast<std::size_t>(ip)] = 1;
        }
        break;
      }
      is_active[static_cast<std::size_t>(s.A[static_cast<std::size_t>(l)])] = 0;
      delete_constraint(s, l);
      sp = np.dot(s.x) - rows.b(ip);
    }
    if (infeasible) {
      res.status = QpStatus::Infeasible;
      res.witness = ip;
      break;
    }
    if (iter > opts.max_iterations) {
      res.status = QpStatus::MaxIterations;
      break;
    }
    (void)restart;
  }
  res.x = s.x;
  res.iterations = iter;
  for (int k = 0; k < s.iq; ++k) res.active.push_back(s.A[static_cast<std::size_t>(k)]);
  res.u = s.u.head(s.iq);
  return res;
}

Rows assemble(const QpProblem& qp, QpResult& out) {
  const auto n = qp.size();
  Rows rows;
  std::vector<Eigen::VectorXd> cols;
  std::vector<double> rhs;
  auto push = [&](const Eigen::VectorXd& a, double b, RowKind k, int src) -> bool {
    const double nrm = a.norm();
    if (nrm == 0.0) {
      const bool ok = k == RowKind::Eq ? std::abs(b) <= 1e-12 : b <= 1e-12;
      if (!ok) {
        out.witness = fmt::format("{} {}", k == RowKind::Eq ? "eq" : "ge", src);
        return false;
      }
      return true;
    }
    cols.push_back(a / nrm);
    rhs.push_back(b / nrm);
    rows.kind.push_back(k);
    rows.source.push_back(src);
    rows.scale.push_back(nrm);
    return true;
  };
  bool ok = true;
  for (Eigen::Index i = 0; i < qp.A_eq.rows(); ++i) {
    ok = ok && push(qp.A_eq.row(i).transpose(), qp.b_eq(i), RowKind::Eq, static_cast<int>(i));
  }
  rows.p = static_cast<int>(cols.size());
  for (Eigen::Index i = 0; i < qp.A_ge.rows(); ++i) {
    ok = ok && push(qp.A_ge.row(i).transpose(), qp.b_ge(i), RowKind::Ge, static_cast<int>(i));
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    if (qp.lo(k) > qp.hi(k)) {
      out.witness = fmt::format("lo {}", k);
      ok = false;
    }
    if (std::isfinite(qp.lo(k))) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
      e(k) = 1.0;
      push(e, qp.lo(k), RowKind::Lo, static_cast<int>(k));
    }
    if (std::isfinite(qp.hi(k))) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
      e(k) = -1.0;
      push(e, -qp.hi(k), RowKind::Hi, static_cast<int>(k));
    }
  }
  if (!ok) {
    rows.p = -1;
    return rows;
  }
  rows.N.resize(n, static_cast<Eigen::Index>(cols.size()));
  rows.b.resize(static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) {
    rows.N.col(static_cast<Eigen::Index>(k)) = cols[k];
    rows.b(static_cast<Eigen::Index>(k)) = rhs[k];
  }
  return rows;
}

std::string describe(const Rows& rows, int idx) {
  const char* k = "?";
  switch (rows.kind[static_cast<std::size_t>(idx)]) {
    case RowKind::Eq: k = "eq"; break;
    case RowKind::Ge: k = "ge"; break;
    case RowKind::Lo: k = "lo"; break;
    case RowKind::Hi: k = "hi"; break;
  }
  return fmt::format("{} {}", k, rows.source[static_cast<std::size_t>(idx)]);
}

}  // namespace

QpResult solve_qp(const QpProblem& qp, const QpOptions& opts) {
  const auto n = qp.size();
  QpResult out;
  if (qp.c.size() != n || qp.A_eq.cols() != n || qp.A_ge.cols() != n || qp.lo.size() != n ||
      qp.hi.size() != n || qp.b_eq.size() != qp.A_eq.rows() || qp.b_ge.size() != qp.A_ge.rows()) {
    throw std::invalid_argument("QP dimensions are inconsistent");
  }
  out.y_eq = Eigen::VectorXd::Zero(qp.A_eq.rows());
  out.y_ge = Eigen::VectorXd::Zero(qp.A_ge.rows());
  out.y_lo = Eigen::VectorXd::Zero(n);
  out.y_hi = Eigen::VectorXd::Zero(n);

  Rows rows = assemble(qp, out);
  if (rows.p < 0) {
    out.status = QpStatus::Infeasible;
    out.x = Eigen::VectorXd::Zero(n);
    return out;
  }

  const Eigen::MatrixXd H = 0.5 * (qp.H + qp.H.transpose());
  double hscale = 1.0;
  for (Eigen::Index k = 0; k < n; ++k) hscale = std::max(hscale, std::abs(H(k, k)));
  std::vector<char> prox(static_cast<std::size_t>(n), 0);
  bool need_prox = false;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (H.row(k).cwiseAbs().maxCoeff() <= 1e-14 * hscale) {
      prox[static_cast<std::size_t>(k)] = 1;
      need_prox = true;
    }
  }
  const double mu = opts.prox_weight * hscale;
  Eigen::MatrixXd G = H;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (prox[static_cast<std::size_t>(k)]) G(k, k) += mu;
  }
  if (Eigen::LLT<Eigen::MatrixXd>(G).info() != Eigen::Success) {
    G = H + mu * Eigen::MatrixXd::Identity(n, n);
    std::fill(prox.begin(), prox.end(), 1);
    need_prox = true;
  }

  std::vector<char> prefer(static_cast<std::size_t>(rows.N.cols()), 0);
  for (std::size_t k = 0; k < rows.kind.size(); ++k) {
    if (rows.kind[k] != RowKind::Ge) continue;
    const int src = rows.source[k];
    if (std::find(opts.warm_active.begin(), opts.warm_active.end(), src) != opts.warm_active.end()) {
      prefer[k] = 1;
    }
  }

  Eigen::VectorXd xk = Eigen::VectorXd::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    xk(k) = std::clamp(0.0, std::isfinite(qp.lo(k)) ? qp.lo(k) : -kInf,
                       std::isfinite(qp.hi(k)) ? qp.hi(k) : kInf);
  }
  GiResult gi;
  const int outer = need_prox ? opts.max_prox_iterations : 1;
  int total_iter = 0;
  for (int it = 0; it < outer; ++it) {
    Eigen::VectorXd g = qp.c;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (prox[static_cast<std::size_t>(k)]) g(k) -= mu * xk(k);
    }
    gi = goldfarb_idnani(G, g, rows, prefer, opts);
    total_iter += gi.iterations;
    if (gi.status != QpStatus::Optimal || !need_prox) break;
    double move = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (prox[static_cast<std::size_t>(k)]) move = std::max(move, std::abs(gi.x(k) - xk(k)));
    }
    xk = gi.x;
    std::fill(prefer.begin(), prefer.end(), 0);
    for (int a : gi.active) prefer[static_cast<std::size_t>(a)] = 1;
    if (move <= 1e-12 * (1.0 + gi.x.lpNorm<Eigen::Infinity>())) break;
    if (it + 1 == outer) gi.status = QpStatus::MaxIterations;
  }

  out.status = gi.status;
  out.x = gi.x;
  out.iterations = total_iter;
  if (gi.status == QpStatus::Infeasible && gi.witness >= 0) out.witness = describe(rows, gi.witness);
  for (std::size_t k = 0; k < gi.active.size(); ++k) {
    const int idx = gi.active[k];
    const double y = gi.u(static_cast<Eigen::Index>(k)) / rows.scale[static_cast<std::size_t>(idx)];
    const int src = rows.source[static_cast<std::size_t>(idx)];
    switch (rows.kind[static_cast<std::size_t>(idx)]) {
      case RowKind::Eq: out.y_eq(src) += y; break;
      case RowKind::Ge:
        out.y_ge(src) += y;
        out.active_ge.push_back(src);
        break;
      case RowKind::Lo: out.y_lo(src) += y; break;
      case RowKind::Hi: out.y_hi(src) += y; break;
    }
  }
  std::sort(out.active_ge.begin(), out.active_ge.end());
  out.objective = qp.objective(out.x);
  return out;
}

double KktResiduals::max() const {
  return std::max({stationarity, primal, dual, complementarity});
}

KktResiduals kkt_residuals(const QpProblem& qp, const QpResult& r) {
  KktResiduals k;
  const Eigen::VectorXd& x = r.x;
  Eigen::VectorXd grad = qp.H * x + qp.c;
  Eigen::VectorXd rhs = qp.A_eq.transpose() * r.y_eq + qp.A_ge.transpose() * r.y_ge + r.y_lo - r.y_hi;
  const double scale = 1.0 + std::max(grad.lpNorm<Eigen::Infinity>(), qp.c.lpNorm<Eigen::Infinity>());
  k.stationarity = (grad - rhs).lpNorm<Eigen::Infinity>() / scale;
  for (Eigen::Index i = 0; i < qp.A_eq.rows(); ++i) {
    const double nrm = std::max(1e-300, qp.A_eq.row(i).norm());
    k.primal = std::max(k.primal, std::abs(qp.A_eq.row(i).dot(x) - qp.b_eq(i)) / nrm);
  }
  for (Eigen::Index i = 0; i < qp.A_ge.rows(); ++i) {
    const double nrm = std::max(1e-300, qp.A_ge.row(i).norm());
    const double s = (qp.A_ge.row(i).dot(x) - qp.b_ge(i)) / nrm;
    k.primal = std::max(k.primal, -s);
    k.dual = std::max(k.dual, -r.y_ge(i));
    k.complementarity = std::max(k.complementarity, std::abs(r.y_ge(i) * nrm * s) / scale);
  }
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (std::isfinite(qp.lo(j))) {
      const double s = x(j) - qp.lo(j);
      k.primal = std::max(k.primal, -s);
      k.complementarity = std::max(k.complementarity, std::abs(r.y_lo(j) * s) / scale);
    }
    if (std::isfinite(qp.hi(j))) {
      const double s = qp.hi(j) - x(j);
      k.primal = std::max(k.primal, -s);
      k.complementarity = std::max(k.complementarity, std::abs(r.y_hi(j) * s) / scale);
    }
    k.dual = std::max({k.dual, -r.y_lo(j), -r.y_hi(j)});
  }
  return k;
}

}  // namespace acrp
