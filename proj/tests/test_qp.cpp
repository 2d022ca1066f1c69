#include <gtest/gtest.h>

#include <random>

#include "acrp/qp.hpp"
#include "oracles.hpp"

using namespace acrp;

TEST(Qp, ClampedParabola) {
  // min (x - 1)^2 s.t. x <= 0.5
  QpProblem qp = QpProblem::with_size(1);
  qp.H(0, 0) = 2.0;
  qp.c(0) = -2.0;
  qp.constant = 1.0;
  qp.A_ge = Eigen::MatrixXd::Constant(1, 1, -1.0);
  qp.b_ge = Eigen::VectorXd::Constant(1, -0.5);
  const QpResult r = solve_qp(qp);
  ASSERT_EQ(r.status, QpStatus::Optimal);
  EXPECT_NEAR(r.x(0), 0.5, 1e-12);
  EXPECT_NEAR(r.objective, 0.25, 1e-12);
  EXPECT_LE(kkt_residuals(qp, r).max(), 1e-8);
}

TEST(Qp, SymmetricHalfPlane) {
  // min x^2 + y^2 s.t. x + y >= 2
  QpProblem qp = QpProblem::with_size(2);
  qp.H = 2.0 * Eigen::MatrixXd::Identity(2, 2);
  qp.A_ge = Eigen::MatrixXd::Ones(1, 2);
  qp.b_ge = Eigen::VectorXd::Constant(1, 2.0);
  const QpResult r = solve_qp(qp);
  ASSERT_EQ(r.status, QpStatus::Optimal);
  EXPECT_NEAR(r.x(0), 1.0, 1e-12);
  EXPECT_NEAR(r.x(1), 1.0, 1e-12);
  EXPECT_NEAR(r.objective, 2.0, 1e-12);
}

TEST(Qp, EqualityAndBounds) {
  // min x^2 + y^2 s.t. x + y = 2, y <= 0.25
  QpProblem qp = QpProblem::with_size(2);
  qp.H = 2.0 * Eigen::MatrixXd::Identity(2, 2);
  qp.A_eq = Eigen::MatrixXd::Ones(1, 2);
  qp.b_eq = Eigen::VectorXd::Constant(1, 2.0);
  qp.hi(1) = 0.25;
  const QpResult r = solve_qp(qp);
  ASSERT_EQ(r.status, QpStatus::Optimal);
  EXPECT_NEAR(r.x(0), 1.75, 1e-10);
  EXPECT_NEAR(r.x(1), 0.25, 1e-10);
  EXPECT_GT(r.y_hi(1), 0.0);
  EXPECT_LE(kkt_residuals(qp, r).max(), 1e-8);
}

TEST(Qp, LinearProgram) {
  // min x + 2y s.t. x + y >= 1, 0 <= x <= 0.3, y >= 0
  QpProblem qp = QpProblem::with_size(2);
  qp.c << 1.0, 2.0;
  qp.A_ge = Eigen::MatrixXd::Ones(1, 2);
  qp.b_ge = Eigen::VectorXd::Constant(1, 1.0);
  qp.lo << 0.0, 0.0;
  qp.hi(0) = 0.3;
  const QpResult r = solve_qp(qp);
  ASSERT_EQ(r.status, QpStatus::Optimal);
  EXPECT_NEAR(r.objective, 0.3 + 2 * 0.7, 1e-7);
}

TEST(Qp, InfeasibleHasWitness) {
  QpProblem qp = QpProblem::with_size(1);
  qp.H(0, 0) = 1.0;
  qp.A_ge.resize(2, 1);
  qp.A_ge << 1.0, -1.0;
  qp.b_ge.resize(2);
  qp.b_ge << 1.0, 0.0;  // x >= 1 and x <= 0
  const QpResult r = solve_qp(qp);
  EXPECT_EQ(r.status, QpStatus::Infeasible);
  EXPECT_FALSE(r.witness.empty());
}

TEST(Qp, RandomProblemsMatchActiveSetEnumeration) {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_int_distribution<int> dim(1, 8);
  for (int trial = 0; trial < 150; ++trial) {
    const int n = dim(rng);
    const int m = std::uniform_int_distribution<int>(1, 9)(rng);
    Eigen::MatrixXd L(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) L(i, j) = nd(rng);
    }
    Eigen::MatrixXd H = L * L.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd c(n);
    for (int i = 0; i < n; ++i) c(i) = 3.0 * nd(rng);
    Eigen::MatrixXd A(m, n);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) A(i, j) = nd(rng);
    }
    // Feasible by construction: rows hold at x0 with random slack.
    Eigen::VectorXd x0(n);
    for (int i = 0; i < n; ++i) x0(i) = nd(rng);
    Eigen::VectorXd b = A * x0;
    for (int i = 0; i < m; ++i) b(i) -= std::abs(nd(rng));

    QpProblem qp = QpProblem::with_size(n);
    qp.H = H;
    qp.c = c;
    qp.A_ge = A;
    qp.b_ge = b;
    const QpResult r = solve_qp(qp);
    const oracle::BruteQp ref = oracle::brute_force_qp(H, c, A, b);
    ASSERT_TRUE(ref.feasible);
    ASSERT_EQ(r.status, QpStatus::Optimal) << trial;
    EXPECT_NEAR(r.objective, ref.objective, 1e-8 * (1.0 + std::abs(ref.objective))) << trial;
    EXPECT_LE((r.x - ref.x).norm(), 1e-6 * (1.0 + ref.x.norm())) << trial;
    EXPECT_LE(kkt_residuals(qp, r).max(), 1e-8) << trial;
  }
}

TEST(Qp, WarmStartDoesNotChangeTheOptimum) {
  QpProblem qp = QpProblem::with_size(3);
  qp.H = Eigen::MatrixXd::Identity(3, 3);
  qp.c << -1.0, -2.0, -3.0;
  qp.A_ge.resize(2, 3);
  qp.A_ge << -1.0, -1.0, -1.0, 1.0, 0.0, -1.0;
  qp.b_ge.resize(2);
  qp.b_ge << -2.0, -0.5;
  const QpResult cold = solve_qp(qp);
  QpOptions o;
  o.warm_active = cold.active_ge;
  const QpResult warm = solve_qp(qp, o);
  ASSERT_EQ(cold.status, QpStatus::Optimal);
  ASSERT_EQ(warm.status, QpStatus::Optimal);
  EXPECT_NEAR(cold.objective, warm.objective, 1e-12);
}

TEST(Qp, Deterministic) {
  QpProblem qp = QpProblem::with_size(2);
  qp.H << 2.0, 0.5, 0.5, 1.0;
  qp.c << -1.0, 0.3;
  qp.A_ge = Eigen::MatrixXd::Ones(1, 2);
  qp.b_ge = Eigen::VectorXd::Constant(1, 1.5);
  const QpResult a = solve_qp(qp);
  const QpResult b = solve_qp(qp);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.objective, b.objective);
}
