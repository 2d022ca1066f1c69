#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "acrp/geometry.hpp"
#include "acrp/kernels.hpp"
#include "oracles.hpp"

using namespace acrp;

namespace {

struct Batch {
  std::vector<double> px, py, vx, vy;
};

// Odd length so the vector loops exercise their scalar tails; includes
// at-rest and exactly tangent entries.
Batch random_batch(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(-80.0, 80.0);
  std::uniform_real_distribution<double> vel(-1100.0, 1100.0);
  Batch b;
  for (std::size_t k = 0; k < n; ++k) {
    double x = pos(rng);
    double y = pos(rng);
    while (std::hypot(x, y) < 5.5) {
      x = pos(rng);
      y = pos(rng);
    }
    b.px.push_back(x);
    b.py.push_back(y);
    b.vx.push_back(k % 97 == 0 ? 0.0 : vel(rng));
    b.vy.push_back(k % 97 == 0 ? 0.0 : vel(rng));
  }
  b.px.push_back(-30.0);
  b.py.push_back(0.0);
  b.vx.push_back(std::sqrt(875.0));
  b.vy.push_back(5.0);
  return b;
}

}  // namespace

TEST(Kernels, ActiveTableIsNamed) {
  const auto& t = kernels::active();
  EXPECT_TRUE(t.name == "scalar" || t.name == "avx2");
}

TEST(Kernels, ScalarMatchesGeometry) {
  const Batch b = random_batch(1001, 1);
  const std::size_t n = b.px.size();
  std::vector<double> g(n);
  std::vector<std::uint8_t> mask(n);
  std::vector<double> dist(n);
  const auto& s = kernels::scalar();
  s.g_values(b.px.data(), b.py.data(), b.vx.data(), b.vy.data(), 5.0, g.data(), n);
  s.conflict_mask(b.px.data(), b.py.data(), b.vx.data(), b.vy.data(), 5.0, 0.0, 0.0, mask.data(), n);
  s.min_distance(b.px.data(), b.py.data(), b.vx.data(), b.vy.data(), 1.0, dist.data(), n);
  for (std::size_t k = 0; k < n; ++k) {
    AircraftState a;
    AircraftState o;
    a.x = b.px[k];
    a.y = b.py[k];
    const PairGeometry pg = relative_state(a, o, 5.0);
    const double scale = (b.px[k] * b.px[k] + b.py[k] * b.py[k]) * (b.vx[k] * b.vx[k] + b.vy[k] * b.vy[k]);
    EXPECT_NEAR(g[k], g_value(pg, b.vx[k], b.vy[k]), 1e-12 * scale + 1e-12);
    // The last entry is tangent (g = 0 up to rounding); only the vector
    // variants are required to agree on it.
    if (k + 1 < n) EXPECT_EQ(mask[k] != 0, is_conflict(pg, b.vx[k], b.vy[k])) << k;
    EXPECT_NEAR(dist[k], oracle::min_distance(b.px[k], b.py[k], b.vx[k], b.vy[k], 1.0), 1e-6);
  }
}

TEST(Kernels, Avx2IsBitIdenticalToScalar) {
  const kernels::KernelTable* v = kernels::avx2();
  if (v == nullptr) GTEST_SKIP() << "AVX2 not available";
  const auto& s = kernels::scalar();
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 17u, 1000u}) {
    const Batch b = random_batch(n, 100 + n);
    const std::size_t m = b.px.size();
    std::vector<double> g1(m), g2(m), d1(m), d2(m);
    std::vector<std::uint8_t> m1(m), m2(m);
    s.g_values(b.px.data(), b.py.data(), b.vx.data(), b.vy.data(), 5.0, g1.data(), m);
    v->g_values(b.px.data(), b.py.data(), b.vx.data(), b.vy.data(), 5.0, g2.data(), m);
    s.conflict_mask(b.px.data(), b.py.data(), b.vx.data(), b.vy.data(), 5.0, 1e-6, 1e-9, m1.data(), m);
    v->conflict_mask(b.px.data(), b.py.data(), b.vx.data(), b.vy.data(), 5.0, 1e-6, 1e-9, m2.data(), m);
    s.min_distance(b.px.data(), b.py.data(), b.vx.data(), b.vy.data(), 0.25, d1.data(), m);
    v->min_distance(b.px.data(), b.py.data(), b.vx.data(), b.vy.data(), 0.25, d2.data(), m);
    EXPECT_EQ(std::memcmp(g1.data(), g2.data(), m * sizeof(double)), 0) << n;
    EXPECT_EQ(m1, m2) << n;
    EXPECT_EQ(std::memcmp(d1.data(), d2.data(), m * sizeof(double)), 0) << n;
  }
}
