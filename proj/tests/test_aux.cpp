#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "helpers.hpp"
#include "landau/aux/aux_flow.hpp"
#include "landau/aux/transport.hpp"
#include "landau/core/error.hpp"

using namespace landau;

namespace {

Kernel make_kernel(int d, double eps, double gamma = 0.0) {
  ModelParams p;
  p.d = d;
  p.epsilon = eps;
  p.gamma = gamma;
  return Kernel(p);
}

ParticleEnsemble cloud(int d = 2, std::size_t n = 24, std::uint64_t seed = 7) {
  return sample_gaussian(d, n, {0, 0, 0}, {1, 1, 1}, seed);
}

double second_moment(const ParticleEnsemble& e) {
  double s = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) s += e.weight(i) * norm2(e.position(i));
  return s;
}

}  // namespace

TEST_CASE("smoothstep and cutoffs") {
  CHECK(smoothstep5(-0.3) == 0.0);
  CHECK(smoothstep5(1.7) == 1.0);
  CHECK(smoothstep5(0.5) == doctest::Approx(0.5));
  const double h = 1e-4;
  // flat to second order at both ends: value ~ 10 h^3
  CHECK(smoothstep5(h) / h < 2e-7);
  CHECK((1.0 - smoothstep5(1.0 - h)) / h < 2e-7);
  const CutoffSpec c{2.0, 4.0};
  CHECK(c.phi({1.9, 0, 0}) == 1.0);
  CHECK(c.phi({0, 3.0, 0}) == 0.0);
  CHECK(c.phi({2.5, 0, 0}) == doctest::Approx(0.5));
  CHECK(c.psi({0.2, 0, 0}) == 0.0);
  CHECK(c.psi({0, 0.5, 0}) == 1.0);
  CHECK(c.psi({0.375, 0, 0}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(CutoffSpec({0.0, 1.0}).validate(), Error);
  CHECK_THROWS_AS(CutoffSpec({1.0, -1.0}).validate(), Error);
}

TEST_CASE("pair field symmetry and support") {
  const auto k = make_kernel(2, 0.5, -1.0);
  const auto mu = cloud();
  const CutoffSpec cut{2.0, 4.0};
  const FrozenField f(k, mu, -1.0, cut);
  auto g = test::rng(1);
  for (int i = 0; i < 300; ++i) {
    const Point v = test::random_point(g, 2, 2.0), w = test::random_point(g, 2, 2.0);
    const Point a = f.F(v, w), b = f.F(w, v);
    CHECK(test::max_abs_diff(a, -1.0 * b) < 1e-14);
    // orthogonal to v - w
    CHECK(std::abs(dot(a, v - w)) < 1e-12 * (1.0 + norm(a) * norm(v - w)));
    if (norm(v) >= 3.0 || norm(w) >= 3.0 || norm(v - w) <= 0.25) CHECK(norm(a) == 0.0);
  }
  CHECK_THROWS_AS(FrozenField(k, mu, 0.5, cut), Error);
  CHECK_THROWS_AS(FrozenField(k, cloud(3), 0.0, cut), Error);
}

TEST_CASE("velocity field support and size") {
  const auto k = make_kernel(2, 0.5, -1.0);
  const auto mu = cloud();
  const FrozenField f(k, mu, -1.0, {2.0, 4.0});
  const auto L = lipschitz_constants(f);
  auto g = test::rng(2);
  std::uniform_real_distribution<double> u(-3.5, 3.5);
  double sup = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Point v{u(g), u(g), 0.0};
    const Point U = velocity_U(mu, f, v);
    if (norm(v) >= 3.0) CHECK(norm(U) == 0.0);
    sup = std::max(sup, norm(U));
  }
  INFO("sup |U| " << sup << " C_inf " << L.C_inf);
  // unit mass: |U| <= sup |F|
  CHECK(sup <= L.C_inf);
  CHECK(sup > 0.0);
  // a point mass does not move itself
  const ParticleEnsemble atom(2, {Point{0.3, -0.2, 0.0}}, {1.0});
  const FrozenField fa(k, atom, -1.0, {2.0, 4.0});
  CHECK(norm(velocity_U(atom, fa, atom.position(0))) == 0.0);
  // batched and single-point forms agree
  std::vector<Point> targets;
  for (int i = 0; i < 5; ++i) targets.push_back(test::random_point(g, 2, 1.5));
  const auto U = velocity_U(mu.positions(), mu.weights(), f.J0(mu.positions()), targets, f.J0(targets), f);
  for (std::size_t i = 0; i < targets.size(); ++i)
    CHECK(test::max_abs_diff(U[i], velocity_U(mu, f, targets[i])) < 1e-15);
}

TEST_CASE("field constants") {
  const auto mu = cloud();
  for (double gamma : {0.0, -1.0, -2.0}) {
    const auto k = make_kernel(2, 0.5, gamma);
    const FrozenField f1(k, mu, gamma, {2.0, 4.0});
    const FrozenField f2(k, mu, gamma, {2.0, 4.0}, 0, 2.0);
    const auto a = lipschitz_constants(f1), b = lipschitz_constants(f2);
    CHECK(std::isfinite(a.C_lip));
    CHECK(a.C_inf > 0.0);
    CHECK(b.C_inf == doctest::Approx(2.0 * a.C_inf).epsilon(1e-12));
    CHECK(b.C_lip == doctest::Approx(2.0 * a.C_lip).epsilon(1e-9));
    double prev = 0.0;
    for (double R1 : {1.0, 2.0, 4.0}) {
      const auto c = lipschitz_constants(FrozenField(k, mu, gamma, {R1, 4.0}));
      CHECK(c.C_lip >= prev);
      prev = c.C_lip;
    }
  }
  // the sampled sup of |F| bounds |F| at the sample nodes
  const auto k = make_kernel(2, 0.5, 0.0);
  const FrozenField f(k, mu, 0.0, {1.0, 4.0});
  const auto c = lipschitz_constants(f, 8);
  const double L = 2.0;
  double sup = 0.0;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      for (int p = 0; p < 8; ++p)
        for (int q = 0; q < 8; ++q) {
          const Point v{-L + 2 * L * (i + 0.5) / 8, -L + 2 * L * (j + 0.5) / 8, 0};
          const Point w{-L + 2 * L * (p + 0.5) / 8, -L + 2 * L * (q + 0.5) / 8, 0};
          sup = std::max(sup, norm(f.F(v, w)));
        }
  CHECK(c.C_inf == doctest::Approx(sup).epsilon(1e-14));
}

TEST_CASE("characteristics") {
  const auto k = make_kernel(2, 0.5, -1.0);
  const auto mu = cloud();
  const FrozenField f(k, mu, -1.0, {2.0, 4.0});
  const auto path = constant_curve(mu, 0.2, 5);
  CHECK(path.times.back() == doctest::Approx(0.2));
  // outside the cutoff ball nothing moves
  const Point far{3.5, 0.4, 0.0};
  CHECK(flow_map(path, f, far, 0.2) == far);
  // growth bound on many starts
  auto g = test::rng(3);
  std::vector<Point> starts;
  for (int i = 0; i < 200; ++i) starts.push_back(test::random_point(g, 2, 2.0));
  const auto traj = transport(path, f, starts);
  REQUIRE(traj.size() == 5);
  int violations = 0;
  for (const auto& xs : traj)
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (norm(xs[i]) > std::max(norm(starts[i]), 3.0) + 1e-8) ++violations;
  CHECK(violations == 0);
  // RK4 order on a time-independent field
  const auto long_path = constant_curve(mu, 2.0, 3);
  const Point v0{0.4, -0.3, 0.0};
  const Point x1 = flow_map(long_path, f, v0, 2.0, 1), x2 = flow_map(long_path, f, v0, 2.0, 2),
              x4 = flow_map(long_path, f, v0, 2.0, 4);
  const double ratio = norm(x1 - x2) / norm(x2 - x4);
  INFO("ratio " << ratio);
  CHECK(ratio > 12.0);
  CHECK(ratio < 20.0);
  CHECK_THROWS_AS(flow_map(path, f, v0, 0.3), Error);
  CHECK_THROWS_AS(transport(path, f, starts, 0), Error);
}

TEST_CASE("Picard iteration contracts") {
  const auto mu = cloud();
  for (double gamma : {0.0, -1.0}) {
    const auto k = make_kernel(2, 0.5, gamma);
    const FrozenField f(k, mu, gamma, {2.0, 4.0});
    FixedPointOptions o;
    o.nodes = 16;
    o.tol = 1e-12;
    const double C = o.safety * lipschitz_constants(f).C_lip;
    const double T = 0.9 * std::log(2.0) / C;
    const auto r = fixed_point_solve(mu, f, T, o);
    CHECK(r.C == doctest::Approx(C));
    CHECK(r.contraction_bound == doctest::Approx(std::expm1(C * T)));
    CHECK_FALSE(r.sliced);
    REQUIRE(!r.ratios.empty());
    for (double q : r.ratios) CHECK(q <= r.contraction_bound);
    CHECK(r.changes.back() < o.tol);
    CHECK_THROWS_AS(fixed_point_solve(mu, f, 1.01 * r.T_max, o), Error);
    try {
      fixed_point_solve(mu, f, 1.01 * r.T_max, o);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::TimeTooLarge);
    }
  }
}

TEST_CASE("second moment is conserved to integrator order") {
  const auto mu = cloud();
  const auto k = make_kernel(2, 0.5, -1.0);
  const FrozenField f(k, mu, -1.0, {2.0, 4.0});
  const double C = 1.5 * lipschitz_constants(f).C_lip;
  const double T = 0.9 * std::log(2.0) / C;
  std::vector<double> drift;
  for (int nodes : {8, 16, 32}) {
    FixedPointOptions o;
    o.nodes = nodes;
    o.tol = 1e-12;
    const auto r = fixed_point_solve(mu, f, T, o);
    double worst = 0.0;
    for (std::size_t n = 0; n < r.curve.times.size(); ++n)
      worst = std::max(worst, std::abs(second_moment(r.curve.ensemble(n)) - second_moment(mu)));
    drift.push_back(worst);
  }
  INFO("drift " << drift[0] << " " << drift[1] << " " << drift[2]);
  CHECK(drift[0] < 1e-6);
  CHECK(drift[0] / drift[1] > 3.0);
  CHECK(drift[1] / drift[2] > 3.0);
}

TEST_CASE("assignment solver matches brute force") {
  auto g = test::rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 1; n <= 6; ++n)
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<double> cost(n * n);
      for (double& c : cost) c = u(g);
      const auto match = solve_assignment(cost, n);
      double got = 0.0;
      std::vector<int> seen(n, 0);
      for (int i = 0; i < n; ++i) {
        got += cost[i * n + match[i]];
        seen[match[i]]++;
      }
      CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
      std::vector<int> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      double best = 1e300;
      do {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += cost[i * n + perm[i]];
        best = std::min(best, s);
      } while (std::next_permutation(perm.begin(), perm.end()));
      CHECK(got == doctest::Approx(best).epsilon(1e-14));
    }
  CHECK_THROWS_AS(solve_assignment(std::vector<double>(5), 2), Error);
}

TEST_CASE("Wasserstein distances") {
  auto g = test::rng(5);
  std::vector<Point> a, b;
  for (int i = 0; i < 30; ++i) a.push_back(test::random_point(g, 2));
  const Point shift{0.3, -0.4, 0.0};
  for (const auto& p : a) b.push_back(p + shift);
  // translation is optimal for equal clouds
  CHECK(wasserstein2_equal(a, b) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(wasserstein2_equal(a, a) == 0.0);
  // permutation invariance
  auto c = b;
  std::reverse(c.begin(), c.end());
  CHECK(wasserstein2_equal(a, c) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(wasserstein2_equal(a, std::vector<Point>(3)), Error);

  // 1-D quantile coupling
  const std::vector<double> xa{0.0, 1.0}, wa{0.5, 0.5}, xb{0.0}, wb{1.0};
  CHECK(wasserstein2_1d(xa, wa, xb, wb) == doctest::Approx(std::sqrt(0.5)));
  const std::vector<double> xc{3.0, -1.0, 2.0}, xd{0.5, 2.5, 4.0}, w3{1.0, 1.0, 1.0};
  // sorted: (-1,2,3) vs (0.5,2.5,4)
  CHECK(wasserstein2_1d(xc, w3, xd, w3) == doctest::Approx(std::sqrt((2.25 + 0.25 + 1.0) / 3.0)));
  // unnormalised weights are normalised
  const std::vector<double> w3b{2.0, 2.0, 2.0};
  CHECK(wasserstein2_1d(xc, w3b, xd, w3) == doctest::Approx(wasserstein2_1d(xc, w3, xd, w3)));

  // sliced: a translation projects to |s.theta|, whose mean square is |s|^2 / d
  const std::vector<double> w(30, 1.0 / 30);
  const double sw = sliced_wasserstein2(2, a, w, b, w, 4000, 9);
  CHECK(sw == doctest::Approx(0.5 / std::sqrt(2.0)).epsilon(0.03));
  CHECK(sliced_wasserstein2(2, a, w, a, w) == 0.0);
  // never above the full distance
  std::vector<Point> r;
  for (int i = 0; i < 30; ++i) r.push_back(test::random_point(g, 2));
  CHECK(sliced_wasserstein2(2, a, w, r, w, 256) <= wasserstein2_equal(a, r) + 1e-12);
  CHECK(sliced_wasserstein2(2, a, w, r, w, 16, 3) == sliced_wasserstein2(2, a, w, r, w, 16, 3));
  CHECK_THROWS_AS(sliced_wasserstein2(2, a, w, r, w, 0), Error);
}
