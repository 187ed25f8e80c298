#include <doctest.h>

#include <cmath>
#include <random>

#include "gyrospec/errors.hpp"
#include "gyrospec/perturbation.hpp"
#include "gyrospec/stability_atlas.hpp"
#include "oracles.hpp"

using namespace gyrospec;

namespace
{

const Eigen::Matrix2d K1 = (Eigen::Matrix2d() << 1, 1, 1, 2).finished();
const Eigen::Matrix2d D1 = (Eigen::Matrix2d() << -1, 0, 0, 2).finished();
const RotorModel unit_rotor((Eigen::VectorXd(1) << 1.0).finished());

StabilityChart chart_for(const Eigen::Matrix2d &D, const Eigen::Matrix2d &K, Gains g, Grid grid, int threads = 1)
{
  StabilityChart chart = sweep2d(unit_rotor, PerturbationSet(D, K, g), grid, threads);
  trace_boundary(chart);
  return chart;
}

void check_polylines(const StabilityChart &chart)
{
  CHECK(chart.flagged_edges == 0);
  for (const auto &line : chart.boundaries)
  {
    for (std::size_t k = 0; k < line.points.size(); ++k)
    {
      const auto pert = chart.pert.with_gains(chart.gains_at(line.points[k].x(), line.points[k].y()));
      CHECK(std::abs(classify(chart.model, pert).max_re) < 1e-9);
    }
    if (!line.closed)
    {
      CHECK(on_frame(line.points.front(), chart.grid));
      CHECK(on_frame(line.points.back(), chart.grid));
    }
  }
}

// Unstable side must be on the left of each polyline segment.
void check_orientation(const StabilityChart &chart)
{
  const double hx = 1e-3 * (chart.grid.x.max - chart.grid.x.min);
  const double hy = 1e-3 * (chart.grid.y.max - chart.grid.y.min);
  for (const auto &line : chart.boundaries)
  {
    const std::size_t k = line.points.size() / 2;
    const Eigen::Vector2d a = line.points[k - 1], b = line.points[k];
    const Eigen::Vector2d mid = 0.5 * (a + b);
    Eigen::Vector2d normal(-(b - a).y() / hy, (b - a).x() / hx);
    normal.normalize();
    const Eigen::Vector2d left = mid + Eigen::Vector2d(normal.x() * hx, normal.y() * hy);
    const Eigen::Vector2d right = mid - Eigen::Vector2d(normal.x() * hx, normal.y() * hy);
    CHECK(classify(chart.model, chart.pert.with_gains(chart.gains_at(left.x(), left.y()))).max_re > 0.0);
    CHECK(classify(chart.model, chart.pert.with_gains(chart.gains_at(right.x(), right.y()))).max_re < 0.0);
  }
}

}  // namespace

TEST_CASE("classify examples")
{
  CHECK(classify(unit_rotor, PerturbationSet::unperturbed(2, 0.5)).cls == StabilityClass::marginal);
  const auto fig1b = classify(unit_rotor, PerturbationSet(D1, K1, Gains{0.3, 0.2, 0.0, 0.0}));
  CHECK(fig1b.cls == StabilityClass::flutter);
  CHECK(fig1b.max_re == doctest::Approx(0.13237554).epsilon(1e-7));
  CHECK(fig1b.critical_eigenvalue.imag() > 0.0);
  const auto ttc = classify(unit_rotor, PerturbationSet(Eigen::Matrix2d::Identity(), K1, Gains{0.2, 0.0, 0.0, 0.3}));
  CHECK(ttc.cls == StabilityClass::asymptotically_stable);
  const auto div = classify(unit_rotor, PerturbationSet(Eigen::Matrix2d::Identity(), K1, Gains{0.1, -2.0, 0.0, 0.0}));
  CHECK(div.cls == StabilityClass::divergence);
}

TEST_CASE("param names round-trip")
{
  for (Param p : {Param::Omega, Param::kappa, Param::delta, Param::nu})
    CHECK(param_from_string(to_string(p)) == p);
  CHECK_FALSE(param_from_string("omega"));
  CHECK(get(with_param(Gains{}, Param::nu, 0.25), Param::nu) == 0.25);
}

TEST_CASE("sweep2d validates the grid")
{
  const PerturbationSet p(D1, K1, Gains{});
  CHECK_THROWS_AS(sweep2d(unit_rotor, p, Grid{{Param::Omega, 1, 0, 5}, {Param::kappa, 0, 1, 5}}), DomainError);
  CHECK_THROWS_AS(sweep2d(unit_rotor, p, Grid{{Param::Omega, 0, 1, 5}, {Param::Omega, 0, 1, 5}}), DomainError);
  CHECK_THROWS_AS(sweep2d(unit_rotor, p, Grid{{Param::Omega, 0, 1, 1}, {Param::kappa, 0, 1, 5}}), DomainError);
}

TEST_CASE("sweep2d is independent of the worker count")
{
  const Grid grid{{Param::Omega, -0.5, 0.5, 31}, {Param::kappa, -0.25, 0.25, 27}};
  const auto a = sweep2d(unit_rotor, PerturbationSet(D1, K1, Gains{0.3, 0, 0, 0}), grid, 1);
  const auto b = sweep2d(unit_rotor, PerturbationSet(D1, K1, Gains{0.3, 0, 0, 0}), grid, 4);
  REQUIRE(a.cells.size() == b.cells.size());
  for (std::size_t k = 0; k < a.cells.size(); ++k)
  {
    CHECK(a.cells[k].verdict.cls == b.cells[k].verdict.cls);
    CHECK(a.cells[k].verdict.max_re == b.cells[k].verdict.max_re);
  }
}

TEST_CASE("undamped subcritical charts are marginal")
{
  const auto chart = sweep2d(unit_rotor, PerturbationSet(D1, K1, Gains{}),
                             Grid{{Param::Omega, -0.9, 0.9, 25}, {Param::kappa, -0.05, 0.05, 25}});
  for (const auto &c : chart.cells)
    CHECK(c.verdict.cls == StabilityClass::marginal);
}

TEST_CASE("charts are symmetric under (Omega, nu) -> (-Omega, -nu)")
{
  const Grid grid{{Param::Omega, -0.4, 0.4, 41}, {Param::nu, -0.2, 0.2, 41}};
  const auto chart = sweep2d(unit_rotor, PerturbationSet(D1, K1, Gains{0.1, 0.15, 0, 0}), grid);
  for (int iy = 0; iy < 41; ++iy)
    for (int ix = 0; ix < 41; ++ix)
      CHECK(chart.cell(ix, iy).verdict.cls == chart.cell(40 - ix, 40 - iy).verdict.cls);
}

TEST_CASE("ellipse, hyperbola and stripe morphology")
{
  SUBCASE("A < 0: two frame-terminating branches")
  {
    const auto chart = chart_for(D1, K1, Gains{0.3, 0, 0, 0}, Grid{{Param::Omega, -0.5, 0.5, 61}, {Param::kappa, -0.25, 0.25, 61}});
    REQUIRE(chart.boundaries.size() == 2);
    for (const auto &line : chart.boundaries)
    {
      CHECK_FALSE(line.closed);
      const double ya = line.points.front().y(), yb = line.points.back().y();
      CHECK(std::abs(ya - yb) == doctest::Approx(0.5));
    }
    check_polylines(chart);
    check_orientation(chart);
  }
  SUBCASE("A > 0: one closed contour")
  {
    const Eigen::Matrix2d D = Eigen::Vector2d(-0.1, 2.0).asDiagonal();
    REQUIRE(invariant_A(D, K1) > 0.0);
    const auto chart = chart_for(D, K1, Gains{0.3, 0, 0, 0}, Grid{{Param::Omega, -0.2, 0.2, 61}, {Param::kappa, -0.3, 0.3, 61}});
    REQUIRE(chart.boundaries.size() == 1);
    CHECK(chart.boundaries[0].closed);
    check_polylines(chart);
    check_orientation(chart);
  }
  SUBCASE("A = 0: stripe between two parallel lines")
  {
    const Eigen::Matrix2d D = Eigen::Vector2d(-1.0, (3.0 + std::sqrt(5.0)) / 2.0).asDiagonal();
    CHECK(std::abs(invariant_A(D, K1)) < 1e-12);
    const auto chart = chart_for(D, K1, Gains{0.3, 0, 0, 0}, Grid{{Param::Omega, -0.5, 0.5, 61}, {Param::kappa, -0.2, 0.2, 61}});
    REQUIRE(chart.boundaries.size() == 2);
    for (const auto &line : chart.boundaries)
    {
      CHECK_FALSE(line.closed);
      // a line |Omega| = const: Omega varies little along it
      double lo = 1e300, hi = -1e300;
      for (const auto &p : line.points)
      {
        lo = std::min(lo, p.x());
        hi = std::max(hi, p.x());
      }
      CHECK(hi - lo < 0.05);
    }
    check_polylines(chart);
  }
}

TEST_CASE("chart agrees with criterion_B as the perturbation shrinks")
{
  const ModalData md = modal_data(D1, K1, 1.0);
  double previous = 1.0;
  for (double eps : {0.1, 0.05, 0.01, 0.005})
  {
    const double delta = 0.3 * eps, nu = 0.1 * eps;
    const Grid grid{{Param::Omega, -0.5 * eps, 0.5 * eps, 41}, {Param::kappa, -0.6 * eps, 0.6 * eps, 41}};
    const auto chart = sweep2d(unit_rotor, PerturbationSet(D1, K1, Gains{delta, 0, nu, 0}), grid);
    int disagree = 0;
    for (int iy = 0; iy < 41; ++iy)
      for (int ix = 0; ix < 41; ++ix)
      {
        const double B = criterion_B(md, D1, K1, grid.x.value(ix), grid.y.value(iy), delta, nu);
        const bool predicted = delta * md.trD > 0 && B > 0;
        const bool actual = chart.cell(ix, iy).verdict.cls == StabilityClass::asymptotically_stable;
        disagree += predicted != actual;
      }
    const double fraction = disagree / (41.0 * 41.0);
    MESSAGE("eps = " << eps << " disagreement " << fraction);
    CHECK(fraction <= previous);
    previous = fraction;
  }
  CHECK(previous < 0.01);
}

TEST_CASE("boundary slopes at the origin")
{
  const double nu = 0.2;
  const double k0 = ep_location(K1, nu, 1.0).kappa0;
  const double b0 = beta0(D1, K1);
  SUBCASE("kappa = 2 kappa0 follows the umbrella lines")
  {
    const double hi = 2 * b0 + std::sqrt(3.0) / 4, lo = 2 * b0 - std::sqrt(3.0) / 4;
    const auto chart = chart_for(D1, K1, Gains{0, 2 * k0, nu, 0},
                                 Grid{{Param::Omega, 0.0, 1.2 * hi * 2e-3, 121}, {Param::delta, 2e-4, 2e-3, 31}});
    const auto [s1, s2] = boundary_slope_at_origin(chart);
    CHECK(s1 == doctest::Approx(hi).epsilon(2e-2));
    CHECK(s2 == doctest::Approx(lo).epsilon(2e-2));
  }
  SUBCASE("nu = 0, kappa = 0 follows the cone")
  {
    const double s = std::sqrt(2.0) / 2.0;
    const auto chart = chart_for(D1, K1, Gains{0, 0, 0, 0}, Grid{{Param::Omega, -1.5 * s * 0.1, 1.5 * s * 0.1, 81}, {Param::delta, 0.01, 0.1, 21}});
    const auto [s1, s2] = boundary_slope_at_origin(chart);
    CHECK(s1 == doctest::Approx(s).epsilon(1e-2));
    CHECK(s2 == doctest::Approx(-s).epsilon(1e-2));
  }
  SUBCASE("too coarse")
  {
    const auto chart = chart_for(D1, K1, Gains{0, 2 * k0, nu, 0}, Grid{{Param::Omega, 0.0, 2e-3, 7}, {Param::delta, 2e-4, 2e-3, 3}});
    CHECK_THROWS_AS(boundary_slope_at_origin(chart), ResolutionError);
  }
  SUBCASE("wrong plane")
  {
    const auto chart = chart_for(D1, K1, Gains{0.3, 0, 0, 0}, Grid{{Param::Omega, -0.5, 0.5, 5}, {Param::kappa, -0.2, 0.2, 5}});
    CHECK_THROWS_AS(boundary_slope_at_origin(chart), DomainError);
  }
}

TEST_CASE("exceptional point search")
{
  SUBCASE("reference doublet exceptional point")
  {
    const auto found = find_exceptional_points(unit_rotor, PerturbationSet(D1, K1, Gains{0, 0, 0.2, 0}),
                                               SearchBox{-0.05, 0.05, 0.1, 0.26, 21});
    REQUIRE(found.points.size() == 1);
    const auto &ep = found.points[0];
    CHECK(ep.kind == SingularKind::exceptional);
    CHECK(std::abs(ep.location.Omega) < 1e-10);
    CHECK(std::abs(ep.location.kappa - 0.4 / std::sqrt(5.0)) < 1e-6);
    CHECK(ep.eigenvalue.imag() == doctest::Approx(1.126201).epsilon(1e-6));
    CHECK(ep.discriminant < 1e-10);
    CHECK(ep.eigenvector_count == 1);
  }
  SUBCASE("both exceptional points of random K")
  {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.05, 0.2);
    int tested = 0;
    for (int trial = 0; trial < 100 && tested < 5; ++trial)
    {
      const Eigen::Matrix2d K = oracle::random_spd(rng, 2, 0.5, 2.0);
      const double nu = u(rng);
      const auto loc = ep_location(K, nu, 1.0);
      const double k0 = loc.kappa0;
      if (k0 > 0.5 || !loc.omega0_mirror)
        continue;
      ++tested;
      for (double sign : {1.0, -1.0})
      {
        const double c = sign * k0;
        const auto found = find_exceptional_points(unit_rotor, PerturbationSet(D1, K, Gains{0, 0, nu, 0}),
                                                   SearchBox{-0.05, 0.05, c - 0.3 * k0, c + 0.3 * k0, 15});
        // the box may also catch a double zero eigenvalue on the divergence boundary
        int at_c = 0;
        for (const auto &pt : found.points)
        {
          CHECK(pt.discriminant < 1e-10);
          if (pt.eigenvalue.imag() > 0.1)
          {
            ++at_c;
            CHECK(std::abs(pt.location.kappa - c) < 1e-6);
            CHECK(pt.kind == SingularKind::exceptional);
          }
        }
        CHECK(at_c == 1);
      }
    }
    CHECK(tested == 5);
  }
  SUBCASE("diabolical point at nu = 0")
  {
    const auto found = find_exceptional_points(unit_rotor, PerturbationSet(D1, K1, Gains{}),
                                               SearchBox{-0.1, 0.1, -0.1, 0.1, 21});
    REQUIRE(found.points.size() == 1);
    CHECK(found.points[0].kind == SingularKind::diabolical);
    CHECK(found.points[0].eigenvector_count == 2);
    CHECK(std::abs(found.points[0].location.Omega) < 1e-8);
    CHECK(std::abs(found.points[0].location.kappa) < 1e-8);
  }
  SUBCASE("empty box")
  {
    const auto found = find_exceptional_points(unit_rotor, PerturbationSet(D1, K1, Gains{0, 0, 0.2, 0}),
                                               SearchBox{0.3, 0.5, 0.5, 0.7, 15});
    CHECK(found.points.empty());
  }
}
