#include <doctest.h>

#include <cmath>
#include <vector>

#include "auctionevt/density_sp.hpp"
#include "auctionevt/evt.hpp"
#include "auctionevt/quadrature.hpp"
#include "test_support.hpp"

using namespace aevt;

TEST_CASE("density_znorm reference values") {
  // frozen from an independent numpy implementation of the same formulas
  const std::vector<double> z1{0.3, 0.7};
  CHECK(log_density_znorm(z1, -0.5) == doctest::Approx(0.7662719770351655).epsilon(1e-6));
  CHECK(log_density_znorm(z1, 0.25) == doctest::Approx(0.6459606826242).epsilon(1e-6));
  const std::vector<double> z2{0.45357025372721926, 0.892199485578593};
  CHECK(log_density_znorm(z2, -1.0) == doctest::Approx(0.9352179367663713).epsilon(1e-6));
}

TEST_CASE("density_znorm is zero off the ordered simplex") {
  CHECK(density_znorm(std::vector<double>{0.7, 0.3}, -0.5).value == 0.0);
  CHECK(density_znorm(std::vector<double>{-0.1, 0.5}, 0.0).value == 0.0);
  CHECK(density_znorm(std::vector<double>{0.2, 1.3}, 0.25).value == 0.0);
}

TEST_CASE("density_znorm N=1 normalization") {
  for (const double xi : {-1.0, -0.5, -0.02, 0.0, 0.02, 0.25, 0.5}) {
    CAPTURE(xi);
    const double integral = test::integrate_unit_interval(
        [&](double z) { return density_znorm(std::vector<double>{z}, xi).value; }, 400);
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("density_znorm N=2 normalization") {
  for (const double xi : {-1.0, -0.5, 0.0, 0.25, 0.5}) {
    CAPTURE(xi);
    const double integral = test::integrate_ordered_square(
        [&](double z1, double z2) {
          return density_znorm(std::vector<double>{z1, z2}, xi).value;
        },
        120);
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("density branch continuity at the xi threshold") {
  const std::vector<double> z{0.35, 0.8};
  const double f0 = log_density_znorm(z, 0.0);
  for (const double xi : {1e-5, -1e-5}) {
    CHECK(log_density_znorm(z, xi) == doctest::Approx(f0).epsilon(2e-4));
  }
  // inside the threshold the zero branch is used exactly
  CHECK(log_density_znorm(z, 1e-7) == doctest::Approx(f0).epsilon(1e-12));
}

TEST_CASE("kappa_density nonnegative on a simplex grid") {
  for (const double xi : {-1.0, -0.5, 0.0, 0.25, 0.5}) {
    for (int i = 1; i < 10; ++i) {
      for (int j = i; j < 10; ++j) {
        const std::vector<double> z{i / 10.0, j / 10.0};
        CHECK(kappa_density(z, xi) >= 0.0);
      }
    }
  }
}

TEST_CASE("kappa_density finite for bounded-support xi") {
  const std::vector<double> z{0.4, 0.6};
  const double v = kappa_density(z, -0.5);
  CHECK(std::isfinite(v));
  CHECK(v > 0.0);
}

TEST_CASE("joint density reference values") {
  const std::vector<double> z1{0.3, 0.7};
  CHECK(log_joint_density_ymu(0.8, z1, -0.5) ==
        doctest::Approx(-0.013787824899466339).epsilon(1e-5));
  const std::vector<double> z2{0.2, 0.9};
  CHECK(log_joint_density_ymu(1.3, z2, 0.25) ==
        doctest::Approx(-0.3478441837224908).epsilon(1e-5));
  CHECK(log_joint_density_ymu(0.7, z1, 0.0) ==
        doctest::Approx(0.8963592416584252).epsilon(1e-5));
  CHECK(log_joint_density_ypi(0.4, z1, -0.5) ==
        doctest::Approx(1.0964706143641905).epsilon(1e-5));
  const std::vector<double> z3{0.5, 0.8};
  CHECK(log_joint_density_ypi(-0.6, z3, 0.25) ==
        doctest::Approx(-4.746576222369646).epsilon(1e-4));
  CHECK(log_joint_density_ypi(0.9, z1, 0.0) ==
        doctest::Approx(-0.04772150074819809).epsilon(1e-5));
}

TEST_CASE("joint_density_ymu marginalizes to density_znorm") {
  const std::vector<double> z{0.3, 0.7};
  for (const double xi : {-1.0, -0.5, -0.05, -0.02, 0.0, 0.02, 0.25, 0.5}) {
    CAPTURE(xi);
    const double fz = density_znorm(z, xi).value;
    const double marg = test::integrate_log_grid(
        [&](double y) { return joint_density_ymu(y, z, xi); }, 1e-4, 1e5, 3000);
    CHECK(marg / fz == doctest::Approx(1.0).epsilon(2e-3));
  }
}

TEST_CASE("joint_density_ypi marginalizes to density_znorm") {
  const std::vector<double> z{0.3, 0.7};
  for (const double xi : {-1.0, -0.5, -0.02, 0.0, 0.02, 0.25, 0.5}) {
    CAPTURE(xi);
    const double fz = density_znorm(z, xi).value;
    double marg = test::integrate_log_grid(
        [&](double y) { return joint_density_ypi(y, z, xi); }, 1e-4, 1e5, 3000);
    marg += test::integrate_log_grid(
        [&](double y) { return joint_density_ypi(-y, z, xi); }, 1e-4, 1e5, 3000);
    // the tiny |y| <= 1e-4 sliver is excluded by the grid; the density is
    // bounded there so the omission is below tolerance
    CHECK(marg / fz == doctest::Approx(1.0).epsilon(2e-3));
  }
}

TEST_CASE("joint_density_ypi valid at and around y = 0") {
  const std::vector<double> z{0.3, 0.7};
  const double f0 = joint_density_ypi(0.0, z, -0.5);
  CHECK(std::isfinite(f0));
  CHECK(f0 > 0.0);
  CHECK(joint_density_ypi(1e-6, z, -0.5) == doctest::Approx(f0).epsilon(1e-3));
}

TEST_CASE("joint_density_ymu decays as y grows") {
  const std::vector<double> z{0.3, 0.7};
  CHECK(joint_density_ymu(1e4, z, -0.5) < 1e-10);
  CHECK(joint_density_ymu(1e4, z, 0.25) < 1e-10);
}

TEST_CASE("joint densities reject bad y") {
  const std::vector<double> z{0.3, 0.7};
  CHECK_THROWS_AS((void)joint_density_ymu(-1.0, z, -0.5), std::domain_error);
  CHECK_THROWS_AS((void)joint_density_ymu(0.0, z, -0.5), std::domain_error);
}

TEST_CASE("densities reject xi outside the parameter space") {
  const std::vector<double> z{0.5};
  CHECK_THROWS_AS((void)density_znorm(z, -1.5), std::domain_error);
  CHECK_THROWS_AS((void)density_znorm(z, 0.7), std::domain_error);
}
