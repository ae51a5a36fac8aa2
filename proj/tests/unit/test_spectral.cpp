#include "fracsource/spectral.hpp"
#include "generators.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace fracsource::spectral;
using fracsource::testing::Gen;
using std::numbers::pi;

namespace {

std::vector<double> sample(const SpaceGrid& g, auto f) {
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(g.node(i));
  return v;
}

double gk(auto f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14);
}

}  // namespace

TEST_SUITE("spectral") {
  TEST_CASE("grid and eigensystem invariants") {
    const SpaceGrid g(201);
    CHECK(g.node(0) == 0.0);
    CHECK(g.node(200) == 1.0);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g.node(i) > g.node(i - 1));
    CHECK_THROWS_AS(SpaceGrid(200), std::invalid_argument);
    CHECK_THROWS_AS(SpaceGrid(3), std::invalid_argument);

    const DirichletLaplacian es(40, 0.7);
    for (std::size_t n = 2; n <= 40; ++n) {
      CHECK(es.eigenvalue(n) > es.eigenvalue(n - 1));
      CHECK(es.fractional_eigenvalue(n) > es.fractional_eigenvalue(n - 1));
    }
    CHECK(es.eigenvalue(3) == doctest::Approx(9 * pi * pi).epsilon(1e-15));
    CHECK(es.eigenfunction(5, 0.0) == 0.0);
    CHECK(es.eigenfunction(5, 1.0) == 0.0);
    CHECK_THROWS_AS(DirichletLaplacian(0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(DirichletLaplacian(10, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(DirichletLaplacian(10, 1.2), std::invalid_argument);
  }

  TEST_CASE("fractional eigenvalues against repeated square roots") {
    for (std::size_t n = 1; n <= 40; ++n) {
      const double lam = DirichletLaplacian(40, 1.0).eigenvalue(n);
      const double r2 = std::sqrt(lam), r4 = std::sqrt(r2), r8 = std::sqrt(r4);
      CHECK(DirichletLaplacian(40, 0.5).fractional_eigenvalue(n) == doctest::Approx(r2).epsilon(1e-12));
      CHECK(DirichletLaplacian(40, 0.25).fractional_eigenvalue(n) == doctest::Approx(r4).epsilon(1e-12));
      CHECK(DirichletLaplacian(40, 0.75).fractional_eigenvalue(n) == doctest::Approx(r2 * r4).epsilon(1e-12));
      CHECK(DirichletLaplacian(40, 0.625).fractional_eigenvalue(n) == doctest::Approx(r2 * r8).epsilon(1e-12));
      CHECK(DirichletLaplacian(40, 1.0).fractional_eigenvalue(n) == doctest::Approx(lam).epsilon(1e-12));
    }
  }

  TEST_CASE("expand examples") {
    const SpaceGrid g(201);
    const DirichletLaplacian es(40, 1.0);
    const auto c1 = expand(sample(g, [&](double x) { return es.eigenfunction(1, x); }), es, g);
    CHECK(std::abs(c1[0] - 1.0) <= 1e-8);
    for (std::size_t n = 1; n < c1.size(); ++n) CHECK(std::abs(c1[n]) <= 1e-8);

    // Composite Simpson loses accuracy as (n pi h)^4; the first ten modes are
    // checked against both the analytic value and an adaptive quadrature.
    const DirichletLaplacian es10(10, 1.0);
    const auto ones = expand(sample(g, [](double) { return 1.0; }), es10, g);
    const auto lin = expand(sample(g, [](double x) { return x; }), es10, g);
    for (std::size_t n = 1; n <= 10; ++n) {
      const double nd = static_cast<double>(n);
      const double exact_one = n % 2 == 1 ? 2.0 * std::numbers::sqrt2 / (nd * pi) : 0.0;
      const double exact_lin = std::numbers::sqrt2 * (n % 2 == 1 ? 1.0 : -1.0) / (nd * pi);
      const double quad_one = gk([&](double x) { return es.eigenfunction(n, x); }, 0.0, 1.0);
      const double quad_lin = gk([&](double x) { return x * es.eigenfunction(n, x); }, 0.0, 1.0);
      CHECK(std::abs(exact_one - quad_one) <= 1e-13);
      CHECK(std::abs(exact_lin - quad_lin) <= 1e-13);
      CHECK(std::abs(ones[n - 1] - exact_one) <= 1e-6);
      CHECK(std::abs(lin[n - 1] - exact_lin) <= 1e-6);
    }
    CHECK_THROWS_AS(expand(std::vector<double>(201, 0.0), DirichletLaplacian(51, 1.0), g), std::invalid_argument);
    CHECK_THROWS_AS(expand(std::vector<double>(200, 0.0), es, g), std::invalid_argument);
  }

  TEST_CASE("synthesize examples") {
    const SpaceGrid g(201);
    const DirichletLaplacian es(40, 0.8);
    std::vector<double> e1(40, 0.0);
    e1[0] = 1.0;
    const auto s1 = synthesize(e1, es, g);
    for (std::size_t i = 0; i < g.size(); ++i)
      CHECK(s1[i] == doctest::Approx(std::numbers::sqrt2 * std::sin(pi * g.node(i))).epsilon(1e-14));

    const auto phi2 = sample(g, [&](double x) { return es.eigenfunction(2, x); });
    const auto round = synthesize(expand(phi2, es, g), es, g);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(round[i] - phi2[i]) <= 1e-8);

    const auto zero = synthesize(std::vector<double>(40, 0.0), es, g);
    for (double v : zero) CHECK(v == 0.0);
    CHECK_THROWS_AS(synthesize(std::vector<double>(39, 0.0), es, g), std::invalid_argument);
  }

  TEST_CASE("inner_product_on examples") {
    const SpaceGrid g(201);
    const DirichletLaplacian es(40, 1.0);
    const auto phi1 = sample(g, [&](double x) { return es.eigenfunction(1, x); });
    const std::vector<double> ones(g.size(), 1.0);
    CHECK(std::abs(inner_product_on(Subdomain(0, 1), phi1, phi1, g) - 1.0) <= 1e-8);
    CHECK(inner_product_on(Subdomain(0, 0.5), ones, ones, g) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(inner_product_on(Subdomain(0, 0.06), ones, ones, g) == doctest::Approx(0.06).epsilon(1e-14));
    CHECK_THROWS_AS(Subdomain(0.3, 0.3), std::invalid_argument);
    CHECK_THROWS_AS(Subdomain(0.5, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(inner_product_on(Subdomain(0, 1), ones, std::vector<double>(5, 1.0), g), std::invalid_argument);
  }

  TEST_CASE("inner_product_on: partial cells, unions, symmetry and bilinearity") {
    const SpaceGrid g(201);
    Gen gen(21);
    for (int trial = 0; trial < 200; ++trial) {
      double a = gen.uniform(0, 1), b = gen.uniform(0, 1);
      if (a > b) std::swap(a, b);
      if (b - a < 1e-3) continue;
      const double k1 = gen.uniform(-3, 3), k2 = gen.uniform(-3, 3), c = gen.uniform(-2, 2);
      auto fg = [&](double x) { return std::sin(k1 * x) + 1.0; };
      auto fh = [&](double x) { return std::cos(k2 * x) * x; };
      const auto gs = sample(g, fg), hs = sample(g, fh);
      const Subdomain sub(a, b);
      const double ip = inner_product_on(sub, gs, hs, g);
      CHECK(ip == doctest::Approx(inner_product_on(sub, hs, gs, g)).epsilon(1e-14));
      std::vector<double> scaled = gs;
      for (auto& v : scaled) v *= c;
      CHECK(inner_product_on(sub, scaled, hs, g) == doctest::Approx(c * ip).epsilon(1e-12).scale(1.0));
      const double oracle = gk([&](double x) { return fg(x) * fh(x); }, a, b);
      CHECK(std::abs(ip - oracle) <= 1e-4 * (b - a));
    }
    const std::vector<double> ones(g.size(), 1.0);
    const auto both = SubdomainUnion::complement(Subdomain(0.3, 0.45));
    CHECK(both.pieces().size() == 2u);
    CHECK(both.length() == doctest::Approx(0.85));
    CHECK(inner_product_on(both, ones, ones, g) == doctest::Approx(0.85).epsilon(1e-14));
    CHECK(both.contains(0.1));
    CHECK_FALSE(both.contains(0.4));
    const auto right = SubdomainUnion::complement(Subdomain(0.0, 0.06));
    CHECK(right.pieces().size() == 1u);
    CHECK(right.pieces()[0].left == 0.06);
    CHECK_THROWS_AS(SubdomainUnion::complement(Subdomain(0.0, 1.0)), std::invalid_argument);
  }

  TEST_CASE("orthonormality of the first ten eigenfunctions") {
    const SpaceGrid g(201);
    const DirichletLaplacian es(10, 1.0);
    for (std::size_t n = 1; n <= 10; ++n) {
      const auto pn = sample(g, [&](double x) { return es.eigenfunction(n, x); });
      for (std::size_t m = 1; m <= 10; ++m) {
        const auto pm = sample(g, [&](double x) { return es.eigenfunction(m, x); });
        CHECK(std::abs(inner_product_on(Subdomain(0, 1), pn, pm, g) - (n == m ? 1.0 : 0.0)) <= 1e-8);
      }
    }
  }

  TEST_CASE("Parseval: truncation error decreases monotonically") {
    const SpaceGrid g(201);
    Gen gen(22);
    for (int trial = 0; trial < 5; ++trial) {
      const double k = gen.uniform(0.5, 3.0);
      auto f = [&](double x) { return x * (1 - x) * std::exp(k * x); };
      const double total = gk([&](double x) { return f(x) * f(x); }, 0.0, 1.0);
      const auto c = expand(sample(g, f), DirichletLaplacian(40, 1.0), g);
      double partial = 0.0, previous = total;
      for (double cn : c) {
        partial += cn * cn;
        const double err = total - partial;
        CHECK(err <= previous);
        CHECK(err >= -1e-7 * total);
        previous = err;
      }
      CHECK(std::abs(previous) <= 1e-7 * total);
    }
  }
}
