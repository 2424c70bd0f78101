#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "consparse/autodiff.hpp"
#include "support.hpp"

using namespace consparse;

TEST_CASE("forward values") {
  Tape t;
  CHECK(exp(t.constant(0.0)).value() == 1.0);
  CHECK(softplus(t.variable(0.0)).value() == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  Var x = t.variable(3.0);
  CHECK((x * x).value() == 9.0);
  CHECK((1.0 / x).value() == doctest::Approx(1.0 / 3.0));
  CHECK(max_const(x, 5.0).value() == 5.0);
  CHECK(min_const(x, 5.0).value() == 3.0);
}

TEST_CASE("log of a negative number is reported with its op") {
  Tape t;
  Var x = t.variable(-1.0);
  try {
    (void)log(x);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonFiniteValue);
    CHECK(e.detail().find("ln") != std::string::npos);
  }
}

TEST_CASE("mixing tapes is rejected") {
  Tape a, b;
  Var x = a.variable(1.0), y = b.variable(2.0);
  CHECK_THROWS_AS((void)(x + y), Error);
}

TEST_CASE("first derivatives") {
  Tape t;
  Var x = t.variable(3.0);
  Var y = x * x;
  CHECK(t.gradient(y, std::vector<Var>{x})[0] == 6.0);

  Tape t2;
  Var z = t2.variable(0.0);
  CHECK(t2.gradient(softplus(z), std::vector<Var>{z})[0] == doctest::Approx(0.5));
  Tape t3;
  Var w = t3.variable(0.0);
  CHECK(t3.gradient(sigmoid(w), std::vector<Var>{w})[0] == doctest::Approx(0.25));
}

TEST_CASE("second derivatives") {
  {
    Tape t;
    Var x = t.variable(2.0), a = t.variable(1.7);
    Var f = a * x * x;
    CHECK(t.gradient_of_gradient(f, x, std::vector<Var>{a})[0] == doctest::Approx(4.0));
  }
  {
    Tape t;
    Var x = t.variable(1.0);
    Var f = x * x * x;
    CHECK(t.gradient_of_gradient(f, x, std::vector<Var>{x})[0] == doctest::Approx(6.0));
  }
  {
    Tape t;
    Var x = t.variable(1.0), w = t.variable(0.0);
    Var f = softplus(w * x);
    double g = t.gradient_of_gradient(f, x, std::vector<Var>{w})[0];
    CHECK(g == doctest::Approx(0.5));
    // central difference of df/dx = w sigmoid(w x) in w
    auto dfdx = [](double wv) { return wv * sigmoid(wv * 1.0); };
    double h = 1e-5;
    CHECK(g == doctest::Approx((dfdx(h) - dfdx(-h)) / (2 * h)).epsilon(1e-8));
  }
}

TEST_CASE("random expressions agree with central differences") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  const double h = 1e-5;
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    auto e = testsupport::random_expr(rng, 3);
    std::vector<double> x0{ud(rng), ud(rng), ud(rng)};
    Tape t;
    std::vector<Var> xv;
    for (double v : x0) xv.push_back(t.variable(v));
    Var out = e.eval(xv);
    CHECK(out.value() == e.eval(x0));
    auto g = t.gradient(out, xv);
    for (int i = 0; i < 3; ++i) {
      auto xp = x0, xm = x0;
      xp[i] += h;
      xm[i] -= h;
      double fd = (e.eval(xp) - e.eval(xm)) / (2 * h);
      CHECK(testsupport::close_rel(g[i], fd, 1e-6, 1e-8));
      ++checked;
    }
  }
  CHECK(checked == 900);
}

TEST_CASE("gradient_graph matches gradient and differentiates again") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  const double h = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    auto e = testsupport::random_expr(rng, 2, 5);
    std::vector<double> x0{ud(rng), ud(rng)};
    Tape t;
    std::vector<Var> xv{t.variable(x0[0]), t.variable(x0[1])};
    Var out = e.eval(xv);
    auto g = t.gradient(out, xv);
    auto gg = t.gradient_graph(out, xv);
    for (int i = 0; i < 2; ++i) CHECK(gg[i].value() == doctest::Approx(g[i]).epsilon(1e-13));
    auto hess_row = t.gradient(gg[0], xv);
    auto dx0 = [&](std::vector<double> x) {
      Tape tt;
      std::vector<Var> v{tt.variable(x[0]), tt.variable(x[1])};
      return tt.gradient(e.eval(v), v)[0];
    };
    for (int j = 0; j < 2; ++j) {
      auto xp = x0, xm = x0;
      xp[j] += h;
      xm[j] -= h;
      double fd = (dx0(xp) - dx0(xm)) / (2 * h);
      CHECK(testsupport::close_rel(hess_row[j], fd, 1e-5, 1e-7));
    }
  }
}

TEST_CASE("replaying a tape is bit-identical") {
  std::mt19937_64 rng(3);
  auto e = testsupport::random_expr(rng, 2);
  auto run = [&] {
    Tape t;
    std::vector<Var> xv{t.variable(0.3), t.variable(-0.7)};
    Var out = e.eval(xv);
    auto g = t.gradient(out, xv);
    return std::vector<double>{out.value(), g[0], g[1]};
  };
  auto a = run(), b = run();
  for (int i = 0; i < 3; ++i) CHECK(std::memcmp(&a[i], &b[i], sizeof(double)) == 0);
}
