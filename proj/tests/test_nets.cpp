#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <random>

#include "consparse/nets.hpp"
#include "support.hpp"

using namespace consparse;

namespace {

// every parameter zero and open
void zero_open(Network& net) {
  for (auto& p : net.params) p = GatedParam{0.0, 10.0};
}

double eval1(const Network& net, double x) { return evaluate(net, std::vector<double>{x}); }

}  // namespace

TEST_CASE("constant network returns its final bias") {
  std::mt19937_64 rng(1);
  for (NetKind k : {NetKind::Icnn, NetKind::Mlp, NetKind::Monotone}) {
    Network net = make_network(k, {3, 5, 4, 1}, rng);
    zero_open(net);
    net.params[net.layers().back().b].theta_bar = 2.5;
    for (double x : {-3.0, 0.0, 4.0}) CHECK(evaluate(net, std::vector<double>{x, 1.0, x * x}) == 2.5);
  }
}

TEST_CASE("hand-composed softplus network") {
  std::mt19937_64 rng(1);
  Network net = make_network(NetKind::Icnn, {1, 1, 1}, rng);
  zero_open(net);
  const auto& L = net.layers();
  net.params[L[0].w].theta_bar = 1.0;
  net.params[L[1].w].theta_bar = 1.0;
  for (double x : {-1.0, 0.0, 1.0}) CHECK(eval1(net, x) == doctest::Approx(softplus(x)).epsilon(1e-15));
}

TEST_CASE("hand-composed sigmoid neuron") {
  std::mt19937_64 rng(1);
  Network net = make_network(NetKind::Monotone, {1, 1, 1}, rng);
  zero_open(net);
  const auto& L = net.layers();
  net.params[L[0].w].theta_bar = 1.0;
  net.params[L[1].w].theta_bar = 1.0;
  CHECK(eval1(net, 0.0) == 0.5);
  CHECK(eval1(net, 2.0) == doctest::Approx(sigmoid(2.0)));
}

TEST_CASE("width mismatch") {
  std::mt19937_64 rng(1);
  Network net = make_network(NetKind::Icnn, {2, 4, 1}, rng);
  try {
    (void)evaluate(net, std::vector<double>{1.0});
    FAIL("expected ShapeError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ShapeError);
  }
  std::vector<double> theta(3, 0.0), x{1.0, 2.0};
  CHECK_THROWS_AS(forward<double>(net, theta, x), Error);
}

TEST_CASE("projection clamps only constrained weights") {
  std::mt19937_64 rng(2);
  Network net = make_network(NetKind::Icnn, {2, 3, 3, 1}, rng);
  const auto& L = net.layers();
  REQUIRE(L[1].passthrough);
  for (auto& p : net.params) p.theta_bar = -0.3;
  net.params[L[1].w + 1].theta_bar = 0.7;
  project_constraints(net);
  CHECK(net.params[L[1].w].theta_bar == 0.0);
  CHECK(net.params[L[1].w + 1].theta_bar == 0.7);
  CHECK(net.params[L[1].p].theta_bar == -0.3);  // passthrough left alone
  CHECK(net.params[L[0].w].theta_bar == -0.3);  // first layer free
  CHECK(net.params[L[1].b].theta_bar == -0.3);

  Network mono = make_network(NetKind::Monotone, {2, 3, 1}, rng);
  for (auto& p : mono.params) p.theta_bar = -0.5;
  project_constraints(mono);
  for (auto& p : mono.params) CHECK(p.theta_bar == 0.0);
}

TEST_CASE("initialisation respects the constraints") {
  std::mt19937_64 rng(3);
  for (NetKind k : {NetKind::Icnn, NetKind::Monotone}) {
    Network net = make_network(k, {3, 8, 8, 1}, rng);
    for (std::size_t i = 0; i < net.size(); ++i)
      if (net.constrained[i]) CHECK(net.params[i].theta_bar >= 0.0);
  }
}

TEST_CASE("property: ICNN midpoint convexity") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ud(-3.0, 3.0);
  for (int m = 0; m < 5; ++m) {
    Network net = testsupport::random_network(NetKind::Icnn, {3, 6, 5, 1}, rng);
    for (int i = 0; i < 200; ++i) {
      std::vector<double> x{ud(rng), ud(rng), ud(rng)}, y{ud(rng), ud(rng), ud(rng)}, mid(3);
      for (int k = 0; k < 3; ++k) mid[k] = 0.5 * (x[k] + y[k]);
      CHECK(evaluate(net, mid) <= 0.5 * (evaluate(net, x) + evaluate(net, y)) + 1e-9);
    }
  }
}

TEST_CASE("property: monotone network is nonnegative and nondecreasing") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ud(-4.0, 4.0), step(0.0, 1.0);
  for (int m = 0; m < 5; ++m) {
    Network net = testsupport::random_network(NetKind::Monotone, {2, 6, 4, 1}, rng);
    for (int i = 0; i < 200; ++i) {
      std::vector<double> x{ud(rng), ud(rng)};
      std::vector<double> y{x[0] + step(rng), x[1] + step(rng)};
      double fx = evaluate(net, x);
      CHECK(fx >= 0.0);
      CHECK(evaluate(net, y) - fx >= -1e-10);
    }
  }
}

TEST_CASE("property: saturated gates are transparent") {
  std::mt19937_64 rng(6);
  Network net = testsupport::random_network(NetKind::Icnn, {3, 7, 1}, rng);
  auto gated = test_parameters(net);
  auto raw = raw_parameters(net);
  for (std::size_t i = 0; i < raw.size(); ++i) CHECK(std::memcmp(&gated[i], &raw[i], sizeof(double)) == 0);
  std::vector<double> x{0.2, -1.1, 0.4};
  double a = forward_scalar<double>(net, gated, x), b = forward_scalar<double>(net, raw, x);
  CHECK(std::memcmp(&a, &b, sizeof(double)) == 0);
}

TEST_CASE("Var and double forward agree") {
  std::mt19937_64 rng(7);
  Network net = testsupport::random_network(NetKind::Mlp, {2, 5, 5, 1}, rng);
  auto theta = test_parameters(net);
  std::vector<double> x{0.3, 0.9};
  Tape t;
  std::vector<Var> tv, xv;
  for (double v : theta) tv.push_back(t.variable(v));
  for (double v : x) xv.push_back(t.variable(v));
  Var out = forward_scalar<Var>(net, tv, xv);
  CHECK(out.value() == doctest::Approx(forward_scalar<double>(net, theta, x)).epsilon(1e-14));
}

TEST_CASE("checkpoint round trip") {
  std::mt19937_64 rng(8);
  Network net = testsupport::random_network(NetKind::Icnn, {3, 4, 4, 1}, rng);
  net.params[2].log_alpha = -3.25;
  net.input_offset = {3.0, 3.0, 1.0};
  net.input_scale = {0.5, 1.0, 2.0};
  Network back = network_from_json(nlohmann::json::parse(to_json(net).dump()));
  CHECK(back.widths == net.widths);
  CHECK(back.kind == net.kind);
  REQUIRE(back.size() == net.size());
  for (std::size_t i = 0; i < net.size(); ++i) {
    CHECK(back.params[i].theta_bar == net.params[i].theta_bar);
    CHECK(back.params[i].log_alpha == net.params[i].log_alpha);
  }
  std::vector<double> x{3.2, 2.9, 1.05};
  CHECK(evaluate(back, x) == evaluate(net, x));
}

TEST_CASE("corrupt checkpoints") {
  std::mt19937_64 rng(9);
  Network net = make_network(NetKind::Icnn, {2, 3, 1}, rng);
  auto expect_corrupt = [](const nlohmann::json& j) {
    try {
      (void)network_from_json(j);
      FAIL("expected CorruptCheckpoint");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::CorruptCheckpoint);
    }
  };
  auto j = to_json(net);
  auto j1 = j;
  j1["activation"] = "relu";
  expect_corrupt(j1);
  auto j2 = j;
  j2["theta_bar"].erase(0);
  expect_corrupt(j2);
  expect_corrupt(nlohmann::json::object());
  expect_corrupt(nlohmann::json::array());
}
