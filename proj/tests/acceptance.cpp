// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fail.
// --only 4,7 restricts the run; --workdir receives acceptance.json.

#include <Eigen/Geometry>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "consparse/csv.hpp"
#include "consparse/data.hpp"
#include "consparse/hyper.hpp"
#include "consparse/plast.hpp"
#include "consparse/problems.hpp"
#include "consparse/symbolic.hpp"
#include "consparse/train.hpp"
#include "support.hpp"

using namespace consparse;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// ---- settings for the training-based criteria

struct GentSettings {
  std::vector<int> hidden{30};
  double lambda = 1e-4;
  std::vector<double> lambda_sweep{1e-5, 1e-4, 1e-3};
  int epochs = 20000;
  int mc_samples = 8;
  int seeds = 5;
  int n_points = 50;
  double delta = 0.2;
  double max_active = 40;
  double max_rel_l2 = 0.05;
};

struct TreloarSettings {
  double lambda = 1e-3;
  int epochs = 50000;
  int mc_samples = 8;
  int seeds = 5;
  double min_r2 = 0.97;
  std::size_t max_active = 50;
};

struct YieldSettings {
  double lambda = 1e-4;
  int epochs = 100000;
  int mc_samples = 1;
  double max_radial = 0.05;
};

struct HardeningSettings {
  double lambda = 1e-3;
  int epochs = 30000;
  int mc_samples = 8;
};

// ---- reporting

struct Outcome {
  bool pass = false;
  std::string detail;
  json data = json::object();
};

std::string fmt(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

double now_s() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

// ---- fitted models shared by the fidelity check

struct Fitted {
  std::string name;
  Network net;
  Wrapper wrapper;
  std::function<Bindings(std::mt19937_64&)> sample;
  bool torsion_ok = false;
};

std::vector<Fitted> g_fitted;

Mat3 random_F(std::mt19937_64& rng, double d) {
  std::uniform_real_distribution<double> ud(-d, d);
  for (;;) {
    Mat3 F = Mat3::Identity();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) F(i, j) += ud(rng);
    if (F.determinant() > 0.0) return F;
  }
}

Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Eigen::Quaterniond q(nd(rng), nd(rng), nd(rng), nd(rng));
  q.normalize();
  return q.toRotationMatrix();
}

Network random_compressible(std::mt19937_64& rng, const std::vector<int>& hidden) {
  std::vector<int> w{3};
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(1);
  Network net = testsupport::random_network(NetKind::Icnn, w, rng, 0.5);
  net.input_offset = {3.0, 3.0, 1.0};
  return net;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ---- 1: autodiff

Outcome criterion1() {
  Outcome o;
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  int bad_first = 0, checked_first = 0;
  double worst_first = 0.0;
  // |a - b| over the allowed deviation; <= 1 means within tolerance
  auto ratio = [](double a, double b, double rel, double abs_floor) {
    return std::abs(a - b) / std::max(rel * std::max(std::abs(a), std::abs(b)), abs_floor);
  };

  for (int trial = 0; trial < 1000; ++trial) {
    auto e = testsupport::random_expr(rng, 3);
    std::vector<double> x0{ud(rng), ud(rng), ud(rng)};
    Tape t;
    std::vector<Var> xv;
    for (double v : x0) xv.push_back(t.variable(v));
    auto g = t.gradient(e.eval(xv), xv);
    for (int i = 0; i < 3; ++i) {
      auto xp = x0, xm = x0;
      xp[i] += 1e-5;
      xm[i] -= 1e-5;
      double fd = (e.eval(xp) - e.eval(xm)) / 2e-5;
      ++checked_first;
      if (!testsupport::close_rel(g[i], fd, 1e-6, 1e-8)) ++bad_first;
      worst_first = std::max(worst_first, ratio(g[i], fd, 1e-6, 1e-8));
    }
  }

  // input gradients of full ICNN potentials
  int bad_pot = 0;
  double worst_pot = 0.0;
  for (int m = 0; m < 20; ++m) {
    Network net = random_compressible(rng, m % 2 ? std::vector<int>{30} : std::vector<int>{8, 8});
    CompressiblePotential pot(net);
    for (int k = 0; k < 20; ++k) {
      auto inv = invariants(random_F(rng, 0.3));
      auto g = pot.energy_gradient(inv.I1, inv.I2, inv.J);
      std::array<double, 3> p{inv.I1, inv.I2, inv.J}, ga{g.dI1, g.dI2, g.dJ};
      for (int i = 0; i < 3; ++i) {
        auto a = p, b = p;
        const double h = 1e-5;
        a[i] += h;
        b[i] -= h;
        double fd = (pot.energy(a[0], a[1], a[2]) - pot.energy(b[0], b[1], b[2])) / (2 * h);
        if (!testsupport::close_rel(ga[i], fd, 1e-6, 1e-8)) ++bad_pot;
        worst_pot = std::max(worst_pot, ratio(ga[i], fd, 1e-6, 1e-8));
      }
    }
  }

  // parameter gradients of stress-based losses (second order)
  int bad_second = 0, checked_second = 0;
  double worst_second = 0.0;
  auto check_problem = [&](const Problem& prob, Network net) {
    auto theta = test_parameters(net);
    Tape t;
    std::vector<Var> tv;
    for (double v : theta) tv.push_back(t.variable(v));
    Var loss = prob.data_loss(t, net, tv, nullptr);
    auto g = t.gradient(loss, tv);
    std::uniform_int_distribution<std::size_t> pick(0, theta.size() - 1);
    for (int k = 0; k < 15; ++k) {
      std::size_t i = pick(rng);
      const double h = 1e-6 * std::max(1.0, std::abs(theta[i]));
      auto tp = theta, tm = theta;
      tp[i] += h;
      tm[i] -= h;
      double fd = (prob.train_loss(net, tp) - prob.train_loss(net, tm)) / (2 * h);
      ++checked_second;
      if (!testsupport::close_rel(g[i], fd, 1e-5, 1e-9)) ++bad_second;
      worst_second = std::max(worst_second, ratio(g[i], fd, 1e-5, 1e-9));
    }
  };
  {
    Dataset d = generate_compressible(HyperLaw::GentGent, 0.2, 12, 7);
    CompressibleProblem prob(d.stress, {}, {}, HyperLaw::GentGent);
    for (int m = 0; m < 6; ++m) {
      std::mt19937_64 r(m);
      Network net = prob.make_network(m % 2 ? std::vector<int>{30} : std::vector<int>{8, 8}, NetKind::Icnn, r);
      for (auto& p : net.params) p.log_alpha = 10.0;
      check_problem(prob, net);
    }
  }
  {
    Dataset d = load_embedded("treloar-20C");
    IncompressibleProblem prob(d.curves, {}, 20);
    for (int m = 0; m < 4; ++m) {
      std::mt19937_64 r(10 + m);
      Network net = prob.make_network({30}, NetKind::Icnn, r);
      for (auto& p : net.params) p.log_alpha = 10.0;
      check_problem(prob, net);
    }
  }
  o.pass = bad_first == 0 && bad_pot == 0 && bad_second == 0;
  o.detail = "random graphs " + std::to_string(checked_first - bad_first) + "/" + std::to_string(checked_first) +
             " (worst error/tolerance " + fmt(worst_first, 2) + "), potential gradients worst " + fmt(worst_pot, 2) +
             ", stress param-gradients " + std::to_string(checked_second - bad_second) + "/" +
             std::to_string(checked_second) + " (worst " + fmt(worst_second, 2) + ")";
  o.data = {{"first_order_failures", bad_first},
            {"potential_failures", bad_pot},
            {"second_order_failures", bad_second},
            {"worst_first", worst_first},
            {"worst_potential", worst_pot},
            {"worst_second", worst_second}};
  return o;
}

// ---- 2: structure

Outcome criterion2() {
  Outcome o;
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  int convex_viol = 0;
  double worst_gap = -1e300;
  for (int m = 0; m < 20; ++m) {
    Network net = random_compressible(rng, m % 2 ? std::vector<int>{30} : std::vector<int>{10, 10});
    auto rnd = [&] {
      return std::vector<double>{2.0 + 3.0 * u01(rng), 2.0 + 3.0 * u01(rng), 0.5 + u01(rng)};
    };
    for (int k = 0; k < 1000; ++k) {
      auto x = rnd(), y = rnd();
      std::vector<double> mid(3);
      for (int i = 0; i < 3; ++i) mid[i] = 0.5 * (x[i] + y[i]);
      double gap = evaluate(net, mid) - 0.5 * (evaluate(net, x) + evaluate(net, y));
      worst_gap = std::max(worst_gap, gap);
      if (gap > 1e-9) ++convex_viol;
    }
  }

  int mono_viol = 0, pos_viol = 0;
  for (int m = 0; m < 20; ++m) {
    const int nin = m % 2 ? 1 : 2;
    std::vector<int> w{nin, 30, 1};
    if (m % 4 == 0) w = {nin, 10, 10, 1};
    Network net = make_network(NetKind::Monotone, w, rng);
    for (int k = 0; k < 1000; ++k) {
      std::vector<double> x(nin);
      for (auto& v : x) v = -5.0 + 10.0 * u01(rng);
      double f = evaluate(net, x);
      if (!(f > 0.0)) ++pos_viol;
      for (int i = 0; i < nin; ++i) {
        auto xp = x;
        xp[i] += 1e-3;
        if (evaluate(net, xp) - f < -1e-10) ++mono_viol;
      }
    }
  }

  int norm_viol = 0;
  double worst_S0 = 0.0, worst_obj = 0.0, worst_iso = 0.0;
  for (int m = 0; m < 100; ++m) {
    Network net = random_compressible(rng, m % 2 ? std::vector<int>{30} : std::vector<int>{8, 8});
    CompressiblePotential pot(net);
    if (pot.energy(3.0, 3.0, 1.0) != 0.0) ++norm_viol;
    worst_S0 = std::max(worst_S0, pot.stress(Mat3::Identity()).cwiseAbs().maxCoeff());
    for (int k = 0; k < 5; ++k) {
      Mat3 F = random_F(rng, 0.3), R = random_rotation(rng);
      Mat3 S = pot.stress(F);
      worst_obj = std::max(worst_obj, (pot.stress(R * F) - S).cwiseAbs().maxCoeff());
      worst_iso = std::max(worst_iso, (pot.stress(F * R) - R.transpose() * S * R).cwiseAbs().maxCoeff());
    }
  }
  o.pass = convex_viol == 0 && mono_viol == 0 && pos_viol == 0 && norm_viol == 0 && worst_S0 < 1e-8 &&
           worst_obj < 1e-10 && worst_iso < 1e-10;
  o.detail = "convexity violations " + std::to_string(convex_viol) + "/20000 (max gap " + fmt(worst_gap, 3) +
             "), monotone violations " + std::to_string(mono_viol) + ", nonpositive outputs " +
             std::to_string(pos_viol) + ", psi(3,3,1) != 0: " + std::to_string(norm_viol) + ", max|S(I)| " +
             fmt(worst_S0, 2) + ", objectivity " + fmt(worst_obj, 2) + ", isotropy " + fmt(worst_iso, 2);
  o.data = {{"convexity_violations", convex_viol}, {"monotone_violations", mono_viol},
            {"positivity_violations", pos_viol},   {"normalization_violations", norm_viol},
            {"max_S_identity", worst_S0},          {"objectivity", worst_obj},
            {"isotropy", worst_iso}};
  return o;
}

// ---- 3: gates

Outcome criterion3() {
  Outcome o;
  std::mt19937_64 rng(303);
  double sum = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) sum += expected_l0_penalty(init_gated(0.5, rng));
  const double mean = sum / n;

  // train with a strong penalty so that gates shut, then check for exact zeros
  YieldProblem prob(load_embedded("tresca").yield, 1.0);
  TrainConfig cfg;
  cfg.hidden = {12};
  cfg.epochs = 1500;
  cfg.lr = 1e-2;
  cfg.lambda = 1e-2;
  Network net;
  train_run(cfg, prob, 0, net);
  auto th = test_parameters(net);
  std::size_t pruned = 0, nonzero_pruned = 0;
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (test_gate(net.params[i], net.gates) == 0.0) {
      ++pruned;
      if (th[i] != 0.0) ++nonzero_pruned;
    }
  }
  // forced shut gates
  std::size_t forced_bad = 0;
  for (int i = 0; i < 1000; ++i) {
    GatedParam gp = init_gated(std::normal_distribution<double>(0.0, 3.0)(rng), rng);
    gp.log_alpha = -10.0;
    if (gp.theta_bar * test_gate(gp) != 0.0) ++forced_bad;
  }
  o.pass = std::abs(mean - 0.8318) < 0.02 && pruned > 0 && nonzero_pruned == 0 && forced_bad == 0;
  o.detail = "mean initial penalty " + fmt(mean, 5) + " (target 0.8318 +- 0.02), trained net: " +
             std::to_string(pruned) + "/" + std::to_string(net.size()) + " gates shut, " +
             std::to_string(nonzero_pruned) + " of them nonzero; forced-shut nonzero " + std::to_string(forced_bad);
  o.data = {{"mean_penalty", mean}, {"pruned", pruned}, {"pruned_nonzero", nonzero_pruned}};
  return o;
}

// ---- 4: Gent-Gent

Outcome criterion4(const GentSettings& s) {
  Outcome o;
  Dataset d = generate_compressible(HyperLaw::GentGent, s.delta, s.n_points, 1);
  auto sp = split_dataset(d.stress, 0.8, 0);
  auto test = generate_compressible(HyperLaw::GentGent, 0.3, 1000, 2).stress;
  CompressibleProblem prob(sp.train, sp.val, test, HyperLaw::GentGent);

  TrainConfig cfg;
  cfg.hidden = s.hidden;
  cfg.epochs = s.epochs;
  cfg.mc_samples = s.mc_samples;
  cfg.log_every = s.epochs;
  cfg.seeds.clear();
  for (int k = 0; k < s.seeds; ++k) cfg.seeds.push_back(static_cast<std::uint64_t>(k));

  json sweep = json::object();
  std::map<double, double> mean_active;
  bool main_pass = false;
  for (double lam : s.lambda_sweep) {
    cfg.lambda = lam;
    double t0 = now_s();
    ExperimentResult res = run_experiment(cfg, prob);
    std::vector<double> act, l2;
    for (std::size_t k = 0; k < res.runs.size(); ++k) {
      act.push_back(static_cast<double>(active_count(res.models[k].params, res.models[k].gates)));
      l2.push_back(prob.uniaxial_rel_l2(res.models[k], 0.8, 1.2, 81));
    }
    mean_active[lam] = std::accumulate(act.begin(), act.end(), 0.0) / act.size();
    const Network& sel = res.models[res.selected];
    double sel_l2 = prob.uniaxial_rel_l2(sel, 0.8, 1.2, 81);
    double med_act = median_of(act);
    sweep[fmt(lam, 3)] = {{"active", act},
                          {"uniaxial_rel_l2", l2},
                          {"selected_seed", res.runs[res.selected].seed},
                          {"selected_rel_l2", sel_l2},
                          {"median_active", med_act},
                          {"seconds", now_s() - t0}};
    std::cout << "  gent-gent lambda " << fmt(lam, 3) << ": active " << json(act).dump() << ", selected UT rel L2 "
              << fmt(sel_l2, 3) << " (" << fmt(now_s() - t0, 3) << " s)" << std::endl;
    if (lam == s.lambda) {
      main_pass = med_act <= s.max_active && sel_l2 < s.max_rel_l2;
      o.detail = "lambda " + fmt(lam, 3) + ": median active " + fmt(med_act, 3) + " (<= " + fmt(s.max_active, 3) +
                 "), UT rel L2 of median-loss run " + fmt(100 * sel_l2, 3) + "% (< 5%)";
      g_fitted.push_back({"gent-gent", sel, Wrapper::Compressible, [](std::mt19937_64& r) {
                            auto inv = invariants(random_F(r, 0.2));
                            return Bindings{{"I1", inv.I1}, {"I2", inv.I2}, {"J", inv.J}};
                          }});
    }
  }
  bool ordering = true;
  for (std::size_t i = 1; i < s.lambda_sweep.size(); ++i)
    if (!(mean_active[s.lambda_sweep[i]] < mean_active[s.lambda_sweep[i - 1]])) ordering = false;
  std::string ord;
  for (double lam : s.lambda_sweep) ord += (ord.empty() ? "" : " > ") + fmt(mean_active[lam], 3);
  o.detail += "; mean active over lambda sweep " + ord + (ordering ? " (ordered)" : " (NOT ordered)");
  o.pass = main_pass && ordering;
  o.data = sweep;
  return o;
}

// ---- 5: Treloar

Outcome criterion5(const TreloarSettings& s) {
  Outcome o;
  Dataset d = load_embedded("treloar-20C");
  std::vector<ModePoint> train, test;
  double ut_max = 1.0, et_max = 1.0, ps_max = 1.0;
  for (const auto& p : d.curves) {
    if (p.mode == Mode::UT || p.mode == Mode::ET) train.push_back(p);
    if (p.mode == Mode::PS) test.push_back(p);
    if (p.mode == Mode::UT) ut_max = std::max(ut_max, p.x);
    if (p.mode == Mode::ET) et_max = std::max(et_max, p.x);
    if (p.mode == Mode::PS) ps_max = std::max(ps_max, p.x);
  }
  IncompressibleProblem prob(train, test, 20);
  TrainConfig cfg;
  cfg.lambda = s.lambda;
  cfg.epochs = s.epochs;
  cfg.mc_samples = s.mc_samples;
  cfg.log_every = s.epochs;
  cfg.seeds.clear();
  for (int k = 0; k < s.seeds; ++k) cfg.seeds.push_back(static_cast<std::uint64_t>(k));
  ExperimentResult res = run_experiment(cfg, prob);
  const Network net = res.models[res.selected];
  json m = prob.metrics(net);
  double r2 = m["test_r2"].value("PS", -1e300);
  std::size_t act = active_count(net.params, net.gates);
  o.pass = r2 >= s.min_r2 && act <= s.max_active;
  o.detail = "PS R^2 " + fmt(r2, 5) + " (>= " + fmt(s.min_r2, 3) + "), train R^2 " + m["train_r2"].dump() +
             ", active " + std::to_string(act) + " (<= " + std::to_string(s.max_active) + "), median-loss seed " +
             std::to_string(res.runs[res.selected].seed) + " of " + std::to_string(s.seeds);
  o.data = m;
  o.data["active"] = act;
  g_fitted.push_back({"treloar-20C", net, Wrapper::Incompressible,
                      [=](std::mt19937_64& r) {
                        std::uniform_real_distribution<double> ud(0.0, 1.0);
                        int k = std::uniform_int_distribution<int>(0, 2)(r);
                        Mode mode = k == 0 ? Mode::UT : (k == 1 ? Mode::ET : Mode::PS);
                        double hi = k == 0 ? ut_max : (k == 1 ? et_max : ps_max);
                        auto inv = mode_invariants(mode, 1.0 + (hi - 1.0) * ud(r));
                        return Bindings{{"I1", inv[0]}, {"I2", inv[1]}, {"J", 1.0}, {"p", 0.0}};
                      },
                      true});
  return o;
}

// ---- 6: yield surfaces

Outcome criterion6(const YieldSettings& s) {
  Outcome o;
  bool pass = true;
  std::string detail;
  std::mt19937_64 rng(606);
  for (auto [name, law] : {std::pair{"drucker", YieldLaw::Drucker}, std::pair{"cazacu", YieldLaw::Cazacu},
                           std::pair{"tresca", YieldLaw::Tresca}}) {
    Dataset d = load_embedded(name);
    YieldProblem prob(d.yield, 1.0);
    TrainConfig cfg;
    cfg.lambda = s.lambda;
    cfg.epochs = s.epochs;
    cfg.mc_samples = s.mc_samples;
    cfg.log_every = s.epochs;
    Network net;
    train_run(cfg, prob, 0, net);
    auto err = prob.radial_errors(net);
    double mx = *std::max_element(err.begin(), err.end());
    double rmax = 0.0;
    for (const auto& p : d.yield) rmax = std::max(rmax, std::hypot(p.pi1, p.pi2));
    // convexity suite on the fitted function
    std::uniform_real_distribution<double> ud(-1.5 * rmax, 1.5 * rmax);
    int viol = 0;
    for (int k = 0; k < 1000; ++k) {
      std::vector<double> x{ud(rng), ud(rng)}, y{ud(rng), ud(rng)}, mid{0.5 * (x[0] + y[0]), 0.5 * (x[1] + y[1])};
      if (evaluate(net, mid) > 0.5 * (evaluate(net, x) + evaluate(net, y)) + 1e-9) ++viol;
    }
    bool ok = mx < s.max_radial && viol == 0;
    pass = pass && ok;
    std::size_t act = active_count(net.params, net.gates);
    detail += std::string(detail.empty() ? "" : "; ") + name + ": max radial err " + fmt(100 * mx, 3) +
              "%, convexity violations " + std::to_string(viol) + ", active " + std::to_string(act);
    o.data[name] = {{"max_radial_error", mx}, {"convexity_violations", viol}, {"active", act}};
    g_fitted.push_back({name, net, Wrapper::Yield, [rmax](std::mt19937_64& r) {
                          std::uniform_real_distribution<double> u(-1.2 * rmax, 1.2 * rmax);
                          return Bindings{{"pi1", u(r)}, {"pi2", u(r)}};
                        }});
  }
  // regenerated Drucker points
  Dataset regen = yield_points_from_law(YieldLaw::Drucker, 30), table = load_embedded("drucker");
  double worst = 0.0;
  for (std::size_t i = 0; i < 30; ++i)
    worst = std::max({worst, std::abs(regen.yield[i].pi1 - table.yield[i].pi1),
                      std::abs(regen.yield[i].pi2 - table.yield[i].pi2)});
  pass = pass && worst < 2e-3;
  detail += "; Drucker ray points vs table max diff " + fmt(worst, 3);
  o.data["drucker_regen_max_diff"] = worst;
  o.pass = pass;
  o.detail = detail;
  return o;
}

// ---- 7: hardening

Outcome criterion7(const HardeningSettings& s) {
  Outcome o;
  bool pass = true;
  std::string detail;
  for (const char* name : {"U71Mn", "SS316L", "40Cr3MoV"}) {
    Dataset d = load_embedded(name);
    ElasticConstants ec = material_constants(name);
    HardeningProblem prob(d.hardening, ec, 1e3);
    TrainConfig cfg;
    cfg.lambda = s.lambda;
    cfg.epochs = s.epochs;
    cfg.mc_samples = s.mc_samples;
    cfg.log_every = s.epochs;
    Network net;
    train_run(cfg, prob, 0, net);
    json m = prob.metrics(net);
    double r2 = m["r2"].get<double>(), R0 = m["R0"].get<double>();
    bool mono = m["monotone_extrapolation"].get<bool>();
    bool ok = r2 >= 0.98 && R0 >= 0.95 && R0 <= 1.05 && mono;
    pass = pass && ok;
    std::size_t act = active_count(net.params, net.gates);
    detail += std::string(detail.empty() ? "" : "; ") + name + ": R^2 " + fmt(r2, 5) + ", R(0) " + fmt(R0, 5) +
              (mono ? ", monotone to 1.3x" : ", NOT monotone") + ", active " + std::to_string(act);
    o.data[name] = m;
    o.data[name]["active"] = act;
    const double rmax = prob.max_strain();
    g_fitted.push_back({name, net, Wrapper::Hardening, [rmax](std::mt19937_64& r) {
                          return Bindings{{"r", std::uniform_real_distribution<double>(0.0, rmax)(r)}};
                        }});
  }
  o.pass = pass;
  o.detail = detail;
  return o;
}

// ---- 8: expressions

double forward_reference(const Fitted& f, const Bindings& b) {
  switch (f.wrapper) {
    case Wrapper::Compressible:
      return CompressiblePotential(f.net).energy(b.at("I1"), b.at("I2"), b.at("J"));
    case Wrapper::Incompressible:
      return IncompressiblePotential(f.net).energy(b.at("I1"), b.at("I2"));
    case Wrapper::Yield: {
      std::vector<double> x{b.at("pi1"), b.at("pi2")};
      return evaluate(f.net, x);
    }
    case Wrapper::Hardening: {
      std::vector<double> x{b.at("r")};
      return evaluate(f.net, x);
    }
    case Wrapper::Raw: break;
  }
  return NAN;
}

Outcome criterion8() {
  Outcome o;
  if (g_fitted.empty()) {
    o.detail = "no fitted models (criteria 4-7 not run)";
    return o;
  }
  bool pass = true;
  std::string detail;
  std::mt19937_64 rng(808);
  for (const Fitted& f : g_fitted) {
    ExprPtr e = extract_expression(f.net, f.wrapper);
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
      Bindings b = f.sample(rng);
      worst = std::max(worst, std::abs(evaluate(e, b) - forward_reference(f, b)));
    }
    bool family = f.wrapper == Wrapper::Hardening ? is_sigmoid_rational_family(e) : is_softplus_sum_family(e);
    bool ok = worst < 1e-9 && family;
    pass = pass && ok;
    detail += std::string(detail.empty() ? "" : "; ") + f.name + " max dev " + fmt(worst, 2) +
              (family ? "" : " (family mismatch)");
    o.data[f.name] = {{"max_deviation", worst}, {"family", family}, {"nodes", node_count(e)},
                      {"expression", render(e)}};
  }
  o.pass = pass;
  o.detail = detail;
  return o;
}

// ---- 9: torsion quadrature

Outcome criterion9() {
  Outcome o;
  std::mt19937_64 rng(909);
  double worst = 0.0;
  int count = 0;
  for (int m = 0; m < 50; ++m) {
    Network net = testsupport::random_network(NetKind::Icnn, {2, m % 2 ? 30 : 8, 1}, rng, 0.5);
    // first-layer weights made nonnegative: energy grows with both invariants
    for (std::size_t i = net.layers()[0].w; i < net.layers()[0].b; ++i)
      net.params[i].theta_bar = std::abs(net.params[i].theta_bar);
    net.input_offset = {3.0, 3.0};
    IncompressiblePotential pot(net);
    for (double phi : {0.3, 1.0, 2.0}) {
      double a = torsion_torque(pot, phi, 100), b = torsion_torque(pot, phi, 10000);
      worst = std::max(worst, std::abs(a - b) / std::abs(b));
      ++count;
    }
  }
  for (const Fitted& f : g_fitted) {
    if (!f.torsion_ok) continue;
    IncompressiblePotential pot(f.net);
    for (double phi : {0.3, 1.0, 2.0}) {
      double a = torsion_torque(pot, phi, 100), b = torsion_torque(pot, phi, 10000);
      worst = std::max(worst, std::abs(a - b) / std::abs(b));
      ++count;
    }
  }
  o.pass = worst < 1e-3;
  o.detail = std::to_string(count) + " torques, max relative error n=100 vs n=10^4: " + fmt(worst, 3);
  o.data = {{"max_rel_error", worst}, {"count", count}};
  return o;
}

// ---- 10: determinism

std::string experiment_fingerprint(const Problem& prob, const TrainConfig& cfg) {
  ExperimentResult res = run_experiment(cfg, prob);
  json j = prob.metrics(res.models[res.selected]);
  json runs = json::array();
  for (const auto& r : res.runs)
    runs.push_back({{"seed", r.seed}, {"final_train_loss", r.final_train_loss}, {"active", r.active_history}});
  j["runs"] = runs;
  j["network"] = to_json(res.models[res.selected]);
  return j.dump();
}

Outcome criterion10() {
  Outcome o;
  bool same = true;
  std::string detail;
  {
    YieldProblem prob(load_embedded("cazacu").yield, 1.0);
    TrainConfig cfg;
    cfg.hidden = {10};
    cfg.epochs = 400;
    cfg.mc_samples = 2;
    cfg.lambda = 1e-3;
    cfg.seeds = {0, 1, 2};
    cfg.threads = 3;
    std::string a = experiment_fingerprint(prob, cfg);
    cfg.threads = 1;
    std::string b = experiment_fingerprint(prob, cfg);
    same = same && a == b;
    detail = "yield (3 seeds, threads 3 vs 1) " + std::string(a == b ? "identical" : "DIFFERENT");
  }
  {
    Dataset d = generate_compressible(HyperLaw::MooneyRivlin, 0.2, 20, 3);
    auto sp = split_dataset(d.stress, 0.8, 0);
    auto test = generate_compressible(HyperLaw::MooneyRivlin, 0.3, 50, 4).stress;
    CompressibleProblem prob(sp.train, sp.val, test, HyperLaw::MooneyRivlin);
    TrainConfig cfg;
    cfg.hidden = {8};
    cfg.epochs = 150;
    cfg.lambda = 1e-4;
    cfg.seeds = {4, 5};
    std::string a = experiment_fingerprint(prob, cfg), b = experiment_fingerprint(prob, cfg);
    same = same && a == b;
    detail += std::string(", compressible (2 seeds) ") + (a == b ? "identical" : "DIFFERENT");
  }
  o.pass = same;
  o.detail = detail;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  fs::path workdir = "acceptance_runs";
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      std::string tok;
      while (std::getline(ss, tok, ',')) only.insert(std::stoi(tok));
    } else if (a == "--workdir" && i + 1 < argc) {
      workdir = argv[++i];
    } else {
      std::cerr << "usage: acceptance [--only 1,2,...] [--workdir DIR]\n";
      return 2;
    }
  }
  auto want = [&](int k) { return only.empty() || only.count(k) > 0; };

  GentSettings gent;
  TreloarSettings treloar;
  YieldSettings yield;
  HardeningSettings hardening;

  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, [] { return criterion1(); }},
      {2, [] { return criterion2(); }},
      {3, [] { return criterion3(); }},
      {4, [&] { return criterion4(gent); }},
      {5, [&] { return criterion5(treloar); }},
      {6, [&] { return criterion6(yield); }},
      {7, [&] { return criterion7(hardening); }},
      {8, [] { return criterion8(); }},
      {9, [] { return criterion9(); }},
      {10, [] { return criterion10(); }},
  };

  json report = json::object();
  int failed = 0;
  for (const auto& [id, fn] : criteria) {
    if (!want(id)) continue;
    double t0 = now_s();
    Outcome out;
    try {
      out = fn();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    double dt = now_s() - t0;
    if ((id == 1 || id == 2) && dt >= 60.0) {
      out.pass = false;
      out.detail += "; over the 60 s budget";
    }
    if (!out.pass) ++failed;
    std::cout << "criterion " << id << ": " << (out.pass ? "PASS" : "FAIL") << " [" << fmt(dt, 3) << " s] "
              << out.detail << std::endl;
    report[std::to_string(id)] = {{"pass", out.pass}, {"detail", out.detail}, {"seconds", dt}, {"data", out.data}};
  }
  try {
    fs::create_directories(workdir);
    csv::write_file((workdir / "acceptance.json").string(), report.dump(2) + "\n");
  } catch (const std::exception& e) {
    std::cerr << "could not write report: " << e.what() << "\n";
  }
  return failed == 0 ? 0 : 1;
}
