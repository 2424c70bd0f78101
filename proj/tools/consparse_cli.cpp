// consparse: fit, sweep, export and evaluate sparse constitutive networks

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <numbers>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "consparse/csv.hpp"
#include "consparse/data.hpp"
#include "consparse/errors.hpp"
#include "consparse/problems.hpp"
#include "consparse/symbolic.hpp"
#include "json.hpp"

#ifndef CONSPARSE_VERSION
#define CONSPARSE_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace consparse;

namespace {

std::vector<std::string> split_list(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

double parse_real(const std::string& s, const char* what) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (...) {
    pos = 0;
  }
  if (pos == 0 || pos != s.size()) throw Error(ErrorKind::InvalidArgument, std::string("bad ") + what + " '" + s + "'");
  return v;
}

// "30", "30-30" or "30,30"
std::vector<int> parse_hidden(const std::string& s) {
  std::string t = s;
  for (char& c : t)
    if (c == '-') c = ',';
  std::vector<int> h;
  for (const auto& p : split_list(t)) {
    int v = 0;
    try {
      v = std::stoi(p);
    } catch (...) {
      throw Error(ErrorKind::InvalidArgument, "bad hidden widths '" + s + "'");
    }
    if (v < 1) throw Error(ErrorKind::InvalidArgument, "hidden widths must be positive");
    h.push_back(v);
  }
  if (h.empty()) throw Error(ErrorKind::InvalidArgument, "no hidden widths in '" + s + "'");
  return h;
}

std::string hidden_name(const std::vector<int>& h) {
  std::string s;
  for (std::size_t i = 0; i < h.size(); ++i) s += (i ? "-" : "") + std::to_string(h[i]);
  return s;
}

std::string line(const csv::Row& r) { return csv::join(r) + "\r\n"; }

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_json(const fs::path& p, const json& j) { csv::write_file(p.string(), j.dump(2) + "\n"); }

std::string mode_tag(const ModePoint& p) { return p.compression ? "UC" : mode_name(p.mode); }

// ---------------------------------------------------------------- problem setup

struct DataOpts {
  std::string problem;
  std::string data;
  std::string csv_kind;
  std::string law = "gent-gent";
  int n_train = 50;
  double delta = 0.2;
  int n_test = 10000;
  double test_delta = 0.3;
  std::uint64_t data_seed = 1;
  std::string train_modes;
  std::string test_modes;
  int n_quad = 20;
  std::string material;
  double E = 0.0, nu = 0.0, sigma_y = 0.0;  // 0: take from the preset
  double w0 = 1e3;
  double w_anchor = 1.0;
  int n_points = 30;
  double split = 0.8;
  std::uint64_t split_seed = 0;

  void add_to(CLI::App* app) {
    app->add_option("--problem", problem, "hyper-compressible | hyper-incompressible | yield | hardening")
        ->required();
    app->add_option("--data", data, "embedded dataset name, 'generated', or a CSV path");
    app->add_option("--csv-kind", csv_kind, "mode-curve | torsion | yield-points | hardening | compressible");
    app->add_option("--law", law, "ground-truth law for generated data");
    app->add_option("--n-train", n_train, "generated training pool size (before the split)");
    app->add_option("--delta", delta, "training box half-width");
    app->add_option("--n-test", n_test, "generated test points");
    app->add_option("--test-delta", test_delta, "test box half-width");
    app->add_option("--data-seed", data_seed, "sampling seed for generated data");
    app->add_option("--train-modes", train_modes, "comma list, e.g. UT,ET");
    app->add_option("--test-modes", test_modes, "comma list, e.g. PS");
    app->add_option("--n-quad", n_quad, "torsion quadrature nodes");
    app->add_option("--material", material, "elastic constants preset (defaults to the dataset name)");
    app->add_option("--E", E, "Young's modulus [MPa]");
    app->add_option("--nu", nu, "Poisson ratio");
    app->add_option("--sigma-y", sigma_y, "initial yield stress [MPa]");
    app->add_option("--w0", w0, "weight of the R(0) = 1 condition");
    app->add_option("--w-anchor", w_anchor, "weight of the f(0) = -1 anchor");
    app->add_option("--n-points", n_points, "points for generated yield data");
    app->add_option("--split", split, "training fraction of the train/validation split");
    app->add_option("--split-seed", split_seed);
  }
};

struct Built {
  std::unique_ptr<Problem> problem;
  Dataset dataset;
  json info;
};

bool is_file(const std::string& s) { return s.find('/') != std::string::npos || s.ends_with(".csv"); }

Dataset load_data(const DataOpts& o, CsvKind default_kind) {
  if (o.data.empty()) throw Error(ErrorKind::InvalidArgument, "--data is required");
  if (is_file(o.data)) return ingest_csv(o.data, o.csv_kind.empty() ? default_kind : parse_csv_kind(o.csv_kind));
  return load_embedded(o.data);
}

Built build_problem(const DataOpts& o) {
  Built b;
  b.info["problem"] = o.problem;
  if (o.problem == "hyper-compressible") {
    std::optional<HyperLaw> law;
    if (o.data.empty() || o.data == "generated") {
      law = parse_hyper_law(o.law);
      b.dataset = generate_compressible(*law, o.delta, o.n_train, o.data_seed);
      b.info["law"] = law_name(*law);
      b.info["delta"] = o.delta;
      b.info["data_seed"] = o.data_seed;
    } else {
      b.dataset = load_data(o, CsvKind::Compressible);
      if (b.dataset.kind != DatasetKind::CompressibleFS)
        throw Error(ErrorKind::InvalidArgument, "dataset '" + o.data + "' has no F/S samples");
    }
    auto sp = split_dataset(b.dataset.stress, o.split, o.split_seed);
    std::vector<StressSample> test;
    if (law && o.n_test > 0) test = generate_compressible(*law, o.test_delta, o.n_test, o.data_seed + 1).stress;
    b.problem = std::make_unique<CompressibleProblem>(sp.train, sp.val, test, law);
  } else if (o.problem == "hyper-incompressible") {
    b.dataset = load_data(o, CsvKind::ModeCurve);
    if (b.dataset.kind != DatasetKind::ModeCurve)
      throw Error(ErrorKind::InvalidArgument, "dataset '" + o.data + "' has no mode curves");
    std::set<std::string> tr, te;
    for (const auto& m : split_list(o.train_modes)) tr.insert(m);
    for (const auto& m : split_list(o.test_modes)) te.insert(m);
    std::vector<ModePoint> train, test;
    for (const auto& p : b.dataset.curves) {
      std::string t = mode_tag(p);
      if (tr.empty() ? !te.count(t) : tr.count(t) > 0) train.push_back(p);
      if (te.count(t)) test.push_back(p);
    }
    if (train.empty()) throw Error(ErrorKind::EmptyDataset, "no training points for modes '" + o.train_modes + "'");
    b.info["train_modes"] = o.train_modes;
    b.info["test_modes"] = o.test_modes;
    b.problem = std::make_unique<IncompressibleProblem>(train, test, o.n_quad);
  } else if (o.problem == "yield") {
    if (o.data == "generated") {
      b.dataset = yield_points_from_law(parse_yield_law(o.law), o.n_points);
      b.info["law"] = o.law;
    } else {
      b.dataset = load_data(o, CsvKind::YieldPoints);
    }
    if (b.dataset.kind != DatasetKind::YieldPoints)
      throw Error(ErrorKind::InvalidArgument, "dataset '" + o.data + "' has no yield points");
    b.problem = std::make_unique<YieldProblem>(b.dataset.yield, o.w_anchor);
  } else if (o.problem == "hardening") {
    b.dataset = load_data(o, CsvKind::Hardening);
    if (b.dataset.kind != DatasetKind::Hardening)
      throw Error(ErrorKind::InvalidArgument, "dataset '" + o.data + "' has no hardening rows");
    ElasticConstants ec{o.E, o.nu, o.sigma_y};
    if (o.E == 0.0 || o.nu == 0.0 || o.sigma_y == 0.0) {
      ElasticConstants preset = material_constants(o.material.empty() ? b.dataset.name : o.material);
      if (o.E == 0.0) ec.E = preset.E;
      if (o.nu == 0.0) ec.nu = preset.nu;
      if (o.sigma_y == 0.0) ec.sigma_y = preset.sigma_y;
    }
    b.info["elastic"] = {{"E", ec.E}, {"nu", ec.nu}, {"sigma_y", ec.sigma_y}};
    b.problem = std::make_unique<HardeningProblem>(b.dataset.hardening, ec, o.w0);
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown problem '" + o.problem + "'");
  }
  b.info["name"] = b.dataset.name;
  b.info["n"] = b.dataset.size();
  b.info["hash"] = hex64(dataset_hash(b.dataset));
  return b;
}

// ---------------------------------------------------------------- training flags

struct TrainOpts {
  std::string lambda = "1e-3";
  std::string hidden = "30";
  std::string arch;
  int epochs = 20000;
  double lr = 1e-3;
  int seeds = 1;
  std::string seed_list;
  int mc = 1;
  int log_every = 100;
  int threads = 0;
  bool no_gates = false;

  void add_to(CLI::App* app, bool sweep) {
    if (!sweep) {
      app->add_option("--lambda", lambda, "L0 weight, scientific notation");
      app->add_option("--hidden", hidden, "hidden widths, e.g. 30 or 30-30");
      app->add_option("--arch", arch, "icnn | monotone | mlp (default: problem default)");
    }
    app->add_option("--epochs", epochs);
    app->add_option("--lr", lr);
    app->add_option("--seeds", seeds, "number of seeds 0..n-1");
    app->add_option("--seed-list", seed_list, "explicit comma list of seeds");
    app->add_option("--mc-samples", mc, "Monte Carlo gate samples per step");
    app->add_option("--log-every", log_every);
    app->add_option("--threads", threads, "worker cap (0: all cores)");
    app->add_flag("--no-gates", no_gates, "plain regression with gates held open");
  }

  TrainConfig config(const DataOpts& d) const {
    TrainConfig c;
    c.lambda = parse_real(lambda, "lambda");
    c.epochs = epochs;
    c.lr = lr;
    c.seeds.clear();
    if (!seed_list.empty()) {
      for (const auto& s : split_list(seed_list)) c.seeds.push_back(std::stoull(s));
    } else {
      for (int i = 0; i < seeds; ++i) c.seeds.push_back(static_cast<std::uint64_t>(i));
    }
    c.mc_samples = mc;
    c.split = d.split;
    c.split_seed = d.split_seed;
    c.hidden = parse_hidden(hidden);
    if (!arch.empty()) {
      c.arch = parse_net_kind(arch);
      c.arch_set = true;
    }
    c.log_every = log_every;
    c.threads = threads;
    c.gates_open = no_gates;
    c.validate();
    return c;
  }
};

json manifest(const std::string& command, const std::vector<std::string>& argv, const json& config,
              const json& dataset, const std::vector<std::uint64_t>& seeds, const std::vector<std::string>& outputs) {
  json m;
  m["command"] = command;
  m["argv"] = argv;
  m["config"] = config;
  m["dataset"] = dataset;
  m["seeds"] = seeds;
  m["outputs"] = outputs;
  m["version"] = CONSPARSE_VERSION;
  return m;
}

void write_expressions(const fs::path& stem, const Network& net, const std::string& problem_kind, int decimals,
                       std::vector<std::string>& outputs) {
  ExprPtr e = extract_expression(net, parse_wrapper(problem_kind));
  auto put = [&](const std::string& ext, const std::string& text) {
    fs::path p = stem;
    p += ext;
    csv::write_file(p.string(), text);
    outputs.push_back(p.filename().string());
  };
  put(".expr.txt", render(e, RenderFormat::Plain, decimals) + "\n");
  put(".expr.tex", render(e, RenderFormat::Latex, decimals) + "\n");
  put(".expr.json", expr_to_json(e).dump(2) + "\n");
}

std::string log_csv(const RunRecord& r) {
  std::string s = line({"epoch", "train_loss", "val_loss", "active_params", "penalty"});
  for (const auto& row : r.log)
    s += line({std::to_string(row.epoch), csv::number(row.train_loss),
                    std::isnan(row.val_loss) ? "" : csv::number(row.val_loss), std::to_string(row.active),
                    csv::number(row.penalty)});
  return s;
}

json nan_safe(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// ---------------------------------------------------------------- commands

int cmd_fit(const DataOpts& d, const TrainOpts& t, const std::string& out, int decimals,
            const std::vector<std::string>& argv) {
  Built b = build_problem(d);
  TrainConfig cfg = t.config(d);
  ExperimentResult res = run_experiment(cfg, *b.problem);
  fs::create_directories(out);
  const fs::path dir(out);
  std::vector<std::string> outputs;

  const Network& sel = res.models[res.selected];
  const RunRecord& rec = res.runs[res.selected];

  json model;
  model["network"] = to_json(sel);
  model["problem"] = b.problem->describe();
  model["seed"] = rec.seed;
  write_json(dir / "model.json", model);
  outputs.push_back("model.json");

  csv::write_file((dir / "run_log.csv").string(), log_csv(rec));
  outputs.push_back("run_log.csv");

  std::string runs = line({"seed", "final_train_loss", "final_val_loss", "active_params", "selected"});
  json runs_json = json::array();
  for (std::size_t k = 0; k < res.runs.size(); ++k) {
    const auto& r = res.runs[k];
    std::size_t act = active_count(res.models[k].params, res.models[k].gates);
    runs += line({std::to_string(r.seed), csv::number(r.final_train_loss),
                       std::isnan(r.final_val_loss) ? "" : csv::number(r.final_val_loss), std::to_string(act),
                       k == res.selected ? "1" : "0"});
    runs_json.push_back({{"seed", r.seed},
                         {"final_train_loss", nan_safe(r.final_train_loss)},
                         {"final_val_loss", nan_safe(r.final_val_loss)},
                         {"active_params", act}});
  }
  csv::write_file((dir / "runs.csv").string(), runs);
  outputs.push_back("runs.csv");

  json metrics = b.problem->metrics(sel);
  metrics["active_params"] = active_count(sel.params, sel.gates);
  metrics["total_params"] = sel.size();
  metrics["selected_seed"] = rec.seed;
  metrics["runs"] = runs_json;
  write_json(dir / "metrics.json", metrics);
  outputs.push_back("metrics.json");

  write_expressions(dir / "model", sel, b.problem->kind(), decimals, outputs);

  outputs.push_back("manifest.json");
  write_json(dir / "manifest.json", manifest("fit", argv, cfg.to_json(), b.info, cfg.seeds, outputs));
  std::cout << metrics.dump() << "\n";
  return 0;
}

int cmd_sweep(const DataOpts& d, const TrainOpts& t, const std::string& lambdas, const std::string& archs,
              const std::string& out, const std::vector<std::string>& argv) {
  Built b = build_problem(d);
  std::vector<std::pair<double, std::string>> lams;
  for (const auto& s : split_list(lambdas)) lams.push_back({parse_real(s, "lambda"), s});
  std::vector<std::vector<int>> hs;
  for (const auto& s : split_list(archs, ';')) hs.push_back(parse_hidden(s));
  if (lams.empty() || hs.empty()) throw Error(ErrorKind::InvalidArgument, "sweep needs nonempty lambda and arch lists");
  std::sort(lams.begin(), lams.end());
  std::sort(hs.begin(), hs.end(), [](const auto& a, const auto& c) {
    return a.size() != c.size() ? a.size() < c.size() : a < c;
  });

  TrainOpts base = t;
  base.lambda = lams[0].second;
  TrainConfig cfg0 = base.config(d);

  std::string rows = line({"lambda", "arch", "seed", "final_train_loss", "final_val_loss", "test_loss",
                                "active_params"});
  std::string agg = line({"lambda", "arch", "runs", "mean_train_loss", "mean_test_loss", "mean_active_params"});
  json summary = json::array();
  for (const auto& [lam, lam_text] : lams) {
    for (const auto& h : hs) {
      TrainConfig cfg = cfg0;
      cfg.lambda = lam;
      cfg.hidden = h;
      ExperimentResult res = run_experiment(cfg, *b.problem);
      double s_train = 0.0, s_test = 0.0, s_act = 0.0;
      int n_test = 0;
      for (std::size_t k = 0; k < res.runs.size(); ++k) {
        const auto& r = res.runs[k];
        json m = b.problem->metrics(res.models[k]);
        double test = m.contains("test_loss") && m["test_loss"].is_number() ? m["test_loss"].get<double>() : NAN;
        std::size_t act = active_count(res.models[k].params, res.models[k].gates);
        rows += line({lam_text, hidden_name(h), std::to_string(r.seed), csv::number(r.final_train_loss),
                           std::isnan(r.final_val_loss) ? "" : csv::number(r.final_val_loss),
                           std::isnan(test) ? "" : csv::number(test), std::to_string(act)});
        s_train += r.final_train_loss;
        s_act += static_cast<double>(act);
        if (!std::isnan(test)) {
          s_test += test;
          ++n_test;
        }
      }
      const double n = static_cast<double>(res.runs.size());
      double mean_test = n_test ? s_test / n_test : NAN;
      agg += line({lam_text, hidden_name(h), std::to_string(res.runs.size()), csv::number(s_train / n),
                        std::isnan(mean_test) ? "" : csv::number(mean_test), csv::number(s_act / n)});
      summary.push_back({{"lambda", lam_text},
                         {"arch", hidden_name(h)},
                         {"mean_train_loss", s_train / n},
                         {"mean_test_loss", nan_safe(mean_test)},
                         {"mean_active_params", s_act / n}});
    }
  }
  fs::create_directories(out);
  const fs::path dir(out);
  csv::write_file((dir / "sweep.csv").string(), rows);
  csv::write_file((dir / "summary.csv").string(), agg);
  write_json(dir / "metrics.json", summary);
  json cfg = cfg0.to_json();
  cfg["lambdas"] = split_list(lambdas);
  cfg["archs"] = split_list(archs, ';');
  write_json(dir / "manifest.json", manifest("sweep", argv, cfg, b.info, cfg0.seeds,
                                             {"sweep.csv", "summary.csv", "metrics.json", "manifest.json"}));
  std::cout << summary.dump() << "\n";
  return 0;
}

json load_model(const std::string& path) {
  json j;
  try {
    j = json::parse(csv::read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::CorruptCheckpoint, e.what());
  }
  if (!j.contains("network") || !j.contains("problem") || !j["problem"].contains("problem"))
    throw Error(ErrorKind::CorruptCheckpoint, "missing network or problem section");
  return j;
}

int cmd_export(const std::string& model_path, const std::string& out, int decimals) {
  json m = load_model(model_path);
  Network net = network_from_json(m["network"]);
  std::vector<std::string> outputs;
  fs::path stem(out);
  if (stem.has_parent_path()) fs::create_directories(stem.parent_path());
  write_expressions(stem, net, m["problem"]["problem"].get<std::string>(), decimals, outputs);
  for (const auto& o : outputs) std::cout << o << "\n";
  return 0;
}

struct CurveOpts {
  std::string model;
  std::string out;
  std::optional<double> from, to;
  int n = 81;
  std::string mode = "UT";
};

std::vector<double> grid(double a, double b, int n) {
  if (!(b > a) || n < 2) throw Error(ErrorKind::InvalidArgument, "empty range");
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = a + (b - a) * i / (n - 1);
  return g;
}

int cmd_curves(const CurveOpts& c) {
  json m = load_model(c.model);
  Network net = network_from_json(m["network"]);
  const json& pd = m["problem"];
  const std::string kind = pd["problem"].get<std::string>();
  std::string text;
  if (kind == "hyper-compressible") {
    std::optional<HyperLaw> law;
    if (pd.contains("law") && pd["law"].is_string()) law = parse_hyper_law(pd["law"].get<std::string>());
    auto dom = pd["train_F11_range"].get<std::array<double, 2>>();
    auto g = grid(c.from.value_or(0.6), c.to.value_or(1.4), c.n);
    CompressiblePotential pot(net);
    text = line({"F11", "S11_pred", "S22_pred", "S11_true", "S22_true", "in_train_domain"});
    for (double f : g) {
      Mat3 F = Mat3::Identity();
      F(0, 0) = f;
      Mat3 S = pot.stress(F);
      std::string t11, t22;
      if (law) {
        Mat3 T = ground_truth_stress(*law, F);
        t11 = csv::number(T(0, 0));
        t22 = csv::number(T(1, 1));
      }
      text += line({csv::number(f), csv::number(S(0, 0)), csv::number(S(1, 1)), t11, t22,
                         f >= dom[0] && f <= dom[1] ? "1" : "0"});
    }
  } else if (kind == "hyper-incompressible") {
    Mode mode = parse_mode(c.mode);
    std::array<double, 2> dom{NAN, NAN};
    if (pd["train_ranges"].contains(c.mode)) dom = pd["train_ranges"][c.mode].get<std::array<double, 2>>();
    double lo = c.from.value_or(std::isnan(dom[0]) ? (mode == Mode::SS || mode == Mode::ST ? 0.0 : 1.0) : dom[0]);
    double hi = c.to.value_or(std::isnan(dom[1]) ? lo + 1.0 : dom[1]);
    auto g = grid(lo, hi, c.n);
    IncompressiblePotential pot(net);
    const int nq = pd.value("n_quad", 20);
    text = line({"x", "P_pred", "in_train_domain"});
    for (double x : g) {
      double P = mode == Mode::ST ? torsion_torque(pot, x, nq) : incompressible_mode_stress(pot, mode, x).P1;
      bool in = !std::isnan(dom[0]) && x >= dom[0] && x <= dom[1];
      text += line({csv::number(x), csv::number(P), in ? "1" : "0"});
    }
  } else if (kind == "yield") {
    auto g = grid(c.from.value_or(0.0), c.to.value_or(2.0 * std::numbers::pi), c.n);
    std::vector<double> th = test_parameters(net);
    auto f = [&](double a, double b) {
      const double x[2] = {a, b};
      return forward_scalar<double>(net, th, x);
    };
    if (!(f(0.0, 0.0) < 0.0)) throw Error(ErrorKind::SamplingError, "origin is not inside the yield surface");
    text = line({"angle", "pi1", "pi2", "radius"});
    for (double a : g) {
      double r = 0.0;
      try {
        r = yield_radius(f, a);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::SamplingError) throw;
        // surface open along this ray
        text += line({csv::number(a), "", "", "inf"});
        continue;
      }
      text += line({csv::number(a), csv::number(r * std::cos(a)), csv::number(r * std::sin(a)), csv::number(r)});
    }
  } else if (kind == "hardening") {
    ElasticConstants ec{pd["E"].get<double>(), pd["nu"].get<double>(), pd["sigma_y"].get<double>()};
    double max_pct = pd["max_strain_percent"].get<double>();
    auto g = grid(c.from.value_or(0.0), c.to.value_or(1.3 * max_pct), c.n);
    std::vector<double> strain;
    for (double p : g) strain.push_back(p / 100.0);
    HardeningModel hm{net, pd.value("w0", 1e3)};
    auto sig = uniaxial_elastoplastic_curve(hm, ec, strain);
    text = line({"strain_percent", "stress_mpa", "in_train_domain"});
    for (std::size_t i = 0; i < g.size(); ++i)
      text += line({csv::number(g[i]), csv::number(sig[i]), g[i] <= max_pct ? "1" : "0"});
  } else {
    throw Error(ErrorKind::CorruptCheckpoint, "unknown problem kind " + kind);
  }
  if (c.out.empty() || c.out == "-")
    std::cout << text;
  else
    csv::write_file(c.out, text);
  return 0;
}

int cmd_datasets(const std::string& name, const std::string& out) {
  if (name.empty()) {
    for (const auto& n : embedded_names()) {
      Dataset d = load_embedded(n);
      std::string kind = d.kind == DatasetKind::Invariants ? "invariants" : csv_kind_name(natural_csv_kind(d));
      std::cout << n << "," << kind << "," << d.size() << "\n";
    }
    return 0;
  }
  Dataset d = load_embedded(name);
  std::string text = dataset_to_csv(d, natural_csv_kind(d));
  if (out.empty() || out == "-")
    std::cout << text;
  else
    csv::write_file(out, text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  CLI::App app{"sparse physics-augmented constitutive networks"};
  app.set_version_flag("--version", CONSPARSE_VERSION);
  app.require_subcommand(1);

  DataOpts fit_data, sweep_data;
  TrainOpts fit_train, sweep_train;
  std::string fit_out = "out", sweep_out = "sweep", lambdas = "1e-5,1e-4,1e-3", archs = "30";
  int decimals = 3;

  auto* fit = app.add_subcommand("fit", "train over seeds and keep the median run");
  fit_data.add_to(fit);
  fit_train.add_to(fit, false);
  fit->add_option("--out", fit_out, "output directory");
  fit->add_option("--decimals", decimals, "expression rounding");

  auto* sweep = app.add_subcommand("sweep", "grid over lambda x architecture x seed");
  sweep_data.add_to(sweep);
  sweep_train.add_to(sweep, true);
  sweep->add_option("--lambdas", lambdas, "comma list");
  sweep->add_option("--archs", archs, "semicolon list of hidden widths, e.g. '30;30-30'");
  sweep->add_option("--out", sweep_out, "output directory");

  std::string exp_model, exp_out = "model";
  int exp_dec = 3;
  auto* exp = app.add_subcommand("export", "write expression files from a checkpoint");
  exp->add_option("--model", exp_model)->required();
  exp->add_option("--out", exp_out, "output stem");
  exp->add_option("--decimals", exp_dec);

  CurveOpts cur;
  auto* curves = app.add_subcommand("curves", "evaluate a checkpoint over a range");
  curves->alias("eval");
  curves->add_option("--model", cur.model)->required();
  curves->add_option("--out", cur.out, "CSV path (stdout if omitted)");
  curves->add_option("--from", cur.from);
  curves->add_option("--to", cur.to);
  curves->add_option("--n", cur.n);
  curves->add_option("--mode", cur.mode, "UT | UC | ET | PS | SS | ST");

  std::string ds_name, ds_out;
  auto* ds = app.add_subcommand("datasets", "list embedded datasets or dump one as CSV");
  ds->add_option("name", ds_name);
  ds->add_option("--out", ds_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*fit) return cmd_fit(fit_data, fit_train, fit_out, decimals, args);
    if (*sweep) return cmd_sweep(sweep_data, sweep_train, lambdas, archs, sweep_out, args);
    if (*exp) return cmd_export(exp_model, exp_out, exp_dec);
    if (*curves) return cmd_curves(cur);
    if (*ds) return cmd_datasets(ds_name, ds_out);
  } catch (const Error& e) {
    json j{{"error", kind_name(e.kind())}, {"detail", e.detail()}};
    std::cerr << j.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    json j{{"error", "IoError"}, {"detail", e.what()}};
    std::cerr << j.dump() << "\n";
    return 1;
  }
  return 2;
}
