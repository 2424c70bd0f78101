#include "consparse/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace consparse {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<int> full_widths(int n_in, const std::vector<int>& hidden) {
  std::vector<int> w{n_in};
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(1);
  return w;
}

nlohmann::json num_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

double r_squared(const std::vector<double>& pred, const std::vector<double>& target) {
  if (pred.size() != target.size() || target.empty()) return kNaN;
  double mean = 0.0;
  for (double t : target) mean += t;
  mean /= static_cast<double>(target.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    ss_res += (pred[i] - target[i]) * (pred[i] - target[i]);
    ss_tot += (target[i] - mean) * (target[i] - mean);
  }
  return ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : kNaN;
}

// ---- compressible

Sym6<double> network_pk2(const Network& net, std::span<const double> theta, const DeformationState& st) {
  const double ref[3] = {3.0, 3.0, 1.0};
  auto g0 = nn_input_gradient(net, theta, ref);
  const double n = 2.0 * g0.grad[0] + 4.0 * g0.grad[1] + g0.grad[2];
  const double x[3] = {st.I1, st.I2, st.J};
  auto g = nn_input_gradient(net, theta, x);
  return pk2_from_gradients<double>(st, g.grad[0], g.grad[1], g.grad[2] - n);
}

std::vector<CompressibleProblem::Prepared> CompressibleProblem::prepare(const std::vector<StressSample>& v) {
  std::vector<Prepared> out;
  out.reserve(v.size());
  for (const auto& s : v) out.push_back({deformation_state(s.F), s.S});
  return out;
}

CompressibleProblem::CompressibleProblem(std::vector<StressSample> train, std::vector<StressSample> val,
                                         std::vector<StressSample> test, std::optional<HyperLaw> law)
    : train_(prepare(train)), val_(prepare(val)), test_(prepare(test)), train_raw_(train), test_raw_(test), law_(law) {
  if (train_.empty()) throw Error(ErrorKind::EmptyDataset, "compressible training set");
  f11_lo_ = f11_hi_ = train_raw_[0].F(0, 0);
  for (const auto& s : train_raw_) {
    f11_lo_ = std::min(f11_lo_, s.F(0, 0));
    f11_hi_ = std::max(f11_hi_, s.F(0, 0));
  }
}

Network CompressibleProblem::make_network(const std::vector<int>& hidden, NetKind arch, std::mt19937_64& rng) const {
  Network net = consparse::make_network(arch, full_widths(3, hidden), rng);
  net.input_offset = {3.0, 3.0, 1.0};
  return net;
}

Var CompressibleProblem::data_loss(Tape& tape, const Network& net, std::span<const Var> theta,
                                   const std::vector<char>* dead) const {
  const double ref[3] = {3.0, 3.0, 1.0};
  auto g0 = nn_input_gradient(tape, net, theta, ref, dead);
  Var n = g0.grad[0] * 2.0 + g0.grad[1] * 4.0 + g0.grad[2];
  Var sum = tape.constant(0.0);
  for (const auto& p : train_) {
    const double x[3] = {p.st.I1, p.st.I2, p.st.J};
    auto g = nn_input_gradient(tape, net, theta, x, dead);
    auto S = pk2_from_gradients<Var>(p.st, g.grad[0], g.grad[1], g.grad[2] - n);
    for (int k = 0; k < 6; ++k) {
      Var r = S[k] - p.S[k];
      sum = sum + r * r;
    }
  }
  return sum * (1.0 / (6.0 * static_cast<double>(train_.size())));
}

static double set_loss(const std::vector<CompressibleProblem::Prepared>&, const Network&, std::span<const double>);

double CompressibleProblem::loss_on(const std::vector<StressSample>& set, const Network& net,
                                    std::span<const double> theta) const {
  return set_loss(prepare(set), net, theta);
}

static double set_loss(const std::vector<CompressibleProblem::Prepared>& set, const Network& net,
                       std::span<const double> theta) {
  if (set.empty()) return kNaN;
  double s = 0.0;
  for (const auto& p : set) {
    auto S = network_pk2(net, theta, p.st);
    for (int k = 0; k < 6; ++k) s += (S[k] - p.S[k]) * (S[k] - p.S[k]);
  }
  return s / (6.0 * static_cast<double>(set.size()));
}

double CompressibleProblem::train_loss(const Network& net, std::span<const double> theta) const {
  return set_loss(train_, net, theta);
}

double CompressibleProblem::val_loss(const Network& net, std::span<const double> theta) const {
  return set_loss(val_, net, theta);
}

double CompressibleProblem::uniaxial_rel_l2(const Network& net, double lo, double hi, int n) const {
  if (!law_) return kNaN;
  std::vector<double> th = test_parameters(net);
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    double f = lo + (hi - lo) * i / (n - 1);
    Mat3 F = Mat3::Identity();
    F(0, 0) = f;
    DeformationState st = deformation_state(F);
    auto S = network_pk2(net, th, st);
    auto T = pack(ground_truth_stress(*law_, F));
    for (int k = 0; k < 6; ++k) {
      num += (S[k] - T[k]) * (S[k] - T[k]);
      den += T[k] * T[k];
    }
  }
  return den > 0.0 ? std::sqrt(num / den) : kNaN;
}

nlohmann::json CompressibleProblem::metrics(const Network& net) const {
  std::vector<double> th = test_parameters(net);
  nlohmann::json m;
  m["train_loss"] = num_or_null(train_loss(net, th));
  m["val_loss"] = num_or_null(val_loss(net, th));
  m["test_loss"] = num_or_null(set_loss(test_, net, th));
  if (!test_.empty()) {
    std::vector<double> pred, target;
    for (const auto& p : test_) {
      auto S = network_pk2(net, th, p.st);
      for (int k = 0; k < 6; ++k) {
        pred.push_back(S[k]);
        target.push_back(p.S[k]);
      }
    }
    m["test_r2"] = num_or_null(r_squared(pred, target));
  }
  if (law_) {
    m["uniaxial_rel_l2"] = num_or_null(uniaxial_rel_l2(net, 0.8, 1.2, 81));
    m["uniaxial_range"] = {0.8, 1.2};
  }
  return m;
}

nlohmann::json CompressibleProblem::describe() const {
  nlohmann::json j;
  j["problem"] = kind();
  j["law"] = law_ ? nlohmann::json(law_name(*law_)) : nlohmann::json(nullptr);
  j["train_F11_range"] = {f11_lo_, f11_hi_};
  j["n_train"] = train_.size();
  j["n_val"] = val_.size();
  j["n_test"] = test_.size();
  return j;
}

// ---- incompressible

IncompressibleProblem::IncompressibleProblem(std::vector<ModePoint> train, std::vector<ModePoint> test, int n_quad)
    : train_(std::move(train)), test_(std::move(test)), n_quad_(n_quad) {
  if (train_.empty()) throw Error(ErrorKind::EmptyDataset, "incompressible training set");
  if (n_quad_ < 2) throw Error(ErrorKind::InvalidArgument, "torsion quadrature needs >= 2 nodes");
}

Network IncompressibleProblem::make_network(const std::vector<int>& hidden, NetKind arch,
                                            std::mt19937_64& rng) const {
  Network net = consparse::make_network(arch, full_widths(2, hidden), rng);
  double m1 = 0.0, m2 = 0.0;
  for (const auto& p : train_) {
    auto inv = mode_invariants(p.mode, p.x);
    m1 = std::max(m1, std::abs(inv[0] - 3.0));
    m2 = std::max(m2, std::abs(inv[1] - 3.0));
  }
  net.input_offset = {3.0, 3.0};
  net.input_scale = {m1 > 0.0 ? 1.0 / m1 : 1.0, m2 > 0.0 ? 1.0 / m2 : 1.0};
  return net;
}

Var IncompressibleProblem::data_loss(Tape& tape, const Network& net, std::span<const Var> theta,
                                     const std::vector<char>* dead) const {
  Var sum = tape.constant(0.0);
  std::vector<double> rho, w;
  trapezoid_rule(n_quad_, rho, w);
  for (const auto& p : train_) {
    Var P;
    if (p.mode == Mode::ST) {
      P = tape.constant(0.0);
      for (int k = 0; k < n_quad_; ++k) {
        if (rho[k] == 0.0 || p.x == 0.0) continue;
        double I = 3.0 + (rho[k] * p.x) * (rho[k] * p.x);
        const double x[2] = {I, I};
        auto g = nn_input_gradient(tape, net, theta, x, dead);
        P = P + (g.grad[0] + g.grad[1]) * (w[k] * 4.0 * M_PI * rho[k] * rho[k] * rho[k] * p.x);
      }
    } else {
      auto inv = mode_invariants(p.mode, p.x);
      const double x[2] = {inv[0], inv[1]};
      auto g = nn_input_gradient(tape, net, theta, x, dead);
      P = mode_stress_from_gradients<Var>(p.mode, p.x, g.grad[0], g.grad[1]).P1;
    }
    Var r = P - p.P;
    sum = sum + r * r;
  }
  return sum * (1.0 / static_cast<double>(train_.size()));
}

std::vector<double> IncompressibleProblem::predict(const Network& net, std::span<const double> theta,
                                                   const std::vector<ModePoint>& pts) const {
  std::vector<double> rho, w;
  trapezoid_rule(n_quad_, rho, w);
  std::vector<double> out;
  out.reserve(pts.size());
  for (const auto& p : pts) {
    if (p.mode == Mode::ST) {
      double tau = 0.0;
      for (int k = 0; k < n_quad_; ++k) {
        if (rho[k] == 0.0 || p.x == 0.0) continue;
        double I = 3.0 + (rho[k] * p.x) * (rho[k] * p.x);
        const double x[2] = {I, I};
        auto g = nn_input_gradient(net, theta, x);
        tau += w[k] * 4.0 * M_PI * rho[k] * rho[k] * rho[k] * p.x * (g.grad[0] + g.grad[1]);
      }
      out.push_back(tau);
    } else {
      auto inv = mode_invariants(p.mode, p.x);
      const double x[2] = {inv[0], inv[1]};
      auto g = nn_input_gradient(net, theta, x);
      out.push_back(mode_stress_from_gradients<double>(p.mode, p.x, g.grad[0], g.grad[1]).P1);
    }
  }
  return out;
}

static double mse(const std::vector<double>& pred, const std::vector<ModePoint>& pts) {
  if (pts.empty()) return kNaN;
  double s = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) s += (pred[i] - pts[i].P) * (pred[i] - pts[i].P);
  return s / static_cast<double>(pts.size());
}

double IncompressibleProblem::train_loss(const Network& net, std::span<const double> theta) const {
  return mse(predict(net, theta, train_), train_);
}

double IncompressibleProblem::val_loss(const Network& net, std::span<const double> theta) const {
  return mse(predict(net, theta, test_), test_);
}

static nlohmann::json per_mode_r2(const std::vector<double>& pred, const std::vector<ModePoint>& pts) {
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::string key = pts[i].compression ? "UC" : mode_name(pts[i].mode);
    groups[key].first.push_back(pred[i]);
    groups[key].second.push_back(pts[i].P);
  }
  nlohmann::json j = nlohmann::json::object();
  for (auto& [k, v] : groups) j[k] = num_or_null(r_squared(v.first, v.second));
  return j;
}

nlohmann::json IncompressibleProblem::metrics(const Network& net) const {
  std::vector<double> th = test_parameters(net);
  auto ptr = predict(net, th, train_);
  auto pte = predict(net, th, test_);
  nlohmann::json m;
  m["train_loss"] = num_or_null(mse(ptr, train_));
  m["test_loss"] = num_or_null(mse(pte, test_));
  m["train_r2"] = per_mode_r2(ptr, train_);
  m["test_r2"] = per_mode_r2(pte, test_);
  return m;
}

nlohmann::json IncompressibleProblem::describe() const {
  nlohmann::json j;
  j["problem"] = kind();
  std::map<std::string, std::array<double, 2>> ranges;
  for (const auto& p : train_) {
    std::string k = p.compression ? "UC" : mode_name(p.mode);
    auto it = ranges.find(k);
    if (it == ranges.end())
      ranges[k] = {p.x, p.x};
    else
      it->second = {std::min(it->second[0], p.x), std::max(it->second[1], p.x)};
  }
  nlohmann::json r = nlohmann::json::object();
  for (auto& [k, v] : ranges) r[k] = {v[0], v[1]};
  j["train_ranges"] = r;
  j["n_quad"] = n_quad_;
  j["n_train"] = train_.size();
  j["n_test"] = test_.size();
  return j;
}

// ---- yield

YieldProblem::YieldProblem(std::vector<PiPlanePoint> points, double w_anchor)
    : points_(std::move(points)), w_anchor_(w_anchor) {
  if (points_.empty()) throw Error(ErrorKind::EmptyDataset, "yield points");
  double s = 0.0;
  for (const auto& p : points_) s += std::hypot(p.pi1, p.pi2);
  mean_radius_ = s / static_cast<double>(points_.size());
  if (!(mean_radius_ > 0.0)) mean_radius_ = 1.0;
}

Network YieldProblem::make_network(const std::vector<int>& hidden, NetKind arch, std::mt19937_64& rng) const {
  Network net = consparse::make_network(arch, full_widths(2, hidden), rng);
  net.input_scale = {1.0 / mean_radius_, 1.0 / mean_radius_};
  return net;
}

Var YieldProblem::data_loss(Tape& tape, const Network& net, std::span<const Var> theta,
                            const std::vector<char>* dead) const {
  return fit_yield_loss(tape, net, theta, points_, w_anchor_, dead);
}

double YieldProblem::train_loss(const Network& net, std::span<const double> theta) const {
  return yield_loss(net, theta, points_, w_anchor_);
}

double YieldProblem::val_loss(const Network&, std::span<const double>) const { return kNaN; }

std::vector<double> YieldProblem::radial_errors(const Network& net) const {
  std::vector<double> th = test_parameters(net);
  auto f = [&](double a, double b) {
    const double x[2] = {a, b};
    return forward_scalar<double>(net, th, x);
  };
  std::vector<double> err;
  for (const auto& p : points_) {
    double r = std::hypot(p.pi1, p.pi2);
    try {
      double rf = yield_radius(f, std::atan2(p.pi2, p.pi1), 1e-12, 100.0 * r);
      err.push_back(std::abs(rf - r) / r);
    } catch (const Error&) {
      err.push_back(std::numeric_limits<double>::infinity());
    }
  }
  return err;
}

nlohmann::json YieldProblem::metrics(const Network& net) const {
  std::vector<double> th = test_parameters(net);
  auto err = radial_errors(net);
  double mx = 0.0;
  for (double e : err) mx = std::max(mx, e);
  const double o[2] = {0.0, 0.0};
  nlohmann::json m;
  m["train_loss"] = num_or_null(train_loss(net, th));
  m["max_radial_error"] = num_or_null(mx);
  m["f_origin"] = forward_scalar<double>(net, th, o);
  return m;
}

nlohmann::json YieldProblem::describe() const {
  nlohmann::json j;
  j["problem"] = kind();
  j["n_train"] = points_.size();
  j["mean_radius"] = mean_radius_;
  j["w_anchor"] = w_anchor_;
  return j;
}

// ---- hardening

HardeningProblem::HardeningProblem(std::vector<HardeningRow> rows, ElasticConstants ec, double w0)
    : ec_(ec), w0_(w0) {
  ec_.validate();
  if (rows.empty()) throw Error(ErrorKind::EmptyDataset, "hardening data");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && rows[i].strain_percent < rows[i - 1].strain_percent)
      throw Error(ErrorKind::NonMonotoneStrain, "row " + std::to_string(i + 1));
    samples_.push_back({rows[i].strain_percent / 100.0, rows[i].stress_mpa});
    max_strain_ = std::max(max_strain_, rows[i].strain_percent / 100.0);
  }
}

Network HardeningProblem::make_network(const std::vector<int>& hidden, NetKind arch, std::mt19937_64& rng) const {
  Network net = consparse::make_network(arch, full_widths(1, hidden), rng);
  net.input_scale = {max_strain_ > 0.0 ? 1.0 / max_strain_ : 1.0};
  return net;
}

Var HardeningProblem::data_loss(Tape& tape, const Network& net, std::span<const Var> theta,
                                const std::vector<char>* dead) const {
  return fit_hardening_loss(tape, net, theta, ec_, samples_, w0_, dead);
}

double HardeningProblem::train_loss(const Network& net, std::span<const double> theta) const {
  return hardening_loss(net, theta, ec_, samples_, w0_);
}

double HardeningProblem::val_loss(const Network&, std::span<const double>) const { return kNaN; }

nlohmann::json HardeningProblem::metrics(const Network& net) const {
  std::vector<double> th = test_parameters(net);
  HardeningCurve h = hardening_curve(net, th);
  std::vector<double> eps, target;
  for (const auto& s : samples_) {
    eps.push_back(s.strain);
    target.push_back(s.stress);
  }
  auto pts = uniaxial_response(h, ec_, eps);
  std::vector<double> pred;
  for (const auto& p : pts) pred.push_back(p.stress);
  std::vector<double> grid;
  const int n = 400;
  for (int i = 0; i < n; ++i) grid.push_back(1.3 * max_strain_ * i / (n - 1));
  auto ext = uniaxial_response(h, ec_, grid);
  bool mono = true;
  for (std::size_t i = 1; i < ext.size(); ++i)
    if (ext[i].stress < ext[i - 1].stress - 1e-9 * std::abs(ext[i - 1].stress)) mono = false;
  nlohmann::json m;
  m["train_loss"] = num_or_null(train_loss(net, th));
  m["r2"] = num_or_null(r_squared(pred, target));
  m["R0"] = h.R(0.0);
  m["monotone_extrapolation"] = mono;
  m["extrapolation_limit_percent"] = 130.0 * max_strain_;
  return m;
}

nlohmann::json HardeningProblem::describe() const {
  nlohmann::json j;
  j["problem"] = kind();
  j["E"] = ec_.E;
  j["nu"] = ec_.nu;
  j["sigma_y"] = ec_.sigma_y;
  j["w0"] = w0_;
  j["max_strain_percent"] = 100.0 * max_strain_;
  j["n_train"] = samples_.size();
  return j;
}

}  // namespace consparse
