#include "consparse/plast.hpp"

#include <algorithm>
#include <cmath>

#include "consparse/hyper.hpp"

namespace consparse {

Eigen::Matrix3d pi_transform() {
  const double a = std::sqrt(2.0 / 3.0), b = std::sqrt(1.0 / 6.0), c = std::sqrt(0.5), d = std::sqrt(1.0 / 3.0);
  Eigen::Matrix3d M;
  M << a, -b, -b, 0.0, c, -c, d, d, d;
  return M;
}

std::array<double, 3> principal_to_pi(double s1, double s2, double s3) {
  Eigen::Vector3d p = pi_transform() * Eigen::Vector3d(s1, s2, s3);
  return {p[0], p[1], p[2]};
}

std::array<double, 3> pi_to_principal(double pi1, double pi2, double pi3) {
  Eigen::Vector3d s = pi_transform().transpose() * Eigen::Vector3d(pi1, pi2, pi3);
  return {s[0], s[1], s[2]};
}

const char* yield_law_name(YieldLaw law) {
  switch (law) {
    case YieldLaw::Drucker: return "drucker";
    case YieldLaw::Cazacu: return "cazacu";
    case YieldLaw::Tresca: return "tresca";
  }
  return "?";
}

YieldLaw parse_yield_law(const std::string& s) {
  if (s == "drucker") return YieldLaw::Drucker;
  if (s == "cazacu") return YieldLaw::Cazacu;
  if (s == "tresca") return YieldLaw::Tresca;
  throw Error(ErrorKind::InvalidArgument, "unknown yield law '" + s + "'");
}

double yield_ground_truth(YieldLaw law, const std::array<double, 3>& p) {
  const double mean = (p[0] + p[1] + p[2]) / 3.0;
  const double s[3] = {p[0] - mean, p[1] - mean, p[2] - mean};
  switch (law) {
    case YieldLaw::Drucker: {
      double J2 = 0.5 * (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]);
      double J3 = (s[0] * s[0] * s[0] + s[1] * s[1] * s[1] + s[2] * s[2] * s[2]) / 3.0;
      return J2 * J2 * J2 + 1.5 * J3 * J3 - kYieldConstant;
    }
    case YieldLaw::Cazacu: {
      double f = 0.0;
      for (double si : s) {
        double t = std::abs(si) + 0.5 * si;
        f += t * t;
      }
      return f - kYieldConstant;
    }
    case YieldLaw::Tresca: {
      double m = std::max({std::abs(p[0] - p[1]), std::abs(p[0] - p[2]), std::abs(p[2] - p[1])});
      return m - kYieldConstant;
    }
  }
  return 0.0;
}

double yield_ground_truth_pi(YieldLaw law, double pi1, double pi2) {
  return yield_ground_truth(law, pi_to_principal(pi1, pi2, 0.0));
}

void ElasticConstants::validate() const {
  if (!(E > 0.0)) throw Error(ErrorKind::InvalidArgument, "E must be positive");
  if (!(nu > -1.0 && nu < 0.5)) throw Error(ErrorKind::InvalidArgument, "nu must lie in (-1, 0.5)");
  if (!(sigma_y > 0.0)) throw Error(ErrorKind::InvalidArgument, "sigma_y must be positive");
}

double ElasticConstants::lame_lambda() const { return E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)); }
double ElasticConstants::lame_mu() const { return E / (2.0 * (1.0 + nu)); }

Eigen::Matrix<double, 6, 6> ElasticConstants::stiffness() const {
  validate();
  const double lam = lame_lambda(), mu = lame_mu();
  Eigen::Matrix<double, 6, 6> C = Eigen::Matrix<double, 6, 6>::Zero();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) C(i, j) = lam;
    C(i, i) = lam + 2.0 * mu;
    C(i + 3, i + 3) = mu;
  }
  return C;
}

ElasticConstants material_constants(const std::string& name) {
  if (name == "U71Mn") return {220e3, 0.3, 484.5};
  if (name == "SS316L") return {190e3, 0.35, 200.0};
  if (name == "40Cr3MoV") return {207e3, 0.3, 1000.0};
  throw Error(ErrorKind::UnknownDataset, "no elastic constants for '" + name + "'");
}

HardeningCurve hardening_curve(const Network& net, std::span<const double> theta) {
  std::vector<double> th(theta.begin(), theta.end());
  const Network* np = &net;
  HardeningCurve h;
  h.R = [np, th](double r) {
    const double x[1] = {r};
    return forward_scalar<double>(*np, th, x);
  };
  h.dR = [np, th](double r) {
    const double x[1] = {r};
    return nn_input_gradient(*np, th, x).grad[0];
  };
  return h;
}

HardeningCurve hardening_curve(const Network& net) { return hardening_curve(net, test_parameters(net)); }

std::vector<UniaxialPoint> uniaxial_response(const HardeningCurve& h, const ElasticConstants& ec,
                                             std::span<const double> strain) {
  ec.validate();
  std::vector<UniaxialPoint> out;
  out.reserve(strain.size());
  double r = 0.0;
  double prev = -std::numeric_limits<double>::infinity();
  for (double eps : strain) {
    if (eps < prev) throw Error(ErrorKind::NonMonotoneStrain, "strain grid must be nondecreasing");
    prev = eps;
    UniaxialPoint pt;
    pt.strain = eps;
    double trial = ec.E * (eps - r);
    if (trial <= ec.sigma_y * h.R(r)) {
      pt.stress = trial;
      pt.r = r;
      out.push_back(pt);
      continue;
    }
    auto g = [&](double x) { return ec.sigma_y * h.R(x) - ec.E * (eps - x); };
    double lo = r, hi = eps;
    if (!(g(hi) > 0.0)) throw Error(ErrorKind::ConvergenceError, "return map root not bracketed");
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
      double mid = 0.5 * (lo + hi);
      if (g(mid) > 0.0)
        hi = mid;
      else
        lo = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 3; ++it) {
      double slope = ec.sigma_y * h.dR(x) + ec.E;
      double nx = x - g(x) / slope;
      if (!(nx >= lo - 1e-12 && nx <= hi + 1e-12)) break;
      x = nx;
    }
    r = std::max(r, x);
    pt.r = r;
    pt.stress = ec.sigma_y * h.R(r);
    pt.plastic = true;
    out.push_back(pt);
  }
  return out;
}

std::vector<double> uniaxial_elastoplastic_curve(const HardeningModel& hm, const ElasticConstants& ec,
                                                 std::span<const double> strain) {
  auto pts = uniaxial_response(hardening_curve(hm.net), ec, strain);
  std::vector<double> s(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) s[i] = pts[i].stress;
  return s;
}

Var fit_hardening_loss(Tape& tape, const Network& net, std::span<const Var> theta, const ElasticConstants& ec,
                       std::span<const HardeningSample> data, double w0, const std::vector<char>* dead) {
  if (data.empty()) throw Error(ErrorKind::EmptyDataset, "hardening data");
  std::vector<double> tv(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) tv[i] = theta[i].value();
  HardeningCurve h = hardening_curve(net, tv);
  std::vector<double> eps(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) eps[i] = data[i].strain;
  auto pts = uniaxial_response(h, ec, eps);

  const double inv_sy = 1.0 / ec.sigma_y;
  double const_part = 0.0;
  Var sum = tape.constant(0.0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& p = pts[i];
    if (!p.plastic) {
      double res = (p.stress - data[i].stress) * inv_sy;
      const_part += res * res;
      continue;
    }
    Var x = tape.constant(p.r);
    Var R = forward<Var>(net, theta, std::span<const Var>(&x, 1), dead)[0];
    double k = 1.0 / (1.0 + ec.sigma_y * h.dR(p.r) / ec.E);
    // value equals p.stress; slope w.r.t. theta is k sigma_y dR/dtheta
    Var pred = (R - R.value()) * (k * ec.sigma_y) + p.stress;
    Var res = (pred - data[i].stress) * inv_sy;
    sum = sum + res * res;
  }
  Var zero = tape.constant(0.0);
  Var R0 = forward<Var>(net, theta, std::span<const Var>(&zero, 1), dead)[0];
  Var anchor = (R0 - 1.0) * (R0 - 1.0);
  return (sum + const_part) * (1.0 / static_cast<double>(data.size())) + anchor * w0;
}

double hardening_loss(const Network& net, std::span<const double> theta, const ElasticConstants& ec,
                      std::span<const HardeningSample> data, double w0) {
  if (data.empty()) throw Error(ErrorKind::EmptyDataset, "hardening data");
  HardeningCurve h = hardening_curve(net, theta);
  std::vector<double> eps(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) eps[i] = data[i].strain;
  auto pts = uniaxial_response(h, ec, eps);
  double s = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    double res = (pts[i].stress - data[i].stress) / ec.sigma_y;
    s += res * res;
  }
  double R0 = h.R(0.0);
  return s / static_cast<double>(data.size()) + w0 * (R0 - 1.0) * (R0 - 1.0);
}

Var fit_yield_loss(Tape& tape, const Network& net, std::span<const Var> theta, std::span<const PiPlanePoint> points,
                   double w_anchor, const std::vector<char>* dead) {
  if (points.empty()) throw Error(ErrorKind::EmptyDataset, "yield points");
  Var sum = tape.constant(0.0);
  for (const auto& p : points) {
    Var x[2] = {tape.constant(p.pi1), tape.constant(p.pi2)};
    Var f = forward<Var>(net, theta, std::span<const Var>(x, 2), dead)[0];
    sum = sum + f * f;
  }
  Var o[2] = {tape.constant(0.0), tape.constant(0.0)};
  Var f0 = forward<Var>(net, theta, std::span<const Var>(o, 2), dead)[0] + 1.0;
  return sum * (1.0 / static_cast<double>(points.size())) + f0 * f0 * w_anchor;
}

double yield_loss(const Network& net, std::span<const double> theta, std::span<const PiPlanePoint> points,
                  double w_anchor) {
  if (points.empty()) throw Error(ErrorKind::EmptyDataset, "yield points");
  double s = 0.0;
  for (const auto& p : points) {
    const double x[2] = {p.pi1, p.pi2};
    double f = forward_scalar<double>(net, theta, x);
    s += f * f;
  }
  const double o[2] = {0.0, 0.0};
  double f0 = forward_scalar<double>(net, theta, o) + 1.0;
  return s / static_cast<double>(points.size()) + w_anchor * f0 * f0;
}

double yield_radius(const std::function<double(double, double)>& f, double angle, double tol, double r_max) {
  const double c = std::cos(angle), s = std::sin(angle);
  if (!(f(0.0, 0.0) < 0.0)) throw Error(ErrorKind::SamplingError, "origin is not inside the yield surface");
  double lo = 0.0, hi = 1e-3;
  while (f(hi * c, hi * s) <= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > r_max) throw Error(ErrorKind::SamplingError, "ray never leaves the yield surface");
  }
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    if (f(mid * c, mid * s) > 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace consparse
