#include "consparse/hyper.hpp"

#include <cmath>

namespace consparse {

Mat3 adjugate(const Mat3& A) {
  Mat3 adj;
  adj(0, 0) = A(1, 1) * A(2, 2) - A(1, 2) * A(2, 1);
  adj(0, 1) = A(0, 2) * A(2, 1) - A(0, 1) * A(2, 2);
  adj(0, 2) = A(0, 1) * A(1, 2) - A(0, 2) * A(1, 1);
  adj(1, 0) = A(1, 2) * A(2, 0) - A(1, 0) * A(2, 2);
  adj(1, 1) = A(0, 0) * A(2, 2) - A(0, 2) * A(2, 0);
  adj(1, 2) = A(0, 2) * A(1, 0) - A(0, 0) * A(1, 2);
  adj(2, 0) = A(1, 0) * A(2, 1) - A(1, 1) * A(2, 0);
  adj(2, 1) = A(0, 1) * A(2, 0) - A(0, 0) * A(2, 1);
  adj(2, 2) = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
  return adj;
}

Mat3 cofactor(const Mat3& A) { return adjugate(A).transpose(); }

DeformationState deformation_state(const Mat3& F) {
  if (!F.allFinite()) throw Error(ErrorKind::InvalidDeformation, "non-finite F");
  double J = F.determinant();
  if (!(J > 0.0)) throw Error(ErrorKind::InvalidDeformation, "det F must be positive");
  DeformationState st;
  st.F = F;
  st.C = F.transpose() * F;
  Mat3 adj = adjugate(st.C);
  double detC = st.C(0, 0) * adj(0, 0) + st.C(0, 1) * adj(1, 0) + st.C(0, 2) * adj(2, 0);
  st.Cinv = adj / detC;
  st.I1 = st.C.trace();
  st.I2 = adj.trace();  // trace of cof C equals trace of adj C
  st.J = J;
  return st;
}

Invariants invariants(const Mat3& F) {
  DeformationState st = deformation_state(F);
  return {st.I1, st.I2, st.J};
}

Mat3 unpack(const Sym6<double>& s) {
  Mat3 m;
  m << s[0], s[1], s[2], s[1], s[3], s[4], s[2], s[4], s[5];
  return m;
}

Sym6<double> pack(const Mat3& m) { return {m(0, 0), m(0, 1), m(0, 2), m(1, 1), m(1, 2), m(2, 2)}; }

const char* law_name(HyperLaw law) {
  switch (law) {
    case HyperLaw::GentGent: return "gent-gent";
    case HyperLaw::MooneyRivlin: return "mooney-rivlin";
    case HyperLaw::Polynomial: return "polynomial";
  }
  return "?";
}

HyperLaw parse_hyper_law(const std::string& s) {
  if (s == "gent-gent" || s == "gent") return HyperLaw::GentGent;
  if (s == "mooney-rivlin" || s == "mooney") return HyperLaw::MooneyRivlin;
  if (s == "polynomial") return HyperLaw::Polynomial;
  throw Error(ErrorKind::InvalidArgument, "unknown hyperelastic law '" + s + "'");
}

EnergyGradient ground_truth_energy(HyperLaw law, double I1, double I2, double J) {
  if (!(J > 0.0)) throw Error(ErrorKind::InvalidDeformation, "J must be positive");
  EnergyGradient g;
  switch (law) {
    case HyperLaw::GentGent: {
      using namespace gent;
      double q = 1.0 - (I1 - 3.0) / Jm;
      if (!(q > 0.0)) throw Error(ErrorKind::InvalidDeformation, "Gent limit I1 - 3 < Jm violated");
      if (!(I2 > 0.0)) throw Error(ErrorKind::InvalidDeformation, "I2 must be positive");
      g.psi = -0.5 * theta1 * Jm * std::log(q) - theta2 * std::log(I2 / J) + theta3 * (0.5 * (J * J - 1.0) - std::log(J));
      g.dI1 = 0.5 * theta1 / q;
      g.dI2 = -theta2 / I2;
      g.dJ = theta2 / J + theta3 * (J - 1.0 / J);
      break;
    }
    case HyperLaw::MooneyRivlin: {
      using namespace mooney;
      double j23 = std::pow(J, -2.0 / 3.0), j43 = std::pow(J, -4.0 / 3.0);
      g.psi = theta1 * (I1 * j23 - 3.0) + theta2 * (I2 * j43 - 3.0) + theta3 * (J - 1.0) * (J - 1.0);
      g.dI1 = theta1 * j23;
      g.dI2 = theta2 * j43;
      g.dJ = -2.0 / 3.0 * theta1 * I1 * j23 / J - 4.0 / 3.0 * theta2 * I2 * j43 / J + 2.0 * theta3 * (J - 1.0);
      break;
    }
    case HyperLaw::Polynomial: {
      using namespace poly;
      double a = I1 - 3.0, b = I2 - 3.0, c = J * J - 1.0;
      g.psi = theta1 * a * a + theta2 * a * a * a * a + theta3 * b * b + theta4 * b * b * b * b + theta5 * c * c;
      g.dI1 = 2.0 * theta1 * a + 4.0 * theta2 * a * a * a;
      g.dI2 = 2.0 * theta3 * b + 4.0 * theta4 * b * b * b;
      g.dJ = 4.0 * theta5 * c * J;
      break;
    }
  }
  return g;
}

EnergyGradient normalized_ground_truth(HyperLaw law, double I1, double I2, double J) {
  EnergyGradient ref = ground_truth_energy(law, 3.0, 3.0, 1.0);
  double n = 2.0 * ref.dI1 + 4.0 * ref.dI2 + ref.dJ;
  EnergyGradient g = ground_truth_energy(law, I1, I2, J);
  g.psi -= ref.psi + n * (J - 1.0);
  g.dJ -= n;
  return g;
}

Mat3 ground_truth_stress(HyperLaw law, const Mat3& F) {
  DeformationState st = deformation_state(F);
  EnergyGradient g = normalized_ground_truth(law, st.I1, st.I2, st.J);
  return unpack(pk2_from_gradients<double>(st, g.dI1, g.dI2, g.dJ));
}

PotentialGradient<Var> nn_input_gradient(Tape& tape, const Network& net, std::span<const Var> theta,
                                         std::span<const double> x, const std::vector<char>* dead) {
  std::vector<Var> xv(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) xv[i] = tape.variable(x[i]);
  Var psi = forward<Var>(net, theta, xv, dead)[0];
  std::vector<Var> g = tape.gradient_graph(psi, xv);
  return {psi, std::move(g)};
}

PotentialGradient<double> nn_input_gradient(const Network& net, std::span<const double> theta,
                                            std::span<const double> x) {
  Tape tape;
  std::vector<Var> th(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) th[i] = tape.constant(theta[i]);
  std::vector<Var> xv(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) xv[i] = tape.variable(x[i]);
  Var psi = forward<Var>(net, th, xv)[0];
  return {psi.value(), tape.gradient(psi, xv)};
}

CompressiblePotential::CompressiblePotential(const Network& net) : net_(&net), theta_(test_parameters(net)) {
  if (net.n_inputs() != 3 || net.n_outputs() != 1)
    throw Error(ErrorKind::ShapeError, "compressible potential needs a 3-input scalar network");
  const double ref[3] = {3.0, 3.0, 1.0};
  auto g = nn_input_gradient(net, theta_, ref);
  psi_ref_ = g.psi;
  n_ = 2.0 * g.grad[0] + 4.0 * g.grad[1] + g.grad[2];
}

double CompressiblePotential::energy(double I1, double I2, double J) const {
  if (!(J > 0.0)) throw Error(ErrorKind::InvalidDeformation, "J must be positive");
  const double x[3] = {I1, I2, J};
  return forward_scalar<double>(*net_, theta_, x) - psi_ref_ - n_ * (J - 1.0);
}

EnergyGradient CompressiblePotential::energy_gradient(double I1, double I2, double J) const {
  const double x[3] = {I1, I2, J};
  auto g = nn_input_gradient(*net_, theta_, x);
  return {g.psi - psi_ref_ - n_ * (J - 1.0), g.grad[0], g.grad[1], g.grad[2] - n_};
}

Mat3 CompressiblePotential::stress(const Mat3& F) const {
  DeformationState st = deformation_state(F);
  EnergyGradient g = energy_gradient(st.I1, st.I2, st.J);
  return unpack(pk2_from_gradients<double>(st, g.dI1, g.dI2, g.dJ));
}

Var compressible_energy(Tape& tape, const Network& net, std::span<const Var> theta, double I1, double I2, double J) {
  if (!(J > 0.0)) throw Error(ErrorKind::InvalidDeformation, "J must be positive");
  const double ref[3] = {3.0, 3.0, 1.0};
  auto g = nn_input_gradient(tape, net, theta, ref);
  Var n = g.grad[0] * 2.0 + g.grad[1] * 4.0 + g.grad[2];
  std::vector<Var> x = {tape.constant(I1), tape.constant(I2), tape.constant(J)};
  Var psi = forward<Var>(net, theta, x)[0];
  return psi - g.psi - n * (J - 1.0);
}

IncompressiblePotential::IncompressiblePotential(const Network& net) : net_(&net), theta_(test_parameters(net)) {
  if (net.n_inputs() != 2 || net.n_outputs() != 1)
    throw Error(ErrorKind::ShapeError, "incompressible potential needs a 2-input scalar network");
  const double ref[2] = {3.0, 3.0};
  auto g = nn_input_gradient(net, theta_, ref);
  psi_ref_ = g.psi;
  n_ = 2.0 * (g.grad[0] + 2.0 * g.grad[1]);
}

double IncompressiblePotential::energy(double I1, double I2) const {
  const double x[2] = {I1, I2};
  return forward_scalar<double>(*net_, theta_, x) - psi_ref_;
}

std::array<double, 2> IncompressiblePotential::gradient(double I1, double I2) const {
  const double x[2] = {I1, I2};
  auto g = nn_input_gradient(*net_, theta_, x);
  return {g.grad[0], g.grad[1]};
}

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::UT: return "UT";
    case Mode::ET: return "ET";
    case Mode::PS: return "PS";
    case Mode::SS: return "SS";
    case Mode::ST: return "ST";
  }
  return "?";
}

Mode parse_mode(const std::string& s) {
  if (s == "UT" || s == "UC") return Mode::UT;
  if (s == "ET") return Mode::ET;
  if (s == "PS") return Mode::PS;
  if (s == "SS") return Mode::SS;
  if (s == "ST") return Mode::ST;
  throw Error(ErrorKind::InvalidArgument, "unknown deformation mode '" + s + "'");
}

std::array<double, 2> mode_invariants(Mode mode, double x) {
  if (mode != Mode::SS && mode != Mode::ST && !(x > 0.0))
    throw Error(ErrorKind::InvalidDeformation, "stretch must be positive");
  const double l = x;
  switch (mode) {
    case Mode::UT: return {l * l + 2.0 / l, 2.0 * l + 1.0 / (l * l)};
    case Mode::ET: return {2.0 * l * l + std::pow(l, -4.0), std::pow(l, 4.0) + 2.0 / (l * l)};
    case Mode::PS: {
      double v = l * l + 1.0 + 1.0 / (l * l);
      return {v, v};
    }
    case Mode::SS:
    case Mode::ST: {
      double v = 3.0 + x * x;
      return {v, v};
    }
  }
  return {3.0, 3.0};
}

ModeStress<double> incompressible_mode_stress(const IncompressiblePotential& pot, Mode mode, double x) {
  auto inv = mode_invariants(mode, x);
  auto g = pot.gradient(inv[0], inv[1]);
  return mode_stress_from_gradients<double>(mode, x, g[0], g[1]);
}

void trapezoid_rule(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "trapezoid rule needs at least 2 nodes");
  nodes.resize(n);
  weights.assign(n, 1.0 / (n - 1));
  for (int k = 0; k < n; ++k) nodes[k] = static_cast<double>(k) / (n - 1);
  weights.front() *= 0.5;
  weights.back() *= 0.5;
}

double torsion_torque(const IncompressiblePotential& pot, double phi, int n_quad) {
  std::vector<double> rho, w;
  trapezoid_rule(n_quad, rho, w);
  double tau = 0.0;
  for (int k = 0; k < n_quad; ++k) {
    double r = rho[k];
    if (r == 0.0 || phi == 0.0) continue;
    double I = 3.0 + (r * phi) * (r * phi);
    auto g = pot.gradient(I, I);
    tau += w[k] * 4.0 * M_PI * r * r * r * phi * (g[0] + g[1]);
  }
  return tau;
}

}  // namespace consparse
