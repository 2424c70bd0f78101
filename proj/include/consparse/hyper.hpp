#pragma once

#include <Eigen/Dense>
#include <array>
#include <span>
#include <string>
#include <vector>

#include "consparse/autodiff.hpp"
#include "consparse/nets.hpp"

namespace consparse {

using Mat3 = Eigen::Matrix3d;

struct Invariants {
  double I1 = 3.0;
  double I2 = 3.0;
  double J = 1.0;
};

struct DeformationState {
  Mat3 F = Mat3::Identity();
  Mat3 C = Mat3::Identity();
  Mat3 Cinv = Mat3::Identity();
  double I1 = 3.0;
  double I2 = 3.0;
  double J = 1.0;
};

Mat3 adjugate(const Mat3& A);
Mat3 cofactor(const Mat3& A);  // det(A) A^{-T}
DeformationState deformation_state(const Mat3& F);
Invariants invariants(const Mat3& F);

// symmetric 3x3 packed as 11,12,13,22,23,33
template <class S>
using Sym6 = std::array<S, 6>;
Mat3 unpack(const Sym6<double>& s);
Sym6<double> pack(const Mat3& m);

template <class S>
Sym6<S> pk2_from_gradients(const DeformationState& st, S d1, S d2, S dJ) {
  Sym6<S> out{};
  const int idx[6][2] = {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}};
  S diag = (d1 + d2 * st.I1) * 2.0;
  for (int k = 0; k < 6; ++k) {
    int i = idx[k][0], j = idx[k][1];
    S v = d2 * (-2.0 * st.C(i, j)) + dJ * (st.J * st.Cinv(i, j));
    if (i == j) v = v + diag;
    out[k] = v;
  }
  return out;
}

// ---- ground-truth laws

enum class HyperLaw { GentGent, MooneyRivlin, Polynomial };
const char* law_name(HyperLaw law);
HyperLaw parse_hyper_law(const std::string& s);

struct EnergyGradient {
  double psi = 0.0;
  double dI1 = 0.0;
  double dI2 = 0.0;
  double dJ = 0.0;
};

namespace gent {
constexpr double theta1 = 2.4195, Jm = 77.931, theta2 = -0.75, theta3 = 1.20975;
}
namespace mooney {
constexpr double theta1 = 9.2e-4, theta2 = 2.37e-3, theta3 = 10.0010;
}
namespace poly {
constexpr double theta1 = 0.1, theta2 = 0.15, theta3 = 2e-4, theta4 = 1e-4, theta5 = 0.125;
}

// raw law as printed, with hand-derived gradients
EnergyGradient ground_truth_energy(HyperLaw law, double I1, double I2, double J);

template <class S>
S ground_truth_psi(HyperLaw law, S I1, S I2, S J) {
  switch (law) {
    case HyperLaw::GentGent: {
      using namespace gent;
      S t1 = log((I1 - 3.0) * (-1.0 / Jm) + 1.0) * (-theta1 * 0.5 * Jm);
      S t2 = log(I2 / J) * (-theta2);
      S t3 = ((J * J - 1.0) * 0.5 - log(J)) * theta3;
      return t1 + t2 + t3;
    }
    case HyperLaw::MooneyRivlin: {
      using namespace mooney;
      S a = (I1 * pow(J, -2.0 / 3.0) - 3.0) * theta1;
      S b = (I2 * pow(J, -4.0 / 3.0) - 3.0) * theta2;
      S c = (J - 1.0) * (J - 1.0) * theta3;
      return a + b + c;
    }
    case HyperLaw::Polynomial: {
      using namespace poly;
      S a = I1 - 3.0, b = I2 - 3.0, c = J * J - 1.0;
      S a2 = a * a, b2 = b * b;
      return a2 * theta1 + a2 * a2 * theta2 + b2 * theta3 + b2 * b2 * theta4 + c * c * theta5;
    }
  }
  return I1 * 0.0;
}

// law shifted so that energy and stress vanish at C = I:
// psi - psi(3,3,1) - n (J - 1), n = 2 dI1 + 4 dI2 + dJ at (3,3,1)
EnergyGradient normalized_ground_truth(HyperLaw law, double I1, double I2, double J);
Mat3 ground_truth_stress(HyperLaw law, const Mat3& F);

// ---- network potentials

template <class S>
struct PotentialGradient {
  S psi;
  std::vector<S> grad;
};

// network value and input gradient; the Var form records the backward pass
// so the gradient can be differentiated w.r.t. theta
PotentialGradient<Var> nn_input_gradient(Tape& tape, const Network& net, std::span<const Var> theta,
                                         std::span<const double> x, const std::vector<char>* dead = nullptr);
PotentialGradient<double> nn_input_gradient(const Network& net, std::span<const double> theta,
                                            std::span<const double> x);

class CompressiblePotential {
 public:
  explicit CompressiblePotential(const Network& net);

  const Network& net() const { return *net_; }
  // test-mode quantities
  double reference_energy() const { return psi_ref_; }
  double slope() const { return n_; }
  double energy(double I1, double I2, double J) const;
  EnergyGradient energy_gradient(double I1, double I2, double J) const;
  Mat3 stress(const Mat3& F) const;

 private:
  const Network* net_;
  std::vector<double> theta_;
  double psi_ref_ = 0.0;
  double n_ = 0.0;
};

Var compressible_energy(Tape& tape, const Network& net, std::span<const Var> theta, double I1, double I2, double J);

class IncompressiblePotential {
 public:
  explicit IncompressiblePotential(const Network& net);

  const Network& net() const { return *net_; }
  double reference_energy() const { return psi_ref_; }
  double slope() const { return n_; }
  // energy on the incompressible manifold (J = 1)
  double energy(double I1, double I2) const;
  std::array<double, 2> gradient(double I1, double I2) const;

 private:
  const Network* net_;
  std::vector<double> theta_;
  double psi_ref_ = 0.0;
  double n_ = 0.0;
};

enum class Mode { UT, ET, PS, SS, ST };
const char* mode_name(Mode m);
Mode parse_mode(const std::string& s);

// invariants (I1 = I1(x), I2 = I2(x)) on the incompressible path of a mode
std::array<double, 2> mode_invariants(Mode mode, double x);

template <class S>
struct ModeStress {
  S P1;
  S P2;  // PS: transverse component; ET: equals P1; otherwise zero
};

template <class S>
ModeStress<S> mode_stress_from_gradients(Mode mode, double x, S d1, S d2) {
  const double l = x;
  switch (mode) {
    case Mode::UT: {
      S p = (d1 + d2 * (1.0 / l)) * (2.0 * (l - 1.0 / (l * l)));
      return {p, d1 * 0.0};
    }
    case Mode::ET: {
      S p = (d1 + d2 * (l * l)) * (2.0 * (l - std::pow(l, -5.0)));
      return {p, p};
    }
    case Mode::PS: {
      S p1 = (d1 + d2) * (2.0 * (l - std::pow(l, -3.0)));
      S p2 = (d1 + d2 * (l * l)) * (2.0 * (1.0 - 1.0 / (l * l)));
      return {p1, p2};
    }
    case Mode::SS: {
      S p = (d1 + d2) * (2.0 * x);
      return {p, d1 * 0.0};
    }
    case Mode::ST: break;
  }
  throw Error(ErrorKind::InvalidArgument, "torsion has no pointwise stress");
}

ModeStress<double> incompressible_mode_stress(const IncompressiblePotential& pot, Mode mode, double x);
double torsion_torque(const IncompressiblePotential& pot, double phi, int n_quad);

// trapezoid nodes/weights on [0,1]
void trapezoid_rule(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace consparse
