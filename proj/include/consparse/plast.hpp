#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "consparse/autodiff.hpp"
#include "consparse/nets.hpp"

namespace consparse {

struct PiPlanePoint {
  double pi1 = 0.0;
  double pi2 = 0.0;
};

// rows of the orthonormal principal-stress -> pi-plane map
Eigen::Matrix3d pi_transform();
std::array<double, 3> principal_to_pi(double s1, double s2, double s3);
std::array<double, 3> pi_to_principal(double pi1, double pi2, double pi3 = 0.0);

enum class YieldLaw { Drucker, Cazacu, Tresca };
const char* yield_law_name(YieldLaw law);
YieldLaw parse_yield_law(const std::string& s);

constexpr double kYieldConstant = 0.24;

// principal stresses in; Drucker and Cazacu act on the deviator
double yield_ground_truth(YieldLaw law, const std::array<double, 3>& principal);
double yield_ground_truth_pi(YieldLaw law, double pi1, double pi2);

struct ElasticConstants {
  double E = 0.0;
  double nu = 0.0;
  double sigma_y = 0.0;

  void validate() const;
  double lame_lambda() const;
  double lame_mu() const;
  // Voigt order 11,22,33,23,13,12; engineering shear strains
  Eigen::Matrix<double, 6, 6> stiffness() const;
};

ElasticConstants material_constants(const std::string& name);

struct HardeningModel {
  Network net;  // monotone, one input r, one output R
  double w0 = 1e3;
};

struct UniaxialPoint {
  double strain = 0.0;
  double stress = 0.0;
  double r = 0.0;
  bool plastic = false;
};

using ScalarFn = std::function<double(double)>;

// R and its derivative as plain functions of r
struct HardeningCurve {
  ScalarFn R;
  ScalarFn dR;
};

HardeningCurve hardening_curve(const Network& net, std::span<const double> theta);
HardeningCurve hardening_curve(const Network& net);

std::vector<UniaxialPoint> uniaxial_response(const HardeningCurve& h, const ElasticConstants& ec,
                                             std::span<const double> strain);
std::vector<double> uniaxial_elastoplastic_curve(const HardeningModel& hm, const ElasticConstants& ec,
                                                 std::span<const double> strain);

struct HardeningSample {
  double strain = 0.0;  // fraction, not percent
  double stress = 0.0;  // MPa
};

// mean of ((sigma_pred - sigma)/sigma_y)^2 + w0 (R(0) - 1)^2. Plastic points use
// sigma_pred = k sigma_y R(r*) + (1 - k) sigma*, k = 1/(1 + sigma_y R'(r*)/E),
// which carries the implicit-function gradient of the return map.
Var fit_hardening_loss(Tape& tape, const Network& net, std::span<const Var> theta, const ElasticConstants& ec,
                       std::span<const HardeningSample> data, double w0, const std::vector<char>* dead = nullptr);
double hardening_loss(const Network& net, std::span<const double> theta, const ElasticConstants& ec,
                      std::span<const HardeningSample> data, double w0);

// mean f(pi_i)^2 + w_anchor (f(0,0) + 1)^2
Var fit_yield_loss(Tape& tape, const Network& net, std::span<const Var> theta, std::span<const PiPlanePoint> points,
                   double w_anchor = 1.0, const std::vector<char>* dead = nullptr);
double yield_loss(const Network& net, std::span<const double> theta, std::span<const PiPlanePoint> points,
                  double w_anchor = 1.0);

// radius along direction angle where f crosses zero, bisection from the origin
double yield_radius(const std::function<double(double, double)>& f, double angle, double tol = 1e-10,
                    double r_max = 1e3);

}  // namespace consparse
