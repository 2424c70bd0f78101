#include "consparse/gates.hpp"

#include <algorithm>

namespace consparse {

void GateConstants::validate() const {
  if (!(gamma < 0.0 && zeta > 1.0 && beta > 0.0 && beta < 1.0))
    throw Error(ErrorKind::InvalidGateConstants, "need gamma < 0 < 1 < zeta and beta in (0,1)");
}

double clamp_noise(double u) { return std::clamp(u, kNoiseFloor, 1.0 - kNoiseFloor); }

double draw_noise(std::mt19937_64& rng) {
  return clamp_noise(std::uniform_real_distribution<double>(0.0, 1.0)(rng));
}

static void check_noise(double u) {
  if (!(u > 0.0 && u < 1.0)) throw Error(ErrorKind::InvalidNoise, "u must lie strictly inside (0,1)");
}

Var sample_gate(Tape& tape, Var log_alpha, double u, const GateConstants& c) {
  check_noise(u);
  (void)tape;
  return gate_from_noise(log_alpha, u, c);
}

Var sample_gate(Tape& tape, const GatedParam& gp, double u, const GateConstants& c) {
  check_noise(u);
  return gate_from_noise(tape.variable(gp.log_alpha), u, c);
}

Var expected_l0_penalty(Tape& tape, const GatedParam& gp, const GateConstants& c) {
  return l0_penalty(tape.variable(gp.log_alpha), c);
}

double expected_l0_penalty(const GatedParam& gp, const GateConstants& c) { return l0_penalty(gp.log_alpha, c); }

double test_gate(const GatedParam& gp, const GateConstants& c) {
  double s = sigmoid(gp.log_alpha) * (c.zeta - c.gamma) + c.gamma;
  return std::min(1.0, std::max(0.0, s));
}

std::size_t active_count(std::span<const GatedParam> params, const GateConstants& c) {
  std::size_t n = 0;
  for (const auto& p : params) {
    double z = test_gate(p, c);
    if (z > 0.0 && p.theta_bar * z != 0.0) ++n;
  }
  return n;
}

GatedParam init_gated(double theta_bar, std::mt19937_64& rng) {
  return GatedParam{theta_bar, std::normal_distribution<double>(0.0, 0.01)(rng)};
}

}  // namespace consparse
