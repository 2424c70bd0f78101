#pragma once

#include <random>
#include <span>

#include "consparse/autodiff.hpp"

namespace consparse {

struct GateConstants {
  double gamma = -0.1;
  double zeta = 1.1;
  double beta = 2.0 / 3.0;

  void validate() const;
};

struct GatedParam {
  double theta_bar = 0.0;
  double log_alpha = 0.0;
};

constexpr double kNoiseFloor = 1e-6;

// clamps a raw uniform draw into [1e-6, 1 - 1e-6]
double clamp_noise(double u);
double draw_noise(std::mt19937_64& rng);

// z = min(1, max(0, s(zeta - gamma) + gamma)), s = sigmoid((logit u + log alpha)/beta)
template <class S>
S gate_from_noise(S log_alpha, double u, const GateConstants& c) {
  const double logit = std::log(u) - std::log1p(-u);
  S s = sigmoid((log_alpha + logit) * (1.0 / c.beta));
  S sbar = s * (c.zeta - c.gamma) + c.gamma;
  return min_const(max_const(sbar, 0.0), 1.0);
}

template <class S>
S l0_penalty(S log_alpha, const GateConstants& c) {
  return sigmoid(log_alpha - c.beta * std::log(-c.gamma / c.zeta));
}

Var sample_gate(Tape& tape, Var log_alpha, double u, const GateConstants& c = {});
Var sample_gate(Tape& tape, const GatedParam& gp, double u, const GateConstants& c = {});
Var expected_l0_penalty(Tape& tape, const GatedParam& gp, const GateConstants& c = {});
double expected_l0_penalty(const GatedParam& gp, const GateConstants& c = {});
double test_gate(const GatedParam& gp, const GateConstants& c = {});
std::size_t active_count(std::span<const GatedParam> params, const GateConstants& c = {});

GatedParam init_gated(double theta_bar, std::mt19937_64& rng);

}  // namespace consparse
