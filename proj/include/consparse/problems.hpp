#pragma once

#include <optional>
#include <string>
#include <vector>

#include "consparse/data.hpp"
#include "consparse/hyper.hpp"
#include "consparse/plast.hpp"
#include "consparse/train.hpp"

namespace consparse {

double r_squared(const std::vector<double>& pred, const std::vector<double>& target);

class CompressibleProblem : public Problem {
 public:
  CompressibleProblem(std::vector<StressSample> train, std::vector<StressSample> val, std::vector<StressSample> test,
                      std::optional<HyperLaw> law = std::nullopt);

  std::string kind() const override { return "hyper-compressible"; }
  NetKind default_arch() const override { return NetKind::Icnn; }
  Network make_network(const std::vector<int>& hidden, NetKind arch, std::mt19937_64& rng) const override;
  Var data_loss(Tape& tape, const Network& net, std::span<const Var> theta,
                const std::vector<char>* dead) const override;
  double train_loss(const Network& net, std::span<const double> theta) const override;
  double val_loss(const Network& net, std::span<const double> theta) const override;
  nlohmann::json metrics(const Network& net) const override;
  nlohmann::json describe() const override;

  double loss_on(const std::vector<StressSample>& set, const Network& net, std::span<const double> theta) const;
  // relative L2 of all stress components along F = diag(F11, 1, 1)
  double uniaxial_rel_l2(const Network& net, double lo, double hi, int n) const;
  const std::optional<HyperLaw>& law() const { return law_; }

  struct Prepared {
    DeformationState st;
    Sym6<double> S;
  };

 private:
  static std::vector<Prepared> prepare(const std::vector<StressSample>& v);

  std::vector<Prepared> train_, val_, test_;
  std::vector<StressSample> train_raw_, test_raw_;
  std::optional<HyperLaw> law_;
  double f11_lo_ = 1.0, f11_hi_ = 1.0;
};

// pk2 stress of the normalized network potential for explicit parameters
Sym6<double> network_pk2(const Network& net, std::span<const double> theta, const DeformationState& st);

class IncompressibleProblem : public Problem {
 public:
  IncompressibleProblem(std::vector<ModePoint> train, std::vector<ModePoint> test, int n_quad = 20);

  std::string kind() const override { return "hyper-incompressible"; }
  NetKind default_arch() const override { return NetKind::Icnn; }
  Network make_network(const std::vector<int>& hidden, NetKind arch, std::mt19937_64& rng) const override;
  Var data_loss(Tape& tape, const Network& net, std::span<const Var> theta,
                const std::vector<char>* dead) const override;
  double train_loss(const Network& net, std::span<const double> theta) const override;
  double val_loss(const Network& net, std::span<const double> theta) const override;
  nlohmann::json metrics(const Network& net) const override;
  nlohmann::json describe() const override;

  std::vector<double> predict(const Network& net, std::span<const double> theta,
                              const std::vector<ModePoint>& pts) const;
  const std::vector<ModePoint>& train_points() const { return train_; }
  const std::vector<ModePoint>& test_points() const { return test_; }

 private:
  std::vector<ModePoint> train_, test_;
  int n_quad_;
};

class YieldProblem : public Problem {
 public:
  explicit YieldProblem(std::vector<PiPlanePoint> points, double w_anchor = 1.0);

  std::string kind() const override { return "yield"; }
  NetKind default_arch() const override { return NetKind::Icnn; }
  Network make_network(const std::vector<int>& hidden, NetKind arch, std::mt19937_64& rng) const override;
  Var data_loss(Tape& tape, const Network& net, std::span<const Var> theta,
                const std::vector<char>* dead) const override;
  double train_loss(const Network& net, std::span<const double> theta) const override;
  double val_loss(const Network& net, std::span<const double> theta) const override;
  nlohmann::json metrics(const Network& net) const override;
  nlohmann::json describe() const override;

  // |r_fit - r_data| / r_data along each data ray
  std::vector<double> radial_errors(const Network& net) const;
  const std::vector<PiPlanePoint>& points() const { return points_; }

 private:
  std::vector<PiPlanePoint> points_;
  double w_anchor_;
  double mean_radius_ = 1.0;
};

class HardeningProblem : public Problem {
 public:
  HardeningProblem(std::vector<HardeningRow> rows, ElasticConstants ec, double w0 = 1e3);

  std::string kind() const override { return "hardening"; }
  NetKind default_arch() const override { return NetKind::Monotone; }
  Network make_network(const std::vector<int>& hidden, NetKind arch, std::mt19937_64& rng) const override;
  Var data_loss(Tape& tape, const Network& net, std::span<const Var> theta,
                const std::vector<char>* dead) const override;
  double train_loss(const Network& net, std::span<const double> theta) const override;
  double val_loss(const Network& net, std::span<const double> theta) const override;
  nlohmann::json metrics(const Network& net) const override;
  nlohmann::json describe() const override;

  const ElasticConstants& constants() const { return ec_; }
  const std::vector<HardeningSample>& samples() const { return samples_; }
  double max_strain() const { return max_strain_; }

 private:
  std::vector<HardeningSample> samples_;
  ElasticConstants ec_;
  double w0_;
  double max_strain_ = 0.0;
};

}  // namespace consparse
