#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "consparse/hyper.hpp"
#include "consparse/plast.hpp"

namespace consparse {

// one column pair of a source table
struct RawSeries {
  const char* dataset;
  const char* mode;  // UT, UC, ET, PS, SS, ST, PI, HARD
  std::vector<std::array<double, 2>> rows;
};

const std::vector<RawSeries>& raw_series();
const std::vector<std::array<double, 3>>& table_invariants_50();

enum class DatasetKind { CompressibleFS, Invariants, ModeCurve, YieldPoints, Hardening };
const char* dataset_kind_name(DatasetKind k);

struct ModePoint {
  Mode mode = Mode::UT;
  double x = 1.0;  // stretch, shear amount or twist angle
  double P = 0.0;  // P11, P12 or torque
  bool compression = false;  // UC rows kept distinguishable for export
};

struct StressSample {
  Mat3 F = Mat3::Identity();
  Sym6<double> S{};
};

struct HardeningRow {
  double strain_percent = 0.0;
  double stress_mpa = 0.0;
};

struct Dataset {
  std::string name;
  DatasetKind kind = DatasetKind::ModeCurve;
  std::string stress_unit = "MPa";
  std::vector<ModePoint> curves;
  std::vector<StressSample> stress;
  std::vector<Invariants> invariants;
  std::vector<PiPlanePoint> yield;
  std::vector<HardeningRow> hardening;

  std::size_t size() const;
};

std::vector<std::string> embedded_names();
Dataset load_embedded(const std::string& name);

// quasi-random F in the box diag in [1-d, 1+d], off-diag in [-d, d], det F > 0,
// stresses from the stress-free-normalized law
Dataset generate_compressible(HyperLaw law, double delta, int n, std::uint64_t seed);

// n rays at angles pi + 2 pi k/(n-1), k = 0..n-1
Dataset yield_points_from_law(YieldLaw law, int n);
Dataset yield_points_from_function(const std::function<double(double, double)>& f, int n, const std::string& name);

enum class CsvKind { ModeCurve, Torsion, YieldPoints, Hardening, Compressible };
CsvKind parse_csv_kind(const std::string& s);
const char* csv_kind_name(CsvKind k);
std::vector<std::string> csv_header(CsvKind k);

Dataset ingest_csv(const std::string& path, CsvKind kind);
Dataset parse_csv_text(const std::string& text, CsvKind kind, const std::string& name = "csv");
std::string dataset_to_csv(const Dataset& d, CsvKind kind);
CsvKind natural_csv_kind(const Dataset& d);

// FNV-1a over the canonical CSV serialization
std::uint64_t dataset_hash(const Dataset& d);

// Halton point (1-based index) with a seeded Cranley-Patterson shift
class ShiftedHalton {
 public:
  ShiftedHalton(int dims, std::uint64_t seed);
  std::vector<double> next();

 private:
  int dims_;
  std::uint64_t index_ = 0;
  std::vector<double> shift_;
};

double radical_inverse(std::uint64_t i, int base);

}  // namespace consparse
