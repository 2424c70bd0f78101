#include "consparse/data.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <random>

#include "consparse/csv.hpp"

namespace consparse {

const char* dataset_kind_name(DatasetKind k) {
  switch (k) {
    case DatasetKind::CompressibleFS: return "compressible-FS";
    case DatasetKind::Invariants: return "invariants";
    case DatasetKind::ModeCurve: return "mode-curve";
    case DatasetKind::YieldPoints: return "yield-points";
    case DatasetKind::Hardening: return "uniaxial-hardening";
  }
  return "?";
}

std::size_t Dataset::size() const {
  switch (kind) {
    case DatasetKind::CompressibleFS: return stress.size();
    case DatasetKind::Invariants: return invariants.size();
    case DatasetKind::ModeCurve: return curves.size();
    case DatasetKind::YieldPoints: return yield.size();
    case DatasetKind::Hardening: return hardening.size();
  }
  return 0;
}

std::vector<std::string> embedded_names() {
  return {"compressible-invariants-50", "treloar-20C", "treloar-50C", "cortex",  "corona-radiata",
          "midbrain-1",                 "midbrain-2",  "drucker",     "cazacu",  "tresca",
          "40Cr3MoV",                   "SS316L",      "U71Mn"};
}

Dataset load_embedded(const std::string& name) {
  Dataset d;
  d.name = name;
  if (name == "compressible-invariants-50") {
    d.kind = DatasetKind::Invariants;
    d.stress_unit = "-";
    for (const auto& r : table_invariants_50()) d.invariants.push_back({r[0], r[1], r[2]});
    return d;
  }
  bool found = false;
  for (const RawSeries& s : raw_series()) {
    if (name != s.dataset) continue;
    found = true;
    std::string mode = s.mode;
    if (mode == "PI") {
      d.kind = DatasetKind::YieldPoints;
      for (const auto& r : s.rows) d.yield.push_back({r[0], r[1]});
    } else if (mode == "HARD") {
      d.kind = DatasetKind::Hardening;
      for (const auto& r : s.rows) d.hardening.push_back({r[0], r[1]});
    } else {
      d.kind = DatasetKind::ModeCurve;
      for (const auto& r : s.rows) d.curves.push_back({parse_mode(mode), r[0], r[1], mode == "UC"});
    }
  }
  if (!found) throw Error(ErrorKind::UnknownDataset, name);
  return d;
}

// ---- quasi-random sampling

double radical_inverse(std::uint64_t i, int base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % static_cast<std::uint64_t>(base));
    i /= static_cast<std::uint64_t>(base);
    f *= inv;
  }
  return r;
}

static const int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

ShiftedHalton::ShiftedHalton(int dims, std::uint64_t seed) : dims_(dims) {
  if (dims < 1 || dims > 12) throw Error(ErrorKind::InvalidArgument, "Halton dimension must be in [1, 12]");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  shift_.resize(dims);
  for (auto& s : shift_) s = u(rng);
}

std::vector<double> ShiftedHalton::next() {
  ++index_;
  std::vector<double> p(dims_);
  for (int d = 0; d < dims_; ++d) {
    double v = radical_inverse(index_, kPrimes[d]) + shift_[d];
    p[d] = v - std::floor(v);
  }
  return p;
}

Dataset generate_compressible(HyperLaw law, double delta, int n, std::uint64_t seed) {
  if (!(delta >= 0.0 && delta < 0.5)) throw Error(ErrorKind::InvalidArgument, "delta must lie in [0, 0.5)");
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "need at least one sample");
  Dataset d;
  d.name = std::string("generated-") + law_name(law);
  d.kind = DatasetKind::CompressibleFS;
  ShiftedHalton seq(9, seed);
  std::size_t attempts = 0;
  while (static_cast<int>(d.stress.size()) < n) {
    ++attempts;
    if (attempts >= 100 && d.stress.size() * 100 < attempts)
      throw Error(ErrorKind::SamplingError, "more than 99% of samples rejected");
    std::vector<double> u = seq.next();
    Mat3 F;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double t = 2.0 * u[3 * i + j] - 1.0;
        F(i, j) = (i == j ? 1.0 : 0.0) + delta * t;
      }
    if (!(F.determinant() > 0.0)) continue;
    StressSample s;
    s.F = F;
    s.S = pack(ground_truth_stress(law, F));
    d.stress.push_back(s);
  }
  return d;
}

Dataset yield_points_from_function(const std::function<double(double, double)>& f, int n, const std::string& name) {
  if (n < 3) throw Error(ErrorKind::InvalidArgument, "need at least 3 rays");
  Dataset d;
  d.name = name;
  d.kind = DatasetKind::YieldPoints;
  for (int k = 0; k < n; ++k) {
    double a = M_PI + 2.0 * M_PI * k / (n - 1);
    double r = yield_radius(f, a);
    d.yield.push_back({r * std::cos(a), r * std::sin(a)});
  }
  return d;
}

Dataset yield_points_from_law(YieldLaw law, int n) {
  auto f = [law](double p1, double p2) { return yield_ground_truth_pi(law, p1, p2); };
  return yield_points_from_function(f, n, yield_law_name(law));
}

// ---- CSV

CsvKind parse_csv_kind(const std::string& s) {
  if (s == "mode-curve") return CsvKind::ModeCurve;
  if (s == "torsion") return CsvKind::Torsion;
  if (s == "yield-points") return CsvKind::YieldPoints;
  if (s == "hardening") return CsvKind::Hardening;
  if (s == "compressible") return CsvKind::Compressible;
  throw Error(ErrorKind::InvalidArgument, "unknown csv kind '" + s + "'");
}

const char* csv_kind_name(CsvKind k) {
  switch (k) {
    case CsvKind::ModeCurve: return "mode-curve";
    case CsvKind::Torsion: return "torsion";
    case CsvKind::YieldPoints: return "yield-points";
    case CsvKind::Hardening: return "hardening";
    case CsvKind::Compressible: return "compressible";
  }
  return "?";
}

std::vector<std::string> csv_header(CsvKind k) {
  switch (k) {
    case CsvKind::ModeCurve: return {"mode", "lambda_or_gamma", "P"};
    case CsvKind::Torsion: return {"phi", "tau"};
    case CsvKind::YieldPoints: return {"pi1", "pi2"};
    case CsvKind::Hardening: return {"strain_percent", "stress_mpa"};
    case CsvKind::Compressible:
      return {"F11", "F12", "F13", "F21", "F22", "F23", "F31", "F32", "F33", "S11", "S12", "S13", "S22", "S23", "S33"};
  }
  return {};
}

static std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t"), b = s.find_last_not_of(" \t");
  return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

static double to_number(const std::string& raw, std::size_t row, const std::string& col) {
  std::string s = trim(raw);
  double v = 0.0;
  const char* first = s.data();
  if (!s.empty() && s[0] == '+') ++first;
  auto res = std::from_chars(first, s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
    throw Error(ErrorKind::NonNumeric, "row " + std::to_string(row) + ", column " + col);
  return v;
}

Dataset parse_csv_text(const std::string& text, CsvKind kind, const std::string& name) {
  auto rows = csv::parse(text);
  if (rows.empty()) throw Error(ErrorKind::EmptyDataset, "no header row");
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < rows[0].size(); ++i) col[trim(rows[0][i])] = i;
  std::vector<std::string> want = csv_header(kind);
  std::vector<std::size_t> idx;
  for (const auto& w : want) {
    auto it = col.find(w);
    if (it == col.end()) throw Error(ErrorKind::MissingColumn, w);
    idx.push_back(it->second);
  }
  Dataset d;
  d.name = name;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    auto cell = [&](std::size_t k) -> const std::string& {
      if (idx[k] >= row.size()) throw Error(ErrorKind::NonNumeric, "row " + std::to_string(r) + ", column " + want[k]);
      return row[idx[k]];
    };
    auto val = [&](std::size_t k) { return to_number(cell(k), r, want[k]); };
    switch (kind) {
      case CsvKind::ModeCurve: {
        d.kind = DatasetKind::ModeCurve;
        std::string m = trim(cell(0));
        Mode mode;
        try {
          mode = parse_mode(m);
        } catch (const Error&) {
          throw Error(ErrorKind::NonNumeric, "row " + std::to_string(r) + ", column mode");
        }
        d.curves.push_back({mode, val(1), val(2), m == "UC"});
        break;
      }
      case CsvKind::Torsion:
        d.kind = DatasetKind::ModeCurve;
        d.curves.push_back({Mode::ST, val(0), val(1), false});
        break;
      case CsvKind::YieldPoints:
        d.kind = DatasetKind::YieldPoints;
        d.yield.push_back({val(0), val(1)});
        break;
      case CsvKind::Hardening: {
        d.kind = DatasetKind::Hardening;
        HardeningRow h{val(0), val(1)};
        if (!d.hardening.empty() && h.strain_percent < d.hardening.back().strain_percent)
          throw Error(ErrorKind::NonMonotoneStrain, "row " + std::to_string(r));
        d.hardening.push_back(h);
        break;
      }
      case CsvKind::Compressible: {
        d.kind = DatasetKind::CompressibleFS;
        StressSample s;
        for (int i = 0; i < 9; ++i) s.F(i / 3, i % 3) = val(i);
        for (int i = 0; i < 6; ++i) s.S[i] = val(9 + i);
        if (!(s.F.determinant() > 0.0)) throw Error(ErrorKind::InvalidDeformation, "row " + std::to_string(r));
        d.stress.push_back(s);
        break;
      }
    }
  }
  if (rows.size() == 1) {
    switch (kind) {
      case CsvKind::ModeCurve:
      case CsvKind::Torsion: d.kind = DatasetKind::ModeCurve; break;
      case CsvKind::YieldPoints: d.kind = DatasetKind::YieldPoints; break;
      case CsvKind::Hardening: d.kind = DatasetKind::Hardening; break;
      case CsvKind::Compressible: d.kind = DatasetKind::CompressibleFS; break;
    }
  }
  return d;
}

Dataset ingest_csv(const std::string& path, CsvKind kind) { return parse_csv_text(csv::read_file(path), kind, path); }

CsvKind natural_csv_kind(const Dataset& d) {
  switch (d.kind) {
    case DatasetKind::CompressibleFS: return CsvKind::Compressible;
    case DatasetKind::YieldPoints: return CsvKind::YieldPoints;
    case DatasetKind::Hardening: return CsvKind::Hardening;
    case DatasetKind::ModeCurve: {
      bool all_st = !d.curves.empty();
      for (const auto& p : d.curves) all_st = all_st && p.mode == Mode::ST;
      return all_st ? CsvKind::Torsion : CsvKind::ModeCurve;
    }
    case DatasetKind::Invariants: break;
  }
  throw Error(ErrorKind::InvalidArgument, "invariant tables have no CSV schema");
}

std::string dataset_to_csv(const Dataset& d, CsvKind kind) {
  std::string out = csv::join(csv_header(kind)) + "\r\n";
  auto line = [&](const csv::Row& r) { out += csv::join(r) + "\r\n"; };
  switch (kind) {
    case CsvKind::ModeCurve:
      for (const auto& p : d.curves)
        line({p.compression ? "UC" : mode_name(p.mode), csv::number(p.x), csv::number(p.P)});
      break;
    case CsvKind::Torsion:
      for (const auto& p : d.curves)
        if (p.mode == Mode::ST) line({csv::number(p.x), csv::number(p.P)});
      break;
    case CsvKind::YieldPoints:
      for (const auto& p : d.yield) line({csv::number(p.pi1), csv::number(p.pi2)});
      break;
    case CsvKind::Hardening:
      for (const auto& p : d.hardening) line({csv::number(p.strain_percent), csv::number(p.stress_mpa)});
      break;
    case CsvKind::Compressible:
      for (const auto& s : d.stress) {
        csv::Row r;
        for (int i = 0; i < 9; ++i) r.push_back(csv::number(s.F(i / 3, i % 3)));
        for (int i = 0; i < 6; ++i) r.push_back(csv::number(s.S[i]));
        line(r);
      }
      break;
  }
  return out;
}

std::uint64_t dataset_hash(const Dataset& d) {
  std::string text = dataset_kind_name(d.kind);
  text += '\n';
  if (d.kind == DatasetKind::Invariants) {
    for (const auto& v : d.invariants)
      text += csv::number(v.I1) + "," + csv::number(v.I2) + "," + csv::number(v.J) + "\n";
  } else {
    text += dataset_to_csv(d, d.kind == DatasetKind::ModeCurve ? CsvKind::ModeCurve : natural_csv_kind(d));
  }
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace consparse
