#include "actrack/observation.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "actrack/errors.hpp"

namespace actrack {

namespace {

inline double normal_cdf(double t) {
  return 0.5 * std::erfc(-t * 0.70710678118654752440);
}

inline double bin_mass(double mu, double sigma, double center, double half) {
  return normal_cdf((center + half - mu) / sigma) -
         normal_cdf((center - half - mu) / sigma);
}

// Total mass over the contiguous bins [first-half, last+half]; the per-bin
// integrals telescope, so the normalizer needs two CDF evaluations only.
inline double grid_mass(double mu, double sigma, double first, double last,
                        double half) {
  return normal_cdf((last + half - mu) / sigma) -
         normal_cdf((first - half - mu) / sigma);
}

// (lower knot index, interpolation fraction) for a clamped query.
std::pair<std::size_t, double> bracket(const std::vector<double>& knots,
                                       double v) {
  if (knots.size() == 1 || v <= knots.front()) return {0, 0.0};
  if (v >= knots.back()) return {knots.size() - 2, 1.0};
  const auto hi = static_cast<std::size_t>(
      std::upper_bound(knots.begin(), knots.end(), v) - knots.begin());
  const std::size_t lo = hi - 1;
  return {lo, (v - knots[lo]) / (knots[hi] - knots[lo])};
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

AoaGrid AoaGrid::with_resolution(double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("AoaGrid: resolution must be > 0");
  const double n = 180.0 / rho;
  const auto bins_above_zero = static_cast<int>(std::lround(n));
  if (std::abs(n - bins_above_zero) > 1e-9 || bins_above_zero < 1) {
    throw std::invalid_argument("AoaGrid: 180 must be an integer multiple of the resolution");
  }
  AoaGrid grid;
  grid.resolution = rho;
  grid.bins.resize(static_cast<std::size_t>(bins_above_zero) + 1);
  for (std::size_t i = 0; i < grid.bins.size(); ++i) {
    grid.bins[i] = static_cast<double>(i) * rho;
  }
  grid.bins.back() = 180.0;
  return grid;
}

void ObservationTable::validate() const {
  if (distance_knots.empty() || aoa_knots.empty()) {
    throw std::invalid_argument("ObservationTable: empty knot axis");
  }
  const std::size_t n = distance_knots.size() * aoa_knots.size();
  if (mu.size() != n || sigma.size() != n) {
    throw std::invalid_argument("ObservationTable: value matrix shape mismatch");
  }
  for (std::size_t i = 1; i < distance_knots.size(); ++i) {
    if (!(distance_knots[i] > distance_knots[i - 1])) {
      throw std::invalid_argument("ObservationTable: distance knots not ascending");
    }
  }
  for (std::size_t i = 1; i < aoa_knots.size(); ++i) {
    if (!(aoa_knots[i] > aoa_knots[i - 1])) {
      throw std::invalid_argument("ObservationTable: aoa knots not ascending");
    }
  }
  if (aoa_knots.front() < 0.0 || aoa_knots.back() > 180.0) {
    throw std::invalid_argument("ObservationTable: aoa knots outside [0, 180]");
  }
  for (double s : sigma) {
    if (!(s > 0.0)) throw std::invalid_argument("ObservationTable: sigma entries must be > 0");
  }
  for (double m : mu) {
    if (!(m >= 0.0 && m <= 180.0)) {
      throw std::invalid_argument("ObservationTable: mu entries outside [0, 180]");
    }
  }
}

RelativeGeometry relative_geometry(const WorldState& w) {
  const double dx = w.source.x - w.robot.x;
  const double dy = w.source.y - w.robot.y;
  const double dist = std::hypot(dx, dy);
  if (!(dist > 0.0)) {
    throw std::domain_error("relative_geometry: degenerate geometry");
  }
  const double bearing =
      wrap_angle(rad2deg(std::atan2(dy, dx)) - w.robot.theta);
  return {dist, std::abs(bearing)};
}

ObsParams interpolate_params(const ObservationTable& table, double distance,
                             double folded_aoa) {
  const auto [di, td] = bracket(table.distance_knots, distance);
  const auto [ai, ta] = bracket(table.aoa_knots, folded_aoa);
  const std::size_t di1 = std::min(di + 1, table.distance_knots.size() - 1);
  const std::size_t ai1 = std::min(ai + 1, table.aoa_knots.size() - 1);

  const auto blend = [&](const std::vector<double>& m) {
    const double v00 = m[table.index(di, ai)];
    const double v01 = m[table.index(di, ai1)];
    const double v10 = m[table.index(di1, ai)];
    const double v11 = m[table.index(di1, ai1)];
    return (1.0 - td) * ((1.0 - ta) * v00 + ta * v01) +
           td * ((1.0 - ta) * v10 + ta * v11);
  };
  return {blend(table.mu), blend(table.sigma)};
}

std::vector<double> observation_pmf(const ObservationTable& table,
                                    const AoaGrid& grid, const WorldState& w) {
  const RelativeGeometry geo = relative_geometry(w);
  const ObsParams p = interpolate_params(table, geo.distance, geo.folded_aoa);
  const double half = grid.resolution / 2.0;
  const double total =
      grid_mass(p.mu, p.sigma, grid.bins.front(), grid.bins.back(), half);

  std::vector<double> pmf(grid.bins.size());
  for (std::size_t i = 0; i < grid.bins.size(); ++i) {
    pmf[i] = bin_mass(p.mu, p.sigma, grid.bins[i], half) / total;
  }
  return pmf;
}

Observation sample_observation(std::span<const double> pmf,
                               const AoaGrid& grid, RandomStream& rng) {
  assert(pmf.size() == grid.bins.size());
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    acc += pmf[i];
    if (u < acc) {
      return {static_cast<int>(i), grid.bins[i]};
    }
  }
  const int last = static_cast<int>(pmf.size()) - 1;
  return {last, grid.bins[static_cast<std::size_t>(last)]};
}

double likelihood(const ObservationTable& table, const AoaGrid& grid,
                  const WorldState& w, const Observation& z) {
  const RelativeGeometry geo = relative_geometry(w);
  const ObsParams p = interpolate_params(table, geo.distance, geo.folded_aoa);
  const double half = grid.resolution / 2.0;
  const double total =
      grid_mass(p.mu, p.sigma, grid.bins.front(), grid.bins.back(), half);
  const double mass =
      bin_mass(p.mu, p.sigma, grid.value(z.bin_index), half) / total;
  return std::max(mass, kLikelihoodFloor);
}

ObservationTable build_synthetic_table(const SyntheticTableParams& params) {
  if (!(params.sigma0 > 0.0)) {
    throw std::invalid_argument("synthetic table: sigma0 must be > 0");
  }
  if (!(params.kappa >= 0.0)) {
    throw std::invalid_argument("synthetic table: kappa must be >= 0");
  }
  if (!(params.distance_step > 0.0) || !(params.aoa_step > 0.0)) {
    throw std::invalid_argument("synthetic table: step sizes must be > 0");
  }
  const double nd_f = params.max_distance / params.distance_step;
  const auto nd_steps = static_cast<int>(std::lround(nd_f));
  if (nd_steps < 1 || std::abs(nd_f - nd_steps) > 1e-9) {
    throw std::invalid_argument(
        "synthetic table: max_distance must be a positive multiple of distance_step");
  }
  const double na_f = 180.0 / params.aoa_step;
  const auto na_steps = static_cast<int>(std::lround(na_f));
  if (na_steps < 1 || std::abs(na_f - na_steps) > 1e-9) {
    throw std::invalid_argument(
        "synthetic table: 180 must be an integer multiple of aoa_step");
  }

  ObservationTable table;
  table.distance_knots.resize(static_cast<std::size_t>(nd_steps) + 1);
  for (std::size_t i = 0; i < table.distance_knots.size(); ++i) {
    table.distance_knots[i] = static_cast<double>(i) * params.distance_step;
  }
  table.aoa_knots.resize(static_cast<std::size_t>(na_steps) + 1);
  for (std::size_t i = 0; i < table.aoa_knots.size(); ++i) {
    table.aoa_knots[i] = static_cast<double>(i) * params.aoa_step;
  }
  table.aoa_knots.back() = 180.0;

  table.mu.resize(table.distance_knots.size() * table.aoa_knots.size());
  table.sigma.resize(table.mu.size());
  for (std::size_t di = 0; di < table.distance_knots.size(); ++di) {
    for (std::size_t ai = 0; ai < table.aoa_knots.size(); ++ai) {
      const double d = table.distance_knots[di];
      const double phi = table.aoa_knots[ai];
      table.mu[table.index(di, ai)] = phi;
      table.sigma[table.index(di, ai)] =
          (params.sigma0 + params.sigma_slope * d) *
          (1.0 + params.kappa * std::abs(std::cos(deg2rad(phi))));
    }
  }
  table.validate();
  return table;
}

void save_table_csv(const ObservationTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "distance_m,aoa_deg,mu_deg,sigma_deg\n";
  for (std::size_t di = 0; di < table.distance_knots.size(); ++di) {
    for (std::size_t ai = 0; ai < table.aoa_knots.size(); ++ai) {
      out << format_double(table.distance_knots[di]) << ','
          << format_double(table.aoa_knots[ai]) << ','
          << format_double(table.mu[table.index(di, ai)]) << ','
          << format_double(table.sigma[table.index(di, ai)]) << '\n';
    }
  }
  if (!out) throw IoError("write failed: " + path);
}

ObservationTable load_table_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open observation table: " + path);

  const auto fail = [&](std::size_t line, const std::string& what) -> void {
    throw ConfigError(path + ":" + std::to_string(line) + ": " + what);
  };

  std::string line;
  if (!std::getline(in, line)) fail(1, "empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "distance_m,aoa_deg,mu_deg,sigma_deg") {
    fail(1, "bad header, expected distance_m,aoa_deg,mu_deg,sigma_deg");
  }

  struct Row {
    double d, a, mu, sigma;
  };
  std::vector<Row> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::array<double, 4> vals{};
    std::size_t start = 0;
    for (int f = 0; f < 4; ++f) {
      const std::size_t end = f < 3 ? line.find(',', start) : line.size();
      if (end == std::string::npos) fail(lineno, "expected 4 comma-separated fields");
      const std::string field = line.substr(start, end - start);
      char* stop = nullptr;
      vals[static_cast<std::size_t>(f)] = std::strtod(field.c_str(), &stop);
      if (field.empty() || stop != field.c_str() + field.size()) {
        fail(lineno, "bad numeric field '" + field + "'");
      }
      start = end + 1;
    }
    rows.push_back({vals[0], vals[1], vals[2], vals[3]});
  }
  if (rows.empty()) fail(lineno, "no data rows");

  // Distance-major layout: the AoA axis is the run of rows sharing the first
  // distance value.
  std::size_t na = 0;
  while (na < rows.size() && rows[na].d == rows[0].d) ++na;
  if (na == 0 || rows.size() % na != 0) fail(2, "incomplete knot grid");
  const std::size_t nd = rows.size() / na;

  ObservationTable table;
  table.aoa_knots.resize(na);
  for (std::size_t ai = 0; ai < na; ++ai) table.aoa_knots[ai] = rows[ai].a;
  table.distance_knots.resize(nd);
  table.mu.resize(nd * na);
  table.sigma.resize(nd * na);
  for (std::size_t di = 0; di < nd; ++di) {
    table.distance_knots[di] = rows[di * na].d;
    for (std::size_t ai = 0; ai < na; ++ai) {
      const Row& r = rows[di * na + ai];
      if (r.d != table.distance_knots[di] || r.a != table.aoa_knots[ai]) {
        fail(2 + di * na + ai, "rows not in distance-major knot order");
      }
      table.mu[table.index(di, ai)] = r.mu;
      table.sigma[table.index(di, ai)] = r.sigma;
    }
  }
  try {
    table.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return table;
}

}  // namespace actrack
