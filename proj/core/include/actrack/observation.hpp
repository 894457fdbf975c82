#pragma once

#include <span>
#include <string>
#include <vector>

#include "actrack/kinematics.hpp"
#include "actrack/random.hpp"

namespace actrack {

/// Mass below which an observation likelihood is floored; prevents all-zero
/// particle weights and -inf logs under outlier observations.
inline constexpr double kLikelihoodFloor = 1e-12;

/// Uniform grid of AoA hypotheses over the folded ULA range [0, 180] deg.
struct AoaGrid {
  double resolution = 5.0;    // deg between bin centers
  std::vector<double> bins;   // centers, first 0, last 180

  /// Builds the grid for a resolution that divides 180 evenly.
  static AoaGrid with_resolution(double rho);

  int num_bins() const { return static_cast<int>(bins.size()); }
  double value(int bin) const { return bins[static_cast<std::size_t>(bin)]; }
};

/// Gridded observation-model parameters (mu, sigma) over distance and folded
/// AoA, bilinearly interpolated between knots. Immutable after construction
/// and shareable read-only across threads.
struct ObservationTable {
  std::vector<double> distance_knots;  // m, ascending
  std::vector<double> aoa_knots;       // deg in [0, 180], ascending
  std::vector<double> mu;              // deg, row-major [distance][aoa]
  std::vector<double> sigma;           // deg, > 0, same layout

  std::size_t index(std::size_t di, std::size_t ai) const {
    return di * aoa_knots.size() + ai;
  }
  /// Throws std::invalid_argument when the invariants do not hold.
  void validate() const;
};

/// A quantized AoA measurement: a bin of the grid.
struct Observation {
  int bin_index = 0;
  double value = 0.0;  // deg, the bin center
};

struct RelativeGeometry {
  double distance = 0.0;    // m
  double folded_aoa = 0.0;  // deg in [0, 180]
};

/// Distance and folded AoA of the source relative to the robot. The array
/// axis is the robot heading; bearings mirror-symmetric about it fold onto
/// [0, 180]. Throws std::domain_error on coincident positions.
RelativeGeometry relative_geometry(const WorldState& w);

struct ObsParams {
  double mu = 0.0;     // deg
  double sigma = 1.0;  // deg
};

/// Bilinear interpolation of (mu, sigma); queries outside the knot range are
/// clamped to the boundary knots.
ObsParams interpolate_params(const ObservationTable& table, double distance,
                             double folded_aoa);

/// Quantized-Gaussian PMF over the grid bins for the given world state,
/// renormalized to sum to 1.
std::vector<double> observation_pmf(const ObservationTable& table,
                                    const AoaGrid& grid, const WorldState& w);

/// Inverse-CDF categorical draw from a PMF over the grid.
Observation sample_observation(std::span<const double> pmf,
                               const AoaGrid& grid, RandomStream& rng);

/// The z-entry of observation_pmf, floored at kLikelihoodFloor.
double likelihood(const ObservationTable& table, const AoaGrid& grid,
                  const WorldState& w, const Observation& z);

/// Settings of the synthetic-table generator. The generated model is
/// unbiased (mu = aoa) with spread growing with distance and towards the
/// endfire directions: sigma = (sigma0 + sigma_slope*d) * (1 + kappa*|cos aoa|).
struct SyntheticTableParams {
  double sigma0 = 2.0;         // deg
  double sigma_slope = 1.5;    // deg per m
  double kappa = 2.0;          // endfire inflation, >= 0
  double max_distance = 9.0;   // m
  double distance_step = 0.5;  // m
  double aoa_step = 5.0;       // deg
};

/// Builds the synthetic table. Throws std::invalid_argument on settings that
/// would produce a non-positive sigma or a malformed grid.
ObservationTable build_synthetic_table(const SyntheticTableParams& params);

/// Writers/readers for the table file format: UTF-8 CSV, header
/// `distance_m,aoa_deg,mu_deg,sigma_deg`, one row per knot pair in
/// distance-major order. Values round-trip exactly.
void save_table_csv(const ObservationTable& table, const std::string& path);
ObservationTable load_table_csv(const std::string& path);

}  // namespace actrack
