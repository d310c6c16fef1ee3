#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vortexpatch/dynamics.hpp"
#include "vortexpatch/grid.hpp"
#include "vortexpatch/maximizer.hpp"

namespace vpl {

/// Lp distance (sum |a-b|^p cell_area)^(1/p) over interior cells, p >= 1.
double lp_distance(const Field& a, const Field& b, int p, const Grid& grid);

/// Finite model of the maximizer set: a single representative (isolated
/// case) or a sampled rotation orbit about the domain center (annulus).
struct MaximizerSetModel {
  std::vector<Field> representatives;
  bool orbit = false;
  Vec2 center{0.0, 0.0};
  double sample_step = 0.0;  // angular spacing of orbit samples
};

MaximizerSetModel single_maximizer_model(Field omega_star);

/// Rotates a patch field by theta about `center` (bilinear resampling
/// followed by re-thresholding so the result is an exact admissible patch).
Field rotate_patch(const Grid& grid, const Field& omega, double theta, Vec2 center,
                   const PatchSpec& spec);

/// Orbit model: n_theta rotated copies of the base maximizer.
MaximizerSetModel orbit_model(const Grid& grid, const Field& base, const PatchSpec& spec,
                              int n_theta);

/// min over representatives of lp_distance; orbit models additionally refine
/// the rotation angle around the best sample.
double distance_to_set(const Field& omega, const MaximizerSetModel& model, int p,
                       const Grid& grid, const PatchSpec& spec);

enum class PerturbationKind { translate, boundary_noise, amplitude_dent };

PerturbationKind perturbation_kind_from_name(const std::string& name);
std::string to_string(PerturbationKind kind);

struct ExperimentConfig {
  double delta = 0.05;      // target L1 perturbation magnitude
  int p = 2;                // distance exponent reported alongside p = 1
  double T = 0.0;           // horizon; 0 -> 10 eddy turnovers
  PerturbationKind kind = PerturbationKind::translate;
  std::uint64_t seed = 1;
};

/// Exact projection onto the admissible set: clip to [0, lambda], then
/// water-fill / drain uniformly so the mass constraint holds exactly.
Field project_to_admissible(const Field& omega, const PatchSpec& spec, const Grid& grid);

/// Admissible perturbation of a maximizer patch with L1 distance to it in
/// [delta/2, 2 delta]. Throws InfeasiblePerturbation when delta cannot be
/// realized inside K.
Field perturb(const Field& omega_star, const ExperimentConfig& config, const PatchSpec& spec,
              const Grid& grid);

struct ExperimentSample {
  double t = 0.0;
  double dist_p1 = 0.0;
  double dist_p = 0.0;  // at the configured exponent
  double energy = 0.0;
  double mass = 0.0;
  double profile_drift = 0.0;
};

struct ExperimentRecord {
  std::vector<ExperimentSample> series;           // perturbed run
  std::vector<ExperimentSample> baseline_series;  // unperturbed run
  double sup_dist = 0.0;
  double baseline_sup_dist = 0.0;
  double excess_sup_dist = 0.0;  // sup_t max(0, dist(t) - baseline(t))
  double initial_dist = 0.0;
  double horizon = 0.0;
  bool completed = true;  // false when the evolution blew up mid-run
};

/// Orbital-stability protocol: perturb within K, evolve to the horizon, and
/// track the Lp distance to the maximizer-set model alongside the
/// unperturbed baseline run.
ExperimentRecord run_orbital_experiment(const ExperimentConfig& config,
                                        const MaximizerSetModel& model, const Grid& grid,
                                        const PatchSpec& spec, const EvolutionParams& params);

/// Same protocol with distance measured to a single presumed-isolated
/// maximizer.
ExperimentRecord run_isolated_experiment(const ExperimentConfig& config,
                                         const Field& omega_lambda, const Grid& grid,
                                         const PatchSpec& spec, const EvolutionParams& params);

}  // namespace vpl
