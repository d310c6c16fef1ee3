#pragma once

#include <functional>
#include <string>
#include <vector>

#include "vortexpatch/elliptic.hpp"
#include "vortexpatch/grid.hpp"
#include "vortexpatch/maximizer.hpp"

namespace vpl {

enum class Limiter { minmod, van_leer, superbee };

Limiter limiter_from_name(const std::string& name);

struct EvolutionParams {
  double cfl = 0.4;
  double dt_max = 0.0;  // 0 -> h
  Limiter limiter = Limiter::superbee;  // compressive: right for two-valued vorticity
  int profile_levels = 64;
  double sample_interval = 0.0;  // 0 -> T / 100
};

struct EvolutionState {
  double t = 0.0;
  Field omega;
  Field psi;
  double dt_last = 0.0;
};

/// CFL-limited time step: cfl * h / max(|v1| + |v2|), capped at dt_max.
double stable_dt(const Grid& grid, const Velocity& v, double cfl, double dt_max);

/// Level-ladder distribution function a -> |{omega > a}| for
/// a in {0, lambda/L, ..., lambda}.
struct DistributionProfile {
  std::vector<double> levels;
  std::vector<double> measures;
};

DistributionProfile distribution_profile(const Grid& grid, const Field& omega, double lambda,
                                         int levels);

double profile_drift(const DistributionProfile& a, const DistributionProfile& b);

struct Diagnostics {
  double t = 0.0;
  double dt = 0.0;
  double energy = 0.0;
  double mass = 0.0;
  double l1 = 0.0, l2 = 0.0, l4 = 0.0;
  double min_w = 0.0, max_w = 0.0;
  DistributionProfile profile;
};

Diagnostics diagnostics(const Grid& grid, const EvolutionState& state, double lambda,
                        int profile_levels = 64);

/// One explicit two-stage step of the vorticity transport equation with the
/// conservative limited-upwind flux. Recomputes psi, conserves mass exactly,
/// imposes zero flux through the masked boundary. Throws BlowUpError when
/// max |omega| exceeds 2 lambda.
EvolutionState advect_step(const Grid& grid, const EvolutionState& state, double dt,
                           const PatchSpec& spec, const EvolutionParams& params);

struct EvolveResult {
  std::vector<Diagnostics> samples;
  EvolutionState final_state;
};

using SampleCallback = std::function<void(const EvolutionState&, const Diagnostics&)>;

/// Evolves omega0 to time T with adaptive dt, landing exactly on the sample
/// times; diagnostics are recorded (and the callback invoked) at each sample.
EvolveResult evolve(const Grid& grid, const Field& omega0, double T, const PatchSpec& spec,
                    const EvolutionParams& params, const SampleCallback& on_sample = {});

/// Characteristic rotation time of a patch: area / (max speed * diameter).
double eddy_turnover_time(const Grid& grid, const Field& omega, const PatchSpec& spec);

}  // namespace vpl
