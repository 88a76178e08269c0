#pragma once

#include <cstdint>

#include "dslab/report.hpp"
#include "dslab/scenario.hpp"

namespace dslab {

struct RunOptions {
  std::uint64_t seed = 42;
  int threads = 1;
  /// Multiplies every pass tolerance.
  double tol_scale = 1.0;
};

Grid scenario_grid(const Scenario& s);
DampedOperator scenario_operator(const Scenario& s);
/// Member `index` of the scenario's initial-data ensemble. Member 0 of a
/// one-element ensemble is the configured packet; larger ensembles draw the
/// momentum direction, its size and a center offset from (seed, index).
ComplexField initial_data(const Scenario& s, const Grid& g, int index, std::uint64_t seed);

/// Dispatches on s.target.
VerdictReport run_scenario(const Scenario& s, const RunOptions& opts = {});

VerdictReport run_local_energy_decay(const Scenario& s, const RunOptions& opts = {});
VerdictReport run_smoothing(const Scenario& s, const RunOptions& opts = {});
VerdictReport run_resolvent_regime(const Scenario& s, const RunOptions& opts = {});
/// Dissipativity, quadratic estimate, trivial bound, resolvent-power
/// derivative, perturbation expansion and dilation laws in one batch.
VerdictReport run_structural_suite(const Scenario& s, const RunOptions& opts = {});
VerdictReport run_classical_suite(const Scenario& s, const RunOptions& opts = {});
/// Decay fits of e^{-itH} <D>^{-sigma} u0 for each sigma; no pass/fail gate.
VerdictReport run_loss_comparison(const Scenario& s, const RunOptions& opts = {});

/// Sweep with an explicit z list (CLI `sweep`).
VerdictReport run_sweep(const Scenario& s, const std::vector<Complex>& z_list, const RunOptions& opts = {});

}  // namespace dslab
