#pragma once

#include <map>
#include <string>
#include <vector>

#include "rovib/qsci.hpp"
#include "rovib/watson.hpp"

namespace rovib {

// Second-order perturbation theory on top of the harmonic oscillator,
// H = H_HO + H'; sums run over all basis states up to vmax.
std::vector<double> pt2_energies(const MoleculeModel& m, const DerivedFrame& f, int vmax,
                                 const std::vector<RovibBasisState>& references,
                                 unsigned perturbation_mask = kAllGroups);

// First-order perturbed-wavefunction distribution (unnormalized; the
// reference component has probability one).
Distribution pt1_distribution(const MoleculeModel& m, const DerivedFrame& f, int vmax,
                              const RovibBasisState& reference,
                              unsigned perturbation_mask = kAllGroups);

struct GreedyCurve {
  RovibBasisState reference;
  std::vector<RovibBasisState> basis;   // in insertion order, starting at the reference
  std::vector<double> energies_cm1;     // tracked-state energy at sizes 1..max_size
};

// Add one basis state at a time, minimizing the energy of the state with the
// largest overlap with the reference, over the full parity block.
GreedyCurve optimal_greedy(const MoleculeModel& m, const DerivedFrame& f, int vmax,
                           const RovibBasisState& reference, int max_size);

struct RandomBaselineStats {
  std::vector<double> mean_cm1;  // per reference
  std::vector<double> std_cm1;
  int size = 0;
  int trials = 0;
  std::uint64_t seed = 0;
};

// Random bases of the given size, always containing the references; one
// shared basis per trial, picked-state energies per reference.
RandomBaselineStats random_baseline(const MoleculeModel& m, const DerivedFrame& f, int vmax,
                                    const std::vector<RovibBasisState>& references, int size,
                                    int trials, std::uint64_t seed);

}  // namespace rovib
