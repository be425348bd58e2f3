#include "rovib/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rovib {

namespace {

double e_ho(const MoleculeModel& m, const std::vector<int>& v) {
  double e = 0;
  for (int k = 0; k < m.n_modes(); ++k) e += m.omega_cm1[k] * (v[k] + 0.5);
  return e;
}

constexpr double kResonanceFloorCm1 = 1.0;

}  // namespace

std::vector<double> pt2_energies(const MoleculeModel& m, const DerivedFrame& f, int vmax,
                                 const std::vector<RovibBasisState>& references,
                                 unsigned mask) {
  const unsigned pmask = mask & ~unsigned(TermGroup::HO);
  HamiltonianEvaluator ev(m, f, vmax, 0,
                          pmask ? pmask : unsigned(TermGroup::HO) /* empty H' */);
  const bool empty_perturbation = pmask == 0;
  const BasisIndexer idx(m.n_modes(), vmax, 0);
  std::vector<double> out;
  for (const auto& r : references) {
    const double e0 = e_ho(m, r.v);
    double e = e0;
    if (!empty_perturbation) {
      e += std::real(ev.matrix_element(r, r));
      double second = 0;
      int resonant = -1;  // exceptions cannot cross the parallel region
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(+ : second) reduction(max : resonant)
#endif
      for (int j = 0; j < idx.dim(); ++j) {
        const RovibBasisState other = idx.state(j);
        if (other.v == r.v) continue;
        const double den = e0 - e_ho(m, other.v);
        const cxd hij = ev.matrix_element(r, other);
        if (std::abs(hij) == 0.0) continue;
        if (std::abs(den) < kResonanceFloorCm1) {
          resonant = std::max(resonant, j);
          continue;
        }
        second += std::norm(hij) / den;
      }
      if (resonant >= 0)
        throw NumericalError("near-degenerate denominator for state " + r.vib_label() +
                             " / " + idx.state(resonant).vib_label() +
                             "; resonance treatment is out of scope");
      e += second;
    }
    out.push_back(e);
  }
  return out;
}

Distribution pt1_distribution(const MoleculeModel& m, const DerivedFrame& f, int vmax,
                              const RovibBasisState& reference, unsigned mask) {
  const unsigned pmask = mask & ~unsigned(TermGroup::HO);
  const BasisIndexer idx(m.n_modes(), vmax, 0);
  const QubitLayout lay(m.n_modes(), vmax, 0);
  Distribution d;
  d.provenance = Provenance::PerturbationTheory;
  d.p[lay.encode(reference)] = 1.0;
  if (pmask == 0) return d;
  HamiltonianEvaluator ev(m, f, vmax, 0, pmask);
  const double e0 = e_ho(m, reference.v);
  for (int j = 0; j < idx.dim(); ++j) {
    const RovibBasisState other = idx.state(j);
    if (other.v == reference.v) continue;
    const cxd hij = ev.matrix_element(other, reference);
    if (std::abs(hij) == 0.0) continue;
    const double den = e0 - e_ho(m, other.v);
    if (std::abs(den) < kResonanceFloorCm1)
      throw NumericalError("near-degenerate denominator for state " + reference.vib_label() +
                           " / " + other.vib_label() +
                           "; resonance treatment is out of scope");
    const double c = std::abs(hij) / std::abs(den);
    d.p[lay.encode(other)] = c * c;
  }
  return d;
}

namespace {

std::vector<RovibBasisState> parity_block(const MoleculeModel& m, int vmax, int parity) {
  const BasisIndexer idx(m.n_modes(), vmax, 0);
  std::vector<RovibBasisState> out;
  for (int i = 0; i < idx.dim(); ++i) {
    RovibBasisState b = idx.state(i);
    if (b.parity() == parity) out.push_back(b);
  }
  return out;
}

double picked_energy(const BasisSet& basis, const HamiltonianEvaluator& ev,
                     const RovibBasisState& ref) {
  const auto H = subspace_hamiltonian(basis, ev, Exec::Serial);
  const auto eig = solve_subspace(H, static_cast<int>(basis.size()));
  return eig.values(pick_by_overlap(eig, basis, ref));
}

}  // namespace

GreedyCurve optimal_greedy(const MoleculeModel& m, const DerivedFrame& f, int vmax,
                           const RovibBasisState& reference, int max_size) {
  HamiltonianEvaluator ev(m, f, vmax, 0);
  const auto block = parity_block(m, vmax, reference.parity());
  if (max_size > static_cast<int>(block.size()))
    throw ValidationError("requested basis size exceeds the parity-block dimension");
  GreedyCurve curve;
  curve.reference = reference;
  curve.basis = {reference};
  curve.energies_cm1 = {std::real(ev.matrix_element(reference, reference))};

  while (static_cast<int>(curve.basis.size()) < max_size) {
    const int nb = static_cast<int>(curve.basis.size());
    std::vector<double> cand_energy(block.size(),
                                    std::numeric_limits<double>::infinity());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::size_t c = 0; c < block.size(); ++c) {
      if (std::find(curve.basis.begin(), curve.basis.end(), block[c]) != curve.basis.end())
        continue;
      BasisSet trial;
      trial.states = curve.basis;
      trial.states.push_back(block[c]);
      cand_energy[c] = picked_energy(trial, ev, reference);
    }
    // ties (within 1e-10) break toward the lower basis index
    int best = -1;
    double best_e = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < block.size(); ++c) {
      if (cand_energy[c] < best_e - 1e-10) {
        best_e = cand_energy[c];
        best = static_cast<int>(c);
      }
    }
    if (best < 0) throw NumericalError("greedy step found no candidate");
    curve.basis.push_back(block[best]);
    curve.energies_cm1.push_back(best_e);
    (void)nb;
  }
  return curve;
}

RandomBaselineStats random_baseline(const MoleculeModel& m, const DerivedFrame& f, int vmax,
                                    const std::vector<RovibBasisState>& references, int size,
                                    int trials, std::uint64_t seed) {
  if (size < static_cast<int>(references.size()))
    throw ValidationError("basis size must cover the reference states");
  const BasisIndexer idx(m.n_modes(), vmax, 0);
  if (size > idx.dim()) throw ValidationError("basis size exceeds the space dimension");
  HamiltonianEvaluator ev(m, f, vmax, 0);

  std::vector<RovibBasisState> pool;
  for (int i = 0; i < idx.dim(); ++i) {
    RovibBasisState b = idx.state(i);
    if (std::find(references.begin(), references.end(), b) == references.end())
      pool.push_back(b);
  }
  const int nref = static_cast<int>(references.size());
  const int draw = size - nref;
  std::vector<std::vector<double>> energies(nref, std::vector<double>(trials));

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(seed + std::uint64_t(t));
    std::vector<int> perm(pool.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
    for (int i = 0; i < draw; ++i) {
      const std::size_t j =
          i + static_cast<std::size_t>(canonical_u01(rng()) * double(perm.size() - i));
      std::swap(perm[i], perm[j]);
    }
    BasisSet basis;
    basis.states = references;
    for (int i = 0; i < draw; ++i) basis.states.push_back(pool[perm[i]]);
    const auto H = subspace_hamiltonian(basis, ev, Exec::Serial);
    const auto eig = solve_subspace(H, size);
    for (int r = 0; r < nref; ++r)
      energies[r][t] = eig.values(pick_by_overlap(eig, basis, references[r]));
  }

  RandomBaselineStats st;
  st.size = size;
  st.trials = trials;
  st.seed = seed;
  for (int r = 0; r < nref; ++r) {
    double mean = 0;
    for (double e : energies[r]) mean += e;
    mean /= trials;
    double var = 0;
    for (double e : energies[r]) var += (e - mean) * (e - mean);
    st.mean_cm1.push_back(mean);
    st.std_cm1.push_back(std::sqrt(var / trials));
  }
  return st;
}

}  // namespace rovib
