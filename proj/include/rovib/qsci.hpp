#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rovib/common.hpp"
#include "rovib/statevector.hpp"
#include "rovib/watson.hpp"

namespace rovib {

// Ordered, deduplicated set of basis states with sampling provenance.
struct BasisSet {
  std::vector<RovibBasisState> states;
  std::string provenance;

  bool contains(const RovibBasisState& b) const {
    return std::find(states.begin(), states.end(), b) != states.end();
  }
  std::size_t size() const { return states.size(); }
};

struct Schedule {
  enum class Mode { VaryNst, VaryTau } mode = Mode::VaryNst;
  double tau_au = 10.0;              // fixed tau (VaryNst mode)
  int n_st = 1;                      // fixed step count (VaryTau mode)
  std::vector<int> nst_points;       // VaryNst
  std::vector<double> tau_points_au; // VaryTau
  double epsilon = 1e-4;
  double lambda_cm1 = 0.0;
  long n_shot = 0;                   // 0 = exact distribution
  std::uint64_t seed = 1;
  TermOrder order = TermOrder::DescendingAbsCoeff;

  int n_points() const {
    return static_cast<int>(mode == Mode::VaryNst ? nst_points.size() : tau_points_au.size());
  }
  void validate() const;
};

Schedule load_schedule(const std::string& path);

BasisSet select_basis(const Distribution& d, const QubitLayout& lay, double epsilon,
                      const BasisSet& carry);

Eigen::MatrixXcd subspace_hamiltonian(const BasisSet& omega, const HamiltonianEvaluator& ev,
                                      Exec exec = Exec::Parallel);

struct SubspaceEigs {
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;
};
// Dense below kIterativeThreshold, Lanczos above.
SubspaceEigs solve_subspace(const Eigen::MatrixXcd& H, int n_lowest);

int pick_by_overlap(const SubspaceEigs& eigs, const BasisSet& omega,
                    const RovibBasisState& reference);

struct PickedState {
  BasisSet omega;
  Eigen::VectorXcd coeff;
  RovibBasisState reference;
  double energy_cm1 = 0;
};

struct CombineResult {
  std::vector<double> energies_cm1;       // one per picked state, input order
  std::vector<int> assignment;            // picked-state index per combined eigenstate
  double max_offdiag_overlap = 0;
  BasisSet union_basis;
  Eigen::MatrixXcd combined_vectors;      // columns over union_basis, reordered per input
};

CombineResult combine_references(const std::vector<PickedState>& picked,
                                 const HamiltonianEvaluator& ev, double overlap_cutoff = 1e-8);

BasisSet union_basis(const std::vector<BasisSet>& sets);

BasisSet extend_to_J(const BasisSet& omega_j0, int J);

// Label of an eigenvector over `omega` by the max-overlap product state
// |v1..vN> |Phi_{J_KaKc}>.
struct StateLabel {
  std::string vib;
  int Ka = -1, Kc = -1;
  bool ambiguous = false;
  std::string str(int J) const;
};
StateLabel assign_label(const Eigen::VectorXcd& coeff, const BasisSet& omega,
                        const DerivedFrame& frame, int J);

// Exact labeled levels from a dense solve (when feasible).
std::map<std::string, double> exact_labeled_spectrum(const MoleculeModel& m,
                                                     const DerivedFrame& f, int vmax, int J);

struct PipelineRow {
  int point = 0;
  double tau_au = 0;
  int n_st = 0;
  std::string reference;
  int omega_size = 0;
  double raw_energy_cm1 = 0;
  double combined_energy_cm1 = 0;
  std::string label;
  std::optional<double> exact_energy_cm1;
  std::optional<double> error_cm1;
};

struct PipelineResult {
  std::vector<PipelineRow> rows;
  std::map<std::string, BasisSet> final_omegas;  // per reference (J=0 sampling sets)
  double max_offdiag_overlap = 0;
};

// Full QSCI pipeline: evolve from each reference, parity-filter, accumulate
// bases over the schedule, solve subspaces, pick by overlap, combine; for
// J > 0 the J=0 bases are extended with all K and the 5(2J+1)-dimensional
// combined problem is diagonalized.
PipelineResult run_pipeline(const MoleculeModel& m, const DerivedFrame& f, int vmax,
                            const Schedule& schedule,
                            const std::vector<RovibBasisState>& references, int J,
                            bool with_exact = true);

}  // namespace rovib
