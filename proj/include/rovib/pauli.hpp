#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rovib/common.hpp"
#include "rovib/watson.hpp"

namespace rovib {

// Pauli string over n_q qubits, two bits per qubit (I=0, X=1, Y=2, Z=3);
// qubit 0 sits in the lowest bits, so ascending code order is lexicographic
// order of the printed string (leftmost letter = highest qubit, I<X<Y<Z).
struct PauliString {
  std::uint64_t code = 0;
  int nq = 0;

  int letter(int qubit) const { return int((code >> (2 * qubit)) & 3u); }
  int weight() const {
    int w = 0;
    for (int j = 0; j < nq; ++j)
      if (letter(j)) ++w;
    return w;
  }
  std::string str() const {
    static const char* L = "IXYZ";
    std::string s(nq, 'I');
    for (int j = 0; j < nq; ++j) s[nq - 1 - j] = L[letter(j)];
    return s;
  }
  static PauliString parse(const std::string& s);
  bool operator<(const PauliString& o) const { return code < o.code; }
  bool operator==(const PauliString& o) const { return code == o.code && nq == o.nq; }
};

struct PauliTerm {
  double h_cm1 = 0;
  PauliString p;
};

// Coefficients with |h| at or below this floor are treated as zero
// (approximately 1e-10 hartree).
inline constexpr double kPauliDropFloorCm1 = 2.2e-5;

struct PauliSum {
  int nq = 0;
  int vmax = 0;
  int J = 0;
  std::string mapping = "m=K+J";
  std::vector<PauliTerm> terms;  // canonical order: ascending string code

  std::size_t size() const { return terms.size(); }
  void sort_canonical();
};

// Register geometry of the binary encoding.
struct QubitLayout {
  int n_modes = 0, vmax = 0, J = 0;
  int bits_per_mode = 0, rot_bits = 0;

  QubitLayout(int n_modes_, int vmax_, int J_);
  int nq() const { return n_modes * bits_per_mode + rot_bits; }
  std::uint64_t encode(const RovibBasisState& b) const;
  bool decode(std::uint64_t x, RovibBasisState& b) const;  // false for padded states
};

std::uint64_t encode_basis_index(const RovibBasisState& b, int vmax, int J);

// Zero-padded qubit-space matrix of an assembled Hamiltonian.
Eigen::MatrixXcd pad_to_qubit_space(const SparseHamiltonian& H, const QubitLayout& lay);

inline constexpr int kTraceQubitLimit = 10;

// Reference decomposition h_k = 2^-nq tr(P_k H); O(8^nq).
PauliSum pauli_decompose_trace(const Eigen::MatrixXcd& Hq, int nq,
                               double drop_floor = kPauliDropFloorCm1,
                               Exec exec = Exec::Parallel);

// Scalable route: per-register decomposition of each Hamiltonian term,
// combined with complex coefficient products.
PauliSum pauli_decompose_factored(const MoleculeModel& m, const DerivedFrame& f, int vmax,
                                  int J, double drop_floor = kPauliDropFloorCm1,
                                  Exec exec = Exec::Parallel);

struct TermStatistics {
  std::vector<int> count_by_weight;    // index = weight, 0..nq
  std::vector<double> abs_coeffs;      // descending
};
TermStatistics term_statistics(const PauliSum& sum);

enum class CutoffDirection { Above, Below };
PauliSum cutoff_filter(const PauliSum& sum, double lambda_cm1,
                       CutoffDirection dir = CutoffDirection::Above);

// Appendix-style scaling study of single-register q^ell term counts at
// dimensions 2^eta.
struct ScalingStudy {
  int ell = 0;
  std::vector<int> eta;
  std::vector<long> counts;
  double fit_b = 0, fit_c = 0;  // least squares of counts/2^eta = b*eta + c over eta >= 2
};
ScalingStudy scaling_study(int ell, int eta_max);

long q_ell_term_count(int ell, int eta);

struct PowerLawFit {
  double c = 0, kappa = 0;
};
// log-log least squares of L = c * J^kappa.
PowerLawFit fit_power_law(const std::vector<int>& J, const std::vector<long>& L);
PowerLawFit fit_Lq_vs_J(const MoleculeModel& m, const DerivedFrame& f, int vmax,
                        const std::vector<int>& Js, std::vector<long>* counts_out = nullptr);

void write_pauli_sum(const PauliSum& s, const std::string& path);
PauliSum read_pauli_sum(const std::string& path);

// Dense matrix of one Pauli string (test/oracle support).
Eigen::MatrixXcd pauli_matrix(const PauliString& p);

}  // namespace rovib
