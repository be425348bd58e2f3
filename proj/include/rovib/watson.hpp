#pragma once

#include <Eigen/Dense>
#include <array>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "rovib/common.hpp"
#include "rovib/model.hpp"
#include "rovib/operators.hpp"

namespace rovib {

// Product-basis label |v1..vN, J K> with proton-exchange parity (-1)^(v3+K).
struct RovibBasisState {
  std::vector<int> v;
  int J = 0;
  int K = 0;

  int parity() const { return ((v.back() + K) % 2 == 0) ? +1 : -1; }
  bool operator==(const RovibBasisState& o) const { return v == o.v && J == o.J && K == o.K; }
  bool operator<(const RovibBasisState& o) const {
    if (v != o.v) return v < o.v;
    return K < o.K;
  }
  std::string vib_label() const {
    std::string s;
    for (int q : v) s += std::to_string(q);
    return s;
  }
};

enum class TermGroup : unsigned {
  RR = 1u << 0,
  HO = 1u << 1,
  ANHARM = 1u << 2,
  VIBCOR = 1u << 3,
  ROVIB = 1u << 4,
};
constexpr unsigned kAllGroups = 0x1f;
unsigned parse_group_mask(const std::string& csv);
std::string group_mask_name(unsigned mask);

// One additive term of H: coeff_cm1 * (ordered single-mode factor chains)
// * (ordered product of frame angular-momentum components).
struct ProductTerm {
  double coeff_cm1 = 0;
  std::vector<std::pair<int, std::string>> chains;  // (mode, factors), mode ascending
  std::vector<int> rot;                             // axis indices, size 0..2
  TermGroup group = TermGroup::HO;
};

std::vector<ProductTerm> build_terms(const MoleculeModel& m, const DerivedFrame& f,
                                     unsigned group_mask);

// Linear indexing of the product basis: modes fold high-to-low, then the
// rotational index m = K + J fastest.
struct BasisIndexer {
  int n_modes = 0, vmax = 0, J = 0;
  BasisIndexer(int n_modes_, int vmax_, int J_) : n_modes(n_modes_), vmax(vmax_), J(J_) {}
  int dim() const {
    int d = 2 * J + 1;
    for (int k = 0; k < n_modes; ++k) d *= vmax + 1;
    return d;
  }
  int index(const RovibBasisState& b) const {
    int idx = 0;
    for (int k = 0; k < n_modes; ++k) idx = idx * (vmax + 1) + b.v[k];
    return idx * (2 * J + 1) + (b.K + J);
  }
  RovibBasisState state(int idx) const {
    RovibBasisState b;
    b.J = J;
    b.K = idx % (2 * J + 1) - J;
    idx /= 2 * J + 1;
    b.v.assign(n_modes, 0);
    for (int k = n_modes - 1; k >= 0; --k) {
      b.v[k] = idx % (vmax + 1);
      idx /= vmax + 1;
    }
    return b;
  }
};

// Precompiled term matrices for one (vmax, J) problem; evaluates single
// matrix elements without materializing the full matrix.
class HamiltonianEvaluator {
 public:
  HamiltonianEvaluator(const MoleculeModel& m, const DerivedFrame& f, int vmax, int J,
                       unsigned group_mask = kAllGroups);

  cxd matrix_element(const RovibBasisState& bra, const RovibBasisState& ket) const;
  const BasisIndexer& indexer() const { return idx_; }
  const std::vector<ProductTerm>& terms() const { return terms_; }
  int vmax() const { return idx_.vmax; }
  int J() const { return idx_.J; }
  int n_modes() const { return idx_.n_modes; }

  // per-term compiled pieces, used by the assembly and Pauli factoring
  struct Compiled {
    double coeff = 0;
    std::vector<int> mode_of;                 // modes with non-identity chain
    std::vector<const Eigen::MatrixXcd*> M;   // matching matrices
    const Eigen::MatrixXcd* R = nullptr;      // rotational factor (null for J=0 identity)
    int band = 0;                             // max per-mode bandwidth
  };
  const std::vector<Compiled>& compiled() const { return compiled_; }
  const Eigen::MatrixXcd& chain(const std::string& c) const { return chains_.at(c); }
  const Eigen::MatrixXcd& rot_matrix(const std::vector<int>& axes) const;

 private:
  BasisIndexer idx_;
  std::vector<ProductTerm> terms_;
  std::map<std::string, Eigen::MatrixXcd> chains_;
  std::map<std::string, Eigen::MatrixXcd> rots_;
  std::vector<Compiled> compiled_;
};

// Assembled sparse Hermitian matrix with group provenance. Entries are kept
// dense internally (dimensions here are small); triplets() exposes the
// deterministic coordinate form.
struct SparseHamiltonian {
  int vmax = 0, J = 0;
  unsigned group_mask = 0;
  Eigen::MatrixXcd mat;  // cm^-1

  int dim() const { return static_cast<int>(mat.rows()); }
  struct Triplet {
    int row, col;
    cxd value;
  };
  std::vector<Triplet> triplets(double tol = 0.0) const;
};

SparseHamiltonian build_group(const MoleculeModel& m, const DerivedFrame& f, int vmax, int J,
                              TermGroup group, Exec exec = Exec::Parallel);
SparseHamiltonian build_full(const MoleculeModel& m, const DerivedFrame& f, int vmax, int J,
                             Exec exec = Exec::Parallel);
SparseHamiltonian build_masked(const MoleculeModel& m, const DerivedFrame& f, int vmax, int J,
                               unsigned group_mask, Exec exec = Exec::Parallel);

struct Spectrum {
  Eigen::VectorXd eigenvalues;   // ascending, cm^-1
  Eigen::MatrixXcd eigenvectors; // optional: empty if not requested
};

inline constexpr int kDenseLimit = 8192;

Spectrum dense_spectrum(const SparseHamiltonian& H, int n_lowest, bool with_vectors = true,
                        int dense_limit = kDenseLimit);

// Matrix dump (text): header with vmax, J, S, group mask, then triplets.
void dump_matrix(const SparseHamiltonian& H, const std::string& path);

}  // namespace rovib
