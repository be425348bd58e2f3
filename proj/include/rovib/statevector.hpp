#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rovib/common.hpp"
#include "rovib/pauli.hpp"

namespace rovib {

// 2^nq complex amplitudes.
struct Statevector {
  int nq = 0;
  std::vector<cxd> amp;

  explicit Statevector(int nq_ = 0) : nq(nq_), amp(std::size_t(1) << nq_, cxd(0.0)) {}
  std::size_t dim() const { return amp.size(); }
  double norm() const;
};

Statevector prepare_basis_state(const RovibBasisState& b, int vmax, int J);

// In-place exp(-i theta P) |s>.
void apply_pauli_rotation(Statevector& s, const PauliString& p, double theta,
                          Exec exec = Exec::Parallel);

enum class TermOrder { DescendingAbsCoeff, AscendingAbsCoeff, CanonicalLex, ReverseLex };
TermOrder parse_term_order(const std::string& name);
std::string term_order_name(TermOrder o);

std::vector<PauliTerm> ordered_terms(const PauliSum& sum, double lambda_cm1, TermOrder order);

// |psi(tau, N_ST)> = U^N_ST |s0> with U the first-order product over terms
// with |h| > lambda; theta_k = tau * h_k (cm^-1 converted to hartree).
Statevector trotter_evolve(const Statevector& s0, const PauliSum& sum, double tau_au, int n_st,
                           double lambda_cm1, TermOrder order = TermOrder::DescendingAbsCoeff,
                           Exec exec = Exec::Parallel);

enum class Provenance { Exact, Shots, PerturbationTheory };

struct Distribution {
  std::map<std::uint64_t, double> p;  // padded basis index -> probability
  Provenance provenance = Provenance::Exact;
  long n_shot = 0;
  std::uint64_t seed = 0;
  bool parity_filtered = false;
  double padded_mass = 0.0;  // probability found outside the physical basis
};

// Squared moduli over physical basis indices; padded mass reported separately.
Distribution exact_distribution(const Statevector& s, const QubitLayout& lay);

Distribution sample_shots(const Distribution& d, long n_shot, std::uint64_t seed);

// Remove wrong-parity mass (reference parity (-1)^(v3+K)) and renormalize.
Distribution parity_postselect(const Distribution& d, const QubitLayout& lay,
                               int reference_parity);

void write_distribution(const Distribution& d, const QubitLayout& lay,
                        const std::string& path);

}  // namespace rovib
