#include "rovib/watson.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rovib {

unsigned parse_group_mask(const std::string& csv) {
  unsigned mask = 0;
  std::string tok;
  auto flush = [&] {
    if (tok.empty()) return;
    if (tok == "RR") mask |= unsigned(TermGroup::RR);
    else if (tok == "HO") mask |= unsigned(TermGroup::HO);
    else if (tok == "ANHARM") mask |= unsigned(TermGroup::ANHARM);
    else if (tok == "VIBCOR") mask |= unsigned(TermGroup::VIBCOR);
    else if (tok == "ROVIB") mask |= unsigned(TermGroup::ROVIB);
    else if (tok == "ALL") mask |= kAllGroups;
    else throw ValidationError("unknown term group '" + tok + "'");
    tok.clear();
  };
  for (char c : csv) {
    if (c == ',' || c == '+' || c == ' ') flush();
    else tok += static_cast<char>(std::toupper(c));
  }
  flush();
  if (mask == 0) throw ValidationError("empty term-group mask");
  return mask;
}

std::string group_mask_name(unsigned mask) {
  std::string s;
  auto add = [&](unsigned bit, const char* name) {
    if (mask & bit) {
      if (!s.empty()) s += "+";
      s += name;
    }
  };
  add(unsigned(TermGroup::RR), "RR");
  add(unsigned(TermGroup::HO), "HO");
  add(unsigned(TermGroup::ANHARM), "ANHARM");
  add(unsigned(TermGroup::VIBCOR), "VIBCOR");
  add(unsigned(TermGroup::ROVIB), "ROVIB");
  return s;
}

namespace {

int multiplicity(const std::vector<int>& idx) {
  int f = 1;
  for (size_t i = 2; i <= idx.size(); ++i) f *= static_cast<int>(i);
  int cnt = 1;
  for (size_t i = 1; i <= idx.size(); ++i) {
    if (i < idx.size() && idx[i] == idx[i - 1]) {
      ++cnt;
      continue;
    }
    for (int j = 2; j <= cnt; ++j) f /= j;
    cnt = 1;
  }
  return f;
}

void append_chain(std::map<int, std::string>& chains, int mode, char op) {
  chains[mode] += op;
}

void push_term(std::vector<ProductTerm>& terms, double coeff,
               const std::map<int, std::string>& chains, std::vector<int> rot,
               TermGroup group) {
  if (coeff == 0.0) return;
  ProductTerm t;
  t.coeff_cm1 = coeff;
  for (const auto& [mode, ops] : chains) t.chains.emplace_back(mode, ops);
  t.rot = std::move(rot);
  t.group = group;
  terms.push_back(std::move(t));
}

// pi~_alpha = sum_{k!=l} zeta^alpha_{kl} sqrt(w_l/w_k) q_k p_l
struct PiTerm {
  double coeff;
  int k, l;
};

std::array<std::vector<PiTerm>, 3> pi_terms(const MoleculeModel& m, const DerivedFrame& f) {
  std::array<std::vector<PiTerm>, 3> out;
  for (int al = 0; al < 3; ++al)
    for (int k = 0; k < m.n_modes(); ++k)
      for (int l = 0; l < m.n_modes(); ++l) {
        if (k == l) continue;
        const double z = f.zeta[al](k, l);
        if (z == 0.0) continue;
        out[al].push_back({z * std::sqrt(m.omega_cm1[l] / m.omega_cm1[k]), k, l});
      }
  return out;
}

}  // namespace

std::vector<ProductTerm> build_terms(const MoleculeModel& m, const DerivedFrame& f,
                                     unsigned mask) {
  std::vector<ProductTerm> terms;
  const int nm = m.n_modes();
  const double inv_cm = 1.0 / units::hartree_per_cm1;

  if (mask & unsigned(TermGroup::RR)) {
    // (1/2) J^T mu_0 J
    const auto& mu0 = f.mu[0].at({});
    for (int al = 0; al < 3; ++al)
      for (int be = 0; be < 3; ++be)
        push_term(terms, 0.5 * mu0(al, be) * inv_cm, {}, {al, be}, TermGroup::RR);
  }
  if (mask & unsigned(TermGroup::HO)) {
    for (int k = 0; k < nm; ++k) {
      push_term(terms, 0.5 * m.omega_cm1[k], {{k, "pp"}}, {}, TermGroup::HO);
      push_term(terms, 0.5 * m.omega_cm1[k], {{k, "qq"}}, {}, TermGroup::HO);
    }
  }
  if (mask & unsigned(TermGroup::ANHARM)) {
    for (const auto& [idx, val] : m.cubic_cm1) {
      std::map<int, std::string> chains;
      for (int k : idx) append_chain(chains, k, 'q');
      push_term(terms, val * multiplicity(idx) / 6.0, chains, {}, TermGroup::ANHARM);
    }
    for (const auto& [idx, val] : m.quartic_cm1) {
      std::map<int, std::string> chains;
      for (int k : idx) append_chain(chains, k, 'q');
      push_term(terms, val * multiplicity(idx) / 24.0, chains, {}, TermGroup::ANHARM);
    }
  }
  if (mask & unsigned(TermGroup::VIBCOR)) {
    // (1/2) sum_{l=0..2} pi^T mu_l pi, mu between the pi factors
    const auto pis = pi_terms(m, f);
    for (int ell = 0; ell <= 2; ++ell)
      for (int al = 0; al < 3; ++al)
        for (int be = 0; be < 3; ++be)
          for (const auto& p1 : pis[al])
            for (const auto& p2 : pis[be])
              for (const auto& [mon, M] : f.mu[ell]) {
                const double c = 0.5 * p1.coeff * p2.coeff * M(al, be) * inv_cm;
                if (c == 0.0) continue;
                std::map<int, std::string> chains;
                append_chain(chains, p1.k, 'q');
                append_chain(chains, p1.l, 'p');
                for (int t : mon) append_chain(chains, t, 'q');
                append_chain(chains, p2.k, 'q');
                append_chain(chains, p2.l, 'p');
                push_term(terms, c, chains, {}, TermGroup::VIBCOR);
              }
    // -(hbar^2/8) sum_{l=0..4} tr mu_l
    for (int ell = 0; ell <= 4; ++ell)
      for (const auto& [mon, M] : f.mu[ell]) {
        const double c = -0.125 * M.trace() * inv_cm;
        if (c == 0.0) continue;
        std::map<int, std::string> chains;
        for (int t : mon) append_chain(chains, t, 'q');
        push_term(terms, c, chains, {}, TermGroup::VIBCOR);
      }
  }
  if (mask & unsigned(TermGroup::ROVIB)) {
    // (1/2) sum_{l=1..4} J^T mu_l J
    for (int ell = 1; ell <= 4; ++ell)
      for (int al = 0; al < 3; ++al)
        for (int be = 0; be < 3; ++be)
          for (const auto& [mon, M] : f.mu[ell]) {
            const double c = 0.5 * M(al, be) * inv_cm;
            if (c == 0.0) continue;
            std::map<int, std::string> chains;
            for (int t : mon) append_chain(chains, t, 'q');
            push_term(terms, c, chains, {al, be}, TermGroup::ROVIB);
          }
    // - sum_{l=0..3} J^T mu_l pi
    const auto pis = pi_terms(m, f);
    for (int ell = 0; ell <= 3; ++ell)
      for (int al = 0; al < 3; ++al)
        for (int be = 0; be < 3; ++be)
          for (const auto& p2 : pis[be])
            for (const auto& [mon, M] : f.mu[ell]) {
              const double c = -M(al, be) * p2.coeff * inv_cm;
              if (c == 0.0) continue;
              std::map<int, std::string> chains;
              for (int t : mon) append_chain(chains, t, 'q');
              append_chain(chains, p2.k, 'q');
              append_chain(chains, p2.l, 'p');
              push_term(terms, c, chains, {al}, TermGroup::ROVIB);
            }
  }
  return terms;
}

HamiltonianEvaluator::HamiltonianEvaluator(const MoleculeModel& m, const DerivedFrame& f,
                                           int vmax, int J, unsigned mask)
    : idx_(m.n_modes(), vmax, J), terms_(build_terms(m, f, mask)) {
  if (vmax < 0 || J < 0) throw ValidationError("vmax and J must be non-negative");
  const int d = vmax + 1;
  const auto am = angular_momentum(J);
  for (const auto& t : terms_) {
    for (const auto& [mode, ops] : t.chains)
      if (!chains_.count(ops)) chains_[ops] = chain_matrix(ops, d);
    std::string rkey(t.rot.begin(), t.rot.end());
    if (!rots_.count(rkey)) {
      Eigen::MatrixXcd R = Eigen::MatrixXcd::Identity(2 * J + 1, 2 * J + 1);
      for (int ax : t.rot) R = R * (ax == 0 ? am.Ja : (ax == 1 ? am.Jb : am.Jc));
      rots_[rkey] = R;
    }
  }
  compiled_.reserve(terms_.size());
  for (const auto& t : terms_) {
    Compiled c;
    c.coeff = t.coeff_cm1;
    for (const auto& [mode, ops] : t.chains) {
      c.mode_of.push_back(mode);
      c.M.push_back(&chains_.at(ops));
      c.band = std::max(c.band, static_cast<int>(ops.size()));
    }
    std::string rkey(t.rot.begin(), t.rot.end());
    c.R = t.rot.empty() ? nullptr : &rots_.at(rkey);
    compiled_.push_back(c);
  }
}

const Eigen::MatrixXcd& HamiltonianEvaluator::rot_matrix(const std::vector<int>& axes) const {
  return rots_.at(std::string(axes.begin(), axes.end()));
}

cxd HamiltonianEvaluator::matrix_element(const RovibBasisState& bra,
                                         const RovibBasisState& ket) const {
  if (bra.J != idx_.J || ket.J != idx_.J)
    throw ValidationError("matrix_element: states must share the evaluator's J");
  cxd sum = 0.0;
  const int mb = bra.K + idx_.J;
  const int mk = ket.K + idx_.J;
  for (const auto& c : compiled_) {
    cxd val = c.coeff;
    if (c.R) {
      val *= (*c.R)(mb, mk);
      if (val == cxd(0.0)) continue;
    } else if (bra.K != ket.K) {
      continue;
    }
    bool dead = false;
    size_t ci = 0;
    for (int k = 0; k < idx_.n_modes && !dead; ++k) {
      if (ci < c.mode_of.size() && c.mode_of[ci] == k) {
        val *= (*c.M[ci])(bra.v[k], ket.v[k]);
        if (val == cxd(0.0)) dead = true;
        ++ci;
      } else if (bra.v[k] != ket.v[k]) {
        dead = true;
      }
    }
    if (!dead) sum += val;
  }
  return sum;
}

namespace {

SparseHamiltonian assemble(const MoleculeModel& m, const DerivedFrame& f, int vmax, int J,
                           unsigned mask, Exec exec) {
  HamiltonianEvaluator ev(m, f, vmax, J, mask);
  const BasisIndexer& idx = ev.indexer();
  const int S = idx.dim();
  SparseHamiltonian H;
  H.vmax = vmax;
  H.J = J;
  H.group_mask = mask;
  H.mat = Eigen::MatrixXcd::Zero(S, S);
  const int R = 2 * J + 1;
  const int vib_dim = S / R;

  // terms are accumulated in fixed order; the inner loop over vibrational
  // bra rows parallelizes with disjoint writes, so results are bit-identical
  // for any thread count
  for (const auto& c : ev.compiled()) {
    if (c.R != nullptr && c.R->cwiseAbs().maxCoeff() == 0.0) continue;  // J operators at J=0
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
#endif
    for (int vb = 0; vb < vib_dim; ++vb) {
      std::vector<int> bv(idx.n_modes);
      int rest = vb;
      for (int k = idx.n_modes - 1; k >= 0; --k) {
        bv[k] = rest % (vmax + 1);
        rest /= vmax + 1;
      }
      // ket columns: full range on chain modes, frozen elsewhere
      std::vector<int> kv(idx.n_modes), lo(idx.n_modes), hi(idx.n_modes);
      size_t ci = 0;
      for (int k = 0; k < idx.n_modes; ++k) {
        if (ci < c.mode_of.size() && c.mode_of[ci] == k) {
          lo[k] = 0;
          hi[k] = vmax;
          ++ci;
        } else {
          lo[k] = hi[k] = bv[k];
        }
        kv[k] = lo[k];
      }
      while (true) {
        cxd vib_val = c.coeff;
        size_t cj = 0;
        for (int k = 0; k < idx.n_modes; ++k) {
          if (cj < c.mode_of.size() && c.mode_of[cj] == k) {
            vib_val *= (*c.M[cj])(bv[k], kv[k]);
            ++cj;
          }
        }
        if (vib_val != cxd(0.0)) {
          int vk = 0;
          for (int k = 0; k < idx.n_modes; ++k) vk = vk * (vmax + 1) + kv[k];
          if (c.R == nullptr) {
            for (int mm = 0; mm < R; ++mm) H.mat(vb * R + mm, vk * R + mm) += vib_val;
          } else {
            for (int mb = 0; mb < R; ++mb)
              for (int mk = 0; mk < R; ++mk) {
                const cxd rv = (*c.R)(mb, mk);
                if (rv != cxd(0.0)) H.mat(vb * R + mb, vk * R + mk) += vib_val * rv;
              }
          }
        }
        int pos = idx.n_modes - 1;
        while (pos >= 0 && kv[pos] >= hi[pos]) {
          kv[pos] = lo[pos];
          --pos;
        }
        if (pos < 0) break;
        ++kv[pos];
      }
    }
  }

  const double herm = (H.mat - H.mat.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-9)
    throw NumericalError("assembled Hamiltonian has anti-Hermitian residue " +
                         std::to_string(herm) + " cm^-1");
  return H;
}

}  // namespace

SparseHamiltonian build_group(const MoleculeModel& m, const DerivedFrame& f, int vmax, int J,
                              TermGroup group, Exec exec) {
  return assemble(m, f, vmax, J, unsigned(group), exec);
}

SparseHamiltonian build_full(const MoleculeModel& m, const DerivedFrame& f, int vmax, int J,
                             Exec exec) {
  return assemble(m, f, vmax, J, kAllGroups, exec);
}

SparseHamiltonian build_masked(const MoleculeModel& m, const DerivedFrame& f, int vmax, int J,
                               unsigned group_mask, Exec exec) {
  return assemble(m, f, vmax, J, group_mask, exec);
}

std::vector<SparseHamiltonian::Triplet> SparseHamiltonian::triplets(double tol) const {
  std::vector<Triplet> out;
  for (int r = 0; r < mat.rows(); ++r)
    for (int c = 0; c < mat.cols(); ++c)
      if (std::abs(mat(r, c)) > tol) out.push_back({r, c, mat(r, c)});
  return out;
}

Spectrum dense_spectrum(const SparseHamiltonian& H, int n_lowest, bool with_vectors,
                        int dense_limit) {
  if (H.dim() > dense_limit)
    throw ValidationError("dimension " + std::to_string(H.dim()) +
                          " exceeds the dense-solver limit " + std::to_string(dense_limit));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      H.mat, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  const int n = std::min<int>(n_lowest, H.dim());
  Spectrum s;
  s.eigenvalues = es.eigenvalues().head(n);
  if (with_vectors) s.eigenvectors = es.eigenvectors().leftCols(n);
  return s;
}

void dump_matrix(const SparseHamiltonian& H, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open matrix dump path: " + path);
  out << "# rovib hamiltonian dump\n";
  out << "vmax " << H.vmax << "\nJ " << H.J << "\ndim " << H.dim() << "\ngroups "
      << group_mask_name(H.group_mask) << "\n";
  out.precision(15);
  for (const auto& t : H.triplets(0.0))
    out << t.row << " " << t.col << " " << t.value.real() << " " << t.value.imag() << "\n";
}

}  // namespace rovib
