#include "rovib/qsci.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

#include "rovib/eigs.hpp"
#include "rovib/operators.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rovib {

using json = nlohmann::json;

void Schedule::validate() const {
  if (epsilon <= 0) throw ValidationError("selection threshold must be positive");
  if (lambda_cm1 < 0) throw ValidationError("lambda must be non-negative");
  if (n_shot < 0) throw ValidationError("shot count must be non-negative");
  auto strictly_increasing = [](const auto& v) {
    for (size_t i = 1; i < v.size(); ++i)
      if (!(v[i] > v[i - 1])) return false;
    return true;
  };
  if (mode == Mode::VaryNst) {
    if (nst_points.empty()) throw ValidationError("schedule has no points");
    if (!strictly_increasing(nst_points))
      throw ValidationError("schedule points must be strictly increasing");
    if (nst_points.front() < 0) throw ValidationError("step counts must be non-negative");
    if (!(tau_au > 0)) throw ValidationError("tau must be positive");
  } else {
    if (tau_points_au.empty()) throw ValidationError("schedule has no points");
    if (!strictly_increasing(tau_points_au))
      throw ValidationError("schedule points must be strictly increasing");
    if (tau_points_au.front() < 0) throw ValidationError("tau points must be non-negative");
    if (n_st < 1) throw ValidationError("step count must be positive");
  }
}

Schedule load_schedule(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open schedule file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("schedule parse error: ") + e.what());
  }
  Schedule s;
  try {
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "vary_nst") {
      s.mode = Schedule::Mode::VaryNst;
      s.tau_au = j.at("tau_au").get<double>();
      for (const auto& n : j.at("nst_points")) s.nst_points.push_back(n.get<int>());
    } else if (mode == "vary_tau") {
      s.mode = Schedule::Mode::VaryTau;
      s.n_st = j.at("n_st").get<int>();
      for (const auto& t : j.at("tau_points_au")) s.tau_points_au.push_back(t.get<double>());
    } else {
      throw ValidationError("schedule mode must be vary_nst or vary_tau");
    }
    s.epsilon = j.value("epsilon", 1e-4);
    s.lambda_cm1 = j.value("lambda_cm1", 0.0);
    s.n_shot = j.value("n_shot", 0L);
    s.seed = j.value("seed", std::uint64_t(1));
    s.order = parse_term_order(j.value("ordering", "desc_abs_h"));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("schedule schema error: ") + e.what());
  }
  s.validate();
  return s;
}

BasisSet select_basis(const Distribution& d, const QubitLayout& lay, double epsilon,
                      const BasisSet& carry) {
  std::vector<std::pair<double, std::uint64_t>> hits;
  for (const auto& [x, pr] : d.p)
    if (pr > epsilon) hits.emplace_back(pr, x);
  std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  BasisSet out = carry;
  RovibBasisState b;
  for (const auto& [pr, x] : hits) {
    if (!lay.decode(x, b)) continue;
    if (!out.contains(b)) out.states.push_back(b);
  }
  return out;
}

Eigen::MatrixXcd subspace_hamiltonian(const BasisSet& omega, const HamiltonianEvaluator& ev,
                                      Exec exec) {
  const int n = static_cast<int>(omega.size());
  if (n < 1) throw ValidationError("empty basis set");
  for (const auto& b : omega.states)
    if (b.J != ev.J()) throw ValidationError("mixed J in basis set");
  Eigen::MatrixXcd H(n, n);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
#endif
  for (int r = 0; r < n; ++r)
    for (int c = r; c < n; ++c) {
      const cxd v = ev.matrix_element(omega.states[r], omega.states[c]);
      H(r, c) = v;
      if (c != r) H(c, r) = std::conj(v);
    }
  return H;
}

SubspaceEigs solve_subspace(const Eigen::MatrixXcd& H, int n_lowest) {
  SubspaceEigs out;
  const int dim = static_cast<int>(H.rows());
  n_lowest = std::min(n_lowest, dim);
  if (dim <= kIterativeThreshold) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    out.values = es.eigenvalues();
    out.vectors = es.eigenvectors();
    return out;
  }
  auto apply = [&H](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) { y = H * x; };
  auto ex = lanczos_lowest(apply, dim, n_lowest, 1e-10);
  out.values = ex.values;
  out.vectors = ex.vectors;
  return out;
}

int pick_by_overlap(const SubspaceEigs& eigs, const BasisSet& omega,
                    const RovibBasisState& reference) {
  const auto it = std::find(omega.states.begin(), omega.states.end(), reference);
  if (it == omega.states.end())
    throw ValidationError("reference state is not a member of the basis set");
  const int pos = static_cast<int>(it - omega.states.begin());
  int best = 0;
  double best_ov = -1;
  for (int i = 0; i < eigs.vectors.cols(); ++i) {
    const double ov = std::abs(eigs.vectors(pos, i));
    if (ov > best_ov + 1e-12) {  // ties resolve to the lower-energy state
      best_ov = ov;
      best = i;
    }
  }
  return best;
}

BasisSet union_basis(const std::vector<BasisSet>& sets) {
  BasisSet u;
  for (const auto& s : sets)
    for (const auto& b : s.states)
      if (!u.contains(b)) u.states.push_back(b);
  return u;
}

BasisSet extend_to_J(const BasisSet& omega_j0, int J) {
  if (J < 0) throw ValidationError("J must be non-negative");
  BasisSet out;
  out.provenance = omega_j0.provenance + ";extended_to_J=" + std::to_string(J);
  for (const auto& b : omega_j0.states)
    for (int K = -J; K <= J; ++K) {
      RovibBasisState e = b;
      e.J = J;
      e.K = K;
      out.states.push_back(e);
    }
  return out;
}

CombineResult combine_references(const std::vector<PickedState>& picked,
                                 const HamiltonianEvaluator& ev, double overlap_cutoff) {
  const int n = static_cast<int>(picked.size());
  if (n < 1) throw ValidationError("nothing to combine");
  CombineResult res;
  std::vector<BasisSet> sets;
  for (const auto& p : picked) sets.push_back(p.omega);
  res.union_basis = union_basis(sets);
  const int U = static_cast<int>(res.union_basis.size());

  Eigen::MatrixXcd V = Eigen::MatrixXcd::Zero(U, n);
  for (int i = 0; i < n; ++i) {
    for (size_t k = 0; k < picked[i].omega.size(); ++k) {
      const auto& b = picked[i].omega.states[k];
      const auto it = std::find(res.union_basis.states.begin(), res.union_basis.states.end(), b);
      V(it - res.union_basis.states.begin(), i) = picked[i].coeff[k];
    }
  }
  const Eigen::MatrixXcd S = V.adjoint() * V;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) res.max_offdiag_overlap = std::max(res.max_offdiag_overlap, std::abs(S(i, j)));

  // canonical orthogonalization with eigenvalue cutoff
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> se(S);
  std::vector<int> keep;
  for (int i = 0; i < n; ++i)
    if (se.eigenvalues()(i) > overlap_cutoff) keep.push_back(i);
  if (keep.empty()) throw NumericalError("overlap matrix is rank deficient");
  Eigen::MatrixXcd X(n, keep.size());
  for (size_t i = 0; i < keep.size(); ++i)
    X.col(i) = se.eigenvectors().col(keep[i]) / std::sqrt(se.eigenvalues()(keep[i]));

  const Eigen::MatrixXcd Hu = subspace_hamiltonian(res.union_basis, ev);
  const Eigen::MatrixXcd Hs = X.adjoint() * (V.adjoint() * Hu * V) * X;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (Hs + Hs.adjoint()));
  const int nc = static_cast<int>(es.eigenvalues().size());
  const Eigen::MatrixXcd C = V * X * es.eigenvectors();  // columns over union basis

  // assign each combined eigenstate to a picked state: by the reference
  // basis-state component when the reference lives in this J-space, else by
  // overlap with the picked vector itself
  std::vector<int> ref_pos(n, -1);
  for (int i = 0; i < n; ++i) {
    const auto it = std::find(res.union_basis.states.begin(), res.union_basis.states.end(),
                              picked[i].reference);
    if (it != res.union_basis.states.end())
      ref_pos[i] = static_cast<int>(it - res.union_basis.states.begin());
  }
  const Eigen::MatrixXcd O = V.adjoint() * C;  // <picked_i | comb_c>
  res.energies_cm1.assign(n, std::numeric_limits<double>::quiet_NaN());
  res.assignment.assign(nc, -1);
  res.combined_vectors = Eigen::MatrixXcd::Zero(U, n);
  std::vector<bool> taken(n, false);
  for (int c = 0; c < nc; ++c) {
    int best = -1;
    double best_ov = -1;
    for (int i = 0; i < n; ++i) {
      const double ov =
          ref_pos[i] >= 0 ? std::abs(C(ref_pos[i], c)) : std::abs(O(i, c));
      if (ov > best_ov) {
        best_ov = ov;
        best = i;
      }
    }
    res.assignment[c] = best;
    if (best >= 0 && !taken[best]) {
      taken[best] = true;
      res.energies_cm1[best] = es.eigenvalues()(c);
      res.combined_vectors.col(best) = C.col(c);
    }
  }
  // leftover picked states (possible when rank dropped) keep their raw energies
  for (int i = 0; i < n; ++i) {
    if (!taken[i]) {
      res.energies_cm1[i] = picked[i].energy_cm1;
      res.combined_vectors.col(i) = V.col(i);
    }
  }
  return res;
}

std::string StateLabel::str(int J) const {
  if (J == 0) return vib;
  return vib + ":" + std::to_string(J) + "_" + std::to_string(Ka) + "_" + std::to_string(Kc);
}

StateLabel assign_label(const Eigen::VectorXcd& coeff, const BasisSet& omega,
                        const DerivedFrame& frame, int J) {
  StateLabel lab;
  const int R = 2 * J + 1;
  std::vector<RotorLevel> rot;
  if (J > 0) rot = asymmetric_top_solve(frame, J);

  // collect distinct vibrational labels present in the basis
  std::map<std::string, std::vector<std::pair<int, int>>> by_vib;  // vib -> (basis pos, K)
  for (size_t i = 0; i < omega.size(); ++i)
    by_vib[omega.states[i].vib_label()].emplace_back(static_cast<int>(i),
                                                     omega.states[i].K);
  double best = -1, second = -1;
  for (const auto& [vib, members] : by_vib) {
    if (J == 0) {
      double ov = 0;
      for (const auto& [pos, K] : members) ov = std::max(ov, std::abs(coeff[pos]));
      if (ov > best) {
        second = best;
        best = ov;
        lab.vib = vib;
      } else {
        second = std::max(second, ov);
      }
      continue;
    }
    for (int r = 0; r < R; ++r) {
      cxd amp = 0;
      for (const auto& [pos, K] : members) amp += std::conj(rot[r].vec[K + J]) * coeff[pos];
      const double ov = std::abs(amp);
      if (ov > best) {
        second = best;
        best = ov;
        lab.vib = vib;
        lab.Ka = rot[r].Ka;
        lab.Kc = rot[r].Kc;
      } else {
        second = std::max(second, ov);
      }
    }
  }
  lab.ambiguous = (best - second) < 1e-6;
  return lab;
}

std::map<std::string, double> exact_labeled_spectrum(const MoleculeModel& m,
                                                     const DerivedFrame& f, int vmax, int J) {
  const auto H = build_full(m, f, vmax, J);
  const auto sp = dense_spectrum(H, H.dim(), true);
  BasisIndexer idx(m.n_modes(), vmax, J);
  BasisSet full;
  for (int i = 0; i < idx.dim(); ++i) full.states.push_back(idx.state(i));
  std::map<std::string, double> out;
  for (int i = 0; i < sp.eigenvalues.size(); ++i) {
    const auto lab = assign_label(sp.eigenvectors.col(i), full, f, J);
    out.emplace(lab.str(J), sp.eigenvalues(i));  // keep the lowest per label
  }
  return out;
}

PipelineResult run_pipeline(const MoleculeModel& m, const DerivedFrame& f, int vmax,
                            const Schedule& schedule,
                            const std::vector<RovibBasisState>& references, int J,
                            bool with_exact) {
  Schedule sch = schedule;
  sch.validate();
  if (references.empty()) throw ValidationError("no reference states");
  for (const auto& r : references)
    if (static_cast<int>(r.v.size()) != m.n_modes() || r.J != 0 || r.K != 0)
      throw ValidationError("references must be J=0 vibrational states");

  const QubitLayout lay(m.n_modes(), vmax, 0);
  const auto sum = pauli_decompose_factored(m, f, vmax, 0);
  HamiltonianEvaluator ev0(m, f, vmax, 0);
  std::unique_ptr<HamiltonianEvaluator> evJ;
  if (J > 0) evJ = std::make_unique<HamiltonianEvaluator>(m, f, vmax, J);
  const HamiltonianEvaluator& ev = J > 0 ? *evJ : ev0;

  std::map<std::string, double> exact;
  if (with_exact) exact = exact_labeled_spectrum(m, f, vmax, J);

  PipelineResult out;
  std::map<std::string, BasisSet> omegas;
  for (const auto& r : references) omegas[r.vib_label()] = BasisSet{{r}, "reference"};

  for (int pt = 0; pt < sch.n_points(); ++pt) {
    const double tau = sch.mode == Schedule::Mode::VaryNst ? sch.tau_au : sch.tau_points_au[pt];
    const int nst = sch.mode == Schedule::Mode::VaryNst ? sch.nst_points[pt] : sch.n_st;

    std::vector<PickedState> picked;        // flattened: refs x (2J+1)
    std::vector<double> raw_energy;
    std::vector<int> omega_sizes;
    for (size_t ri = 0; ri < references.size(); ++ri) {
      const auto& r = references[ri];
      auto& omega = omegas[r.vib_label()];
      if (nst > 0 && tau > 0) {
        const auto psi =
            trotter_evolve(prepare_basis_state(r, vmax, 0), sum, tau, nst, sch.lambda_cm1,
                           sch.order);
        Distribution d = exact_distribution(psi, lay);
        if (d.padded_mass > 1e-12)
          throw NumericalError("probability leaked onto padded basis states");
        if (sch.n_shot > 0) d = sample_shots(d, sch.n_shot, sch.seed + 7919 * pt + ri);
        d = parity_postselect(d, lay, r.parity());
        omega = select_basis(d, lay, sch.epsilon, omega);
      }
      if (J == 0) {
        omega_sizes.push_back(static_cast<int>(omega.size()));
        const auto Hs = subspace_hamiltonian(omega, ev);
        const auto eig = solve_subspace(Hs, static_cast<int>(omega.size()));
        const int pick = pick_by_overlap(eig, omega, r);
        picked.push_back({omega, eig.vectors.col(pick), r, eig.values(pick)});
      } else {
        const BasisSet ext = extend_to_J(omega, J);
        omega_sizes.push_back(static_cast<int>(ext.size()));
        const auto Hs = subspace_hamiltonian(ext, ev);
        const auto eig = solve_subspace(Hs, static_cast<int>(ext.size()));
        // the 2J+1 eigenstates with the largest projection onto the
        // reference's rotational multiplet; ties resolve to lower energy
        std::vector<std::pair<double, int>> proj;
        for (int i = 0; i < eig.vectors.cols(); ++i) {
          double pr = 0;
          for (size_t k = 0; k < ext.size(); ++k)
            if (ext.states[k].v == r.v) pr += std::norm(eig.vectors(k, i));
          proj.emplace_back(-pr, i);
        }
        std::sort(proj.begin(), proj.end());
        std::vector<int> chosen;
        for (int j = 0; j < 2 * J + 1; ++j) chosen.push_back(proj[j].second);
        std::sort(chosen.begin(), chosen.end());
        for (int i : chosen)
          picked.push_back({ext, eig.vectors.col(i), r, eig.values(i)});
      }
    }

    const auto comb = combine_references(picked, ev);
    out.max_offdiag_overlap = std::max(out.max_offdiag_overlap, comb.max_offdiag_overlap);

    for (size_t pi = 0; pi < picked.size(); ++pi) {
      PipelineRow row;
      row.point = pt;
      row.tau_au = tau;
      row.n_st = nst;
      row.reference = picked[pi].reference.vib_label();
      row.omega_size = omega_sizes[pi / (J > 0 ? (2 * J + 1) : 1)];
      row.raw_energy_cm1 = picked[pi].energy_cm1;
      row.combined_energy_cm1 = comb.energies_cm1[pi];
      const auto lab = assign_label(comb.combined_vectors.col(pi), comb.union_basis, f, J);
      row.label = lab.str(J);
      if (with_exact) {
        auto it = exact.find(row.label);
        if (it != exact.end()) {
          row.exact_energy_cm1 = it->second;
          row.error_cm1 = row.combined_energy_cm1 - it->second;
        }
      }
      out.rows.push_back(row);
    }
  }
  out.final_omegas = omegas;
  return out;
}

}  // namespace rovib
