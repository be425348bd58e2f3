#include "rovib/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rovib {

namespace {

int ceil_log2(int n) {
  int b = 0;
  while ((1 << b) < n) ++b;
  return b;
}

struct Masks {
  std::uint64_t x = 0, y = 0, z = 0;
  int ny = 0;
};

Masks masks_of(std::uint64_t code, int nq) {
  Masks m;
  for (int j = 0; j < nq; ++j) {
    switch ((code >> (2 * j)) & 3u) {
      case 1: m.x |= 1ull << j; break;
      case 2: m.y |= 1ull << j; ++m.ny; break;
      case 3: m.z |= 1ull << j; break;
      default: break;
    }
  }
  return m;
}

cxd i_pow(int n) {
  switch (n & 3) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}

}  // namespace

PauliString PauliString::parse(const std::string& s) {
  PauliString p;
  p.nq = static_cast<int>(s.size());
  for (int j = 0; j < p.nq; ++j) {
    const char c = s[p.nq - 1 - j];
    const char* L = "IXYZ";
    const char* pos = std::strchr(L, c);
    if (!pos) throw ValidationError("bad Pauli letter '" + std::string(1, c) + "'");
    p.code |= std::uint64_t(pos - L) << (2 * j);
  }
  return p;
}

void PauliSum::sort_canonical() {
  std::sort(terms.begin(), terms.end(),
            [](const PauliTerm& a, const PauliTerm& b) { return a.p.code < b.p.code; });
}

QubitLayout::QubitLayout(int n_modes_, int vmax_, int J_)
    : n_modes(n_modes_), vmax(vmax_), J(J_) {
  bits_per_mode = std::max(1, ceil_log2(vmax + 1));
  rot_bits = J > 0 ? ceil_log2(2 * J + 1) : 0;
}

std::uint64_t QubitLayout::encode(const RovibBasisState& b) const {
  for (int q : b.v)
    if (q < 0 || q > vmax) throw ValidationError("vibrational quantum number out of range");
  if (b.K < -J || b.K > J) throw ValidationError("K out of range");
  std::uint64_t x = 0;
  for (int k = 0; k < n_modes; ++k) x = (x << bits_per_mode) | std::uint64_t(b.v[k]);
  x = (x << rot_bits) | std::uint64_t(b.K + J);
  return x;
}

bool QubitLayout::decode(std::uint64_t x, RovibBasisState& b) const {
  const std::uint64_t m = x & ((1ull << rot_bits) - 1);
  x >>= rot_bits;
  b.J = J;
  b.K = static_cast<int>(m) - J;
  if (b.K > J) return false;
  b.v.assign(n_modes, 0);
  for (int k = n_modes - 1; k >= 0; --k) {
    b.v[k] = static_cast<int>(x & ((1ull << bits_per_mode) - 1));
    x >>= bits_per_mode;
    if (b.v[k] > vmax) return false;
  }
  return x == 0;
}

std::uint64_t encode_basis_index(const RovibBasisState& b, int vmax, int J) {
  return QubitLayout(static_cast<int>(b.v.size()), vmax, J).encode(b);
}

Eigen::MatrixXcd pad_to_qubit_space(const SparseHamiltonian& H, const QubitLayout& lay) {
  const int dim = 1 << lay.nq();
  BasisIndexer idx(lay.n_modes, lay.vmax, lay.J);
  Eigen::MatrixXcd Hq = Eigen::MatrixXcd::Zero(dim, dim);
  const int S = idx.dim();
  for (int r = 0; r < S; ++r) {
    const std::uint64_t xr = lay.encode(idx.state(r));
    for (int c = 0; c < S; ++c) {
      const cxd v = H.mat(r, c);
      if (v != cxd(0.0)) Hq(xr, lay.encode(idx.state(c))) = v;
    }
  }
  return Hq;
}

PauliSum pauli_decompose_trace(const Eigen::MatrixXcd& Hq, int nq, double drop_floor,
                               Exec exec) {
  const std::int64_t dim = std::int64_t(1) << nq;
  if (Hq.rows() != dim || Hq.cols() != dim)
    throw ValidationError("matrix dimension must be 2^nq");
  if (nq > kTraceQubitLimit)
    throw ValidationError("trace decomposition limited to nq <= " +
                          std::to_string(kTraceQubitLimit));
  const std::int64_t n_strings = std::int64_t(1) << (2 * nq);
  std::vector<double> coeff(n_strings, 0.0);
  double max_imag = 0.0;

#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(max : max_imag) \
    if (exec == Exec::Parallel)
#endif
  for (std::int64_t s = 0; s < n_strings; ++s) {
    const Masks mk = masks_of(std::uint64_t(s), nq);
    const std::uint64_t flip = mk.x | mk.y;
    const std::uint64_t sign_mask = mk.y | mk.z;
    cxd tr = 0.0;
    for (std::int64_t yy = 0; yy < dim; ++yy) {
      const cxd v = Hq(yy, std::int64_t(std::uint64_t(yy) ^ flip));
      if (v != cxd(0.0))
        tr += (std::popcount(std::uint64_t(yy) & sign_mask) & 1) ? -v : v;
    }
    const cxd h = i_pow(mk.ny) * tr / double(dim);
    max_imag = std::max(max_imag, std::abs(h.imag()));
    coeff[s] = h.real();
  }
  if (max_imag > 1e-9)
    throw NumericalError("Pauli coefficients have imaginary parts up to " +
                         std::to_string(max_imag) + "; input not Hermitian");
  PauliSum out;
  out.nq = nq;
  for (std::int64_t s = 0; s < n_strings; ++s)
    if (std::abs(coeff[s]) > drop_floor)
      out.terms.push_back({coeff[s], PauliString{std::uint64_t(s), nq}});
  return out;
}

namespace {

// Pauli decomposition of a small padded register matrix; complex coefficients.
std::vector<std::pair<std::uint64_t, cxd>> register_decompose(const Eigen::MatrixXcd& M,
                                                              int nqr) {
  std::vector<std::pair<std::uint64_t, cxd>> out;
  if (nqr == 0) {
    if (M(0, 0) != cxd(0.0)) out.emplace_back(0, M(0, 0));
    return out;
  }
  const int dim = 1 << nqr;
  for (std::uint64_t s = 0; s < (1ull << (2 * nqr)); ++s) {
    const Masks mk = masks_of(s, nqr);
    const std::uint64_t flip = mk.x | mk.y;
    const std::uint64_t sign_mask = mk.y | mk.z;
    cxd tr = 0.0;
    for (int yy = 0; yy < dim; ++yy) {
      const cxd v = M(yy, int(std::uint64_t(yy) ^ flip));
      if (v != cxd(0.0)) tr += (std::popcount(std::uint64_t(yy) & sign_mask) & 1) ? -v : v;
    }
    const cxd h = i_pow(mk.ny) * tr / double(dim);
    if (std::abs(h) > 1e-14) out.emplace_back(s, h);
  }
  return out;
}

}  // namespace

PauliSum pauli_decompose_factored(const MoleculeModel& m, const DerivedFrame& f, int vmax,
                                  int J, double drop_floor, Exec exec) {
  const QubitLayout lay(m.n_modes(), vmax, J);
  HamiltonianEvaluator ev(m, f, vmax, J, kAllGroups);
  const int nv = lay.bits_per_mode;
  const int nr = lay.rot_bits;
  const int d = vmax + 1;

  // group identical operator patterns, summing coefficients
  struct Pattern {
    std::vector<std::pair<int, std::string>> chains;
    std::vector<int> rot;
    double coeff = 0;
  };
  std::map<std::pair<std::vector<std::pair<int, std::string>>, std::vector<int>>, double> pat;
  for (const auto& t : ev.terms()) pat[{t.chains, t.rot}] += t.coeff_cm1;
  std::vector<Pattern> patterns;
  for (const auto& [key, coeff] : pat) patterns.push_back({key.first, key.second, coeff});

  // memoized register decompositions
  std::map<std::string, std::vector<std::pair<std::uint64_t, cxd>>> mode_dec;
  auto mode_register = [&](const std::string& chain) {
    auto it = mode_dec.find(chain);
    if (it != mode_dec.end()) return it->second;
    Eigen::MatrixXcd Mp = Eigen::MatrixXcd::Zero(1 << nv, 1 << nv);
    Mp.topLeftCorner(d, d) = chain_matrix(chain, d);
    return mode_dec[chain] = register_decompose(Mp, nv);
  };
  const auto am = angular_momentum(J);
  std::map<std::string, std::vector<std::pair<std::uint64_t, cxd>>> rot_dec;
  auto rot_register = [&](const std::vector<int>& rot) {
    const std::string key(rot.begin(), rot.end());
    auto it = rot_dec.find(key);
    if (it != rot_dec.end()) return it->second;
    const int R = 2 * J + 1;
    Eigen::MatrixXcd Rm = Eigen::MatrixXcd::Identity(R, R);
    for (int ax : rot) Rm = Rm * (ax == 0 ? am.Ja : (ax == 1 ? am.Jb : am.Jc));
    Eigen::MatrixXcd Rp = Eigen::MatrixXcd::Zero(1 << nr, 1 << nr);
    Rp.topLeftCorner(R, R) = Rm;  // m = K + J occupies the low slots
    return rot_dec[key] = register_decompose(Rp, nr);
  };
  const std::vector<std::pair<std::uint64_t, cxd>> identity_mode{{0, cxd(1.0)}};

  // combine per pattern; per-thread accumulators merged in fixed block order
  const int n_modes = m.n_modes();
  const int n_pat = static_cast<int>(patterns.size());
  std::vector<std::unordered_map<std::uint64_t, cxd>> partial(n_pat);
  // precompute register lists serially (cache fills deterministically)
  for (const auto& p : patterns) {
    for (const auto& [mode, ops] : p.chains) mode_register(ops);
    rot_register(p.rot);
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (exec == Exec::Parallel)
#endif
  for (int pi = 0; pi < n_pat; ++pi) {
    const auto& p = patterns[pi];
    std::vector<const std::vector<std::pair<std::uint64_t, cxd>>*> regs;
    for (int k = 0; k < n_modes; ++k) {
      auto it = std::find_if(p.chains.begin(), p.chains.end(),
                             [&](const auto& c) { return c.first == k; });
      regs.push_back(it == p.chains.end() ? &identity_mode : &mode_dec.at(it->second));
    }
    const auto& rreg = rot_dec.at(std::string(p.rot.begin(), p.rot.end()));
    auto& acc = partial[pi];
    std::vector<size_t> pos(n_modes, 0);
    // nested product over register string lists
    std::vector<std::pair<std::uint64_t, cxd>> partial_keys{{0, cxd(p.coeff)}};
    for (int k = 0; k < n_modes; ++k) {
      std::vector<std::pair<std::uint64_t, cxd>> next;
      next.reserve(partial_keys.size() * regs[k]->size());
      for (const auto& [key, val] : partial_keys)
        for (const auto& [rk, rv] : *regs[k])
          next.emplace_back((key << (2 * nv)) | rk, val * rv);
      partial_keys.swap(next);
    }
    for (const auto& [key, val] : partial_keys)
      for (const auto& [rk, rv] : rreg) acc[(key << (2 * nr)) | rk] += val * rv;
  }
  std::unordered_map<std::uint64_t, cxd> total;
  for (int pi = 0; pi < n_pat; ++pi)
    for (const auto& [k, v] : partial[pi]) total[k] += v;

  PauliSum out;
  out.nq = lay.nq();
  out.vmax = vmax;
  out.J = J;
  double max_imag = 0.0;
  for (const auto& [k, v] : total) {
    max_imag = std::max(max_imag, std::abs(v.imag()));
    if (std::abs(v.real()) > drop_floor)
      out.terms.push_back({v.real(), PauliString{k, out.nq}});
  }
  if (max_imag > 1e-8)
    throw NumericalError("factored decomposition left imaginary residue " +
                         std::to_string(max_imag));
  out.sort_canonical();
  return out;
}

TermStatistics term_statistics(const PauliSum& sum) {
  if (sum.terms.empty()) throw ValidationError("term_statistics: empty Pauli sum");
  TermStatistics st;
  st.count_by_weight.assign(sum.nq + 1, 0);
  for (const auto& t : sum.terms) {
    st.count_by_weight[t.p.weight()]++;
    st.abs_coeffs.push_back(std::abs(t.h_cm1));
  }
  std::sort(st.abs_coeffs.rbegin(), st.abs_coeffs.rend());
  return st;
}

PauliSum cutoff_filter(const PauliSum& sum, double lambda_cm1, CutoffDirection dir) {
  if (lambda_cm1 < 0) throw ValidationError("cutoff must be non-negative");
  PauliSum out = sum;
  out.terms.clear();
  for (const auto& t : sum.terms) {
    const bool keep = dir == CutoffDirection::Above ? std::abs(t.h_cm1) > lambda_cm1
                                                    : std::abs(t.h_cm1) < lambda_cm1;
    if (keep) out.terms.push_back(t);
  }
  return out;
}

long q_ell_term_count(int ell, int eta) {
  if (ell < 1 || ell > 4) throw ValidationError("q power must be 1..4");
  if (eta < 1) throw ValidationError("register size must be >= 1 qubit");
  const int d = 1 << eta;
  Eigen::MatrixXcd M = chain_matrix(std::string(ell, 'q'), d);
  long n = 0;
  for (const auto& [k, v] : register_decompose(M, eta))
    if (std::abs(v) > 1e-10) ++n;
  return n;
}

ScalingStudy scaling_study(int ell, int eta_max) {
  ScalingStudy st;
  st.ell = ell;
  for (int eta = 1; eta <= eta_max; ++eta) {
    st.eta.push_back(eta);
    st.counts.push_back(q_ell_term_count(ell, eta));
  }
  // fit counts / 2^eta = b*eta + c over eta >= 2
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (size_t i = 0; i < st.eta.size(); ++i) {
    if (st.eta[i] < 2) continue;
    const double x = st.eta[i];
    const double y = double(st.counts[i]) / std::pow(2.0, st.eta[i]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++n;
  }
  st.fit_b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  st.fit_c = (sy - st.fit_b * sx) / n;
  return st;
}

PowerLawFit fit_power_law(const std::vector<int>& J, const std::vector<long>& L) {
  if (J.size() != L.size() || J.size() < 2)
    throw ValidationError("power-law fit needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = static_cast<int>(J.size());
  for (int i = 0; i < n; ++i) {
    const double x = std::log(double(J[i]));
    const double y = std::log(double(L[i]));
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  PowerLawFit fit;
  fit.kappa = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.c = std::exp((sy - fit.kappa * sx) / n);
  return fit;
}

PowerLawFit fit_Lq_vs_J(const MoleculeModel& m, const DerivedFrame& f, int vmax,
                        const std::vector<int>& Js, std::vector<long>* counts_out) {
  std::vector<long> counts;
  for (int J : Js)
    counts.push_back(static_cast<long>(pauli_decompose_factored(m, f, vmax, J).size()));
  if (counts_out) *counts_out = counts;
  return fit_power_law(Js, counts);
}

void write_pauli_sum(const PauliSum& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open Pauli sum path: " + path);
  out << "# nq " << s.nq << " vmax " << s.vmax << " J " << s.J << " mapping " << s.mapping
      << "\n";
  out.precision(12);
  for (const auto& t : s.terms) out << t.h_cm1 << " " << t.p.str() << "\n";
}

PauliSum read_pauli_sum(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open Pauli sum path: " + path);
  PauliSum s;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# nq ", 0) != 0)
    throw ValidationError("bad Pauli sum header");
  {
    std::istringstream hs(line.substr(1));
    std::string k1, k2, k3, k4;
    hs >> k1 >> s.nq >> k2 >> s.vmax >> k3 >> s.J >> k4 >> s.mapping;
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    PauliTerm t;
    std::string str;
    ls >> t.h_cm1 >> str;
    t.p = PauliString::parse(str);
    if (t.p.nq != s.nq) throw ValidationError("Pauli string length mismatch");
    s.terms.push_back(t);
  }
  return s;
}

Eigen::MatrixXcd pauli_matrix(const PauliString& p) {
  const std::int64_t dim = std::int64_t(1) << p.nq;
  const Masks mk = masks_of(p.code, p.nq);
  const std::uint64_t flip = mk.x | mk.y;
  const std::uint64_t sign_mask = mk.y | mk.z;
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::int64_t x = 0; x < dim; ++x) {
    cxd phase = i_pow(mk.ny);
    if (std::popcount(std::uint64_t(x) & sign_mask) & 1) phase = -phase;
    M(std::int64_t(std::uint64_t(x) ^ flip), x) = phase;
  }
  return M;
}

}  // namespace rovib
