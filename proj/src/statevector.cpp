#include "rovib/statevector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <random>

namespace rovib {

double Statevector::norm() const {
  double s = 0;
  for (const cxd& a : amp) s += std::norm(a);
  return std::sqrt(s);
}

Statevector prepare_basis_state(const RovibBasisState& b, int vmax, int J) {
  const QubitLayout lay(static_cast<int>(b.v.size()), vmax, J);
  Statevector s(lay.nq());
  s.amp[lay.encode(b)] = cxd(1.0);
  return s;
}

void apply_pauli_rotation(Statevector& s, const PauliString& p, double theta, Exec exec) {
  if (p.nq != s.nq) throw ValidationError("Pauli string length does not match state");
  std::uint64_t xm = 0, ym = 0, zm = 0;
  int ny = 0;
  for (int j = 0; j < p.nq; ++j) {
    switch (p.letter(j)) {
      case 1: xm |= 1ull << j; break;
      case 2: ym |= 1ull << j; ++ny; break;
      case 3: zm |= 1ull << j; break;
      default: break;
    }
  }
  const std::uint64_t flip = xm | ym;
  const std::uint64_t sign_mask = ym | zm;
  const double c = std::cos(theta), sn = std::sin(theta);
  const std::int64_t dim = std::int64_t(s.dim());
  cxd ipref(1, 0);
  switch (ny & 3) {
    case 1: ipref = {0, 1}; break;
    case 2: ipref = {-1, 0}; break;
    case 3: ipref = {0, -1}; break;
    default: break;
  }

  if (flip == 0) {
    // diagonal string: pure phase per amplitude
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
#endif
    for (std::int64_t x = 0; x < dim; ++x) {
      const double sign = (std::popcount(std::uint64_t(x) & sign_mask) & 1) ? -1.0 : 1.0;
      s.amp[x] *= cxd(c, -sn * sign);
    }
    return;
  }

  const int hb = 63 - std::countl_zero(flip);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
#endif
  for (std::int64_t x = 0; x < dim; ++x) {
    if ((std::uint64_t(x) >> hb) & 1ull) continue;  // canonical member of each pair
    const std::int64_t y = std::int64_t(std::uint64_t(x) ^ flip);
    // P|x> = phase(x) |x^flip>
    const cxd phx = (std::popcount(std::uint64_t(x) & sign_mask) & 1) ? -ipref : ipref;
    const cxd phy = (std::popcount(std::uint64_t(y) & sign_mask) & 1) ? -ipref : ipref;
    const cxd ax = s.amp[x], ay = s.amp[y];
    s.amp[x] = c * ax - cxd(0, sn) * phy * ay;  // P contribution to slot x comes from y
    s.amp[y] = c * ay - cxd(0, sn) * phx * ax;
  }
}

TermOrder parse_term_order(const std::string& name) {
  if (name == "desc_abs_h") return TermOrder::DescendingAbsCoeff;
  if (name == "asc_abs_h") return TermOrder::AscendingAbsCoeff;
  if (name == "lex") return TermOrder::CanonicalLex;
  if (name == "lex_reverse") return TermOrder::ReverseLex;
  throw ValidationError("unknown term ordering '" + name +
                        "' (expect desc_abs_h, asc_abs_h, lex, lex_reverse)");
}

std::string term_order_name(TermOrder o) {
  switch (o) {
    case TermOrder::DescendingAbsCoeff: return "desc_abs_h";
    case TermOrder::AscendingAbsCoeff: return "asc_abs_h";
    case TermOrder::CanonicalLex: return "lex";
    default: return "lex_reverse";
  }
}

std::vector<PauliTerm> ordered_terms(const PauliSum& sum, double lambda_cm1, TermOrder order) {
  std::vector<PauliTerm> ts;
  for (const auto& t : sum.terms)
    if (std::abs(t.h_cm1) > lambda_cm1) ts.push_back(t);
  switch (order) {
    case TermOrder::DescendingAbsCoeff:
      std::sort(ts.begin(), ts.end(), [](const PauliTerm& a, const PauliTerm& b) {
        if (std::abs(a.h_cm1) != std::abs(b.h_cm1)) return std::abs(a.h_cm1) > std::abs(b.h_cm1);
        return a.p.code < b.p.code;
      });
      break;
    case TermOrder::AscendingAbsCoeff:
      std::sort(ts.begin(), ts.end(), [](const PauliTerm& a, const PauliTerm& b) {
        if (std::abs(a.h_cm1) != std::abs(b.h_cm1)) return std::abs(a.h_cm1) < std::abs(b.h_cm1);
        return a.p.code < b.p.code;
      });
      break;
    case TermOrder::CanonicalLex:
      std::sort(ts.begin(), ts.end(),
                [](const PauliTerm& a, const PauliTerm& b) { return a.p.code < b.p.code; });
      break;
    case TermOrder::ReverseLex:
      std::sort(ts.begin(), ts.end(),
                [](const PauliTerm& a, const PauliTerm& b) { return a.p.code > b.p.code; });
      break;
  }
  return ts;
}

Statevector trotter_evolve(const Statevector& s0, const PauliSum& sum, double tau_au, int n_st,
                           double lambda_cm1, TermOrder order, Exec exec) {
  if (tau_au < 0) throw ValidationError("tau must be non-negative");
  if (n_st < 0) throw ValidationError("step count must be non-negative");
  Statevector s = s0;
  const auto ts = ordered_terms(sum, lambda_cm1, order);
  for (int step = 0; step < n_st; ++step)
    for (const auto& t : ts)
      apply_pauli_rotation(s, t.p, tau_au * units::cm1_to_au(t.h_cm1), exec);
  return s;
}

Distribution exact_distribution(const Statevector& s, const QubitLayout& lay) {
  Distribution d;
  d.provenance = Provenance::Exact;
  RovibBasisState b;
  for (std::uint64_t x = 0; x < s.dim(); ++x) {
    const double pr = std::norm(s.amp[x]);
    if (pr == 0.0) continue;
    if (lay.decode(x, b))
      d.p[x] = pr;
    else
      d.padded_mass += pr;
  }
  return d;
}

Distribution sample_shots(const Distribution& d, long n_shot, std::uint64_t seed) {
  if (d.provenance != Provenance::Exact)
    throw ValidationError("sample_shots expects an exact distribution");
  if (n_shot <= 0) throw ValidationError("shot count must be positive");
  std::vector<std::pair<std::uint64_t, double>> cdf;
  double acc = 0;
  for (const auto& [x, pr] : d.p) {
    acc += pr;
    cdf.emplace_back(x, acc);
  }
  std::mt19937_64 rng(seed);
  std::map<std::uint64_t, long> counts;
  for (long i = 0; i < n_shot; ++i) {
    const double u = canonical_u01(rng()) * acc;
    auto it = std::lower_bound(cdf.begin(), cdf.end(), u,
                               [](const auto& a, double b) { return a.second < b; });
    if (it == cdf.end()) --it;
    counts[it->first]++;
  }
  Distribution out;
  out.provenance = Provenance::Shots;
  out.n_shot = n_shot;
  out.seed = seed;
  out.parity_filtered = d.parity_filtered;
  for (const auto& [x, n] : counts) out.p[x] = double(n) / double(n_shot);
  return out;
}

Distribution parity_postselect(const Distribution& d, const QubitLayout& lay,
                               int reference_parity) {
  Distribution out = d;
  out.p.clear();
  out.parity_filtered = true;
  double kept = 0;
  RovibBasisState b;
  for (const auto& [x, pr] : d.p) {
    if (!lay.decode(x, b)) continue;
    if (b.parity() == reference_parity) {
      out.p[x] = pr;
      kept += pr;
    }
  }
  if (kept <= 0.0)
    throw NumericalError("parity post-selection removed all probability mass");
  for (auto& [x, pr] : out.p) pr /= kept;
  return out;
}

void write_distribution(const Distribution& d, const QubitLayout& lay,
                        const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open distribution path: " + path);
  out << "# index";
  for (int k = 0; k < lay.n_modes; ++k) out << " v" << (k + 1);
  out << " K probability\n";
  out.precision(12);
  RovibBasisState b;
  for (const auto& [x, pr] : d.p) {
    if (!lay.decode(x, b)) continue;
    out << x;
    for (int q : b.v) out << " " << q;
    out << " " << b.K << " " << pr << "\n";
  }
}

}  // namespace rovib
