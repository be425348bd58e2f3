#include "rovib/model.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace rovib {

using json = nlohmann::json;

namespace {

std::vector<int> parse_index_key(const std::string& key, int n_modes) {
  std::vector<int> idx;
  for (char c : key) {
    if (c < '1' || c > '9') throw ValidationError("bad force-constant key '" + key + "'");
    int k = c - '1';
    if (k >= n_modes) throw ValidationError("force-constant key '" + key + "' exceeds mode count");
    idx.push_back(k);
  }
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

MoleculeModel parse_model(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("model file parse error: ") + e.what());
  }
  MoleculeModel m;
  try {
    m.name = j.value("name", "unnamed");
    auto axes = j.at("axes");
    if (axes.size() != 3) throw ValidationError("axes must list three axis names");
    for (int i = 0; i < 3; ++i) m.axes[i] = axes[i].get<std::string>().at(0);
    for (const auto& ja : j.at("atoms")) {
      Atom a;
      a.symbol = ja.at("symbol").get<std::string>();
      a.mass_u = ja.at("mass_u").get<double>();
      auto r = ja.at("re_bohr");
      if (r.size() != 3) throw ValidationError("re_bohr must have three components");
      for (int i = 0; i < 3; ++i) a.re_bohr[i] = r[i].get<double>();
      m.atoms.push_back(a);
    }
    const auto& modes = j.at("modes");
    for (const auto& w : modes.at("omega_cm1")) m.omega_cm1.push_back(w.get<double>());
    const auto& Lr = modes.at("L");
    const int rows = 3 * m.n_atoms();
    const int nm = m.n_modes();
    if (static_cast<int>(Lr.size()) != rows)
      throw ValidationError("L must have 3*n_atoms rows (atom-major, axes a,b,c)");
    m.L.resize(rows, nm);
    for (int r = 0; r < rows; ++r) {
      if (static_cast<int>(Lr[r].size()) != nm)
        throw ValidationError("L row length must equal the mode count");
      for (int k = 0; k < nm; ++k) m.L(r, k) = Lr[r][k].get<double>();
    }
    for (auto it = j.at("cubic_cm1").begin(); it != j.at("cubic_cm1").end(); ++it) {
      auto idx = parse_index_key(it.key(), nm);
      if (idx.size() != 3) throw ValidationError("cubic key must have three indices");
      m.cubic_cm1[idx] = it.value().get<double>();
    }
    for (auto it = j.at("quartic_cm1").begin(); it != j.at("quartic_cm1").end(); ++it) {
      auto idx = parse_index_key(it.key(), nm);
      if (idx.size() != 4) throw ValidationError("quartic key must have four indices");
      m.quartic_cm1[idx] = it.value().get<double>();
    }
    m.vmax = j.at("vmax").get<int>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("model file schema error: ") + e.what());
  }
  validate_model(m);
  return m;
}

MoleculeModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open model file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

void validate_model(const MoleculeModel& m) {
  const int na = m.n_atoms();
  const int nm = m.n_modes();
  if (na < 3) throw ValidationError("need at least three atoms (nonlinear molecule)");
  if (nm != 3 * na - 6)
    throw ValidationError("mode count must equal 3*n_atoms-6 for a nonlinear molecule");
  if (m.vmax < 0) throw ValidationError("vmax must be non-negative");
  for (double w : m.omega_cm1)
    if (!(w > 0.0)) throw ValidationError("harmonic frequencies must be positive");
  for (const auto& a : m.atoms)
    if (!(a.mass_u > 0.0)) throw ValidationError("atom masses must be positive");

  // L columns orthonormal
  Eigen::MatrixXd G = m.L.transpose() * m.L - Eigen::MatrixXd::Identity(nm, nm);
  if (G.cwiseAbs().maxCoeff() > 1e-10)
    throw ValidationError("normal-mode matrix violates L^T L = 1 (max residue " +
                          std::to_string(G.cwiseAbs().maxCoeff()) + ")");

  // Eckart conditions in mass-weighted coordinates
  for (int k = 0; k < nm; ++k) {
    Eigen::Vector3d tra = Eigen::Vector3d::Zero();
    Eigen::Vector3d rot = Eigen::Vector3d::Zero();
    for (int n = 0; n < na; ++n) {
      const double sm = std::sqrt(m.mass_au(n));
      Eigen::Vector3d Lcol = m.L.block<3, 1>(3 * n, k);
      tra += sm * Lcol;
      rot += sm * m.atoms[n].re_bohr.cross(Lcol);
    }
    if (tra.cwiseAbs().maxCoeff() > 1e-8)
      throw ValidationError("translational Eckart condition violated for mode " +
                            std::to_string(k + 1));
    if (rot.cwiseAbs().maxCoeff() > 1e-8)
      throw ValidationError("rotational Eckart condition violated for mode " +
                            std::to_string(k + 1));
  }
}

Eigen::Matrix3d inertia_at(const MoleculeModel& m, const Eigen::VectorXd& Q) {
  Eigen::Matrix3d I = Eigen::Matrix3d::Zero();
  for (int n = 0; n < m.n_atoms(); ++n) {
    Eigen::Vector3d r = m.atoms[n].re_bohr;
    const double sm = std::sqrt(m.mass_au(n));
    for (int k = 0; k < m.n_modes(); ++k) r += m.L.block<3, 1>(3 * n, k) * Q[k] / sm;
    I += m.mass_au(n) * (r.squaredNorm() * Eigen::Matrix3d::Identity() - r * r.transpose());
  }
  return I;
}

Eigen::Matrix3d equilibrium_inertia(const MoleculeModel& m) {
  Eigen::Matrix3d Ie = inertia_at(m, Eigen::VectorXd::Zero(m.n_modes()));
  const double offdiag = std::max({std::abs(Ie(0, 1)), std::abs(Ie(0, 2)), std::abs(Ie(1, 2))});
  const double dmax = Ie.diagonal().cwiseAbs().maxCoeff();
  if (Ie.diagonal().minCoeff() <= 1e-10 * dmax)
    throw ValidationError("singular inertia tensor: geometry is (near-)linear, "
                          "nonlinear-molecule formalism does not apply");
  if (offdiag > 1e-8 * dmax)
    throw ValidationError("equilibrium inertia tensor is not diagonal; "
                          "coordinates must be given in the principal-axis frame");
  return Ie;
}

std::vector<Eigen::MatrixXd> coriolis_coefficients(const MoleculeModel& m) {
  const int nm = m.n_modes();
  std::vector<Eigen::MatrixXd> zeta(3, Eigen::MatrixXd::Zero(nm, nm));
  for (int al = 0; al < 3; ++al) {
    const int be = (al + 1) % 3, ga = (al + 2) % 3;
    for (int k = 0; k < nm; ++k)
      for (int l = 0; l < nm; ++l) {
        double s = 0.0;
        for (int n = 0; n < m.n_atoms(); ++n)
          s += m.L(3 * n + be, k) * m.L(3 * n + ga, l) -
               m.L(3 * n + ga, k) * m.L(3 * n + be, l);
        zeta[al](k, l) = s;
      }
  }
  return zeta;
}

std::vector<Eigen::Matrix3d> a_matrices(const MoleculeModel& m) {
  std::vector<Eigen::Matrix3d> out(m.n_modes());
  for (int k = 0; k < m.n_modes(); ++k) {
    Eigen::Matrix3d a = Eigen::Matrix3d::Zero();
    for (int n = 0; n < m.n_atoms(); ++n) {
      const double sm = std::sqrt(m.mass_au(n));
      const Eigen::Vector3d r = m.atoms[n].re_bohr;
      const Eigen::Vector3d Lc = m.L.block<3, 1>(3 * n, k);
      // 2 sum_{gd} (d_ab d_gd - d_ad d_bg) sqrt(m) r_g L_d
      a += 2.0 * sm * (r.dot(Lc) * Eigen::Matrix3d::Identity() - Lc * r.transpose());
    }
    out[k] = a;
  }
  return out;
}

std::map<std::vector<int>, Eigen::Matrix3d> mu_expansion(const MoleculeModel& m,
                                                         const DerivedFrame& f, int order) {
  if (order < 0 || order > 4) throw ValidationError("mu expansion order must be 0..4");
  static const double c_ell[5] = {1.0, -1.0, 0.75, -0.5, 5.0 / 16.0};
  std::map<std::vector<int>, Eigen::Matrix3d> out;
  const Eigen::Matrix3d Iinvh = f.Ie.diagonal().cwiseSqrt().cwiseInverse().asDiagonal();
  if (order == 0) {
    out[{}] = Eigen::Matrix3d(f.Ie.diagonal().cwiseInverse().asDiagonal());
    return out;
  }
  const int nm = m.n_modes();
  // B~_k = Ie^{-1/2} a_k Ie^{-1/2} / sqrt(omega_k); matrix order inside b^l matters
  std::vector<Eigen::Matrix3d> Bt(nm);
  for (int k = 0; k < nm; ++k)
    Bt[k] = Iinvh * f.a_k[k] * Iinvh / std::sqrt(units::cm1_to_au(m.omega_cm1[k]));
  std::vector<int> tup(order, 0);
  while (true) {
    Eigen::Matrix3d M = Eigen::Matrix3d::Identity();
    for (int t : tup) M = M * Bt[t];
    M = c_ell[order] * Iinvh * M * Iinvh;
    std::vector<int> key = tup;
    std::sort(key.begin(), key.end());
    auto it = out.find(key);
    if (it == out.end())
      out[key] = M;
    else
      it->second += M;
    int pos = order - 1;
    while (pos >= 0 && tup[pos] == nm - 1) tup[pos--] = 0;
    if (pos < 0) break;
    ++tup[pos];
  }
  return out;
}

Eigen::Matrix3d iprime_at(const MoleculeModel& m, const DerivedFrame& f,
                          const Eigen::VectorXd& Q) {
  Eigen::Matrix3d I = inertia_at(m, Q);
  const int nm = m.n_modes();
  for (int al = 0; al < 3; ++al)
    for (int be = 0; be < 3; ++be) {
      double s = 0.0;
      for (int k = 0; k < nm; ++k)
        for (int l = 0; l < nm; ++l)
          for (int mm = 0; mm < nm; ++mm)
            s += f.zeta[al](k, mm) * f.zeta[be](l, mm) * Q[k] * Q[l];
      I(al, be) -= s;
    }
  return I;
}

DerivedFrame derive_frame(const MoleculeModel& m) {
  DerivedFrame f;
  f.Ie = equilibrium_inertia(m);
  f.A_cm1 = units::au_to_cm1(0.5 / f.Ie(0, 0));
  f.B_cm1 = units::au_to_cm1(0.5 / f.Ie(1, 1));
  f.C_cm1 = units::au_to_cm1(0.5 / f.Ie(2, 2));
  f.zeta = coriolis_coefficients(m);
  f.a_k = a_matrices(m);
  for (int k = 0; k < m.n_modes(); ++k)
    if ((f.a_k[k] - f.a_k[k].transpose()).cwiseAbs().maxCoeff() > 1e-8)
      throw NumericalError("a_k matrix not symmetric; rotational Eckart condition broken");
  for (int l = 0; l <= 4; ++l) f.mu[l] = mu_expansion(m, f, l);
  return f;
}

}  // namespace rovib
