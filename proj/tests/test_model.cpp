#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <random>

#include "rovib/model.hpp"

using namespace rovib;
using json = nlohmann::json;

namespace {

MoleculeModel bundled() { return load_model(ROVIB_MODEL_FILE); }

json bundled_json() {
  std::ifstream in(ROVIB_MODEL_FILE);
  json j;
  in >> j;
  return j;
}

}  // namespace

TEST_CASE("bundled model loads with the tabulated frequencies and geometry") {
  const auto m = bundled();
  REQUIRE(m.n_atoms() == 3);
  REQUIRE(m.n_modes() == 3);
  CHECK(m.omega_cm1[0] == doctest::Approx(3830.87));
  CHECK(m.omega_cm1[1] == doctest::Approx(1649.74));
  CHECK(m.omega_cm1[2] == doctest::Approx(3940.46));

  const Eigen::Vector3d oh = m.atoms[1].re_bohr - m.atoms[0].re_bohr;
  const Eigen::Vector3d oh2 = m.atoms[2].re_bohr - m.atoms[0].re_bohr;
  CHECK(oh.norm() == doctest::Approx(1.8121).epsilon(1e-6));
  const double angle = std::acos(oh.dot(oh2) / (oh.norm() * oh2.norm())) * 180.0 / M_PI;
  CHECK(angle == doctest::Approx(104.368).epsilon(1e-6));
}

TEST_CASE("non-orthonormal L is rejected") {
  auto j = bundled_json();
  j["modes"]["L"][4][0] = j["modes"]["L"][4][0].get<double>() + 0.01;
  CHECK_THROWS_AS(parse_model(j.dump()), ValidationError);
}

TEST_CASE("eckart conditions hold for the bundled data") {
  const auto m = bundled();
  for (int k = 0; k < m.n_modes(); ++k) {
    Eigen::Vector3d tra = Eigen::Vector3d::Zero();
    Eigen::Vector3d rot = Eigen::Vector3d::Zero();
    for (int n = 0; n < m.n_atoms(); ++n) {
      const double sm = std::sqrt(m.mass_au(n));
      const Eigen::Vector3d Lc = m.L.block<3, 1>(3 * n, k);
      tra += sm * Lc;
      rot += sm * m.atoms[n].re_bohr.cross(Lc);
    }
    CHECK(tra.cwiseAbs().maxCoeff() < 1e-8);
    CHECK(rot.cwiseAbs().maxCoeff() < 1e-8);
  }
  const Eigen::MatrixXd G = m.L.transpose() * m.L;
  CHECK((G - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("rotational constants match the tabulated equilibrium values") {
  const auto m = bundled();
  const auto f = derive_frame(m);
  CHECK(std::abs(f.A_cm1 - 9.49) < 0.05);
  CHECK(std::abs(f.B_cm1 - 27.24) < 0.05);
  CHECK(std::abs(f.C_cm1 - 14.57) < 0.05);
  const double dmax = f.Ie.diagonal().maxCoeff();
  CHECK(std::abs(f.Ie(0, 1)) < 1e-8 * dmax);
  CHECK(std::abs(f.Ie(0, 2)) < 1e-8 * dmax);
  CHECK(std::abs(f.Ie(1, 2)) < 1e-8 * dmax);
}

TEST_CASE("doubling all masses halves every rotational constant") {
  auto m = bundled();
  const auto f1 = derive_frame(m);
  for (auto& a : m.atoms) a.mass_u *= 2.0;
  const auto f2 = derive_frame(m);
  CHECK(f2.A_cm1 == doctest::Approx(0.5 * f1.A_cm1).epsilon(1e-12));
  CHECK(f2.B_cm1 == doctest::Approx(0.5 * f1.B_cm1).epsilon(1e-12));
  CHECK(f2.C_cm1 == doctest::Approx(0.5 * f1.C_cm1).epsilon(1e-12));
}

TEST_CASE("collinear geometry is rejected as non-applicable") {
  auto m = bundled();
  m.atoms[0].re_bohr = {0, 0, 0.0};
  m.atoms[1].re_bohr = {0, 0, 1.0};
  m.atoms[2].re_bohr = {0, 0, -1.0};
  CHECK_THROWS_AS(equilibrium_inertia(m), ValidationError);
}

TEST_CASE("coriolis matrices are antisymmetric and match the direct formula") {
  const auto m = bundled();
  const auto zeta = coriolis_coefficients(m);
  for (int al = 0; al < 3; ++al) {
    CHECK((zeta[al] + zeta[al].transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (int k = 0; k < 3; ++k) CHECK(zeta[al](k, k) == 0.0);
  }
  // independent evaluation from the Levi-Civita symbol
  double eps[3][3][3] = {};
  eps[0][1][2] = eps[1][2][0] = eps[2][0][1] = 1;
  eps[0][2][1] = eps[2][1][0] = eps[1][0][2] = -1;
  for (int al = 0; al < 3; ++al)
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) {
        double s = 0;
        for (int n = 0; n < 3; ++n)
          for (int be = 0; be < 3; ++be)
            for (int ga = 0; ga < 3; ++ga)
              s += eps[al][be][ga] * m.L(3 * n + be, k) * m.L(3 * n + ga, l);
        CHECK(zeta[al](k, l) == doctest::Approx(s).epsilon(1e-12));
      }
}

TEST_CASE("permuting mode order permutes zeta rows and columns consistently") {
  auto m = bundled();
  const auto z0 = coriolis_coefficients(m);
  m.L.col(0).swap(m.L.col(1));
  std::swap(m.omega_cm1[0], m.omega_cm1[1]);
  const auto z1 = coriolis_coefficients(m);
  const int perm[3] = {1, 0, 2};
  for (int al = 0; al < 3; ++al)
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l)
        CHECK(z1[al](k, l) == doctest::Approx(z0[al](perm[k], perm[l])).epsilon(1e-14));
}

TEST_CASE("a_k matrices are symmetric finite-difference derivatives of the inertia tensor") {
  const auto m = bundled();
  const auto ak = a_matrices(m);
  for (int k = 0; k < 3; ++k) {
    CHECK((ak[k] - ak[k].transpose()).cwiseAbs().maxCoeff() < 1e-9);
    const double delta = 1e-4;
    Eigen::VectorXd Qp = Eigen::VectorXd::Zero(3), Qm = Eigen::VectorXd::Zero(3);
    Qp[k] = delta;
    Qm[k] = -delta;
    const Eigen::Matrix3d fd = (inertia_at(m, Qp) - inertia_at(m, Qm)) / (2 * delta);
    CHECK((fd - ak[k]).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("a_k vanishes for a zero L column") {
  auto m = bundled();
  m.L.col(1).setZero();
  const auto ak = a_matrices(m);
  CHECK(ak[1].cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("mu expansion: order 0 is the inverse equilibrium tensor") {
  const auto m = bundled();
  const auto f = derive_frame(m);
  const auto mu0 = f.mu[0].at({});
  for (int a = 0; a < 3; ++a) CHECK(mu0(a, a) == doctest::Approx(1.0 / f.Ie(a, a)));
  CHECK(std::abs(mu0(0, 1)) == 0.0);
}

TEST_CASE("mu expansion orders carry the coefficients (1, -1, 3/4, -1/2, 5/16)") {
  const auto m = bundled();
  const auto f = derive_frame(m);
  const double c_ell[5] = {1.0, -1.0, 0.75, -0.5, 5.0 / 16.0};
  std::mt19937_64 rng(3);
  Eigen::VectorXd Q(3);
  for (int i = 0; i < 3; ++i) Q[i] = 0.1 * (2.0 * canonical_u01(rng()) - 1.0);

  const Eigen::Matrix3d Iinvh = f.Ie.diagonal().cwiseSqrt().cwiseInverse().asDiagonal();
  Eigen::Matrix3d b = Eigen::Matrix3d::Zero();
  for (int k = 0; k < 3; ++k) b += Iinvh * f.a_k[k] * Iinvh * Q[k];
  for (int ell = 0; ell <= 4; ++ell) {
    Eigen::Matrix3d ref = Eigen::Matrix3d::Identity();
    for (int p = 0; p < ell; ++p) ref = ref * b;
    ref = c_ell[ell] * Iinvh * ref * Iinvh;
    // evaluate the stored monomial table at Q (tables are in dimensionless q)
    Eigen::Matrix3d got = Eigen::Matrix3d::Zero();
    for (const auto& [mon, M] : f.mu[ell]) {
      double qprod = 1;
      for (int t : mon) qprod *= Q[t] * std::sqrt(units::cm1_to_au(m.omega_cm1[t]));
      got += M * qprod;
    }
    const double scale = std::max(1e-300, ref.cwiseAbs().maxCoeff());
    CHECK((got - ref).cwiseAbs().maxCoeff() / scale < 1e-10);
  }
}

TEST_CASE("truncated mu expansion matches the numerical inverse of I'(Q)") {
  const auto m = bundled();
  const auto f = derive_frame(m);
  std::mt19937_64 rng(7);
  Eigen::VectorXd Q(3);
  for (int i = 0; i < 3; ++i) Q[i] = 2.0 * canonical_u01(rng()) - 1.0;
  Q *= 0.2 / Q.norm();

  auto mu_sum_at = [&](const Eigen::VectorXd& q) {
    Eigen::Matrix3d s = Eigen::Matrix3d::Zero();
    for (int ell = 0; ell <= 4; ++ell)
      for (const auto& [mon, M] : f.mu[ell]) {
        double qprod = 1;
        for (int t : mon) qprod *= q[t] * std::sqrt(units::cm1_to_au(m.omega_cm1[t]));
        s += M * qprod;
      }
    return s;
  };
  const Eigen::Matrix3d exact = iprime_at(m, f, Q).inverse();
  const double rel =
      (mu_sum_at(Q) - exact).cwiseAbs().maxCoeff() / exact.cwiseAbs().maxCoeff();
  CHECK(rel < 1e-4);

  // truncation error scales as O(|Q|^5): doubling Q multiplies it by ~32
  const double e1 =
      (mu_sum_at(Q) - Eigen::Matrix3d(iprime_at(m, f, Q).inverse())).cwiseAbs().maxCoeff();
  const Eigen::VectorXd Q2 = 2.0 * Q;
  const double e2 =
      (mu_sum_at(Q2) - Eigen::Matrix3d(iprime_at(m, f, Q2).inverse())).cwiseAbs().maxCoeff();
  CHECK(e2 / e1 > 16.0);
  CHECK(e2 / e1 < 64.0);
}

TEST_CASE("mu expansion rejects orders outside 0..4") {
  const auto m = bundled();
  const auto f = derive_frame(m);
  CHECK_THROWS_AS(mu_expansion(m, f, 5), ValidationError);
  CHECK_THROWS_AS(mu_expansion(m, f, -1), ValidationError);
}

TEST_CASE("malformed model files raise parse errors") {
  CHECK_THROWS_AS(parse_model("{ not json"), ValidationError);
  CHECK_THROWS_AS(parse_model("{}"), ValidationError);
}
