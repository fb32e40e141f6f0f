#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "polydg/physics.hpp"

using namespace polydg;

namespace {

constexpr Real kGamma = 1.4;

StateVec make_state(int dim, Real rho, const Vec3& vel, Real p) {
  StateVec u = StateVec::Zero();
  u[0] = rho;
  Real ke = 0.0;
  for (int c = 0; c < dim; ++c) {
    u[1 + c] = rho * vel[c];
    ke += vel[c] * vel[c];
  }
  u[dim + 1] = p / (kGamma - 1) + 0.5 * rho * ke;
  return u;
}

StateVec random_state(std::mt19937& gen, int dim) {
  std::uniform_real_distribution<Real> rho(0.1, 10.0);
  std::uniform_real_distribution<Real> p(0.1, 100.0);
  std::uniform_real_distribution<Real> v(-3.0 / std::sqrt(3.0), 3.0 / std::sqrt(3.0));
  Vec3 vel = Vec3::Zero();
  for (int c = 0; c < dim; ++c) vel[c] = v(gen);
  return make_state(dim, rho(gen), vel, p(gen));
}

Vec3 random_unit(std::mt19937& gen, int dim) {
  std::normal_distribution<Real> g(0, 1);
  Vec3 n = Vec3::Zero();
  do {
    for (int c = 0; c < dim; ++c) n[c] = g(gen);
  } while (n.norm() < 1e-3);
  return n / n.norm();
}

}  // namespace

TEST_CASE("euler flux: stagnation and direct formula evaluation") {
  StateVec u = make_state(3, 1.0, Vec3::Zero(), 1.0);
  for (int dir = 0; dir < 3; ++dir) {
    StateVec f = euler_flux(3, kGamma, u, dir);
    CHECK(f[0] == doctest::Approx(0.0));
    for (int c = 0; c < 3; ++c) CHECK(f[1 + c] == doctest::Approx(dir == c ? 1.0 : 0.0));
    CHECK(f[4] == doctest::Approx(0.0));
  }

  u = make_state(3, 1.0, Vec3(0.3, 0, 0), 17.857);
  StateVec f = euler_flux(3, kGamma, u, 0);
  CHECK(f[0] == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(f[1] == doctest::Approx(17.857 + 0.09).epsilon(1e-14));
  CHECK(f[2] == doctest::Approx(0.0));
  CHECK(f[3] == doctest::Approx(0.0));
  const Real energy = 17.857 / 0.4 + 0.5 * 0.09;
  CHECK(f[4] == doctest::Approx((energy + 17.857) * 0.3).epsilon(1e-14));

  // transverse symmetry for axis-aligned flow
  StateVec f1 = euler_flux(3, kGamma, u, 1);
  StateVec f2 = euler_flux(3, kGamma, u, 2);
  CHECK(f1[2] == doctest::Approx(f2[3]));

  StateVec bad = u;
  bad[0] = -1.0;
  CHECK_THROWS_AS(euler_flux(3, kGamma, bad, 0), AdmissibilityError);
}

TEST_CASE("entropy variable map matches the closed form and inverts") {
  StateVec u = make_state(3, 1.0, Vec3(0.3, 0, 0), 17.857);
  StateVec v = entropy_vars(3, kGamma, u);
  const Real s = std::log(17.857);
  CHECK(v[0] == doctest::Approx((kGamma - s) / 0.4 - 0.09 / (2 * 17.857)).epsilon(1e-13));
  CHECK(v[0] == doctest::Approx(-3.7085).epsilon(1e-4));
  CHECK(v[1] == doctest::Approx(0.3 / 17.857).epsilon(1e-13));
  CHECK(v[2] == doctest::Approx(0.0));
  CHECK(v[4] == doctest::Approx(-1.0 / 17.857).epsilon(1e-13));

  // s(rho = 1, p = 1) = 0
  CHECK(entropy_function(3, kGamma, make_state(3, 1, Vec3::Zero(), 1)) == doctest::Approx(0.0));

  for (int dim : {2, 3}) {
    std::mt19937 gen(100 + dim);
    for (int t = 0; t < 10000; ++t) {
      const StateVec a = random_state(gen, dim);
      const StateVec b = cons_from_entropy(dim, kGamma, entropy_vars(dim, kGamma, a));
      for (int c = 0; c < dim + 2; ++c) {
        CHECK(std::abs(b[c] - a[c]) < 1e-12 * (1.0 + std::abs(a[c])));
      }
    }
  }

  StateVec vbad = v;
  vbad[4] = 0.1;
  CHECK_THROWS_AS(cons_from_entropy(3, kGamma, vbad), AdmissibilityError);
}

TEST_CASE("entropy pair, potential identity, and dS/du = v") {
  StateVec u0 = make_state(3, 1, Vec3::Zero(), 1);
  CHECK(entropy_function(3, kGamma, u0) == doctest::Approx(0.0));
  for (int d = 0; d < 3; ++d) {
    CHECK(entropy_flux(3, kGamma, u0, d) == doctest::Approx(0.0));
    CHECK(entropy_potential(3, kGamma, u0, d) == doctest::Approx(0.0));
  }

  std::mt19937 gen(55);
  for (int t = 0; t < 1000; ++t) {
    const StateVec u = random_state(gen, 3);
    for (int d = 0; d < 3; ++d) {
      const Real psi = entropy_potential(3, kGamma, u, d);
      CHECK(std::abs(psi - u[1 + d]) < 1e-12 * (1.0 + std::abs(u[1 + d])));
    }
  }

  // finite-difference gradient of S against the entropy variables
  for (int t = 0; t < 20; ++t) {
    const StateVec u = random_state(gen, 3);
    const StateVec v = entropy_vars(3, kGamma, u);
    for (int c = 0; c < 5; ++c) {
      StateVec up = u, um = u;
      const Real h = 1e-6 * (1.0 + std::abs(u[c]));
      up[c] += h;
      um[c] -= h;
      const Real fd =
          (entropy_function(3, kGamma, up) - entropy_function(3, kGamma, um)) / (2 * h);
      CHECK(fd == doctest::Approx(v[c]).epsilon(1e-6));
    }
  }
}

TEST_CASE("logarithmic mean") {
  CHECK(log_mean(2.0, 2.0) == doctest::Approx(2.0));
  CHECK(log_mean(1.0, std::exp(1.0)) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));

  // series branch: near-equal arguments without cancellation
  const Real eps = 1e-9;
  const Real expect = 1.0 + 0.5 * eps + eps * eps / 12.0;
  CHECK(std::abs(log_mean(1.0, 1.0 + eps) - expect) < 1e-12);

  // symmetric and between min/max
  std::mt19937 gen(3);
  std::uniform_real_distribution<Real> a(0.01, 50.0);
  for (int t = 0; t < 1000; ++t) {
    const Real x = a(gen), y = a(gen);
    const Real m = log_mean(x, y);
    CHECK(m == doctest::Approx(log_mean(y, x)).epsilon(1e-14));
    CHECK(m >= std::min(x, y) - 1e-14);
    CHECK(m <= std::max(x, y) + 1e-14);
  }
  CHECK_THROWS_AS(log_mean(-1.0, 2.0), std::invalid_argument);
}

TEST_CASE("chandrashekar flux: consistency, symmetry, Tadmor condition") {
  for (int dim : {2, 3}) {
    std::mt19937 gen(200 + dim);
    for (int t = 0; t < 1000; ++t) {
      const StateVec u = random_state(gen, dim);
      for (int d = 0; d < dim; ++d) {
        const StateVec fc = chandrashekar_flux(dim, kGamma, u, u, d);
        const StateVec fe = euler_flux(dim, kGamma, u, d);
        for (int c = 0; c < dim + 2; ++c) {
          CHECK(std::abs(fc[c] - fe[c]) < 1e-13 * (1.0 + std::abs(fe[c])));
        }
      }
    }
    for (int t = 0; t < 1000; ++t) {
      const StateVec ul = random_state(gen, dim);
      const StateVec ur = random_state(gen, dim);
      const StateVec vl = entropy_vars(dim, kGamma, ul);
      const StateVec vr = entropy_vars(dim, kGamma, ur);
      for (int d = 0; d < dim; ++d) {
        const StateVec f = chandrashekar_flux(dim, kGamma, ul, ur, d);
        const StateVec frev = chandrashekar_flux(dim, kGamma, ur, ul, d);
        CHECK((f - frev).cwiseAbs().maxCoeff() == 0.0);  // bitwise symmetric means
        const Real lhs = (vl - vr).head(dim + 2).dot(f.head(dim + 2));
        const Real rhs =
            entropy_potential(dim, kGamma, ul, d) - entropy_potential(dim, kGamma, ur, d);
        CHECK(std::abs(lhs - rhs) < 1e-12 * (1.0 + std::abs(rhs)));
      }
    }
  }
}

TEST_CASE("dissipative fluxes: consistency and entropy sign on sampled jumps") {
  std::mt19937 gen(31);
  const StateVec u = make_state(3, 1.3, Vec3(0.4, -0.2, 0.1), 2.0);
  const Vec3 n = Vec3(1, 2, -1).normalized();
  const StateVec fexact = euler_flux_normal(3, kGamma, u, n);
  CHECK((rusanov_flux(3, kGamma, u, u, n) - fexact).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((roe_flux_harten(3, kGamma, u, u, n) - fexact).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((es_interface_flux(3, kGamma, u, u, n, InterfaceDissipation::None) - fexact)
            .cwiseAbs()
            .maxCoeff() < 1e-13);

  // bounded random jumps: entropy production has the right sign
  std::uniform_real_distribution<Real> jump(0.5, 2.0);
  std::uniform_real_distribution<Real> vj(-0.5, 0.5);
  for (int t = 0; t < 1000; ++t) {
    const StateVec ul = random_state(gen, 3);
    Vec3 velr;
    for (int c = 0; c < 3; ++c) velr[c] = ul[1 + c] / ul[0] + vj(gen);
    const StateVec ur =
        make_state(3, ul[0] * jump(gen), velr, pressure(3, kGamma, ul) * jump(gen));
    const Vec3 nn = random_unit(gen, 3);
    const StateVec vl = entropy_vars(3, kGamma, ul);
    const StateVec vr = entropy_vars(3, kGamma, ur);
    Real dpsi = 0.0;
    for (int d = 0; d < 3; ++d) {
      dpsi += nn[d] * (entropy_potential(3, kGamma, ul, d) - entropy_potential(3, kGamma, ur, d));
    }
    // with n the outward normal of the L side and jumps L - R, dissipative
    // fluxes make this quantity non-negative; it vanishes for the EC flux
    const StateVec fec = es_interface_flux(3, kGamma, ul, ur, nn, InterfaceDissipation::None);
    const Real pec = (vl - vr).head(5).dot(fec.head(5)) - dpsi;
    CHECK(std::abs(pec) <= 1e-11 * (1.0 + std::abs(dpsi)));
    for (auto kind : {InterfaceDissipation::LaxFriedrichs, InterfaceDissipation::Roe}) {
      const StateVec f = es_interface_flux(3, kGamma, ul, ur, nn, kind);
      const Real prod = (vl - vr).head(5).dot(f.head(5)) - dpsi;
      CHECK(prod >= -1e-11 * (1.0 + std::abs(dpsi)));
    }
    const StateVec fr = rusanov_flux(3, kGamma, ul, ur, nn);
    CHECK((vl - vr).head(5).dot(fr.head(5)) - dpsi >= -1e-11 * (1.0 + std::abs(dpsi)));
  }
}

TEST_CASE("roe flux resolves an isolated supersonic contact exactly") {
  const Vec3 n(1, 0, 0);
  const StateVec ul = make_state(3, 1.0, Vec3(2.0, 0, 0), 1.0);
  const StateVec ur = make_state(3, 2.5, Vec3(2.0, 0, 0), 1.0);
  const StateVec f = roe_flux_harten(3, kGamma, ul, ur, n);
  const StateVec fex = euler_flux_normal(3, kGamma, ul, n);  // upwind side
  CHECK((f - fex).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("viscous flux: zero gradients, pure shear, pure dilatation") {
  GasModel gas;
  gas.mu = 0.7;
  const StateVec u = make_state(3, 1.2, Vec3(0.5, -0.3, 0.2), 2.0);
  Mat grad = Mat::Zero(3, 4);
  Mat fv;
  viscous_flux(3, gas, u, grad, fv);
  CHECK(fv.cwiseAbs().maxCoeff() == 0.0);

  // pure shear du1/dx2 = a
  const Real a = 0.9;
  grad.setZero();
  grad(1, 0) = a;
  viscous_flux(3, gas, u, grad, fv);
  CHECK(fv(1, 1) == doctest::Approx(gas.mu * a).epsilon(1e-14));
  CHECK(fv(0, 2) == doctest::Approx(gas.mu * a).epsilon(1e-14));
  CHECK(fv(0, 1) == doctest::Approx(0.0));
  CHECK(fv(1, 2) == doctest::Approx(0.0));
  CHECK(fv(2, 3) == doctest::Approx(0.0));

  // isotropic dilatation: deviatoric stress vanishes (Stokes hypothesis)
  grad.setZero();
  for (int c = 0; c < 3; ++c) grad(c, c) = a;
  viscous_flux(3, gas, u, grad, fv);
  Real trace = 0.0;
  for (int c = 0; c < 3; ++c) trace += fv(c, 1 + c);
  CHECK(std::abs(trace) < 1e-14);
  CHECK(std::abs(fv(0, 1)) < 1e-14);

  // heat conduction enters the energy row
  grad.setZero();
  grad(2, 3) = 1.5;  // dT/dx3
  viscous_flux(3, gas, u, grad, fv);
  CHECK(fv(2, 4) == doctest::Approx(gas.cp * gas.mu / gas.prandtl * 1.5).epsilon(1e-14));
}
