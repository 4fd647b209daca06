#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "ioncav/dynamics.hpp"
#include "ioncav/fock.hpp"
#include "ioncav/model.hpp"

using namespace ioncav;

namespace {

// Independent reference for the coefficient flow
//   f' = -i Xi f + Gamma g*,  g' = -i Xi g + Gamma f*,
// integrated with classic RK4 at a step small against 1/max(|Xi|,|Gamma|).
void rk4_reference(double Xi, cplx Gamma, double t, cplx& f, cplx& g) {
  f = cplx{1.0, 0.0};
  g = cplx{0.0, 0.0};
  const double scale = std::max({std::abs(Xi), std::abs(Gamma), 1e-12});
  const int steps = std::max(2000, int(std::ceil(2000.0 * scale * t)));
  const double h = t / steps;
  const auto rhs = [&](cplx fc, cplx gc, cplx& df, cplx& dg) {
    df = -kImag * Xi * fc + Gamma * std::conj(gc);
    dg = -kImag * Xi * gc + Gamma * std::conj(fc);
  };
  for (int s = 0; s < steps; ++s) {
    cplx k1f, k1g, k2f, k2g, k3f, k3g, k4f, k4g;
    rhs(f, g, k1f, k1g);
    rhs(f + 0.5 * h * k1f, g + 0.5 * h * k1g, k2f, k2g);
    rhs(f + 0.5 * h * k2f, g + 0.5 * h * k2g, k3f, k3g);
    rhs(f + h * k3f, g + h * k3g, k4f, k4g);
    f += (h / 6.0) * (k1f + 2.0 * k2f + 2.0 * k3f + k4f);
    g += (h / 6.0) * (k1g + 2.0 * k2g + 2.0 * k3g + k4g);
  }
}

Mat parametric_matrix(double Xi, cplx Gamma, int n) {
  Mat h = Mat::Zero(n, n);
  for (int k = 0; k < n; ++k) h(k, k) = Xi * double(k);
  for (int k = 0; k + 2 < n; ++k) {
    const double s = std::sqrt(double(k + 1) * double(k + 2));
    h(k + 2, k) += 0.5 * Gamma * s;
    h(k, k + 2) += 0.5 * std::conj(Gamma) * s;
  }
  return h;
}

}  // namespace

TEST_CASE("closed-form coefficients match an RK4 integration in all branches") {
  struct Case {
    double Xi;
    cplx Gamma;
  };
  const std::vector<Case> cases = {
      {3.0, cplx{1.2, 0.7}},                    // subcritical
      {1.0, cplx{2.0, -1.5}},                   // supercritical
      {2.5, std::polar(2.5, 0.8)},              // critical
      {0.0, cplx{1.4, -0.9}},                   // resonant
      {-2.0, cplx{0.5, 0.3}},                   // negative Xi, subcritical
  };
  for (const Case& c : cases) {
    const double scale = std::max(std::abs(c.Xi), std::abs(c.Gamma));
    for (double t : {0.1 / scale, 0.7 / scale, 1.9 / scale}) {
      const BogoliubovCoefficients bc = bogoliubov(c.Xi, c.Gamma, t);
      cplx f_ref, g_ref;
      rk4_reference(c.Xi, c.Gamma, t, f_ref, g_ref);
      CHECK(std::abs(bc.f - f_ref) < 1e-8 * std::max(1.0, std::abs(f_ref)));
      CHECK(std::abs(bc.g - g_ref) < 1e-8 * std::max(1.0, std::abs(f_ref)));
      CHECK(std::norm(bc.f) - std::norm(bc.g) ==
            doctest::Approx(1.0).epsilon(1e-11));
    }
  }
}

TEST_CASE("branch classification and continuity across the critical line") {
  CHECK(classify_branch(3.0, cplx{1.0, 0.0}) == Branch::subcritical);
  CHECK(classify_branch(1.0, cplx{3.0, 0.0}) == Branch::supercritical);
  CHECK(classify_branch(2.0, std::polar(2.0, 1.1)) == Branch::critical);
  CHECK(classify_branch(0.0, cplx{1.0, 0.0}) == Branch::resonant);
  // Xi tiny against the supplied scale counts as resonant.
  CHECK(classify_branch(1e-14, cplx{1.0, 0.0}, 1.0) == Branch::resonant);

  CHECK(regime_code(Branch::subcritical) == 0);
  CHECK(regime_code(Branch::critical) == 1);
  CHECK(regime_code(Branch::supercritical) == 2);
  CHECK(regime_code(Branch::resonant) == 3);

  // Offsets of 1e-7 land just outside the critical-branch snap tolerance,
  // so these evaluations really use the sub/supercritical formulas.
  const cplx gamma = std::polar(2.0, 0.6);
  const double t = 0.8;
  const BogoliubovCoefficients crit = bogoliubov(2.0, gamma, t);
  CHECK(classify_branch(2.0 * (1.0 + 1e-7), gamma) == Branch::subcritical);
  CHECK(classify_branch(2.0 * (1.0 - 1e-7), gamma) == Branch::supercritical);
  for (double xi : {2.0 * (1.0 + 1e-7), 2.0 * (1.0 - 1e-7)}) {
    const BogoliubovCoefficients nearby = bogoliubov(xi, gamma, t);
    CHECK(std::abs(nearby.f - crit.f) < 1e-6);
    CHECK(std::abs(nearby.g - crit.g) < 1e-6);
  }
}

TEST_CASE("vacuum moments from the coefficients match a full propagation") {
  const double Xi = 3.0;
  const cplx Gamma{1.5, 0.8};
  const int n = 40;
  const Mat h = parametric_matrix(Xi, Gamma, n);
  const Space s = cavity_space(n);
  const State vac = fock_state(s, {0});
  const std::vector<double> times = {0.0, 0.2, 0.5, 0.9};
  const std::vector<Vec> traj = evolve_static(h, vac.amps, times);

  for (size_t k = 0; k < times.size(); ++k) {
    const BogoliubovCoefficients bc = bogoliubov(Xi, Gamma, times[k]);
    const BosonMoments ref = bogoliubov_vacuum_moments(bc);
    State psi{s, traj[k], {}};
    const BosonMoments got = bosonic_moments(psi, 0);
    CHECK(std::abs(got.a - ref.a) < 1e-9);
    CHECK(std::abs(got.a2 - ref.a2) < 1e-8 * std::max(1.0, std::abs(ref.a2)));
    CHECK(std::abs(got.n - ref.n) < 1e-8 * std::max(1.0, ref.n));
    // <a^2> = -i f g and <n> = |g|^2 by construction.
    CHECK(std::abs(ref.a2 - (-kImag * bc.f * bc.g)) == 0.0);
    CHECK(ref.n == doctest::Approx(std::norm(bc.g)).epsilon(1e-15));
  }
}

TEST_CASE("static evolution: norm, spectral correctness, applier equivalence") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  const int n = 12;
  Mat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = cplx{d(rng), d(rng)};
  const Mat h = 0.5 * (a + a.adjoint());

  Vec psi0(n);
  for (int i = 0; i < n; ++i) psi0(i) = cplx{d(rng), d(rng)};
  psi0 /= psi0.norm();

  const std::vector<double> times = {0.0, 0.4, 1.3};
  const std::vector<Vec> traj = evolve_static(h, psi0, times);

  // Independent exponential via the test's own eigendecomposition.
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  for (size_t k = 0; k < times.size(); ++k) {
    Vec ph(n);
    for (int i = 0; i < n; ++i)
      ph(i) = std::polar(1.0, -es.eigenvalues()(i) * times[k]);
    const Vec ref = es.eigenvectors() *
                    ph.asDiagonal().toDenseMatrix() *
                    es.eigenvectors().adjoint() * psi0;
    CHECK((traj[k] - ref).cwiseAbs().maxCoeff() < 1e-11);
    CHECK(std::abs(traj[k].norm() - 1.0) < 1e-12);
  }

  // The matrix-free engine reproduces the static result.
  const HApplier apply = [&](double, const Vec& in, Vec& out) {
    out.noalias() = h * in;
  };
  const double bound = max_abs(h) * n;  // crude but valid upper bound
  const std::vector<Vec> traj2 =
      evolve_applier(apply, bound, psi0, times, 0.01 / bound);
  for (size_t k = 0; k < times.size(); ++k) {
    CHECK((traj2[k] - traj[k]).cwiseAbs().maxCoeff() < 1e-9);
  }

  CHECK_THROWS_AS(
      (void)evolve_applier(apply, bound, psi0, times, 1.0 / bound),
      StepGuardError);
}

TEST_CASE("time-dependent engine against a fine RK4 reference") {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  const int n = 4;
  Mat a(n, n), b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      a(i, j) = cplx{d(rng), d(rng)};
      b(i, j) = cplx{d(rng), d(rng)};
    }
  const Mat h0 = 0.5 * (a + a.adjoint());
  const Mat h1 = 0.5 * (b + b.adjoint());
  const auto h_of_t = [&](double t) { return Mat(h0 + std::sin(3.0 * t) * h1); };

  Vec psi0(n);
  for (int i = 0; i < n; ++i) psi0(i) = cplx{d(rng), d(rng)};
  psi0 /= psi0.norm();

  const std::vector<double> times = {0.0, 0.6, 1.1};
  const std::vector<Vec> got = evolve_timedep(h_of_t, psi0, times, 5e-4);

  // RK4 on i d psi/dt = H(t) psi with a much finer step.
  Vec psi = psi0;
  const double h_step = 2e-5;
  double t = 0.0;
  size_t next = 0;
  std::vector<Vec> ref;
  const auto rhs = [&](double tt, const Vec& v) {
    return Vec(-kImag * (h_of_t(tt) * v));
  };
  while (next < times.size()) {
    while (t + h_step / 2.0 < times[next]) {
      const Vec k1 = rhs(t, psi);
      const Vec k2 = rhs(t + h_step / 2.0, psi + 0.5 * h_step * k1);
      const Vec k3 = rhs(t + h_step / 2.0, psi + 0.5 * h_step * k2);
      const Vec k4 = rhs(t + h_step, psi + h_step * k3);
      psi += (h_step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t += h_step;
    }
    ref.push_back(psi);
    ++next;
  }
  for (size_t k = 0; k < times.size(); ++k) {
    CHECK((got[k] - ref[k]).cwiseAbs().maxCoeff() < 5e-6);
  }
}

TEST_CASE("per-block classification ties the coefficients to the map") {
  SystemParams p;
  p.eta = 0.1;
  p.delta = 0.0;
  EffectiveParams eff;
  eff.omega_ii = 5.0e4;
  eff.xi_ii = cplx{4.0e3, 2.0e3};

  for (int m : {0, 1, 2, 7}) {
    const RegimeReport r = classify(m, eff, p);
    CHECK(r.Xi == block_xi(p, eff, m));
    CHECK(r.Gamma == block_gamma(p, eff, m));
    CHECK(!r.resonant);
    CHECK(std::abs(r.F - r.Gamma / r.Xi) < 1e-15 * std::abs(r.F));
  }

  SystemParams q = p;
  q.delta = resonance_delta(p, eff, 3);
  const RegimeReport r3 = classify(3, eff, q);
  CHECK(r3.resonant);
  CHECK(r3.classification == Branch::resonant);
  CHECK(r3.F == cplx{0.0, 0.0});

  CHECK_THROWS_AS((void)classify(-1, eff, p), SignatureError);
}
