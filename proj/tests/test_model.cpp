#include <doctest.h>

#include <cmath>
#include <complex>

#include <unsupported/Eigen/KroneckerProduct>

#include "ioncav/dynamics.hpp"
#include "ioncav/fock.hpp"
#include "ioncav/model.hpp"

using namespace ioncav;

namespace {

constexpr double kPi = 3.14159265358979323846;

Mat kron2o(const Mat& a, const Mat& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

Mat kron3o(const Mat& a, const Mat& b, const Mat& c) {
  return Eigen::kroneckerProduct(a, kron2o(b, c)).eval();
}

Mat lower_local(int n) {
  Mat a = Mat::Zero(n, n);
  for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(double(k));
  return a;
}

Mat number_local(int n) {
  Mat m = Mat::Zero(n, n);
  for (int k = 0; k < n; ++k) m(k, k) = double(k);
  return m;
}

// Independent spectral evaluation of f(eta (b + b^dag) + varphi I).
Mat spectral_oracle(int n, double eta, double varphi,
                    const std::function<double(double)>& f) {
  const Mat q = eta * (lower_local(n) + lower_local(n).adjoint()) +
                varphi * Mat::Identity(n, n);
  Eigen::SelfAdjointEigenSolver<Mat> es(q);
  Eigen::VectorXd fw(n);
  for (int k = 0; k < n; ++k) fw(k) = f(es.eigenvalues()(k));
  return es.eigenvectors() * fw.asDiagonal().toDenseMatrix().cast<cplx>() *
         es.eigenvectors().adjoint();
}

SystemParams frame_params() {
  SystemParams p;
  p.omega = 200.0;
  p.nu = 5.0;
  p.delta = 2.0;
  p.Delta = 1.5;
  p.lambda1 = cplx{0.5, 0.0};
  p.lambda2 = cplx{0.35, 0.15};
  p.Omega_abs = 0.8;
  p.phi_drive = 0.3;
  p.eta = 0.15;
  p.eta_L = 0.05;
  p.varphi = 0.7;
  return p;
}

}  // namespace

TEST_CASE("vibrational matrix functions agree with an independent spectral oracle") {
  const int n = 9;
  const double eta = 0.17, varphi = 0.45;

  const Mat s = vib_sin_exact(n, eta, varphi);
  const Mat s_ref = spectral_oracle(n, eta, varphi,
                                    [](double x) { return std::sin(x); });
  CHECK(max_abs(s - s_ref) < 1e-13);

  const Mat s2 = vib_sin2_exact(n, eta, varphi);
  CHECK(max_abs(s2 - s * s) < 1e-12);

  // eta = 0 collapses to scalars.
  CHECK(max_abs(vib_sin_exact(n, 0.0, varphi) -
                std::sin(varphi) * Mat::Identity(n, n)) < 1e-14);

  const Mat q = lower_local(n) + lower_local(n).adjoint();
  CHECK(max_abs(vib_sin2_quadratic(n, eta) - eta * eta * q * q) < 1e-13);

  const Mat u = vib_drive_exp(n, 0.21);
  CHECK(max_abs(u * u.adjoint() - Mat::Identity(n, n)) < 1e-13);
  CHECK(max_abs(vib_drive_exp(n, 0.0) - Mat::Identity(n, n)) < 1e-14);
}

TEST_CASE("rotate_vib applies e^{+i nu (m - n) t} phases") {
  const int n = 5;
  const double nu = 3.0, t = 0.4;
  const Mat raise = lower_local(n).adjoint();
  const Mat rotated = rotate_vib(raise, nu, t);
  // b^dag has entries at (m+1, m): phase factor e^{+i nu t}.
  for (int m = 0; m + 1 < n; ++m) {
    CHECK(std::abs(rotated(m + 1, m) -
                   raise(m + 1, m) * std::polar(1.0, nu * t)) < 1e-14);
  }
  CHECK(max_abs(rotate_vib(raise, nu, 0.0) - raise) == 0.0);
  // Hermiticity is preserved.
  const Mat h = raise + raise.adjoint();
  const Mat hr = rotate_vib(h, nu, t);
  CHECK(max_abs(hr - hr.adjoint()) < 1e-14);
}

TEST_CASE("lab and interaction frames are unitarily equivalent up to "
          "counter-rotating corrections") {
  const SystemParams p = frame_params();
  const Space space = full_space(3, 3);
  const double t_final = 0.1;
  const std::vector<double> times = {0.0, 0.5 * t_final, t_final};

  State psi0 = fock_state(space, {0, 0, 2});  // vacuum, vacuum, |i>
  // Mix in some |g> weight so every atomic sector participates.
  State g0 = fock_state(space, {0, 0, 0});
  Vec start = (0.8 * psi0.amps + 0.6 * g0.amps);

  const auto lab_builder = [&](double t) {
    return build_full_hamiltonian(p, space, t, Frame::lab);
  };
  const auto int_builder = [&](double t) {
    return build_full_hamiltonian(p, space, t, Frame::interaction);
  };
  // The lab drive oscillates at 2(omega + delta); resolve it well.
  const std::vector<Vec> lab = evolve_timedep(lab_builder, start, times, 2e-5);
  const std::vector<Vec> inter =
      evolve_timedep(int_builder, start, times, 5e-4);

  // Free-evolution energies: omega n_c + nu n_v + (omega + delta) s_z.
  const auto free_energy = [&](int flat) {
    const int l = flat % 3;
    const int m = (flat / 3) % 3;
    const int n = flat / 9;
    const double sz = (l == 0) ? -1.0 : (l == 1) ? 1.0 : 0.0;
    return p.omega * n + p.nu * m + (p.omega + p.delta) * sz;
  };
  for (size_t k = 0; k < times.size(); ++k) {
    Vec mapped(lab[k].size());
    for (int i = 0; i < mapped.size(); ++i) {
      mapped(i) = std::polar(1.0, free_energy(i) * times[k]) * lab[k](i);
    }
    const double diff = (mapped - inter[k]).norm();
    CHECK(diff < 2e-2);  // counter-rotating scale ~ |lambda|/(2 omega)
  }
}

TEST_CASE("rotated-basis Hamiltonian equals the conjugated interaction form "
          "when the classical sideband factor is exact") {
  SystemParams p = frame_params();
  p.eta_L = 0.0;  // sideband factor is exactly 1
  const Space space = full_space(4, 3);
  const Mat r3 = dressed_rotation(p.phi_drive);
  CHECK(max_abs(r3 * r3.adjoint() - Mat::Identity(3, 3)) < 1e-14);
  const Mat u = kron2o(Mat::Identity(12, 12), r3);

  for (double t : {0.0, 0.37}) {
    const Mat hd = build_dressed_hamiltonian(p, space, t);
    const Mat hi = build_full_hamiltonian(p, space, t, Frame::interaction);
    const Mat conj = u * hi * u.adjoint();
    CHECK(max_abs(hd - conj) < 1e-11 * std::max(1.0, max_abs(hd)));
  }

  p.eta_L = 0.2;
  CHECK_THROWS_AS((void)build_dressed_hamiltonian(p, space, 0.0), RegimeError);
}

TEST_CASE("dressed rotation maps the bare basis onto {i, +, -}") {
  const double phi = 0.6;
  const Mat r = dressed_rotation(phi);
  Vec e = Vec::Zero(3), g = Vec::Zero(3), i = Vec::Zero(3);
  g(0) = 1.0;
  e(1) = 1.0;
  i(2) = 1.0;
  const Vec plus = (e + std::polar(1.0, phi) * g) / std::sqrt(2.0);
  // Row 1 of r (dressed +) applied to the bare |+> must give 1.
  CHECK(std::abs((r * plus)(1) - cplx{1.0, 0.0}) < 1e-14);
  CHECK(std::abs((r * i)(0) - cplx{1.0, 0.0}) < 1e-14);
  const Vec minus = (e - std::polar(1.0, phi) * g) / std::sqrt(2.0);
  CHECK(std::abs((r * minus)(2) - cplx{1.0, 0.0}) < 1e-14);
}

TEST_CASE("cavity squeezing form: matrix elements and preconditions") {
  SystemParams p;
  p.varphi = kPi / 2.0;
  p.eta = 0.1;
  EffectiveParams eff;
  eff.omega_ii = 4.0;
  eff.xi_ii = cplx{0.3, -0.2};
  p.delta = eff.omega_ii;

  const int nc = 6;
  const Space s = cavity_space(nc);
  const Mat h = build_engineered(p, eff, Engineered::squeeze_cavity, s, 0.0);
  const Mat r2 = [&] {
    Mat r = lower_local(nc).adjoint();
    return Mat(r * r);
  }();
  const Mat ref = eff.xi_ii * r2 + std::conj(eff.xi_ii) * Mat(r2.adjoint());
  CHECK(max_abs(h - ref) < 1e-14);

  SystemParams bad_phase = p;
  bad_phase.varphi = 0.3;
  CHECK_THROWS_AS(
      (void)build_engineered(bad_phase, eff, Engineered::squeeze_cavity, s, 0.0),
      RegimeError);
  SystemParams bad_delta = p;
  bad_delta.delta = 0.5 * eff.omega_ii;
  CHECK_THROWS_AS(
      (void)build_engineered(bad_delta, eff, Engineered::squeeze_cavity, s, 0.0),
      RegimeError);
}

TEST_CASE("pair-creation and pair-exchange forms match Kronecker oracles") {
  SystemParams p;
  p.nu = 7.0;
  p.eta = 0.1;
  p.varphi = 0.0;
  EffectiveParams eff;
  eff.omega_ii = 4.0;
  eff.chi_ii = 1.2;
  eff.xi_ii = cplx{0.3, -0.2};
  const double eta2 = p.eta * p.eta;
  const double phi_freq = p.nu + 2.0 * eta2 * eff.chi_ii;
  CHECK(node_frame_frequency(p, eff) == doctest::Approx(phi_freq).epsilon(1e-15));

  const int nc = 4, nv = 3;
  const Space s = node_space(nc, nv);
  const Mat nc_op = number_local(nc);
  const Mat r2 = Mat(lower_local(nc).adjoint() * lower_local(nc).adjoint());
  const Mat vr2 = Mat(lower_local(nv).adjoint() * lower_local(nv).adjoint());
  const Mat two_nv_1 = Mat(2.0 * number_local(nv) + Mat::Identity(nv, nv));

  {
    SystemParams q = p;
    q.delta = phi_freq;
    const Mat h = build_engineered(q, eff, Engineered::two_mode_pairs, s, 0.0);
    Mat pair = eta2 * eff.xi_ii * kron2o(r2, vr2);
    const Mat ref =
        eta2 * eff.omega_ii * kron2o(nc_op, two_nv_1) + pair + Mat(pair.adjoint());
    CHECK(max_abs(h - ref) < 1e-14);
    // wrong detuning sign refused
    q.delta = -phi_freq;
    CHECK_THROWS_AS((void)build_engineered(q, eff, Engineered::two_mode_pairs, s, 0.0),
                    RegimeError);
  }
  {
    SystemParams q = p;
    q.delta = -phi_freq;
    const Mat h = build_engineered(q, eff, Engineered::pair_exchange, s, 0.0);
    Mat pair = eta2 * eff.xi_ii * kron2o(r2, Mat(vr2.adjoint()));
    const Mat ref =
        eta2 * eff.omega_ii * kron2o(nc_op, two_nv_1) + pair + Mat(pair.adjoint());
    CHECK(max_abs(h - ref) < 1e-14);
  }
  {
    // node phase required
    SystemParams q = p;
    q.delta = phi_freq;
    q.varphi = 0.4;
    CHECK_THROWS_AS((void)build_engineered(q, eff, Engineered::two_mode_pairs, s, 0.0),
                    RegimeError);
  }
}

TEST_CASE("node squeezing, cross-Kerr, and the blockwise parametric form") {
  SystemParams p;
  p.nu = 50.0;
  p.eta = 0.12;
  p.varphi = 0.0;
  EffectiveParams eff;
  eff.omega_ii = 4.0;
  eff.chi_ii = 1.2;
  eff.xi_ii = cplx{0.3, -0.2};
  const double eta2 = p.eta * p.eta;
  p.delta = 0.9;  // |delta| << Phi ~ 50

  const int nc = 5, nv = 4;
  const Space s = node_space(nc, nv);

  {
    const double t = 0.23;
    const Mat h = build_engineered(p, eff, Engineered::node_squeeze, s, t);
    const Mat r2 = Mat(lower_local(nc).adjoint() * lower_local(nc).adjoint());
    const cplx ph = eff.xi_ii * std::polar(1.0, -2.0 * p.delta * t);
    const Mat cav = eff.omega_ii * number_local(nc) + ph * r2 +
                    std::conj(ph) * Mat(r2.adjoint());
    const Mat two_nv_1 =
        Mat(2.0 * number_local(nv) + Mat::Identity(nv, nv));
    CHECK(max_abs(h - kron2o(cav, Mat(eta2 * two_nv_1))) < 1e-14);

    SystemParams big_delta = p;
    big_delta.delta = 20.0;
    CHECK_THROWS_AS(
        (void)build_engineered(big_delta, eff, Engineered::node_squeeze, s, t),
        RegimeError);
  }
  {
    const Mat h = build_engineered(p, eff, Engineered::cross_kerr, s, 0.0);
    const Mat ref = eta2 * eff.omega_ii *
                    kron2o(number_local(nc),
                           Mat(2.0 * number_local(nv) + Mat::Identity(nv, nv)));
    CHECK(max_abs(h - ref) < 1e-14);
    EffectiveParams loud = eff;
    loud.xi_ii = cplx{1.0, 0.0};  // |xi| > |omega_ii|/10
    CHECK_THROWS_AS((void)build_engineered(p, loud, Engineered::cross_kerr, s, 0.0),
                    RegimeError);
  }
  {
    const Mat h = build_engineered(p, eff, Engineered::node_full, s, 0.31);
    CHECK(max_abs(h - h.adjoint()) < 1e-13);
  }
  {
    const Mat h = build_engineered(p, eff, Engineered::parametric_blocks, s, 0.0);
    // Block-diagonal across the vibrational index; block m is
    // Xi(m) a^dag a + (Gamma(m) (a^dag)^2 + h.c.)/2.
    for (int n = 0; n < nc; ++n) {
      for (int m = 0; m < nv; ++m) {
        for (int n2 = 0; n2 < nc; ++n2) {
          for (int m2 = 0; m2 < nv; ++m2) {
            const cplx v = h(n * nv + m, n2 * nv + m2);
            if (m != m2) {
              CHECK(std::abs(v) == 0.0);
              continue;
            }
            cplx want{0.0, 0.0};
            if (n == n2) want = block_xi(p, eff, m) * double(n);
            if (n == n2 + 2)
              want = 0.5 * block_gamma(p, eff, m) *
                     std::sqrt(double(n2 + 1) * double(n2 + 2));
            if (n2 == n + 2)
              want = 0.5 * std::conj(block_gamma(p, eff, m)) *
                     std::sqrt(double(n + 1) * double(n + 2));
            CHECK(std::abs(v - want) < 1e-13);
          }
        }
      }
    }
  }
}

TEST_CASE("resonance detuning nulls the block coefficient exactly") {
  SystemParams p;
  p.eta = 0.1;
  EffectiveParams eff;
  eff.omega_ii = 6.0e4;
  for (int m : {0, 1, 5, 17}) {
    SystemParams q = p;
    q.delta = resonance_delta(p, eff, m);
    CHECK(block_xi(q, eff, m) == 0.0);
  }
}

TEST_CASE("semiclassical cavity form requires the matched detuning") {
  SystemParams p;
  p.eta = 0.1;
  EffectiveParams eff;
  eff.omega_ii = 2.0;
  eff.xi_ii = cplx{0.0, -1.0};
  const cplx beta{3.0, 0.0};
  const double b2 = std::norm(beta);
  p.delta = 2.0 * p.eta * p.eta * b2 * eff.omega_ii;

  const int nc = 5;
  const Mat h = semiclassical_hamiltonian(p, eff, beta, cavity_space(nc));
  const Mat r2 = Mat(lower_local(nc).adjoint() * lower_local(nc).adjoint());
  const cplx coef = 2.0 * p.eta * p.eta * b2 * eff.xi_ii;
  const Mat ref = coef * r2 + std::conj(coef) * Mat(r2.adjoint());
  CHECK(max_abs(h - ref) < 1e-14);

  SystemParams bad = p;
  bad.delta *= 1.5;
  CHECK_THROWS_AS((void)semiclassical_hamiltonian(bad, eff, beta, cavity_space(nc)),
                  RegimeError);
}

TEST_CASE("parameter validation: hard guards and soft warnings") {
  SystemParams p;
  CHECK(validate(p).empty());

  p.eta = 0.25;
  CHECK(!validate(p).empty());

  p.eta = 0.35;
  CHECK_THROWS_AS((void)validate(p), RegimeError);

  SystemParams q;
  q.Omega_abs = -1.0;
  CHECK_THROWS_AS((void)validate(q), RegimeError);
}

TEST_CASE("engineered-form names round-trip") {
  for (auto which :
       {Engineered::squeeze_cavity, Engineered::two_mode_pairs,
        Engineered::pair_exchange, Engineered::node_squeeze,
        Engineered::cross_kerr, Engineered::node_full,
        Engineered::parametric_blocks}) {
    CHECK(engineered_from_string(to_string(which)) == which);
  }
  CHECK_THROWS_AS((void)engineered_from_string("squeze"), ConfigError);
}
