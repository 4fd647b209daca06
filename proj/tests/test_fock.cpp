#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include <unsupported/Eigen/KroneckerProduct>

#include "ioncav/fock.hpp"

using namespace ioncav;

namespace {

Mat random_matrix(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = cplx{d(rng), d(rng)};
  return m;
}

Mat random_hermitian(int n, std::mt19937_64& rng) {
  const Mat a = random_matrix(n, rng);
  return 0.5 * (a + a.adjoint());
}

}  // namespace

TEST_CASE("space layout: dims, strides, outer blocks") {
  const Space s({boson(3), boson(4), atom()});
  CHECK(s.dim() == 36);
  CHECK(s.num_factors() == 3);
  CHECK(s.stride(0) == 12);
  CHECK(s.stride(1) == 3);
  CHECK(s.stride(2) == 1);
  CHECK(s.outer(0) == 1);
  CHECK(s.outer(1) == 3);
  CHECK(s.outer(2) == 12);
  CHECK(s.factor(2).kind == Factor::Kind::atom);
  CHECK(s.factor(2).dim == 3);
  CHECK(s == Space({boson(3), boson(4), atom()}));
  CHECK(s != Space({boson(4), boson(3), atom()}));
}

TEST_CASE("embed matches the Kronecker-product oracle on every factor") {
  std::mt19937_64 rng(7);
  const Space s({boson(2), boson(3), boson(2)});
  const Mat i2 = Mat::Identity(2, 2);
  const Mat i3 = Mat::Identity(3, 3);

  const Mat l0 = random_matrix(2, rng);
  const Mat l1 = random_matrix(3, rng);
  const Mat l2 = random_matrix(2, rng);

  const Mat k0 = Eigen::kroneckerProduct(l0, Eigen::kroneckerProduct(i3, i2)).eval();
  const Mat k1 = Eigen::kroneckerProduct(i2, Eigen::kroneckerProduct(l1, i2)).eval();
  const Mat k2 = Eigen::kroneckerProduct(i2, Eigen::kroneckerProduct(i3, l2)).eval();

  CHECK(max_abs(embed(s, 0, l0).mat - k0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(max_abs(embed(s, 1, l1).mat - k1) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(max_abs(embed(s, 2, l2).mat - k2) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("ladder operators: matrix elements and truncated commutator") {
  const int n = 6;
  const Space s({boson(n)});
  const Mat a = ladder(s, 0, LadderKind::lowering).mat;
  const Mat ah = ladder(s, 0, LadderKind::raising).mat;

  for (int k = 1; k < n; ++k) {
    CHECK(a(k - 1, k).real() == doctest::Approx(std::sqrt(double(k))).epsilon(1e-15));
  }
  CHECK(max_abs(ah - a.adjoint()) == 0.0);
  CHECK(max_abs(number_op(s, 0).mat - ah * a) == doctest::Approx(0.0).epsilon(1e-14));

  // Exact truncated commutator: [a, a^dag] = I - n |n-1><n-1|.
  Mat expected = Mat::Identity(n, n);
  expected(n - 1, n - 1) = 1.0 - double(n);
  CHECK(max_abs(a * ah - ah * a - expected) == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("atomic projectors land on the documented level indices") {
  const Space s({boson(2), atom()});
  const Mat ge = atom_op(s, 1, Level::g, Level::e).mat;  // |g><e|
  // Flat index of (cavity n, level l) is n*3 + l; g=0, e=1.
  CHECK(ge(0 * 3 + 0, 0 * 3 + 1) == cplx{1.0, 0.0});
  CHECK(ge(1 * 3 + 0, 1 * 3 + 1) == cplx{1.0, 0.0});
  CHECK(ge.cwiseAbs().sum() == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("fock_state and product_state agree with direct indexing") {
  const Space s({boson(3), atom()});
  const State f = fock_state(s, {2, 1});  // |2> (x) |e>
  CHECK(f.amps(2 * 3 + 1) == cplx{1.0, 0.0});
  CHECK(norm(f) == doctest::Approx(1.0).epsilon(1e-15));

  Vec v0(3), v1(3);
  v0 << 0.6, 0.8, 0.0;
  v1 << 0.0, 1.0, 0.0;
  const State pr = product_state(s, {v0, v1});
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(std::abs(pr.amps(i * 3 + j) - v0(i) * v1(j)) < 1e-15);
}

TEST_CASE("coherent amplitudes, moments, and the truncation guard") {
  const cplx beta{0.4, -0.3};
  const int n = 24;
  const Vec c = coherent_amplitudes(n, beta);
  // Direct (renormalized) reference.
  Vec ref(n);
  double fact = 1.0;
  for (int m = 0; m < n; ++m) {
    if (m > 0) fact *= double(m);
    ref(m) = std::pow(beta, m) / std::sqrt(fact);
  }
  ref *= std::exp(-0.5 * std::norm(beta));
  ref /= ref.norm();
  CHECK((c - ref).cwiseAbs().maxCoeff() < 1e-12);

  const Space s({boson(n)});
  const State psi = coherent_state(s, 0, beta);
  const BosonMoments m = bosonic_moments(psi, 0);
  CHECK(std::abs(m.a - beta) < 1e-10);
  CHECK(std::abs(m.a2 - beta * beta) < 1e-10);
  CHECK(m.n == doctest::Approx(std::norm(beta)).epsilon(1e-10));

  CHECK_THROWS_AS((void)coherent_amplitudes(8, cplx{2.0, 0.0}),
                  TruncationError);
  // beta = 0 edge: pure vacuum, no NaNs.
  const Vec v = coherent_amplitudes(4, cplx{0.0, 0.0});
  CHECK(v(0) == cplx{1.0, 0.0});
  CHECK(v.tail(3).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("hermitian_matrix_function reproduces polynomial and unitary cases") {
  std::mt19937_64 rng(11);
  const Mat h = random_hermitian(7, rng);

  const Mat sq = hermitian_matrix_function(h, [](double w) { return cplx{w * w, 0.0}; });
  CHECK(max_abs(sq - h * h) < 1e-12 * std::max(1.0, max_abs(h * h)));

  const Mat u = hermitian_matrix_function(h, [](double w) { return std::polar(1.0, w); });
  CHECK(max_abs(u * u.adjoint() - Mat::Identity(7, 7)) < 1e-13);

  Mat broken = h;
  broken(0, 1) += cplx{0.0, 0.5};
  CHECK_THROWS_AS(require_hermitian(broken, "broken"), ContractViolation);
}

TEST_CASE("quadrature statistics: vacuum, coherent, Fock, and scan extrema") {
  const Space s({boson(16)});
  const State vac = fock_state(s, {0});
  CHECK(quadrature_variance(vac, 0, 0.0) == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(quadrature_variance(vac, 0, 1.1) == doctest::Approx(0.25).epsilon(1e-13));

  const State coh = coherent_state(s, 0, cplx{0.7, 0.2});
  CHECK(quadrature_variance(coh, 0, 0.4) == doctest::Approx(0.25).epsilon(1e-8));

  const State one = fock_state(s, {1});
  CHECK(quadrature_variance(one, 0, 0.0) == doctest::Approx(0.75).epsilon(1e-13));

  // Zero-mean Gaussian-like moments: var(theta) = (2 Re(a2 e^{-2 i theta})
  // + 2n + 1)/4, minimized where the a2 term is most negative.
  BosonMoments m;
  m.a = 0.0;
  m.a2 = std::polar(0.8, 0.9);
  m.n = 1.1;
  const QuadratureExtrema ex = scan_quadrature(m, 1e-4);
  CHECK(ex.var_min ==
        doctest::Approx(0.25 * (2.0 * m.n + 1.0 - 2.0 * 0.8)).epsilon(1e-6));
  CHECK(ex.var_max ==
        doctest::Approx(0.25 * (2.0 * m.n + 1.0 + 2.0 * 0.8)).epsilon(1e-6));
  const double theta_expect = std::fmod((0.9 + M_PI) / 2.0, M_PI);
  CHECK(std::abs(ex.theta_min - theta_expect) < 1e-3);
}

TEST_CASE("truncation pressure diagnostics") {
  const Space s({boson(40)});
  const State tame = coherent_state(s, 0, cplx{1.0, 0.0});
  CHECK(!truncation_warning(tame, 0).has_value());

  State hot = fock_state(s, {39});
  CHECK(truncation_warning(hot, 0).has_value());
}

TEST_CASE("expectation values against direct contractions") {
  std::mt19937_64 rng(3);
  const Space s({boson(5), atom()});
  const Mat h = random_hermitian(15, rng);
  Op op{s, h};
  State psi = fock_state(s, {1, 2});
  psi.amps = Vec::Zero(15);
  for (int i = 0; i < 15; ++i) psi.amps(i) = cplx{0.1 * i, 0.05 * (14 - i)};
  psi.amps /= psi.amps.norm();
  const cplx direct = psi.amps.dot(h * psi.amps);
  CHECK(std::abs(expectation(psi, op) - direct) < 1e-13);
}
