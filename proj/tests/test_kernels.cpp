#include <doctest.h>

#include <cstring>
#include <random>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>

#include "ioncav/kernels.hpp"

using ioncav::kern::cplx;
using ioncav::kern::Exec;
using ioncav::kern::Mat;
using ioncav::kern::MatRM;
using ioncav::kern::Vec;

namespace {

bool bitwise_equal(const Vec& a, const Vec& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), sizeof(cplx) * a.size()) == 0;
}

bool bitwise_equal(const Mat& a, const Mat& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(cplx) * a.size()) == 0;
}

Mat random_matrix(int r, int c, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = cplx{d(rng), d(rng)};
  return m;
}

}  // namespace

TEST_CASE("gemv: parallel path is bit-identical to serial and matches Eigen") {
  std::mt19937_64 rng(21);
  const int n = 173;  // deliberately not a multiple of typical chunk sizes
  MatRM h = random_matrix(n, n, rng);
  Vec x = random_matrix(n, 1, rng).col(0);

  Vec ys(n), yp(n);
  ioncav::kern::gemv(h, x, ys, Exec::serial);
  ioncav::kern::gemv(h, x, yp, Exec::parallel);
  CHECK(bitwise_equal(ys, yp));

  const Vec ref = Mat(h) * x;
  CHECK((ys - ref).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("embed_factor: matches the Kronecker oracle, serial == parallel") {
  std::mt19937_64 rng(22);
  const int local_dim = 4, outer = 3, inner = 5;
  const Mat local = random_matrix(local_dim, local_dim, rng);
  const int dim = outer * local_dim * inner;

  Mat out_s = Mat::Zero(dim, dim);
  Mat out_p = Mat::Zero(dim, dim);
  ioncav::kern::embed_factor(local, outer, inner, out_s, Exec::serial);
  ioncav::kern::embed_factor(local, outer, inner, out_p, Exec::parallel);
  CHECK(bitwise_equal(out_s, out_p));

  const Mat ref = Eigen::kroneckerProduct(
                      Mat::Identity(outer, outer),
                      Eigen::kroneckerProduct(local, Mat::Identity(inner, inner))
                          .eval())
                      .eval();
  CHECK((out_s - ref).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("propagate_times: column oracle and serial/parallel identity") {
  std::mt19937_64 rng(23);
  const int n = 37;
  const Mat q = random_matrix(n, n, rng);
  Eigen::VectorXd w(n);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  for (int i = 0; i < n; ++i) w(i) = d(rng);
  const Vec c0 = random_matrix(n, 1, rng).col(0);
  const std::vector<double> times = {0.0, 0.3, 1.7, 4.1};

  Mat out_s(n, 4), out_p(n, 4);
  ioncav::kern::propagate_times(q, w, c0, times, out_s, Exec::serial);
  ioncav::kern::propagate_times(q, w, c0, times, out_p, Exec::parallel);
  CHECK(bitwise_equal(out_s, out_p));

  for (size_t j = 0; j < times.size(); ++j) {
    Vec phased(n);
    for (int i = 0; i < n; ++i)
      phased(i) = std::polar(1.0, -w(i) * times[j]) * c0(i);
    const Vec ref = q * phased;
    CHECK((out_s.col(static_cast<int>(j)) - ref).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("block_spectra: reconstructs each block, serial == parallel") {
  std::mt19937_64 rng(24);
  std::vector<Mat> blocks;
  for (int b = 0; b < 6; ++b) {
    const Mat a = random_matrix(9 + b, 9 + b, rng);
    blocks.push_back(0.5 * (a + a.adjoint()));
  }
  const auto spec_s = ioncav::kern::block_spectra(blocks, Exec::serial);
  const auto spec_p = ioncav::kern::block_spectra(blocks, Exec::parallel);
  REQUIRE(spec_s.size() == blocks.size());
  REQUIRE(spec_p.size() == blocks.size());
  for (size_t b = 0; b < blocks.size(); ++b) {
    CHECK(bitwise_equal(spec_s[b].Q, spec_p[b].Q));
    CHECK(std::memcmp(spec_s[b].w.data(), spec_p[b].w.data(),
                      sizeof(double) * spec_s[b].w.size()) == 0);
    const Mat rec = spec_s[b].Q * spec_s[b].w.asDiagonal().toDenseMatrix().cast<cplx>() *
                    spec_s[b].Q.adjoint();
    CHECK((rec - blocks[b]).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("process-wide execution mode round-trips") {
  const Exec before = ioncav::kern::exec_mode();
  ioncav::kern::set_exec_mode(Exec::serial);
  CHECK(ioncav::kern::exec_mode() == Exec::serial);
  ioncav::kern::set_exec_mode(Exec::parallel);
  CHECK(ioncav::kern::exec_mode() == Exec::parallel);
  ioncav::kern::set_exec_mode(before);
  CHECK(ioncav::kern::max_threads() >= 1);
}
