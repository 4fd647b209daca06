// Throughput comparison of the serial reference kernels against the OpenMP
// paths. Each kernel runs on identical inputs in both modes; the outputs are
// bit-identical by construction (the unit tests assert that), so this tool
// only reports timing.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "ioncav/kernels.hpp"

namespace {

using ioncav::kern::cplx;
using ioncav::kern::Exec;
using ioncav::kern::Mat;
using ioncav::kern::MatRM;
using ioncav::kern::Vec;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

template <typename F>
double time_best_of(int reps, F&& body) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    body();
    best = std::min(best, seconds_since(t0));
  }
  return best;
}

void report(const char* name, double serial_s, double parallel_s) {
  std::printf("%-18s %12.6f s %12.6f s %8.2fx\n", name, serial_s, parallel_s,
              serial_s / parallel_s);
}

}  // namespace

int main() {
  std::printf("kernel throughput: serial reference vs OpenMP (%d threads)\n",
              ioncav::kern::max_threads());
  std::printf("%-18s %14s %14s %9s\n", "kernel", "serial", "parallel",
              "speedup");

  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const auto rnd = [&] { return cplx{dist(rng), dist(rng)}; };

  {  // gemv: one dense complex matrix-vector product
    const int n = 2000;
    MatRM h(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) h(i, j) = rnd();
    Vec x(n), y(n);
    for (int i = 0; i < n; ++i) x(i) = rnd();
    const double ts = time_best_of(
        5, [&] { ioncav::kern::gemv(h, x, y, Exec::serial); });
    const double tp = time_best_of(
        5, [&] { ioncav::kern::gemv(h, x, y, Exec::parallel); });
    report("gemv", ts, tp);
  }

  {  // embed_factor: local operator embedded into a tensor-product space
    const int local_dim = 48, outer = 12, inner = 12;
    Mat local(local_dim, local_dim);
    for (int i = 0; i < local_dim; ++i)
      for (int j = 0; j < local_dim; ++j) local(i, j) = rnd();
    const int dim = outer * local_dim * inner;
    Mat out = Mat::Zero(dim, dim);
    const double ts = time_best_of(3, [&] {
      ioncav::kern::embed_factor(local, outer, inner, out, Exec::serial);
    });
    const double tp = time_best_of(3, [&] {
      ioncav::kern::embed_factor(local, outer, inner, out, Exec::parallel);
    });
    report("embed_factor", ts, tp);
  }

  {  // propagate_times: spectral propagation to many sample times
    const int n = 600;
    Mat q(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) q(i, j) = rnd();
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) w(i) = dist(rng);
    Vec c0(n);
    for (int i = 0; i < n; ++i) c0(i) = rnd();
    std::vector<double> times(256);
    for (size_t k = 0; k < times.size(); ++k)
      times[k] = 1e-3 * static_cast<double>(k);
    Mat out(n, static_cast<int>(times.size()));
    const double ts = time_best_of(3, [&] {
      ioncav::kern::propagate_times(q, w, c0, times, out, Exec::serial);
    });
    const double tp = time_best_of(3, [&] {
      ioncav::kern::propagate_times(q, w, c0, times, out, Exec::parallel);
    });
    report("propagate_times", ts, tp);
  }

  {  // block_spectra: many independent Hermitian eigendecompositions
    const int blocks = 64, n = 96;
    std::vector<Mat> hs(blocks);
    for (Mat& h : hs) {
      Mat a(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = rnd();
      h = 0.5 * (a + a.adjoint());
    }
    const double ts = time_best_of(
        3, [&] { (void)ioncav::kern::block_spectra(hs, Exec::serial); });
    const double tp = time_best_of(
        3, [&] { (void)ioncav::kern::block_spectra(hs, Exec::parallel); });
    report("block_spectra", ts, tp);
  }

  return 0;
}
