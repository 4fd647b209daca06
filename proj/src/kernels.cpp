#include "ioncav/kernels.hpp"

#include <atomic>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ioncav::kern {

namespace {
std::atomic<Exec> g_mode{Exec::parallel};
}

void set_exec_mode(Exec mode) { g_mode.store(mode); }
Exec exec_mode() { return g_mode.load(); }

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void gemv(const MatRM& H, const Vec& x, Vec& y, Exec mode) {
  const Eigen::Index n = H.rows();
  y.resize(n);
  if (mode == Exec::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (Eigen::Index r = 0; r < n; ++r) y(r) = (H.row(r) * x)(0);
  } else {
    for (Eigen::Index r = 0; r < n; ++r) y(r) = (H.row(r) * x)(0);
  }
}

void embed_factor(const Mat& local, int outer, int inner, Mat& out, Exec mode) {
  const int n = static_cast<int>(local.rows());
  auto fill_one = [&](int o) {
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        const cplx v = local(r, c);
        if (v == cplx{0.0, 0.0}) continue;
        const Eigen::Index row0 = static_cast<Eigen::Index>(o * n + r) * inner;
        const Eigen::Index col0 = static_cast<Eigen::Index>(o * n + c) * inner;
        for (int k = 0; k < inner; ++k) out(row0 + k, col0 + k) = v;
      }
    }
  };
  if (mode == Exec::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int o = 0; o < outer; ++o) fill_one(o);
  } else {
    for (int o = 0; o < outer; ++o) fill_one(o);
  }
}

void propagate_times(const Mat& Q, const Eigen::VectorXd& w, const Vec& c0,
                     const std::vector<double>& times, Mat& out, Exec mode) {
  const Eigen::Index n = Q.rows();
  const Eigen::Index nt = static_cast<Eigen::Index>(times.size());
  out.resize(n, nt);
  auto one_time = [&](Eigen::Index j) {
    const double t = times[static_cast<size_t>(j)];
    Vec phased(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      phased(k) = std::polar(1.0, -w(k) * t) * c0(k);
    }
    out.col(j) = Q * phased;
  };
  if (mode == Exec::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (Eigen::Index j = 0; j < nt; ++j) one_time(j);
  } else {
    for (Eigen::Index j = 0; j < nt; ++j) one_time(j);
  }
}

std::vector<Spectrum> block_spectra(const std::vector<Mat>& blocks, Exec mode) {
  const int nb = static_cast<int>(blocks.size());
  std::vector<Spectrum> out(static_cast<size_t>(nb));
  auto one_block = [&](int b) {
    Eigen::SelfAdjointEigenSolver<Mat> es(blocks[static_cast<size_t>(b)]);
    out[static_cast<size_t>(b)] = Spectrum{es.eigenvalues(), es.eigenvectors()};
  };
  if (mode == Exec::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int b = 0; b < nb; ++b) one_block(b);
  } else {
    for (int b = 0; b < nb; ++b) one_block(b);
  }
  return out;
}

void gemv(const MatRM& H, const Vec& x, Vec& y) { gemv(H, x, y, exec_mode()); }
void embed_factor(const Mat& local, int outer, int inner, Mat& out) {
  embed_factor(local, outer, inner, out, exec_mode());
}
void propagate_times(const Mat& Q, const Eigen::VectorXd& w, const Vec& c0,
                     const std::vector<double>& times, Mat& out) {
  propagate_times(Q, w, c0, times, out, exec_mode());
}
std::vector<Spectrum> block_spectra(const std::vector<Mat>& blocks) {
  return block_spectra(blocks, exec_mode());
}

}  // namespace ioncav::kern
