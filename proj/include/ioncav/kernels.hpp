#pragma once

// Data-parallel inner kernels, each with a serial reference path and an
// OpenMP path selectable at runtime. Both paths perform identical per-element
// arithmetic (map-style parallelism, no cross-thread reductions), so their
// outputs are bit-identical; the unit tests assert that and tools/bench.cpp
// compares throughput.

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace ioncav::kern {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
// Row-major storage so the per-row dot products of gemv touch contiguous memory.
using MatRM = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Exec { serial, parallel };

void set_exec_mode(Exec mode);
Exec exec_mode();
int max_threads();

// y = H x, one independent dot product per row.
void gemv(const MatRM& H, const Vec& x, Vec& y, Exec mode);

// Writes a local operator acting on one tensor factor into `out` (which must
// be pre-sized dim x dim and zeroed): for every outer index o in [0, outer),
// local row r, local column c, and inner index v in [0, inner),
//   out[(o*N + r)*inner + v, (o*N + c)*inner + v] = local(r, c),
// where N = local.rows(). Independent writes per (o, r, c) triple.
void embed_factor(const Mat& local, int outer, int inner, Mat& out, Exec mode);

// Batched spectral propagation: column j of `out` becomes
// Q * (exp(-i w t_j) .* c0). Columns are independent.
void propagate_times(const Mat& Q, const Eigen::VectorXd& w, const Vec& c0,
                     const std::vector<double>& times, Mat& out, Exec mode);

// Eigendecompositions of many independent Hermitian blocks.
struct Spectrum {
  Eigen::VectorXd w;
  Mat Q;
};
std::vector<Spectrum> block_spectra(const std::vector<Mat>& blocks, Exec mode);

// Convenience overloads using the process-wide mode.
void gemv(const MatRM& H, const Vec& x, Vec& y);
void embed_factor(const Mat& local, int outer, int inner, Mat& out);
void propagate_times(const Mat& Q, const Eigen::VectorXd& w, const Vec& c0,
                     const std::vector<double>& times, Mat& out);
std::vector<Spectrum> block_spectra(const std::vector<Mat>& blocks);

}  // namespace ioncav::kern
