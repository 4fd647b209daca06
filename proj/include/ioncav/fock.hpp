#pragma once

// Truncated-Fock-space operator algebra on labeled tensor-product spaces:
// ladder operators, atomic projectors, Hermitian matrix functions,
// coherent/Fock states, expectation values, and quadrature statistics.
//
// Index layout: factor 0 is slowest, the last factor fastest. For factors of
// dimensions (d0, d1, d2) the flat index of (i0, i1, i2) is
// (i0*d1 + i1)*d2 + i2.

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ioncav/errors.hpp"

namespace ioncav {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr cplx kImag{0.0, 1.0};

// ---------------------------------------------------------------------------
// Spaces

struct Factor {
  enum class Kind { boson, atom };
  Kind kind;
  int dim;
};

// Bosonic mode truncated to n_levels Fock states |0..n_levels-1>.
Factor boson(int n_levels);
// Three-level atom; level index map is fixed: g -> 0, e -> 1, i -> 2.
Factor atom();

class Space {
 public:
  explicit Space(std::vector<Factor> factors);

  int dim() const { return dim_; }
  int num_factors() const { return static_cast<int>(factors_.size()); }
  const Factor& factor(int k) const;
  // Product of dims of the factors after k (index stride of factor k).
  int stride(int k) const;
  // Product of dims of the factors before k.
  int outer(int k) const;
  bool operator==(const Space& o) const;
  bool operator!=(const Space& o) const { return !(*this == o); }
  std::string describe() const;

 private:
  std::vector<Factor> factors_;
  std::vector<int> strides_;
  int dim_ = 0;
};

// Atomic levels of the ladder scheme: ground, excited, intermediate.
enum class Level : int { g = 0, e = 1, i = 2 };

// ---------------------------------------------------------------------------
// Operators

struct Op {
  Space space;
  Mat mat;
};

Op zero_op(const Space& s);
Op identity(const Space& s);

// Embed a local (factor-sized) matrix into the full space, identity elsewhere.
Op embed(const Space& s, int factor_index, const Mat& local);

enum class LadderKind { lowering, raising };
Op ladder(const Space& s, int factor_index, LadderKind kind);
Op number_op(const Space& s, int factor_index);

// |r><s| on an atomic factor.
Op atom_op(const Space& s, int factor_index, Level r, Level s_level);

// Largest |entry|.
double max_abs(const Mat& m);

// Throws ContractViolation unless ||H - H^dag||_max <= rel_tol * ||H||_max.
void require_hermitian(const Mat& h, const std::string& what,
                       double rel_tol = 1e-12);

// Spectral function of a Hermitian matrix: X = Q diag(w) Q^dag gives
// Q diag(f(w)) Q^dag. f may be complex-valued (e.g. w -> exp(i w)); the
// result is Hermitian exactly when f is real-valued.
Mat hermitian_matrix_function(const Mat& x, const std::function<cplx(double)>& f);
Op hermitian_function(const Op& x, const std::function<cplx(double)>& f);

// ---------------------------------------------------------------------------
// States

struct State {
  Space space;
  Vec amps;
  // Non-fatal diagnostics (truncation pressure etc.) carried with the value.
  std::vector<std::string> warnings;
};

// Product Fock state |occupation[0]> (x) |occupation[1]> (x) ...
// Atomic factors take the level index (0=g, 1=e, 2=i).
State fock_state(const Space& s, const std::vector<int>& occupation);

// Tensor product of explicit per-factor amplitude vectors.
State product_state(const Space& s, const std::vector<Vec>& factor_amps);

// Truncated coherent amplitudes C_m = e^{-|b|^2/2} b^m / sqrt(m!),
// renormalized. Hard truncation guard: requires |beta|^2 <= n_levels/4.
Vec coherent_amplitudes(int n_levels, cplx beta);

// Coherent state on one factor, vacuum/ground on the others.
State coherent_state(const Space& s, int factor_index, cplx beta);

cplx expectation(const State& psi, const Op& a);
double norm(const State& psi);

// Population in the top 10% of levels of a bosonic factor; returns a warning
// string when it exceeds 1e-6 (soft truncation-pressure check).
std::optional<std::string> truncation_warning(const State& psi,
                                              int factor_index);

// ---------------------------------------------------------------------------
// Single-mode statistics

struct BosonMoments {
  cplx a;    // <a>
  cplx a2;   // <a^2>
  double n;  // <a^dag a>
};

BosonMoments bosonic_moments(const State& psi, int factor_index);

// Var X_theta with X_theta = (a e^{-i theta} + a^dag e^{+i theta}) / 2.
double quadrature_variance(const BosonMoments& m, double theta);
double quadrature_variance(const State& psi, int factor_index, double theta);

struct QuadratureExtrema {
  double theta_min = 0.0;
  double var_min = 0.0;
  double theta_max = 0.0;
  double var_max = 0.0;
};

// Scan theta over [0, pi) in uniform steps (default 1e-3 rad).
QuadratureExtrema scan_quadrature(const State& psi, int factor_index,
                                  double step = 1e-3);
QuadratureExtrema scan_quadrature(const BosonMoments& m, double step = 1e-3);

}  // namespace ioncav
