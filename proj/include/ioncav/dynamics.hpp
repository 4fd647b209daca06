#pragma once

// Time-evolution engines plus closed-form solutions and regime analysis for
// the per-phonon-block parametric Hamiltonian
//   H(m) = Xi(m) a^dag a + (Gamma(m) (a^dag)^2 + h.c.)/2.

#include <functional>
#include <string>
#include <vector>

#include "ioncav/fock.hpp"
#include "ioncav/model.hpp"

namespace ioncav {

// ---------------------------------------------------------------------------
// Closed-form (Bogoliubov) solutions

enum class Branch { subcritical, critical, supercritical, resonant };

std::string to_string(Branch b);
// Stable numeric tags for serialized output: 0=sub, 1=critical, 2=super,
// 3=resonant.
int regime_code(Branch b);

struct BogoliubovCoefficients {
  cplx f{1.0, 0.0};
  cplx g{0.0, 0.0};
  Branch regime = Branch::subcritical;
  double w = 0.0;  // characteristic frequency sqrt(|Xi^2 - |Gamma|^2|) (rad/s)
};

// Branch selection for given coefficients. xi_scale sets the absolute scale
// against which Xi = 0 is decided (resonant when |Xi| <= 1e-12 * xi_scale);
// pass 0 to use max(|Xi|, |Gamma|).
Branch classify_branch(double Xi, cplx Gamma, double xi_scale = 0.0);

// Heisenberg evolution a(t) = f a - i g a^dag. Satisfies |f|^2 - |g|^2 = 1
// and is continuous across branch boundaries.
BogoliubovCoefficients bogoliubov(double Xi, cplx Gamma, double t);

// Vacuum observables implied by (f, g): <a^dag a> = |g|^2, and quadrature
// moments <a^2> = -i f g; convenience for tests and
// the filter.
BosonMoments bogoliubov_vacuum_moments(const BogoliubovCoefficients& c);

// ---------------------------------------------------------------------------
// Regime classification per vibrational Fock index

struct RegimeReport {
  int m = 0;
  double Xi = 0.0;        // rad/s
  cplx Gamma{0.0, 0.0};   // rad/s
  cplx F{0.0, 0.0};       // Gamma/Xi; left at 0 and flagged when resonant
  bool resonant = false;  // Xi = 0 within tolerance (F undefined)
  Branch classification = Branch::subcritical;
};

// Xi(m) = eta^2 omega_ii (2m+1) - delta, Gamma(m) = 2 eta^2 xi_ii (2m+1),
// F = Gamma/Xi, classified with the Xi-scale max(eta^2|omega_ii|(2m+1), |delta|).
RegimeReport classify(int m, const EffectiveParams& eff, const SystemParams& p);

// ---------------------------------------------------------------------------
// Evolution engines

// psi(t) = exp(-i H t) psi0 via one spectral decomposition shared by all
// sample times. H must be Hermitian.
std::vector<Vec> evolve_static(const Mat& h, const Vec& psi0,
                               const std::vector<double>& times);

// Matrix-free engine: apply(t, in, out) must set out = H(t) in. Steps are
// midpoint exponentials exp(-i H(t_k + dt/2) dt) evaluated by a Taylor series
// run to machine-precision stagnation; the trajectory is sampled exactly at
// `times` (sorted, non-negative; steps never exceed dt_target). h_norm_bound
// must upper-bound max_t ||H(t)||_max and feeds the dt * ||H|| <= 0.05 guard.
using HApplier = std::function<void(double t, const Vec& in, Vec& out)>;
std::vector<Vec> evolve_applier(const HApplier& apply, double h_norm_bound,
                                const Vec& psi0,
                                const std::vector<double>& times,
                                double dt_target);

// Dense-builder convenience wrapper around the same stepper; the step guard
// dt * ||H(t)||_max <= 0.05 is checked on every snapshot it builds.
using HBuilder = std::function<Mat(double t)>;
std::vector<Vec> evolve_timedep(const HBuilder& h_of_t, const Vec& psi0,
                                const std::vector<double>& times, double dt);

}  // namespace ioncav
