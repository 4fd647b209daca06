#pragma once

// End-to-end experiment drivers: ideal cavity squeezing, parametric-regime
// maps over the vibrational Fock index, the vibrational Fock-state filter,
// and the quantum-vs-semiclassical squeezing comparison.

#include <complex>
#include <string>
#include <vector>

#include "ioncav/dynamics.hpp"
#include "ioncav/fock.hpp"
#include "ioncav/model.hpp"

namespace ioncav {

// ---------------------------------------------------------------------------
// Ideal cavity squeezing (antinode, delta = omega_ii)

enum class SqueezeEngine { analytic, numeric };
std::string to_string(SqueezeEngine e);
// Parses "analytic" / "numeric"; throws ConfigError on anything else.
SqueezeEngine squeeze_engine_from_string(const std::string& name);

struct SqueezeSample {
  double t = 0.0;          // seconds
  double r = 0.0;          // squeezing factor
  double R = 0.0;          // variance-reduction rate, percent
  double theta_min = 0.0;  // minimizing quadrature angle in [0, pi)
  double var_min = 0.25;
  double var_max = 0.25;
  double n_mean = 0.0;
};

struct SqueezeResult {
  // Final-time values, duplicated from series.back() for convenience.
  double r = 0.0;
  double R = 0.0;
  double theta_min = 0.0;
  double var_min = 0.25;
  double var_max = 0.25;
  double n_mean = 0.0;
  std::vector<SqueezeSample> series;  // samples+1 points on [0, t_final]
  std::vector<std::string> warnings;
};

// Squeezing of the cavity mode under H = xi_ii (a^dag)^2 + h.c. from an
// initial coherent state beta0 (vacuum by default). The analytic engine uses
// the closed-form Bogoliubov solution, r(t) = 2|xi_ii| t and
// R = (1 - e^{-2r}) * 100; the numeric engine diagonalizes the truncated
// Hamiltonian on Boson(n_cav) and extracts r from var_min = e^{-2r}/4.
// Preconditions (varphi = pi/2, delta = omega_ii) are enforced for both
// engines by the Hamiltonian builder.
SqueezeResult run_h1_squeezing(const SystemParams& p,
                               const EffectiveParams& eff, double t_final,
                               int samples, SqueezeEngine engine, int n_cav,
                               cplx beta0 = cplx{0.0, 0.0});

// ---------------------------------------------------------------------------
// Parametric-regime map over the vibrational Fock index

struct RegimeMapRow {
  double delta = 0.0;                 // rad/s, the swept detuning
  std::vector<RegimeReport> reports;  // m = 0 .. m_max
  // Qualitative features of |F(m)| across the row:
  bool constant_abs_f = false;    // |F| identical (rel 1e-12) for all m
  bool increasing_abs_f = false;  // strictly increasing over non-resonant m
  bool decreasing_abs_f = false;  // strictly decreasing over non-resonant m
  std::vector<int> resonant_ms;   // m values flagged resonant
  int classification_changes = 0;  // regime switches along consecutive m
};

// Classifies m = 0..m_max for each detuning (p.delta is overridden by the
// swept value). Requires m_max >= 1.
std::vector<RegimeMapRow> regime_map(const SystemParams& p,
                                     const EffectiveParams& eff,
                                     const std::vector<double>& delta_values,
                                     int m_max);

// ---------------------------------------------------------------------------
// Vibrational Fock-state filter

struct FilterResult {
  int M = 0;                 // target vibrational Fock index
  double success_prob = 0.0;  // weight of |M> in the initial coherent state
  double bound_NS = 0.0;      // |xi_ii| / omega_ii, nonresonant photon bound
  double threshold = 0.0;     // photon-count threshold of the measurement
  double fire_prob = 0.0;     // P(count >= threshold) at t_final
  double fidelity_M = 0.0;    // <M| rho_vib |M> conditioned on firing
  std::vector<double> times;       // seconds, samples+1 points
  std::vector<double> n_RS;        // resonant-block mean photon number
  std::vector<double> n_RS_ideal;  // sinh^2(|Gamma(M)| t) reference
  std::vector<double> n_NS;        // weighted nonresonant mean photon number
  std::vector<double> norm_joint;  // joint state norm at each sample
  // Vibrational state conditioned on the detector firing. Faithful in the
  // Fock-diagonal sense: |amps[m]|^2 is the exact conditional probability of
  // |m>, with the initial coherent phases retained.
  State post_measure_state{Space({boson(2)}), Vec::Zero(2), {}};
  std::vector<std::string> notes;     // fixed modeling conventions
  std::vector<std::string> warnings;  // truncation pressure etc.
};

// Evolves cavity vacuum x vibrational |beta> blockwise under the
// phonon-number-resolved parametric Hamiltonian
// H(m) = Xi(m) a^dag a + (Gamma(m) (a^dag)^2 + h.c.)/2, then conditions the
// vibrational mode on an idealized photon-count measurement
// "count >= n_threshold" at t_final. Preconditions: delta tuned so
// Xi(M) = 0 (resonance at the target index) and omega_ii >= 10 |xi_ii|
// (strongly nonresonant background).
FilterResult run_fock_filter(const SystemParams& p, const EffectiveParams& eff,
                             int M, cplx beta, double t_final, int samples,
                             double n_threshold, int n_cav, int n_vib);

// ---------------------------------------------------------------------------
// Semiclassical comparison

struct SemiclassicalPoint {
  double r = 0.0;        // squeezing factor (abscissa)
  double t = 0.0;        // seconds, t = r / (4 eta^2 |beta|^2 |xi_ii|)
  double var_quantum = 0.25;        // Var X_0 of the cavity, full quantum run
  double var_semiclassical = 0.25;  // e^{-2r}/4 reference line
  double deviation = 0.0;           // |var_quantum - var_semiclassical|
};

struct SemiclassicalRun {
  cplx beta{0.0, 0.0};
  double delta_resolved = 0.0;  // 2 eta^2 |beta|^2 omega_ii (rad/s)
  std::vector<SemiclassicalPoint> points;  // samples+1 points on [0, r_max]
  std::vector<std::string> warnings;
};

// For each vibrational amplitude beta: propagates cavity vacuum under the
// phonon-number-resolved blocks H(m) weighted by the coherent distribution
// |C_m|^2 (the vibrational mode enters only through these weights), computes
// Var X_0 with X_0 = (a + a^dag)/2, and compares against the semiclassical
// e^{-2r}/4 line, r = 4 eta^2 |beta|^2 |xi_ii| t. The detuning is resolved
// per beta to delta = 2 eta^2 |beta|^2 omega_ii.
std::vector<SemiclassicalRun> run_semiclassical_comparison(
    const SystemParams& p, const EffectiveParams& eff,
    const std::vector<cplx>& beta_values, double r_max, int samples, int n_cav,
    int n_vib);

}  // namespace ioncav
