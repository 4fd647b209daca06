#pragma once

// Physical parameters of the driven three-level ion in a cavity, plus
// builders for the full lab/interaction-frame Hamiltonian, its rotated-basis
// (dressed) form, and the engineered interaction family derived from it.
//
// Frame convention used throughout: standard interaction picture,
// O_I(t) = e^{+iH0 t} O_S e^{-iH0 t}, so b^dag -> b^dag e^{+i nu t} under the
// trap rotation and a^dag -> a^dag e^{+i delta t} under exp[-i delta t a^dag a].

#include <complex>
#include <string>
#include <vector>

#include "ioncav/fock.hpp"

namespace ioncav {

// ---------------------------------------------------------------------------
// Parameters

struct SystemParams {
  double omega = 0.0;      // cavity frequency (rad/s)
  double nu = 0.0;         // trap frequency (rad/s)
  double delta = 0.0;      // cavity-drive detuning delta = omega0/2 - omega (rad/s)
  double Delta = 0.0;      // intermediate-level detuning (rad/s)
  cplx lambda1{0.0, 0.0};  // dipole coupling g<->i (rad/s)
  cplx lambda2{0.0, 0.0};  // dipole coupling i<->e (rad/s)
  double Omega_abs = 0.0;  // classical drive magnitude |Omega| (rad/s)
  double phi_drive = 0.0;  // drive phase (rad); Omega = |Omega| e^{-i phi}
  double eta = 0.0;        // quantum-field Lamb-Dicke parameter
  double eta_L = 0.0;      // classical-field Lamb-Dicke parameter
  double varphi = 0.0;     // standing-wave phase (0 = node, pi/2 = antinode)

  // The bare atomic g<->e splitting; derived, never stored independently.
  double omega0() const { return 2.0 * (omega + delta); }

  bool operator==(const SystemParams&) const = default;
};

// Throws RegimeError on hard violations (negative magnitudes, eta > 0.3);
// returns soft warnings (eta > 0.2 strains the quadratic Lamb-Dicke order).
std::vector<std::string> validate(const SystemParams& p);

enum class Regime { weak, strong };
std::string to_string(Regime r);

// Effective |i>-branch and dressed-branch parameters after adiabatic
// elimination of the +/- manifold (computed in adiabatic.hpp).
struct EffectiveParams {
  Regime regime = Regime::weak;
  double omega_ii = 0.0;  // cavity frequency pull (rad/s)
  double chi_ii = 0.0;    // scalar light shift (rad/s)
  cplx xi_ii{0.0, 0.0};   // two-photon (squeezing) coupling (rad/s)
  double omega_pp = 0.0, chi_pp = 0.0;
  cplx xi_pp{0.0, 0.0};
  double omega_mm = 0.0, chi_mm = 0.0;
  cplx xi_mm{0.0, 0.0};
  double omega_pm = 0.0, chi_pm = 0.0;
  cplx xi_pm{0.0, 0.0};
  // Alternative reading of the strong-regime |+> two-photon entry (the
  // published table is internally inconsistent there); equals xi_pp in the
  // weak regime. Surfaced, not resolved.
  cplx xi_pp_alt{0.0, 0.0};
  // True when the caller forced a regime the validity classifier rejects.
  bool regime_override = false;
};

// ---------------------------------------------------------------------------
// Spaces

Space full_space(int n_cav, int n_vib);  // Boson(N_cav) x Boson(N_vib) x Atom
Space node_space(int n_cav, int n_vib);  // Boson(N_cav) x Boson(N_vib)
Space cavity_space(int n_cav);           // Boson(N_cav)

// Factor indices in full_space / node_space.
inline constexpr int kCavity = 0;
inline constexpr int kVibration = 1;
inline constexpr int kAtom = 2;

// ---------------------------------------------------------------------------
// Local vibrational-factor building blocks (N_vib x N_vib matrices)

// sin[eta(b^dag + b) + varphi], built spectrally (exact at the truncation).
Mat vib_sin_exact(int n_vib, double eta, double varphi);
// sin^2 of the same argument.
Mat vib_sin2_exact(int n_vib, double eta, double varphi);
// Quadratic Lamb-Dicke approximation eta^2 (b^dag + b)^2 of sin^2 at a node.
Mat vib_sin2_quadratic(int n_vib, double eta);
// exp[i eta_L (b^dag + b)] (unitary displacement-type factor).
Mat vib_drive_exp(int n_vib, double eta_L);
// Free-rotation conjugation e^{+i nu t b^dag b} X e^{-i nu t b^dag b}.
Mat rotate_vib(const Mat& x, double nu, double t);

// ---------------------------------------------------------------------------
// Full and dressed Hamiltonians

enum class Frame { lab, interaction };

// Full Hamiltonian on Boson(N_cav) x Boson(N_vib) x Atom(3), atomic basis
// order {g, e, i}. frame=lab gives the static part plus the standing-wave
// coupling and the classical drive at time t; frame=interaction gives the
// rotating-wave form with the trap rotation folded into the vibrational
// factors.
Mat build_full_hamiltonian(const SystemParams& p, const Space& space, double t,
                           Frame frame);

// Same space signature, atomic basis order {i, +, -} where
// |+-> = (|e> +- e^{i phi}|g>)/sqrt(2). Requires eta_L <= 0.1 so the
// classical-drive sideband factor is ~1.
Mat build_dressed_hamiltonian(const SystemParams& p, const Space& space,
                              double t);

// 3x3 unitary mapping bare atomic amplitudes (g, e, i) to dressed (i, +, -).
Mat dressed_rotation(double phi_drive);

// ---------------------------------------------------------------------------
// Engineered Hamiltonians (ion prepared in |i>)

enum class Engineered {
  squeeze_cavity,     // xi (a^dag)^2 + h.c.; antinode, delta = omega_ii
  two_mode_pairs,     // photon-pair + phonon-pair creation; delta = +Phi
  pair_exchange,      // photon pairs from phonon pairs; delta = -Phi
  node_squeeze,       // time-dependent node interaction, |delta| << Phi
  cross_kerr,         // eta^2 omega_ii a^dag a (2 b^dag b + 1)
  node_full,          // all node terms with explicit oscillating phases
  parametric_blocks,  // node_squeeze in the exp[-i delta t a^dag a] frame
};

std::string to_string(Engineered which);
// Parses the names above; throws ConfigError on anything else.
Engineered engineered_from_string(const std::string& name);

// Trap frequency after absorbing the scalar-light-shift pull:
// Phi = nu + 2 eta^2 chi_ii.
double node_frame_frequency(const SystemParams& p, const EffectiveParams& eff);

// Builds the requested engineered Hamiltonian. squeeze_cavity lives on
// Boson(N_cav); the rest on Boson(N_cav) x Boson(N_vib). t matters only for
// node_squeeze and node_full. Preconditions are enforced and reported as
// RegimeError naming the violated inequality.
Mat build_engineered(const SystemParams& p, const EffectiveParams& eff,
                     Engineered which, const Space& space, double t);

// Vibration replaced by a classical amplitude beta: cavity-only
// H = 2 eta^2 |beta|^2 (xi_ii (a^dag)^2 + h.c.), valid when
// delta = 2 eta^2 |beta|^2 omega_ii (enforced).
Mat semiclassical_hamiltonian(const SystemParams& p, const EffectiveParams& eff,
                              cplx beta, const Space& space);

// The per-phonon-block coefficients of parametric_blocks:
// Xi(m) = eta^2 omega_ii (2m+1) - delta, Gamma(m) = 2 eta^2 xi_ii (2m+1).
double block_xi(const SystemParams& p, const EffectiveParams& eff, int m);
cplx block_gamma(const SystemParams& p, const EffectiveParams& eff, int m);

// The detuning that nulls Xi(m) for phonon number m. Computed with the same
// floating-point grouping as block_xi, so block_xi(p', eff, m) == 0 exactly
// when p'.delta = resonance_delta(p, eff, m).
double resonance_delta(const SystemParams& p, const EffectiveParams& eff,
                       int m);

}  // namespace ioncav
