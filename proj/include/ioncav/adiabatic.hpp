#pragma once

// Adiabatic elimination of the dressed atomic manifold: validity
// classification of the two amplification regimes, the closed-form effective
// parameters, and a numerical validator that propagates the exact
// rotated-basis Hamiltonian against the effective |i>-branch dynamics.

#include <string>
#include <vector>

#include "ioncav/fock.hpp"
#include "ioncav/model.hpp"

namespace ioncav {

enum class RegimeClass { weak, strong, invalid };
std::string to_string(RegimeClass c);

struct ValidityReport {
  double ratio_plus = 0.0;   // |Delta + |Omega|| / max(|lambda1|, |lambda2|, |delta|)
  double ratio_minus = 0.0;  // |Delta - |Omega|| / same denominator
  RegimeClass regime = RegimeClass::invalid;
  double margin_threshold = 10.0;
};

// weak when Delta >= threshold * max(|Omega|, |lambda1|, |lambda2|, |delta|);
// strong when |Omega| >= threshold * max(Delta, |lambda1|, |lambda2|, |delta|);
// invalid otherwise. Both ratios are always computed.
ValidityReport classify_regime(const SystemParams& p,
                               double margin_threshold = 10.0);

// Closed-form effective parameters for the requested regime. Throws
// RegimeError when classify_regime (threshold 10) disagrees, unless
// allow_override; an override is recorded in the result.
EffectiveParams effective_params(const SystemParams& p, Regime regime,
                                 bool allow_override = false);

struct EffectiveDynamicsReport {
  std::vector<double> times;      // seconds
  std::vector<double> fidelity;   // |<psi_exact(t)|psi_eff(t)>|^2
  std::vector<double> population_i;  // weight remaining in the |i> branch
  std::vector<double> n_exact;    // cavity <a^dag a>, exact run
  std::vector<double> n_eff;      // cavity <a^dag a>, effective run
  std::vector<double> var_min_exact;  // minimal cavity quadrature variance
  std::vector<double> var_min_eff;
  double max_infidelity = 0.0;
  std::vector<std::string> warnings;
};

// Propagates (i) the exact rotated-basis Hamiltonian and (ii) the effective
// |i>-branch dynamics (exact sin^2 factor, no Lamb-Dicke expansion) from
// |vac> x |vac> x |i>, sampling steps+1 points on [0, t_max]. space must be
// Boson(N_cav) x Boson(N_vib) x Atom(3).
EffectiveDynamicsReport validate_effective_dynamics(const SystemParams& p,
                                                    const EffectiveParams& eff,
                                                    const Space& space,
                                                    double t_max, int steps);

}  // namespace ioncav
