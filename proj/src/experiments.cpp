#include "ioncav/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ioncav {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Heisenberg update of first/second moments under a(t) = f a - i g a^dag.
BosonMoments transform_moments(const BogoliubovCoefficients& c,
                               const BosonMoments& m0) {
  const cplx f = c.f;
  const cplx g = c.g;
  BosonMoments out;
  out.a = f * m0.a - kImag * g * std::conj(m0.a);
  out.a2 = f * f * m0.a2 - kImag * f * g * (2.0 * m0.n + 1.0) -
           g * g * std::conj(m0.a2);
  out.n = std::norm(f) * m0.n + std::norm(g) * (m0.n + 1.0) +
          2.0 * std::real(kImag * f * std::conj(g) * m0.a2);
  return out;
}

double wrap_to_half_turn(double theta) {
  double w = std::fmod(theta, kPi);
  if (w < 0.0) w += kPi;
  return w;
}

std::vector<double> sample_grid(double t_final, int samples) {
  if (samples < 1) {
    throw SignatureError("sample count must be >= 1");
  }
  if (t_final < 0.0) {
    throw SignatureError("final time must be non-negative");
  }
  std::vector<double> times(samples + 1);
  for (int k = 0; k <= samples; ++k) {
    times[k] = t_final * static_cast<double>(k) / samples;
  }
  return times;
}

// H(m) restricted to the cavity factor:
// Xi a^dag a + (Gamma (a^dag)^2 + h.c.)/2.
Mat parametric_block(double Xi, cplx Gamma, int n_cav) {
  Mat h = Mat::Zero(n_cav, n_cav);
  for (int n = 0; n < n_cav; ++n) {
    h(n, n) = Xi * static_cast<double>(n);
  }
  for (int n = 0; n + 2 < n_cav; ++n) {
    const double s =
        std::sqrt(static_cast<double>(n + 1) * static_cast<double>(n + 2));
    h(n + 2, n) += 0.5 * Gamma * s;
    h(n, n + 2) += 0.5 * std::conj(Gamma) * s;
  }
  return h;
}

// Probability weights |C_m|^2 of a coherent state with amplitude modulus
// |beta|, evaluated in log space (no factorial overflow), plus the weight
// lost to the truncation. Weights are NOT renormalized here.
std::vector<double> poisson_weights(double beta_sq, int n_levels,
                                    double* lost) {
  std::vector<double> w(n_levels, 0.0);
  if (beta_sq == 0.0) {
    w[0] = 1.0;
    if (lost != nullptr) *lost = 0.0;
    return w;
  }
  double total = 0.0;
  const double log_b2 = std::log(beta_sq);
  for (int m = 0; m < n_levels; ++m) {
    const double lw = -beta_sq + m * log_b2 - std::lgamma(m + 1.0);
    w[m] = std::exp(lw);
    total += w[m];
  }
  if (lost != nullptr) *lost = std::max(0.0, 1.0 - total);
  return w;
}

double poisson_weight_at(double beta_sq, int m) {
  if (beta_sq == 0.0) return m == 0 ? 1.0 : 0.0;
  return std::exp(-beta_sq + m * std::log(beta_sq) - std::lgamma(m + 1.0));
}

}  // namespace

// ---------------------------------------------------------------------------
// Ideal cavity squeezing

std::string to_string(SqueezeEngine e) {
  switch (e) {
    case SqueezeEngine::analytic: return "analytic";
    case SqueezeEngine::numeric: return "numeric";
  }
  throw ContractViolation("unreachable squeeze-engine tag");
}

SqueezeEngine squeeze_engine_from_string(const std::string& name) {
  if (name == "analytic") return SqueezeEngine::analytic;
  if (name == "numeric") return SqueezeEngine::numeric;
  throw ConfigError("unknown squeeze engine \"" + name +
                    "\" (expected analytic or numeric)");
}

SqueezeResult run_h1_squeezing(const SystemParams& p,
                               const EffectiveParams& eff, double t_final,
                               int samples, SqueezeEngine engine, int n_cav,
                               cplx beta0) {
  SqueezeResult res;
  res.warnings = validate(p);
  const std::vector<double> times = sample_grid(t_final, samples);
  const Space space = cavity_space(n_cav);
  // Builds xi_ii (a^dag)^2 + h.c. and enforces the antinode and
  // delta = omega_ii preconditions for both engines.
  const Mat h1 = build_engineered(p, eff, Engineered::squeeze_cavity, space,
                                  0.0);
  res.series.resize(times.size());

  if (engine == SqueezeEngine::analytic) {
    const cplx gamma = 2.0 * eff.xi_ii;
    const double theta_sq =
        wrap_to_half_turn(0.5 * std::arg(eff.xi_ii) + kPi / 4.0);
    const BosonMoments m0{beta0, beta0 * beta0, std::norm(beta0)};
    for (size_t k = 0; k < times.size(); ++k) {
      SqueezeSample& s = res.series[k];
      s.t = times[k];
      s.r = 2.0 * std::abs(eff.xi_ii) * times[k];
      s.R = -std::expm1(-2.0 * s.r) * 100.0;
      s.theta_min = theta_sq;
      s.var_min = std::exp(-2.0 * s.r) / 4.0;
      s.var_max = std::exp(2.0 * s.r) / 4.0;
      const BogoliubovCoefficients c = bogoliubov(0.0, gamma, times[k]);
      s.n_mean = transform_moments(c, m0).n;
    }
  } else {
    const State psi0 = coherent_state(space, 0, beta0);
    const std::vector<Vec> states = evolve_static(h1, psi0.amps, times);
    for (size_t k = 0; k < times.size(); ++k) {
      SqueezeSample& s = res.series[k];
      s.t = times[k];
      const State at{space, states[k], {}};
      const BosonMoments bm = bosonic_moments(at, 0);
      const QuadratureExtrema ex = scan_quadrature(bm);
      s.var_min = ex.var_min;
      s.var_max = ex.var_max;
      s.theta_min = ex.theta_min;
      s.n_mean = bm.n;
      s.r = -0.5 * std::log(4.0 * ex.var_min);
      s.R = -std::expm1(-2.0 * s.r) * 100.0;
    }
    const State final_state{space, states.back(), {}};
    if (auto w = truncation_warning(final_state, 0)) {
      res.warnings.push_back(*w);
    }
  }

  const SqueezeSample& last = res.series.back();
  res.r = last.r;
  res.R = last.R;
  res.theta_min = last.theta_min;
  res.var_min = last.var_min;
  res.var_max = last.var_max;
  res.n_mean = last.n_mean;
  return res;
}

// ---------------------------------------------------------------------------
// Regime map

std::vector<RegimeMapRow> regime_map(const SystemParams& p,
                                     const EffectiveParams& eff,
                                     const std::vector<double>& delta_values,
                                     int m_max) {
  if (m_max < 1) {
    throw SignatureError("regime map needs m_max >= 1");
  }
  std::vector<RegimeMapRow> rows;
  rows.reserve(delta_values.size());
  for (double dv : delta_values) {
    SystemParams q = p;
    q.delta = dv;
    RegimeMapRow row;
    row.delta = dv;
    row.reports.reserve(m_max + 1);
    for (int m = 0; m <= m_max; ++m) {
      row.reports.push_back(classify(m, eff, q));
      if (row.reports.back().resonant) {
        row.resonant_ms.push_back(m);
      }
    }
    // |F| features over adjacent non-resonant pairs.
    bool inc = true, dec = true;
    double fmin = 0.0, fmax = 0.0;
    bool any_pair = false, any_val = false;
    for (int m = 0; m <= m_max; ++m) {
      const RegimeReport& r = row.reports[m];
      if (r.resonant) continue;
      const double fa = std::abs(r.F);
      if (!any_val) {
        fmin = fmax = fa;
        any_val = true;
      } else {
        fmin = std::min(fmin, fa);
        fmax = std::max(fmax, fa);
      }
      if (m < m_max && !row.reports[m + 1].resonant) {
        const double fb = std::abs(row.reports[m + 1].F);
        any_pair = true;
        inc = inc && (fb > fa);
        dec = dec && (fb < fa);
      }
    }
    row.constant_abs_f = row.resonant_ms.empty() && any_val &&
                         (fmax - fmin) <= 1e-12 * std::max(fmax, 1e-300);
    row.increasing_abs_f = any_pair && inc;
    row.decreasing_abs_f = any_pair && dec;
    for (int m = 1; m <= m_max; ++m) {
      if (row.reports[m].classification != row.reports[m - 1].classification) {
        ++row.classification_changes;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Fock-state filter

FilterResult run_fock_filter(const SystemParams& p, const EffectiveParams& eff,
                             int M, cplx beta, double t_final, int samples,
                             double n_threshold, int n_cav, int n_vib) {
  FilterResult res;
  res.warnings = validate(p);
  if (n_cav < 2 || n_vib < 1) {
    throw SignatureError("filter needs n_cav >= 2 and n_vib >= 1");
  }
  if (M < 0 || M >= n_vib) {
    std::ostringstream os;
    os << "target Fock index M = " << M << " must lie in [0, n_vib = "
       << n_vib << ")";
    throw SignatureError(os.str());
  }
  if (std::abs(eff.omega_ii) < 10.0 * std::abs(eff.xi_ii)) {
    std::ostringstream os;
    os << "filter requires omega_ii >= 10 |xi_ii| (strongly nonresonant "
          "background): |omega_ii| = "
       << std::abs(eff.omega_ii) << ", 10 |xi_ii| = "
       << 10.0 * std::abs(eff.xi_ii);
    throw RegimeError(os.str());
  }
  {
    const double want = resonance_delta(p, eff, M);
    const double scale = std::max({std::abs(p.delta), std::abs(want), 1e-300});
    if (std::abs(p.delta - want) > 1e-9 * scale) {
      std::ostringstream os;
      os << "filter requires delta tuned to the m = " << M
         << " resonance (Xi(M) = 0): delta = " << p.delta
         << ", resonance at " << want;
      throw RegimeError(os.str());
    }
  }

  res.M = M;
  res.threshold = n_threshold;
  res.bound_NS = std::abs(eff.omega_ii) > 0.0
                     ? std::abs(eff.xi_ii) / std::abs(eff.omega_ii)
                     : 0.0;
  res.success_prob = poisson_weight_at(std::norm(beta), M);
  res.notes.push_back(
      "resonant-branch reference: sinh^2(|Gamma(M)| t); a sinh^2(|Gamma|^2 t) "
      "form is dimensionally inconsistent and not used");
  res.notes.push_back(
      "measurement model: idealized projective photon-count threshold "
      "(count >= n_threshold) applied at t_final; detector physics is not "
      "simulated");
  res.notes.push_back(
      "post_measure_state is Fock-diagonal-faithful: per-level probabilities "
      "are exact, cross-level coherences are not tracked");

  res.times = sample_grid(t_final, samples);
  const size_t nt = res.times.size();

  // Truncated coherent amplitudes (renormalized) drive the block mixture;
  // the reported success probability stays the untruncated weight.
  const Vec c_amps = coherent_amplitudes(n_vib, beta);
  std::vector<double> w(n_vib);
  for (int m = 0; m < n_vib; ++m) w[m] = std::norm(c_amps(m));
  {
    double lost = 0.0;
    poisson_weights(std::norm(beta), n_vib, &lost);
    if (lost > 1e-10) {
      std::ostringstream os;
      os << "coherent weights renormalized over n_vib = " << n_vib
         << " levels; truncated weight " << lost;
      res.warnings.push_back(os.str());
    }
  }

  const Space cav = cavity_space(n_cav);
  const double gamma_m_abs = std::abs(block_gamma(p, eff, M));
  if (std::sinh(gamma_m_abs * t_final) * std::sinh(gamma_m_abs * t_final) >
      n_cav / 4.0) {
    std::ostringstream os;
    os << "resonant photon growth sinh^2(|Gamma(M)| t_final) = "
       << std::pow(std::sinh(gamma_m_abs * t_final), 2)
       << " approaches the cavity truncation n_cav = " << n_cav;
    res.warnings.push_back(os.str());
  }

  res.n_RS.assign(nt, 0.0);
  res.n_RS_ideal.assign(nt, 0.0);
  res.n_NS.assign(nt, 0.0);
  res.norm_joint.assign(nt, 0.0);
  for (size_t k = 0; k < nt; ++k) {
    const double s = std::sinh(gamma_m_abs * res.times[k]);
    res.n_RS_ideal[k] = s * s;
  }

  Vec vac = Vec::Zero(n_cav);
  vac(0) = 1.0;
  std::vector<double> fire(n_vib, 0.0);
  const int thr_index =
      std::max(0, static_cast<int>(std::ceil(n_threshold - 1e-12)));
  std::vector<double> norm_sq(nt, 0.0);
  std::vector<double> ns_acc(nt, 0.0);

  for (int m = 0; m < n_vib; ++m) {
    const Mat hm =
        parametric_block(block_xi(p, eff, m), block_gamma(p, eff, m), n_cav);
    const std::vector<Vec> states = evolve_static(hm, vac, res.times);
    for (size_t k = 0; k < nt; ++k) {
      const State at{cav, states[k], {}};
      const double n_mean = bosonic_moments(at, 0).n;
      if (m == M) {
        res.n_RS[k] = n_mean;
      } else {
        ns_acc[k] += w[m] * n_mean;
      }
      norm_sq[k] += w[m] * states[k].squaredNorm();
    }
    double p_fire = 0.0;
    const Vec& fin = states.back();
    for (int n = thr_index; n < n_cav; ++n) p_fire += std::norm(fin(n));
    fire[m] = p_fire;
    if (m == M) {
      const State final_state{cav, fin, {}};
      if (auto warn = truncation_warning(final_state, 0)) {
        res.warnings.push_back("resonant block: " + *warn);
      }
    }
  }

  const double w_ns = 1.0 - w[M];
  for (size_t k = 0; k < nt; ++k) {
    res.n_NS[k] = w_ns > 0.0 ? ns_acc[k] / w_ns : 0.0;
    res.norm_joint[k] = std::sqrt(norm_sq[k]);
  }

  double fire_prob = 0.0;
  for (int m = 0; m < n_vib; ++m) fire_prob += w[m] * fire[m];
  res.fire_prob = fire_prob;
  const Space vib_space({boson(n_vib)});
  Vec post = Vec::Zero(n_vib);
  if (fire_prob > 0.0) {
    res.fidelity_M = w[M] * fire[M] / fire_prob;
    for (int m = 0; m < n_vib; ++m) {
      post(m) = c_amps(m) * std::sqrt(fire[m]);
    }
    post /= post.norm();
  } else {
    res.fidelity_M = 0.0;
    post = c_amps;
    res.notes.push_back(
        "detector cannot fire (zero photon growth); post_measure_state is the "
        "unconditioned vibrational state");
  }
  res.post_measure_state = State{vib_space, post, {}};
  return res;
}

// ---------------------------------------------------------------------------
// Semiclassical comparison

std::vector<SemiclassicalRun> run_semiclassical_comparison(
    const SystemParams& p, const EffectiveParams& eff,
    const std::vector<cplx>& beta_values, double r_max, int samples, int n_cav,
    int n_vib) {
  if (n_cav < 2 || n_vib < 1) {
    throw SignatureError(
        "semiclassical comparison needs n_cav >= 2 and n_vib >= 1");
  }
  if (r_max < 0.0) {
    throw SignatureError("r_max must be non-negative");
  }
  if (samples < 1) {
    throw SignatureError("sample count must be >= 1");
  }
  {
    const double s = std::sinh(r_max);
    if (s * s > n_cav / 4.0) {
      std::ostringstream os;
      os << "cavity truncation n_cav = " << n_cav
         << " cannot hold sinh^2(r_max) = " << s * s
         << " squeezed photons; raise n_cav or lower r_max";
      throw TruncationError(os.str());
    }
  }
  const std::vector<std::string> param_warnings = validate(p);

  std::vector<SemiclassicalRun> runs;
  runs.reserve(beta_values.size());
  const Space cav = cavity_space(n_cav);
  Vec vac = Vec::Zero(n_cav);
  vac(0) = 1.0;

  for (cplx beta : beta_values) {
    SemiclassicalRun run;
    run.beta = beta;
    run.warnings = param_warnings;
    const double b2 = std::norm(beta);
    const double eta2 = p.eta * p.eta;
    run.delta_resolved = 2.0 * eta2 * b2 * eff.omega_ii;
    const double rate = 4.0 * eta2 * b2 * std::abs(eff.xi_ii);
    if (r_max > 0.0 && rate == 0.0) {
      std::ostringstream os;
      os << "squeezing rate 4 eta^2 |beta|^2 |xi_ii| vanishes (eta = "
         << p.eta << ", |beta| = " << std::abs(beta) << ", |xi_ii| = "
         << std::abs(eff.xi_ii) << "); r_max > 0 is unreachable";
      throw RegimeError(os.str());
    }
    SystemParams q = p;
    q.delta = run.delta_resolved;

    double lost = 0.0;
    std::vector<double> w = poisson_weights(b2, n_vib, &lost);
    if (lost > 1e-6) {
      std::ostringstream os;
      os << "vibrational truncation n_vib = " << n_vib
         << " drops coherent weight " << lost << " at |beta|^2 = " << b2
         << "; raise n_vib";
      throw TruncationError(os.str());
    }
    if (lost > 1e-12) {
      std::ostringstream os;
      os << "coherent weights renormalized over n_vib = " << n_vib
         << " levels; truncated weight " << lost;
      run.warnings.push_back(os.str());
    }
    const double total = 1.0 - lost;
    for (double& x : w) x /= total;

    std::vector<double> times(samples + 1);
    run.points.resize(samples + 1);
    for (int k = 0; k <= samples; ++k) {
      const double r = r_max * static_cast<double>(k) / samples;
      run.points[k].r = r;
      run.points[k].t = rate > 0.0 ? r / rate : 0.0;
      times[k] = run.points[k].t;
      run.points[k].var_semiclassical = std::exp(-2.0 * r) / 4.0;
      run.points[k].var_quantum = 0.0;
    }

    double worst_tail = 0.0;
    int worst_m = -1;
    for (int m = 0; m < n_vib; ++m) {
      const Mat hm =
          parametric_block(block_xi(q, eff, m), block_gamma(q, eff, m), n_cav);
      const std::vector<Vec> states = evolve_static(hm, vac, times);
      for (int k = 0; k <= samples; ++k) {
        const State at{cav, states[k], {}};
        const BosonMoments bm = bosonic_moments(at, 0);
        run.points[k].var_quantum += w[m] * quadrature_variance(bm, 0.0);
      }
      // Track the hottest block's truncation pressure at the final sample.
      const Vec& fin = states.back();
      double tail = 0.0;
      const int tail_start = n_cav - std::max(1, n_cav / 10);
      for (int n = tail_start; n < n_cav; ++n) tail += std::norm(fin(n));
      if (w[m] * tail > worst_tail) {
        worst_tail = w[m] * tail;
        worst_m = m;
      }
    }
    if (worst_tail > 1e-6) {
      std::ostringstream os;
      os << "cavity truncation pressure: weighted tail population "
         << worst_tail << " in the top 10% of levels (worst block m = "
         << worst_m << ")";
      run.warnings.push_back(os.str());
    }
    for (int k = 0; k <= samples; ++k) {
      run.points[k].deviation =
          std::abs(run.points[k].var_quantum - run.points[k].var_semiclassical);
    }
    runs.push_back(std::move(run));
  }
  return runs;
}

}  // namespace ioncav
