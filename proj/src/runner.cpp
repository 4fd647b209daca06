#include "ioncav/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ioncav/adiabatic.hpp"
#include "ioncav/dynamics.hpp"
#include "ioncav/errors.hpp"
#include "ioncav/experiments.hpp"
#include "ioncav/fock.hpp"
#include "ioncav/kernels.hpp"
#include "ioncav/model.hpp"
#include "ioncav/version.hpp"

namespace ioncav {

namespace {

using nlohmann::ordered_json;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

ordered_json jcplx(cplx v) { return ordered_json::array({v.real(), v.imag()}); }

// Regime resolution shared by every experiment: auto follows the validity
// classifier and refuses the ambiguous zone; an explicit weak/strong request
// overrides it (recorded in the result).
EffectiveParams resolve_effective(const SystemParams& p,
                                  const std::string& regime_request,
                                  ValidityReport* validity_out) {
  const ValidityReport v = classify_regime(p);
  if (validity_out != nullptr) *validity_out = v;
  if (regime_request == "auto") {
    if (v.regime == RegimeClass::invalid) {
      std::ostringstream os;
      os << "validity classification is neither weak nor strong"
         << " (ratio_plus = " << v.ratio_plus
         << ", ratio_minus = " << v.ratio_minus
         << ", threshold = " << v.margin_threshold
         << "); set regime = weak or strong to override";
      throw RegimeError(os.str());
    }
    const Regime r =
        v.regime == RegimeClass::weak ? Regime::weak : Regime::strong;
    return effective_params(p, r, false);
  }
  const Regime r = regime_request == "weak" ? Regime::weak : Regime::strong;
  return effective_params(p, r, true);
}

ordered_json system_json(const SystemParams& p) {
  ordered_json j;
  j["omega"] = p.omega;
  j["nu"] = p.nu;
  j["delta"] = p.delta;
  j["Delta"] = p.Delta;
  j["lambda1"] = jcplx(p.lambda1);
  j["lambda2"] = jcplx(p.lambda2);
  j["Omega_abs"] = p.Omega_abs;
  j["phi_drive"] = p.phi_drive;
  j["eta"] = p.eta;
  j["eta_L"] = p.eta_L;
  j["varphi"] = p.varphi;
  return j;
}

ordered_json effective_json(const EffectiveParams& e) {
  ordered_json j;
  j["regime"] = to_string(e.regime);
  j["omega_ii"] = e.omega_ii;
  j["chi_ii"] = e.chi_ii;
  j["xi_ii"] = jcplx(e.xi_ii);
  j["omega_pp"] = e.omega_pp;
  j["chi_pp"] = e.chi_pp;
  j["xi_pp"] = jcplx(e.xi_pp);
  j["omega_mm"] = e.omega_mm;
  j["chi_mm"] = e.chi_mm;
  j["xi_mm"] = jcplx(e.xi_mm);
  j["omega_pm"] = e.omega_pm;
  j["chi_pm"] = e.chi_pm;
  j["xi_pm"] = jcplx(e.xi_pm);
  j["xi_pp_alt"] = jcplx(e.xi_pp_alt);
  j["regime_override"] = e.regime_override;
  return j;
}

ordered_json validity_json(const ValidityReport& v) {
  ordered_json j;
  j["ratio_plus"] = v.ratio_plus;
  j["ratio_minus"] = v.ratio_minus;
  j["classification"] = to_string(v.regime);
  j["threshold"] = v.margin_threshold;
  return j;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw ConfigError("cannot open output file \"" + path + "\" for writing");
  }
  out << text;
  if (!out) {
    throw ConfigError("failed writing output file \"" + path + "\"");
  }
}

std::string sweep_out_path(const std::string& base, size_t index) {
  char suffix[32];
  std::snprintf(suffix, sizeof(suffix), "_swp%03zu", index);
  const size_t dot = base.find_last_of('.');
  const size_t slash = base.find_last_of("/\\");
  const bool dot_in_name =
      dot != std::string::npos && (slash == std::string::npos || dot > slash);
  if (dot_in_name) {
    return base.substr(0, dot) + suffix + base.substr(dot);
  }
  return base + suffix;
}

}  // namespace

std::vector<double> parse_sweep_values(const std::string& sweep,
                                       std::string& key_out) {
  const size_t eq = sweep.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("--sweep: expected key=start:stop:steps, got \"" + sweep +
                      "\"");
  }
  key_out = sweep.substr(0, eq);
  static const std::vector<std::string> kSweepable = {
      "omega",   "nu",    "delta", "Delta",   "Omega_abs",  "phi_drive",
      "eta",     "eta_L", "varphi", "t_final", "r_max",     "n_threshold"};
  if (std::find(kSweepable.begin(), kSweepable.end(), key_out) ==
      kSweepable.end()) {
    throw ConfigError("--sweep: key \"" + key_out + "\" is not sweepable");
  }
  const std::string spec = sweep.substr(eq + 1);
  const size_t c1 = spec.find(':');
  const size_t c2 = c1 == std::string::npos ? std::string::npos
                                            : spec.find(':', c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos ||
      spec.find(':', c2 + 1) != std::string::npos) {
    throw ConfigError("--sweep: expected key=start:stop:steps, got \"" + sweep +
                      "\"");
  }
  const auto num = [&](const std::string& s, const char* what) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) {
      throw ConfigError(std::string("--sweep: cannot parse ") + what + " \"" +
                        s + "\"");
    }
    return v;
  };
  const double start = num(spec.substr(0, c1), "start");
  const double stop = num(spec.substr(c1 + 1, c2 - c1 - 1), "stop");
  const double steps_d = num(spec.substr(c2 + 1), "steps");
  const int steps = static_cast<int>(steps_d);
  if (steps < 1 || static_cast<double>(steps) != steps_d) {
    throw ConfigError("--sweep: steps must be a positive integer");
  }
  std::vector<double> values(static_cast<size_t>(steps));
  if (steps == 1) {
    values[0] = start;
  } else {
    for (int i = 0; i < steps; ++i) {
      values[static_cast<size_t>(i)] =
          start + (stop - start) * static_cast<double>(i) /
                      static_cast<double>(steps - 1);
    }
  }
  return values;
}

ResultTable run_experiment(const RunConfig& cfg) {
  SystemParams p = cfg.system;
  std::vector<std::string> warnings = cfg.warnings;
  {
    std::vector<std::string> w = validate(p);
    warnings.insert(warnings.end(), w.begin(), w.end());
  }

  // Detuning resolution for the experiments that define it implicitly.
  bool delta_resolved = false;
  if (cfg.delta_auto &&
      (cfg.experiment == "squeeze" || cfg.experiment == "filter")) {
    SystemParams p0 = p;
    p0.delta = 0.0;
    const EffectiveParams eff0 = resolve_effective(p0, cfg.regime, nullptr);
    if (cfg.experiment == "squeeze") {
      p.delta = eff0.omega_ii;
    } else {
      p.delta = resonance_delta(p0, eff0, cfg.M);
    }
    delta_resolved = true;
  }

  ValidityReport validity;
  const EffectiveParams eff = resolve_effective(p, cfg.regime, &validity);

  ResultTable table;
  ordered_json meta;
  meta["tool"] = "ioncav";
  meta["version"] = kVersion;
  meta["experiment"] = cfg.experiment;
  meta["system"] = system_json(p);
  if (cfg.delta_auto) {
    meta["delta_auto"] = true;
    if (delta_resolved) meta["delta_resolved"] = p.delta;
  }
  if (cfg.n_cav != 0) meta["N_cav"] = cfg.n_cav;
  if (cfg.n_vib != 0) meta["N_vib"] = cfg.n_vib;
  meta["validity"] = validity_json(validity);
  meta["effective"] = effective_json(eff);
  ordered_json results;

  if (cfg.experiment == "params") {
    table.columns = {"ratio_plus",  "ratio_minus", "validity_code",
                     "regime_code", "regime_override",
                     "omega_ii",    "chi_ii",      "xi_ii_re",
                     "xi_ii_im",    "omega_pp",    "chi_pp",
                     "xi_pp_re",    "xi_pp_im",    "omega_mm",
                     "chi_mm",      "xi_mm_re",    "xi_mm_im",
                     "omega_pm",    "chi_pm",      "xi_pm_re",
                     "xi_pm_im",    "xi_pp_alt_re", "xi_pp_alt_im"};
    const double validity_code = validity.regime == RegimeClass::weak ? 0.0
                                 : validity.regime == RegimeClass::strong
                                     ? 1.0
                                     : 2.0;
    const double regime_code = eff.regime == Regime::weak ? 0.0 : 1.0;
    table.rows.push_back(
        {validity.ratio_plus, validity.ratio_minus, validity_code, regime_code,
         eff.regime_override ? 1.0 : 0.0, eff.omega_ii, eff.chi_ii,
         eff.xi_ii.real(), eff.xi_ii.imag(), eff.omega_pp, eff.chi_pp,
         eff.xi_pp.real(), eff.xi_pp.imag(), eff.omega_mm, eff.chi_mm,
         eff.xi_mm.real(), eff.xi_mm.imag(), eff.omega_pm, eff.chi_pm,
         eff.xi_pm.real(), eff.xi_pm.imag(), eff.xi_pp_alt.real(),
         eff.xi_pp_alt.imag()});
  } else if (cfg.experiment == "evolve") {
    const Space space = full_space(cfg.n_cav, cfg.n_vib);
    const EffectiveDynamicsReport rep =
        validate_effective_dynamics(p, eff, space, cfg.t_final, cfg.samples);
    warnings.insert(warnings.end(), rep.warnings.begin(), rep.warnings.end());
    table.columns = {"t_seconds", "fidelity",       "population_i", "n_exact",
                     "n_eff",     "var_min_exact",  "var_min_eff"};
    for (size_t i = 0; i < rep.times.size(); ++i) {
      table.rows.push_back({rep.times[i], rep.fidelity[i], rep.population_i[i],
                            rep.n_exact[i], rep.n_eff[i], rep.var_min_exact[i],
                            rep.var_min_eff[i]});
    }
    results["max_infidelity"] = rep.max_infidelity;
  } else if (cfg.experiment == "regimes") {
    const std::vector<RegimeMapRow> map =
        regime_map(p, eff, cfg.delta_list, cfg.m_max);
    table.columns = {"delta",    "m",        "Xi",       "Gamma_re",
                     "Gamma_im", "F_abs",    "resonant", "regime_code"};
    ordered_json feats = ordered_json::array();
    for (const RegimeMapRow& row : map) {
      for (const RegimeReport& rep : row.reports) {
        table.rows.push_back(
            {row.delta, static_cast<double>(rep.m), rep.Xi, rep.Gamma.real(),
             rep.Gamma.imag(), rep.resonant ? 0.0 : std::abs(rep.F),
             rep.resonant ? 1.0 : 0.0,
             static_cast<double>(regime_code(rep.classification))});
      }
      ordered_json f;
      f["delta"] = row.delta;
      f["constant_abs_f"] = row.constant_abs_f;
      f["increasing_abs_f"] = row.increasing_abs_f;
      f["decreasing_abs_f"] = row.decreasing_abs_f;
      f["resonant_ms"] = row.resonant_ms;
      f["classification_changes"] = row.classification_changes;
      feats.push_back(f);
    }
    results["rows"] = feats;
  } else if (cfg.experiment == "squeeze") {
    const SqueezeEngine engine = squeeze_engine_from_string(cfg.engine);
    const SqueezeResult res = run_h1_squeezing(
        p, eff, cfg.t_final, cfg.samples, engine, cfg.n_cav, cfg.beta);
    warnings.insert(warnings.end(), res.warnings.begin(), res.warnings.end());
    table.columns = {"t_seconds", "r",       "R_percent", "theta_min",
                     "var_min",   "var_max", "n_mean"};
    for (const SqueezeSample& s : res.series) {
      table.rows.push_back(
          {s.t, s.r, s.R, s.theta_min, s.var_min, s.var_max, s.n_mean});
    }
    results["engine"] = to_string(engine);
    results["r"] = res.r;
    results["R_percent"] = res.R;
    results["theta_min"] = res.theta_min;
    results["var_min"] = res.var_min;
    results["var_max"] = res.var_max;
    results["n_mean"] = res.n_mean;
  } else if (cfg.experiment == "filter") {
    const FilterResult res =
        run_fock_filter(p, eff, cfg.M, cfg.beta, cfg.t_final, cfg.samples,
                        cfg.n_threshold, cfg.n_cav, cfg.n_vib);
    warnings.insert(warnings.end(), res.warnings.begin(), res.warnings.end());
    table.columns = {"t_seconds", "n_RS", "n_RS_ideal", "n_NS", "norm_joint"};
    for (size_t i = 0; i < res.times.size(); ++i) {
      table.rows.push_back({res.times[i], res.n_RS[i], res.n_RS_ideal[i],
                            res.n_NS[i], res.norm_joint[i]});
    }
    results["M"] = res.M;
    results["success_prob"] = res.success_prob;
    results["bound_NS"] = res.bound_NS;
    results["threshold"] = res.threshold;
    results["fire_prob"] = res.fire_prob;
    results["fidelity_M"] = res.fidelity_M;
    ordered_json probs = ordered_json::array();
    for (int i = 0; i < res.post_measure_state.amps.size(); ++i) {
      probs.push_back(std::norm(res.post_measure_state.amps[i]));
    }
    results["post_measure_probs"] = probs;
    results["notes"] = res.notes;
  } else if (cfg.experiment == "semiclassical") {
    const std::vector<SemiclassicalRun> runs = run_semiclassical_comparison(
        p, eff, cfg.beta_list, cfg.r_max, cfg.samples, cfg.n_cav, cfg.n_vib);
    table.columns = {"t_seconds",   "beta_abs",           "r",
                     "var_theta_0", "var_semiclassical",  "deviation"};
    ordered_json jruns = ordered_json::array();
    for (const SemiclassicalRun& run : runs) {
      warnings.insert(warnings.end(), run.warnings.begin(),
                      run.warnings.end());
      for (const SemiclassicalPoint& pt : run.points) {
        table.rows.push_back({pt.t, std::abs(run.beta), pt.r, pt.var_quantum,
                              pt.var_semiclassical, pt.deviation});
      }
      ordered_json jr;
      jr["beta"] = jcplx(run.beta);
      jr["delta_resolved"] = run.delta_resolved;
      jr["final_deviation"] =
          run.points.empty() ? 0.0 : run.points.back().deviation;
      jruns.push_back(jr);
    }
    results["runs"] = jruns;
  } else {
    throw ConfigError("unknown experiment \"" + cfg.experiment + "\"");
  }

  meta["results"] = results;
  meta["warnings"] = warnings;
  table.metadata = std::move(meta);
  return table;
}

std::string render_csv(const ResultTable& t) {
  std::ostringstream os;
  for (size_t i = 0; i < t.columns.size(); ++i) {
    if (i) os << ",";
    os << t.columns[i];
  }
  os << "\n";
  for (const std::vector<double>& row : t.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) os << ",";
      os << fmt17(row[i]);
    }
    os << "\n";
  }
  return os.str();
}

std::string render_json(const ResultTable& t) {
  ordered_json doc;
  doc["metadata"] = t.metadata;
  doc["columns"] = t.columns;
  doc["rows"] = t.rows;
  return doc.dump(2) + "\n";
}

int run_cli(const CliOptions& opts) {
  try {
    if (opts.config_path.empty()) {
      throw ConfigError("missing --config path");
    }
    RunConfig cfg = load_config(opts.config_path, opts.experiment);
    if (!opts.format_override.empty()) {
      if (opts.format_override != "csv" && opts.format_override != "json") {
        throw ConfigError("--format: expected csv or json, got \"" +
                          opts.format_override + "\"");
      }
      cfg.format = opts.format_override;
    }
    if (!opts.out_override.empty()) cfg.out = opts.out_override;
    const std::string base_out =
        cfg.out.empty() ? cfg.experiment + "." + cfg.format : cfg.out;

    struct Job {
      RunConfig cfg;
      std::string out;
    };
    std::vector<Job> jobs;
    if (opts.sweep.empty()) {
      jobs.push_back({cfg, base_out});
    } else {
      std::string key;
      const std::vector<double> values = parse_sweep_values(opts.sweep, key);
      for (size_t k = 0; k < values.size(); ++k) {
        RunConfig c = cfg;
        if (!set_sweep_value(c, key, values[k])) {
          throw ConfigError("--sweep: key \"" + key + "\" is not sweepable");
        }
        jobs.push_back({std::move(c), sweep_out_path(base_out, k)});
      }
    }

    for (const Job& job : jobs) {
      const auto t0 = std::chrono::steady_clock::now();
      const ResultTable table = run_experiment(job.cfg);
      const std::string text =
          job.cfg.format == "csv" ? render_csv(table) : render_json(table);
      write_file(job.out, text);
      const double wall =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
      ordered_json info = table.metadata;
      info["output"] = job.out;
      info["wall_time_seconds"] = wall;
      info["max_threads"] = kern::max_threads();
      write_file(job.out + ".runinfo.json", info.dump(2) + "\n");
      for (const auto& w : table.metadata["warnings"]) {
        std::cerr << "warning: " << w.get<std::string>() << "\n";
      }
      std::cout << "wrote " << job.out << " (" << table.rows.size()
                << " rows)\n";
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "error[ConfigError]: " << e.what() << "\n";
    return 2;
  } catch (const TruncationError& e) {
    std::cerr << "error[TruncationError]: " << e.what() << "\n";
    return 4;
  } catch (const RegimeError& e) {
    std::cerr << "error[RegimeError]: " << e.what() << "\n";
    return 3;
  } catch (const StepGuardError& e) {
    std::cerr << "error[StepGuardError]: " << e.what() << "\n";
    return 3;
  } catch (const SignatureError& e) {
    std::cerr << "error[SignatureError]: " << e.what() << "\n";
    return 3;
  } catch (const ContractViolation& e) {
    std::cerr << "error[ContractViolation]: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error[unexpected]: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ioncav
