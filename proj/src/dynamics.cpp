#include "ioncav/dynamics.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "ioncav/kernels.hpp"

namespace ioncav {

namespace {

// sin(x)/x and sinh(x)/x, series-stable through x = 0 so the closed forms
// pass continuously through the critical point.
double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

double sinhc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 + x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sinh(x) / x;
}

}  // namespace

std::string to_string(Branch b) {
  switch (b) {
    case Branch::subcritical: return "subcritical";
    case Branch::critical: return "critical";
    case Branch::supercritical: return "supercritical";
    case Branch::resonant: return "resonant";
  }
  throw ContractViolation("unreachable branch tag");
}

int regime_code(Branch b) {
  switch (b) {
    case Branch::subcritical: return 0;
    case Branch::critical: return 1;
    case Branch::supercritical: return 2;
    case Branch::resonant: return 3;
  }
  throw ContractViolation("unreachable branch tag");
}

Branch classify_branch(double Xi, cplx Gamma, double xi_scale) {
  const double ga = std::abs(Gamma);
  const double axi = std::abs(Xi);
  const double scale = xi_scale > 0.0 ? xi_scale : std::max(axi, ga);
  if (axi <= 1e-12 * scale) return Branch::resonant;
  if (std::abs(ga / axi - 1.0) <= 1e-9) return Branch::critical;
  return ga < axi ? Branch::subcritical : Branch::supercritical;
}

BogoliubovCoefficients bogoliubov(double Xi, cplx Gamma, double t) {
  BogoliubovCoefficients out;
  out.regime = classify_branch(Xi, Gamma);
  const double ga = std::abs(Gamma);
  switch (out.regime) {
    case Branch::resonant: {
      out.w = ga;
      if (ga == 0.0) break;  // free evolution: identity map
      out.f = std::cosh(ga * t);
      out.g = (Gamma / ga) * std::sinh(ga * t);
      break;
    }
    case Branch::critical: {
      out.w = 0.0;
      out.f = cplx(1.0, -Xi * t);
      out.g = Gamma * t;
      break;
    }
    case Branch::subcritical: {
      out.w = std::sqrt(std::abs(Xi * Xi - ga * ga));
      const double x = out.w * t;
      out.f = cplx(std::cos(x), 0.0) - kImag * (Xi * t * sinc(x));
      out.g = Gamma * (t * sinc(x));
      break;
    }
    case Branch::supercritical: {
      out.w = std::sqrt(std::abs(ga * ga - Xi * Xi));
      const double x = out.w * t;
      out.f = cplx(std::cosh(x), 0.0) - kImag * (Xi * t * sinhc(x));
      out.g = Gamma * (t * sinhc(x));
      break;
    }
  }
  return out;
}

BosonMoments bogoliubov_vacuum_moments(const BogoliubovCoefficients& c) {
  BosonMoments m;
  m.a = 0.0;
  m.a2 = -kImag * c.f * c.g;  // <0| a(t) a(t) |0> with a(t) = f a - i g a^dag
  m.n = std::norm(c.g);
  return m;
}

RegimeReport classify(int m, const EffectiveParams& eff,
                      const SystemParams& p) {
  if (m < 0) {
    throw SignatureError("phonon index m must be >= 0, got " +
                         std::to_string(m));
  }
  RegimeReport r;
  r.m = m;
  r.Xi = block_xi(p, eff, m);
  r.Gamma = block_gamma(p, eff, m);
  const double scale =
      std::max(std::abs(resonance_delta(p, eff, m)), std::abs(p.delta));
  r.classification = classify_branch(r.Xi, r.Gamma, scale);
  r.resonant = (r.classification == Branch::resonant);
  if (!r.resonant) r.F = r.Gamma / r.Xi;
  return r;
}

std::vector<Vec> evolve_static(const Mat& h, const Vec& psi0,
                               const std::vector<double>& times) {
  require_hermitian(h, "Hamiltonian passed to evolve_static");
  if (h.rows() != psi0.size()) {
    std::ostringstream os;
    os << "evolve_static: Hamiltonian dim " << h.rows()
       << " does not match state dim " << psi0.size();
    throw SignatureError(os.str());
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  if (es.info() != Eigen::Success) {
    throw ContractViolation("eigendecomposition failed in evolve_static");
  }
  const Vec c0 = es.eigenvectors().adjoint() * psi0;
  Mat samples(psi0.size(), static_cast<Eigen::Index>(times.size()));
  kern::propagate_times(es.eigenvectors(), es.eigenvalues(), c0, times,
                        samples);
  std::vector<Vec> out;
  out.reserve(times.size());
  for (Eigen::Index j = 0; j < samples.cols(); ++j) out.push_back(samples.col(j));
  return out;
}

std::vector<Vec> evolve_applier(const HApplier& apply, double h_norm_bound,
                                const Vec& psi0,
                                const std::vector<double>& times,
                                double dt_target) {
  if (dt_target <= 0.0) {
    throw StepGuardError("time step must be positive, got " +
                         std::to_string(dt_target));
  }
  if (dt_target * h_norm_bound > 0.05 * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "step guard violated: dt * ||H||_max = " << dt_target * h_norm_bound
       << " exceeds 0.05";
    throw StepGuardError(os.str());
  }
  std::vector<Vec> out;
  out.reserve(times.size());
  Vec psi = psi0;
  Vec hpsi(psi.size());
  double t_now = 0.0;
  bool first = true;
  for (double t_target : times) {
    if (t_target < 0.0 || (!first && t_target < t_now)) {
      throw SignatureError(
          "sample times must be non-negative and in ascending order");
    }
    first = false;
    const double span = t_target - t_now;
    if (span > 0.0) {
      const auto nsteps = static_cast<long>(
          std::ceil(span / dt_target - 1e-12));
      const double dt = span / static_cast<double>(std::max(nsteps, 1L));
      for (long k = 0; k < std::max(nsteps, 1L); ++k) {
        const double tm = t_now + (static_cast<double>(k) + 0.5) * dt;
        Vec term = psi;
        Vec acc = psi;
        bool converged = false;
        for (int j = 1; j <= 300; ++j) {
          apply(tm, term, hpsi);
          term = (cplx(0.0, -dt) / static_cast<double>(j)) * hpsi;
          acc += term;
          if (term.norm() <= 1e-16 * acc.norm()) {
            converged = true;
            break;
          }
        }
        if (!converged) {
          throw StepGuardError(
              "midpoint-exponential step did not converge; reduce dt");
        }
        psi = std::move(acc);
      }
      t_now = t_target;
    }
    out.push_back(psi);
  }
  return out;
}

std::vector<Vec> evolve_timedep(const HBuilder& h_of_t, const Vec& psi0,
                                const std::vector<double>& times, double dt) {
  struct Cache {
    double t = std::numeric_limits<double>::quiet_NaN();
    kern::MatRM h;
  };
  auto cache = std::make_shared<Cache>();
  const Eigen::Index dim = psi0.size();
  HApplier apply = [h_of_t, dt, cache, dim](double t, const Vec& in,
                                            Vec& out) {
    if (!(cache->t == t)) {
      Mat h = h_of_t(t);
      if (h.rows() != dim || h.cols() != dim) {
        throw SignatureError("Hamiltonian builder returned a matrix of dim " +
                             std::to_string(h.rows()) +
                             " for a state of dim " + std::to_string(dim));
      }
      require_hermitian(h, "time-dependent Hamiltonian snapshot");
      const double hmax = max_abs(h);
      if (dt * hmax > 0.05 * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "step guard violated: dt * ||H(t)||_max = " << dt * hmax
           << " exceeds 0.05 at t = " << t;
        throw StepGuardError(os.str());
      }
      cache->h = h;
      cache->t = t;
    }
    kern::gemv(cache->h, in, out);
  };
  return evolve_applier(apply, 0.0, psi0, times, dt);
}

}  // namespace ioncav
