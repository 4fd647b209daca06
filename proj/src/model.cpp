#include "ioncav/model.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <sstream>

namespace ioncav {

namespace {

const double kPi = std::acos(-1.0);

Mat local_lower(int n) {
  Mat a = Mat::Zero(n, n);
  for (int m = 1; m < n; ++m) {
    a(m - 1, m) = std::sqrt(static_cast<double>(m));
  }
  return a;
}

Mat local_q(int n) {
  Mat a = local_lower(n);
  return Mat(a + a.adjoint());
}

Mat local_number(int n) {
  Mat out = Mat::Zero(n, n);
  for (int m = 0; m < n; ++m) out(m, m) = static_cast<double>(m);
  return out;
}

Mat kron2(const Mat& slow, const Mat& fast) {
  return Eigen::kroneckerProduct(slow, fast).eval();
}

Mat kron3(const Mat& cav, const Mat& vib, const Mat& at) {
  return kron2(kron2(cav, vib), at);
}

void require_shape(const Space& s, const std::vector<Factor::Kind>& kinds,
                   const std::string& who) {
  bool ok = s.num_factors() == static_cast<int>(kinds.size());
  for (int k = 0; ok && k < s.num_factors(); ++k) {
    ok = s.factor(k).kind == kinds[k];
  }
  if (!ok) {
    std::string want;
    for (auto k : kinds) {
      if (!want.empty()) want += " x ";
      want += (k == Factor::Kind::boson) ? "boson" : "atom";
    }
    throw SignatureError(who + " needs a " + want + " space, got " +
                         s.describe());
  }
}

void require_full(const Space& s, const std::string& who) {
  require_shape(
      s, {Factor::Kind::boson, Factor::Kind::boson, Factor::Kind::atom}, who);
}

void require_node(const Space& s, const std::string& who) {
  require_shape(s, {Factor::Kind::boson, Factor::Kind::boson}, who);
}

void require_cavity(const Space& s, const std::string& who) {
  require_shape(s, {Factor::Kind::boson}, who);
}

// delta-tuning preconditions: relative tolerance 1e-9.
void require_tuned(double actual, double target, const std::string& what) {
  const double scale =
      std::max({std::abs(actual), std::abs(target), 1e-300});
  if (std::abs(actual - target) > 1e-9 * scale) {
    std::ostringstream os;
    os << what << ": got " << actual << ", need " << target;
    throw RegimeError(os.str());
  }
}

Mat atom_local(Level r, Level s) {
  Mat m = Mat::Zero(3, 3);
  m(static_cast<int>(r), static_cast<int>(s)) = 1.0;
  return m;
}

// lambda1 |g><i| + lambda2 |i><e| (atomic raising chain of the couplings).
Mat coupling_local(const SystemParams& p) {
  Mat m = Mat::Zero(3, 3);
  m(static_cast<int>(Level::g), static_cast<int>(Level::i)) = p.lambda1;
  m(static_cast<int>(Level::i), static_cast<int>(Level::e)) = p.lambda2;
  return m;
}

}  // namespace

std::vector<std::string> validate(const SystemParams& p) {
  auto nonneg = [](double v, const char* name) {
    if (v < 0.0) {
      std::ostringstream os;
      os << name << " >= 0 violated: got " << v;
      throw RegimeError(os.str());
    }
  };
  nonneg(p.omega, "omega");
  nonneg(p.nu, "nu");
  nonneg(p.Omega_abs, "Omega_abs");
  nonneg(p.eta, "eta");
  nonneg(p.eta_L, "eta_L");
  if (p.eta > 0.3) {
    std::ostringstream os;
    os << "Lamb-Dicke guard eta <= 0.3 violated: got eta = " << p.eta;
    throw RegimeError(os.str());
  }
  std::vector<std::string> warnings;
  if (p.eta > 0.2) {
    std::ostringstream os;
    os << "eta = " << p.eta
       << " > 0.2: cubic Lamb-Dicke corrections are no longer negligible";
    warnings.push_back(os.str());
  }
  return warnings;
}

std::string to_string(Regime r) {
  return r == Regime::weak ? "weak" : "strong";
}

Space full_space(int n_cav, int n_vib) {
  return Space({boson(n_cav), boson(n_vib), atom()});
}

Space node_space(int n_cav, int n_vib) {
  return Space({boson(n_cav), boson(n_vib)});
}

Space cavity_space(int n_cav) { return Space({boson(n_cav)}); }

Mat vib_sin_exact(int n_vib, double eta, double varphi) {
  return hermitian_matrix_function(local_q(n_vib), [=](double x) {
    return cplx(std::sin(eta * x + varphi), 0.0);
  });
}

Mat vib_sin2_exact(int n_vib, double eta, double varphi) {
  return hermitian_matrix_function(local_q(n_vib), [=](double x) {
    const double s = std::sin(eta * x + varphi);
    return cplx(s * s, 0.0);
  });
}

Mat vib_sin2_quadratic(int n_vib, double eta) {
  Mat q = local_q(n_vib);
  return Mat(eta * eta * q * q);
}

Mat vib_drive_exp(int n_vib, double eta_L) {
  return hermitian_matrix_function(local_q(n_vib), [=](double x) {
    return std::polar(1.0, eta_L * x);
  });
}

Mat rotate_vib(const Mat& x, double nu, double t) {
  Mat out(x.rows(), x.cols());
  for (Eigen::Index m = 0; m < x.rows(); ++m) {
    for (Eigen::Index n = 0; n < x.cols(); ++n) {
      out(m, n) = x(m, n) * std::polar(1.0, nu * t * static_cast<double>(m - n));
    }
  }
  return out;
}

Mat build_full_hamiltonian(const SystemParams& p, const Space& space, double t,
                           Frame frame) {
  validate(p);
  require_full(space, "full Hamiltonian");
  const int nc = space.factor(kCavity).dim;
  const int nv = space.factor(kVibration).dim;
  const Mat ic = Mat::Identity(nc, nc);
  const Mat iv = Mat::Identity(nv, nv);
  const Mat ia = Mat::Identity(3, 3);
  const Mat a_low = local_lower(nc);
  const Mat a_raise = a_low.adjoint();
  const cplx drive = std::polar(p.Omega_abs, -p.phi_drive);
  const Mat s_ii = atom_local(Level::i, Level::i);
  const Mat s_eg = atom_local(Level::e, Level::g);
  const Mat coup = coupling_local(p);

  if (frame == Frame::lab) {
    Mat sz = atom_local(Level::e, Level::e) - atom_local(Level::g, Level::g);
    Mat h = p.omega * kron3(local_number(nc), iv, ia) +
            p.nu * kron3(ic, local_number(nv), ia) +
            (p.omega + p.delta) * kron3(ic, iv, sz) +
            p.Delta * kron3(ic, iv, s_ii);
    Mat v1 = kron3(Mat(a_low + a_raise),
                   vib_sin_exact(nv, p.eta, p.varphi), coup);
    Mat v2 = (drive * std::polar(1.0, -2.0 * (p.omega + p.delta) * t)) *
             kron3(ic, vib_drive_exp(nv, p.eta_L), s_eg);
    h += v1 + v1.adjoint() + v2 + v2.adjoint();
    return h;
  }

  Mat lam = std::polar(1.0, -p.delta * t) *
            rotate_vib(vib_sin_exact(nv, p.eta, p.varphi), p.nu, t);
  Mat sig = rotate_vib(vib_drive_exp(nv, p.eta_L), p.nu, t);
  Mat t1 = kron3(a_raise, lam, coup);
  Mat t2 = drive * kron3(ic, sig, s_eg);
  Mat h = t1 + t1.adjoint() + t2 + t2.adjoint() +
          p.Delta * kron3(ic, iv, s_ii);
  return h;
}

Mat dressed_rotation(double phi_drive) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const cplx ph = std::polar(inv_sqrt2, -phi_drive);
  Mat r = Mat::Zero(3, 3);
  // rows: dressed {i, +, -}; cols: bare {g, e, i}
  r(0, 2) = 1.0;
  r(1, 0) = ph;
  r(1, 1) = inv_sqrt2;
  r(2, 0) = -ph;
  r(2, 1) = inv_sqrt2;
  return r;
}

Mat build_dressed_hamiltonian(const SystemParams& p, const Space& space,
                              double t) {
  validate(p);
  require_full(space, "rotated-basis Hamiltonian");
  if (p.eta_L > 0.1) {
    std::ostringstream os;
    os << "rotated-basis builder requires eta_L <= 0.1 (classical-drive "
          "sideband factor ~ 1): got eta_L = "
       << p.eta_L;
    throw RegimeError(os.str());
  }
  const int nc = space.factor(kCavity).dim;
  const int nv = space.factor(kVibration).dim;
  const Mat a_raise = Mat(local_lower(nc).adjoint());
  Mat lam = std::polar(1.0, -p.delta * t) *
            rotate_vib(vib_sin_exact(nv, p.eta, p.varphi), p.nu, t);
  Mat big_a = kron2(a_raise, lam);  // a^dag Lambda on cavity x vibration
  Mat big_ad = big_a.adjoint();
  const cplx l1 = p.lambda1 * std::polar(1.0, -p.phi_drive);
  const cplx l2c = std::conj(p.lambda2);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  Mat wp = inv_sqrt2 * (l1 * big_a + l2c * big_ad);
  Mat wm = (-inv_sqrt2) * (l1 * big_a - l2c * big_ad);
  // atomic slots {i=0, +=1, -=2}
  Mat spi = Mat::Zero(3, 3);
  spi(1, 0) = 1.0;  // |+><i|
  Mat smi = Mat::Zero(3, 3);
  smi(2, 0) = 1.0;  // |-><i|
  Mat h = kron2(wp, spi) + kron2(wm, smi);
  h += Mat(h.adjoint());
  Mat diag = Mat::Zero(3, 3);
  diag(0, 0) = p.Delta;
  diag(1, 1) = p.Omega_abs;
  diag(2, 2) = -p.Omega_abs;
  h += kron2(Mat(Mat::Identity(nc * nv, nc * nv)), diag);
  return h;
}

std::string to_string(Engineered which) {
  switch (which) {
    case Engineered::squeeze_cavity: return "squeeze_cavity";
    case Engineered::two_mode_pairs: return "two_mode_pairs";
    case Engineered::pair_exchange: return "pair_exchange";
    case Engineered::node_squeeze: return "node_squeeze";
    case Engineered::cross_kerr: return "cross_kerr";
    case Engineered::node_full: return "node_full";
    case Engineered::parametric_blocks: return "parametric_blocks";
  }
  throw ContractViolation("unreachable engineered-Hamiltonian tag");
}

Engineered engineered_from_string(const std::string& name) {
  for (auto which :
       {Engineered::squeeze_cavity, Engineered::two_mode_pairs,
        Engineered::pair_exchange, Engineered::node_squeeze,
        Engineered::cross_kerr, Engineered::node_full,
        Engineered::parametric_blocks}) {
    if (to_string(which) == name) return which;
  }
  throw ConfigError("unknown engineered Hamiltonian '" + name +
                    "' (expected squeeze_cavity, two_mode_pairs, "
                    "pair_exchange, node_squeeze, cross_kerr, node_full, or "
                    "parametric_blocks)");
}

double node_frame_frequency(const SystemParams& p,
                            const EffectiveParams& eff) {
  return p.nu + 2.0 * p.eta * p.eta * eff.chi_ii;
}

double block_xi(const SystemParams& p, const EffectiveParams& eff, int m) {
  return p.eta * p.eta * eff.omega_ii * (2.0 * m + 1.0) - p.delta;
}

cplx block_gamma(const SystemParams& p, const EffectiveParams& eff, int m) {
  return 2.0 * p.eta * p.eta * eff.xi_ii * (2.0 * m + 1.0);
}

double resonance_delta(const SystemParams& p, const EffectiveParams& eff,
                       int m) {
  return p.eta * p.eta * eff.omega_ii * (2.0 * m + 1.0);
}

namespace {

void require_node_phase(const SystemParams& p, const std::string& who) {
  if (std::abs(p.varphi) > 1e-9) {
    std::ostringstream os;
    os << who << " requires varphi = 0 (ion at a standing-wave node): got "
       << p.varphi;
    throw RegimeError(os.str());
  }
}

void require_small_delta(const SystemParams& p, double phi_freq,
                         const std::string& who) {
  if (std::abs(p.delta) > phi_freq / 10.0) {
    std::ostringstream os;
    os << who << " requires |delta| <= Phi/10: |delta| = " << std::abs(p.delta)
       << ", Phi/10 = " << phi_freq / 10.0;
    throw RegimeError(os.str());
  }
}

}  // namespace

Mat build_engineered(const SystemParams& p, const EffectiveParams& eff,
                     Engineered which, const Space& space, double t) {
  validate(p);
  const std::string who = to_string(which);
  const double eta2 = p.eta * p.eta;
  const double phi_freq = node_frame_frequency(p, eff);

  if (which == Engineered::squeeze_cavity) {
    require_cavity(space, who);
    if (std::abs(p.varphi - kPi / 2.0) > 1e-9) {
      std::ostringstream os;
      os << who << " requires varphi = pi/2 (ion at an antinode): got "
         << p.varphi;
      throw RegimeError(os.str());
    }
    require_tuned(p.delta, eff.omega_ii, who + " requires delta = omega_ii");
    const int nc = space.factor(0).dim;
    Mat r2 = Mat(local_lower(nc).adjoint());
    r2 = Mat(r2 * r2);
    return Mat(eff.xi_ii * r2 + std::conj(eff.xi_ii) * r2.adjoint());
  }

  require_node(space, who);
  require_node_phase(p, who);
  const int nc = space.factor(kCavity).dim;
  const int nv = space.factor(kVibration).dim;
  const Mat ic = Mat::Identity(nc, nc);
  const Mat nc_op = local_number(nc);
  const Mat raise2 = [&] {
    Mat r = Mat(local_lower(nc).adjoint());
    return Mat(r * r);
  }();
  const Mat vraise2 = [&] {
    Mat r = Mat(local_lower(nv).adjoint());
    return Mat(r * r);
  }();
  const Mat vlower2 = vraise2.adjoint();
  const Mat two_nv_1 =
      Mat(2.0 * local_number(nv) + Mat::Identity(nv, nv));

  switch (which) {
    case Engineered::two_mode_pairs: {
      require_tuned(p.delta, phi_freq, who + " requires delta = +Phi");
      Mat pair = eta2 * eff.xi_ii * kron2(raise2, vraise2);
      return Mat(eta2 * eff.omega_ii * kron2(nc_op, two_nv_1) + pair +
                 pair.adjoint());
    }
    case Engineered::pair_exchange: {
      require_tuned(p.delta, -phi_freq, who + " requires delta = -Phi");
      Mat pair = eta2 * eff.xi_ii * kron2(raise2, vlower2);
      return Mat(eta2 * eff.omega_ii * kron2(nc_op, two_nv_1) + pair +
                 pair.adjoint());
    }
    case Engineered::node_squeeze: {
      require_small_delta(p, phi_freq, who);
      cplx ph = eff.xi_ii * std::polar(1.0, -2.0 * p.delta * t);
      Mat cav = eff.omega_ii * nc_op + ph * raise2 +
                std::conj(ph) * raise2.adjoint();
      return Mat(kron2(cav, Mat(eta2 * two_nv_1)));
    }
    case Engineered::cross_kerr: {
      require_small_delta(p, phi_freq, who);
      if (std::abs(eff.xi_ii) > std::abs(eff.omega_ii) / 10.0) {
        std::ostringstream os;
        os << who << " requires |xi_ii| <= |omega_ii|/10: |xi_ii| = "
           << std::abs(eff.xi_ii)
           << ", |omega_ii|/10 = " << std::abs(eff.omega_ii) / 10.0;
        throw RegimeError(os.str());
      }
      return Mat(eta2 * eff.omega_ii * kron2(nc_op, two_nv_1));
    }
    case Engineered::node_full: {
      cplx ph = eff.xi_ii * std::polar(1.0, -2.0 * p.delta * t);
      Mat cav1 = eff.omega_ii * nc_op + ph * raise2 +
                 std::conj(ph) * raise2.adjoint();
      Mat h = kron2(cav1, Mat(eta2 * two_nv_1));
      // vibrational pair terms oscillating at 2 Phi
      Mat vib_pair = std::polar(1.0, 2.0 * phi_freq * t) * vraise2;
      Mat vib_osc = Mat(vib_pair + vib_pair.adjoint());
      h += kron2(Mat(eff.omega_ii * nc_op + eff.chi_ii * ic),
                 Mat(eta2 * vib_osc));
      // joint pair terms
      Mat joint1 = (eta2 * eff.xi_ii *
                    std::polar(1.0, -2.0 * (p.delta - phi_freq) * t)) *
                   kron2(raise2, vraise2);
      Mat joint2 = (eta2 * eff.xi_ii *
                    std::polar(1.0, -2.0 * (p.delta + phi_freq) * t)) *
                   kron2(raise2, vlower2);
      h += joint1 + joint1.adjoint() + joint2 + joint2.adjoint();
      return h;
    }
    case Engineered::parametric_blocks: {
      require_small_delta(p, phi_freq, who);
      Mat xi_diag = Mat::Zero(nv, nv);
      Mat ga_diag = Mat::Zero(nv, nv);
      for (int m = 0; m < nv; ++m) {
        xi_diag(m, m) = block_xi(p, eff, m);
        ga_diag(m, m) = block_gamma(p, eff, m);
      }
      Mat pair = 0.5 * kron2(raise2, ga_diag);
      return Mat(kron2(nc_op, xi_diag) + pair + pair.adjoint());
    }
    default:
      throw ContractViolation("unreachable engineered-Hamiltonian dispatch");
  }
}

Mat semiclassical_hamiltonian(const SystemParams& p,
                              const EffectiveParams& eff, cplx beta,
                              const Space& space) {
  validate(p);
  require_cavity(space, "semiclassical squeezing form");
  const double b2 = std::norm(beta);
  require_tuned(p.delta, 2.0 * p.eta * p.eta * b2 * eff.omega_ii,
                "semiclassical form requires delta = 2 eta^2 |beta|^2 "
                "omega_ii");
  const int nc = space.factor(0).dim;
  Mat r2 = Mat(local_lower(nc).adjoint());
  r2 = Mat(r2 * r2);
  const cplx coef = 2.0 * p.eta * p.eta * b2 * eff.xi_ii;
  return Mat(coef * r2 + std::conj(coef) * r2.adjoint());
}

}  // namespace ioncav
