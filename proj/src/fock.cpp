#include "ioncav/fock.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numeric>
#include <sstream>

#include "ioncav/kernels.hpp"

namespace ioncav {

Factor boson(int n_levels) {
  if (n_levels < 2) {
    throw SignatureError("boson factor needs at least 2 levels, got " +
                         std::to_string(n_levels));
  }
  return Factor{Factor::Kind::boson, n_levels};
}

Factor atom() { return Factor{Factor::Kind::atom, 3}; }

Space::Space(std::vector<Factor> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) {
    throw SignatureError("space needs at least one factor");
  }
  dim_ = 1;
  for (const auto& f : factors_) dim_ *= f.dim;
  strides_.assign(factors_.size(), 1);
  for (int k = static_cast<int>(factors_.size()) - 2; k >= 0; --k) {
    strides_[k] = strides_[k + 1] * factors_[k + 1].dim;
  }
}

const Factor& Space::factor(int k) const {
  if (k < 0 || k >= num_factors()) {
    throw SignatureError("factor index " + std::to_string(k) +
                         " out of range for " + describe());
  }
  return factors_[k];
}

int Space::stride(int k) const {
  factor(k);  // range check
  return strides_[k];
}

int Space::outer(int k) const {
  factor(k);
  return dim_ / (strides_[k] * factors_[k].dim);
}

bool Space::operator==(const Space& o) const {
  if (factors_.size() != o.factors_.size()) return false;
  for (size_t k = 0; k < factors_.size(); ++k) {
    if (factors_[k].kind != o.factors_[k].kind ||
        factors_[k].dim != o.factors_[k].dim) {
      return false;
    }
  }
  return true;
}

std::string Space::describe() const {
  std::ostringstream os;
  os << "space(";
  for (size_t k = 0; k < factors_.size(); ++k) {
    if (k) os << " x ";
    os << (factors_[k].kind == Factor::Kind::boson ? "boson" : "atom") << "["
       << factors_[k].dim << "]";
  }
  os << ")";
  return os.str();
}

Op zero_op(const Space& s) { return Op{s, Mat::Zero(s.dim(), s.dim())}; }

Op identity(const Space& s) { return Op{s, Mat::Identity(s.dim(), s.dim())}; }

Op embed(const Space& s, int factor_index, const Mat& local) {
  const Factor& f = s.factor(factor_index);
  if (local.rows() != f.dim || local.cols() != f.dim) {
    throw SignatureError("embed: local operator is " +
                         std::to_string(local.rows()) + "x" +
                         std::to_string(local.cols()) + " but factor " +
                         std::to_string(factor_index) + " of " + s.describe() +
                         " has dim " + std::to_string(f.dim));
  }
  Op out = zero_op(s);
  kern::embed_factor(local, s.outer(factor_index), s.stride(factor_index),
                     out.mat);
  return out;
}

Op ladder(const Space& s, int factor_index, LadderKind kind) {
  const Factor& f = s.factor(factor_index);
  if (f.kind != Factor::Kind::boson) {
    throw SignatureError("ladder operator requested on non-bosonic factor " +
                         std::to_string(factor_index) + " of " + s.describe());
  }
  Mat local = Mat::Zero(f.dim, f.dim);
  for (int m = 1; m < f.dim; ++m) {
    const double v = std::sqrt(static_cast<double>(m));
    if (kind == LadderKind::lowering) {
      local(m - 1, m) = v;  // a|m> = sqrt(m)|m-1>
    } else {
      local(m, m - 1) = v;  // a^dag|m-1> = sqrt(m)|m>
    }
  }
  return embed(s, factor_index, local);
}

Op number_op(const Space& s, int factor_index) {
  const Factor& f = s.factor(factor_index);
  if (f.kind != Factor::Kind::boson) {
    throw SignatureError("number operator requested on non-bosonic factor " +
                         std::to_string(factor_index) + " of " + s.describe());
  }
  Mat local = Mat::Zero(f.dim, f.dim);
  for (int m = 0; m < f.dim; ++m) local(m, m) = static_cast<double>(m);
  return embed(s, factor_index, local);
}

Op atom_op(const Space& s, int factor_index, Level r, Level s_level) {
  const Factor& f = s.factor(factor_index);
  if (f.kind != Factor::Kind::atom) {
    throw SignatureError("atomic projector requested on non-atomic factor " +
                         std::to_string(factor_index) + " of " + s.describe());
  }
  Mat local = Mat::Zero(3, 3);
  local(static_cast<int>(r), static_cast<int>(s_level)) = 1.0;
  return embed(s, factor_index, local);
}

double max_abs(const Mat& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

void require_hermitian(const Mat& h, const std::string& what, double rel_tol) {
  const double scale = max_abs(h);
  const double defect = max_abs(Mat(h - h.adjoint()));
  if (defect > rel_tol * std::max(scale, 1e-300)) {
    std::ostringstream os;
    os << what << " is not Hermitian: max |H - H^dag| = " << defect
       << " vs scale " << scale;
    throw ContractViolation(os.str());
  }
}

Mat hermitian_matrix_function(const Mat& x,
                              const std::function<cplx(double)>& f) {
  require_hermitian(x, "operator passed to hermitian_matrix_function");
  Eigen::SelfAdjointEigenSolver<Mat> es(x);
  if (es.info() != Eigen::Success) {
    throw ContractViolation(
        "eigendecomposition failed in hermitian_matrix_function");
  }
  Vec fw(es.eigenvalues().size());
  for (Eigen::Index k = 0; k < fw.size(); ++k) {
    fw(k) = f(es.eigenvalues()(k));
  }
  return es.eigenvectors() * fw.asDiagonal() * es.eigenvectors().adjoint();
}

Op hermitian_function(const Op& x, const std::function<cplx(double)>& f) {
  return Op{x.space, hermitian_matrix_function(x.mat, f)};
}

State fock_state(const Space& s, const std::vector<int>& occupation) {
  if (static_cast<int>(occupation.size()) != s.num_factors()) {
    throw SignatureError("fock_state: got " +
                         std::to_string(occupation.size()) +
                         " occupation numbers for " + s.describe());
  }
  int idx = 0;
  for (int k = 0; k < s.num_factors(); ++k) {
    const int occ = occupation[k];
    if (occ < 0 || occ >= s.factor(k).dim) {
      throw SignatureError("fock_state: occupation " + std::to_string(occ) +
                           " out of range for factor " + std::to_string(k) +
                           " of " + s.describe());
    }
    idx += occ * s.stride(k);
  }
  State psi{s, Vec::Zero(s.dim()), {}};
  psi.amps(idx) = 1.0;
  return psi;
}

State product_state(const Space& s, const std::vector<Vec>& factor_amps) {
  if (static_cast<int>(factor_amps.size()) != s.num_factors()) {
    throw SignatureError("product_state: got " +
                         std::to_string(factor_amps.size()) +
                         " factors for " + s.describe());
  }
  for (int k = 0; k < s.num_factors(); ++k) {
    if (factor_amps[k].size() != s.factor(k).dim) {
      throw SignatureError("product_state: factor " + std::to_string(k) +
                           " amplitude vector has length " +
                           std::to_string(factor_amps[k].size()) +
                           " but factor dim is " +
                           std::to_string(s.factor(k).dim));
    }
  }
  Vec amps = Vec::Ones(1);
  for (int k = 0; k < s.num_factors(); ++k) {
    Vec next(amps.size() * factor_amps[k].size());
    Eigen::Index pos = 0;
    for (Eigen::Index o = 0; o < amps.size(); ++o) {
      for (Eigen::Index v = 0; v < factor_amps[k].size(); ++v) {
        next(pos++) = amps(o) * factor_amps[k](v);
      }
    }
    amps.swap(next);
  }
  return State{s, std::move(amps), {}};
}

Vec coherent_amplitudes(int n_levels, cplx beta) {
  const double nbar = std::norm(beta);
  if (nbar > static_cast<double>(n_levels) / 4.0) {
    std::ostringstream os;
    os << "coherent amplitude |beta|^2 = " << nbar
       << " exceeds n_levels/4 = " << n_levels / 4.0
       << "; raise the truncation (n_levels = " << n_levels << ")";
    throw TruncationError(os.str());
  }
  // Log-space magnitudes keep large |beta| finite before normalization.
  Vec c(n_levels);
  const double arg = std::arg(beta);
  for (int m = 0; m < n_levels; ++m) {
    const double logmag = -0.5 * nbar + (m > 0 ? m * std::log(std::abs(beta)) : 0.0) -
                          0.5 * std::lgamma(static_cast<double>(m) + 1.0);
    c(m) = std::polar(std::exp(logmag), arg * m);
  }
  c /= c.norm();
  return c;
}

State coherent_state(const Space& s, int factor_index, cplx beta) {
  const Factor& f = s.factor(factor_index);
  if (f.kind != Factor::Kind::boson) {
    throw SignatureError("coherent state requested on non-bosonic factor " +
                         std::to_string(factor_index) + " of " + s.describe());
  }
  std::vector<Vec> amps;
  for (int k = 0; k < s.num_factors(); ++k) {
    if (k == factor_index) {
      amps.push_back(coherent_amplitudes(f.dim, beta));
    } else {
      Vec v = Vec::Zero(s.factor(k).dim);
      v(0) = 1.0;
      amps.push_back(std::move(v));
    }
  }
  return product_state(s, amps);
}

cplx expectation(const State& psi, const Op& a) {
  if (psi.space != a.space) {
    throw SignatureError("expectation: state lives on " +
                         psi.space.describe() + " but operator on " +
                         a.space.describe());
  }
  return psi.amps.dot(a.mat * psi.amps);
}

double norm(const State& psi) { return psi.amps.norm(); }

std::optional<std::string> truncation_warning(const State& psi,
                                              int factor_index) {
  const Factor& f = psi.space.factor(factor_index);
  if (f.kind != Factor::Kind::boson) {
    throw SignatureError("truncation check requested on non-bosonic factor " +
                         std::to_string(factor_index));
  }
  const int start = f.dim - std::max(1, f.dim / 10);
  const int stride = psi.space.stride(factor_index);
  const int outer = psi.space.outer(factor_index);
  double top = 0.0;
  for (int o = 0; o < outer; ++o) {
    for (int m = start; m < f.dim; ++m) {
      for (int v = 0; v < stride; ++v) {
        top += std::norm(psi.amps((o * f.dim + m) * stride + v));
      }
    }
  }
  if (top > 1e-6) {
    std::ostringstream os;
    os << "population " << top << " in the top levels (n >= " << start
       << ") of factor " << factor_index
       << "; results may be truncation-limited";
    return os.str();
  }
  return std::nullopt;
}

BosonMoments bosonic_moments(const State& psi, int factor_index) {
  const Factor& f = psi.space.factor(factor_index);
  if (f.kind != Factor::Kind::boson) {
    throw SignatureError("bosonic moments requested on non-bosonic factor " +
                         std::to_string(factor_index));
  }
  const int stride = psi.space.stride(factor_index);
  const int outer = psi.space.outer(factor_index);
  const int n_lv = f.dim;
  BosonMoments out{0.0, 0.0, 0.0};
  for (int o = 0; o < outer; ++o) {
    for (int m = 0; m < n_lv; ++m) {
      for (int v = 0; v < stride; ++v) {
        const Eigen::Index idx = (static_cast<Eigen::Index>(o) * n_lv + m) *
                                     stride + v;
        const cplx amp = psi.amps(idx);
        out.n += m * std::norm(amp);
        if (m >= 1) {
          // <a> couples |m> to |m-1>: conj(psi_{m-1}) sqrt(m) psi_m.
          const cplx below = psi.amps(idx - stride);
          out.a += std::conj(below) * std::sqrt(static_cast<double>(m)) * amp;
        }
        if (m >= 2) {
          const cplx below2 = psi.amps(idx - 2 * stride);
          out.a2 += std::conj(below2) *
                    std::sqrt(static_cast<double>(m) * (m - 1)) * amp;
        }
      }
    }
  }
  return out;
}

double quadrature_variance(const BosonMoments& m, double theta) {
  const cplx ph = std::polar(1.0, -theta);
  const double ex = std::real(m.a * ph);  // <X_theta>
  const double exx = 0.25 * (2.0 * std::real(m.a2 * ph * ph) + 2.0 * m.n + 1.0);
  return exx - ex * ex;
}

double quadrature_variance(const State& psi, int factor_index, double theta) {
  return quadrature_variance(bosonic_moments(psi, factor_index), theta);
}

QuadratureExtrema scan_quadrature(const BosonMoments& m, double step) {
  if (step <= 0.0) {
    throw SignatureError("quadrature scan step must be positive");
  }
  QuadratureExtrema out;
  bool first = true;
  const double pi = std::acos(-1.0);
  for (double theta = 0.0; theta < pi; theta += step) {
    const double v = quadrature_variance(m, theta);
    if (first || v < out.var_min) {
      out.var_min = v;
      out.theta_min = theta;
    }
    if (first || v > out.var_max) {
      out.var_max = v;
      out.theta_max = theta;
    }
    first = false;
  }
  return out;
}

QuadratureExtrema scan_quadrature(const State& psi, int factor_index,
                                  double step) {
  return scan_quadrature(bosonic_moments(psi, factor_index), step);
}

}  // namespace ioncav
