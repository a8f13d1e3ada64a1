#pragma once

// Gaussian unitaries and Gaussian-family states on the truncated Fock space.
// All exponentials of (anti-)Hermitian generators go through a Hermitian
// eigendecomposition rather than a series expansion.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "rabisim/fock.hpp"
#include "rabisim/types.hpp"

namespace rabisim {

// exp(i H) for Hermitian H.
inline Mat exp_i_hermitian(const Mat& H) {
  Eigen::SelfAdjointEigenSolver<Mat> es(H);
  const Eigen::VectorXd ev = es.eigenvalues();
  Vec phases(ev.size());
  for (long k = 0; k < ev.size(); ++k)
    phases(k) = Complex(std::cos(ev(k)), std::sin(ev(k)));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

// f(H) for Hermitian H and a real scalar function f.
template <typename F>
inline Mat hermitian_function(const Mat& H, F f) {
  Eigen::SelfAdjointEigenSolver<Mat> es(H);
  const Eigen::VectorXd ev = es.eigenvalues();
  Vec vals(ev.size());
  for (long k = 0; k < ev.size(); ++k) vals(k) = f(ev(k));
  return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
}

// D[alpha] = exp(alpha a† - alpha* a).
inline Mat displacement(int dim, Complex alpha) {
  const Mat a = annihilation_op(dim);
  const Mat gen = alpha * a.adjoint() - std::conj(alpha) * a;  // anti-Hermitian
  return exp_i_hermitian(Complex(0, -1) * gen);
}

// S[r] = exp(-r/2 a†² + r/2 a²); for r > 0 this squeezes the X quadrature:
// the X-variance of S[r]|0> is e^{-2r}/2.
inline Mat squeezing(int dim, double r) {
  const Mat a = annihilation_op(dim);
  const Mat gen = -0.5 * r * (a.adjoint() * a.adjoint()) + 0.5 * r * (a * a);
  return exp_i_hermitian(Complex(0, -1) * gen);
}

// B(T) = exp[i T (a1† a2 + a1 a2†)] on the two-mode layout (mode1, mode2);
// transmittance cos T, reflected amplitudes carry the +i phase.
inline Mat beam_splitter(int dim1, int dim2, double theta) {
  const Mat a1 = kron(annihilation_op(dim1), Mat::Identity(dim2, dim2));
  const Mat a2 = kron(Mat::Identity(dim1, dim1), annihilation_op(dim2));
  const Mat H = a1.adjoint() * a2 + a1 * a2.adjoint();
  return exp_i_hermitian(theta * H);
}

// QND-type X-X coupler exp[i kappa X1 X2]; the strength realized by a weak
// beam splitter of angle T sandwiched between S1[r_tr] and S1[-r_tr] is
// kappa = 2 T cosh(r_tr).
inline Mat qnd_xx(int dim1, int dim2, double kappa) {
  const Mat H =
      kron(quadrature_op(dim1), Mat::Identity(dim2, dim2)) *
      kron(Mat::Identity(dim1, dim1), quadrature_op(dim2));
  return exp_i_hermitian(kappa * H);
}

inline double qnd_strength(double theta, double r_tr) {
  return 2.0 * theta * std::cosh(r_tr);
}

// Squeezing-sandwich construction of the X-X coupler: S1[r] B(T) S1[-r].
inline Mat qnd_xx_sandwich(int dim1, int dim2, double theta, double r_tr) {
  const Mat s_plus = kron(squeezing(dim1, r_tr), Mat::Identity(dim2, dim2));
  const Mat s_minus = kron(squeezing(dim1, -r_tr), Mat::Identity(dim2, dim2));
  return s_plus * beam_splitter(dim1, dim2, theta) * s_minus;
}

inline StateVector vacuum_state(int dim, const std::string& label) {
  return basis_state(ModeLayout{{label, dim}}, {0});
}

inline StateVector fock_state(int dim, const std::string& label, int n) {
  return basis_state(ModeLayout{{label, dim}}, {n});
}

// Coherent state, renormalized on the truncation.
inline StateVector coherent_state(int dim, const std::string& label,
                                  Complex beta) {
  Vec v(dim);
  Complex amp = 1.0;
  v(0) = amp;
  for (int n = 1; n < dim; ++n) {
    amp *= beta / std::sqrt(static_cast<double>(n));
    v(n) = amp;
  }
  v /= v.norm();
  return StateVector(ModeLayout{{label, dim}}, v);
}

// Displaced squeezed ancilla D[alpha] S[r] |0>.
inline StateVector displaced_squeezed_state(int dim, const std::string& label,
                                            Complex alpha, double r) {
  Vec v = Vec::Zero(dim);
  v(0) = 1.0;
  v = displacement(dim, alpha) * (squeezing(dim, r) * v);
  return StateVector(ModeLayout{{label, dim}}, v);
}

// Two-mode squeezed vacuum sum_n lambda^n |n,n>, normalized.
inline StateVector tmsv_state(int dim1, int dim2, const std::string& label1,
                              const std::string& label2, double lambda) {
  const ModeLayout layout{{label1, dim1}, {label2, dim2}};
  Vec v = Vec::Zero(layout.total_dim());
  const int nmax = std::min(dim1, dim2);
  for (int n = 0; n < nmax; ++n)
    v(layout.flat_index({n, n})) = std::pow(lambda, n);
  v /= v.norm();
  return StateVector(layout, v);
}

// Thermal state (geometric photon-number law), as a pure-component ensemble;
// truncated weights are renormalized.
inline PureEnsemble thermal_ensemble(int dim, const std::string& label,
                                     double nbar) {
  PureEnsemble ens;
  ens.layout = ModeLayout{{label, dim}};
  double total = 0.0;
  std::vector<double> w(static_cast<size_t>(dim));
  for (int n = 0; n < dim; ++n) {
    w[static_cast<size_t>(n)] =
        std::pow(nbar / (nbar + 1.0), n) / (nbar + 1.0);
    total += w[static_cast<size_t>(n)];
  }
  for (int n = 0; n < dim; ++n)
    ens.components.emplace_back(w[static_cast<size_t>(n)] / total,
                                fock_state(dim, label, n));
  return ens;
}

// Phase-randomized coherent state: Poissonian photon-number mixture
// p_n = e^{-|beta|^2} |beta|^{2n} / n!, renormalized on the truncation.
inline PureEnsemble prc_ensemble(int dim, const std::string& label,
                                 double beta_mag) {
  PureEnsemble ens;
  ens.layout = ModeLayout{{label, dim}};
  const double mu = beta_mag * beta_mag;
  double total = 0.0;
  std::vector<double> w(static_cast<size_t>(dim));
  double term = std::exp(-mu);
  for (int n = 0; n < dim; ++n) {
    w[static_cast<size_t>(n)] = term;
    total += term;
    term *= mu / static_cast<double>(n + 1);
  }
  for (int n = 0; n < dim; ++n)
    ens.components.emplace_back(w[static_cast<size_t>(n)] / total,
                                fock_state(dim, label, n));
  return ens;
}

inline PureEnsemble pure_ensemble(const StateVector& psi) {
  PureEnsemble ens;
  ens.layout = psi.layout;
  ens.components.emplace_back(1.0, psi);
  return ens;
}

inline DensityOperator ensemble_density(const PureEnsemble& ens) {
  Mat rho = Mat::Zero(ens.layout.total_dim(), ens.layout.total_dim());
  for (const auto& [w, psi] : ens.components)
    rho += w * (psi.amps * psi.amps.adjoint());
  return DensityOperator(ens.layout, rho);
}

// Amplitude-damping (photon loss) Kraus operators for loss fraction gamma:
// K_k = sum_n sqrt(C(n,k) gamma^k (1-gamma)^{n-k}) |n-k><n|.
inline std::vector<Mat> loss_kraus(int dim, double gamma) {
  if (gamma < 0.0 || gamma > 1.0)
    throw ConfigError("loss fraction must lie in [0,1]");
  std::vector<Mat> ks;
  for (int k = 0; k < dim; ++k) {
    Mat K = Mat::Zero(dim, dim);
    bool nonzero = false;
    for (int n = k; n < dim; ++n) {
      double binom = 1.0;
      for (int j = 0; j < k; ++j)
        binom *= static_cast<double>(n - j) / static_cast<double>(j + 1);
      const double amp =
          std::sqrt(binom * std::pow(gamma, k) * std::pow(1.0 - gamma, n - k));
      if (amp != 0.0) nonzero = true;
      K(n - k, n) = amp;
    }
    if (nonzero) ks.push_back(K);
  }
  return ks;
}

// Apply photon loss to one mode of a density operator (Kraus form).
inline DensityOperator loss_channel(const DensityOperator& rho,
                                    const std::string& label, double gamma) {
  if (gamma == 0.0) return rho;
  const int dim = rho.layout.dim(
      static_cast<int>(rho.layout.index_of(label)));
  Mat out = Mat::Zero(rho.mat.rows(), rho.mat.cols());
  for (const Mat& K : loss_kraus(dim, gamma)) {
    const Mat full = embed(K, {label}, rho.layout);
    out += full * rho.mat * full.adjoint();
  }
  return DensityOperator(rho.layout, out);
}

// Reference implementation of the same channel via a beam splitter to a
// vacuum environment mode (cos^2 T = 1 - gamma) that is then traced out.
inline DensityOperator loss_channel_via_environment(const DensityOperator& rho,
                                                    const std::string& label,
                                                    double gamma, int env_dim) {
  if (gamma == 0.0) return rho;
  const int dim = rho.layout.dim(
      static_cast<int>(rho.layout.index_of(label)));
  const ModeLayout env_layout{{"env", env_dim}};
  ModeLayout joint = rho.layout.concat(env_layout);
  Mat env_vac = Mat::Zero(env_dim, env_dim);  // environment starts in vacuum
  env_vac(0, 0) = 1.0;
  const Mat big = kron(rho.mat, env_vac);
  const double theta = std::acos(std::sqrt(1.0 - gamma));
  const Mat bs = beam_splitter(dim, env_dim, theta);
  const Mat full = embed(bs, {label, "env"}, joint);
  DensityOperator mixed(joint, full * big * full.adjoint());
  std::vector<std::string> keep;
  for (const Mode& m : rho.layout.modes()) keep.push_back(m.label);
  return partial_trace(mixed, keep);
}

}  // namespace rabisim
