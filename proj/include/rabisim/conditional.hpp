#pragma once

// Conditional (measurement-induced) operations: detector models, heralded
// projections that contract a mode, the analytic heralded operators of the
// X-X coupler module, their corrected forms, and the measurement-induced
// Gaussian X filter.

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "rabisim/fock.hpp"
#include "rabisim/gaussian.hpp"
#include "rabisim/types.hpp"

namespace rabisim {

// Balanced central-splitter routing amplitude: the analytic heralded
// operators below absorb one factor of it per branch (the partner output
// port is traced out, halving the success probability).
inline double central_routing_amplitude() { return 1.0 / std::sqrt(2.0); }

enum class DetectorModel {
  FockResolving,  // projects onto |n><n|
  OnOff,          // POVM {|0><0|, I - |0><0|}
  TraceOut,       // no projection; the mode is traced out
};

// POVM elements of a detector on a dim-dimensional mode, in outcome order.
inline std::vector<Mat> detector_povm(DetectorModel model, int dim) {
  std::vector<Mat> povm;
  switch (model) {
    case DetectorModel::FockResolving:
      for (int n = 0; n < dim; ++n) {
        Mat e = Mat::Zero(dim, dim);
        e(n, n) = 1.0;
        povm.push_back(e);
      }
      break;
    case DetectorModel::OnOff: {
      Mat vac = Mat::Zero(dim, dim);
      vac(0, 0) = 1.0;
      povm.push_back(vac);
      povm.push_back(Mat::Identity(dim, dim) - vac);
      break;
    }
    case DetectorModel::TraceOut:
      povm.push_back(Mat::Identity(dim, dim));
      break;
  }
  return povm;
}

// Project one mode of a pure state onto Fock level n and contract the mode
// out of the layout. Returns the unnormalized residual state and the
// outcome probability.
inline std::pair<StateVector, double> herald_fock(const StateVector& psi,
                                                  const std::string& label,
                                                  int n) {
  const ModeLayout& layout = psi.layout;
  const size_t p = layout.index_of(label);
  const int d = layout.dim(static_cast<int>(p));
  if (n < 0 || n >= d)
    throw HeraldError("herald outcome " + std::to_string(n) +
                      " outside mode dimension");
  const ModeLayout rest = layout.without(label);
  Vec out = Vec::Zero(rest.total_dim());
  const std::vector<long> strides = layout.strides();
  for (long i = 0; i < rest.total_dim(); ++i) {
    std::vector<int> multi = rest.multi_index(i);
    multi.insert(multi.begin() + static_cast<long>(p), n);
    out(i) = psi.amps(layout.flat_index(multi));
  }
  const double prob = out.squaredNorm();
  return {StateVector(rest, out), prob};
}

// Project one mode of a pure state onto an arbitrary single-mode vector and
// contract the mode out (used for steering projections).
inline std::pair<StateVector, double> herald_vector(const StateVector& psi,
                                                    const std::string& label,
                                                    const Vec& v) {
  const ModeLayout& layout = psi.layout;
  const size_t p = layout.index_of(label);
  const int d = layout.dim(static_cast<int>(p));
  if (v.size() != d) throw HeraldError("herald vector does not match mode");
  const ModeLayout rest = layout.without(label);
  Vec out = Vec::Zero(rest.total_dim());
  for (long i = 0; i < rest.total_dim(); ++i) {
    std::vector<int> multi = rest.multi_index(i);
    multi.insert(multi.begin() + static_cast<long>(p), 0);
    Complex acc = 0.0;
    for (int n = 0; n < d; ++n) {
      multi[p] = n;
      acc += std::conj(v(n)) * psi.amps(layout.flat_index(multi));
    }
    out(i) = acc;
  }
  const double prob = out.squaredNorm();
  return {StateVector(rest, out), prob};
}

// On/off "click" heralding (I - |0><0|) followed by contraction of the mode:
// the result is a Fock-outcome mixture, returned as a density operator.
inline std::pair<DensityOperator, double> herald_onoff_click(
    const StateVector& psi, const std::string& label) {
  const ModeLayout rest = psi.layout.without(label);
  const int d = psi.layout.dim(static_cast<int>(psi.layout.index_of(label)));
  Mat rho = Mat::Zero(rest.total_dim(), rest.total_dim());
  double prob = 0.0;
  for (int n = 1; n < d; ++n) {
    auto [branch, p] = herald_fock(psi, label, n);
    rho += branch.amps * branch.amps.adjoint();
    prob += p;
  }
  return {DensityOperator(rest, rho), prob};
}

// Analytic heralded operator of the X-X coupler module (strength kappa,
// displaced-squeezed ancilla alpha, r) for a single-photon outcome,
// including the balanced central routing amplitude:
//   O1 = sqrt2 (sqrt2 e^{2r} alpha + i kappa X) / (e^{2r}+1)^{3/2}
//        * exp[-(2 e^{2r} alpha^2 - 2i sqrt2 e^{2r} kappa alpha X
//               + kappa^2 X^2) / (2 e^{2r} + 2)].
inline Mat analytic_O1(int dim, double kappa, double alpha, double r) {
  const Mat X = quadrature_op(dim);
  const double e2r = std::exp(2.0 * r);
  const double denom = 2.0 * e2r + 2.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(X);
  const Eigen::VectorXd xs = es.eigenvalues();
  Vec vals(xs.size());
  for (long k = 0; k < xs.size(); ++k) {
    const double x = xs(k);
    const Complex lin =
        std::sqrt(2.0) *
        (Complex(std::sqrt(2.0) * e2r * alpha, kappa * x)) /
        std::pow(e2r + 1.0, 1.5);
    const Complex expo(-2.0 * e2r * alpha * alpha / denom -
                           kappa * kappa * x * x / denom,
                       2.0 * std::sqrt(2.0) * e2r * kappa * alpha * x / denom);
    vals(k) = lin * std::exp(expo);
  }
  return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
}

// Vacuum-outcome partner of analytic_O1 (same exponential, scalar prefactor
// (e^{2r}+1)^{-1/2}).
inline Mat analytic_O0(int dim, double kappa, double alpha, double r) {
  const Mat X = quadrature_op(dim);
  const double e2r = std::exp(2.0 * r);
  const double denom = 2.0 * e2r + 2.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(X);
  const Eigen::VectorXd xs = es.eigenvalues();
  Vec vals(xs.size());
  for (long k = 0; k < xs.size(); ++k) {
    const double x = xs(k);
    const Complex expo(-2.0 * e2r * alpha * alpha / denom -
                           kappa * kappa * x * x / denom,
                       2.0 * std::sqrt(2.0) * e2r * kappa * alpha * x / denom);
    vals(k) = std::exp(expo) / std::sqrt(e2r + 1.0);
  }
  return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
}

// Measurement-induced Gaussian X filter exp[-zeta X^2] (unit prefactor).
// zeta may be negative (anti-squeezing direction); the caller is responsible
// for leakage checks in that case.
inline Mat gaussian_x_filter(int dim, double zeta) {
  return hermitian_function(quadrature_op(dim),
                            [zeta](double x) { return std::exp(-zeta * x * x); });
}

// Third-order ("filtered") heralded operators:
//   O1_3 = i kappa X exp[-kappa^2 X^2 / (4 zeta + 4)] / (sqrt2 (zeta+1)^{3/2})
//   O0_3 = exp[-kappa^2 X^2 / 4]
// These are bare-circuit scale (no routing amplitude folded in).
inline Mat analytic_O1_third(int dim, double kappa, double zeta) {
  const Mat X = quadrature_op(dim);
  Eigen::SelfAdjointEigenSolver<Mat> es(X);
  const Eigen::VectorXd xs = es.eigenvalues();
  Vec vals(xs.size());
  const double scale = std::sqrt(2.0) * std::pow(zeta + 1.0, 1.5);
  for (long k = 0; k < xs.size(); ++k) {
    const double x = xs(k);
    vals(k) = Complex(0, kappa * x) *
              std::exp(-kappa * kappa * x * x / (4.0 * zeta + 4.0)) / scale;
  }
  return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
}

inline Mat analytic_O0_third(int dim, double kappa) {
  return hermitian_function(quadrature_op(dim), [kappa](double x) {
    return std::exp(-kappa * kappa * x * x / 4.0);
  });
}

// Corrective anti-squeezing parameter removing the residual Gaussian of the
// heralded operators: r_corr = -log[kappa^2/(e^{2r}+1) + 1] / 2.
inline double correction_squeeze(double kappa, double r) {
  return -0.5 * std::log(kappa * kappa / (std::exp(2.0 * r) + 1.0) + 1.0);
}

enum class CorrectionStage { None, Numerical, PrePostSqueeze };

// Exact numerical correction operator for the heralded module: drops the
// branch-common scalar prefactor, inverts the displacement-induced phase and
// removes the residual Gaussian, then installs the target Gaussian
// exp[-(t^2/2) X^2] required by the second-order factorized form.
inline Mat numerical_correction(int dim, double kappa, double alpha, double r,
                                double t_target) {
  const double e2r = std::exp(2.0 * r);
  const double denom = 2.0 * e2r + 2.0;
  const double drop = std::sqrt(e2r + 1.0) *
                      std::exp(2.0 * e2r * alpha * alpha / denom);
  return drop * hermitian_function(quadrature_op(dim), [&](double x) {
           // exact inverse of the residual Gaussian and phase, times target
           return std::exp(Complex(kappa * kappa * x * x / denom -
                                       0.5 * t_target * t_target * x * x,
                                   -2.0 * std::sqrt(2.0) * e2r * kappa * alpha *
                                       x / denom));
         });
}

// Corrected heralded operators (numerical stage), at the routing-folded
// scale of analytic_O1/O0: O1 -> i kappa X / sqrt2, O0 -> identity, exactly.
inline std::pair<Mat, Mat> corrected_ops(int dim, double kappa, double alpha,
                                         double r) {
  const Mat corr = numerical_correction(dim, kappa, alpha, r, 0.0);
  return {corr * analytic_O1(dim, kappa, alpha, r),
          corr * analytic_O0(dim, kappa, alpha, r)};
}

// Heralded operator induced on a mode by coupling an auxiliary squeezed
// state |r'> through an X-X coupler of strength kappa' and detecting n
// photons on the auxiliary mode: <n|_aux exp[i kappa' X X_aux] S[r']|0>_aux.
// Validates the hardware view of the Gaussian X filter.
inline Mat induced_filter(int dim, int aux_dim, double kappa_prime,
                          double r_prime, int n_detect) {
  // Build as an operator: apply the coupler to |e_j> x |r'> column by column.
  const Mat coupler = qnd_xx(dim, aux_dim, kappa_prime);
  const Vec aux0 = displaced_squeezed_state(aux_dim, "aux", 0.0, r_prime).amps;
  Mat out = Mat::Zero(dim, dim);
  for (int j = 0; j < dim; ++j) {
    Vec col = Vec::Zero(static_cast<long>(dim) * aux_dim);
    col.segment(static_cast<long>(j) * aux_dim, aux_dim) = aux0;
    const Vec mapped = coupler * col;
    for (int i = 0; i < dim; ++i)
      out(i, j) = mapped(static_cast<long>(i) * aux_dim + n_detect);
  }
  return out;
}

}  // namespace rabisim
