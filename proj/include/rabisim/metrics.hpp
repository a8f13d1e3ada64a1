#pragma once

// State metrics: Uhlmann fidelity, entanglement negativity, mean photon
// number / energy, and Wigner functions via displaced parity.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "rabisim/fock.hpp"
#include "rabisim/types.hpp"

namespace rabisim {

// sqrt of a PSD Hermitian matrix; small negative eigenvalues from roundoff
// are clamped to zero.
inline Mat psd_sqrt(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  const Eigen::VectorXd ev = es.eigenvalues();
  Eigen::VectorXd root(ev.size());
  for (long i = 0; i < ev.size(); ++i)
    root(i) = ev(i) > 0.0 ? std::sqrt(ev(i)) : 0.0;
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
}

// Uhlmann fidelity F(rho, sigma) = (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
inline double fidelity(const DensityOperator& rho, const DensityOperator& sigma) {
  if (rho.layout.total_dim() != sigma.layout.total_dim())
    throw DimensionError("fidelity: mismatched dimensions");
  const Mat root = psd_sqrt(rho.mat);
  const Mat inner = root * sigma.mat * root;
  Eigen::SelfAdjointEigenSolver<Mat> es(inner);
  double tr = 0.0;
  for (long i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) > 0.0) tr += std::sqrt(es.eigenvalues()(i));
  return tr * tr;
}

inline double fidelity(const DensityOperator& rho, const StateVector& psi) {
  return ((psi.amps.adjoint() * rho.mat * psi.amps)(0, 0)).real();
}

// Negativity N = (||rho^{T_label}||_1 - 1)/2; the trace norm comes from the
// singular values of the partial transpose.
inline double negativity(const DensityOperator& rho, const std::string& label) {
  const Mat pt = partial_transpose(rho, label);
  Eigen::BDCSVD<Mat> svd(pt);
  return 0.5 * (svd.singularValues().sum() - rho.trace());
}

// Total mean photon number over the given modes.
inline double mean_photon_number(const DensityOperator& rho,
                                 const std::vector<std::string>& labels) {
  double total = 0.0;
  for (const auto& label : labels) {
    const int idx = static_cast<int>(rho.layout.index_of(label));
    const Mat n = embed(number_op(rho.layout.dim(idx)), {label}, rho.layout);
    total += expectation(rho, n);
  }
  return total;
}

// ---------- Wigner function ----------

// Exact displacement operator on a truncated Fock space from the normally
// ordered product D = e^{-|alpha|^2/2} e^{alpha a+} e^{-alpha* a}; the two
// exponentials are finite triangular sums, so no series cutoff is involved.
inline Mat displacement_exact(int dim, Complex alpha) {
  Mat up = Mat::Zero(dim, dim), dn = Mat::Zero(dim, dim);
  std::vector<double> sqrt_fact(dim);
  sqrt_fact[0] = 1.0;
  for (int n = 1; n < dim; ++n)
    sqrt_fact[n] = sqrt_fact[n - 1] * std::sqrt(static_cast<double>(n));
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j <= i; ++j) {
      // <i| e^{alpha a+} |j> = alpha^{i-j} sqrt(i!/j!) / (i-j)!
      Complex term = 1.0;
      for (int k = 0; k < i - j; ++k) term *= alpha / static_cast<double>(k + 1);
      up(i, j) = term * sqrt_fact[i] / sqrt_fact[j];
      // <j| e^{-alpha* a} |i> = (-alpha*)^{i-j} sqrt(i!/j!) / (i-j)!
      Complex term2 = 1.0;
      for (int k = 0; k < i - j; ++k)
        term2 *= -std::conj(alpha) / static_cast<double>(k + 1);
      dn(j, i) = term2 * sqrt_fact[i] / sqrt_fact[j];
    }
  }
  return std::exp(-0.5 * std::norm(alpha)) * up * dn;
}

// W(x, p) = (1/pi) Tr[rho D(alpha) P D(alpha)+], alpha = (x + i p)/sqrt(2);
// normalized as a density over (x, p): integral W dx dp = 1, vacuum peak 1/pi.
inline double wigner_point(const DensityOperator& rho_u, double x, double p) {
  const int dim = static_cast<int>(rho_u.mat.rows());
  // W = (1/pi) Tr[rho D(2 alpha) Pi] with alpha = (x + i p)/sqrt(2).
  // This form has no intermediate-state sum, so it is exact for any state
  // supported inside the truncation (unlike conjugating rho by D).
  const Complex two_alpha(std::sqrt(2.0) * x, std::sqrt(2.0) * p);
  const Mat d = displacement_exact(dim, two_alpha);
  Complex w = 0.0;
  for (int n = 0; n < dim; ++n) {
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    w += sign * (rho_u.mat.row(n) * d.col(n)).value();
  }
  return w.real() / M_PI;
}

struct WignerGrid {
  std::vector<double> x;  // quadrature axis
  std::vector<double> p;  // conjugate axis
  RealMat values;         // values(i, j) = W(x[i], p[j])
};

inline WignerGrid wigner_grid(const DensityOperator& rho_u, double xmin,
                              double xmax, double pmin, double pmax, int nx,
                              int np) {
  if (nx < 2 || np < 2) throw ConfigError("wigner grid needs >= 2 points");
  WignerGrid grid;
  grid.x.resize(nx);
  grid.p.resize(np);
  for (int i = 0; i < nx; ++i)
    grid.x[i] = xmin + (xmax - xmin) * i / (nx - 1);
  for (int j = 0; j < np; ++j)
    grid.p[j] = pmin + (pmax - pmin) * j / (np - 1);
  grid.values.resize(nx, np);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < np; ++j)
      grid.values(i, j) = wigner_point(rho_u, grid.x[i], grid.p[j]);
  return grid;
}

inline double min_wigner(const WignerGrid& grid) {
  return grid.values.minCoeff();
}

}  // namespace rabisim
