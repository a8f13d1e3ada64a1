#pragma once

// Core value types: state vectors, density operators and operator matrices
// tagged with the mode layout they act on.

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rabisim/layout.hpp"

namespace rabisim {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RealMat = Eigen::MatrixXd;

class DimensionError : public std::runtime_error {
 public:
  explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

class LeakageError : public std::runtime_error {
 public:
  explicit LeakageError(const std::string& what) : std::runtime_error(what) {}
};

class HeraldError : public std::runtime_error {
 public:
  explicit HeraldError(const std::string& what) : std::runtime_error(what) {}
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

struct StateVector {
  ModeLayout layout;
  Vec amps;

  StateVector() = default;
  StateVector(ModeLayout l, Vec a) : layout(std::move(l)), amps(std::move(a)) {
    if (amps.size() != layout.total_dim())
      throw DimensionError("state vector length does not match layout");
  }

  double norm2() const { return amps.squaredNorm(); }
};

struct DensityOperator {
  ModeLayout layout;
  Mat mat;

  DensityOperator() = default;
  DensityOperator(ModeLayout l, Mat m) : layout(std::move(l)), mat(std::move(m)) {
    if (mat.rows() != layout.total_dim() || mat.cols() != layout.total_dim())
      throw DimensionError("density matrix shape does not match layout");
  }

  double trace() const { return mat.trace().real(); }

  // Hermiticity / positivity sanity check; eigenvalues below -tol fail.
  void validate(double tol = 1e-9) const {
    if ((mat - mat.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
      throw NumericalError("density matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Mat> es(mat, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol)
      throw NumericalError("density matrix has eigenvalue below -" +
                           std::to_string(tol));
  }
};

enum class OperatorKind { General, Unitary, Hermitian, Projector, Kraus };

struct OperatorMatrix {
  ModeLayout layout;
  Mat mat;
  OperatorKind kind = OperatorKind::General;
  // Operators that cannot be exact at the top Fock level (ladder-coupling
  // unitaries on a truncated space) are exempt from edge-row checks.
  bool truncation_edge_exempt = false;

  OperatorMatrix() = default;
  OperatorMatrix(ModeLayout l, Mat m, OperatorKind k = OperatorKind::General,
                 bool edge_exempt = false)
      : layout(std::move(l)),
        mat(std::move(m)),
        kind(k),
        truncation_edge_exempt(edge_exempt) {
    if (mat.rows() != layout.total_dim() || mat.cols() != layout.total_dim())
      throw DimensionError("operator shape does not match layout");
  }
};

// A statistical mixture of pure components, used for Fock-diagonal inputs.
struct PureEnsemble {
  ModeLayout layout;
  std::vector<std::pair<double, StateVector>> components;
};

}  // namespace rabisim
