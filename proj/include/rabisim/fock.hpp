#pragma once

// Single-mode Fock-space operators and multi-mode tensor plumbing:
// ladder/quadrature/Pauli matrices, tensor products, operator application to
// selected modes, partial trace, partial transpose and normalization.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <type_traits>
#include <vector>

#include "rabisim/types.hpp"

namespace rabisim {

inline Mat annihilation_op(int dim) {
  if (dim < 2) throw DimensionError("annihilation_op needs dim >= 2");
  Mat a = Mat::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

inline Mat creation_op(int dim) { return annihilation_op(dim).adjoint(); }

inline Mat number_op(int dim) {
  Mat n = Mat::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) n(k, k) = static_cast<double>(k);
  return n;
}

// X_theta = (a e^{-i theta} + a† e^{i theta}) / sqrt(2); vacuum variance 1/2.
inline Mat quadrature_op(int dim, double theta = 0.0) {
  const Mat a = annihilation_op(dim);
  const Complex ph(std::cos(theta), std::sin(theta));
  return (a * std::conj(ph) + a.adjoint() * ph) / std::sqrt(2.0);
}

inline Mat parity_op(int dim) {
  Mat p = Mat::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) p(n, n) = (n % 2 == 0) ? 1.0 : -1.0;
  return p;
}

// Qubit operators embedded in the {|0>,|1>} levels of a dim>=2 mode; the
// remaining levels are left untouched (identity block) so exponentials built
// from these stay unitary.
inline Mat pauli_x(int dim) {
  Mat s = Mat::Identity(dim, dim);
  s(0, 0) = 0.0;
  s(1, 1) = 0.0;
  s(0, 1) = 1.0;
  s(1, 0) = 1.0;
  return s;
}

inline Mat pauli_y(int dim) {
  Mat s = Mat::Identity(dim, dim);
  s(0, 0) = 0.0;
  s(1, 1) = 0.0;
  s(0, 1) = Complex(0, -1);
  s(1, 0) = Complex(0, 1);
  return s;
}

inline Mat pauli_z(int dim) {
  Mat s = Mat::Identity(dim, dim);
  s(1, 1) = -1.0;
  return s;
}

inline Mat sigma_plus(int dim) {  // sigma+ |0> = |1>
  Mat s = Mat::Zero(dim, dim);
  s(1, 0) = 1.0;
  return s;
}

inline Mat sigma_minus(int dim) {
  Mat s = Mat::Zero(dim, dim);
  s(0, 1) = 1.0;
  return s;
}

inline Mat kron(const Mat& A, const Mat& B) {
  Mat out(A.rows() * B.rows(), A.cols() * B.cols());
  for (long i = 0; i < A.rows(); ++i)
    for (long j = 0; j < A.cols(); ++j)
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return out;
}

inline Vec kron_vec(const Vec& a, const Vec& b) {
  Vec out(a.size() * b.size());
  for (long i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

inline StateVector tensor(const StateVector& a, const StateVector& b) {
  return StateVector(a.layout.concat(b.layout), kron_vec(a.amps, b.amps));
}

inline StateVector basis_state(const ModeLayout& layout,
                               const std::vector<int>& occupation) {
  Vec v = Vec::Zero(layout.total_dim());
  v(layout.flat_index(occupation)) = 1.0;
  return StateVector(layout, v);
}

// Embed an operator acting on a subset of modes (given in layout order) into
// the full layout.
inline Mat embed(const Mat& op, const std::vector<std::string>& labels,
                 const ModeLayout& layout) {
  const ModeLayout sub = layout.subset(labels);
  if (op.rows() != sub.total_dim())
    throw DimensionError("embed: operator does not match subset dimension");
  const long full = layout.total_dim();
  std::vector<size_t> pos;
  for (int i = 0; i < layout.num_modes(); ++i) {
    if (sub.has(layout.label(i))) pos.push_back(static_cast<size_t>(i));
  }
  Mat out = Mat::Zero(full, full);
  const std::vector<long> sub_strides = sub.strides();
  for (long row = 0; row < full; ++row) {
    const std::vector<int> rmulti = layout.multi_index(row);
    long srow = 0;
    for (size_t k = 0; k < pos.size(); ++k)
      srow += sub_strides[k] * rmulti[pos[k]];
    for (long col = 0; col < full; ++col) {
      const std::vector<int> cmulti = layout.multi_index(col);
      bool same_rest = true;
      long scol = 0;
      size_t k = 0;
      for (size_t i = 0; i < rmulti.size(); ++i) {
        if (k < pos.size() && pos[k] == i) {
          scol += sub_strides[k] * cmulti[i];
          ++k;
        } else if (rmulti[i] != cmulti[i]) {
          same_rest = false;
          break;
        }
      }
      if (same_rest) out(row, col) = op(srow, scol);
    }
  }
  return out;
}

// Apply an operator living on a subset of modes to a state without forming
// the embedded matrix: gathers each target-subspace fiber, multiplies, and
// scatters back.
inline StateVector apply(const Mat& op, const std::vector<std::string>& labels,
                         const StateVector& state) {
  const ModeLayout& layout = state.layout;
  const ModeLayout sub = layout.subset(labels);
  const long sub_dim = sub.total_dim();
  if (op.rows() != sub_dim || op.cols() != sub_dim)
    throw DimensionError("apply: operator does not match subset dimension");

  std::vector<size_t> pos;
  for (int i = 0; i < layout.num_modes(); ++i)
    if (sub.has(layout.label(i))) pos.push_back(static_cast<size_t>(i));

  const std::vector<long> strides = layout.strides();
  const std::vector<long> sub_strides = sub.strides();

  // Enumerate the complement (all non-target modes) and the target fiber.
  std::vector<size_t> rest;
  for (int i = 0; i < layout.num_modes(); ++i) {
    const size_t si = static_cast<size_t>(i);
    if (std::find(pos.begin(), pos.end(), si) == pos.end()) rest.push_back(si);
  }
  long rest_dim = 1;
  for (size_t i : rest) rest_dim *= layout.dim(static_cast<int>(i));

  // Offsets of every target-fiber element relative to a complement base.
  std::vector<long> fiber_offsets(static_cast<size_t>(sub_dim));
  for (long s = 0; s < sub_dim; ++s) {
    const std::vector<int> smulti = sub.multi_index(s);
    long off = 0;
    for (size_t k = 0; k < pos.size(); ++k) off += strides[pos[k]] * smulti[k];
    fiber_offsets[static_cast<size_t>(s)] = off;
  }

  Vec out = Vec::Zero(layout.total_dim());
  Vec fiber(sub_dim);
  for (long r = 0; r < rest_dim; ++r) {
    long base = 0;
    long rr = r;
    for (size_t i = rest.size(); i-- > 0;) {
      const int d = layout.dim(static_cast<int>(rest[i]));
      base += strides[rest[i]] * (rr % d);
      rr /= d;
    }
    for (long s = 0; s < sub_dim; ++s)
      fiber(s) = state.amps(base + fiber_offsets[static_cast<size_t>(s)]);
    const Vec mapped = op * fiber;
    for (long s = 0; s < sub_dim; ++s)
      out(base + fiber_offsets[static_cast<size_t>(s)]) = mapped(s);
  }
  return StateVector(layout, out);
}

inline DensityOperator apply(const Mat& op,
                             const std::vector<std::string>& labels,
                             const DensityOperator& rho) {
  const Mat full = embed(op, labels, rho.layout);
  return DensityOperator(rho.layout, full * rho.mat * full.adjoint());
}

inline DensityOperator to_density(const StateVector& psi) {
  return DensityOperator(psi.layout, psi.amps * psi.amps.adjoint());
}

inline DensityOperator partial_trace(const DensityOperator& rho,
                                     const std::vector<std::string>& keep) {
  const ModeLayout& layout = rho.layout;
  const ModeLayout kept = layout.subset(keep);
  const long kd = kept.total_dim();

  std::vector<size_t> kpos;
  for (int i = 0; i < layout.num_modes(); ++i)
    if (kept.has(layout.label(i))) kpos.push_back(static_cast<size_t>(i));
  std::vector<size_t> tpos;
  for (int i = 0; i < layout.num_modes(); ++i) {
    const size_t si = static_cast<size_t>(i);
    if (std::find(kpos.begin(), kpos.end(), si) == kpos.end()) tpos.push_back(si);
  }

  const std::vector<long> strides = layout.strides();
  const std::vector<long> kept_strides = kept.strides();
  long traced_dim = 1;
  for (size_t i : tpos) traced_dim *= layout.dim(static_cast<int>(i));

  std::vector<long> kept_offsets(static_cast<size_t>(kd));
  for (long s = 0; s < kd; ++s) {
    const std::vector<int> smulti = kept.multi_index(s);
    long off = 0;
    for (size_t k = 0; k < kpos.size(); ++k) off += strides[kpos[k]] * smulti[k];
    kept_offsets[static_cast<size_t>(s)] = off;
  }

  Mat out = Mat::Zero(kd, kd);
  for (long tr = 0; tr < traced_dim; ++tr) {
    long base = 0;
    long rr = tr;
    for (size_t i = tpos.size(); i-- > 0;) {
      const int d = layout.dim(static_cast<int>(tpos[i]));
      base += strides[tpos[i]] * (rr % d);
      rr /= d;
    }
    for (long r = 0; r < kd; ++r)
      for (long c = 0; c < kd; ++c)
        out(r, c) += rho.mat(base + kept_offsets[static_cast<size_t>(r)],
                             base + kept_offsets[static_cast<size_t>(c)]);
  }
  return DensityOperator(kept, out);
}

// Transpose the indices of one mode (partial transpose), returning a plain
// matrix: the result is generally not a density operator.
inline Mat partial_transpose(const DensityOperator& rho,
                             const std::string& label) {
  const ModeLayout& layout = rho.layout;
  const size_t p = layout.index_of(label);
  const std::vector<long> strides = layout.strides();
  const long full = layout.total_dim();
  Mat out(full, full);
  for (long r = 0; r < full; ++r) {
    const std::vector<int> rm = layout.multi_index(r);
    for (long c = 0; c < full; ++c) {
      std::vector<int> cm = layout.multi_index(c);
      std::vector<int> rm2 = rm;
      std::swap(rm2[p], cm[p]);
      out(layout.flat_index(rm2), layout.flat_index(cm)) = rho.mat(r, c);
    }
  }
  return out;
}

inline std::pair<StateVector, double> normalize(const StateVector& psi) {
  const double w = psi.norm2();
  if (w <= 0.0) throw NumericalError("cannot normalize zero state");
  return {StateVector(psi.layout, psi.amps / std::sqrt(w)), w};
}

inline std::pair<DensityOperator, double> normalize(const DensityOperator& rho) {
  const double w = rho.trace();
  if (w <= 0.0) throw NumericalError("cannot normalize zero-trace operator");
  return {DensityOperator(rho.layout, rho.mat / w), w};
}

// Population of the top Fock level of one mode.
inline double top_level_population(const DensityOperator& rho,
                                   const std::string& label) {
  const ModeLayout& layout = rho.layout;
  const size_t p = layout.index_of(label);
  const int top = layout.dim(static_cast<int>(p)) - 1;
  double pop = 0.0;
  const long full = layout.total_dim();
  for (long i = 0; i < full; ++i) {
    if (layout.multi_index(i)[p] == top) pop += rho.mat(i, i).real();
  }
  return pop;
}

inline double top_level_population(const StateVector& psi,
                                   const std::string& label) {
  const ModeLayout& layout = psi.layout;
  const size_t p = layout.index_of(label);
  const int top = layout.dim(static_cast<int>(p)) - 1;
  double pop = 0.0;
  for (long i = 0; i < layout.total_dim(); ++i) {
    if (layout.multi_index(i)[p] == top) pop += std::norm(psi.amps(i));
  }
  return pop;
}

// Truncation guard: raise if any mode holds more than `tol` population in its
// top Fock level (relative to the state weight).
template <typename StateLike>
inline void check_leakage(const StateLike& s, double tol = 1e-6) {
  double weight = 0.0;
  if constexpr (std::is_same_v<StateLike, StateVector>) {
    weight = s.norm2();
  } else {
    weight = s.trace();
  }
  if (weight <= 0.0) return;
  for (const Mode& m : s.layout.modes()) {
    const double pop = top_level_population(s, m.label) / weight;
    if (pop > tol)
      throw LeakageError("top Fock level of mode '" + m.label +
                         "' holds population " + std::to_string(pop) +
                         " (limit " + std::to_string(tol) +
                         "); increase the mode dimension");
  }
}

inline double expectation(const DensityOperator& rho, const Mat& op) {
  return (op * rho.mat).trace().real();
}

}  // namespace rabisim
