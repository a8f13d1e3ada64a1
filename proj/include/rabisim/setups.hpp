#pragma once

// Interaction references and the conditional simulation pipelines:
//  - ideal Rabi gate exp[i t sigma_x X] and ideal Jaynes-Cummings gate,
//  - truncated/factorized Taylor approximants,
//  - run_setup: the heralded circuits realizing the approximants,
//  - steer: remote projections of the DV mode.

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "rabisim/conditional.hpp"
#include "rabisim/fock.hpp"
#include "rabisim/gaussian.hpp"
#include "rabisim/types.hpp"

namespace rabisim {

// ---------- ideal references on the (cv, dv) layout ----------

// exp[i t sigma_x X] = P+ x e^{i t X} + P- x e^{-i t X}; qubit embedded in
// the {|0>,|1>} levels of the DV mode, higher levels untouched.
inline Mat ideal_rabi(int dim_u, int dim_d, double t) {
  const Mat X = quadrature_op(dim_u);
  const Mat ep = exp_i_hermitian(t * X);
  const Mat em = exp_i_hermitian(-t * X);
  Mat pp = Mat::Zero(dim_d, dim_d), pm = Mat::Zero(dim_d, dim_d);
  pp(0, 0) = pp(0, 1) = pp(1, 0) = pp(1, 1) = 0.5;
  pm(0, 0) = pm(1, 1) = 0.5;
  pm(0, 1) = pm(1, 0) = -0.5;
  Mat rest = Mat::Identity(dim_d, dim_d) - pp - pm;
  return kron(ep, pp) + kron(em, pm) + kron(Mat::Identity(dim_u, dim_u), rest);
}

// Resonant excitation-exchange gate: block form
//   cos[tau sqrt(n+1)] x |1><1| + cos[tau sqrt(n)] x |0><0|
//   + i sin[tau sqrt(n+1)]/sqrt(n+1) a x |1><0|
//   + i sin[tau sqrt(n)]/sqrt(n) a† x |0><1|       (f(0) := tau)
// Exact unitary away from the top Fock level of the CV mode.
inline Mat ideal_jc(int dim_u, int dim_d, double tau) {
  Mat c1 = Mat::Zero(dim_u, dim_u), c0 = Mat::Zero(dim_u, dim_u);
  Mat s1 = Mat::Zero(dim_u, dim_u), s0 = Mat::Zero(dim_u, dim_u);
  for (int n = 0; n < dim_u; ++n) {
    const double rp = std::sqrt(static_cast<double>(n + 1));
    const double r0 = std::sqrt(static_cast<double>(n));
    c1(n, n) = std::cos(tau * rp);
    c0(n, n) = std::cos(tau * r0);
    s1(n, n) = std::sin(tau * rp) / rp;
    s0(n, n) = (n == 0) ? tau : std::sin(tau * r0) / r0;
  }
  const Mat a = annihilation_op(dim_u);
  Mat e11 = Mat::Zero(dim_d, dim_d), e00 = Mat::Zero(dim_d, dim_d);
  Mat e10 = Mat::Zero(dim_d, dim_d), e01 = Mat::Zero(dim_d, dim_d);
  e11(1, 1) = 1.0;
  e00(0, 0) = 1.0;
  e10(1, 0) = 1.0;
  e01(0, 1) = 1.0;
  Mat rest = Mat::Identity(dim_d, dim_d) - e11 - e00;
  const Complex I1(0, 1);
  return kron(c1, e11) + kron(c0, e00) + kron(I1 * (s1 * a), e10) +
         kron(I1 * (s0 * a.adjoint()), e01) +
         kron(Mat::Identity(dim_u, dim_u), rest);
}

// Plain Taylor truncation sum_{k<=j} (i t X sigma_x)^k / k!.
inline Mat taylor_rabi(int dim_u, int dim_d, int order, double t) {
  if (order < 1 || order > 3) throw ConfigError("taylor order must be 1..3");
  const Mat gen = Complex(0, 1) * t * kron(quadrature_op(dim_u), pauli_x(dim_d));
  Mat out = Mat::Identity(gen.rows(), gen.cols());
  Mat power = Mat::Identity(gen.rows(), gen.cols());
  double fact = 1.0;
  for (int k = 1; k <= order; ++k) {
    power = power * gen;
    fact *= k;
    out += power / fact;
  }
  return out;
}

// Factorized conditional approximants (the targets the heralded setups
// realize, unit cos-branch scale):
//   order 2:  e^{-t^2 X^2/2} (1 + i t X sigma_x)
//   order 3:  e^{-t^2 X^2/2} x I_branch + i t X e^{-t^2 X^2/6} x sigma_x
inline Mat rabi_branch_approx(int dim_u, int dim_d, int order, double t) {
  const Mat X = quadrature_op(dim_u);
  const Mat cos_op = hermitian_function(
      X, [t](double x) { return std::exp(-0.5 * t * t * x * x); });
  Mat sin_op;
  if (order == 2) {
    sin_op = Complex(0, 1) * t * X * cos_op;
  } else if (order == 3) {
    sin_op = Complex(0, 1) * t *
             hermitian_function(X, [t](double x) {
               return x * std::exp(-t * t * x * x / 6.0);
             });
  } else {
    throw ConfigError("branch approximant order must be 2 or 3");
  }
  return kron(cos_op, Mat::Identity(dim_d, dim_d)) + kron(sin_op, pauli_x(dim_d));
}

// ---------- setup configuration ----------

enum class SetupVariant { U2Tmsv, U2Photon, U3Tmsv, U3Photon };

inline bool is_third_order(SetupVariant v) {
  return v == SetupVariant::U3Tmsv || v == SetupVariant::U3Photon;
}

inline std::string variant_name(SetupVariant v) {
  switch (v) {
    case SetupVariant::U2Tmsv: return "u2-tmsv";
    case SetupVariant::U2Photon: return "u2-photon";
    case SetupVariant::U3Tmsv: return "u3-tmsv";
    case SetupVariant::U3Photon: return "u3-photon";
  }
  return "?";
}

inline SetupVariant parse_variant(const std::string& s) {
  if (s == "u2-tmsv") return SetupVariant::U2Tmsv;
  if (s == "u2-photon" || s == "u2") return SetupVariant::U2Photon;
  if (s == "u3-tmsv") return SetupVariant::U3Tmsv;
  if (s == "u3-photon" || s == "u3") return SetupVariant::U3Photon;
  throw ConfigError("unknown setup variant '" + s + "'");
}

enum class QubitInput { Zero, One };

struct SetupDims {
  int u = 25;   // CV signal mode
  int up = 6;   // coupler ancilla
  int d = 3;    // DV output mode
  int dp = 3;   // heralding partner mode
  int a = 6;    // auxiliary filter mode
  int env = 4;  // loss environment
};

struct SetupConfig {
  SetupVariant variant = SetupVariant::U2Photon;
  double t = 0.5;          // target interaction strength
  double kappa = 0.1;      // coupler strength (second-order variants)
  double lambda = 0.01;    // two-mode squeezed resource weight
  double alpha = 0.0;      // coupler-ancilla displacement
  double r = 0.0;          // coupler-ancilla squeezing
  double zeta = 2.0;       // induced X-filter strength (third-order variants)
  double r_prime = -1.04;  // auxiliary squeezing feeding the filter
  double theta_A = 0.1;    // auxiliary splitter angle (kept as metadata)
  double gamma = 0.0;      // photon-loss fraction on the CV output
  QubitInput qubit_input = QubitInput::Zero;
  SetupDims dims;
  CorrectionStage corrections = CorrectionStage::Numerical;
  bool vacuum_projection = false;  // project the partner port instead of tracing
  double leakage_tol = 1e-6;

  // Derived splitter angles (radians). The heralded branch amplitudes must
  // reproduce the target strength t; resolve() computes the angles and
  // rejects explicitly pinned values that disagree beyond 1e-6.
  double theta_C = 0.0;
  double theta_D = 0.0;
  bool theta_C_pinned = false;
  bool theta_D_pinned = false;

  double effective_kappa() const {
    return is_third_order(variant) ? std::sqrt(2.0) * t : kappa;
  }

  void resolve() {
    if (t < 0.0) throw ConfigError("t must be non-negative");
    if (lambda <= 0.0 || lambda >= 1.0)
      throw ConfigError("lambda must lie in (0,1)");
    if (kappa <= 0.0) throw ConfigError("kappa must be positive");
    const double want_C = resolved_theta_C();
    const double want_D = resolved_theta_D();
    if (theta_C_pinned && std::abs(theta_C - want_C) > 1e-6)
      throw ConfigError("theta_C inconsistent with coefficient matching");
    if (theta_D_pinned && std::abs(theta_D - want_D) > 1e-6)
      throw ConfigError("theta_D inconsistent with coefficient matching");
    theta_C = want_C;
    theta_D = want_D;
  }

  // Central splitter: balanced for split-photon variants; for the
  // squeezed-resource variants it carries the branch matching.
  double resolved_theta_C() const {
    const double pi4 = std::atan(1.0);
    switch (variant) {
      case SetupVariant::U2Photon:
      case SetupVariant::U3Photon:
        return pi4;
      case SetupVariant::U2Tmsv:
        // tan theta_C = kappa / (sqrt2 t lambda)
        return std::atan2(kappa, std::sqrt(2.0) * t * lambda);
      case SetupVariant::U3Tmsv:
        // tan theta_C = 3 sqrt3 / lambda
        return std::atan2(3.0 * std::sqrt(3.0), lambda);
    }
    return pi4;
  }

  // Photon splitter: carries the branch matching for split-photon variants.
  double resolved_theta_D() const {
    switch (variant) {
      case SetupVariant::U2Photon:
        // tan theta_D = kappa / (sqrt2 t)
        return std::atan2(kappa, std::sqrt(2.0) * t);
      case SetupVariant::U3Photon:
        // tan theta_D = 1 / (3 sqrt3)
        return std::atan2(1.0, 3.0 * std::sqrt(3.0));
      default:
        return 0.0;
    }
  }
};

struct SimulationResult {
  DensityOperator joint;  // normalized state on (u, d)
  double success_probability = 0.0;
  double leakage_max = 0.0;
  std::map<std::string, double> resolved;  // resolved numeric parameters
};

// ---------- heralded pipelines ----------

namespace detail {

// Input-independent circuit pieces, built once per configuration and shared
// across ensemble components.
struct CircuitCache {
  bool third_order = false;
  // second-order pieces
  StateVector lower;    // resource on (d, d')
  StateVector ancilla;  // coupler ancilla on u'
  Mat coupler;          // exp[i kappa X_u X_u'] on (u, u')
  Mat splitter_c;       // central splitter on (u', d')
  Mat corr;             // correction stage on u (identity when disabled)
  Mat swap_dv;          // qubit relabel on d (identity when not needed)
  double anchor = 1.0;
  // third-order pieces
  Mat sin_op, cos_op;
};

inline CircuitCache build_circuit(const SetupConfig& cfg) {
  const SetupDims& D = cfg.dims;
  CircuitCache cc;
  cc.third_order = is_third_order(cfg.variant);
  if (cc.third_order) {
    const double kappa = cfg.effective_kappa();
    cc.sin_op =
        std::pow(cfg.zeta + 1.0, 1.5) * analytic_O1_third(D.u, kappa, cfg.zeta);
    cc.cos_op = analytic_O0_third(D.u, kappa);
    return cc;
  }
  const bool photon = (cfg.variant == SetupVariant::U2Photon);
  cc.lower = photon
                 ? basis_state(ModeLayout{{"d", D.d}, {"dp", D.dp}}, {1, 0})
                 : tmsv_state(D.d, D.dp, "d", "dp", cfg.lambda);
  if (photon) {
    // negative angle fixes the interferometric phase of the reflected branch
    cc.lower = StateVector(cc.lower.layout,
                           beam_splitter(D.d, D.dp, -cfg.theta_D) * cc.lower.amps);
  }
  cc.ancilla = displaced_squeezed_state(D.up, "up", cfg.alpha, cfg.r);
  cc.coupler = qnd_xx(D.u, D.up, cfg.kappa);
  cc.splitter_c = beam_splitter(D.up, D.dp, cfg.theta_C);
  cc.corr = cfg.corrections == CorrectionStage::Numerical
                ? numerical_correction(D.u, cfg.kappa, cfg.alpha, cfg.r, cfg.t)
                : Mat::Identity(D.u, D.u);
  // Native DV pairing of the squeezed-resource variant is the |1>-input
  // convention; relabel the qubit levels when the other input is simulated.
  // The squeezed-resource branch ratio also comes out real, so a local phase
  // gate diag(i, 1) on the DV mode restores the target's imaginary sin
  // branch (the split-photon variant gets it from the negative-angle
  // splitter instead).
  const bool swap = photon ? (cfg.qubit_input == QubitInput::One)
                           : (cfg.qubit_input == QubitInput::Zero);
  Mat dv_fix = Mat::Identity(D.d, D.d);
  if (!photon) dv_fix(0, 0) = Complex(0, 1);
  cc.swap_dv = swap ? Mat(pauli_x(D.d) * dv_fix) : dv_fix;
  // Success anchor: amplitude of the identity branch after the correction
  // stage, which is calibrated to the routing-folded operators while the
  // circuit heralds at bare scale -- hence the extra 1/routing factor.
  cc.anchor = (photon ? std::sin(cfg.theta_C) * std::sin(cfg.theta_D)
                      : std::sin(cfg.theta_C) * cfg.lambda) /
              central_routing_amplitude();
  return cc;
}

// Literal multimode circuit for the second-order variants, one pure CV
// input component. Returns the corrected unnormalized density operator on
// (u, d).
inline DensityOperator run_u2_component(const StateVector& psi_u,
                                        const SetupConfig& cfg,
                                        const CircuitCache& cc) {
  StateVector full = tensor(tensor(psi_u, cc.ancilla), cc.lower);

  full = apply(cc.coupler, {"u", "up"}, full);
  full = apply(cc.splitter_c, {"up", "dp"}, full);

  auto [heralded, prob] = herald_fock(full, "up", 1);
  (void)prob;

  heralded = apply(cc.corr, {"u"}, heralded);

  DensityOperator joint = [&] {
    if (cfg.vacuum_projection) {
      auto [projected, p0] = herald_fock(heralded, "dp", 0);
      (void)p0;
      return to_density(projected);
    }
    return partial_trace(to_density(heralded), {"u", "d"});
  }();

  return apply(cc.swap_dv, {"d"}, joint);
}

// Net-operator assembly for the third-order variants (the filter module is
// evaluated in its heralded effective-operator form; induced_filter carries
// the standalone hardware validation).
inline DensityOperator run_u3_component(const StateVector& psi_u,
                                        const SetupConfig& cfg,
                                        const CircuitCache& cc) {
  const SetupDims& D = cfg.dims;
  const ModeLayout joint_layout{{"u", D.u}, {"d", D.d}};
  Vec q = Vec::Zero(D.d);
  q(cfg.qubit_input == QubitInput::Zero ? 0 : 1) = 1.0;
  Vec qx = Vec::Zero(D.d);
  qx(cfg.qubit_input == QubitInput::Zero ? 1 : 0) = 1.0;

  const Vec n_amps = kron_vec(Vec(cc.cos_op * psi_u.amps), q) +
                     kron_vec(Vec(cc.sin_op * psi_u.amps), qx);
  return to_density(StateVector(joint_layout, n_amps));
}

}  // namespace detail

// Run the configured heralded setup on a CV input ensemble. The output is
// the normalized joint state on (u, d); success_probability is the anchored
// heralding probability (identity-branch scale 1, offline resources
// normalized out, times the 1/4 routing-and-trace penalty).
inline SimulationResult run_setup(const PureEnsemble& input, SetupConfig cfg) {
  cfg.resolve();
  const SetupDims& D = cfg.dims;
  if (input.layout.num_modes() != 1 || input.layout.dim(0) != D.u)
    throw ConfigError("input ensemble must live on the CV mode");

  const ModeLayout joint_layout{{"u", D.u}, {"d", D.d}};
  Mat acc = Mat::Zero(joint_layout.total_dim(), joint_layout.total_dim());
  double weight_in = 0.0, weight_comp = 0.0;  // compensated accumulation
  double psum = 0.0, psum_comp = 0.0;

  const detail::CircuitCache cc = detail::build_circuit(cfg);
  const double anchor = cc.anchor;
  const Mat cos_ref = analytic_O0_third(D.u, std::sqrt(2.0) * cfg.t);

  for (const auto& [w, psi] : input.components) {
    const DensityOperator out = is_third_order(cfg.variant)
                                    ? detail::run_u3_component(psi, cfg, cc)
                                    : detail::run_u2_component(psi, cfg, cc);
    acc += w * out.mat;
    const double tr = w * out.trace();
    // Kahan summation keeps the recombination deterministic and tight.
    double y = tr - weight_comp;
    double s = weight_in + y;
    weight_comp = (s - weight_in) - y;
    weight_in = s;
    if (is_third_order(cfg.variant)) {
      // success bookkeeping of the third-order module: squared norm of the
      // identity branch (the filtered branch enters at resource order)
      const double pc = w * (cos_ref * psi.amps).squaredNorm();
      double y2 = pc - psum_comp;
      double s2 = psum + y2;
      psum_comp = (s2 - psum) - y2;
      psum = s2;
    }
  }

  SimulationResult result;
  DensityOperator unnorm(joint_layout, acc);
  const double tr = unnorm.trace();
  if (tr <= 0.0) throw HeraldError("heralding produced a zero-weight state");
  // truncation guard on the recombined (ensemble-level) output
  check_leakage(unnorm, cfg.leakage_tol);

  if (is_third_order(cfg.variant)) {
    result.success_probability = 0.25 * psum;
  } else {
    result.success_probability = weight_in / (4.0 * anchor * anchor);
  }

  DensityOperator joint(joint_layout, acc / tr);
  if (cfg.gamma > 0.0) joint = loss_channel(joint, "u", cfg.gamma);

  double leak = 0.0;
  for (const Mode& m : joint.layout.modes())
    leak = std::max(leak, top_level_population(joint, m.label));
  result.leakage_max = leak;
  result.joint = joint;
  result.resolved["t"] = cfg.t;
  result.resolved["kappa"] = cfg.effective_kappa();
  result.resolved["lambda"] = cfg.lambda;
  result.resolved["zeta"] = cfg.zeta;
  result.resolved["theta_C"] = cfg.theta_C;
  result.resolved["theta_D"] = cfg.theta_D;
  result.resolved["r_prime"] = cfg.r_prime;
  result.resolved["theta_A"] = cfg.theta_A;
  result.resolved["gamma"] = cfg.gamma;
  return result;
}

inline SimulationResult run_setup(const StateVector& psi_u,
                                  const SetupConfig& cfg) {
  return run_setup(pure_ensemble(psi_u), cfg);
}

// ---------- ideal references on ensembles ----------

inline DensityOperator evolve_reference(const PureEnsemble& input,
                                        const Mat& gate, int dim_u, int dim_d,
                                        QubitInput q) {
  const ModeLayout joint{{"u", dim_u}, {"d", dim_d}};
  Vec qv = Vec::Zero(dim_d);
  qv(q == QubitInput::Zero ? 0 : 1) = 1.0;
  Mat acc = Mat::Zero(joint.total_dim(), joint.total_dim());
  for (const auto& [w, psi] : input.components) {
    const Vec v = gate * kron_vec(psi.amps, qv);
    acc += w * (v * v.adjoint());
  }
  return DensityOperator(joint, acc);
}

// ---------- steering ----------

enum class SteerOutcome { P0, P1, Plus, Minus, General };

// Project the DV mode of the joint state and return the (normalized) CV
// state together with the outcome probability. For the General outcome the
// projection vector is |0> + conj(delta)|1>, normalized.
inline std::pair<DensityOperator, double> steer(const DensityOperator& joint,
                                                SteerOutcome outcome,
                                                Complex delta = 0.0) {
  const ModeLayout& layout = joint.layout;
  const int dim_d = layout.dim(static_cast<int>(layout.index_of("d")));
  Vec v = Vec::Zero(dim_d);
  switch (outcome) {
    case SteerOutcome::P0: v(0) = 1.0; break;
    case SteerOutcome::P1: v(1) = 1.0; break;
    case SteerOutcome::Plus:
      v(0) = v(1) = 1.0 / std::sqrt(2.0);
      break;
    case SteerOutcome::Minus:
      v(0) = 1.0 / std::sqrt(2.0);
      v(1) = -1.0 / std::sqrt(2.0);
      break;
    case SteerOutcome::General: {
      const double n = std::sqrt(1.0 + std::norm(delta));
      v(0) = 1.0 / n;
      v(1) = std::conj(delta) / n;
      break;
    }
  }
  const int dim_u = layout.dim(static_cast<int>(layout.index_of("u")));
  const ModeLayout ulay{{"u", dim_u}};
  Mat out = Mat::Zero(dim_u, dim_u);
  for (int i = 0; i < dim_u; ++i)
    for (int j = 0; j < dim_u; ++j)
      for (int m = 0; m < dim_d; ++m)
        for (int n = 0; n < dim_d; ++n)
          out(i, j) += std::conj(v(m)) * v(n) *
                       joint.mat(static_cast<long>(i) * dim_d + m,
                                 static_cast<long>(j) * dim_d + n);
  DensityOperator rho_u(ulay, out);
  const double prob = rho_u.trace();
  if (prob <= 0.0) throw HeraldError("steering outcome has zero probability");
  return {DensityOperator(ulay, out / prob), prob};
}

}  // namespace rabisim
