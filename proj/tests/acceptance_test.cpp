// End-to-end acceptance gate. Each numbered criterion prints exactly one
// PASS/FAIL line; the process exits nonzero if any criterion fails.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "rabisim/experiment.hpp"

using namespace rabisim;

namespace {

int failures = 0;

void report(int idx, const std::string& what, bool ok,
            const std::string& detail) {
  std::printf("%s criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", idx,
              what.c_str(), detail.c_str());
  if (!ok) ++failures;
}

std::string fmt(double v) { return fmt_double(v); }

// 1. entanglement negativity of the ideal controlled-X-displacement gate
//    acting on vacuum follows 0.5*sqrt(1 - exp(-2 t^2))
void criterion_1() {
  double worst = 0.0;
  for (double t : {0.25, 0.5, 0.7, 1.0, 1.5}) {
    const DensityOperator out =
        evolve_reference(pure_ensemble(vacuum_state(25, "u")),
                         ideal_rabi(25, 3, t), 25, 3, QubitInput::Zero);
    const double want = 0.5 * std::sqrt(1.0 - std::exp(-2.0 * t * t));
    worst = std::max(worst, std::abs(negativity(out, "d") - want));
  }
  report(1, "ideal-gate negativity law on vacuum", worst <= 1e-6,
         "max dev " + fmt(worst) + " tol 1e-6");
}

// 2. mean photon number of the same output follows (t^2 + 1 - exp(-t^2))/2
void criterion_2() {
  double worst = 0.0;
  for (double t : {0.25, 0.5, 0.7, 1.0, 1.5}) {
    const DensityOperator out =
        evolve_reference(pure_ensemble(vacuum_state(25, "u")),
                         ideal_rabi(25, 3, t), 25, 3, QubitInput::Zero);
    const double want = (t * t + 1.0 - std::exp(-t * t)) / 2.0;
    worst = std::max(worst, std::abs(mean_photon_number(out, {"u", "d"}) - want));
  }
  report(2, "ideal-gate energy growth law on vacuum", worst <= 1e-6,
         "max dev " + fmt(worst) + " tol 1e-6");
}

// 3. exchange-type reference gate: exact excitation-number conservation,
//    qubit-superposition negativity |sin 2 tau| / 4, and vacuum fixed point
void criterion_3() {
  double worst = 0.0;
  for (const char* spec : {"coherent:1", "thermal:1", "prc:1"}) {
    const PureEnsemble input = input_from_spec(spec, 25);
    const DensityOperator in_rho = evolve_reference(
        input, Mat::Identity(75, 75), 25, 3, QubitInput::Zero);
    const double e_in = mean_photon_number(in_rho, {"u", "d"});
    for (double tau : {0.25, 0.7, 1.2}) {
      const DensityOperator out = evolve_reference(input, ideal_jc(25, 3, tau),
                                                   25, 3, QubitInput::Zero);
      worst = std::max(worst,
                       std::abs(mean_photon_number(out, {"u", "d"}) - e_in));
    }
  }
  ModeLayout layout{{"u", 25}, {"d", 3}};
  for (double tau : {0.25, 0.7, 1.2}) {
    const Mat gate = ideal_jc(25, 3, tau);
    Vec plus = Vec::Zero(layout.total_dim());
    plus(layout.flat_index({0, 0})) = 1.0 / std::sqrt(2.0);
    plus(layout.flat_index({0, 1})) = 1.0 / std::sqrt(2.0);
    const Vec out = gate * plus;
    const DensityOperator rho(layout, out * out.adjoint());
    worst = std::max(worst, std::abs(negativity(rho, "d") -
                                     std::abs(std::sin(2.0 * tau)) / 4.0));
    const Vec vac = basis_state(layout, {0, 0}).amps;
    worst = std::max(worst, (gate * vac - vac).norm());
  }
  report(3, "exchange-gate conservation, negativity and fixed point",
         worst <= 1e-8, "max dev " + fmt(worst) + " tol 1e-8");
}

// 4. heralded circuit operators match the closed-form Gaussian operators
void criterion_4() {
  const int dim = 25, aux = 12;  // aux 12 covers the kappa = 0.2 case
  double worst = 0.0;
  for (double kappa : {0.05, 0.1, 0.2}) {
    const Mat coupler = qnd_xx(dim, aux, kappa);
    const Vec anc = vacuum_state(aux, "up").amps;
    for (int n : {0, 1}) {
      Mat circuit = Mat::Zero(dim, dim);
      for (int j = 0; j < dim; ++j) {
        Vec col = Vec::Zero(static_cast<long>(dim) * aux);
        col.segment(static_cast<long>(j) * aux, aux) = anc;
        const Vec mapped = coupler * col;
        for (int i = 0; i < dim; ++i)
          circuit(i, j) = mapped(static_cast<long>(i) * aux + n);
      }
      circuit *= central_routing_amplitude();
      const Mat analytic = n == 1 ? analytic_O1(dim, kappa, 0.0, 0.0)
                                  : analytic_O0(dim, kappa, 0.0, 0.0);
      const int m = dim - 2;
      worst = std::max(
          worst, (circuit.topLeftCorner(m, m) - analytic.topLeftCorner(m, m))
                     .cwiseAbs()
                     .maxCoeff());
    }
  }
  report(4, "heralded circuit matches closed-form conditional operators",
         worst <= 1e-8, "max dev " + fmt(worst) + " tol 1e-8");
}

// 5. second-order photon-heralded setup reaches the factorized target
void criterion_5() {
  double worst_f = 1.0;
  for (double t : {0.1, 0.3, 0.5}) {
    SetupConfig cfg;
    cfg.variant = SetupVariant::U2Photon;
    cfg.t = t;
    for (const char* spec : {"vacuum", "coherent:1"}) {
      const PureEnsemble input = input_from_spec(spec, cfg.dims.u);
      const SimulationResult res = run_setup(input, cfg);
      const Mat target_op = rabi_branch_approx(cfg.dims.u, cfg.dims.d, 2, t);
      Vec q = Vec::Zero(cfg.dims.d);
      q(0) = 1.0;
      Vec target = target_op * kron_vec(input.components[0].second.amps, q);
      target /= target.norm();
      worst_f = std::min(
          worst_f, fidelity(res.joint, StateVector(res.joint.layout, target)));
    }
  }
  report(5, "second-order heralded setup fidelity to factorized target",
         worst_f >= 0.99, "min F " + fmt(worst_f) + " threshold 0.99");
}

struct SweepData {
  // rows indexed [variant][input][t index]
  std::vector<std::string> variants{"u2-photon", "u3-photon"};
  std::vector<std::string> inputs{"coherent:1", "prc:1", "thermal:1"};
  std::vector<double> ts;
  // key: variant|input -> per-t rows
  std::map<std::string, std::vector<SweepRow>> rows;
};

SweepData run_acceptance_sweep() {
  SweepData d;
  for (int i = 0; i <= 30; ++i) d.ts.push_back(0.05 * i);
  Config c;
  // thermal and phase-randomized inputs at t up to 1.5 push a few 1e-6 of
  // population past Fock level 24; widen the central mode so every row
  // clears the leakage guard
  c.set("dims.u", "40");
  for (const auto& v : d.variants)
    for (const auto& in : d.inputs) {
      auto& vec = d.rows[v + "|" + in];
      for (double t : d.ts) vec.push_back(compute_sweep_row(c, v, in, t));
    }
  return d;
}

// 6. on the dense strength grid the setups track the ideal gate better than
//    the exchange gate, and the third-order setup beats the second-order one
void criterion_6(const SweepData& d) {
  int bad = 0;
  std::string first = "all rows ordered";
  const auto flag = [&bad, &first](const std::string& msg) {
    if (bad == 0) first = msg;
    ++bad;
  };
  for (const auto& in : d.inputs) {
    const auto& r2 = d.rows.at("u2-photon|" + in);
    const auto& r3 = d.rows.at("u3-photon|" + in);
    for (size_t i = 1; i < d.ts.size(); ++i) {  // t in (0, 1.5]
      for (const auto* row : {&r2[i], &r3[i]}) {
        if (!row->error.empty() || !(row->f_rabi > row->f_jc))
          flag(row->variant + " " + in + " t=" + fmt(row->t) +
               (row->error.empty() ? " F_Rabi=" + fmt(row->f_rabi) +
                                         " !> F_JC=" + fmt(row->f_jc)
                                   : " error: " + row->error));
      }
      if (r3[i].f_rabi < r2[i].f_rabi - 1e-9)
        flag(in + " t=" + fmt(d.ts[i]) + " third-order F " +
             fmt(r3[i].f_rabi) + " < second-order F " + fmt(r2[i].f_rabi));
    }
  }
  report(6, "setup fidelity ordering across the strength sweep", bad == 0,
         bad == 0 ? first
                  : "first: " + first + "; " + std::to_string(bad) +
                        " grid points fail in total");
}

// 7. herald success probability: 1/4 limit, monotone decay, ordering
void criterion_7(const SweepData& d) {
  bool ok = true;
  std::string detail = "limit 1/4, monotone, third <= second";
  const auto flag = [&ok, &detail](const std::string& msg) {
    if (ok) detail = msg;
    ok = false;
  };
  // the realized circuits carry O(kappa^2) ~ 1e-2 relative corrections to
  // the idealized (exactly monotone) success law, so monotonicity is tested
  // with a 1e-4 per-step allowance
  const double slack = 1e-4;
  for (const auto& v : d.variants) {
    for (const auto& in : d.inputs) {
      const auto& rows = d.rows.at(v + "|" + in);
      if (std::abs(rows[0].p_success - 0.25) > 1e-3)
        flag(v + " " + in + " P(0)=" + fmt(rows[0].p_success));
      for (size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].p_success > rows[i - 1].p_success + slack)
          flag(v + " " + in + " P not monotone at t=" + fmt(d.ts[i]));
      }
    }
  }
  for (const auto& in : d.inputs) {
    const auto& r2 = d.rows.at("u2-photon|" + in);
    const auto& r3 = d.rows.at("u3-photon|" + in);
    for (size_t i = 0; i < d.ts.size(); ++i) {
      if (r3[i].p_success > r2[i].p_success + 5e-3)
        flag(in + " t=" + fmt(d.ts[i]) + " third-order P " +
             fmt(r3[i].p_success) + " > second-order P " +
             fmt(r2[i].p_success));
    }
  }
  report(7, "herald success probability limit and ordering", ok, detail);
}

// 8. steered output states: genuine Wigner negativity for the heralded
//    setups (also under loss for the third-order one), and rotation-invariant
//    steered exchange-gate output for phase-insensitive inputs
void criterion_8() {
  bool ok = true;
  std::string detail = "negativity present, exchange output radially symmetric";
  const auto flag = [&ok, &detail](const std::string& msg) {
    if (ok) detail = msg;
    ok = false;
  };
  const double t = 0.7;
  for (const char* spec : {"thermal:1", "prc:1"}) {
    const PureEnsemble input = input_from_spec(spec, 25);
    std::map<std::string, DensityOperator> joints;
    SetupConfig cfg;
    cfg.t = t;
    cfg.variant = SetupVariant::U2Photon;
    joints.emplace("u2", run_setup(input, cfg).joint);
    cfg.variant = SetupVariant::U3Photon;
    joints.emplace("u3", run_setup(input, cfg).joint);
    cfg.gamma = 0.15;
    joints.emplace("u3+loss", run_setup(input, cfg).joint);
    joints.emplace("ideal", evolve_reference(input, ideal_rabi(25, 3, t), 25, 3,
                                             QubitInput::Zero));

    for (const char* proc : {"ideal", "u2", "u3"}) {
      const DensityOperator rho = steer(joints.at(proc), SteerOutcome::P1).first;
      const double mw =
          min_wigner(wigner_grid(rho, -4, 4, -4, 4, 61, 61));
      if (!(mw < -1e-3))
        flag(std::string(spec) + " " + proc + " steered min W = " + fmt(mw) +
             " !< -1e-3");
    }
    for (const auto outcome : {SteerOutcome::P0, SteerOutcome::P1}) {
      const DensityOperator rho = steer(joints.at("u3+loss"), outcome).first;
      const double mw = min_wigner(wigner_grid(rho, -4, 4, -4, 4, 61, 61));
      if (!(mw < 0.0))
        flag(std::string(spec) + " lossy third-order " +
             (outcome == SteerOutcome::P0 ? "P0" : "P1") +
             " min W = " + fmt(mw) + " !< 0");
    }
    // steered exchange-gate output of a phase-insensitive input must be
    // rotation invariant in phase space
    const DensityOperator jc_out = steer(
        evolve_reference(input, ideal_jc(25, 3, t), 25, 3, QubitInput::Zero),
        SteerOutcome::P1).first;
    for (double radius : {0.5, 1.0, 1.5, 2.0}) {
      double lo = 1e300, hi = -1e300;
      for (int k = 0; k < 8; ++k) {
        const double phi = 2.0 * M_PI * k / 8.0;
        const double w =
            wigner_point(jc_out, radius * std::cos(phi), radius * std::sin(phi));
        lo = std::min(lo, w);
        hi = std::max(hi, w);
      }
      if (hi - lo > 2e-3)
        flag(std::string(spec) + " exchange output varies by " + fmt(hi - lo) +
             " at radius " + fmt(radius));
    }
  }
  report(8, "steered-state phase-space structure", ok, detail);
}

// 9. built-in validation suite (same code path as `rabi-sim validate`)
void criterion_9() {
  Config c;
  const auto checks = run_validation(c);
  bool ok = true;
  std::string worst = "all checks pass";
  for (const auto& chk : checks) {
    if (!chk.pass) {
      ok = false;
      worst = chk.name + " dev " + fmt(chk.deviation) + " tol " +
              fmt(chk.tolerance);
      break;
    }
  }
  report(9, "built-in validation suite", ok, worst);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  const SweepData sweep = run_acceptance_sweep();
  criterion_6(sweep);
  criterion_7(sweep);
  criterion_8();
  criterion_9();
  return failures == 0 ? 0 : 1;
}
