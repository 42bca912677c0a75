#pragma once

#include "wavegame/trs.hpp"
#include "wavegame/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace wg::games {

// Gradient-descent-ascent driver parameters for the relaxed covariance game.
struct Algo2Params {
  double beta = 0.05; // proximal weight, >= 0
  double eta = 0.002; // target-step size
  double eps = 1e-3;  // stop when the relaxed-objective gap drops below this
  int max_iter = 100;
  int m_trials = 100; // randomization draws
  std::uint64_t seed = 1;
  void validate() const;
};

// Minorize-maximize driver parameters.
struct Algo3Params {
  double eps = 1e-3; // stop when the surrogate ascent per step drops below this
  int max_iter = 50;
  std::optional<Waveform> init_waveform;
  void validate() const;
};

// Iterate of the relaxed covariance game.
struct GameState2 {
  Mat r_s; // PSD with every diagonal entry pinned at e_t/(n_tx*code_len)
  Vec t;   // current target response, inside the uncertainty ball
  int iter = 0;
  double last_gap = 0;
};

// Iterate of the minorize-maximize driver; z_tilde is the surrogate value of
// s_l against the previous iterate and is nondecreasing across the run.
struct MmState {
  Waveform s_l;
  double z_tilde = 0;
  int iter = 0;
};

struct NashReport {
  double target_rel_err = 0; // recomputed worst-case value vs sinr_worst
  double max_violation = 0;  // max over trials of tir(s') - sinr_worst
  int violations = 0;        // trials exceeding sinr_worst by more than 1e-6
  int n_trials = 0;
};

struct FeasibleInit {
  Waveform w;
  double stopband_energy = 0; // floor below which e_I is infeasible
  double kkt_residual = 0;
};

// Worst-case target-impulse-response power of a fixed code: exact ball minimum
// of t^H H(s)^H R_c^{-1} H(s) t. With the matched filter this equals the
// worst-case SINR, so value doubles as both.
solvers::TrsResult worst_case_tir(const Scenario& scn, const Vec& s);

// Energy-constrained equilibrium: SDP over (t, mu) for the worst response,
// code from the principal eigenvector, filter matched to the exact worst t.
DesignResult design_ec(const Scenario& scn, double e_t);

// Numerical equilibrium certificate: recomputes the target's best response and
// probes the radar side with random unit-energy codes.
NashReport verify_nash_ec(const Scenario& scn, double e_t, const DesignResult& result,
                          int n_trials, std::uint64_t seed = 99);

// One exact maximization of trace(M(t) R) - beta*||R - r_s0||_F^2 over the
// fixed-diagonal spectrahedron, via the Frobenius projection of
// r_s0 + M(t)/(2 beta). beta = 0 gets a tiny proximal floor.
Mat algo2_inner_max(const Scenario& scn, const GameState2& state, const Mat& r_s0,
                    double beta, double e_t);

// One projected gradient step of the target: t - eta * 2 U(R) t onto the ball.
Vec algo2_t_step(const Scenario& scn, const GameState2& state, const Mat& r_s_next,
                 double eta);

// Gaussian randomization onto the constant-modulus similarity set: phases of
// draws from CN(0, R (.*) (conj(s0) s0^T)) squeezed into the admissible arc.
std::vector<Waveform> randomize_cm(const Mat& r_s_star, const Waveform& s0, double delta,
                                   double e_t, int m, std::uint64_t seed);

// Constant-modulus similarity equilibrium: gradient-descent-ascent on the
// relaxed covariance game, then randomization synthesis.
DesignResult design_cmsc(const Scenario& scn, const ConstraintCMSC& c, const Algo2Params& p);

// Exact ball minimum of the affine surrogate built at s_l and evaluated at s.
// Touches the true worst-case value when s = s_l and never exceeds it.
double minorizer_value(const Scenario& scn, const Vec& s, const Vec& s_l);

// One surrogate maximization over the spectral-similarity set (SDP over the
// code, the ball multiplier and the epigraph variable).
Waveform mm_step(const Scenario& scn, const ConstraintSCSC& c, const Vec& s_l);

// Minimum stop-band energy code under the energy and similarity constraints;
// its stopband_energy is the smallest admissible e_I.
FeasibleInit feasible_init(const Scenario& scn, const ConstraintSCSC& c);

// Spectral-similarity equilibrium via minorize-maximize; the surrogate trace
// is nondecreasing by construction.
DesignResult design_scsc(const Scenario& scn, const ConstraintSCSC& c, const Algo3Params& p);

} // namespace wg::games
