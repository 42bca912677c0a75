#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace wg {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

// Thrown on bad user input (configs, argument domains). CLI maps it to exit code 1.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when an internal solver cannot produce a certified solution. Exit code 2.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Array geometry, dimensions and the uncertainty model. noise_cov must be Hermitian
// positive definite of dimension (tir_len + code_len - 1) * n_rx.
struct Scenario {
  int n_tx = 0;
  int n_rx = 0;
  int code_len = 0;   // L
  int tir_len = 0;    // Q
  double theta_t = 0; // radians
  double tx_spacing = 1.0;
  double rx_spacing = 0.5;
  Mat noise_cov;
  Vec t0;
  double radius = 0;

  int rx_dim() const { return (tir_len + code_len - 1) * n_rx; }
  int code_dim() const { return n_tx * code_len; }
  void validate() const;
};

// Transmit code s = vec(S), column stacking of the n_tx x code_len matrix S,
// so entry n + l*n_tx is transmitter n, chip l.
struct Waveform {
  Vec s;
  double energy = 0;
};

Waveform make_waveform(Vec s);

struct Band {
  double f1 = 0;
  double f2 = 0;
  double weight = 0;
};

struct ConstraintEC {
  double e_t = 0;
};

struct ConstraintCMSC {
  double e_t = 0;
  double delta = 0; // in (0, 2]
  Waveform s0;
};

struct ConstraintSCSC {
  double e_t = 0;
  double delta = 0;
  Waveform s0;
  std::vector<Band> bands;
  double e_i = 0;
};

using ConstraintSet = std::variant<ConstraintEC, ConstraintCMSC, ConstraintSCSC>;

struct IterRecord {
  int iter = 0;
  double objective = 0;
  double gap = 0;
  bool has_gap = false;
  double wall_ms = 0;
};

struct DesignResult {
  Waveform s_opt;
  Vec w_opt;
  Vec t_worst;
  double sinr_worst = 0;
  std::vector<IterRecord> trace;
  bool converged = true;
  std::string note;
  // Constant-modulus designs only: certified cap on the relaxed covariance
  // game at the final adversary iterate; sinr_worst never exceeds it.
  double relaxed_value = 0;
};

} // namespace wg
