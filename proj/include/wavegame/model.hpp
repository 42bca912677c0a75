#pragma once

#include "wavegame/types.hpp"

#include <utility>

namespace wg::model {

// ULA steering vectors at theta_t; element k phase 2*pi*spacing*(k-1)*sin(theta).
std::pair<Vec, Vec> steering_vectors(const Scenario& scn);

// (Q+L-1) x L selection matrix with ones where row - col == i (0-based: r - c == i).
RMat shift_matrix(int i, int Q, int L);

// Full ((Q+L-1)*n_rx) x (n_tx*L) matrix G(t) = T (x) (b a^T), T = sum_i t(i) J_{i-1}.
Mat op_G(const Scenario& scn, const Vec& t);

// Full ((Q+L-1)*n_rx) x Q matrix H(s); column i is (J_{i-1} (x) b a^T) s.
Mat op_H(const Scenario& scn, const Vec& s);

// Toeplitz rho^|m-n|, complex-typed but real valued. Requires 0 <= rho < 1.
Mat noise_covariance(double rho, int dim);

// |w^H H(s) t|^2 / (w^H R_c w); scale invariant in w. w must be nonzero.
double sinr(const Scenario& scn, const Vec& s, const Vec& w, const Vec& t);

// Whitened matched filter w = R_c^{-1} H(s) t.
Vec optimal_filter(const Scenario& scn, const Vec& s, const Vec& t);

// First-order Marcum Q(sqrt(2*sinr), sqrt(-2*ln(pfa))); accurate to 1e-9 absolute,
// exactly pfa at sinr = 0.
double detection_probability(double sinr_lin, double pfa);

// sum_k weight_k (R_band_k (x) I_{n_tx}); with s = vec(S) this makes s^H R_I s the
// weighted sum over transmitters of per-row energy in the stop bands.
Mat spectral_matrix(const std::vector<Band>& bands, int L, int n_tx);

// Orthogonal LFM reference code, every entry modulus sqrt(e_t/(n_tx*L)).
Waveform lfm_reference(int n_tx, int L, double e_t);

} // namespace wg::model
