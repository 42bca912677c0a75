#include "wavegame/model.hpp"

#include <cmath>

namespace wg {

void Scenario::validate() const {
  if (n_tx < 1 || n_rx < 1 || code_len < 1 || tir_len < 1)
    throw ValidationError("scenario: dimensions must be positive");
  if (radius < 0) throw ValidationError("scenario: radius must be nonnegative");
  if (t0.size() != tir_len) throw ValidationError("scenario: t0 length must equal tir_len");
  if (noise_cov.rows() != rx_dim() || noise_cov.cols() != rx_dim())
    throw ValidationError("scenario: noise_cov dimension mismatch");
  if ((noise_cov - noise_cov.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw ValidationError("scenario: noise_cov must be Hermitian");
}

Waveform make_waveform(Vec s) {
  Waveform w;
  w.energy = s.squaredNorm();
  w.s = std::move(s);
  return w;
}

namespace model {

namespace {
const cplx I_UNIT(0.0, 1.0);
}

std::pair<Vec, Vec> steering_vectors(const Scenario& scn) {
  Vec a(scn.n_tx), b(scn.n_rx);
  double sth = std::sin(scn.theta_t);
  for (int n = 0; n < scn.n_tx; ++n)
    a(n) = std::exp(I_UNIT * (2.0 * M_PI * scn.tx_spacing * n * sth));
  for (int m = 0; m < scn.n_rx; ++m)
    b(m) = std::exp(I_UNIT * (2.0 * M_PI * scn.rx_spacing * m * sth));
  return {a, b};
}

RMat shift_matrix(int i, int Q, int L) {
  if (i < 0 || i > Q - 1) throw ValidationError("shift_matrix: index out of [0, Q-1]");
  RMat J = RMat::Zero(Q + L - 1, L);
  for (int c = 0; c < L; ++c) J(c + i, c) = 1.0;
  return J;
}

Mat op_G(const Scenario& scn, const Vec& t) {
  if (t.size() != scn.tir_len) throw ValidationError("op_G: t length must equal tir_len");
  auto [a, b] = steering_vectors(scn);
  Mat ba = b * a.transpose();
  int Q = scn.tir_len, L = scn.code_len;
  // T = sum_i t(i) J_{i-1} is banded: T(r, c) = t(r - c) for 0 <= r - c < Q
  Mat G = Mat::Zero(scn.rx_dim(), scn.code_dim());
  for (int c = 0; c < L; ++c)
    for (int i = 0; i < Q; ++i)
      G.block((c + i) * scn.n_rx, c * scn.n_tx, scn.n_rx, scn.n_tx) = t(i) * ba;
  return G;
}

Mat op_H(const Scenario& scn, const Vec& s) {
  if (s.size() != scn.code_dim()) throw ValidationError("op_H: s length must equal n_tx*L");
  auto [a, b] = steering_vectors(scn);
  int Q = scn.tir_len, L = scn.code_len, nr = scn.n_rx, nt = scn.n_tx;
  // x = S^T a, then column i of H is vec(b (J_{i-1} x)^T)
  Vec x(L);
  for (int l = 0; l < L; ++l) {
    cplx acc = 0.0;
    for (int n = 0; n < nt; ++n) acc += s(n + l * nt) * a(n);
    x(l) = acc;
  }
  Mat H = Mat::Zero(scn.rx_dim(), Q);
  for (int i = 0; i < Q; ++i)
    for (int l = 0; l < L; ++l)
      H.block((l + i) * nr, i, nr, 1) = x(l) * b;
  return H;
}

Mat noise_covariance(double rho, int dim) {
  if (rho < 0.0 || rho >= 1.0) throw ValidationError("noise_covariance: rho must be in [0,1)");
  Mat R(dim, dim);
  for (int m = 0; m < dim; ++m)
    for (int n = 0; n < dim; ++n) R(m, n) = std::pow(rho, std::abs(m - n));
  return R;
}

double sinr(const Scenario& scn, const Vec& s, const Vec& w, const Vec& t) {
  if (w.size() != scn.rx_dim() || w.norm() == 0.0)
    throw ValidationError("sinr: filter must be nonzero of receive dimension");
  Vec y = op_H(scn, s) * t;
  double num = std::norm(w.dot(y));
  double den = w.dot(scn.noise_cov * w).real();
  return num / den;
}

Vec optimal_filter(const Scenario& scn, const Vec& s, const Vec& t) {
  Vec y = op_H(scn, s) * t;
  return scn.noise_cov.llt().solve(y);
}

double detection_probability(double sinr_lin, double pfa) {
  if (!(pfa > 0.0 && pfa < 1.0)) throw ValidationError("detection_probability: pfa in (0,1)");
  if (sinr_lin < 0.0) throw ValidationError("detection_probability: sinr must be >= 0");
  double m = sinr_lin;         // a^2/2
  double x = -std::log(pfa);   // b^2/2
  double a = std::sqrt(2.0 * m), b = std::sqrt(2.0 * x);
  if (a > 30.0 || b > 30.0) {
    // normal tail approximation, adequate beyond the series range
    return 0.5 * std::erfc((b - a) * M_SQRT1_2);
  }
  // Q1(a,b) = sum_k Pois(k; m) * P[Poisson(x) <= k], inner CDF accumulated recursively
  double pois = std::exp(-m);   // k = 0 term
  double q = pfa;               // x^j e^{-x} / j! at j = 0, exact at sinr = 0
  double cdf = q;
  double total = pois * cdf;
  for (int k = 1; k < 200000; ++k) {
    pois *= m / k;
    q *= x / k;
    cdf += q;
    if (cdf > 1.0) cdf = 1.0;
    total += pois * cdf;
    if (k > m && pois < 1e-17) break;
  }
  return total > 1.0 ? 1.0 : total;
}

Mat spectral_matrix(const std::vector<Band>& bands, int L, int n_tx) {
  for (const auto& b : bands) {
    if (!(b.f1 >= 0.0 && b.f1 < b.f2 && b.f2 <= 1.0))
      throw ValidationError("spectral_matrix: band must satisfy 0 <= f1 < f2 <= 1");
    if (b.weight < 0.0) throw ValidationError("spectral_matrix: weight must be >= 0");
  }
  Mat RL = Mat::Zero(L, L);
  for (const auto& bd : bands) {
    for (int m = 0; m < L; ++m)
      for (int n = 0; n < L; ++n) {
        cplx v;
        if (m == n) {
          v = bd.f2 - bd.f1;
        } else {
          double d = double(m - n);
          v = (std::exp(I_UNIT * (2.0 * M_PI * bd.f2 * d)) -
               std::exp(I_UNIT * (2.0 * M_PI * bd.f1 * d))) /
              (I_UNIT * (2.0 * M_PI * d));
        }
        RL(m, n) += bd.weight * v;
      }
  }
  // R_band (x) I_{n_tx}: matches s = vec(S) with transmitter index fastest
  Mat R = Mat::Zero(L * n_tx, L * n_tx);
  for (int m = 0; m < L; ++m)
    for (int n = 0; n < L; ++n)
      for (int k = 0; k < n_tx; ++k) R(m * n_tx + k, n * n_tx + k) = RL(m, n);
  return R;
}

Waveform lfm_reference(int n_tx, int L, double e_t) {
  if (n_tx < 1 || L < 1 || e_t <= 0) throw ValidationError("lfm_reference: bad dimensions");
  double mod = std::sqrt(e_t / (n_tx * L));
  Vec s(n_tx * L);
  for (int n = 1; n <= n_tx; ++n)
    for (int l = 1; l <= L; ++l) {
      double phase = M_PI * (2.0 * n * (l - 1) + double(l - 1) * (l - 1)) / L;
      s((n - 1) + (l - 1) * n_tx) = mod * std::exp(I_UNIT * phase);
    }
  return make_waveform(std::move(s));
}

} // namespace model
} // namespace wg
