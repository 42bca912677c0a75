#pragma once

#include "wavegame/types.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace wg::solvers {

struct TrsResult {
  Vec t_star;
  double value = 0;      // t_star^H U t_star
  double multiplier = 0; // lambda of the ball constraint
};

// global minimum of t^H U t over ||t - t0|| <= r for PSD U,
// by monotone bisection on the stationarity multiplier
TrsResult min_quad_ball(const Mat& U, const Vec& t0, double r);

// trust-region subproblem for possibly indefinite Hermitian U:
// dual value from the SDP  max gamma s.t. [[U+lambda I, lambda t0],
// [lambda t0^H, lambda(t0^H t0 - r^2) - gamma]] >= 0, lambda >= 0,
// primal recovered through the KKT stationarity system
std::pair<double, TrsResult> trs_dual(const Mat& U, const Vec& t0, double r);

Vec project_ball(const Vec& t, const Vec& t0, double r);

// i.i.d. uniform draws from the complex ball around t0
std::vector<Vec> sample_ball(const Vec& t0, double r, int n, std::uint64_t seed);

} // namespace wg::solvers
