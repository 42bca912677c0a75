#pragma once

#include "wavegame/types.hpp"

#include <utility>
#include <vector>

namespace wg::solvers {

enum class ConicStatus { optimal, infeasible, max_iter };

struct ConicOptions {
  double feastol = 1e-8; // primal/dual feasibility
  double gaptol = 1e-7;  // relative duality gap
  int max_iter = 200;
};

// Affine real expression: terms over scalar variables plus a constant.
struct LinExpr {
  std::vector<std::pair<int, double>> terms;
  double constant = 0;
};

struct ConicSolution {
  ConicStatus status = ConicStatus::max_iter;
  RVec values;                // per scalar variable
  double objective_value = 0; // of the minimized functional
  double kkt_residual = 0;    // max primal/dual feasibility residual at exit
  double rel_gap = 0;
  int iterations = 0;

  cplx complex_value(int re_index) const {
    return {values(re_index), values(re_index + 1)};
  }
};

// Small dense conic program: minimize a linear functional of real scalar variables
// (complex scalars and Hermitian matrices expand into real components) subject to
// LMI blocks, linear equalities, second-order-cone rows and convex quadratic bounds.
// Hermitian LMI blocks are embedded as real symmetric of doubled dimension.
class ConicProblem {
public:
  int add_var(double cost = 0.0);
  // n complex scalars; component 2k is the real part of entry k, 2k+1 the imaginary part
  int add_complex_vars(int n);
  void add_cost(int var, double coeff);

  // Hermitian matrix variable of dimension d, expanded into d*d real components.
  int add_hermitian_var(int d);
  int hvar_diag(int h, int i) const;            // X(i,i)
  int hvar_re(int h, int i, int j) const;       // Re X(i,j), i < j
  int hvar_im(int h, int i, int j) const;       // Im X(i,j), i < j
  void add_cost_trace(int h, const Mat& C);     // += tr(C X), C Hermitian
  void add_psd(int h);                          // X >= 0
  Mat hermitian_value(const ConicSolution& sol, int h) const;

  void add_eq(const std::vector<std::pair<int, double>>& terms, double rhs);
  void add_lp(const LinExpr& expr); // expr >= 0
  // rows[0] >= || rows[1:] ||
  void add_soc(const std::vector<LinExpr>& rows);
  // sum of squares of rows <= bound expression
  void add_quad_le(const std::vector<LinExpr>& rows, const LinExpr& bound);
  // F0 + sum_k x_{vars[k]} * Fk  >=  0  (complex Hermitian coefficients)
  void add_lmi(int dim, const Mat& F0, const std::vector<std::pair<int, Mat>>& terms);

  int num_vars() const { return static_cast<int>(cost_.size()); }

  friend ConicSolution solve_conic(const ConicProblem& p, const ConicOptions& opt);

private:
  struct LmiBlock {
    int dim;
    Mat F0;
    std::vector<std::pair<int, Mat>> terms;
  };
  std::vector<double> cost_;
  std::vector<std::pair<std::vector<std::pair<int, double>>, double>> eqs_;
  std::vector<LinExpr> lp_rows_;
  std::vector<std::vector<LinExpr>> soc_blocks_;
  std::vector<LmiBlock> lmi_blocks_;
  struct HVar {
    int dim;
    int base;
  };
  std::vector<HVar> hvars_;
};

ConicSolution solve_conic(const ConicProblem& p, const ConicOptions& opt = {});

} // namespace wg::solvers
