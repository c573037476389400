#pragma once

#include <iosfwd>
#include <span>
#include <vector>

namespace gbas::lp {

/// minimize c^T x  subject to  A x <= b,  lower <= x <= upper.
struct LinearProgram {
    std::vector<double> objective;
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    std::vector<double> lower;
    std::vector<double> upper;

    std::size_t num_vars() const { return objective.size(); }
    std::size_t num_rows() const { return rows.size(); }

    void add_row(std::vector<double> coeffs, double b);

    /// Throws NumericalFailure when dimensions or bounds are inconsistent.
    void validate() const;
};

enum class LpStatus { optimal, infeasible };

struct LpOutcome {
    LpStatus status = LpStatus::infeasible;
    std::vector<double> x;
    double objective = 0.0;
    int iterations = 0;
    double phase1_residual = 0.0;

    bool optimal() const { return status == LpStatus::optimal; }
};

struct SolverOptions {
    double feasibility_tol = 1e-9;
    double infeasibility_tol = 1e-7;
    int max_iterations = 100000;
};

/// Dense primal simplex over vertices of the bounded polytope, Bland's rule
/// for entering/leaving choices. Rows are scaled to unit max-abs first.
LpOutcome solve(const LinearProgram& lp, const SolverOptions& options = {});

/// Largest violation of any row or bound at x (0 when feasible).
double max_violation(const LinearProgram& lp, std::span<const double> x);

/// Plain-text tableau dump:
///   LP <vars> <rows>
///   c  <c_0> ... <c_n-1>
///   lb <l_0> ... ; ub <u_0> ...
///   r<i> <a_i0> ... <a_in-1> <= <b_i>
void write_tableau(std::ostream& os, const LinearProgram& lp);

}  // namespace gbas::lp
