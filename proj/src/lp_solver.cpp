#include "gbas/lp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include <Eigen/Core>
#include <Eigen/LU>

#include "gbas/errors.hpp"

namespace gbas::lp {

void LinearProgram::add_row(std::vector<double> coeffs, double b)
{
    rows.push_back(std::move(coeffs));
    rhs.push_back(b);
}

void LinearProgram::validate() const
{
    const std::size_t n = num_vars();
    if (lower.size() != n || upper.size() != n)
        throw NumericalFailure("bound vectors do not match variable count");
    if (rhs.size() != rows.size()) throw NumericalFailure("rhs count does not match row count");
    for (std::size_t j = 0; j < n; ++j) {
        if (!std::isfinite(objective[j]) || !std::isfinite(lower[j]) || !std::isfinite(upper[j]))
            throw NumericalFailure("non-finite objective or bound");
        if (lower[j] > upper[j]) throw NumericalFailure("lower bound exceeds upper bound");
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != n) throw NumericalFailure("row " + std::to_string(i) + " has wrong width");
        if (!std::isfinite(rhs[i])) throw NumericalFailure("non-finite rhs");
        for (double a : rows[i])
            if (!std::isfinite(a)) throw NumericalFailure("non-finite coefficient");
    }
}

double max_violation(const LinearProgram& lp, std::span<const double> x)
{
    double worst = 0.0;
    for (std::size_t j = 0; j < lp.num_vars(); ++j) {
        worst = std::max(worst, lp.lower[j] - x[j]);
        worst = std::max(worst, x[j] - lp.upper[j]);
    }
    for (std::size_t i = 0; i < lp.num_rows(); ++i) {
        double ax = 0.0;
        for (std::size_t j = 0; j < lp.num_vars(); ++j) ax += lp.rows[i][j] * x[j];
        worst = std::max(worst, ax - lp.rhs[i]);
    }
    return worst;
}

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Shifted problem in y = (z, s) with z = x - lower, 0 <= z <= width and an
// artificial s that relaxes every general row: a_i z - s <= b_i - a_i lower.
// Constraint k enumerates general rows, then z lower bounds, z upper bounds,
// s >= 0 and s <= s_upper.
class VertexSimplex {
public:
    VertexSimplex(RowMatrix a, Eigen::VectorXd b, Eigen::VectorXd width, const SolverOptions& opt)
        : a_(std::move(a)), b_(std::move(b)), width_(std::move(width)), opt_(opt),
          m_(a_.rows()), n_(a_.cols()), dim_(n_ + 1), total_(m_ + 2 * n_ + 2),
          in_basis_(static_cast<std::size_t>(total_), 0)
    {
    }

    Eigen::Index s_lower() const { return m_ + 2 * n_; }
    Eigen::Index s_upper() const { return m_ + 2 * n_ + 1; }

    double dot(Eigen::Index k, const Eigen::VectorXd& v) const
    {
        if (k < m_) return a_.row(k).dot(v.head(n_)) - v(n_);
        if (k < m_ + n_) return -v(k - m_);
        if (k < m_ + 2 * n_) return v(k - m_ - n_);
        if (k == s_lower()) return -v(n_);
        return v(n_);
    }

    double rhs(Eigen::Index k) const
    {
        if (k < m_) return b_(k);
        if (k < m_ + n_) return 0.0;
        if (k < m_ + 2 * n_) return width_(k - m_ - n_);
        if (k == s_lower()) return 0.0;
        return s_upper_value_;
    }

    template <class Row>
    void fill_row(Eigen::Index k, Row&& row) const
    {
        row.setZero();
        if (k < m_) {
            row.head(n_) = a_.row(k);
            row(n_) = -1.0;
        } else if (k < m_ + n_) {
            row(k - m_) = -1.0;
        } else if (k < m_ + 2 * n_) {
            row(k - m_ - n_) = 1.0;
        } else if (k == s_lower()) {
            row(n_) = -1.0;
        } else {
            row(n_) = 1.0;
        }
    }

    // Start at z = 0 with s just large enough to cover every row's violation.
    void initialise()
    {
        double s0 = 0.0;
        Eigen::Index worst = -1;
        for (Eigen::Index i = 0; i < m_; ++i) {
            if (-b_(i) > s0) {
                s0 = -b_(i);
                worst = i;
            }
        }
        s_upper_value_ = s0 + 1.0;
        basis_.clear();
        for (Eigen::Index j = 0; j < n_; ++j) basis_.push_back(m_ + j);
        basis_.push_back(worst >= 0 ? worst : s_lower());
        for (auto k : basis_) in_basis_[static_cast<std::size_t>(k)] = 1;
        refresh();
    }

    // Runs to optimality for objective q over y. Returns iterations used.
    int optimise(const Eigen::VectorXd& q, int budget)
    {
        const double dual_tol = 1e-11 * std::max(1.0, q.cwiseAbs().maxCoeff());
        constexpr double kPivotTol = 1e-11;
        constexpr double kTieTol = 1e-13;

        int iterations = 0;
        while (true) {
            const Eigen::VectorXd lambda = -(inverse_.transpose() * q);

            // Bland: among improving basic constraints, release the lowest index
            Eigen::Index leave_pos = -1;
            for (Eigen::Index r = 0; r < dim_; ++r) {
                if (lambda(r) < -dual_tol &&
                    (leave_pos < 0 || basis_[static_cast<std::size_t>(r)] <
                                          basis_[static_cast<std::size_t>(leave_pos)]))
                    leave_pos = r;
            }
            if (leave_pos < 0) return iterations;

            if (iterations >= budget)
                throw NumericalFailure("simplex exceeded iteration budget (cycling?)");

            const Eigen::VectorXd dir = -inverse_.col(leave_pos);

            Eigen::Index enter = -1;
            double best = std::numeric_limits<double>::infinity();
            for (Eigen::Index k = 0; k < total_; ++k) {
                if (in_basis_[static_cast<std::size_t>(k)]) continue;
                const double den = dot(k, dir);
                if (den <= kPivotTol) continue;
                const double slack = std::max(0.0, rhs(k) - dot(k, y_));
                const double t = slack / den;
                // ties within tolerance go to the lowest constraint index
                const double tie = kTieTol * (1.0 + best);
                if (enter < 0 || t < best - tie || (t <= best + tie && k < enter)) {
                    if (enter < 0 || t < best) best = t;
                    enter = k;
                }
            }
            if (enter < 0) throw NumericalFailure("simplex direction unbounded in a bounded polytope");

            in_basis_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(leave_pos)])] = 0;
            basis_[static_cast<std::size_t>(leave_pos)] = enter;
            in_basis_[static_cast<std::size_t>(enter)] = 1;
            refresh();
            ++iterations;
        }
    }

    void set_s_upper(double value) { s_upper_value_ = value; }
    const Eigen::VectorXd& point() const { return y_; }

private:
    void refresh()
    {
        Eigen::MatrixXd basis_matrix(dim_, dim_);
        Eigen::VectorXd basis_rhs(dim_);
        for (Eigen::Index r = 0; r < dim_; ++r) {
            const Eigen::Index k = basis_[static_cast<std::size_t>(r)];
            fill_row(k, basis_matrix.row(r));
            basis_rhs(r) = rhs(k);
        }
        const Eigen::FullPivLU<Eigen::MatrixXd> lu(basis_matrix);
        if (!lu.isInvertible()) throw NumericalFailure("singular simplex basis");
        inverse_ = lu.inverse();
        y_ = inverse_ * basis_rhs;
        if (!y_.allFinite()) throw NumericalFailure("non-finite simplex vertex");
    }

    RowMatrix a_;
    Eigen::VectorXd b_;
    Eigen::VectorXd width_;
    SolverOptions opt_;
    Eigen::Index m_;
    Eigen::Index n_;
    Eigen::Index dim_;
    Eigen::Index total_;
    double s_upper_value_ = 1.0;
    std::vector<Eigen::Index> basis_;
    std::vector<char> in_basis_;
    Eigen::MatrixXd inverse_;
    Eigen::VectorXd y_;
};

}  // namespace

LpOutcome solve(const LinearProgram& lp, const SolverOptions& options)
{
    lp.validate();
    const auto n = static_cast<Eigen::Index>(lp.num_vars());

    Eigen::VectorXd lower(n), width(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        lower(j) = lp.lower[static_cast<std::size_t>(j)];
        width(j) = lp.upper[static_cast<std::size_t>(j)] - lower(j);
    }

    // normalise rows to unit max-abs and shift to z = x - lower
    std::vector<Eigen::Index> kept;
    RowMatrix a(static_cast<Eigen::Index>(lp.num_rows()), n);
    Eigen::VectorXd b(static_cast<Eigen::Index>(lp.num_rows()));
    Eigen::Index m = 0;
    for (std::size_t i = 0; i < lp.num_rows(); ++i) {
        Eigen::RowVectorXd row(n);
        for (Eigen::Index j = 0; j < n; ++j) row(j) = lp.rows[i][static_cast<std::size_t>(j)];
        const double scale = n > 0 ? row.cwiseAbs().maxCoeff() : 0.0;
        if (scale == 0.0) {
            if (lp.rhs[i] < -options.infeasibility_tol) {
                LpOutcome out;
                out.status = LpStatus::infeasible;
                out.phase1_residual = -lp.rhs[i];
                return out;
            }
            continue;
        }
        a.row(m) = row / scale;
        b(m) = lp.rhs[i] / scale - a.row(m).dot(lower);
        ++m;
    }
    a.conservativeResize(m, n);
    b.conservativeResize(m);

    VertexSimplex simplex(std::move(a), std::move(b), width, options);
    simplex.initialise();

    LpOutcome out;
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(n + 1);
    phase1(n) = 1.0;
    out.iterations = simplex.optimise(phase1, options.max_iterations);

    const double residual = simplex.point()(n);
    out.phase1_residual = std::max(0.0, residual);
    if (residual > options.infeasibility_tol) {
        out.status = LpStatus::infeasible;
        return out;
    }

    simplex.set_s_upper(std::max(0.0, residual));
    Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(n + 1);
    for (Eigen::Index j = 0; j < n; ++j) phase2(j) = lp.objective[static_cast<std::size_t>(j)];
    out.iterations += simplex.optimise(phase2, options.max_iterations - out.iterations);

    out.status = LpStatus::optimal;
    out.x.resize(static_cast<std::size_t>(n));
    out.objective = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto js = static_cast<std::size_t>(j);
        out.x[js] = std::clamp(lower(j) + simplex.point()(j), lp.lower[js], lp.upper[js]);
        out.objective += lp.objective[js] * out.x[js];
    }
    return out;
}

void write_tableau(std::ostream& os, const LinearProgram& lp)
{
    const auto old_precision = os.precision(17);
    os << "LP " << lp.num_vars() << ' ' << lp.num_rows() << '\n';
    os << "c";
    for (double c : lp.objective) os << ' ' << c;
    os << "\nlb";
    for (double l : lp.lower) os << ' ' << l;
    os << "\nub";
    for (double u : lp.upper) os << ' ' << u;
    os << '\n';
    for (std::size_t i = 0; i < lp.num_rows(); ++i) {
        os << 'r' << i;
        for (double a : lp.rows[i]) os << ' ' << a;
        os << " <= " << lp.rhs[i] << '\n';
    }
    os.precision(old_precision);
}

}  // namespace gbas::lp
