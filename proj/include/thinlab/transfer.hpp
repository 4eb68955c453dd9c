#pragma once

// Ruelle transfer operator at potential -s*tau on a cylinder grid, its
// Perron eigentriple, the pressure curve, the zero of s -> log lambda_{-s},
// and the Gibbs ratio diagnostic.

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <memory>
#include <vector>

#include "thinlab/shift.hpp"

namespace thinlab {

class TransferOperator {
public:
    TransferOperator(std::shared_ptr<const CylinderGrid> grid, double s);

    double s() const { return s_; }
    const CylinderGrid& grid() const { return *grid_; }
    std::size_t dim() const { return grid_->size(); }

    // (L f)(v) = sum over successors w of e^{-s tau(w)} f(w)
    Eigen::VectorXd apply(const Eigen::VectorXd& f) const;
    Eigen::VectorXd apply_transpose(const Eigen::VectorXd& f) const;

    Eigen::SparseMatrix<double> matrix() const;

private:
    std::shared_ptr<const CylinderGrid> grid_;
    double s_;
    Eigen::VectorXd weights_;   // e^{-s tau(w)} per cylinder
};

struct PerronTriple {
    double lambda = 0.0;
    Eigen::VectorXd h;    // right eigenfunction, strictly positive
    Eigen::VectorXd nu;   // left eigenmeasure, sum 1; scaled so nu . h = 1
    int iterations = 0;
    double residual = 0.0;
};

// Power iteration on the operator and its transpose; throws on
// non-convergence. The certified bound is ||Lv - lambda v||_inf <= tol * lambda.
PerronTriple leading_eigentriple(const TransferOperator& op, double tol = 1e-12,
                                 int max_iter = 100000);

double leading_eigenvalue(const TransferOperator& op, double tol = 1e-12);

struct PressureCurve {
    std::vector<std::pair<double, double>> samples;   // (s, log lambda_{-s})
    double root = 0.0;                                // bisection zero of log lambda
    double bracket_lo = 0.0, bracket_hi = 0.0;
};

PressureCurve pressure_curve(const SubshiftSpec& spec, int depth,
                             const std::vector<double>& s_values, int tail_pad = CylinderGrid::kDefaultTailPad);

struct DeltaDepthRow {
    int depth = 0;
    std::size_t cylinders = 0;
    double delta_hat = 0.0;
    double drift = 0.0;      // |delta(depth) - delta(previous depth)|
};

struct DeltaEstimate {
    std::vector<DeltaDepthRow> rows;
    double delta() const { return rows.back().delta_hat; }
    double last_drift() const { return rows.back().drift; }
};

// Bisection on s solving lambda_{-s} = 1 at every depth in the schedule.
// Throws if the pressure at s = 0 fails to bracket a root.
DeltaEstimate estimate_delta(const SubshiftSpec& spec, const std::vector<int>& depths,
                             double tol = 1e-6, int tail_pad = CylinderGrid::kDefaultTailPad,
                             int threads = 0);

struct GibbsRatioReport {
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    double spread() const { return max_ratio / min_ratio; }
};

// Compares the eigen-measure cylinder weights h(v) nu(v) at s = delta_hat
// against lambda_{s_eval}^{-n} exp(-s_eval S_n tau(v)). At s_eval = delta_hat
// the ratios are the Gibbs constants; far from it the spread grows with n.
GibbsRatioReport gibbs_ratio_check(const CylinderGrid& grid,
                                   double delta_hat, double s_eval);

}  // namespace thinlab
