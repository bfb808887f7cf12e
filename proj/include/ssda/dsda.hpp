#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ssda/dataset.hpp"
#include "ssda/transform.hpp"

namespace ssda {

// Solver controls for the penalized least squares problem
//   (1/n) sum_i (y_i - b0 - h_i^T b)^2 + lambda * ||b||_1,
// with b0 profiled out by centering. The soft-threshold constant under this
// scaling is lambda/2: an optimal b satisfies
//   |n^{-1} <H_j - mean, r>| = lambda/2   for active j,
//   |n^{-1} <H_j - mean, r>| <= lambda/2  otherwise.
struct LassoOptions {
    double tol_scale = 1e-7;  // stop when max |delta beta_j| < tol_scale * sd(y)
    double kkt_tol = 2e-7;    // then polish until the KKT gap is below this
    long max_sweeps = 100000;  // per grid point
};

struct LassoPath {
    Eigen::VectorXd lambdas;               // strictly descending
    std::vector<Eigen::VectorXd> betas;    // original (unstandardized) scale
    std::vector<int> dropped_columns;      // zero-variance columns, coefficients pinned to 0
    std::vector<std::string> warnings;
};

// Smallest lambda whose solution is exactly zero:
// max_j (2/n) |<H_j - mean(H_j), y - mean(y)>|.
double lasso_lambda_max(const Eigen::MatrixXd& H, const Eigen::VectorXd& y);

// Log-spaced descending grid from lambda_max down to min_ratio * lambda_max.
Eigen::VectorXd lambda_grid(double lambda_max, int grid_size, double min_ratio = 1e-3);

// Coordinate descent with warm starts along the grid. Columns are centered
// and scaled to unit variance internally; the penalty is kept on the original
// scale so each returned beta minimizes the objective above exactly.
LassoPath lasso_path(const Eigen::MatrixXd& H, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& lambdas, const LassoOptions& opt = {});

// KKT gap of `beta` for the objective above; 0 at an exact optimum.
double lasso_kkt_gap(const Eigen::MatrixXd& H, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& beta, double lambda);

// Plug-in discriminant intercept
//   b0 = -(mu+ + mu-)^T b / 2 + log(pi+/pi-) * b^T Sigma b / {(mu+ - mu-)^T b}
// with class means and the pooled within-class covariance of H restricted to
// the active set. Throws DegenerateProjectionError when (mu+ - mu-)^T b = 0
// and ArgumentError when beta is identically zero.
double intercept(const Eigen::VectorXd& beta, const Eigen::MatrixXd& H,
                 const std::vector<int>& y_pm);

struct CvResult {
    double lambda = 0.0;            // largest lambda attaining minimal CV error
    Eigen::VectorXd lambdas;        // evaluated grid
    Eigen::VectorXd cv_errors;      // misclassification rate per grid point
    int folds = 0;
};

// Stratified, seeded K-fold tuning; the per-fold rule recomputes the plug-in
// intercept on the fold's training part. Ties favor the largest lambda.
CvResult cv_tune(const Eigen::MatrixXd& H, const std::vector<int>& y_pm, int folds,
                 int grid_size, std::uint64_t seed, double min_ratio = 1e-3,
                 const LassoOptions& opt = {});

struct TuningSpec {
    int folds = 5;
    int grid_size = 50;
    double lambda_min_ratio = 1e-3;
    std::uint64_t seed = 0;
    std::optional<double> fixed_lambda;  // bypass CV when set
    double legacy_a = 0.0;               // legacy variant bounds
    double legacy_b = 0.0;
};

struct DsdaFit {
    int p = 0;
    Eigen::VectorXd beta;
    double beta0 = 0.0;
    std::vector<int> active_set;
    double lambda = 0.0;
    Eigen::VectorXd lambda_path;  // empty when a fixed lambda was supplied
    Eigen::VectorXd cv_errors;
    Eigen::VectorXd mu_pos_active, mu_neg_active;
    Eigen::MatrixXd sigma_active;
    double pi_pos = 0.5, pi_neg = 0.5;
    int pos_label = +1, neg_label = -1;
    TransformVariant variant = TransformVariant::identity;
    bool prior_fallback = false;  // beta == 0: classify by prior
    double kkt_violation = 0.0;
    std::vector<std::string> warnings;
};

struct SsdaModel {
    TransformModel transform;
    DsdaFit fit;
};

struct Prediction {
    std::vector<int> labels;  // user labels (fit.pos_label / fit.neg_label)
    Eigen::VectorXd scores;   // beta0 + h(x)^T beta; score 0 classifies as "+"
};

// Fits the discriminant on an already transformed matrix H. y_pm must be
// +1/-1 in the majority coding.
DsdaFit fit_dsda(const Eigen::MatrixXd& H, const std::vector<int>& y_pm,
                 const TuningSpec& tuning = {}, const LassoOptions& opt = {});

// One-call pipeline: fit the requested transform variant, transform, tune,
// fit, and package the full provenance.
SsdaModel fit_ssda(const Dataset& data, TransformVariant variant, const TuningSpec& tuning = {},
                   const LassoOptions& opt = {});

Prediction predict(const DsdaFit& fit, const TransformModel& transform, const Eigen::MatrixXd& X);

}  // namespace ssda
