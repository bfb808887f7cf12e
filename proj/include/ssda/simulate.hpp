#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "ssda/dataset.hpp"
#include "ssda/transform.hpp"

namespace ssda {

struct CovarianceSpec {
    enum class Kind { ar, cs, block_cs };
    Kind kind = Kind::ar;
    int p = 0;
    double rho = 0.0;
    int blocks = 1;     // block_cs only
    int block_dim = 0;  // block_cs only
};

struct CovarianceModel {
    Eigen::MatrixXd sigma;
    // Lower Cholesky factor, row-major so per-feature prefix dots are
    // contiguous; the samplers rely on this exact evaluation order.
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> chol;
};

// Validates the parameterization (AR: |rho| < 1; CS: rho > -1/(dim-1)) and
// factorizes. Throws ArgumentError when the matrix is not positive definite.
CovarianceModel build_covariance(const CovarianceSpec& spec);

struct SimulationOverrides {
    std::optional<int> n;
    std::optional<int> p;
    std::optional<double> rho;
};

// One of the paper-style benchmark configurations: class labels are +1/-1
// with equal priors, V | Y ~ N(mu_Y, Sigma) with mu_- = 0 and
// mu_+ = Sigma * beta_bayes, and the observed data are X = g(V).
struct SimulationSpec {
    int model_id = 1;
    char series = 'a';
    int n = 0;  // training size
    int p = 0;
    CovarianceSpec cov;
    Eigen::VectorXd beta_bayes;
    Eigen::VectorXd mu_plus;
    std::vector<Marginal> g;  // per feature; all identity for series a

    std::vector<int> support() const;  // nonzero beta_bayes indices, ascending
};

// Models 1-4, series a/b. Series-b distortions follow the published index
// table; listed sets are validated to be disjoint and unlisted features keep
// the identity map. Overrides rescale n/p/rho at desk scale.
SimulationSpec make_simulation_spec(int model_id, char series,
                                    const SimulationOverrides& overrides = {});

// Draws (X, Y): labels from the uniform stream, V from prefix dots against
// the Cholesky rows, X = g(V). Deterministic per (spec, seed); draw i only
// touches stream indices [i*(p+1), (i+1)*(p+1)).
Dataset sample_model(const SimulationSpec& spec, const CovarianceModel& cov, int n_draw,
                     std::uint64_t seed);
Dataset sample_model(const SimulationSpec& spec, int n_draw, std::uint64_t seed);

// Exact marginal draw of the listed columns: reproduces the same values the
// full sampler would assign to those columns, bit for bit, without computing
// the rest.
struct MarginalSample {
    std::vector<int> cols;   // ascending
    Eigen::MatrixXd v;       // latent Gaussian columns
    Eigen::MatrixXd x;       // g(v)
    std::vector<int> y_pm;   // +1 / -1
};
MarginalSample sample_marginal(const SimulationSpec& spec, const CovarianceModel& cov,
                               const std::vector<int>& cols, int n_draw, std::uint64_t seed);

// Closed-form Bayes error Phi(-sqrt(beta^T Sigma beta)/2) for equal priors.
double bayes_error(const SimulationSpec& spec);

// Monte Carlo estimate: applies the true rule to fresh draws of the support
// coordinates (an exact marginal of the model).
double bayes_error_mc(const SimulationSpec& spec, long n_draws, std::uint64_t seed);

// Per-feature exact inverse of g as a TransformModel (variant oracle).
TransformModel oracle_transform(const SimulationSpec& spec);

}  // namespace ssda
