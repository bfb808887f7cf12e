#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "ssda/dataset.hpp"
#include "ssda/ecdf.hpp"

namespace ssda {

enum class TransformVariant { naive, pooled, legacy, oracle, identity };

std::string to_string(TransformVariant v);
TransformVariant variant_from_string(const std::string& s);

// Marginal distortions g used by the simulation benchmarks; the oracle
// transform variant stores the forward map per feature and applies the exact
// inverse.
enum class Marginal {
    identity,
    cube,          // v^3
    exp_fn,        // exp(v)
    arctan,        // arctan(v)
    norm_cdf_fn,   // Phi(v)
    shifted_cube,  // (v+1)^3
    arctan2x       // arctan(2v)
};

std::string to_string(Marginal g);
Marginal marginal_from_string(const std::string& s);

double marginal_forward(Marginal g, double v);
// Exact inverse; inputs outside the range of g are clamped and counted.
double marginal_inverse(Marginal g, double x, long* clamped = nullptr);

// Monotone step map x -> z[#{knots <= x}]. z has knots.size()+1 entries: z[0]
// is the constant value left of all knots, z[n] right of (or at) the maximum.
struct StepMap {
    EcdfTable table;
    std::vector<double> z;

    double eval(double x) const;
};

// Builds z[k] = Phi^{-1}(clamp(k/n, a, b)); a degenerate table maps
// everything to Phi^{-1}(b) so the column is constant and droppable.
StepMap make_step_map(const EcdfTable& table);

// One fitted marginal transform h_j: weighted sum of per-class step maps,
// each optionally re-centered: h_j(x) = sum_c w_c * (map_c(x) + shift_c).
struct FeatureTransform {
    std::vector<StepMap> components;
    std::vector<double> weights;
    std::vector<double> shifts;
    bool degenerate = false;

    double eval(double x) const;
};

struct ApplyStats {
    long clamped = 0;  // oracle-variant inputs outside the range of g
};

struct TransformModel {
    TransformVariant variant = TransformVariant::identity;
    int p = 0;
    std::vector<FeatureTransform> features;  // empty for identity/oracle
    std::vector<Marginal> oracle_g;          // oracle only: forward g per feature
    std::vector<int> class_labels;           // [0] is "+" (binary) / reference
    std::vector<double> class_priors;
    std::vector<double> mu_minus_hat;        // pooled/legacy only
    double legacy_a = 0.0, legacy_b = 0.0;   // legacy only
    std::vector<std::string> warnings;

    double eval(int feature, double x, ApplyStats* stats = nullptr) const;

    // Elementwise transform; identity returns the input bitwise.
    // Throws DimensionMismatchError if X has the wrong column count.
    Eigen::MatrixXd apply(const Eigen::MatrixXd& X, ApplyStats* stats = nullptr) const;
};

// Positive-class Winsorized ECDF transform with (a, b) = (1/n+^2, 1 - 1/n+^2).
TransformModel fit_naive(const Dataset& data);

// Prior-weighted two-class transform; mu_minus estimated from both classes.
TransformModel fit_pooled(const Dataset& data);

// Fixed-bounds positive-class transform with the Winsorization-corrected
// mu_minus estimator. Throws LegacyDegenerateError (naming the feature) when
// no negative-class point falls strictly inside the (a, b) band.
TransformModel fit_legacy(const Dataset& data, double a, double b);

// K-class pooled transform with class 0 (largest class, ties by label) as the
// reference. Reduces to the two-class pooled form when K = 2.
TransformModel fit_multiclass_pooled(const Dataset& data);

// Pass-through transform; records coding/priors so the DSDA pipeline can run
// on raw features.
TransformModel fit_identity(const Dataset& data);

inline Eigen::MatrixXd apply_transform(const TransformModel& model, const Eigen::MatrixXd& X,
                                       ApplyStats* stats = nullptr) {
    return model.apply(X, stats);
}

}  // namespace ssda
