#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ssda/dsda.hpp"
#include "ssda/simulate.hpp"

namespace ssda {

enum class Method { ssda_naive, ssda_pooled, dsda_raw, oracle_dsda, bayes };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

// TRUE/FALSE selection: |A_hat ∩ A| and |A_hat \ A| against the Bayes support.
std::pair<int, int> selection_counts(const Eigen::VectorXd& beta_hat,
                                     const Eigen::VectorXd& beta_bayes);

// Fraction of mismatched predictions; labels are +1/-1.
double test_error(std::span<const int> predictions, std::span<const int> labels);

double median_of(std::vector<double> values);

// Median plus the bootstrap standard error of the median: B seeded resamples
// with replacement, sd over resample medians. Requires B >= 100.
std::pair<double, double> median_bootstrap_se(std::span<const double> values, int B,
                                              std::uint64_t seed);

struct RepRecord {
    int rep = 0;
    Method method = Method::bayes;
    bool failed = false;
    std::string fail_reason;
    double test_error = 0.0;
    int true_sel = 0;
    int false_sel = 0;
    double lambda = 0.0;  // NaN for bayes
    std::uint64_t seed = 0;
};

struct MethodAggregate {
    int n_ok = 0;
    int n_failed = 0;
    double median_error = 0.0, se_error = 0.0;
    double median_true = 0.0, se_true = 0.0;
    double median_false = 0.0, se_false = 0.0;
};

struct BenchmarkOptions {
    int folds = 5;
    int grid_size = 50;
    double lambda_min_ratio = 1e-3;
    int threads = 0;  // 0 = hardware concurrency
    int bootstrap_resamples = 500;
};

struct BenchmarkReport {
    // config echo
    int model_id = 0;
    char series = 'a';
    int n = 0, p = 0, reps = 0, test_size = 0;
    std::uint64_t seed = 0;
    std::vector<Method> methods;
    BenchmarkOptions options;

    std::vector<RepRecord> per_replication;  // rep-major, methods in call order
    std::vector<std::pair<Method, MethodAggregate>> aggregates;

    const MethodAggregate& aggregate(Method m) const;
    std::string to_csv() const;
    std::string summary_table() const;
};

// Per replication: draw a training set of size spec.n and an independent test
// set, fit every method, and record error/selection statistics. Fit failures
// are recorded and excluded from the aggregates. Replications are
// independent; with threads > 1 they run in parallel with identical output.
BenchmarkReport run_benchmark(const SimulationSpec& spec, const std::vector<Method>& methods,
                              int reps, int test_size, std::uint64_t seed,
                              const BenchmarkOptions& options = {});

}  // namespace ssda
