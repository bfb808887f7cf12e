#include "ssda/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <thread>

#include "ssda/errors.hpp"
#include "ssda/rng.hpp"

namespace ssda {

std::string to_string(Method m) {
    switch (m) {
        case Method::ssda_naive: return "ssda-naive";
        case Method::ssda_pooled: return "ssda-pooled";
        case Method::dsda_raw: return "dsda-raw";
        case Method::oracle_dsda: return "oracle-dsda";
        case Method::bayes: return "bayes";
    }
    return "bayes";
}

Method method_from_string(const std::string& s) {
    if (s == "ssda-naive") return Method::ssda_naive;
    if (s == "ssda-pooled") return Method::ssda_pooled;
    if (s == "dsda-raw") return Method::dsda_raw;
    if (s == "oracle-dsda") return Method::oracle_dsda;
    if (s == "bayes") return Method::bayes;
    throw ArgumentError("unknown method: " + s);
}

std::pair<int, int> selection_counts(const Eigen::VectorXd& beta_hat,
                                     const Eigen::VectorXd& beta_bayes) {
    if (beta_hat.size() != beta_bayes.size()) {
        throw DimensionMismatchError("selection_counts: length mismatch");
    }
    int true_sel = 0, false_sel = 0;
    for (Eigen::Index j = 0; j < beta_hat.size(); ++j) {
        if (beta_hat[j] == 0.0) continue;
        (beta_bayes[j] != 0.0 ? true_sel : false_sel)++;
    }
    return {true_sel, false_sel};
}

double test_error(std::span<const int> predictions, std::span<const int> labels) {
    if (predictions.size() != labels.size()) {
        throw DimensionMismatchError("test_error: length mismatch");
    }
    if (predictions.empty()) return 0.0;
    long wrong = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i] != labels[i]) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(predictions.size());
}

double median_of(std::vector<double> values) {
    if (values.empty()) throw ArgumentError("median of empty set");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::pair<double, double> median_bootstrap_se(std::span<const double> values, int B,
                                              std::uint64_t seed) {
    if (values.empty()) throw ArgumentError("median_bootstrap_se: empty values");
    if (B < 100) throw ArgumentError("median_bootstrap_se: B must be >= 100");
    const double med = median_of({values.begin(), values.end()});

    CounterRng rng(seed);
    std::vector<double> medians(static_cast<std::size_t>(B));
    std::vector<double> resample(values.size());
    const std::uint64_t n = values.size();
    for (int b = 0; b < B; ++b) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            resample[i] = values[rng.next_u64() % n];
        }
        medians[static_cast<std::size_t>(b)] = median_of(resample);
    }
    double mean = 0.0;
    for (double m : medians) mean += m;
    mean /= B;
    double ss = 0.0;
    for (double m : medians) ss += (m - mean) * (m - mean);
    const double se = B > 1 ? std::sqrt(ss / (B - 1)) : 0.0;
    return {med, se};
}

namespace {

std::uint64_t method_tag(Method m) {
    switch (m) {
        case Method::ssda_naive: return 11;
        case Method::ssda_pooled: return 12;
        case Method::dsda_raw: return 13;
        case Method::oracle_dsda: return 14;
        case Method::bayes: return 15;
    }
    return 15;
}

struct FittedMethod {
    bool failed = false;
    std::string reason;
    TransformModel transform;
    DsdaFit fit;
};

FittedMethod fit_method(Method m, const SimulationSpec& spec, const Dataset& train,
                        const TuningSpec& tuning) {
    FittedMethod out;
    try {
        switch (m) {
            case Method::ssda_naive: {
                SsdaModel s = fit_ssda(train, TransformVariant::naive, tuning);
                out.transform = std::move(s.transform);
                out.fit = std::move(s.fit);
                break;
            }
            case Method::ssda_pooled: {
                SsdaModel s = fit_ssda(train, TransformVariant::pooled, tuning);
                out.transform = std::move(s.transform);
                out.fit = std::move(s.fit);
                break;
            }
            case Method::dsda_raw: {
                SsdaModel s = fit_ssda(train, TransformVariant::identity, tuning);
                out.transform = std::move(s.transform);
                out.fit = std::move(s.fit);
                break;
            }
            case Method::oracle_dsda: {
                out.transform = oracle_transform(spec);
                const BinaryCoding coding = code_binary(train);
                out.transform.class_labels = {coding.pos_label, coding.neg_label};
                out.transform.class_priors = {coding.pi_pos(), coding.pi_neg()};
                const Eigen::MatrixXd H = out.transform.apply(train.x);
                std::vector<int> y_pm(train.y.size());
                for (std::size_t i = 0; i < train.y.size(); ++i) {
                    y_pm[i] = train.y[i] == coding.pos_label ? +1 : -1;
                }
                out.fit = fit_dsda(H, y_pm, tuning);
                out.fit.variant = TransformVariant::oracle;
                out.fit.pos_label = coding.pos_label;
                out.fit.neg_label = coding.neg_label;
                break;
            }
            case Method::bayes: break;
        }
    } catch (const Error& e) {
        out.failed = true;
        out.reason = e.what();
    } catch (const std::domain_error& e) {
        out.failed = true;
        out.reason = e.what();
    }
    return out;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

const MethodAggregate& BenchmarkReport::aggregate(Method m) const {
    for (const auto& [method, agg] : aggregates) {
        if (method == m) return agg;
    }
    throw ArgumentError("method " + to_string(m) + " not present in report");
}

BenchmarkReport run_benchmark(const SimulationSpec& spec, const std::vector<Method>& methods,
                              int reps, int test_size, std::uint64_t seed,
                              const BenchmarkOptions& options) {
    if (reps < 1) throw ArgumentError("reps must be positive");
    if (test_size < 1) throw ArgumentError("test_size must be positive");
    if (methods.empty()) throw ArgumentError("no methods requested");

    BenchmarkReport report;
    report.model_id = spec.model_id;
    report.series = spec.series;
    report.n = spec.n;
    report.p = spec.p;
    report.reps = reps;
    report.test_size = test_size;
    report.seed = seed;
    report.methods = methods;
    report.options = options;

    const CovarianceModel cov = build_covariance(spec.cov);
    const std::vector<int> support = spec.support();
    const std::size_t m_count = methods.size();
    report.per_replication.assign(static_cast<std::size_t>(reps) * m_count, RepRecord{});

    const auto run_rep = [&](int r) {
        const std::uint64_t rep_seed = CounterRng::derive(seed, 1000 + static_cast<std::uint64_t>(r));
        const Dataset train = sample_model(spec, cov, spec.n, CounterRng::derive(rep_seed, 1));

        std::vector<FittedMethod> fits(m_count);
        std::vector<int> needed = support;
        for (std::size_t mi = 0; mi < m_count; ++mi) {
            if (methods[mi] == Method::bayes) continue;
            TuningSpec tuning;
            tuning.folds = options.folds;
            tuning.grid_size = options.grid_size;
            tuning.lambda_min_ratio = options.lambda_min_ratio;
            tuning.seed = CounterRng::derive(rep_seed, method_tag(methods[mi]));
            fits[mi] = fit_method(methods[mi], spec, train, tuning);
            if (!fits[mi].failed) {
                needed.insert(needed.end(), fits[mi].fit.active_set.begin(),
                              fits[mi].fit.active_set.end());
            }
        }

        // Only the union of support and active features enters any score, so
        // the test set is drawn as the exact marginal of those columns.
        const MarginalSample test =
            sample_marginal(spec, cov, needed, test_size, CounterRng::derive(rep_seed, 2));
        std::vector<int> pos_of(static_cast<std::size_t>(spec.p), -1);
        for (std::size_t c = 0; c < test.cols.size(); ++c) {
            pos_of[static_cast<std::size_t>(test.cols[c])] = static_cast<int>(c);
        }

        std::vector<int> pred(static_cast<std::size_t>(test_size));
        for (std::size_t mi = 0; mi < m_count; ++mi) {
            RepRecord& rec = report.per_replication[static_cast<std::size_t>(r) * m_count + mi];
            rec.rep = r;
            rec.method = methods[mi];
            rec.seed = rep_seed;
            if (methods[mi] == Method::bayes) {
                for (int i = 0; i < test_size; ++i) {
                    double score = 0.0;
                    for (int j : support) {
                        score += spec.beta_bayes[j] *
                                 (test.v(i, pos_of[static_cast<std::size_t>(j)]) -
                                  0.5 * spec.mu_plus[j]);
                    }
                    pred[static_cast<std::size_t>(i)] = score >= 0.0 ? +1 : -1;
                }
                rec.test_error = test_error(pred, test.y_pm);
                rec.true_sel = static_cast<int>(support.size());
                rec.false_sel = 0;
                rec.lambda = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            if (fits[mi].failed) {
                rec.failed = true;
                rec.fail_reason = fits[mi].reason;
                rec.test_error = std::numeric_limits<double>::quiet_NaN();
                rec.lambda = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            const DsdaFit& fit = fits[mi].fit;
            const TransformModel& tm = fits[mi].transform;
            for (int i = 0; i < test_size; ++i) {
                double score = fit.beta0;
                for (int j : fit.active_set) {
                    score += fit.beta[j] *
                             tm.eval(j, test.x(i, pos_of[static_cast<std::size_t>(j)]));
                }
                pred[static_cast<std::size_t>(i)] = score >= 0.0 ? fit.pos_label : fit.neg_label;
            }
            rec.test_error = test_error(pred, test.y_pm);
            const auto [t, f] = selection_counts(fit.beta, spec.beta_bayes);
            rec.true_sel = t;
            rec.false_sel = f;
            rec.lambda = fit.lambda;
        }
    };

    int threads = options.threads > 0
                      ? options.threads
                      : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, reps));
    if (threads == 1) {
        for (int r = 0; r < reps; ++r) run_rep(r);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                int r;
                while ((r = next.fetch_add(1)) < reps) run_rep(r);
            });
        }
        for (auto& th : pool) th.join();
    }

    for (std::size_t mi = 0; mi < m_count; ++mi) {
        std::vector<double> errs, trues, falses;
        MethodAggregate agg;
        for (int r = 0; r < reps; ++r) {
            const RepRecord& rec = report.per_replication[static_cast<std::size_t>(r) * m_count + mi];
            if (rec.failed) {
                ++agg.n_failed;
                continue;
            }
            ++agg.n_ok;
            errs.push_back(rec.test_error);
            trues.push_back(rec.true_sel);
            falses.push_back(rec.false_sel);
        }
        if (agg.n_ok > 0) {
            const int B = options.bootstrap_resamples;
            std::tie(agg.median_error, agg.se_error) =
                median_bootstrap_se(errs, B, CounterRng::derive(seed, 7001 + 10 * method_tag(methods[mi])));
            std::tie(agg.median_true, agg.se_true) =
                median_bootstrap_se(trues, B, CounterRng::derive(seed, 7002 + 10 * method_tag(methods[mi])));
            std::tie(agg.median_false, agg.se_false) =
                median_bootstrap_se(falses, B, CounterRng::derive(seed, 7003 + 10 * method_tag(methods[mi])));
        }
        report.aggregates.emplace_back(methods[mi], agg);
    }
    return report;
}

std::string BenchmarkReport::to_csv() const {
    std::ostringstream out;
    out << "# model=" << model_id << " series=" << series << " n=" << n << " p=" << p
        << " reps=" << reps << " test_size=" << test_size << " seed=" << seed
        << " folds=" << options.folds << " grid_size=" << options.grid_size
        << " bootstrap=" << options.bootstrap_resamples << " methods=";
    for (std::size_t i = 0; i < methods.size(); ++i) {
        out << (i ? "+" : "") << to_string(methods[i]);
    }
    out << "\n";
    out << "rep,method,failed,test_error,true_sel,false_sel,lambda,seed,fail_reason\n";
    for (const RepRecord& rec : per_replication) {
        out << rec.rep << ',' << to_string(rec.method) << ',' << (rec.failed ? 1 : 0) << ','
            << format_double(rec.test_error) << ',' << rec.true_sel << ',' << rec.false_sel
            << ',' << format_double(rec.lambda) << ',' << rec.seed << ',' << rec.fail_reason
            << "\n";
    }
    return out.str();
}

std::string BenchmarkReport::summary_table() const {
    std::ostringstream out;
    char buf[160];
    out << "Model " << model_id << series << "  n=" << n << " p=" << p << " reps=" << reps
        << " test_size=" << test_size << " seed=" << seed << "\n";
    std::snprintf(buf, sizeof(buf), "%-14s %10s %8s %8s %7s %9s %8s %7s\n", "method",
                  "error%", "(se)", "TRUE", "(se)", "FALSE", "(se)", "failed");
    out << buf;
    for (const auto& [method, agg] : aggregates) {
        std::snprintf(buf, sizeof(buf), "%-14s %10.2f %8.2f %8.1f %7.2f %9.1f %8.2f %7d\n",
                      to_string(method).c_str(), 100.0 * agg.median_error, 100.0 * agg.se_error,
                      agg.median_true, agg.se_true, agg.median_false, agg.se_false,
                      agg.n_failed);
        out << buf;
    }
    return out.str();
}

}  // namespace ssda
