#include "ssda/dsda.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ssda/errors.hpp"
#include "ssda/rng.hpp"

namespace ssda {

namespace {

double soft_threshold(double u, double t) {
    if (u > t) return u - t;
    if (u < -t) return u + t;
    return 0.0;
}

std::vector<int> nonzero_indices(const Eigen::VectorXd& beta) {
    std::vector<int> idx;
    for (int j = 0; j < beta.size(); ++j) {
        if (beta[j] != 0.0) idx.push_back(j);
    }
    return idx;
}

// Centered/standardized copy of H plus the bookkeeping needed to map
// solutions back to the original scale.
struct Standardized {
    Eigen::MatrixXd xs;        // centered columns / scale
    Eigen::VectorXd mean;      // column means
    Eigen::VectorXd scale;     // sqrt(mean squared deviation); 1 for dropped
    Eigen::VectorXd yc;        // centered y
    double sd_y = 0.0;
    std::vector<char> keep;    // false for zero-variance columns
    std::vector<int> dropped;
};

Standardized standardize(const Eigen::MatrixXd& H, const Eigen::VectorXd& y) {
    const auto n = H.rows();
    Standardized s;
    s.mean = H.colwise().mean();
    s.xs = H.rowwise() - s.mean.transpose();
    s.scale.resize(H.cols());
    s.keep.assign(static_cast<std::size_t>(H.cols()), 1);
    for (Eigen::Index j = 0; j < H.cols(); ++j) {
        const double v = std::sqrt(s.xs.col(j).squaredNorm() / static_cast<double>(n));
        if (v <= 1e-9 * std::max(1.0, std::abs(s.mean[j]))) {
            s.keep[static_cast<std::size_t>(j)] = 0;
            s.dropped.push_back(static_cast<int>(j));
            s.scale[j] = 1.0;
            s.xs.col(j).setZero();
        } else {
            s.scale[j] = v;
            s.xs.col(j) /= v;
        }
    }
    const double ybar = y.mean();
    s.yc = y.array() - ybar;
    s.sd_y = std::sqrt(s.yc.squaredNorm() / static_cast<double>(n));
    return s;
}

// KKT gap measured on the original scale. grad_j = (1/n) <H_j - mean, r>;
// active coordinates must sit at |grad| = lambda/2, inactive below it.
double kkt_gap_standardized(const Standardized& s, const Eigen::VectorXd& theta,
                            const Eigen::VectorXd& r, double lambda) {
    const double n = static_cast<double>(s.xs.rows());
    double worst = 0.0;
    for (Eigen::Index j = 0; j < s.xs.cols(); ++j) {
        if (!s.keep[static_cast<std::size_t>(j)]) continue;
        const double grad = s.scale[j] * s.xs.col(j).dot(r) / n;
        const double gap = theta[j] != 0.0 ? std::abs(std::abs(grad) - 0.5 * lambda)
                                           : std::max(0.0, std::abs(grad) - 0.5 * lambda);
        worst = std::max(worst, gap);
    }
    return worst;
}

}  // namespace

double lasso_lambda_max(const Eigen::MatrixXd& H, const Eigen::VectorXd& y) {
    const auto n = H.rows();
    const Eigen::VectorXd yc = y.array() - y.mean();
    const Eigen::VectorXd mean = H.colwise().mean();
    double m = 0.0;
    for (Eigen::Index j = 0; j < H.cols(); ++j) {
        const double g = (H.col(j).array() - mean[j]).matrix().dot(yc);
        m = std::max(m, 2.0 * std::abs(g) / static_cast<double>(n));
    }
    return m;
}

Eigen::VectorXd lambda_grid(double lambda_max, int grid_size, double min_ratio) {
    if (grid_size < 1) throw ArgumentError("lambda grid size must be >= 1");
    if (!(lambda_max > 0.0)) throw ArgumentError("lambda_max must be positive");
    if (!(min_ratio > 0.0 && min_ratio < 1.0)) {
        throw ArgumentError("lambda min ratio must lie in (0, 1)");
    }
    Eigen::VectorXd grid(grid_size);
    if (grid_size == 1) {
        grid[0] = lambda_max;
        return grid;
    }
    for (int k = 0; k < grid_size; ++k) {
        grid[k] = lambda_max * std::pow(min_ratio, static_cast<double>(k) / (grid_size - 1));
    }
    return grid;
}

LassoPath lasso_path(const Eigen::MatrixXd& H, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& lambdas, const LassoOptions& opt) {
    const auto n = H.rows();
    const auto p = H.cols();
    if (n < 2) throw ArgumentError("lasso needs at least 2 observations");
    if (y.size() != n) throw DimensionMismatchError("y length does not match H rows");
    if (!H.allFinite() || !y.allFinite()) throw ArgumentError("lasso input contains NaN/Inf");
    if (lambdas.size() == 0) throw ArgumentError("lambda grid is empty");
    for (Eigen::Index k = 0; k < lambdas.size(); ++k) {
        if (!(lambdas[k] > 0.0)) throw ArgumentError("lambda grid must be positive");
        if (k > 0 && !(lambdas[k] < lambdas[k - 1])) {
            throw ArgumentError("lambda grid must be strictly descending");
        }
    }

    Standardized s = standardize(H, y);

    LassoPath path;
    path.lambdas = lambdas;
    for (int j : s.dropped) {
        path.dropped_columns.push_back(j);
        path.warnings.push_back("column " + std::to_string(j) +
                                " has zero variance; coefficient fixed at 0");
    }

    Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd r = s.yc;
    const double tol = opt.tol_scale * s.sd_y;

    // Lazily cached Gram columns (1/n) Xs^T Xs_j for coordinates that ever
    // activate; the active-set phase runs on these instead of residual dots.
    std::vector<Eigen::VectorXd> gram(static_cast<std::size_t>(p));
    std::vector<char> have_gram(static_cast<std::size_t>(p), 0);
    const auto gram_col = [&](int j) -> const Eigen::VectorXd& {
        if (!have_gram[static_cast<std::size_t>(j)]) {
            gram[static_cast<std::size_t>(j)] =
                (s.xs.transpose() * s.xs.col(j)) / static_cast<double>(n);
            have_gram[static_cast<std::size_t>(j)] = 1;
        }
        return gram[static_cast<std::size_t>(j)];
    };

    for (Eigen::Index k = 0; k < lambdas.size(); ++k) {
        const double lambda = lambdas[k];
        long sweeps = 0;
        const auto check_budget = [&] {
            if (++sweeps > opt.max_sweeps) {
                throw ConvergenceError("coordinate descent exceeded " +
                                       std::to_string(opt.max_sweeps) + " sweeps");
            }
        };

        // Full pass over all coordinates with exact residual updates.
        const auto full_pass = [&] {
            check_budget();
            double maxd = 0.0;
            for (Eigen::Index j = 0; j < p; ++j) {
                if (!s.keep[static_cast<std::size_t>(j)]) continue;
                const double t = 0.5 * lambda / s.scale[j];
                const double g = s.xs.col(j).dot(r) / static_cast<double>(n);
                const double next = soft_threshold(g + theta[j], t);
                const double d = next - theta[j];
                if (d != 0.0) {
                    r -= d * s.xs.col(j);
                    theta[j] = next;
                    maxd = std::max(maxd, std::abs(d) / s.scale[j]);
                }
            }
            return maxd;
        };

        // Iterate the current active set to convergence, tracking gradients
        // through a dense active-restricted Gram block; the residual is
        // synced once at the end.
        const auto active_phase = [&] {
            std::vector<int> act;
            for (Eigen::Index j = 0; j < p; ++j) {
                if (theta[j] != 0.0) act.push_back(static_cast<int>(j));
            }
            if (act.empty()) return;
            const int a = static_cast<int>(act.size());
            Eigen::MatrixXd ga_block(a, a);
            for (int i = 0; i < a; ++i) {
                const Eigen::VectorXd& gcol = gram_col(act[static_cast<std::size_t>(i)]);
                for (int m = 0; m < a; ++m) {
                    ga_block(m, i) = gcol[act[static_cast<std::size_t>(m)]];
                }
            }
            Eigen::VectorXd ga(a);
            for (int i = 0; i < a; ++i) {
                ga[i] = s.xs.col(act[static_cast<std::size_t>(i)]).dot(r) /
                        static_cast<double>(n);
            }
            Eigen::VectorXd accum = Eigen::VectorXd::Zero(a);
            while (true) {
                check_budget();
                double maxd = 0.0;
                for (int i = 0; i < a; ++i) {
                    const int j = act[static_cast<std::size_t>(i)];
                    if (theta[j] == 0.0) continue;
                    const double t = 0.5 * lambda / s.scale[j];
                    const double next = soft_threshold(ga[i] + theta[j], t);
                    const double d = next - theta[j];
                    if (d != 0.0) {
                        ga.noalias() -= d * ga_block.col(i);
                        theta[j] = next;
                        accum[i] += d;
                        maxd = std::max(maxd, std::abs(d) / s.scale[j]);
                    }
                }
                if (maxd <= tol) break;
            }
            for (int i = 0; i < a; ++i) {
                if (accum[i] != 0.0) r -= accum[i] * s.xs.col(act[static_cast<std::size_t>(i)]);
            }
        };

        while (true) {
            const double maxd = full_pass();
            if (maxd > tol) {
                active_phase();
                continue;  // confirm with a full pass
            }
            if (kkt_gap_standardized(s, theta, r, lambda) <= opt.kkt_tol) break;
        }

        Eigen::VectorXd beta = theta.array() / s.scale.array();
        path.betas.push_back(std::move(beta));
    }
    return path;
}

double lasso_kkt_gap(const Eigen::MatrixXd& H, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& beta, double lambda) {
    const auto n = H.rows();
    const Eigen::VectorXd mean = H.colwise().mean();
    const Eigen::VectorXd yc = y.array() - y.mean();
    Eigen::MatrixXd xc = H.rowwise() - mean.transpose();
    const Eigen::VectorXd r = yc - xc * beta;
    double worst = 0.0;
    for (Eigen::Index j = 0; j < H.cols(); ++j) {
        const double grad = xc.col(j).dot(r) / static_cast<double>(n);
        const double gap = beta[j] != 0.0 ? std::abs(std::abs(grad) - 0.5 * lambda)
                                          : std::max(0.0, std::abs(grad) - 0.5 * lambda);
        worst = std::max(worst, gap);
    }
    return worst;
}

double intercept(const Eigen::VectorXd& beta, const Eigen::MatrixXd& H,
                 const std::vector<int>& y_pm) {
    const std::vector<int> active = nonzero_indices(beta);
    if (active.empty()) throw ArgumentError("intercept requires a nonzero beta");
    const auto n = H.rows();
    if (static_cast<Eigen::Index>(y_pm.size()) != n) {
        throw DimensionMismatchError("y length does not match H rows");
    }

    const int na = static_cast<int>(active.size());
    Eigen::VectorXd beta_a(na);
    for (int a = 0; a < na; ++a) beta_a[a] = beta[active[static_cast<std::size_t>(a)]];

    Eigen::VectorXd mu_pos = Eigen::VectorXd::Zero(na);
    Eigen::VectorXd mu_neg = Eigen::VectorXd::Zero(na);
    int n_pos = 0, n_neg = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const bool pos = y_pm[static_cast<std::size_t>(i)] > 0;
        (pos ? n_pos : n_neg)++;
        for (int a = 0; a < na; ++a) {
            const double v = H(i, active[static_cast<std::size_t>(a)]);
            (pos ? mu_pos[a] : mu_neg[a]) += v;
        }
    }
    if (n_pos == 0 || n_neg == 0) throw InsufficientClassDataError("a class is empty");
    mu_pos /= n_pos;
    mu_neg /= n_neg;

    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(na, na);
    Eigen::VectorXd row(na);
    for (Eigen::Index i = 0; i < n; ++i) {
        const bool pos = y_pm[static_cast<std::size_t>(i)] > 0;
        for (int a = 0; a < na; ++a) {
            row[a] = H(i, active[static_cast<std::size_t>(a)]) - (pos ? mu_pos[a] : mu_neg[a]);
        }
        sigma.noalias() += row * row.transpose();
    }
    sigma /= static_cast<double>(n - 2);

    const double denom = (mu_pos - mu_neg).dot(beta_a);
    if (denom == 0.0) {
        throw DegenerateProjectionError("(mu+ - mu-)^T beta is zero; intercept undefined");
    }
    const double pi_pos = static_cast<double>(n_pos) / static_cast<double>(n);
    const double pi_neg = static_cast<double>(n_neg) / static_cast<double>(n);
    return -0.5 * (mu_pos + mu_neg).dot(beta_a) +
           std::log(pi_pos / pi_neg) * beta_a.dot(sigma * beta_a) / denom;
}

namespace {

Eigen::VectorXd to_real(const std::vector<int>& y_pm) {
    Eigen::VectorXd y(static_cast<Eigen::Index>(y_pm.size()));
    for (std::size_t i = 0; i < y_pm.size(); ++i) {
        y[static_cast<Eigen::Index>(i)] = y_pm[i] > 0 ? 1.0 : -1.0;
    }
    return y;
}

}  // namespace

CvResult cv_tune(const Eigen::MatrixXd& H, const std::vector<int>& y_pm, int folds,
                 int grid_size, std::uint64_t seed, double min_ratio, const LassoOptions& opt) {
    const auto n = H.rows();
    if (folds < 2) throw ArgumentError("cv_tune needs folds >= 2");
    if (static_cast<Eigen::Index>(y_pm.size()) != n) {
        throw DimensionMismatchError("y length does not match H rows");
    }

    // Stratified assignment: within each class, shuffle then deal round-robin.
    std::vector<int> fold_of(static_cast<std::size_t>(n), -1);
    for (int cls : {+1, -1}) {
        std::vector<int> rows;
        for (Eigen::Index i = 0; i < n; ++i) {
            if ((y_pm[static_cast<std::size_t>(i)] > 0) == (cls > 0)) {
                rows.push_back(static_cast<int>(i));
            }
        }
        CounterRng rng(CounterRng::derive(seed, cls > 0 ? 0xF01D01 : 0xF01D02));
        for (std::size_t i = rows.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(rng.next_u64() % i);
            std::swap(rows[i - 1], rows[j]);
        }
        for (std::size_t i = 0; i < rows.size(); ++i) {
            fold_of[static_cast<std::size_t>(rows[i])] = static_cast<int>(i % folds);
        }
    }
    for (int f = 0; f < folds; ++f) {
        bool has_pos = false, has_neg = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (fold_of[static_cast<std::size_t>(i)] != f) continue;
            (y_pm[static_cast<std::size_t>(i)] > 0 ? has_pos : has_neg) = true;
        }
        if (!has_pos || !has_neg) {
            throw FoldConstructionError("fold " + std::to_string(f) +
                                        " is missing a class; reduce folds");
        }
    }

    const Eigen::VectorXd y_real = to_real(y_pm);
    const Eigen::VectorXd grid = lambda_grid(lasso_lambda_max(H, y_real), grid_size, min_ratio);

    Eigen::VectorXi miss = Eigen::VectorXi::Zero(grid.size());
    std::vector<char> invalid(static_cast<std::size_t>(grid.size()), 0);

    for (int f = 0; f < folds; ++f) {
        std::vector<int> tr, va;
        for (Eigen::Index i = 0; i < n; ++i) {
            (fold_of[static_cast<std::size_t>(i)] == f ? va : tr).push_back(static_cast<int>(i));
        }
        Eigen::MatrixXd Htr(static_cast<Eigen::Index>(tr.size()), H.cols());
        std::vector<int> ytr(tr.size());
        int tr_pos = 0;
        for (std::size_t i = 0; i < tr.size(); ++i) {
            Htr.row(static_cast<Eigen::Index>(i)) = H.row(tr[i]);
            ytr[i] = y_pm[static_cast<std::size_t>(tr[i])];
            if (ytr[i] > 0) ++tr_pos;
        }
        const int fallback_sign = 2 * tr_pos >= static_cast<int>(tr.size()) ? +1 : -1;

        // Fold fits only feed misclassification counts, so they run at a
        // relaxed tolerance; the reported fit is solved at full precision.
        LassoOptions fold_opt = opt;
        fold_opt.tol_scale = std::max(opt.tol_scale, 1e-5);
        fold_opt.kkt_tol = std::numeric_limits<double>::infinity();
        const LassoPath path = lasso_path(Htr, to_real(ytr), grid, fold_opt);
        for (Eigen::Index k = 0; k < grid.size(); ++k) {
            const Eigen::VectorXd& beta = path.betas[static_cast<std::size_t>(k)];
            const std::vector<int> active = nonzero_indices(beta);
            double beta0 = 0.0;
            bool fallback = active.empty();
            if (!fallback) {
                try {
                    beta0 = intercept(beta, Htr, ytr);
                } catch (const DegenerateProjectionError&) {
                    invalid[static_cast<std::size_t>(k)] = 1;
                    continue;
                }
            }
            for (int i : va) {
                int label;
                if (fallback) {
                    label = fallback_sign;
                } else {
                    double s = beta0;
                    for (int j : active) s += H(i, j) * beta[j];
                    label = s >= 0.0 ? +1 : -1;
                }
                if (label != y_pm[static_cast<std::size_t>(i)]) {
                    miss[k] += 1;
                }
            }
        }
    }

    CvResult result;
    result.folds = folds;
    result.lambdas = grid;
    result.cv_errors.resize(grid.size());
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < grid.size(); ++k) {
        result.cv_errors[k] = invalid[static_cast<std::size_t>(k)]
                                  ? std::numeric_limits<double>::infinity()
                                  : static_cast<double>(miss[k]) / static_cast<double>(n);
        best = std::min(best, result.cv_errors[k]);
    }
    if (!std::isfinite(best)) throw ConvergenceError("cv_tune: every lambda was degenerate");
    for (Eigen::Index k = 0; k < grid.size(); ++k) {
        if (result.cv_errors[k] == best) {
            result.lambda = grid[k];  // grid is descending: first hit is largest
            break;
        }
    }
    return result;
}

DsdaFit fit_dsda(const Eigen::MatrixXd& H, const std::vector<int>& y_pm,
                 const TuningSpec& tuning, const LassoOptions& opt) {
    const Eigen::VectorXd y_real = to_real(y_pm);

    DsdaFit fit;
    fit.p = static_cast<int>(H.cols());

    Eigen::VectorXd grid;
    if (tuning.fixed_lambda) {
        const double lam = *tuning.fixed_lambda;
        if (!(lam > 0.0)) throw ArgumentError("fixed lambda must be positive");
        const double lmax = lasso_lambda_max(H, y_real);
        if (lam >= lmax) {
            grid.resize(1);
            grid[0] = lam;
        } else {
            // warm-started descent from lambda_max down to the requested value
            grid = lambda_grid(lmax, tuning.grid_size, std::max(lam / lmax, 1e-12));
            grid[grid.size() - 1] = lam;
        }
        fit.lambda = lam;
    } else {
        const CvResult cv = cv_tune(H, y_pm, tuning.folds, tuning.grid_size, tuning.seed,
                                    tuning.lambda_min_ratio, opt);
        grid = cv.lambdas;
        fit.lambda = cv.lambda;
        fit.lambda_path = cv.lambdas;
        fit.cv_errors = cv.cv_errors;
    }

    Eigen::Index chosen = grid.size() - 1;
    for (Eigen::Index k = 0; k < grid.size(); ++k) {
        if (grid[k] == fit.lambda) {
            chosen = k;
            break;
        }
    }
    // The final solve only needs the warm-start prefix down to the chosen
    // lambda.
    const LassoPath path = lasso_path(H, y_real, grid.head(chosen + 1), opt);
    fit.warnings = path.warnings;
    fit.beta = path.betas.back();
    fit.active_set = nonzero_indices(fit.beta);

    int n_pos = 0;
    for (int v : y_pm) n_pos += v > 0 ? 1 : 0;
    fit.pi_pos = static_cast<double>(n_pos) / static_cast<double>(y_pm.size());
    fit.pi_neg = 1.0 - fit.pi_pos;

    if (fit.active_set.empty()) {
        fit.prior_fallback = true;
        fit.beta0 = 0.0;
        fit.warnings.push_back("beta is identically zero; classifying by prior");
    } else {
        fit.beta0 = intercept(fit.beta, H, y_pm);
        const int na = static_cast<int>(fit.active_set.size());
        fit.mu_pos_active.resize(na);
        fit.mu_neg_active.resize(na);
        Eigen::MatrixXd Ha(H.rows(), na);
        for (int a = 0; a < na; ++a) Ha.col(a) = H.col(fit.active_set[static_cast<std::size_t>(a)]);
        Eigen::VectorXd mu_pos = Eigen::VectorXd::Zero(na), mu_neg = Eigen::VectorXd::Zero(na);
        int npos = 0, nneg = 0;
        for (Eigen::Index i = 0; i < H.rows(); ++i) {
            if (y_pm[static_cast<std::size_t>(i)] > 0) {
                mu_pos += Ha.row(i).transpose();
                ++npos;
            } else {
                mu_neg += Ha.row(i).transpose();
                ++nneg;
            }
        }
        mu_pos /= npos;
        mu_neg /= nneg;
        fit.mu_pos_active = mu_pos;
        fit.mu_neg_active = mu_neg;
        Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(na, na);
        for (Eigen::Index i = 0; i < H.rows(); ++i) {
            const Eigen::VectorXd d =
                Ha.row(i).transpose() -
                (y_pm[static_cast<std::size_t>(i)] > 0 ? mu_pos : mu_neg);
            sigma.noalias() += d * d.transpose();
        }
        fit.sigma_active = sigma / static_cast<double>(H.rows() - 2);
    }
    fit.kkt_violation = lasso_kkt_gap(H, y_real, fit.beta, fit.lambda);
    return fit;
}

SsdaModel fit_ssda(const Dataset& data, TransformVariant variant, const TuningSpec& tuning,
                   const LassoOptions& opt) {
    SsdaModel model;
    switch (variant) {
        case TransformVariant::naive: model.transform = fit_naive(data); break;
        case TransformVariant::pooled: model.transform = fit_pooled(data); break;
        case TransformVariant::legacy:
            model.transform = fit_legacy(data, tuning.legacy_a, tuning.legacy_b);
            break;
        case TransformVariant::identity: model.transform = fit_identity(data); break;
        case TransformVariant::oracle:
            throw ArgumentError("the oracle variant is constructed from a SimulationSpec");
    }
    const Eigen::MatrixXd H = model.transform.apply(data.x);

    std::vector<int> y_pm(data.y.size());
    const int pos_label = model.transform.class_labels[0];
    for (std::size_t i = 0; i < data.y.size(); ++i) y_pm[i] = data.y[i] == pos_label ? +1 : -1;

    model.fit = fit_dsda(H, y_pm, tuning, opt);
    model.fit.variant = variant;
    model.fit.pos_label = pos_label;
    model.fit.neg_label = model.transform.class_labels[1];
    return model;
}

Prediction predict(const DsdaFit& fit, const TransformModel& transform, const Eigen::MatrixXd& X) {
    if (X.cols() != transform.p || fit.p != transform.p) {
        throw DimensionMismatchError("prediction input has " + std::to_string(X.cols()) +
                                     " features, model expects " + std::to_string(transform.p));
    }
    Prediction pred;
    pred.scores.resize(X.rows());
    pred.labels.resize(static_cast<std::size_t>(X.rows()));
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        double s = fit.beta0;
        for (int j : fit.active_set) s += fit.beta[j] * transform.eval(j, X(i, j));
        pred.scores[i] = s;
        pred.labels[static_cast<std::size_t>(i)] = s >= 0.0 ? fit.pos_label : fit.neg_label;
    }
    return pred;
}

}  // namespace ssda
