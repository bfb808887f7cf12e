#include "ssda/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ssda/errors.hpp"
#include "ssda/normal.hpp"

namespace ssda {

std::string to_string(TransformVariant v) {
    switch (v) {
        case TransformVariant::naive: return "naive";
        case TransformVariant::pooled: return "pooled";
        case TransformVariant::legacy: return "legacy";
        case TransformVariant::oracle: return "oracle";
        case TransformVariant::identity: return "identity";
    }
    return "identity";
}

TransformVariant variant_from_string(const std::string& s) {
    if (s == "naive") return TransformVariant::naive;
    if (s == "pooled") return TransformVariant::pooled;
    if (s == "legacy") return TransformVariant::legacy;
    if (s == "oracle") return TransformVariant::oracle;
    if (s == "identity") return TransformVariant::identity;
    throw ArgumentError("unknown transform variant: " + s);
}

std::string to_string(Marginal g) {
    switch (g) {
        case Marginal::identity: return "identity";
        case Marginal::cube: return "cube";
        case Marginal::exp_fn: return "exp";
        case Marginal::arctan: return "arctan";
        case Marginal::norm_cdf_fn: return "norm-cdf";
        case Marginal::shifted_cube: return "shifted-cube";
        case Marginal::arctan2x: return "arctan-2x";
    }
    return "identity";
}

Marginal marginal_from_string(const std::string& s) {
    if (s == "identity") return Marginal::identity;
    if (s == "cube") return Marginal::cube;
    if (s == "exp") return Marginal::exp_fn;
    if (s == "arctan") return Marginal::arctan;
    if (s == "norm-cdf") return Marginal::norm_cdf_fn;
    if (s == "shifted-cube") return Marginal::shifted_cube;
    if (s == "arctan-2x") return Marginal::arctan2x;
    throw ArgumentError("unknown marginal map: " + s);
}

double marginal_forward(Marginal g, double v) {
    switch (g) {
        case Marginal::identity: return v;
        case Marginal::cube: return v * v * v;
        case Marginal::exp_fn: return std::exp(v);
        case Marginal::arctan: return std::atan(v);
        case Marginal::norm_cdf_fn: return norm_cdf(v);
        case Marginal::shifted_cube: return (v + 1.0) * (v + 1.0) * (v + 1.0);
        case Marginal::arctan2x: return std::atan(2.0 * v);
    }
    return v;
}

double marginal_inverse(Marginal g, double x, long* clamped) {
    const auto clamp_to = [&](double lo, double hi) {
        if (x < lo || x > hi) {
            if (clamped) ++*clamped;
            return std::clamp(x, lo, hi);
        }
        return x;
    };
    switch (g) {
        case Marginal::identity: return x;
        case Marginal::cube: return std::cbrt(x);
        case Marginal::exp_fn: return std::log(clamp_to(std::numeric_limits<double>::min(),
                                                        std::numeric_limits<double>::max()));
        case Marginal::arctan: return std::tan(clamp_to(-M_PI_2, M_PI_2));
        case Marginal::norm_cdf_fn: {
            constexpr double eps = 0x1.0p-53;
            return inv_norm_cdf(clamp_to(eps, 1.0 - eps));
        }
        case Marginal::shifted_cube: return std::cbrt(x) - 1.0;
        case Marginal::arctan2x: return std::tan(clamp_to(-M_PI_2, M_PI_2)) / 2.0;
    }
    return x;
}

double StepMap::eval(double x) const {
    const auto& v = table.sorted_values;
    const auto idx = std::upper_bound(v.begin(), v.end(), x) - v.begin();
    return z[static_cast<std::size_t>(idx)];
}

StepMap make_step_map(const EcdfTable& table) {
    StepMap map;
    map.table = table;
    const int n = table.n_class;
    map.z.resize(static_cast<std::size_t>(n) + 1);
    if (table.degenerate) {
        const double zb = inv_norm_cdf(table.upper_bound);
        std::fill(map.z.begin(), map.z.end(), zb);
        return map;
    }
    for (int k = 0; k <= n; ++k) {
        const double f = std::clamp(static_cast<double>(k) / n, table.lower_bound,
                                    table.upper_bound);
        map.z[static_cast<std::size_t>(k)] = inv_norm_cdf(f);
    }
    return map;
}

double FeatureTransform::eval(double x) const {
    double out = 0.0;
    for (std::size_t c = 0; c < components.size(); ++c) {
        out += weights[c] * (components[c].eval(x) + shifts[c]);
    }
    return out;
}

double TransformModel::eval(int feature, double x, ApplyStats* stats) const {
    switch (variant) {
        case TransformVariant::identity: return x;
        case TransformVariant::oracle:
            return marginal_inverse(oracle_g[static_cast<std::size_t>(feature)], x,
                                    stats ? &stats->clamped : nullptr);
        default: return features[static_cast<std::size_t>(feature)].eval(x);
    }
}

Eigen::MatrixXd TransformModel::apply(const Eigen::MatrixXd& X, ApplyStats* stats) const {
    if (X.cols() != p) {
        throw DimensionMismatchError("transform expects " + std::to_string(p) +
                                     " features, got " + std::to_string(X.cols()));
    }
    if (variant == TransformVariant::identity) return X;
    Eigen::MatrixXd H(X.rows(), X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            H(i, j) = eval(static_cast<int>(j), X(i, j), stats);
        }
    }
    return H;
}

namespace {

std::vector<double> column_subset(const Eigen::MatrixXd& x, const std::vector<int>& rows, int j) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (int i : rows) out.push_back(x(i, j));
    return out;
}

double winsor_a(int n) { return 1.0 / (static_cast<double>(n) * n); }

void note_degenerate(TransformModel& model, int j) {
    model.warnings.push_back("feature " + std::to_string(j) +
                             " is constant within a class; transform output clamped");
}

}  // namespace

TransformModel fit_naive(const Dataset& data) {
    const BinaryCoding coding = code_binary(data);
    const double a = winsor_a(coding.n_pos);

    TransformModel model;
    model.variant = TransformVariant::naive;
    model.p = static_cast<int>(data.p());
    model.class_labels = {coding.pos_label, coding.neg_label};
    model.class_priors = {coding.pi_pos(), coding.pi_neg()};
    model.features.reserve(static_cast<std::size_t>(data.p()));
    for (int j = 0; j < data.p(); ++j) {
        const EcdfTable table = fit_ecdf(column_subset(data.x, coding.pos_rows, j), a, 1.0 - a);
        FeatureTransform ft;
        ft.components = {make_step_map(table)};
        ft.weights = {1.0};
        ft.shifts = {0.0};
        ft.degenerate = table.degenerate;
        if (ft.degenerate) note_degenerate(model, j);
        model.features.push_back(std::move(ft));
    }
    return model;
}

TransformModel fit_pooled(const Dataset& data) {
    const BinaryCoding coding = code_binary(data);
    const double a_pos = winsor_a(coding.n_pos);
    const double a_neg = winsor_a(coding.n_neg);
    const double pi_pos = coding.pi_pos();
    const double pi_neg = coding.pi_neg();

    TransformModel model;
    model.variant = TransformVariant::pooled;
    model.p = static_cast<int>(data.p());
    model.class_labels = {coding.pos_label, coding.neg_label};
    model.class_priors = {pi_pos, pi_neg};
    model.mu_minus_hat.resize(static_cast<std::size_t>(data.p()));
    model.features.reserve(static_cast<std::size_t>(data.p()));

    for (int j = 0; j < data.p(); ++j) {
        const auto pos_vals = column_subset(data.x, coding.pos_rows, j);
        const auto neg_vals = column_subset(data.x, coding.neg_rows, j);
        StepMap pos_map = make_step_map(fit_ecdf(pos_vals, a_pos, 1.0 - a_pos));
        StepMap neg_map = make_step_map(fit_ecdf(neg_vals, a_neg, 1.0 - a_neg));

        // mu^(+): negative-class sample mean under the positive-class map;
        // mu^(-): negated positive-class sample mean under the negative map.
        double mu_plus_side = 0.0;
        for (double v : neg_vals) mu_plus_side += pos_map.eval(v);
        mu_plus_side /= coding.n_neg;
        double mu_minus_side = 0.0;
        for (double v : pos_vals) mu_minus_side += neg_map.eval(v);
        mu_minus_side = -mu_minus_side / coding.n_pos;
        const double mu_pool = pi_pos * mu_plus_side + pi_neg * mu_minus_side;

        FeatureTransform ft;
        ft.degenerate = pos_map.table.degenerate && neg_map.table.degenerate;
        ft.components = {std::move(pos_map), std::move(neg_map)};
        ft.weights = {pi_pos, pi_neg};
        ft.shifts = {0.0, mu_pool};
        if (ft.degenerate) note_degenerate(model, j);
        model.mu_minus_hat[static_cast<std::size_t>(j)] = mu_pool;
        model.features.push_back(std::move(ft));
    }
    return model;
}

TransformModel fit_legacy(const Dataset& data, double a, double b) {
    const BinaryCoding coding = code_binary(data);
    if (!(0.0 < a && a < 0.5 && 0.5 < b && b < 1.0)) {
        throw ArgumentError("legacy bounds must satisfy 0 < a < 0.5 < b < 1");
    }

    TransformModel model;
    model.variant = TransformVariant::legacy;
    model.p = static_cast<int>(data.p());
    model.class_labels = {coding.pos_label, coding.neg_label};
    model.class_priors = {coding.pi_pos(), coding.pi_neg()};
    model.legacy_a = a;
    model.legacy_b = b;
    model.mu_minus_hat.resize(static_cast<std::size_t>(data.p()));
    model.features.reserve(static_cast<std::size_t>(data.p()));

    for (int j = 0; j < data.p(); ++j) {
        const auto pos_vals = column_subset(data.x, coding.pos_rows, j);
        const auto neg_vals = column_subset(data.x, coding.neg_rows, j);
        const EcdfTable pos_table = fit_ecdf(pos_vals, a, b);
        const EcdfTable neg_table = fit_ecdf(neg_vals, a, b);
        StepMap pos_map = make_step_map(pos_table);

        // mu_minus = q^{-1} [ n_-^{-1} sum_i h(x_i) 1{Ftilde+(x_i) in (a,b)}
        //                     + phi(Phi^{-1}(Ftilde- (Ftilde+^{-1}(b))))
        //                     - phi(Phi^{-1}(Ftilde- (Ftilde+^{-1}(a)))) ]
        // with q = n_-^{-1} sum_i 1{Ftilde+(x_i) in (a,b)}, both indicators
        // read against the positive-class raw ECDF.
        double sum_inside = 0.0;
        int count_inside = 0;
        for (double v : neg_vals) {
            const double u = pos_table.raw(v);
            if (u > a && u < b) {
                sum_inside += pos_map.eval(v);
                ++count_inside;
            }
        }
        if (count_inside == 0) {
            throw LegacyDegenerateError("legacy mu_minus undefined for feature " +
                                        std::to_string(j) + ": q = 0");
        }
        const double q = static_cast<double>(count_inside) / coding.n_neg;
        const double upper_term = phi_of_quantile(neg_table.raw(pos_table.raw_inverse(b)));
        const double lower_term = phi_of_quantile(neg_table.raw(pos_table.raw_inverse(a)));
        const double mu = (sum_inside / coding.n_neg + upper_term - lower_term) / q;

        FeatureTransform ft;
        ft.degenerate = pos_table.degenerate;
        ft.components = {std::move(pos_map)};
        ft.weights = {1.0};
        ft.shifts = {0.0};
        if (ft.degenerate) note_degenerate(model, j);
        model.mu_minus_hat[static_cast<std::size_t>(j)] = mu;
        model.features.push_back(std::move(ft));
    }
    return model;
}

TransformModel fit_multiclass_pooled(const Dataset& data) {
    const ClassIndex idx = index_classes(data, 2);
    const int k = idx.k();

    TransformModel model;
    model.variant = TransformVariant::pooled;
    model.p = static_cast<int>(data.p());
    model.class_labels = idx.labels;
    model.class_priors = idx.priors;
    model.features.reserve(static_cast<std::size_t>(data.p()));
    if (k == 2) model.mu_minus_hat.resize(static_cast<std::size_t>(data.p()));

    for (int j = 0; j < data.p(); ++j) {
        std::vector<StepMap> maps;
        maps.reserve(static_cast<std::size_t>(k));
        bool all_degenerate = true;
        for (int c = 0; c < k; ++c) {
            const double a = winsor_a(static_cast<int>(idx.rows[c].size()));
            maps.push_back(make_step_map(fit_ecdf(column_subset(data.x, idx.rows[c], j), a, 1.0 - a)));
            all_degenerate = all_degenerate && maps.back().table.degenerate;
        }

        // m(c, l): class-c sample mean under class-l's map.
        Eigen::MatrixXd m(k, k);
        for (int c = 0; c < k; ++c) {
            for (int l = 0; l < k; ++l) {
                double s = 0.0;
                for (int i : idx.rows[c]) s += maps[static_cast<std::size_t>(l)].eval(data.x(i, j));
                m(c, l) = s / static_cast<double>(idx.rows[c].size());
            }
        }
        // mu_k^(l) = m(k, l) - m(ref, l) estimates mu_k for every l; the
        // pooled estimate weights these by the class priors pi_l.
        std::vector<double> shifts(static_cast<std::size_t>(k), 0.0);
        for (int c = 1; c < k; ++c) {
            double mu = 0.0;
            for (int l = 0; l < k; ++l) mu += idx.priors[static_cast<std::size_t>(l)] * (m(c, l) - m(0, l));
            shifts[static_cast<std::size_t>(c)] = mu;
        }

        FeatureTransform ft;
        ft.components = std::move(maps);
        ft.weights = idx.priors;
        ft.shifts = shifts;
        ft.degenerate = all_degenerate;
        if (ft.degenerate) note_degenerate(model, j);
        if (k == 2) model.mu_minus_hat[static_cast<std::size_t>(j)] = shifts[1];
        model.features.push_back(std::move(ft));
    }
    return model;
}

TransformModel fit_identity(const Dataset& data) {
    const BinaryCoding coding = code_binary(data);
    TransformModel model;
    model.variant = TransformVariant::identity;
    model.p = static_cast<int>(data.p());
    model.class_labels = {coding.pos_label, coding.neg_label};
    model.class_priors = {coding.pi_pos(), coding.pi_neg()};
    return model;
}

}  // namespace ssda
