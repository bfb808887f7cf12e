#include "ssda/simulate.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>

#include "ssda/errors.hpp"
#include "ssda/normal.hpp"
#include "ssda/rng.hpp"

namespace ssda {

CovarianceModel build_covariance(const CovarianceSpec& spec) {
    if (spec.p < 1) throw ArgumentError("covariance dimension must be positive");
    CovarianceModel model;
    model.sigma.resize(spec.p, spec.p);
    switch (spec.kind) {
        case CovarianceSpec::Kind::ar: {
            if (!(std::abs(spec.rho) < 1.0)) throw ArgumentError("AR(rho) needs |rho| < 1");
            for (int i = 0; i < spec.p; ++i) {
                for (int j = 0; j < spec.p; ++j) {
                    model.sigma(i, j) = std::pow(spec.rho, std::abs(i - j));
                }
            }
            break;
        }
        case CovarianceSpec::Kind::cs: {
            if (spec.p > 1 && !(spec.rho > -1.0 / (spec.p - 1) && spec.rho < 1.0)) {
                throw ArgumentError("CS(rho) needs rho in (-1/(p-1), 1)");
            }
            model.sigma.setConstant(spec.rho);
            model.sigma.diagonal().setOnes();
            break;
        }
        case CovarianceSpec::Kind::block_cs: {
            if (spec.blocks < 1 || spec.block_dim < 1 ||
                spec.blocks * spec.block_dim != spec.p) {
                throw ArgumentError("block CS needs blocks * block_dim == p");
            }
            if (spec.block_dim > 1 &&
                !(spec.rho > -1.0 / (spec.block_dim - 1) && spec.rho < 1.0)) {
                throw ArgumentError("block CS(rho) needs rho in (-1/(dim-1), 1)");
            }
            model.sigma.setZero();
            for (int b = 0; b < spec.blocks; ++b) {
                auto block = model.sigma.block(b * spec.block_dim, b * spec.block_dim,
                                               spec.block_dim, spec.block_dim);
                block.setConstant(spec.rho);
                block.diagonal().setOnes();
            }
            break;
        }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(model.sigma);
    if (llt.info() != Eigen::Success) {
        throw ArgumentError("covariance parameterization is not positive definite");
    }
    model.chol = llt.matrixL();
    return model;
}

std::vector<int> SimulationSpec::support() const {
    std::vector<int> s;
    for (int j = 0; j < beta_bayes.size(); ++j) {
        if (beta_bayes[j] != 0.0) s.push_back(j);
    }
    return s;
}

namespace {

struct Assignment {
    Marginal g;
    std::vector<int> indices;  // 1-based, as published
};

std::vector<int> range_1(int lo, int hi, int step = 1) {
    std::vector<int> out;
    for (int v = lo; v <= hi; v += step) out.push_back(v);
    return out;
}

std::vector<int> with_singleton(int s, std::vector<int> rest) {
    rest.insert(rest.begin(), s);
    return rest;
}

std::vector<Assignment> table1_assignments(int model_id) {
    switch (model_id) {
        case 1:
        case 2:
            return {
                {Marginal::cube, with_singleton(1, range_1(101, 150))},
                {Marginal::exp_fn, with_singleton(2, range_1(151, 200))},
                {Marginal::arctan, with_singleton(3, range_1(201, 300))},
                {Marginal::cube, range_1(4, 50)},
                {Marginal::norm_cdf_fn, range_1(51, 100)},
                {Marginal::shifted_cube, range_1(301, 350)},
                {Marginal::arctan2x, range_1(351, 400)},
            };
        case 3:
            return {
                {Marginal::cube, with_singleton(1, range_1(201, 300))},
                {Marginal::exp_fn, with_singleton(2, range_1(301, 400))},
                {Marginal::arctan, with_singleton(3, range_1(401, 500))},
                {Marginal::cube, range_1(4, 100, 2)},
                {Marginal::norm_cdf_fn, with_singleton(5, range_1(101, 200))},
                {Marginal::shifted_cube, range_1(501, 600)},
                {Marginal::arctan2x, range_1(601, 800)},
            };
        case 4:
            return {
                {Marginal::cube, with_singleton(3, range_1(201, 300))},
                {Marginal::exp_fn, with_singleton(4, range_1(301, 400))},
                {Marginal::arctan, with_singleton(5, range_1(401, 500))},
                {Marginal::cube, range_1(1, 100, 7)},
                {Marginal::norm_cdf_fn, with_singleton(2, range_1(101, 200))},
                {Marginal::shifted_cube, with_singleton(6, range_1(501, 600))},
                {Marginal::arctan2x, with_singleton(7, range_1(601, 800))},
            };
        default: throw ArgumentError("model id must be 1..4");
    }
}

}  // namespace

SimulationSpec make_simulation_spec(int model_id, char series,
                                    const SimulationOverrides& overrides) {
    if (model_id < 1 || model_id > 4) throw ArgumentError("model id must be 1..4");
    if (series != 'a' && series != 'b') throw ArgumentError("series must be 'a' or 'b'");

    SimulationSpec spec;
    spec.model_id = model_id;
    spec.series = series;

    std::vector<double> coef;
    switch (model_id) {
        case 1:
            spec.n = 150;
            spec.cov = {CovarianceSpec::Kind::ar, 400, 0.5, 1, 0};
            coef = {3.0, 1.5, 0.0, 0.0, 2.0};
            for (auto& c : coef) c *= 0.556;
            break;
        case 2:
            spec.n = 200;
            spec.cov = {CovarianceSpec::Kind::ar, 400, 0.5, 1, 0};
            coef = {3.0, 2.5, -2.8};
            for (auto& c : coef) c *= 0.582;
            break;
        case 3:
            spec.n = 400;
            spec.cov = {CovarianceSpec::Kind::cs, 800, 0.5, 1, 0};
            coef = {3.0, 1.7, -2.2, -2.1, 2.55};
            for (auto& c : coef) c *= 0.395;
            break;
        case 4:
            spec.n = 300;
            spec.cov = {CovarianceSpec::Kind::block_cs, 800, 0.6, 5, 160};
            coef = {1.2, -1.4, 1.15, -1.64, 1.5, -1.0, 2.0};
            for (auto& c : coef) c *= 0.916;
            break;
    }
    if (overrides.n) spec.n = *overrides.n;
    if (overrides.rho) spec.cov.rho = *overrides.rho;
    if (overrides.p) {
        spec.cov.p = *overrides.p;
        if (spec.cov.kind == CovarianceSpec::Kind::block_cs) {
            if (*overrides.p % spec.cov.blocks != 0) {
                throw ArgumentError("model 4 p override must be divisible by 5");
            }
            spec.cov.block_dim = *overrides.p / spec.cov.blocks;
        }
    }
    spec.p = spec.cov.p;
    if (spec.p < static_cast<int>(coef.size())) {
        throw ArgumentError("p override smaller than the Bayes support");
    }
    if (spec.n < 4) throw ArgumentError("n must be at least 4");

    spec.beta_bayes = Eigen::VectorXd::Zero(spec.p);
    for (std::size_t j = 0; j < coef.size(); ++j) {
        spec.beta_bayes[static_cast<Eigen::Index>(j)] = coef[j];
    }

    const CovarianceModel cov = build_covariance(spec.cov);
    spec.mu_plus = cov.sigma * spec.beta_bayes;

    spec.g.assign(static_cast<std::size_t>(spec.p), Marginal::identity);
    if (series == 'b') {
        std::vector<char> assigned(static_cast<std::size_t>(spec.p), 0);
        for (const Assignment& a : table1_assignments(model_id)) {
            for (int idx1 : a.indices) {
                if (idx1 > spec.p) continue;  // dropped under a p override
                const std::size_t j = static_cast<std::size_t>(idx1 - 1);
                if (assigned[j]) {
                    throw ArgumentError("distortion table assigns feature " +
                                        std::to_string(idx1) + " twice");
                }
                assigned[j] = 1;
                spec.g[j] = a.g;
            }
        }
    }
    return spec;
}

namespace {

// Column j of draw i: mu_Y[j] + L.row(j).head(j+1) . z. Both samplers go
// through here so that subset draws match full draws bitwise.
struct DrawContext {
    const SimulationSpec& spec;
    const CovarianceModel& cov;
    CounterRng rng;
    Eigen::VectorXd z;

    DrawContext(const SimulationSpec& s, const CovarianceModel& c, std::uint64_t seed)
        : spec(s), cov(c), rng(seed), z(s.p) {}

    int draw_label(long i) {
        const std::uint64_t base = static_cast<std::uint64_t>(i) *
                                   (static_cast<std::uint64_t>(spec.p) + 1);
        return rng.uniform_at(base) < 0.5 ? +1 : -1;
    }

    void fill_z_prefix(long i, int count) {
        const std::uint64_t base = static_cast<std::uint64_t>(i) *
                                   (static_cast<std::uint64_t>(spec.p) + 1);
        for (int k = 0; k < count; ++k) {
            z[k] = rng.normal_at(base + 1 + static_cast<std::uint64_t>(k));
        }
    }

    double latent(int label, int j) const {
        const double mean = label > 0 ? spec.mu_plus[j] : 0.0;
        return mean + cov.chol.row(j).head(j + 1).dot(z.head(j + 1));
    }
};

}  // namespace

Dataset sample_model(const SimulationSpec& spec, const CovarianceModel& cov, int n_draw,
                     std::uint64_t seed) {
    if (n_draw < 0) throw ArgumentError("n_draw must be nonnegative");
    Dataset data;
    data.x.resize(n_draw, spec.p);
    data.y.resize(static_cast<std::size_t>(n_draw));
    DrawContext ctx(spec, cov, seed);
    for (int i = 0; i < n_draw; ++i) {
        const int label = ctx.draw_label(i);
        data.y[static_cast<std::size_t>(i)] = label;
        ctx.fill_z_prefix(i, spec.p);
        for (int j = 0; j < spec.p; ++j) {
            data.x(i, j) = marginal_forward(spec.g[static_cast<std::size_t>(j)],
                                            ctx.latent(label, j));
        }
    }
    return data;
}

Dataset sample_model(const SimulationSpec& spec, int n_draw, std::uint64_t seed) {
    return sample_model(spec, build_covariance(spec.cov), n_draw, seed);
}

MarginalSample sample_marginal(const SimulationSpec& spec, const CovarianceModel& cov,
                               const std::vector<int>& cols, int n_draw, std::uint64_t seed) {
    MarginalSample out;
    out.cols = cols;
    std::sort(out.cols.begin(), out.cols.end());
    out.cols.erase(std::unique(out.cols.begin(), out.cols.end()), out.cols.end());
    if (!out.cols.empty() && (out.cols.front() < 0 || out.cols.back() >= spec.p)) {
        throw ArgumentError("marginal column index out of range");
    }
    const int m = static_cast<int>(out.cols.size());
    const int prefix = m == 0 ? 0 : out.cols.back() + 1;
    out.v.resize(n_draw, m);
    out.x.resize(n_draw, m);
    out.y_pm.resize(static_cast<std::size_t>(n_draw));
    DrawContext ctx(spec, cov, seed);
    for (int i = 0; i < n_draw; ++i) {
        const int label = ctx.draw_label(i);
        out.y_pm[static_cast<std::size_t>(i)] = label;
        ctx.fill_z_prefix(i, prefix);
        for (int c = 0; c < m; ++c) {
            const int j = out.cols[static_cast<std::size_t>(c)];
            out.v(i, c) = ctx.latent(label, j);
            out.x(i, c) = marginal_forward(spec.g[static_cast<std::size_t>(j)], out.v(i, c));
        }
    }
    return out;
}

double bayes_error(const SimulationSpec& spec) {
    // (mu+ - mu-)^T Sigma^{-1} (mu+ - mu-) = beta^T Sigma beta = beta^T mu+
    const double delta2 = spec.beta_bayes.dot(spec.mu_plus);
    return norm_cdf(-0.5 * std::sqrt(std::max(delta2, 0.0)));
}

double bayes_error_mc(const SimulationSpec& spec, long n_draws, std::uint64_t seed) {
    if (n_draws < 1) throw ArgumentError("n_draws must be positive");
    const CovarianceModel cov = build_covariance(spec.cov);
    const std::vector<int> sup = spec.support();
    DrawContext ctx(spec, cov, seed);
    const int prefix = sup.empty() ? 0 : sup.back() + 1;
    long wrong = 0;
    for (long i = 0; i < n_draws; ++i) {
        const int label = ctx.draw_label(i);
        ctx.fill_z_prefix(i, prefix);
        double score = 0.0;
        for (int j : sup) {
            score += spec.beta_bayes[j] * (ctx.latent(label, j) - 0.5 * spec.mu_plus[j]);
        }
        const int pred = score >= 0.0 ? +1 : -1;
        if (pred != label) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(n_draws);
}

TransformModel oracle_transform(const SimulationSpec& spec) {
    TransformModel model;
    model.variant = TransformVariant::oracle;
    model.p = spec.p;
    model.oracle_g = spec.g;
    model.class_labels = {+1, -1};
    model.class_priors = {0.5, 0.5};
    return model;
}

}  // namespace ssda
