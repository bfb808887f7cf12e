#include "ssda/serialize.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

#include "ssda/errors.hpp"

namespace ssda {

using nlohmann::json;

namespace {

constexpr int kTransformVersion = 1;
constexpr int kFitVersion = 1;

json check_envelope(const std::string& text, const std::string& format, int version) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw SerializationError(std::string("invalid JSON: ") + e.what());
    }
    if (j.value("format", "") != format) {
        throw SerializationError("expected format '" + format + "'");
    }
    if (j.value("version", 0) != version) {
        throw SerializationError("unsupported " + format + " version");
    }
    return j;
}

json step_map_to_json(const StepMap& map) {
    return json{{"n", map.table.n_class},
                {"a", map.table.lower_bound},
                {"b", map.table.upper_bound},
                {"degenerate", map.table.degenerate},
                {"knots", map.table.sorted_values},
                {"values", map.z}};
}

StepMap step_map_from_json(const json& j) {
    StepMap map;
    map.table.n_class = j.at("n").get<int>();
    map.table.lower_bound = j.at("a").get<double>();
    map.table.upper_bound = j.at("b").get<double>();
    map.table.degenerate = j.at("degenerate").get<bool>();
    map.table.sorted_values = j.at("knots").get<std::vector<double>>();
    map.z = j.at("values").get<std::vector<double>>();
    if (map.z.size() != map.table.sorted_values.size() + 1) {
        throw SerializationError("step map has inconsistent knot/value lengths");
    }
    return map;
}

}  // namespace

std::string transform_to_json(const TransformModel& model,
                              const std::vector<std::string>& label_names) {
    json j;
    j["format"] = "ssda-transform";
    j["version"] = kTransformVersion;
    j["variant"] = to_string(model.variant);
    j["p"] = model.p;
    j["class_labels"] = model.class_labels;
    j["class_priors"] = model.class_priors;
    if (!label_names.empty()) j["label_names"] = label_names;
    if (!model.mu_minus_hat.empty()) j["mu_minus_hat"] = model.mu_minus_hat;
    if (model.variant == TransformVariant::legacy) {
        j["legacy_bounds"] = {model.legacy_a, model.legacy_b};
    }
    if (model.variant == TransformVariant::oracle) {
        std::vector<std::string> g;
        g.reserve(model.oracle_g.size());
        for (Marginal m : model.oracle_g) g.push_back(to_string(m));
        j["oracle_g"] = g;
    }
    if (!model.features.empty()) {
        json features = json::array();
        for (const FeatureTransform& ft : model.features) {
            json f;
            f["degenerate"] = ft.degenerate;
            f["weights"] = ft.weights;
            f["shifts"] = ft.shifts;
            json comps = json::array();
            for (const StepMap& map : ft.components) comps.push_back(step_map_to_json(map));
            f["components"] = comps;
            features.push_back(std::move(f));
        }
        j["features"] = std::move(features);
    }
    return j.dump();
}

TransformModel transform_from_json(const std::string& text,
                                   std::vector<std::string>* label_names) {
    const json j = check_envelope(text, "ssda-transform", kTransformVersion);
    TransformModel model;
    try {
        model.variant = variant_from_string(j.at("variant").get<std::string>());
        model.p = j.at("p").get<int>();
        model.class_labels = j.at("class_labels").get<std::vector<int>>();
        model.class_priors = j.at("class_priors").get<std::vector<double>>();
        if (label_names && j.contains("label_names")) {
            *label_names = j.at("label_names").get<std::vector<std::string>>();
        }
        if (j.contains("mu_minus_hat")) {
            model.mu_minus_hat = j.at("mu_minus_hat").get<std::vector<double>>();
        }
        if (j.contains("legacy_bounds")) {
            model.legacy_a = j.at("legacy_bounds").at(0).get<double>();
            model.legacy_b = j.at("legacy_bounds").at(1).get<double>();
        }
        if (j.contains("oracle_g")) {
            for (const auto& s : j.at("oracle_g")) {
                model.oracle_g.push_back(marginal_from_string(s.get<std::string>()));
            }
        }
        if (j.contains("features")) {
            for (const auto& f : j.at("features")) {
                FeatureTransform ft;
                ft.degenerate = f.at("degenerate").get<bool>();
                ft.weights = f.at("weights").get<std::vector<double>>();
                ft.shifts = f.at("shifts").get<std::vector<double>>();
                for (const auto& c : f.at("components")) {
                    ft.components.push_back(step_map_from_json(c));
                }
                if (ft.components.size() != ft.weights.size() ||
                    ft.components.size() != ft.shifts.size()) {
                    throw SerializationError("feature transform has inconsistent components");
                }
                model.features.push_back(std::move(ft));
            }
            if (static_cast<int>(model.features.size()) != model.p) {
                throw SerializationError("feature count does not match p");
            }
        }
    } catch (const json::exception& e) {
        throw SerializationError(std::string("malformed transform file: ") + e.what());
    }
    return model;
}

std::string fit_to_json(const DsdaFit& fit, const std::vector<std::string>& label_names) {
    json j;
    j["format"] = "ssda-fit";
    j["version"] = kFitVersion;
    j["p"] = fit.p;
    j["variant"] = to_string(fit.variant);
    json beta = json::array();
    for (int a : fit.active_set) beta.push_back(json::array({a, fit.beta[a]}));
    j["beta"] = std::move(beta);
    j["beta0"] = fit.beta0;
    j["lambda"] = fit.lambda;
    j["pi"] = {fit.pi_pos, fit.pi_neg};
    j["class_labels"] = {fit.pos_label, fit.neg_label};
    if (!label_names.empty()) j["label_names"] = label_names;
    j["prior_fallback"] = fit.prior_fallback;
    j["kkt_violation"] = fit.kkt_violation;
    if (fit.lambda_path.size() > 0) {
        j["lambda_path"] = std::vector<double>(fit.lambda_path.begin(), fit.lambda_path.end());
        j["cv_errors"] = std::vector<double>(fit.cv_errors.begin(), fit.cv_errors.end());
    }
    if (!fit.warnings.empty()) j["warnings"] = fit.warnings;
    return j.dump();
}

DsdaFit fit_from_json(const std::string& text, std::vector<std::string>* label_names) {
    const json j = check_envelope(text, "ssda-fit", kFitVersion);
    DsdaFit fit;
    try {
        fit.p = j.at("p").get<int>();
        fit.variant = variant_from_string(j.at("variant").get<std::string>());
        fit.beta = Eigen::VectorXd::Zero(fit.p);
        for (const auto& pair : j.at("beta")) {
            const int idx = pair.at(0).get<int>();
            if (idx < 0 || idx >= fit.p) throw SerializationError("beta index out of range");
            fit.beta[idx] = pair.at(1).get<double>();
            fit.active_set.push_back(idx);
        }
        fit.beta0 = j.at("beta0").get<double>();
        fit.lambda = j.at("lambda").get<double>();
        fit.pi_pos = j.at("pi").at(0).get<double>();
        fit.pi_neg = j.at("pi").at(1).get<double>();
        fit.pos_label = j.at("class_labels").at(0).get<int>();
        fit.neg_label = j.at("class_labels").at(1).get<int>();
        if (label_names && j.contains("label_names")) {
            *label_names = j.at("label_names").get<std::vector<std::string>>();
        }
        fit.prior_fallback = j.value("prior_fallback", false);
        fit.kkt_violation = j.value("kkt_violation", 0.0);
        if (j.contains("lambda_path")) {
            const auto path = j.at("lambda_path").get<std::vector<double>>();
            const auto errs = j.at("cv_errors").get<std::vector<double>>();
            fit.lambda_path = Eigen::Map<const Eigen::VectorXd>(path.data(), path.size());
            fit.cv_errors = Eigen::Map<const Eigen::VectorXd>(errs.data(), errs.size());
        }
        if (j.contains("warnings")) {
            fit.warnings = j.at("warnings").get<std::vector<std::string>>();
        }
    } catch (const json::exception& e) {
        throw SerializationError(std::string("malformed fit file: ") + e.what());
    }
    return fit;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path);
    out << text;
    if (!out) throw Error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open for reading: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return text;
}

}  // namespace ssda
