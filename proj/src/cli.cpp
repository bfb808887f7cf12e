#include "ssda/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

#include "ssda/csv.hpp"
#include "ssda/dsda.hpp"
#include "ssda/errors.hpp"
#include "ssda/eval.hpp"
#include "ssda/serialize.hpp"
#include "ssda/simulate.hpp"

namespace ssda {

namespace {

struct CommonOpts {
    std::string input;
    std::string label_col = "label";
    std::string out;
    std::string variant = "naive";
    int folds = 5;
    int grid_size = 50;
    std::uint64_t seed = 1;
    double legacy_a = 0.0;
    double legacy_b = 0.0;
    std::optional<double> fixed_lambda;
};

TransformVariant parse_variant(const std::string& s) { return variant_from_string(s); }

TuningSpec make_tuning(const CommonOpts& o) {
    TuningSpec tuning;
    tuning.folds = o.folds;
    tuning.grid_size = o.grid_size;
    tuning.seed = o.seed;
    tuning.fixed_lambda = o.fixed_lambda;
    tuning.legacy_a = o.legacy_a;
    tuning.legacy_b = o.legacy_b;
    return tuning;
}

std::string label_name_of(int id, const std::vector<std::string>& names) {
    if (id >= 0 && id < static_cast<int>(names.size())) return names[static_cast<std::size_t>(id)];
    return std::to_string(id);
}

double training_error(const SsdaModel& model, const Dataset& data) {
    const Prediction pred = predict(model.fit, model.transform, data.x);
    long wrong = 0;
    for (std::size_t i = 0; i < pred.labels.size(); ++i) {
        if (pred.labels[i] != data.y[i]) ++wrong;
    }
    return data.y.empty() ? 0.0 : static_cast<double>(wrong) / static_cast<double>(data.y.size());
}

int cmd_fit(const CommonOpts& o) {
    const CsvData csv = read_csv(o.input, o.label_col);
    if (!csv.has_label) throw CsvParseError("fit requires a label column", 1);
    const LabelCoding coding = encode_labels(csv.labels);
    if (coding.names.size() != 2) {
        throw InsufficientClassDataError(
            "fit requires exactly 2 classes, found " + std::to_string(coding.names.size()) +
            "; the multiclass transform is available via the `transform` command");
    }
    const Dataset data = to_dataset(csv, coding);
    const SsdaModel model = fit_ssda(data, parse_variant(o.variant), make_tuning(o));

    write_text_file(o.out + ".transform.json", transform_to_json(model.transform, coding.names));
    write_text_file(o.out + ".fit.json", fit_to_json(model.fit, coding.names));

    std::ostringstream summary;
    summary << "variant: " << to_string(model.fit.variant) << "\n"
            << "n: " << data.n() << "  p: " << data.p() << "\n"
            << "positive class: " << label_name_of(model.fit.pos_label, coding.names)
            << "  negative class: " << label_name_of(model.fit.neg_label, coding.names) << "\n"
            << "lambda: " << model.fit.lambda << "\n"
            << "active set size: " << model.fit.active_set.size() << "\n"
            << "training error: " << training_error(model, data) << "\n";
    if (model.fit.cv_errors.size() > 0) {
        for (Eigen::Index k = 0; k < model.fit.lambda_path.size(); ++k) {
            if (model.fit.lambda_path[k] == model.fit.lambda) {
                summary << "cv error at lambda: " << model.fit.cv_errors[k] << "\n";
                break;
            }
        }
    }
    for (const auto& w : model.transform.warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& w : model.fit.warnings) std::cerr << "warning: " << w << "\n";
    write_text_file(o.out + ".summary.txt", summary.str());
    std::cout << summary.str();
    return 0;
}

int cmd_predict(const std::string& model_prefix, const CommonOpts& o) {
    std::vector<std::string> label_names;
    const TransformModel transform =
        transform_from_json(read_text_file(model_prefix + ".transform.json"), &label_names);
    const DsdaFit fit = fit_from_json(read_text_file(model_prefix + ".fit.json"));

    // A label column in the input, if any, is ignored.
    CsvData csv = read_csv(o.input, o.label_col);
    if (csv.x.rows() == 0) {
        write_predictions_csv(o.out, {}, Eigen::VectorXd());
        return 0;
    }
    const Prediction pred = predict(fit, transform, csv.x);
    std::vector<std::string> out_labels(pred.labels.size());
    for (std::size_t i = 0; i < pred.labels.size(); ++i) {
        out_labels[i] = label_name_of(pred.labels[i], label_names);
    }
    write_predictions_csv(o.out, out_labels, pred.scores);
    return 0;
}

int cmd_transform(const CommonOpts& o, const std::string& transformed_out) {
    const CsvData csv = read_csv(o.input, o.label_col);
    if (!csv.has_label) throw CsvParseError("transform requires a label column", 1);
    const LabelCoding coding = encode_labels(csv.labels);
    const Dataset data = to_dataset(csv, coding);
    const TransformVariant variant = parse_variant(o.variant);

    TransformModel model;
    if (coding.names.size() > 2) {
        if (variant != TransformVariant::pooled) {
            throw InsufficientClassDataError("variant '" + o.variant +
                                             "' supports 2 classes; use --variant pooled for "
                                             "the multiclass transform");
        }
        model = fit_multiclass_pooled(data);
    } else {
        switch (variant) {
            case TransformVariant::naive: model = fit_naive(data); break;
            case TransformVariant::pooled: model = fit_pooled(data); break;
            case TransformVariant::legacy: model = fit_legacy(data, o.legacy_a, o.legacy_b); break;
            case TransformVariant::identity: model = fit_identity(data); break;
            case TransformVariant::oracle:
                throw ArgumentError("the oracle variant applies to simulated data only");
        }
    }
    write_text_file(o.out + ".transform.json", transform_to_json(model, coding.names));
    for (const auto& w : model.warnings) std::cerr << "warning: " << w << "\n";
    if (!transformed_out.empty()) {
        const Eigen::MatrixXd H = model.apply(data.x);
        write_dataset_csv(transformed_out, H, csv.labels, csv.feature_names, o.label_col);
    }
    std::cout << "transform: " << to_string(model.variant) << ", classes: " << coding.names.size()
              << ", p: " << model.p << "\n";
    return 0;
}

int cmd_simulate(int model_id, const std::string& series, std::optional<int> n,
                 std::optional<int> p, std::optional<double> rho, std::uint64_t seed,
                 const std::string& out) {
    if (series.size() != 1) throw ArgumentError("series must be 'a' or 'b'");
    SimulationOverrides overrides;
    overrides.n = n;
    overrides.p = p;
    overrides.rho = rho;
    const SimulationSpec spec = make_simulation_spec(model_id, series[0], overrides);
    const Dataset data = sample_model(spec, spec.n, seed);
    std::vector<std::string> labels(data.y.size());
    for (std::size_t i = 0; i < data.y.size(); ++i) labels[i] = std::to_string(data.y[i]);
    write_dataset_csv(out, data.x, labels);
    std::cout << "model " << model_id << series << ": wrote " << data.n() << " rows, "
              << data.p() << " features to " << out << "\n";
    return 0;
}

int cmd_benchmark(int model_id, const std::string& series, int reps, int test_size,
                  std::uint64_t seed, const std::string& methods_arg, int folds, int grid_size,
                  int threads, int bootstrap, const std::string& out) {
    if (series.size() != 1) throw ArgumentError("series must be 'a' or 'b'");
    if (reps < 1) throw ArgumentError("reps must be positive");
    std::vector<Method> methods;
    std::stringstream ss(methods_arg);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (!token.empty()) methods.push_back(method_from_string(token));
    }
    const SimulationSpec spec = make_simulation_spec(model_id, series[0]);
    BenchmarkOptions options;
    options.folds = folds;
    options.grid_size = grid_size;
    options.threads = threads;
    options.bootstrap_resamples = bootstrap;
    const BenchmarkReport report = run_benchmark(spec, methods, reps, test_size, seed, options);
    if (!out.empty()) {
        write_text_file(out + ".csv", report.to_csv());
        write_text_file(out + ".summary.txt", report.summary_table());
    }
    std::cout << report.summary_table();
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Sparse semiparametric discriminant analysis"};
    app.require_subcommand(1);
    app.set_config("--config");

    CommonOpts o;

    auto* fit = app.add_subcommand("fit", "Fit a transform + sparse discriminant on CSV data");
    fit->add_option("--input", o.input, "Input CSV")->required();
    fit->add_option("--label-col", o.label_col, "Label column name (default: label)");
    fit->add_option("--variant", o.variant, "naive|pooled|legacy|identity");
    fit->add_option("--folds", o.folds, "CV folds");
    fit->add_option("--grid-size", o.grid_size, "Lambda grid size");
    double fit_lambda = 0.0;
    auto* fit_lambda_opt = fit->add_option("--lambda", fit_lambda, "Fixed lambda (skip CV)");
    fit->add_option("--legacy-a", o.legacy_a, "Legacy lower Winsorization bound");
    fit->add_option("--legacy-b", o.legacy_b, "Legacy upper Winsorization bound");
    fit->add_option("--seed", o.seed, "Seed");
    fit->add_option("--out", o.out, "Output prefix")->required();

    auto* predict_cmd = app.add_subcommand("predict", "Predict with saved model files");
    std::string model_prefix;
    predict_cmd->add_option("--model", model_prefix, "Model file prefix from fit")->required();
    predict_cmd->add_option("--input", o.input, "Input CSV (features)")->required();
    predict_cmd->add_option("--label-col", o.label_col, "Label column to ignore if present");
    predict_cmd->add_option("--out", o.out, "Predictions CSV path")->required();

    auto* transform_cmd =
        app.add_subcommand("transform", "Fit a marginal transform only (multiclass supported)");
    transform_cmd->add_option("--input", o.input, "Input CSV")->required();
    transform_cmd->add_option("--label-col", o.label_col, "Label column name");
    transform_cmd->add_option("--variant", o.variant, "naive|pooled|legacy|identity");
    transform_cmd->add_option("--legacy-a", o.legacy_a, "Legacy lower bound");
    transform_cmd->add_option("--legacy-b", o.legacy_b, "Legacy upper bound");
    transform_cmd->add_option("--out", o.out, "Output prefix")->required();
    std::string transformed_out;
    transform_cmd->add_option("--transformed-out", transformed_out,
                              "Also write the transformed data CSV here");

    auto* simulate_cmd = app.add_subcommand("simulate", "Export a benchmark-model dataset");
    int model_id = 1;
    std::string series = "a";
    std::optional<int> sim_n, sim_p;
    std::optional<double> sim_rho;
    std::uint64_t sim_seed = 1;
    std::string sim_out;
    simulate_cmd->add_option("--model", model_id, "Model id 1..4")->required();
    simulate_cmd->add_option("--series", series, "a|b")->required();
    simulate_cmd->add_option("--n", sim_n, "Rows (default: the model's training size)");
    simulate_cmd->add_option("--p", sim_p, "Feature count override");
    simulate_cmd->add_option("--rho", sim_rho, "Correlation override");
    simulate_cmd->add_option("--seed", sim_seed, "Seed");
    simulate_cmd->add_option("--out", sim_out, "Output CSV path")->required();

    auto* bench_cmd = app.add_subcommand("benchmark", "Run a replication benchmark");
    int reps = 100, test_size = 10000, folds = 5, grid_size = 50, threads = 0, bootstrap = 500;
    std::uint64_t bench_seed = 1;
    std::string methods = "bayes,oracle-dsda,ssda-naive,ssda-pooled,dsda-raw";
    std::string bench_out;
    bench_cmd->add_option("--model", model_id, "Model id 1..4")->required();
    bench_cmd->add_option("--series", series, "a|b")->required();
    bench_cmd->add_option("--reps", reps, "Replications");
    bench_cmd->add_option("--test-size", test_size, "Test points per replication");
    bench_cmd->add_option("--seed", bench_seed, "Master seed");
    bench_cmd->add_option("--methods", methods, "Comma-separated method list");
    bench_cmd->add_option("--folds", folds, "CV folds");
    bench_cmd->add_option("--grid-size", grid_size, "Lambda grid size");
    bench_cmd->add_option("--threads", threads, "Worker threads (0 = auto)");
    bench_cmd->add_option("--bootstrap", bootstrap, "Bootstrap resamples for SEs");
    bench_cmd->add_option("--out", bench_out, "Output prefix (.csv / .summary.txt)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (fit_lambda_opt->count() > 0) o.fixed_lambda = fit_lambda;
        if (fit->parsed()) return cmd_fit(o);
        if (predict_cmd->parsed()) return cmd_predict(model_prefix, o);
        if (transform_cmd->parsed()) return cmd_transform(o, transformed_out);
        if (simulate_cmd->parsed()) {
            return cmd_simulate(model_id, series, sim_n, sim_p, sim_rho, sim_seed, sim_out);
        }
        if (bench_cmd->parsed()) {
            return cmd_benchmark(model_id, series, reps, test_size, bench_seed, methods, folds,
                                 grid_size, threads, bootstrap, bench_out);
        }
        std::cerr << "error: no subcommand\n";
        return 1;
    } catch (const CsvParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DimensionMismatchError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const InsufficientClassDataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const LegacyDegenerateError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const FoldConstructionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const ConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const DegenerateProjectionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const ArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const SerializationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace ssda
