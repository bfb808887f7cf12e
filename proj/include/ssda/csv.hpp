#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ssda/dataset.hpp"

namespace ssda {

// Labeled table read from CSV: header row required, comma separated, UTF-8,
// decimal point. Feature cells must be finite numbers; NaN/Inf and malformed
// cells raise CsvParseError with the offending line number.
struct CsvData {
    std::vector<std::string> feature_names;  // header minus the label column
    Eigen::MatrixXd x;
    std::vector<std::string> labels;  // raw label strings, empty if no label column
    bool has_label = false;
};

// label_col empty: all columns are features. Missing label column with
// nonempty label_col raises CsvParseError.
CsvData read_csv(const std::string& path, const std::string& label_col);

// Canonical label ordering: numeric ascending when every distinct label
// parses as a number, lexicographic otherwise. The dataset's y holds indices
// into the returned name list.
struct LabelCoding {
    std::vector<std::string> names;
    std::vector<int> ids;  // per row
};
LabelCoding encode_labels(const std::vector<std::string>& labels);

Dataset to_dataset(const CsvData& csv, const LabelCoding& coding);

void write_dataset_csv(const std::string& path, const Eigen::MatrixXd& x,
                       const std::vector<std::string>& labels,
                       const std::vector<std::string>& feature_names = {},
                       const std::string& label_col = "label");

void write_predictions_csv(const std::string& path, const std::vector<std::string>& labels,
                           const Eigen::VectorXd& scores);

}  // namespace ssda
