#pragma once

#include <Eigen/Dense>
#include <vector>

namespace ssda {

// Universal input container: n x p feature matrix plus integer class labels.
// Simulated data use labels +1/-1; CSV data are mapped to label ids by the CLI.
struct Dataset {
    Eigen::MatrixXd x;
    std::vector<int> y;

    Eigen::Index n() const { return x.rows(); }
    Eigen::Index p() const { return x.cols(); }
};

// Result of majority coding a two-class dataset. The larger class is coded
// "+"; on ties the label that sorts first (smaller int) is coded "+".
struct BinaryCoding {
    int pos_label = 0;
    int neg_label = 0;
    int n_pos = 0;
    int n_neg = 0;
    std::vector<int> pos_rows;  // row indices of the "+" class, in data order
    std::vector<int> neg_rows;

    double pi_pos() const { return static_cast<double>(n_pos) / (n_pos + n_neg); }
    double pi_neg() const { return static_cast<double>(n_neg) / (n_pos + n_neg); }
    int sign_of(int label) const { return label == pos_label ? +1 : -1; }
};

// Throws InsufficientClassDataError unless the dataset has exactly two
// classes, each with at least two observations.
BinaryCoding code_binary(const Dataset& data);

// Per-class grouping for the multiclass transform. Classes are ordered by
// descending count, ties by ascending label; class 0 is the reference.
struct ClassIndex {
    std::vector<int> labels;                  // ordered class labels
    std::vector<std::vector<int>> rows;       // row indices per class
    std::vector<double> priors;               // n_k / n
    int k() const { return static_cast<int>(labels.size()); }
};

// Throws InsufficientClassDataError if any class has fewer than two rows or
// fewer than `min_classes` classes are present.
ClassIndex index_classes(const Dataset& data, int min_classes = 2);

}  // namespace ssda
