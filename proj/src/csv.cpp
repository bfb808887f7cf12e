#include "ssda/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "ssda/errors.hpp"

namespace ssda {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cell);
            cell.clear();
        } else if (ch != '\r') {
            cell.push_back(ch);
        }
    }
    cells.push_back(cell);
    return cells;
}

bool parse_number(const std::string& s, double& out) {
    const char* begin = s.data();
    const char* end = begin + s.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t')) --end;
    if (begin == end) return false;
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

CsvData read_csv(const std::string& path, const std::string& label_col) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open for reading: " + path);

    CsvData csv;
    std::string line;
    long line_no = 0;

    if (!std::getline(in, line)) {
        // Empty file: zero rows, zero features. Callers that require a label
        // column will reject this; predict treats it as an empty input.
        return csv;
    }
    ++line_no;
    const std::vector<std::string> header = split_line(line);
    int label_idx = -1;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (!label_col.empty() && header[c] == label_col) {
            if (label_idx >= 0) throw CsvParseError("duplicate label column '" + label_col + "'", line_no);
            label_idx = static_cast<int>(c);
        } else {
            csv.feature_names.push_back(header[c]);
        }
    }
    if (!label_col.empty() && label_idx < 0) {
        throw CsvParseError("label column '" + label_col + "' not found in header", line_no);
    }
    csv.has_label = label_idx >= 0;

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() && in.eof()) break;
        const std::vector<std::string> cells = split_line(line);
        if (cells.size() != header.size()) {
            throw CsvParseError("expected " + std::to_string(header.size()) + " cells, got " +
                                    std::to_string(cells.size()),
                                line_no);
        }
        std::vector<double> row;
        row.reserve(csv.feature_names.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (static_cast<int>(c) == label_idx) {
                if (cells[c].empty()) throw CsvParseError("missing label", line_no);
                csv.labels.push_back(cells[c]);
                continue;
            }
            double v = 0.0;
            if (!parse_number(cells[c], v)) {
                throw CsvParseError("non-numeric feature cell '" + cells[c] + "' in column '" +
                                        header[c] + "'",
                                    line_no);
            }
            if (!std::isfinite(v)) {
                throw CsvParseError("non-finite feature cell in column '" + header[c] + "'",
                                    line_no);
            }
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    }

    csv.x.resize(static_cast<Eigen::Index>(rows.size()),
                 static_cast<Eigen::Index>(csv.feature_names.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            csv.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return csv;
}

LabelCoding encode_labels(const std::vector<std::string>& labels) {
    std::map<std::string, int> distinct;
    for (const std::string& s : labels) distinct.emplace(s, 0);

    std::vector<std::string> names;
    names.reserve(distinct.size());
    for (const auto& [name, _] : distinct) names.push_back(name);

    bool all_numeric = true;
    std::vector<double> values(names.size());
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (!parse_number(names[i], values[i])) {
            all_numeric = false;
            break;
        }
    }
    if (all_numeric) {
        std::vector<std::size_t> order(names.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        std::vector<std::string> sorted;
        sorted.reserve(names.size());
        for (std::size_t i : order) sorted.push_back(names[i]);
        names = std::move(sorted);
    }
    // names are already lexicographically sorted otherwise (std::map order)

    LabelCoding coding;
    coding.names = names;
    std::map<std::string, int> id_of;
    for (std::size_t i = 0; i < names.size(); ++i) id_of[names[i]] = static_cast<int>(i);
    coding.ids.reserve(labels.size());
    for (const std::string& s : labels) coding.ids.push_back(id_of[s]);
    return coding;
}

Dataset to_dataset(const CsvData& csv, const LabelCoding& coding) {
    Dataset data;
    data.x = csv.x;
    data.y = coding.ids;
    return data;
}

void write_dataset_csv(const std::string& path, const Eigen::MatrixXd& x,
                       const std::vector<std::string>& labels,
                       const std::vector<std::string>& feature_names,
                       const std::string& label_col) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path);
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        if (j) out << ',';
        if (feature_names.empty()) {
            out << 'x' << (j + 1);
        } else {
            out << feature_names[static_cast<std::size_t>(j)];
        }
    }
    if (!labels.empty()) out << (x.cols() ? "," : "") << label_col;
    out << '\n';
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            if (j) out << ',';
            out << format_double(x(i, j));
        }
        if (!labels.empty()) {
            if (x.cols()) out << ',';
            out << labels[static_cast<std::size_t>(i)];
        }
        out << '\n';
    }
    if (!out) throw Error("write failed: " + path);
}

void write_predictions_csv(const std::string& path, const std::vector<std::string>& labels,
                           const Eigen::VectorXd& scores) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path);
    out << "label,score\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out << labels[i] << ',' << format_double(scores[static_cast<Eigen::Index>(i)]) << '\n';
    }
    if (!out) throw Error("write failed: " + path);
}

}  // namespace ssda
