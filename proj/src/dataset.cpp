#include "ssda/dataset.hpp"

#include <algorithm>
#include <map>

#include "ssda/errors.hpp"

namespace ssda {

ClassIndex index_classes(const Dataset& data, int min_classes) {
    if (data.x.rows() != static_cast<Eigen::Index>(data.y.size())) {
        throw DimensionMismatchError("label count does not match row count");
    }
    std::map<int, std::vector<int>> groups;
    for (int i = 0; i < static_cast<int>(data.y.size()); ++i) {
        groups[data.y[i]].push_back(i);
    }
    if (static_cast<int>(groups.size()) < min_classes) {
        throw InsufficientClassDataError("need at least " + std::to_string(min_classes) +
                                         " classes, found " + std::to_string(groups.size()));
    }
    std::vector<int> order;
    for (const auto& [label, rows] : groups) {
        if (rows.size() < 2) {
            throw InsufficientClassDataError("class " + std::to_string(label) +
                                             " has fewer than 2 observations");
        }
        order.push_back(label);
    }
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const auto na = groups[a].size(), nb = groups[b].size();
        if (na != nb) return na > nb;
        return a < b;
    });

    ClassIndex idx;
    for (int label : order) {
        idx.labels.push_back(label);
        idx.rows.push_back(groups[label]);
        idx.priors.push_back(static_cast<double>(groups[label].size()) / data.y.size());
    }
    return idx;
}

BinaryCoding code_binary(const Dataset& data) {
    ClassIndex idx = index_classes(data, 2);
    if (idx.k() != 2) {
        throw InsufficientClassDataError("binary operation on " + std::to_string(idx.k()) +
                                         " classes; use the multiclass transform");
    }
    BinaryCoding coding;
    coding.pos_label = idx.labels[0];
    coding.neg_label = idx.labels[1];
    coding.pos_rows = idx.rows[0];
    coding.neg_rows = idx.rows[1];
    coding.n_pos = static_cast<int>(idx.rows[0].size());
    coding.n_neg = static_cast<int>(idx.rows[1].size());
    return coding;
}

}  // namespace ssda
