#include "scal/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "scal/error.hpp"

namespace scal {

ContingencyTable contingency(const std::vector<int>& class_labels,
                             const std::vector<int>& cluster_labels) {
    if (class_labels.size() != cluster_labels.size()) {
        throw ParameterError("contingency: label arrays differ in length");
    }
    if (class_labels.empty()) throw ParameterError("contingency: empty labels");

    int num_classes = 0, num_clusters = 0;
    for (std::size_t i = 0; i < class_labels.size(); ++i) {
        if (class_labels[i] < 0 || cluster_labels[i] < 0) {
            throw ParameterError("contingency: negative label id");
        }
        num_classes = std::max(num_classes, class_labels[i] + 1);
        num_clusters = std::max(num_clusters, cluster_labels[i] + 1);
    }

    ContingencyTable table;
    table.counts = Eigen::MatrixXi::Zero(num_classes, num_clusters);
    for (std::size_t i = 0; i < class_labels.size(); ++i) {
        ++table.counts(class_labels[i], cluster_labels[i]);
    }
    return table;
}

double purity(const std::vector<int>& cluster_labels, const std::vector<int>& class_labels) {
    const ContingencyTable table = contingency(class_labels, cluster_labels);
    long long majority_sum = 0;
    for (Eigen::Index j = 0; j < table.counts.cols(); ++j) {
        majority_sum += table.counts.col(j).maxCoeff();
    }
    return static_cast<double>(majority_sum) / static_cast<double>(class_labels.size());
}

double purity(const ClusterAssignment& assignment, const std::vector<int>& class_labels) {
    return purity(assignment.labels, class_labels);
}

double nmi(const std::vector<int>& cluster_labels, const std::vector<int>& class_labels) {
    const ContingencyTable table = contingency(class_labels, cluster_labels);
    const double n = static_cast<double>(class_labels.size());

    const Eigen::VectorXi class_sizes = table.counts.rowwise().sum();
    const Eigen::VectorXi cluster_sizes = table.counts.colwise().sum();

    double h_class = 0.0;
    for (Eigen::Index i = 0; i < class_sizes.size(); ++i) {
        if (class_sizes(i) > 0) {
            const double p = class_sizes(i) / n;
            h_class -= p * std::log(p);
        }
    }
    double h_cluster = 0.0;
    for (Eigen::Index j = 0; j < cluster_sizes.size(); ++j) {
        if (cluster_sizes(j) > 0) {
            const double p = cluster_sizes(j) / n;
            h_cluster -= p * std::log(p);
        }
    }

    // Both partitions single-block: identical by convention (0/0 -> 1). Only
    // one of them trivial: zero shared information.
    if (h_class <= 0.0 && h_cluster <= 0.0) return 1.0;
    if (h_class <= 0.0 || h_cluster <= 0.0) return 0.0;

    double mutual = 0.0;
    for (Eigen::Index i = 0; i < table.counts.rows(); ++i) {
        for (Eigen::Index j = 0; j < table.counts.cols(); ++j) {
            const int c = table.counts(i, j);
            if (c == 0) continue;
            const double pij = c / n;
            mutual += pij * std::log(c * n / (static_cast<double>(class_sizes(i)) *
                                              static_cast<double>(cluster_sizes(j))));
        }
    }
    return std::clamp(mutual / std::sqrt(h_class * h_cluster), 0.0, 1.0);
}

double nmi(const ClusterAssignment& assignment, const std::vector<int>& class_labels) {
    return nmi(assignment.labels, class_labels);
}

} // namespace scal
