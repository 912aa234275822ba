#pragma once

#include <Eigen/Core>
#include <vector>

#include "scal/kmeans.hpp"

namespace scal {

/// Class-by-cluster intersection counts. Rows are classes, columns clusters;
/// entries sum to n.
struct ContingencyTable {
    Eigen::MatrixXi counts;  // L x K
};

ContingencyTable contingency(const std::vector<int>& class_labels,
                             const std::vector<int>& cluster_labels);

/// Clustering purity: the fraction of points that belong to the majority
/// class of their cluster, (1/n) * sum_j max_i counts[i][j].
double purity(const std::vector<int>& cluster_labels, const std::vector<int>& class_labels);
double purity(const ClusterAssignment& assignment, const std::vector<int>& class_labels);

/// Normalized mutual information I(C;X)/sqrt(H(C) H(X)) with natural logs.
/// Zero cells contribute nothing; when both partitions are single-block the
/// 0/0 case resolves to 1, and to 0 when only one of them is.
double nmi(const std::vector<int>& cluster_labels, const std::vector<int>& class_labels);
double nmi(const ClusterAssignment& assignment, const std::vector<int>& class_labels);

} // namespace scal
