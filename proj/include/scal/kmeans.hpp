#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "scal/rng.hpp"

namespace scal {

struct ClusterAssignment {
    std::vector<int> labels;    // length n, cluster ids in [0, k)
    Eigen::MatrixXd centroids;  // k x m
    double objective = 0.0;     // sum of squared point-centroid distances
    int iterations = 0;         // Lloyd update steps performed

    // Objective after each assignment step, for convergence diagnostics.
    std::vector<double> objective_history;
};

/// Nearest-centroid assignment; ties break to the lowest centroid index.
/// Returns labels and the summed squared distance objective.
std::pair<std::vector<int>, double> nearest_assignment(const Eigen::MatrixXd& points,
                                                       const Eigen::MatrixXd& centroids);

/// k-means++ seeding: first centroid uniform, the rest sampled proportional
/// to squared distance from the nearest centroid chosen so far.
Eigen::MatrixXd kmeanspp_init(const Eigen::MatrixXd& points, int k, Rng& rng);
Eigen::MatrixXd kmeanspp_init(const Eigen::MatrixXd& points, int k, std::uint64_t seed);

/// Lloyd iterations from the given initial centroids. Empty clusters are
/// re-seeded to the point farthest from its assigned centroid. Stops when the
/// relative objective decrease drops below `tol` or after `max_iter` updates.
ClusterAssignment lloyd(const Eigen::MatrixXd& points, int k, Eigen::MatrixXd init,
                        int max_iter = 300, double tol = 1e-6);

/// k-means++ + Lloyd with restarts, keeping the best objective.
ClusterAssignment cluster(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                          int restarts = 10, int max_iter = 300, double tol = 1e-6);

} // namespace scal
