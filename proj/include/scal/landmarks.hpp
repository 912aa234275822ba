#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "scal/dataset.hpp"

namespace scal {

enum class LandmarkMethod { random, kmeans };

struct LandmarkSet {
    Eigen::MatrixXd points;  // p x d
    LandmarkMethod method = LandmarkMethod::random;
    std::uint64_t seed = 0;

    Eigen::Index count() const { return points.rows(); }
};

/// p distinct dataset rows sampled uniformly without replacement.
LandmarkSet select_random(const Dataset& dataset, int p, std::uint64_t seed);

/// Centroids of p k-means clusters of the dataset (k-means++ init, single
/// run, relative tolerance 1e-4). For large datasets k-means runs on a
/// uniform subsample of at most 20000 points.
LandmarkSet select_kmeans(const Dataset& dataset, int p, std::uint64_t seed,
                          int max_iter = 100);

} // namespace scal
