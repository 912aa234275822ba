#pragma once

#include <Eigen/Core>

#include "scal/dataset.hpp"
#include "scal/landmarks.hpp"

namespace scal {

/// Landmark-to-point Gaussian similarities, w_ij = exp(-||l_i - x_j||^2 / sigma).
/// One column per data point; entries lie in (0, 1].
struct AffinityMatrix {
    Eigen::MatrixXd w;  // p x n
    double sigma = 0.0;
};

/// Degrees of the implicit similarity matrix M = W^T W, never materialized:
/// ws_k is the k-th row sum of W and d_i = (W^T ws)_i. Costs O(np).
struct DegreeVector {
    Eigen::VectorXd d;   // length n, strictly positive
    Eigen::VectorXd ws;  // length p, row sums of W
};

/// The network input S = W D^(-1/2): column i of W scaled by d_i^(-1/2).
struct ScaledMatrix {
    Eigen::MatrixXd s;  // p x n
};

/// All p*n squared Euclidean distances between landmarks (rows) and points
/// (columns). Shared by median_bandwidth and build_affinity.
Eigen::MatrixXd landmark_sq_distances(const Dataset& dataset, const LandmarkSet& landmarks);

/// Median of the p*n squared landmark-point distances; for an even count,
/// the mean of the two middle values. Throws DegenerateError when the median
/// is zero (landmarks coincide with the points).
double median_bandwidth(const Dataset& dataset, const LandmarkSet& landmarks);
double median_bandwidth(const Eigen::MatrixXd& sq_distances);

AffinityMatrix build_affinity(const Dataset& dataset, const LandmarkSet& landmarks,
                              double sigma);
AffinityMatrix affinity_from_sq_distances(const Eigen::MatrixXd& sq_distances, double sigma);

DegreeVector degree_vector(const AffinityMatrix& w);

/// Throws DegenerateError if any entry falls outside [0,1) for n >= 2
/// (violations are surfaced, not clipped).
ScaledMatrix scaled_input(const AffinityMatrix& w, const DegreeVector& deg);

} // namespace scal
