#include "scal/affinity.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "scal/error.hpp"

namespace scal {

Eigen::MatrixXd landmark_sq_distances(const Dataset& dataset, const LandmarkSet& landmarks) {
    if (dataset.size() < 1) throw ParameterError("landmark_sq_distances: empty dataset");
    if (landmarks.count() < 1) throw ParameterError("landmark_sq_distances: no landmarks");
    if (dataset.dim() != landmarks.points.cols()) {
        throw ParameterError("landmark_sq_distances: feature dimension mismatch");
    }

    // ||l - x||^2 = ||l||^2 - 2 l.x + ||x||^2, one GEMM for the cross terms.
    const Eigen::VectorXd lnorm = landmarks.points.rowwise().squaredNorm();
    const Eigen::VectorXd xnorm = dataset.features.rowwise().squaredNorm();
    Eigen::MatrixXd d2 = landmarks.points * dataset.features.transpose();  // p x n
    d2 *= -2.0;
    d2.colwise() += lnorm;
    d2.rowwise() += xnorm.transpose();
    d2 = d2.cwiseMax(0.0);  // clamp rounding negatives
    return d2;
}

double median_bandwidth(const Eigen::MatrixXd& sq_distances) {
    const auto count = static_cast<std::size_t>(sq_distances.size());
    if (count == 0) throw ParameterError("median_bandwidth: empty distance matrix");
    std::vector<double> values(sq_distances.data(), sq_distances.data() + count);

    const std::size_t mid = count / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                     values.end());
    double median = values[mid];
    if (count % 2 == 0) {
        // Mean of the two middle values.
        const double below = *std::max_element(
            values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
        median = 0.5 * (below + median);
    }
    if (!(median > 0.0)) {
        throw DegenerateError("median_bandwidth: median squared distance is zero "
                              "(landmarks coincide with the data)");
    }
    return median;
}

double median_bandwidth(const Dataset& dataset, const LandmarkSet& landmarks) {
    return median_bandwidth(landmark_sq_distances(dataset, landmarks));
}

AffinityMatrix affinity_from_sq_distances(const Eigen::MatrixXd& sq_distances, double sigma) {
    if (!(sigma > 0.0)) throw ParameterError("build_affinity: sigma must be positive");
    AffinityMatrix out;
    out.w = (-sq_distances / sigma).array().exp();
    out.sigma = sigma;
    return out;
}

AffinityMatrix build_affinity(const Dataset& dataset, const LandmarkSet& landmarks,
                              double sigma) {
    return affinity_from_sq_distances(landmark_sq_distances(dataset, landmarks), sigma);
}

DegreeVector degree_vector(const AffinityMatrix& w) {
    if (w.w.size() == 0) throw ParameterError("degree_vector: empty affinity");

    DegreeVector out;
    out.ws = w.w.rowwise().sum();           // O(np)
    out.d = w.w.transpose() * out.ws;       // O(np)

    for (Eigen::Index i = 0; i < out.d.size(); ++i) {
        if (!(out.d(i) > 0.0) || !std::isfinite(out.d(i))) {
            throw DegenerateError("degree_vector: nonpositive or non-finite degree at column " +
                                  std::to_string(i));
        }
    }
    return out;
}

ScaledMatrix scaled_input(const AffinityMatrix& w, const DegreeVector& deg) {
    if (w.w.cols() != deg.d.size()) {
        throw ParameterError("scaled_input: degree length does not match columns");
    }
    for (Eigen::Index i = 0; i < deg.d.size(); ++i) {
        if (!(deg.d(i) > 0.0)) {
            throw DegenerateError("scaled_input: nonpositive degree at column " +
                                  std::to_string(i));
        }
    }

    ScaledMatrix out;
    out.s = w.w.array().rowwise() * deg.d.array().transpose().rsqrt();

    // s_ki = w_ki / sqrt(d_i) stays inside [0,1); only the single-column case
    // can reach exactly 1. Violations indicate corrupted inputs and are
    // surfaced rather than clipped.
    const double max_entry = out.s.maxCoeff();
    const double min_entry = out.s.minCoeff();
    const bool single_column = w.w.cols() == 1;
    if (min_entry < 0.0 || max_entry > 1.0 || (!single_column && max_entry >= 1.0)) {
        throw DegenerateError("scaled_input: entry " + std::to_string(max_entry) +
                              " outside the expected [0,1) range");
    }
    return out;
}

} // namespace scal
