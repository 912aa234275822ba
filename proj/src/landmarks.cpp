#include "scal/landmarks.hpp"

#include <algorithm>

#include "scal/error.hpp"
#include "scal/kmeans.hpp"
#include "scal/rng.hpp"

namespace scal {

namespace {
// k-means for landmark selection runs on at most this many points; beyond
// that a uniform subsample is clustered instead.
constexpr int kKmeansSubsampleCap = 20000;
} // namespace

LandmarkSet select_random(const Dataset& dataset, int p, std::uint64_t seed) {
    const auto n = static_cast<int>(dataset.size());
    if (p < 1) throw ParameterError("select_random: p must be positive");
    if (p > n) {
        throw ParameterError("select_random: p=" + std::to_string(p) + " exceeds n=" +
                             std::to_string(n));
    }
    Rng rng(seed);
    const auto indices = rng.sample_without_replacement(n, p);

    LandmarkSet out;
    out.points.resize(p, dataset.dim());
    for (int i = 0; i < p; ++i) {
        out.points.row(i) = dataset.features.row(indices[static_cast<std::size_t>(i)]);
    }
    out.method = LandmarkMethod::random;
    out.seed = seed;
    return out;
}

LandmarkSet select_kmeans(const Dataset& dataset, int p, std::uint64_t seed, int max_iter) {
    const auto n = static_cast<int>(dataset.size());
    if (p < 1) throw ParameterError("select_kmeans: p must be positive");
    if (p > n) {
        throw ParameterError("select_kmeans: p=" + std::to_string(p) + " exceeds n=" +
                             std::to_string(n));
    }

    const Eigen::MatrixXd* points = &dataset.features;
    Eigen::MatrixXd subsample;
    if (n > kKmeansSubsampleCap) {
        Rng rng(derive_seed(seed, 5));
        const auto indices = rng.sample_without_replacement(n, kKmeansSubsampleCap);
        subsample.resize(kKmeansSubsampleCap, dataset.dim());
        for (int i = 0; i < kKmeansSubsampleCap; ++i) {
            subsample.row(i) = dataset.features.row(indices[static_cast<std::size_t>(i)]);
        }
        points = &subsample;
    }

    auto assignment = lloyd(*points, p, kmeanspp_init(*points, p, seed), max_iter, 1e-4);

    LandmarkSet out;
    out.points = std::move(assignment.centroids);
    out.method = LandmarkMethod::kmeans;
    out.seed = seed;
    return out;
}

} // namespace scal
