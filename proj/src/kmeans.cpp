#include "scal/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "scal/error.hpp"

namespace scal {

namespace {

void check_points(const Eigen::MatrixXd& points) {
    if (points.rows() < 1) throw ParameterError("k-means: no points");
    if (!points.allFinite()) throw ParameterError("k-means: non-finite points");
}

// Squared distances of every point to one centroid.
Eigen::VectorXd sq_dist_to(const Eigen::MatrixXd& points, const Eigen::RowVectorXd& c) {
    return (points.rowwise() - c).rowwise().squaredNorm();
}

} // namespace

std::pair<std::vector<int>, double> nearest_assignment(const Eigen::MatrixXd& points,
                                                       const Eigen::MatrixXd& centroids) {
    const Eigen::Index n = points.rows();
    const Eigen::Index k = centroids.rows();
    if (centroids.cols() != points.cols()) {
        throw ParameterError("nearest_assignment: dimension mismatch");
    }

    // d(i,c)^2 = ||x_i||^2 - 2 x_i.c + ||c||^2; the x-norm is constant per
    // point, so the argmin only needs the score ||c||^2 - 2 x_i.c.
    const Eigen::VectorXd cnorm = centroids.rowwise().squaredNorm();

    std::vector<int> labels(static_cast<std::size_t>(n));
    double objective = 0.0;

    constexpr Eigen::Index kBlock = 4096;
    for (Eigen::Index start = 0; start < n; start += kBlock) {
        const Eigen::Index len = std::min(kBlock, n - start);
        Eigen::MatrixXd scores = points.middleRows(start, len) * centroids.transpose();
        scores *= -2.0;
        scores.rowwise() += cnorm.transpose();
        for (Eigen::Index i = 0; i < len; ++i) {
            int best = 0;
            double best_score = scores(i, 0);
            for (Eigen::Index c = 1; c < k; ++c) {
                if (scores(i, c) < best_score) {  // ties keep the lowest index
                    best_score = scores(i, c);
                    best = static_cast<int>(c);
                }
            }
            labels[static_cast<std::size_t>(start + i)] = best;
            // Direct distance: the score form cancels badly when points sit
            // far from the origin relative to their centroid distance.
            objective += (points.row(start + i) - centroids.row(best)).squaredNorm();
        }
    }
    return {std::move(labels), objective};
}

Eigen::MatrixXd kmeanspp_init(const Eigen::MatrixXd& points, int k, Rng& rng) {
    check_points(points);
    const Eigen::Index n = points.rows();
    if (k < 1) throw ParameterError("kmeanspp_init: k must be positive");
    if (k > n) throw ParameterError("kmeanspp_init: k exceeds the number of points");

    Eigen::MatrixXd centroids(k, points.cols());
    std::vector<char> chosen(static_cast<std::size_t>(n), 0);

    Eigen::Index first = static_cast<Eigen::Index>(rng.next_uint(static_cast<std::uint64_t>(n)));
    centroids.row(0) = points.row(first);
    chosen[static_cast<std::size_t>(first)] = 1;

    Eigen::VectorXd d2 = sq_dist_to(points, centroids.row(0));
    for (int c = 1; c < k; ++c) {
        const double total = d2.sum();
        Eigen::Index pick = -1;
        if (total > 0.0 && std::isfinite(total)) {
            double r = rng.uniform() * total;
            for (Eigen::Index i = 0; i < n; ++i) {
                r -= d2(i);
                if (r <= 0.0) { pick = i; break; }
            }
            if (pick < 0) pick = n - 1;  // float underrun on the running sum
        }
        if (pick < 0 || chosen[static_cast<std::size_t>(pick)]) {
            // All mass sits on already-chosen points (duplicates); fall back
            // to the first index not yet used.
            pick = -1;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (!chosen[static_cast<std::size_t>(i)]) { pick = i; break; }
            }
            if (pick < 0) throw ParameterError("kmeanspp_init: fewer points than centroids");
        }
        centroids.row(c) = points.row(pick);
        chosen[static_cast<std::size_t>(pick)] = 1;
        d2 = d2.cwiseMin(sq_dist_to(points, centroids.row(c)));
    }
    return centroids;
}

Eigen::MatrixXd kmeanspp_init(const Eigen::MatrixXd& points, int k, std::uint64_t seed) {
    Rng rng(seed);
    return kmeanspp_init(points, k, rng);
}

ClusterAssignment lloyd(const Eigen::MatrixXd& points, int k, Eigen::MatrixXd init,
                        int max_iter, double tol) {
    check_points(points);
    const Eigen::Index n = points.rows();
    const Eigen::Index m = points.cols();
    if (k < 1) throw ParameterError("lloyd: k must be positive");
    if (k > n) throw ParameterError("lloyd: k exceeds the number of points");
    if (init.rows() != k || init.cols() != m || !init.allFinite()) {
        throw ParameterError("lloyd: bad initial centroids");
    }
    if (max_iter < 1) throw ParameterError("lloyd: max_iter must be positive");
    if (tol < 0.0) throw ParameterError("lloyd: negative tolerance");

    ClusterAssignment result;
    result.centroids = std::move(init);

    // The fast assignment path resolves near-ties only to within rounding of
    // the squared coordinate magnitudes, so the monotonicity guard gets a
    // noise floor proportional to that scale.
    const double noise_floor = 1e-13 * (points.rowwise().squaredNorm().sum() + 1.0);

    double prev_objective = std::numeric_limits<double>::infinity();
    for (int iter = 0;; ++iter) {
        auto [labels, objective] = nearest_assignment(points, result.centroids);
        result.labels = std::move(labels);
        result.objective = objective;
        result.objective_history.push_back(objective);

        // Lloyd objective never increases; a real rise means a bug upstream.
        if (objective > prev_objective * (1.0 + 1e-9) + noise_floor) {
            throw NumericalError("lloyd: objective increased from " +
                                 std::to_string(prev_objective) + " to " +
                                 std::to_string(objective));
        }
        const bool converged =
            std::isfinite(prev_objective) &&
            (prev_objective - objective) <= tol * std::max(prev_objective, 0.0);
        if (converged || objective == 0.0 || iter >= max_iter) break;
        prev_objective = objective;

        // Update step: means of members, empty clusters re-seeded to the
        // point currently farthest from its assigned centroid.
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, m);
        std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(result.labels[static_cast<std::size_t>(i)]);
            sums.row(static_cast<Eigen::Index>(c)) += points.row(i);
            ++counts[c];
        }
        std::vector<int> empties;
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) {
                result.centroids.row(c) =
                    sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
            } else {
                empties.push_back(c);
            }
        }
        if (!empties.empty()) {
            Eigen::VectorXd dist(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                const int c = result.labels[static_cast<std::size_t>(i)];
                dist(i) = (points.row(i) - result.centroids.row(c)).squaredNorm();
            }
            std::vector<char> used(static_cast<std::size_t>(n), 0);
            for (int c : empties) {
                Eigen::Index farthest = 0;
                double best = -1.0;
                for (Eigen::Index i = 0; i < n; ++i) {
                    if (!used[static_cast<std::size_t>(i)] && dist(i) > best) {
                        best = dist(i);
                        farthest = i;
                    }
                }
                used[static_cast<std::size_t>(farthest)] = 1;
                result.centroids.row(c) = points.row(farthest);
            }
        }
        result.iterations = iter + 1;
    }

    // Recompute the final objective from plain distances; the fast assignment
    // path can lose a few ulps to cancellation.
    double exact = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        exact += (points.row(i) -
                  result.centroids.row(result.labels[static_cast<std::size_t>(i)]))
                     .squaredNorm();
    }
    result.objective = exact;
    return result;
}

ClusterAssignment cluster(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                          int restarts, int max_iter, double tol) {
    if (restarts < 1) throw ParameterError("cluster: restarts must be positive");
    ClusterAssignment best;
    double best_objective = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
        auto assignment = lloyd(points, k, kmeanspp_init(points, k, rng), max_iter, tol);
        if (assignment.objective < best_objective) {
            best_objective = assignment.objective;
            best = std::move(assignment);
        }
    }
    return best;
}

} // namespace scal
