#include "scal/exact.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "scal/error.hpp"

namespace scal {

namespace {

double off_diagonal_norm(const Eigen::MatrixXd& a) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            if (i != j) sum += a(i, j) * a(i, j);
        }
    }
    return std::sqrt(sum);
}

} // namespace

Eigen::MatrixXd full_affinity(const Dataset& dataset, double sigma, int cap) {
    const Eigen::Index n = dataset.size();
    if (n > cap) {
        throw ScaleError("full_affinity: n=" + std::to_string(n) +
                         " exceeds the exact-path cap " + std::to_string(cap));
    }
    if (!(sigma > 0.0)) throw ParameterError("full_affinity: sigma must be positive");

    Eigen::MatrixXd w(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        w(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double d2 = (dataset.features.row(i) - dataset.features.row(j)).squaredNorm();
            const double v = std::exp(-d2 / sigma);
            w(i, j) = v;
            w(j, i) = v;  // computed once, mirrored
        }
    }
    return w;
}

double median_pairwise_sq_distance(const Dataset& dataset) {
    const Eigen::Index n = dataset.size();
    if (n < 2) throw ParameterError("median_pairwise_sq_distance: need at least 2 points");
    std::vector<double> d2;
    d2.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            d2.push_back((dataset.features.row(i) - dataset.features.row(j)).squaredNorm());
        }
    }
    const std::size_t mid = d2.size() / 2;
    std::nth_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(mid), d2.end());
    double median = d2[mid];
    if (d2.size() % 2 == 0) {
        const double below =
            *std::max_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(mid));
        median = 0.5 * (below + median);
    }
    if (!(median > 0.0)) {
        throw DegenerateError("median_pairwise_sq_distance: zero median (coincident data)");
    }
    return median;
}

EigenPairs symmetric_eigs(const Eigen::MatrixXd& a, int r) {
    const Eigen::Index n = a.rows();
    if (a.cols() != n || n < 1) throw ParameterError("symmetric_eigs: matrix must be square");
    if (r < 1 || r > n) throw ParameterError("symmetric_eigs: need 1 <= r <= n");
    if (!a.allFinite()) throw ParameterError("symmetric_eigs: non-finite entries");
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
        throw ParameterError("symmetric_eigs: matrix is not symmetric");
    }

    Eigen::MatrixXd m = 0.5 * (a + a.transpose());  // exact symmetry for the sweeps
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
    const double target = 1e-10 * m.norm();

    constexpr int kMaxSweeps = 100;
    bool converged = off_diagonal_norm(m) <= target;
    for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
        for (Eigen::Index p = 0; p + 1 < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = m(p, q);
                if (apq == 0.0) continue;

                // Rotation angle that zeroes m(p,q) (Golub & Van Loan 8.4).
                const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0)
                                     ? 1.0 / (theta + std::sqrt(theta * theta + 1.0))
                                     : 1.0 / (theta - std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                const Eigen::VectorXd mp = m.col(p);
                const Eigen::VectorXd mq = m.col(q);
                m.col(p) = c * mp - s * mq;
                m.col(q) = s * mp + c * mq;
                const Eigen::RowVectorXd rp = m.row(p);
                const Eigen::RowVectorXd rq = m.row(q);
                m.row(p) = c * rp - s * rq;
                m.row(q) = s * rp + c * rq;
                m(p, q) = 0.0;
                m(q, p) = 0.0;

                const Eigen::VectorXd vp = v.col(p);
                const Eigen::VectorXd vq = v.col(q);
                v.col(p) = c * vp - s * vq;
                v.col(q) = s * vp + c * vq;
            }
        }
        converged = off_diagonal_norm(m) <= target;
    }
    if (!converged) {
        throw NumericalError("symmetric_eigs: Jacobi sweeps did not converge");
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&m](Eigen::Index i, Eigen::Index j) { return m(i, i) > m(j, j); });

    EigenPairs out;
    out.values.resize(r);
    out.vectors.resize(n, r);
    for (int i = 0; i < r; ++i) {
        out.values(i) = m(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
        out.vectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
    }
    return out;
}

ClusterAssignment spectral_cluster_exact(const Dataset& dataset, int k,
                                         std::optional<double> sigma, std::uint64_t seed,
                                         int cap) {
    const Eigen::Index n = dataset.size();
    if (n > cap) {
        throw ScaleError("spectral_cluster_exact: n=" + std::to_string(n) +
                         " exceeds the exact-path cap " + std::to_string(cap));
    }
    if (k < 1) throw ParameterError("spectral_cluster_exact: k must be positive");
    if (k > n) throw ParameterError("spectral_cluster_exact: k exceeds n");

    const double bandwidth = sigma ? *sigma : median_pairwise_sq_distance(dataset);
    Eigen::MatrixXd w = full_affinity(dataset, bandwidth, cap);

    // Normalized similarity Laplacian D^(-1/2) W D^(-1/2); its top-k
    // eigenvectors form the spectral embedding.
    const Eigen::VectorXd degrees = w.rowwise().sum();
    const Eigen::ArrayXd inv_sqrt_d = degrees.array().rsqrt();
    w.array().colwise() *= inv_sqrt_d;
    w.array().rowwise() *= inv_sqrt_d.transpose();

    const EigenPairs eigs = symmetric_eigs(w, k);

    // Unit-normalize the embedding rows (Ng-Jordan-Weiss step).
    Eigen::MatrixXd embedding = eigs.vectors;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double norm = embedding.row(i).norm();
        if (norm <= 0.0) {
            throw DegenerateError("spectral_cluster_exact: zero embedding row " +
                                  std::to_string(i));
        }
        embedding.row(i) /= norm;
    }

    return cluster(embedding, k, seed, 10);
}

} // namespace scal
