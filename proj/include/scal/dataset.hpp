#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace scal {

/// A dataset of n points with d features each, one point per row.
/// Labels, when present, are dense integer class ids 0..L-1.
struct Dataset {
    Eigen::MatrixXd features;  // n x d
    std::vector<int> labels;   // empty when unlabeled, else length n
    std::string name;

    Eigen::Index size() const { return features.rows(); }
    Eigen::Index dim() const { return features.cols(); }
    bool has_labels() const { return !labels.empty(); }

    /// Number of distinct classes (labels are dense, so max id + 1).
    int num_classes() const;
};

enum class Shape { two_moons, two_circles, moon_circle, concentric_rings };

Shape shape_from_string(const std::string& name);
std::string to_string(Shape shape);

/// Number of natural clusters of a shape (2 for the two-component shapes,
/// 3 for concentric_rings).
int shape_components(Shape shape);

/// Samples n points along the shape's parametric curves plus isotropic
/// Gaussian jitter with standard deviation `noise`. Labels are the generating
/// component. Deterministic per (shape, n, noise, seed).
///
/// Fixed geometry:
///   two_moons        unit upper half-circle at the origin, and its mirror
///                    image offset by (1, -3.5)
///   two_circles      concentric circles of radius 1 and 2
///   moon_circle      unit upper half-circle inside a circle of radius 2.2
///   concentric_rings three circles of radius 1, 2, 3
Dataset generate_synthetic(Shape shape, int n, double noise, std::uint64_t seed);

/// Loads a comma-separated file. A header row is detected when any cell that
/// is not the label column fails to parse as a number. With `label_column`
/// set, that column is mapped to dense ids 0..L-1 in first-appearance order;
/// all other columns must be numeric.
Dataset load_csv(const std::string& path, std::optional<int> label_column = std::nullopt);

/// Writes features (and the label column last, when labels are present) with
/// enough digits to reproduce the values on reload.
void write_csv(const Dataset& dataset, const std::string& path);

/// Loads an IDX image/label file pair (big-endian, magic 0x00000803 for
/// images and 0x00000801 for labels). Pixels are flattened row-major and
/// scaled to [0,1] by dividing by 255.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

/// Maps every feature column independently onto [0,1]. Constant columns map
/// to 0. Idempotent.
Dataset min_max_scale(const Dataset& dataset);

} // namespace scal
