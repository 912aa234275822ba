#include "scal/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "scal/error.hpp"
#include "scal/rng.hpp"

namespace scal {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Arc {
    double cx, cy;    // circle center
    double radius;
    double t0, t1;    // parameter range
    bool flip_y;      // mirror the arc about its center's horizontal axis
};

// Fixed toy geometry. Moons are unit half-circles; the second moon is the
// mirror image of the first offset by (1, -3.5). The offset keeps the
// crescents far enough apart that the 10-epoch pipeline and the exact
// spectral solver both separate them at the median bandwidth. Circles and
// rings are concentric at the origin; the moon_circle enclosure has radius
// 2.2 for the same separability reason.
std::vector<Arc> shape_arcs(Shape shape) {
    switch (shape) {
    case Shape::two_moons:
        return {{0.0, 0.0, 1.0, 0.0, kPi, false},
                {1.0, -3.5, 1.0, 0.0, kPi, true}};
    case Shape::two_circles:
        return {{0.0, 0.0, 1.0, 0.0, 2.0 * kPi, false},
                {0.0, 0.0, 2.0, 0.0, 2.0 * kPi, false}};
    case Shape::moon_circle:
        return {{0.0, 0.0, 1.0, 0.0, kPi, false},
                {0.0, 0.0, 2.2, 0.0, 2.0 * kPi, false}};
    case Shape::concentric_rings:
        return {{0.0, 0.0, 1.0, 0.0, 2.0 * kPi, false},
                {0.0, 0.0, 2.0, 0.0, 2.0 * kPi, false},
                {0.0, 0.0, 3.0, 0.0, 2.0 * kPi, false}};
    }
    throw ParameterError("unknown shape");
}

bool parse_double(const std::string& cell, double& out) {
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(*begin))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(end[-1]))) --end;
    if (begin == end) return false;
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::uint32_t read_be_u32(std::istream& in, const std::string& path) {
    unsigned char buf[4];
    in.read(reinterpret_cast<char*>(buf), 4);
    if (!in) throw FormatError(path + ": truncated header");
    return (static_cast<std::uint32_t>(buf[0]) << 24) |
           (static_cast<std::uint32_t>(buf[1]) << 16) |
           (static_cast<std::uint32_t>(buf[2]) << 8) |
           static_cast<std::uint32_t>(buf[3]);
}

} // namespace

int Dataset::num_classes() const {
    int max_id = -1;
    for (int label : labels) max_id = std::max(max_id, label);
    return max_id + 1;
}

Shape shape_from_string(const std::string& name) {
    if (name == "two_moons") return Shape::two_moons;
    if (name == "two_circles") return Shape::two_circles;
    if (name == "moon_circle") return Shape::moon_circle;
    if (name == "rings" || name == "concentric_rings") return Shape::concentric_rings;
    throw ParameterError("unknown shape '" + name + "'");
}

std::string to_string(Shape shape) {
    switch (shape) {
    case Shape::two_moons: return "two_moons";
    case Shape::two_circles: return "two_circles";
    case Shape::moon_circle: return "moon_circle";
    case Shape::concentric_rings: return "concentric_rings";
    }
    return "?";
}

int shape_components(Shape shape) {
    return static_cast<int>(shape_arcs(shape).size());
}

Dataset generate_synthetic(Shape shape, int n, double noise, std::uint64_t seed) {
    const auto arcs = shape_arcs(shape);
    const int components = static_cast<int>(arcs.size());
    if (n < components) {
        throw ParameterError("generate_synthetic: n=" + std::to_string(n) +
                             " is below the shape's cluster count " +
                             std::to_string(components));
    }
    if (noise < 0.0) throw ParameterError("generate_synthetic: negative noise");

    // Even split; the first (n mod components) components get one extra point.
    std::vector<int> counts(static_cast<std::size_t>(components), n / components);
    for (int c = 0; c < n % components; ++c) ++counts[static_cast<std::size_t>(c)];

    Dataset out;
    out.features.resize(n, 2);
    out.labels.resize(static_cast<std::size_t>(n));
    out.name = to_string(shape);

    Rng rng(seed);
    int row = 0;
    for (int c = 0; c < components; ++c) {
        const Arc& arc = arcs[static_cast<std::size_t>(c)];
        for (int i = 0; i < counts[static_cast<std::size_t>(c)]; ++i, ++row) {
            const double t = rng.uniform(arc.t0, arc.t1);
            const double sy = arc.flip_y ? -1.0 : 1.0;
            double x = arc.cx + arc.radius * std::cos(t);
            double y = arc.cy + sy * arc.radius * std::sin(t);
            if (noise > 0.0) {
                x += noise * rng.normal();
                y += noise * rng.normal();
            }
            out.features(row, 0) = x;
            out.features(row, 1) = y;
            out.labels[static_cast<std::size_t>(row)] = c;
        }
    }
    return out;
}

Dataset load_csv(const std::string& path, std::optional<int> label_column) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open CSV file '" + path + "'");

    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    std::map<std::string, int> label_ids;
    std::size_t width = 0;
    bool first_content_row = true;
    int line_no = 0;

    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto cells = split_csv_line(line);

        if (label_column && (*label_column < 0 ||
                             static_cast<std::size_t>(*label_column) >= cells.size())) {
            throw FormatError(path + ": row " + std::to_string(line_no) +
                              ": label column " + std::to_string(*label_column) +
                              " out of range");
        }

        if (first_content_row) {
            // Header row: any non-label cell that is not numeric.
            bool numeric = true;
            for (std::size_t c = 0; c < cells.size(); ++c) {
                if (label_column && static_cast<int>(c) == *label_column) continue;
                double v;
                if (!parse_double(cells[c], v)) { numeric = false; break; }
            }
            first_content_row = false;
            if (!numeric) continue;
        }

        if (width == 0) {
            width = cells.size();
        } else if (cells.size() != width) {
            throw FormatError(path + ": row " + std::to_string(line_no) + ": expected " +
                              std::to_string(width) + " cells, found " +
                              std::to_string(cells.size()));
        }

        std::vector<double> values;
        values.reserve(width);
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (label_column && static_cast<int>(c) == *label_column) {
                const std::string key = trim(cells[c]);
                auto [it, inserted] = label_ids.emplace(key, static_cast<int>(label_ids.size()));
                labels.push_back(it->second);
                continue;
            }
            double v;
            if (!parse_double(cells[c], v)) {
                throw FormatError(path + ": row " + std::to_string(line_no) + ", column " +
                                  std::to_string(c) + ": cannot parse '" + trim(cells[c]) +
                                  "' as a number");
            }
            values.push_back(v);
        }
        rows.push_back(std::move(values));
    }

    if (rows.empty()) throw FormatError(path + ": no data rows");

    Dataset out;
    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto d = static_cast<Eigen::Index>(rows.front().size());
    out.features.resize(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            out.features(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    out.labels = std::move(labels);
    out.name = path;
    return out;
}

void write_csv(const Dataset& dataset, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open '" + path + "' for writing");
    char buf[64];
    for (Eigen::Index i = 0; i < dataset.size(); ++i) {
        for (Eigen::Index j = 0; j < dataset.dim(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", dataset.features(i, j));
            out << (j ? "," : "") << buf;
        }
        if (dataset.has_labels()) out << ',' << dataset.labels[static_cast<std::size_t>(i)];
        out << '\n';
    }
    if (!out) throw FormatError("write failed for '" + path + "'");
}

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
    std::ifstream images(images_path, std::ios::binary);
    if (!images) throw FormatError("cannot open IDX image file '" + images_path + "'");
    std::ifstream labels(labels_path, std::ios::binary);
    if (!labels) throw FormatError("cannot open IDX label file '" + labels_path + "'");

    const std::uint32_t image_magic = read_be_u32(images, images_path);
    if (image_magic != 0x00000803u) {
        throw FormatError(images_path + ": bad image magic (expected 0x00000803)");
    }
    const std::uint32_t n_images = read_be_u32(images, images_path);
    const std::uint32_t rows = read_be_u32(images, images_path);
    const std::uint32_t cols = read_be_u32(images, images_path);

    const std::uint32_t label_magic = read_be_u32(labels, labels_path);
    if (label_magic != 0x00000801u) {
        throw FormatError(labels_path + ": bad label magic (expected 0x00000801)");
    }
    const std::uint32_t n_labels = read_be_u32(labels, labels_path);
    if (n_images != n_labels) {
        throw FormatError("IDX count mismatch: " + std::to_string(n_images) + " images vs " +
                          std::to_string(n_labels) + " labels");
    }

    const std::size_t d = static_cast<std::size_t>(rows) * cols;
    std::vector<unsigned char> pixel_row(d);

    Dataset out;
    out.features.resize(static_cast<Eigen::Index>(n_images), static_cast<Eigen::Index>(d));
    out.labels.resize(n_images);
    for (std::uint32_t i = 0; i < n_images; ++i) {
        images.read(reinterpret_cast<char*>(pixel_row.data()),
                    static_cast<std::streamsize>(d));
        if (!images) throw FormatError(images_path + ": truncated at image " + std::to_string(i));
        for (std::size_t j = 0; j < d; ++j) {
            out.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                static_cast<double>(pixel_row[j]) / 255.0;
        }
        char label = 0;
        labels.read(&label, 1);
        if (!labels) throw FormatError(labels_path + ": truncated at label " + std::to_string(i));
        out.labels[i] = static_cast<int>(static_cast<unsigned char>(label));
    }
    out.name = images_path;
    return out;
}

Dataset min_max_scale(const Dataset& dataset) {
    if (dataset.size() < 1) throw ParameterError("min_max_scale: empty dataset");
    Dataset out = dataset;
    for (Eigen::Index j = 0; j < dataset.dim(); ++j) {
        const double lo = dataset.features.col(j).minCoeff();
        const double hi = dataset.features.col(j).maxCoeff();
        if (hi > lo) {
            out.features.col(j) = (dataset.features.col(j).array() - lo) / (hi - lo);
        } else {
            out.features.col(j).setZero();  // constant column convention
        }
    }
    return out;
}

} // namespace scal
