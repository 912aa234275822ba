#pragma once

#include <Eigen/Core>
#include <string>

namespace scal {

// Binary matrix dump for pipeline checkpointing. 16-byte header: magic
// "LSPC", u32 rows, u32 cols, u32 reserved (zero); then rows*cols doubles,
// row-major, little-endian.

void write_matrix(const std::string& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix(const std::string& path);

} // namespace scal
