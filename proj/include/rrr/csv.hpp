#pragma once

#include <Eigen/Core>
#include <string>

namespace rrr {

/// Shortest round-trip decimal form of a double (std::to_chars). Used for all
/// numeric output so repeated runs produce byte-identical files.
std::string format_double(double value);

/// Headerless CSV, one matrix row per line, comma-separated decimal floats.
/// Rejects ragged rows and non-numeric fields.
Eigen::MatrixXd load_matrix_csv(const std::string& path);

void save_matrix_csv(const Eigen::MatrixXd& m, const std::string& path);

}  // namespace rrr
