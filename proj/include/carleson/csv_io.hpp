#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "carleson/metric_space.hpp"

namespace carleson {

struct CsvParseError : std::runtime_error {
    CsvParseError(const std::string& file, int line, const std::string& what)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + what),
          file(file), line(line) {}
    std::string file;
    int line;
};

// Point cloud CSV: one row per point, x_1,...,x_dim,weight. Lines starting
// with '#' and blank lines are skipped; every data row must have the same
// column count.
MetricMeasureSpace read_point_cloud_csv(const std::string& path);
void write_point_cloud_csv(const std::string& path, const MetricMeasureSpace& space);

// Square symmetric distance matrix CSV plus a one-column weight file.
MetricMeasureSpace read_distance_matrix_csv(const std::string& matrix_path,
                                            const std::string& weights_path);

// Sidecar label file: one integer per point row.
std::vector<int> read_labels(const std::string& path);
void write_labels(const std::string& path, const std::vector<int>& labels);

}  // namespace carleson
