#include "carleson/csv_io.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace carleson {

namespace {

bool is_blank_or_comment(const std::string& line) {
    for (char c : line) {
        if (c == '#') return true;
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

double parse_number(const std::string& token, const std::string& file, int line) {
    const char* begin = token.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    while (end && *end && std::isspace(static_cast<unsigned char>(*end))) ++end;
    if (end == begin || (end && *end != '\0'))
        throw CsvParseError(file, line, "not a number: '" + token + "'");
    return v;
}

std::vector<double> parse_row(const std::string& line, const std::string& file, int lineno) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string token;
    while (std::getline(ss, token, ',')) row.push_back(parse_number(token, file, lineno));
    if (row.empty()) throw CsvParseError(file, lineno, "empty row");
    return row;
}

std::vector<std::vector<double>> read_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CsvParseError(path, 0, "cannot open file");
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (is_blank_or_comment(line)) continue;
        auto row = parse_row(line, path, lineno);
        if (width == 0) width = row.size();
        if (row.size() != width)
            throw CsvParseError(path, lineno,
                                "expected " + std::to_string(width) + " columns, got " +
                                    std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw CsvParseError(path, lineno, "no data rows");
    return rows;
}

}  // namespace

MetricMeasureSpace read_point_cloud_csv(const std::string& path) {
    auto rows = read_rows(path);
    const int dim = static_cast<int>(rows.front().size()) - 1;
    if (dim < 1) throw CsvParseError(path, 1, "need at least one coordinate column plus weight");
    std::vector<double> coords;
    std::vector<double> weights;
    coords.reserve(rows.size() * dim);
    weights.reserve(rows.size());
    for (const auto& row : rows) {
        for (int d = 0; d < dim; ++d) coords.push_back(row[d]);
        weights.push_back(row.back());
    }
    try {
        return MetricMeasureSpace::euclidean(std::move(coords), dim, std::move(weights));
    } catch (const std::invalid_argument& e) {
        throw CsvParseError(path, 0, e.what());
    }
}

void write_point_cloud_csv(const std::string& path, const MetricMeasureSpace& space) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << std::setprecision(17);
    for (int i = 0; i < space.size(); ++i) {
        auto c = space.coords_of(i);
        for (double v : c) out << v << ",";
        out << space.weight(i) << "\n";
    }
}

MetricMeasureSpace read_distance_matrix_csv(const std::string& matrix_path,
                                            const std::string& weights_path) {
    auto rows = read_rows(matrix_path);
    const int n = static_cast<int>(rows.size());
    if (rows.front().size() != static_cast<std::size_t>(n))
        throw CsvParseError(matrix_path, 1, "matrix is not square");
    std::vector<double> matrix;
    matrix.reserve(static_cast<std::size_t>(n) * n);
    for (const auto& row : rows)
        for (double v : row) matrix.push_back(v);

    auto wrows = read_rows(weights_path);
    if (wrows.front().size() != 1)
        throw CsvParseError(weights_path, 1, "weight file must have exactly one column");
    if (static_cast<int>(wrows.size()) != n)
        throw CsvParseError(weights_path, 0,
                            "weight count " + std::to_string(wrows.size()) +
                                " does not match matrix size " + std::to_string(n));
    std::vector<double> weights;
    weights.reserve(n);
    for (const auto& row : wrows) weights.push_back(row.front());
    try {
        return MetricMeasureSpace::from_matrix(std::move(matrix), n, std::move(weights));
    } catch (const std::invalid_argument& e) {
        throw CsvParseError(matrix_path, 0, e.what());
    }
}

std::vector<int> read_labels(const std::string& path) {
    auto rows = read_rows(path);
    std::vector<int> labels;
    labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != 1)
            throw CsvParseError(path, static_cast<int>(i + 1), "label file must have one column");
        labels.push_back(static_cast<int>(rows[i].front()));
    }
    return labels;
}

void write_labels(const std::string& path, const std::vector<int>& labels) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (int v : labels) out << v << "\n";
}

}  // namespace carleson
