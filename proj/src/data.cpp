#include "ssmic/data.hpp"

#include "ssmic/error.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace ssmic {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        cells.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return cells;
}

bool parse_double(std::string_view cell, double& value) {
    if (cell.empty()) return false;
    if (cell.front() == '+') cell.remove_prefix(1);
    const auto* end = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
    return ec == std::errc{} && ptr == end;
}

std::string location(const std::filesystem::path& path, std::size_t line) {
    return path.string() + ":" + std::to_string(line) + ": ";
}

}  // namespace

void Dataset::validate() const {
    if (features.rows() < 1 || features.cols() < 1)
        throw InputError("dataset '" + name + "' must have at least one sample and one feature");
    if (!features.allFinite()) throw InputError("dataset '" + name + "' contains non-finite features");
    if (labels) {
        if (labels->size() != size())
            throw InputError("dataset '" + name + "': label count does not match sample count");
        for (int y : *labels)
            if (y < 1 || y > classes)
                throw InputError("dataset '" + name + "': label " + std::to_string(y) + " outside 1.." +
                                 std::to_string(classes));
    }
}

CsvFormat parse_csv_format(std::string_view text) {
    if (text == "csv") return CsvFormat::Plain;
    if (text == "labeled-csv") return CsvFormat::Labeled;
    throw InputError("unknown dataset format '" + std::string(text) + "' (expected csv or labeled-csv)");
}

Normalization parse_normalization(std::string_view text) {
    if (text == "minmax-symmetric") return Normalization::MinMaxSymmetric;
    if (text == "zscore") return Normalization::ZScore;
    if (text == "none") return Normalization::None;
    throw InputError("unknown normalization '" + std::string(text) +
                     "' (expected minmax-symmetric, zscore or none)");
}

std::string_view to_string(Normalization scheme) {
    switch (scheme) {
        case Normalization::MinMaxSymmetric: return "minmax-symmetric";
        case Normalization::ZScore: return "zscore";
        case Normalization::None: return "none";
    }
    return "none";
}

Matrix read_numeric_csv(const std::filesystem::path& path, bool allow_empty) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path.string() + "'");

    std::vector<double> values;
    std::size_t columns = 0;
    std::size_t rows = 0;
    std::size_t line_no = 0;
    bool first_content_line = true;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        const auto content = trim(line);
        if (content.empty()) continue;
        const auto cells = split_commas(content);

        std::vector<double> parsed(cells.size());
        std::size_t bad = cells.size();
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (!parse_double(cells[k], parsed[k])) {
                bad = k;
                break;
            }
        }
        if (first_content_line) {
            first_content_line = false;
            if (bad != cells.size()) continue;  // header
        }
        if (bad != cells.size())
            throw InputError(location(path, line_no) + "non-numeric cell '" + std::string(cells[bad]) +
                             "' in column " + std::to_string(bad + 1));
        if (columns == 0) {
            columns = cells.size();
        } else if (cells.size() != columns) {
            throw InputError(location(path, line_no) + "ragged row: expected " + std::to_string(columns) +
                             " columns, found " + std::to_string(cells.size()));
        }
        for (std::size_t k = 0; k < parsed.size(); ++k)
            if (!std::isfinite(parsed[k]))
                throw InputError(location(path, line_no) + "non-finite value in column " + std::to_string(k + 1));
        values.insert(values.end(), parsed.begin(), parsed.end());
        ++rows;
    }
    if (rows == 0) {
        if (allow_empty) return Matrix(0, 0);
        throw InputError(location(path, line_no) + "empty file: no data rows");
    }
    Matrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(columns));
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < columns; ++c)
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = values[r * columns + c];
    return out;
}

Dataset load_dataset(const std::filesystem::path& path, CsvFormat format) {
    Matrix table = read_numeric_csv(path);
    Dataset ds;
    ds.name = path.stem().string();
    if (format == CsvFormat::Plain) {
        ds.features = std::move(table);
        ds.validate();
        return ds;
    }
    if (table.cols() < 2) throw InputError(path.string() + ": labeled-csv needs at least one feature column and a label column");
    const Eigen::Index d = table.cols() - 1;
    Labels labels(static_cast<std::size_t>(table.rows()));
    for (Eigen::Index r = 0; r < table.rows(); ++r) {
        const double v = table(r, d);
        if (v != std::floor(v) || v < 1 || v > 1e9)
            throw InputError(path.string() + ": data row " + std::to_string(r + 1) + ": label '" +
                             std::to_string(v) + "' is not a positive integer");
        labels[static_cast<std::size_t>(r)] = static_cast<int>(v);
    }
    ds.classes = *std::max_element(labels.begin(), labels.end());
    ds.features = table.leftCols(d);
    ds.labels = std::move(labels);
    ds.validate();
    return ds;
}

void write_dataset_csv(std::ostream& out, const Dataset& ds) {
    char buf[32];
    for (Eigen::Index r = 0; r < ds.features.rows(); ++r) {
        for (Eigen::Index c = 0; c < ds.features.cols(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", ds.features(r, c));
            if (c > 0) out << ',';
            out << buf;
        }
        if (ds.labels) out << ',' << (*ds.labels)[static_cast<std::size_t>(r)];
        out << '\n';
    }
}

Dataset normalize(const Dataset& ds, Normalization scheme) {
    Dataset out = ds;
    if (scheme == Normalization::None) return out;
    const Eigen::Index n = ds.features.rows();
    for (Eigen::Index c = 0; c < ds.features.cols(); ++c) {
        auto col = out.features.col(c);
        if (scheme == Normalization::MinMaxSymmetric) {
            const double lo = col.minCoeff();
            const double hi = col.maxCoeff();
            if (hi == lo) {
                col.setZero();
            } else {
                col = ((col.array() - lo) * (2.0 / (hi - lo)) - 1.0).matrix();
            }
        } else {
            const double mean = col.mean();
            const double var = (col.array() - mean).square().sum() / static_cast<double>(n);
            if (var == 0.0) {
                col.setZero();
            } else {
                col = ((col.array() - mean) / std::sqrt(var)).matrix();
            }
        }
    }
    return out;
}

Dataset make_blobs(std::size_t n_per_class, int classes, std::size_t dim, double separation,
                   std::uint64_t seed) {
    if (n_per_class < 1 || classes < 1 || dim < 1)
        throw InputError("make_blobs: counts must be at least 1");
    if (!(separation >= 0.0) || !std::isfinite(separation))
        throw InputError("make_blobs: separation must be finite and non-negative");

    const auto c = static_cast<Eigen::Index>(classes);
    const auto d = static_cast<Eigen::Index>(dim);
    Matrix centers = Matrix::Zero(c, d);
    if (c <= d) {
        for (Eigen::Index k = 0; k < c; ++k) centers(k, k) = separation / std::numbers::sqrt2;
    } else if (d >= 2) {
        const double radius = separation / (2.0 * std::sin(std::numbers::pi / static_cast<double>(c)));
        for (Eigen::Index k = 0; k < c; ++k) {
            const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(c);
            centers(k, 0) = radius * std::cos(angle);
            centers(k, 1) = radius * std::sin(angle);
        }
    } else {
        for (Eigen::Index k = 0; k < c; ++k) centers(k, 0) = separation * static_cast<double>(k);
    }
    centers.rowwise() -= centers.colwise().mean();

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    const auto n = static_cast<Eigen::Index>(n_per_class) * c;
    Dataset ds;
    ds.features.resize(n, d);
    ds.labels = Labels(static_cast<std::size_t>(n));
    ds.classes = classes;
    for (Eigen::Index k = 0; k < c; ++k) {
        for (std::size_t p = 0; p < n_per_class; ++p) {
            const Eigen::Index row = k * static_cast<Eigen::Index>(n_per_class) + static_cast<Eigen::Index>(p);
            for (Eigen::Index j = 0; j < d; ++j) ds.features(row, j) = centers(k, j) + noise(rng);
            (*ds.labels)[static_cast<std::size_t>(row)] = static_cast<int>(k + 1);
        }
    }
    std::ostringstream name;
    name << "blobs-" << n_per_class << "x" << classes << "-d" << dim << "-sep" << separation << "-seed" << seed;
    ds.name = name.str();
    return ds;
}

}  // namespace ssmic
