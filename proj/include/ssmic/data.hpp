#pragma once

#include "ssmic/types.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace ssmic {

/// n samples in d dimensions, one row per sample, with optional ground truth.
struct Dataset {
    Matrix features;
    std::optional<Labels> labels;  ///< values in 1..classes when present
    int classes = 0;               ///< 0 when unknown
    std::string name;

    std::size_t size() const { return static_cast<std::size_t>(features.rows()); }
    std::size_t dim() const { return static_cast<std::size_t>(features.cols()); }

    /// Throws InputError when the invariants (n, d >= 1, finite entries,
    /// labels in 1..classes) do not hold.
    void validate() const;
};

enum class CsvFormat { Plain, Labeled };
enum class Normalization { MinMaxSymmetric, ZScore, None };

CsvFormat parse_csv_format(std::string_view text);
Normalization parse_normalization(std::string_view text);
std::string_view to_string(Normalization scheme);

/// Reads a comma-separated numeric table. A first line containing any
/// non-numeric cell is treated as a header and skipped. Errors carry the
/// offending line number. With allow_empty, a file with no data rows yields
/// a 0x0 matrix instead of an error.
Matrix read_numeric_csv(const std::filesystem::path& path, bool allow_empty = false);

/// Loads a dataset. For CsvFormat::Labeled the last column holds positive
/// integer labels and `classes` is inferred as the largest label.
Dataset load_dataset(const std::filesystem::path& path, CsvFormat format);

void write_dataset_csv(std::ostream& out, const Dataset& ds);

/// Column-wise rescaling. MinMaxSymmetric maps each column affinely onto
/// [-1, 1]; ZScore gives mean 0 and unit (population) variance. Constant
/// columns map to 0 under both.
Dataset normalize(const Dataset& ds, Normalization scheme);

/// c isotropic unit-variance Gaussian clusters, n_per_class points each,
/// ordered by class. Adjacent centers are `separation` apart: a regular
/// simplex when c <= d, otherwise a regular polygon in the first two
/// coordinates (a line when d == 1). Deterministic per seed.
Dataset make_blobs(std::size_t n_per_class, int classes, std::size_t dim, double separation,
                   std::uint64_t seed);

}  // namespace ssmic
