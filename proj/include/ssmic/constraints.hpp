#pragma once

#include "ssmic/types.hpp"

#include <Eigen/SparseCore>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace ssmic {

/// Unordered sample pair, stored 0-based with i < j.
struct Link {
    std::size_t i = 0;
    std::size_t j = 0;

    static Link make(std::size_t a, std::size_t b) { return a < b ? Link{a, b} : Link{b, a}; }
    friend auto operator<=>(const Link&, const Link&) = default;
};

/// Must-link and cannot-link pairs over n samples.
struct ConstraintSet {
    std::size_t n = 0;
    std::vector<Link> must_links;
    std::vector<Link> cannot_links;

    bool empty() const { return must_links.empty() && cannot_links.empty(); }

    /// Throws InputError on out-of-range indices, self pairs, or a pair
    /// listed as both must and cannot.
    void validate() const;

    /// Sorts both lists and drops duplicates.
    void canonicalize();

    /// Binary symmetric M with unit diagonal.
    Eigen::SparseMatrix<double> must_matrix() const;
    /// Binary symmetric C with zero diagonal.
    Eigen::SparseMatrix<double> cannot_matrix() const;
};

/// Number of unordered pairs among n samples.
std::uint64_t pair_count(std::size_t n);

/// Draws n_links distinct unordered pairs uniformly without replacement and
/// files each one as must or cannot according to `labels`. Lists come back
/// sorted. Throws InputError when n_links exceeds the available pairs.
ConstraintSet sample_constraints(const Labels& labels, std::uint64_t n_links, std::uint64_t seed);

/// Parses `i j +1` (must) / `i j -1` (cannot) lines with 1-based indices;
/// `#` starts a comment. Duplicate lines are merged.
ConstraintSet read_constraints(const std::filesystem::path& path, std::size_t n);
ConstraintSet parse_constraints(std::istream& in, std::size_t n, std::string_view source = "<stream>");

/// Writes the 1-based text format. `header` lines are emitted as comments.
void write_constraints(std::ostream& out, const ConstraintSet& cs, std::string_view header = {});

}  // namespace ssmic
