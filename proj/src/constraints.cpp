#include "ssmic/constraints.hpp"

#include "ssmic/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>

namespace ssmic {

namespace {

std::uint64_t row_offset(std::uint64_t n, std::uint64_t i) { return i * (2 * n - i - 1) / 2; }

// Inverse of the row-major enumeration of the strict upper triangle.
Link decode_pair(std::uint64_t n, std::uint64_t k) {
    const double nd = static_cast<double>(n);
    const double disc = (2 * nd - 1) * (2 * nd - 1) - 8.0 * static_cast<double>(k);
    auto i = static_cast<std::uint64_t>(std::max(0.0, std::floor(((2 * nd - 1) - std::sqrt(std::max(disc, 0.0))) / 2)));
    if (i > n - 2) i = n - 2;
    while (i > 0 && row_offset(n, i) > k) --i;
    while (i + 1 <= n - 2 && row_offset(n, i + 1) <= k) ++i;
    const std::uint64_t j = i + 1 + (k - row_offset(n, i));
    return Link{static_cast<std::size_t>(i), static_cast<std::size_t>(j)};
}

Eigen::SparseMatrix<double> link_matrix(std::size_t n, const std::vector<Link>& links, bool unit_diagonal) {
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(2 * links.size() + (unit_diagonal ? n : 0));
    if (unit_diagonal)
        for (std::size_t i = 0; i < n; ++i)
            entries.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
    for (const auto& l : links) {
        entries.emplace_back(static_cast<int>(l.i), static_cast<int>(l.j), 1.0);
        entries.emplace_back(static_cast<int>(l.j), static_cast<int>(l.i), 1.0);
    }
    const auto size = static_cast<Eigen::Index>(n);
    Eigen::SparseMatrix<double> m(size, size);
    // Duplicates would be summed; the lists are deduplicated before this point.
    m.setFromTriplets(entries.begin(), entries.end(), [](double a, double) { return a; });
    return m;
}

}  // namespace

std::uint64_t pair_count(std::size_t n) {
    const auto m = static_cast<std::uint64_t>(n);
    return m < 2 ? 0 : m * (m - 1) / 2;
}

void ConstraintSet::validate() const {
    auto check = [&](const std::vector<Link>& links, const char* kind) {
        for (const auto& l : links) {
            if (l.i >= n || l.j >= n)
                throw InputError(std::string(kind) + " (" + std::to_string(l.i + 1) + "," + std::to_string(l.j + 1) +
                                 ") references a sample outside 1.." + std::to_string(n));
            if (l.i == l.j)
                throw InputError(std::string(kind) + " links sample " + std::to_string(l.i + 1) + " to itself");
        }
    };
    check(must_links, "must-link");
    check(cannot_links, "cannot-link");
    std::set<Link> must;
    for (const auto& l : must_links) must.insert(Link::make(l.i, l.j));
    for (const auto& l : cannot_links)
        if (must.contains(Link::make(l.i, l.j)))
            throw InputError("pair (" + std::to_string(l.i + 1) + "," + std::to_string(l.j + 1) +
                             ") is both a must-link and a cannot-link");
}

void ConstraintSet::canonicalize() {
    for (auto* list : {&must_links, &cannot_links}) {
        for (auto& l : *list) l = Link::make(l.i, l.j);
        std::sort(list->begin(), list->end());
        list->erase(std::unique(list->begin(), list->end()), list->end());
    }
}

Eigen::SparseMatrix<double> ConstraintSet::must_matrix() const { return link_matrix(n, must_links, true); }

Eigen::SparseMatrix<double> ConstraintSet::cannot_matrix() const { return link_matrix(n, cannot_links, false); }

ConstraintSet sample_constraints(const Labels& labels, std::uint64_t n_links, std::uint64_t seed) {
    ConstraintSet cs;
    cs.n = labels.size();
    const std::uint64_t total = pair_count(cs.n);
    if (n_links > total)
        throw InputError("requested " + std::to_string(n_links) + " links but only " + std::to_string(total) +
                         " distinct pairs exist among " + std::to_string(cs.n) + " samples");
    if (n_links == 0) return cs;

    // Floyd's algorithm: n_links distinct pair indices, uniform over subsets.
    std::mt19937_64 rng(seed);
    std::unordered_set<std::uint64_t> chosen;
    chosen.reserve(static_cast<std::size_t>(n_links) * 2);
    for (std::uint64_t j = total - n_links; j < total; ++j) {
        std::uniform_int_distribution<std::uint64_t> pick(0, j);
        const std::uint64_t t = pick(rng);
        if (!chosen.insert(t).second) chosen.insert(j);
    }
    std::vector<std::uint64_t> ordered(chosen.begin(), chosen.end());
    std::sort(ordered.begin(), ordered.end());
    for (const auto k : ordered) {
        const Link l = decode_pair(cs.n, k);
        (labels[l.i] == labels[l.j] ? cs.must_links : cs.cannot_links).push_back(l);
    }
    return cs;
}

ConstraintSet parse_constraints(std::istream& in, std::size_t n, std::string_view source) {
    ConstraintSet cs;
    cs.n = n;
    std::set<Link> must;
    std::set<Link> cannot;
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& what) {
        throw InputError(std::string(source) + ":" + std::to_string(line_no) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::string a, b, kind, extra;
        if (!(fields >> a)) continue;
        if (!(fields >> b >> kind) || (fields >> extra)) fail("expected 'i j +1' or 'i j -1'");
        long long i = 0, j = 0;
        try {
            std::size_t pa = 0, pb = 0;
            i = std::stoll(a, &pa);
            j = std::stoll(b, &pb);
            if (pa != a.size() || pb != b.size()) fail("indices must be integers");
        } catch (const std::logic_error&) {
            fail("indices must be integers");
        }
        if (i < 1 || j < 1 || static_cast<unsigned long long>(i) > n || static_cast<unsigned long long>(j) > n)
            fail("index out of range 1.." + std::to_string(n));
        if (i == j) fail("self-link on sample " + std::to_string(i));
        const Link l = Link::make(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1));
        if (kind == "+1" || kind == "1") {
            if (cannot.contains(l)) fail("pair is already a cannot-link");
            must.insert(l);
        } else if (kind == "-1") {
            if (must.contains(l)) fail("pair is already a must-link");
            cannot.insert(l);
        } else {
            fail("link type must be +1 or -1, got '" + kind + "'");
        }
    }
    cs.must_links.assign(must.begin(), must.end());
    cs.cannot_links.assign(cannot.begin(), cannot.end());
    return cs;
}

ConstraintSet read_constraints(const std::filesystem::path& path, std::size_t n) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open constraint file '" + path.string() + "'");
    return parse_constraints(in, n, path.string());
}

void write_constraints(std::ostream& out, const ConstraintSet& cs, std::string_view header) {
    std::istringstream lines{std::string(header)};
    for (std::string line; std::getline(lines, line);) out << "# " << line << '\n';
    std::vector<std::pair<Link, int>> all;
    all.reserve(cs.must_links.size() + cs.cannot_links.size());
    for (const auto& l : cs.must_links) all.emplace_back(l, 1);
    for (const auto& l : cs.cannot_links) all.emplace_back(l, -1);
    std::sort(all.begin(), all.end());
    for (const auto& [l, kind] : all) out << l.i + 1 << ' ' << l.j + 1 << ' ' << (kind > 0 ? "+1" : "-1") << '\n';
}

}  // namespace ssmic
