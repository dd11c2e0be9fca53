#include "ssmic/model_select.hpp"

#include "ssmic/error.hpp"
#include "ssmic/log.hpp"
#include "ssmic/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

namespace ssmic {

namespace {

template <class T>
std::vector<T> sorted_unique(std::vector<T> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

// True when a should be preferred over b.
bool better(const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.violations != b.violations) return a.violations < b.violations;
    if (a.lsmi != b.lsmi) return a.lsmi > b.lsmi;
    if (a.params.t != b.params.t) return a.params.t < b.params.t;
    if (a.params.gamma != b.params.gamma) return a.params.gamma < b.params.gamma;
    return a.params.eta < b.params.eta;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::size_t count_violations(const Labels& labels, const ConstraintSet& cs) {
    if (cs.n != 0 && cs.n != labels.size())
        throw InputError("constraint set covers " + std::to_string(cs.n) + " samples but there are " +
                         std::to_string(labels.size()) + " labels");
    std::size_t count = 0;
    for (const auto& l : cs.must_links)
        if (labels.at(l.i) != labels.at(l.j)) ++count;
    for (const auto& l : cs.cannot_links)
        if (labels.at(l.i) == labels.at(l.j)) ++count;
    return count;
}

std::vector<Candidate> score_all(std::vector<Candidate> candidates, bool* shifted) {
    if (candidates.empty()) throw InputError("no candidates to score");
    double max_lsmi = -std::numeric_limits<double>::infinity();
    std::size_t max_violations = 0;
    bool any = false;
    for (const auto& c : candidates) {
        if (!c.ok()) continue;
        any = true;
        max_lsmi = std::max(max_lsmi, c.lsmi);
        max_violations = std::max(max_violations, c.violations);
    }
    if (!any) throw InputError("every candidate failed; nothing to score");
    const bool shift = !(max_lsmi > 0.0);
    if (shifted) *shifted = shift;
    for (auto& c : candidates) {
        if (!c.ok()) continue;
        const double information = shift ? c.lsmi - max_lsmi : c.lsmi / max_lsmi;
        const double penalty =
            max_violations == 0 ? 0.0 : static_cast<double>(c.violations) / static_cast<double>(max_violations);
        c.score = information - penalty;
    }
    return candidates;
}

Selection grid_search(const Dataset& ds, const ConstraintSet& cs, int classes, SearchGrid grid,
                      const lsmi::LsmiConfig& lsmi_config, std::size_t jobs) {
    ds.validate();
    grid.t = sorted_unique(std::move(grid.t));
    grid.gamma = sorted_unique(std::move(grid.gamma));
    grid.eta = sorted_unique(std::move(grid.eta));
    if (grid.t.empty() || grid.gamma.empty() || grid.eta.empty()) throw InputError("search grids must be nonempty");

    Selection result;
    if (classes > 2 && (grid.eta.size() != 1 || grid.eta.front() != 0.0)) {
        result.warnings.push_back("more than two classes: eta grid replaced by {0}");
        log::warn(result.warnings.back());
        grid.eta = {0.0};
    }

    lsmi::LsmiConfig config = lsmi_config;
    if (config.kappa_grid.empty()) config.kappa_grid = lsmi::default_kappa_grid(ds.features);
    if (config.delta_grid.empty()) config.delta_grid = lsmi::default_delta_grid();

    std::vector<Candidate> candidates;
    for (auto t : grid.t)
        for (double gamma : grid.gamma)
            for (double eta : grid.eta) {
                Candidate c;
                c.params = {t, gamma, eta};
                candidates.push_back(std::move(c));
            }

    parallel_for(candidates.size(), jobs, [&](std::size_t k) {
        Candidate& c = candidates[k];
        const auto start = std::chrono::steady_clock::now();
        try {
            c.labels = cluster(ds, cs, c.params, classes).labels;
            c.violations = count_violations(c.labels, cs);
        } catch (const InputError& e) {
            c.error = e.what();
            c.input_error = true;
        } catch (const std::exception& e) {
            c.error = e.what();
        }
        c.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    });

    // LSMI depends only on the labelling, and distinct grid points often agree.
    std::map<Labels, std::size_t> distinct;
    std::vector<std::size_t> owner(candidates.size(), 0);
    std::vector<std::size_t> representatives;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        if (!candidates[k].ok()) continue;
        const auto [it, inserted] = distinct.emplace(candidates[k].labels, representatives.size());
        if (inserted) representatives.push_back(k);
        owner[k] = it->second;
    }
    struct Estimate {
        double value = 0.0, kappa = 0.0, delta = 0.0, wall_ms = 0.0;
        std::string error;
        bool input_error = false;
    };
    std::vector<Estimate> estimates(representatives.size());
    parallel_for(representatives.size(), jobs, [&](std::size_t r) {
        Estimate& e = estimates[r];
        const auto start = std::chrono::steady_clock::now();
        try {
            const auto est = lsmi::estimate(ds.features, candidates[representatives[r]].labels, config);
            e.value = est.value;
            e.kappa = est.cv.kappa;
            e.delta = est.cv.delta;
        } catch (const InputError& ex) {
            e.error = ex.what();
            e.input_error = true;
        } catch (const std::exception& ex) {
            e.error = ex.what();
        }
        e.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    });
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        Candidate& c = candidates[k];
        if (!c.ok()) continue;
        const Estimate& e = estimates[owner[k]];
        c.lsmi = e.value;
        c.kappa = e.kappa;
        c.delta = e.delta;
        c.wall_ms += e.wall_ms;
        c.error = e.error;
        c.input_error = e.input_error;
    }

    const bool any_ok = std::any_of(candidates.begin(), candidates.end(), [](const Candidate& c) { return c.ok(); });
    if (!any_ok) {
        std::string report = "all " + std::to_string(candidates.size()) + " candidates failed:";
        bool all_input = true;
        for (const auto& c : candidates) {
            report += "\n  t=" + std::to_string(c.params.t) + " gamma=" + format_double(c.params.gamma) +
                      " eta=" + format_double(c.params.eta) + ": " + c.error;
            all_input = all_input && c.input_error;
        }
        if (all_input) throw InputError(report);
        throw NumericError(report);
    }
    for (const auto& c : candidates)
        if (!c.ok())
            log::debug("candidate t=" + std::to_string(c.params.t) + " gamma=" + format_double(c.params.gamma) +
                       " eta=" + format_double(c.params.eta) + " skipped: " + c.error);

    result.table = score_all(std::move(candidates), &result.shifted_lsmi);
    if (result.shifted_lsmi) {
        result.warnings.push_back("maximum LSMI is not positive; LSMI term shift-normalised");
        log::warn(result.warnings.back());
    }
    const Candidate* best = nullptr;
    for (const auto& c : result.table)
        if (c.ok() && (best == nullptr || better(c, *best))) best = &c;
    result.best = *best;

    Clustering final = cluster(ds, cs, result.best.params, classes);
    result.model = std::move(final.model);
    lsmi::LsmiConfig best_config = config;
    result.best_cv = lsmi::estimate(ds.features, result.best.labels, best_config).cv;
    return result;
}

void write_candidate_table(std::ostream& out, const std::vector<Candidate>& table) {
    out << "t,gamma,eta,lsmi,n_v,score,kappa,delta,wall_ms,status\n";
    for (const auto& c : table) {
        out << c.params.t << ',' << format_double(c.params.gamma) << ',' << format_double(c.params.eta) << ',';
        if (c.ok()) {
            out << format_double(c.lsmi) << ',' << c.violations << ',' << format_double(c.score) << ','
                << format_double(c.kappa) << ',' << format_double(c.delta) << ',';
        } else {
            out << ",,,,,";
        }
        char ms[32];
        std::snprintf(ms, sizeof ms, "%.3f", c.wall_ms);
        out << ms << ',' << (c.ok() ? "ok" : "failed") << '\n';
    }
}

}  // namespace ssmic
