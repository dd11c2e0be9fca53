#pragma once

#include "ssmic/constraints.hpp"
#include "ssmic/data.hpp"
#include "ssmic/lsmi.hpp"
#include "ssmic/solver.hpp"

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace ssmic {

/// One point of the (t, gamma, eta) search and its evaluation.
struct Candidate {
    SolverParams params;
    Labels labels;
    double lsmi = std::numeric_limits<double>::quiet_NaN();
    std::size_t violations = 0;
    double score = std::numeric_limits<double>::quiet_NaN();
    double kappa = 0.0;  ///< LSMI width chosen by cross-validation
    double delta = 0.0;  ///< LSMI ridge chosen by cross-validation
    double wall_ms = 0.0;
    std::string error;   ///< non-empty when the candidate could not be evaluated
    bool input_error = false;

    bool ok() const { return error.empty(); }
};

/// Must-links split across clusters plus cannot-links inside one cluster.
std::size_t count_violations(const Labels& labels, const ConstraintSet& cs);

/// score = lsmi / max(lsmi) - n_v / max(n_v) over the successful candidates.
/// The penalty is 0 when no candidate violates anything. When max(lsmi) <= 0
/// the ratio is meaningless and the LSMI term becomes lsmi - max(lsmi);
/// *shifted reports that case. Failed candidates keep a NaN score.
std::vector<Candidate> score_all(std::vector<Candidate> candidates, bool* shifted = nullptr);

struct SearchGrid {
    std::vector<std::size_t> t{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::vector<double> gamma{0.0, 0.25, 0.5, 1.0, 2.0, 4.0};
    std::vector<double> eta{0.0, 0.25, 0.5, 1.0, 2.0, 4.0};
};

struct Selection {
    Candidate best;
    ClusterModel model;
    lsmi::CvResult best_cv;
    std::vector<Candidate> table;  ///< grid order: t, then gamma, then eta
    std::vector<std::string> warnings;
    bool shifted_lsmi = false;
};

/// Clusters with every (t, gamma, eta), estimates LSMI on each labelling
/// (with its own cross-validated kappa, delta), counts violated links and
/// returns the best score. Ties go to fewer violations, larger LSMI, then
/// smaller t, gamma, eta. With more than two classes the eta grid collapses
/// to {0} with a warning. Throws when every candidate fails.
Selection grid_search(const Dataset& ds, const ConstraintSet& cs, int classes, SearchGrid grid,
                      const lsmi::LsmiConfig& lsmi_config, std::size_t jobs = 1);

/// CSV: t,gamma,eta,lsmi,n_v,score,kappa,delta,wall_ms,status
void write_candidate_table(std::ostream& out, const std::vector<Candidate>& table);

}  // namespace ssmic
