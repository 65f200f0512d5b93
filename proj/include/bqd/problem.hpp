#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <bqd/archive.hpp>
#include <bqd/space.hpp>

namespace bqd {

    /// Objective, features and inequality constraints (feasible when <= 0)
    /// over a mixed space, with the grid that defines the niches.
    struct QdProblem {
        std::string name;
        MixedSpace space;
        FeatureGrid grid;
        std::function<double(const MixedPoint&)> objective;
        std::function<std::vector<double>(const MixedPoint&)> features;
        std::function<std::vector<double>(const MixedPoint&)> constraints;
        std::size_t n_features = 0;
        std::size_t n_constraints = 0;
    };

    /// One exact evaluation of every function of a problem.
    struct Evaluation {
        double objective = 0.;
        std::vector<double> features;
        std::vector<double> constraints;
    };

    inline Evaluation evaluate(const QdProblem& problem, const MixedPoint& p)
    {
        Evaluation e{problem.objective(p), problem.features(p), problem.constraints(p)};
        if (e.features.size() != problem.n_features || e.constraints.size() != problem.n_constraints)
            throw std::runtime_error("QdProblem '" + problem.name + "': evaluator output length mismatch");
        return e;
    }

    /// Cumulative progress record.
    struct HistoryRow {
        std::size_t evals = 0;
        double qd_score = 0.;
        std::size_t niche_count = 0;

        friend bool operator==(const HistoryRow&, const HistoryRow&) = default;
    };

} // namespace bqd
