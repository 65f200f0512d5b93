#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include <bqd/archive.hpp>
#include <bqd/problem.hpp>
#include <bqd/space.hpp>

namespace bqd {

    struct MapElitesConfig {
        std::size_t population_size = 10;
        /// Offspring per generation; 0 means population_size.
        std::size_t batch_size = 0;
        std::size_t generations = 4000;
        double mutation_prob = 0.4;
        /// Gaussian step on continuous coordinates normalized to [0,1].
        double mutation_sd = 0.3;
        std::uint64_t seed = 0;

        std::size_t effective_batch() const { return batch_size == 0 ? population_size : batch_size; }

        void validate() const
        {
            if (population_size < 1)
                throw std::invalid_argument("MapElitesConfig: population_size must be at least 1");
            if (!(mutation_prob >= 0. && mutation_prob <= 1.))
                throw std::invalid_argument("MapElitesConfig: mutation_prob must be in [0, 1]");
            if (!(mutation_sd > 0.))
                throw std::invalid_argument("MapElitesConfig: mutation_sd must be positive");
        }
    };

    /// Per-coordinate mutation. A selected continuous coordinate takes a
    /// Gaussian step in normalized space and is clamped to its bounds; a
    /// selected level variable moves to a uniformly drawn different level.
    template <typename Rng>
    MixedPoint mutate(const MixedPoint& p, const MixedSpace& space, const MapElitesConfig& cfg, Rng& rng)
    {
        std::uniform_real_distribution<double> unif(0., 1.);
        std::normal_distribution<double> step(0., cfg.mutation_sd);
        MixedPoint out = p;
        const auto& bounds = space.continuous_bounds();
        for (std::size_t i = 0; i < bounds.size(); ++i) {
            if (unif(rng) >= cfg.mutation_prob)
                continue;
            double u = normalize_coordinate(space, i, p.continuous[i]) + step(rng);
            u = std::clamp(u, 0., 1.);
            out.continuous[i] = u >= 1. ? bounds[i].upper : bounds[i].lower + u * (bounds[i].upper - bounds[i].lower);
        }
        for (std::size_t i = 0; i < space.dim_levels(); ++i) {
            if (unif(rng) >= cfg.mutation_prob)
                continue;
            const int L = space.level_count(i);
            if (L < 2)
                continue;
            std::uniform_int_distribution<int> other(0, L - 2);
            int level = other(rng);
            int& current = MixedSpace::level_of(out, i);
            current = level >= current ? level + 1 : level;
        }
        return out;
    }

    struct MapElitesResult {
        Archive archive;
        std::size_t eval_count = 0;
        /// One row after the initial population, then one per generation.
        std::vector<HistoryRow> history;
    };

    /// Constrained mixed-variable MAP-Elites.
    ///
    /// The initial population (LHS of population_size unless given) is
    /// evaluated and its feasible members archived. Each generation draws
    /// batch parents uniformly among stored elites, mutates them, evaluates
    /// the offspring and offers them to the archive. When the archive is
    /// still empty, fresh LHS individuals replace the offspring.
    inline MapElitesResult run_map_elites(const QdProblem& problem, const MapElitesConfig& cfg,
        const std::optional<std::vector<MixedPoint>>& initial = std::nullopt)
    {
        cfg.validate();
        std::mt19937_64 rng(cfg.seed);
        MapElitesResult res{Archive(problem.grid), 0, {}};

        auto evaluate_and_insert = [&](const MixedPoint& p) {
            Evaluation e = evaluate(problem, p);
            ++res.eval_count;
            res.archive.try_insert(p, e.objective, e.features, e.constraints);
        };
        auto record = [&] { res.history.push_back({res.eval_count, res.archive.qd_score(), res.archive.niche_count()}); };

        std::vector<MixedPoint> population;
        if (initial) {
            for (const auto& p : *initial)
                if (!problem.space.contains(p))
                    throw std::invalid_argument("run_map_elites: initial point outside the search space");
            population = *initial;
        }
        else {
            population = lhs_sample(problem.space, cfg.population_size, rng());
        }
        for (const auto& p : population)
            evaluate_and_insert(p);
        record();

        const std::size_t batch = cfg.effective_batch();
        std::vector<MixedPoint> offspring;
        offspring.reserve(batch);
        for (std::size_t gen = 0; gen < cfg.generations; ++gen) {
            offspring.clear();
            if (res.archive.empty()) {
                offspring = lhs_sample(problem.space, batch, rng());
            }
            else {
                const auto& occ = res.archive.occupied();
                std::uniform_int_distribution<std::size_t> pick(0, occ.size() - 1);
                for (std::size_t k = 0; k < batch; ++k)
                    offspring.push_back(mutate(res.archive.cell(occ[pick(rng)])->point, problem.space, cfg, rng));
            }
            for (const auto& child : offspring)
                evaluate_and_insert(child);
            record();
        }
        return res;
    }

} // namespace bqd
