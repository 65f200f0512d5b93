#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <bqd/archive.hpp>
#include <bqd/gp.hpp>
#include <bqd/map_elites.hpp>
#include <bqd/problem.hpp>
#include <bqd/sobol.hpp>
#include <bqd/space.hpp>

namespace bqd {

    inline double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2. * std::numbers::pi); }
    inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

    /// Lower confidence bound: posterior mean minus k posterior deviations.
    inline double lcb(const GpModel& gp, const MixedPoint& p, double k)
    {
        Prediction pr = gp.predict(p);
        return pr.mean - k * pr.sd;
    }

    /// E[max(G, 0)] for G ~ N(mean, sd^2).
    inline double expected_violation(double mean, double sd)
    {
        if (sd < 1e-12)
            return std::max(mean, 0.);
        const double z = mean / sd;
        return std::max(0., mean * normal_cdf(z) + sd * normal_pdf(z));
    }

    inline double expected_violation(const GpModel& gp, const MixedPoint& p)
    {
        Prediction pr = gp.predict(p);
        return expected_violation(pr.mean, pr.sd);
    }

    struct BqdConfig {
        KernelMode kernel_mode = KernelMode::gower;
        double exploration_k = 2.;
        /// Per-constraint expected-violation threshold; empty means 1e-4 each.
        std::vector<double> ev_thresholds;
        std::size_t batch_p = 10;
        std::size_t max_evaluations = 0;
        std::size_t stagnation_iters = 10;
        /// 0 means 10 x (number of design variables).
        std::size_t initial_doe_size = 0;
        MapElitesConfig aux_solver{};
        GpFitOptions gp{};
        std::uint64_t seed = 0;

        std::size_t doe_size(const MixedSpace& space) const
        {
            return initial_doe_size > 0 ? initial_doe_size : 10 * (space.dim_continuous() + space.dim_levels());
        }

        std::vector<double> thresholds(std::size_t n_constraints) const
        {
            if (ev_thresholds.empty())
                return std::vector<double>(n_constraints, 1e-4);
            if (ev_thresholds.size() != n_constraints)
                throw std::invalid_argument("BqdConfig: one expected-violation threshold per constraint is required");
            return ev_thresholds;
        }

        void validate(const MixedSpace& space, std::size_t n_constraints) const
        {
            if (batch_p < 1)
                throw std::invalid_argument("BqdConfig: batch_p must be at least 1");
            if (max_evaluations < doe_size(space))
                throw std::invalid_argument("BqdConfig: max_evaluations must cover the initial DoE");
            if (!(exploration_k >= 0.))
                throw std::invalid_argument("BqdConfig: exploration_k must be nonnegative");
            for (double t : thresholds(n_constraints))
                if (!(t >= 0.))
                    throw std::invalid_argument("BqdConfig: thresholds must be nonnegative");
            aux_solver.validate();
        }
    };

    /// Surrogates of every function of a problem, trained on the same inputs.
    struct SurrogateSet {
        std::shared_ptr<const GpModel> objective;
        std::vector<std::shared_ptr<const GpModel>> features;
        std::vector<std::shared_ptr<const GpModel>> constraints;
    };

    /// Infill problem on the surrogates: minimize LCB subject to
    /// EV_i - t_i <= 0, binned by the posterior means of the features.
    inline QdProblem build_auxiliary_problem(const SurrogateSet& gps, const QdProblem& exact, double k, const std::vector<double>& thresholds)
    {
        if (!gps.objective || gps.features.size() != exact.n_features || gps.constraints.size() != exact.n_constraints
            || thresholds.size() != exact.n_constraints)
            throw std::invalid_argument("build_auxiliary_problem: surrogate count does not match the problem");
        const std::size_t m = gps.objective->size();
        auto check = [&](const std::shared_ptr<const GpModel>& g) {
            if (!g || g->size() != m || !(g->space() == exact.space))
                throw std::invalid_argument("build_auxiliary_problem: surrogates must share the training set and space");
        };
        for (const auto& g : gps.features)
            check(g);
        for (const auto& g : gps.constraints)
            check(g);

        QdProblem aux;
        aux.name = exact.name + "/auxiliary";
        aux.space = exact.space;
        aux.grid = exact.grid;
        aux.n_features = exact.n_features;
        aux.n_constraints = exact.n_constraints;
        aux.objective = [obj = gps.objective, k](const MixedPoint& p) { return lcb(*obj, p, k); };
        aux.features = [fs = gps.features](const MixedPoint& p) {
            std::vector<double> out;
            out.reserve(fs.size());
            for (const auto& g : fs)
                out.push_back(g->predict_mean(p));
            return out;
        };
        aux.constraints = [gs = gps.constraints, thresholds](const MixedPoint& p) {
            std::vector<double> out;
            out.reserve(gs.size());
            for (std::size_t i = 0; i < gs.size(); ++i)
                out.push_back(expected_violation(*gs[i], p) - thresholds[i]);
            return out;
        };
        return aux;
    }

    /// Picks up to p elites spread over the feature space: each Sobol' point
    /// (features rescaled to [0,1] per axis) claims its nearest occupied bin
    /// center; already-claimed bins are skipped. `offset` is the number of
    /// leading sequence points to skip.
    inline std::vector<MixedPoint> select_elites_sobol(const Archive& archive, std::size_t p, std::uint64_t offset = 0,
        std::uint64_t* consumed = nullptr)
    {
        if (p < 1)
            throw std::invalid_argument("select_elites_sobol: p must be at least 1");
        std::vector<MixedPoint> out;
        if (archive.empty())
            return out;

        const FeatureGrid& grid = archive.grid();
        const std::size_t n = grid.dim();
        // occupied bins in bin order, with their centers in unit coordinates
        std::vector<std::size_t> bins;
        std::vector<std::vector<double>> centers;
        for (std::size_t idx = 0; idx < grid.total_bins(); ++idx) {
            if (!archive.cell(idx))
                continue;
            auto c = grid.bin_center(grid.bin_from_linear(idx));
            for (std::size_t j = 0; j < n; ++j) {
                const auto& e = grid.edges()[j];
                c[j] = (c[j] - e.front()) / (e.back() - e.front());
            }
            bins.push_back(idx);
            centers.push_back(std::move(c));
        }

        const std::size_t want = std::min(p, bins.size());
        std::vector<bool> taken(bins.size(), false);
        SobolSequence seq(n);
        std::uint64_t i = offset;
        const std::uint64_t cap = offset + (1u << 20);
        for (; out.size() < want && i < cap; ++i) {
            auto s = seq.point(i);
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t b = 0; b < bins.size(); ++b) {
                double d = 0.;
                for (std::size_t j = 0; j < n; ++j)
                    d += (s[j] - centers[b][j]) * (s[j] - centers[b][j]);
                if (d < best_d) {
                    best_d = d;
                    best = b;
                }
            }
            if (taken[best])
                continue;
            taken[best] = true;
            out.push_back(archive.cell(bins[best])->point);
        }
        for (std::size_t b = 0; b < bins.size() && out.size() < want; ++b)
            if (!taken[b])
                out.push_back(archive.cell(bins[b])->point);
        if (consumed)
            *consumed = i - offset;
        return out;
    }

    /// Exactly evaluated design of experiments.
    struct Doe {
        std::vector<MixedPoint> inputs;
        std::vector<double> objective;
        std::vector<std::vector<double>> features;     // [feature][sample]
        std::vector<std::vector<double>> constraints;  // [constraint][sample]

        void append(const MixedPoint& p, const Evaluation& e)
        {
            inputs.push_back(p);
            objective.push_back(e.objective);
            for (std::size_t j = 0; j < features.size(); ++j)
                features[j].push_back(e.features[j]);
            for (std::size_t i = 0; i < constraints.size(); ++i)
                constraints[i].push_back(e.constraints[i]);
        }
    };

    struct BqdResult {
        Archive archive;
        /// After the DoE, then after each evaluated batch.
        std::vector<HistoryRow> history;
        std::size_t eval_count = 0;
        std::size_t iterations = 0;
        /// Iterations whose surrogate step failed and used random candidates.
        std::size_t fallbacks = 0;
        bool stagnated = false;
        Doe doe;
    };

    namespace detail {
        inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b)
        {
            std::uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 1);
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
            return z ^ (z >> 31);
        }
    } // namespace detail

    /// Trains one surrogate per function on the DoE.
    inline SurrogateSet fit_surrogates(const MixedSpace& space, const Doe& doe, KernelMode mode, std::uint64_t seed, const GpFitOptions& opt)
    {
        SurrogateSet s;
        std::uint64_t k = 0;
        s.objective = std::make_shared<const GpModel>(GpModel::fit(space, doe.inputs, doe.objective, mode, detail::mix_seed(seed, k++), opt));
        for (const auto& f : doe.features)
            s.features.push_back(std::make_shared<const GpModel>(GpModel::fit(space, doe.inputs, f, mode, detail::mix_seed(seed, k++), opt)));
        for (const auto& g : doe.constraints)
            s.constraints.push_back(std::make_shared<const GpModel>(GpModel::fit(space, doe.inputs, g, mode, detail::mix_seed(seed, k++), opt)));
        return s;
    }

    /// Surrogate-assisted quality-diversity loop.
    ///
    /// An LHS DoE is evaluated exactly and seeds the exact archive. Each
    /// iteration fits GPs for the objective, features and constraints, runs
    /// MAP-Elites on the infill problem, evaluates up to batch_p Sobol'-spread
    /// elites of that surrogate archive exactly and offers them to the exact
    /// archive. Stops on budget or after stagnation_iters iterations without
    /// a new or improved exact elite.
    inline BqdResult run_bqd(const QdProblem& problem, const BqdConfig& cfg)
    {
        cfg.validate(problem.space, problem.n_constraints);
        const auto thresholds = cfg.thresholds(problem.n_constraints);
        const std::size_t doe_size = cfg.doe_size(problem.space);

        BqdResult res;
        res.archive = Archive(problem.grid);
        res.doe.features.resize(problem.n_features);
        res.doe.constraints.resize(problem.n_constraints);

        auto evaluate_exact = [&](const MixedPoint& p) {
            Evaluation e = evaluate(problem, p);
            ++res.eval_count;
            res.doe.append(p, e);
            return res.archive.try_insert(p, e.objective, e.features, e.constraints);
        };
        auto record = [&] { res.history.push_back({res.eval_count, res.archive.qd_score(), res.archive.niche_count()}); };

        for (const auto& p : lhs_sample(problem.space, doe_size, cfg.seed))
            evaluate_exact(p);
        record();

        std::uint64_t sobol_cursor = 0;
        std::size_t quiet = 0;
        while (res.eval_count < cfg.max_evaluations) {
            if (quiet >= cfg.stagnation_iters) {
                res.stagnated = true;
                break;
            }
            const std::uint64_t iter_seed = detail::mix_seed(cfg.seed, 1000 + res.iterations);
            const std::size_t p = std::min(cfg.batch_p, cfg.max_evaluations - res.eval_count);

            std::vector<MixedPoint> candidates;
            try {
                SurrogateSet gps = fit_surrogates(problem.space, res.doe, cfg.kernel_mode, iter_seed, cfg.gp);
                QdProblem aux = build_auxiliary_problem(gps, problem, cfg.exploration_k, thresholds);
                MapElitesConfig aux_cfg = cfg.aux_solver;
                aux_cfg.seed = detail::mix_seed(iter_seed, 7);
                MapElitesResult aux_run = run_map_elites(aux, aux_cfg);
                std::uint64_t used = 0;
                candidates = select_elites_sobol(aux_run.archive, p, sobol_cursor, &used);
                sobol_cursor += used;
            }
            catch (const FactorizationError&) {
                candidates.clear();
            }
            if (candidates.empty()) {
                ++res.fallbacks;
                candidates = lhs_sample(problem.space, p, detail::mix_seed(iter_seed, 13));
            }

            bool improved = false;
            for (const auto& c : candidates)
                improved = accepted(evaluate_exact(c)) || improved;
            ++res.iterations;
            quiet = improved ? 0 : quiet + 1;
            record();
        }
        return res;
    }

} // namespace bqd
