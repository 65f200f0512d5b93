#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <thread>
#include <vector>

#include <bqd/archive.hpp>
#include <bqd/bayesian_qd.hpp>
#include <bqd/benchmarks.hpp>
#include <bqd/map_elites.hpp>
#include <bqd/problem.hpp>

namespace bqd {

    enum class Algorithm { map_elites, bqd_gower, bqd_hypersphere };

    inline std::string to_string(Algorithm a)
    {
        switch (a) {
        case Algorithm::map_elites: return "MAP_ELITES";
        case Algorithm::bqd_gower: return "BQD_GOWER";
        case Algorithm::bqd_hypersphere: return "BQD_HYPERSPHERE";
        }
        return "?";
    }

    inline std::optional<Algorithm> algorithm_from_string(const std::string& s)
    {
        for (Algorithm a : {Algorithm::map_elites, Algorithm::bqd_gower, Algorithm::bqd_hypersphere})
            if (to_string(a) == s)
                return a;
        return std::nullopt;
    }

    struct ExperimentSpec {
        std::string suite;
        Algorithm algorithm = Algorithm::map_elites;
        /// Exact-evaluation budget. For MAP-Elites, 0 means "run all
        /// configured generations"; otherwise generations stop at the budget.
        std::size_t max_evaluations = 0;
        MapElitesConfig map_elites{};
        /// Also supplies the initial DoE size shared with MAP-Elites.
        BqdConfig bqd{};
        std::size_t repetitions = 10;
        std::uint64_t base_seed = 0;

        void validate() const
        {
            if (repetitions < 1)
                throw std::invalid_argument("ExperimentSpec: repetitions must be at least 1");
            if (!has_suite(suite))
                throw std::invalid_argument("ExperimentSpec: unknown suite '" + suite + "'");
        }
    };

    struct RepetitionResult {
        std::size_t repetition = 0;
        std::uint64_t seed = 0;
        std::vector<HistoryRow> history;
        Archive archive;
        std::size_t eval_count = 0;
    };

    struct AggregateRow {
        std::size_t evals = 0;
        double median_qd = 0., q25_qd = 0., q75_qd = 0.;
        double median_niches = 0., q25_niches = 0., q75_niches = 0.;
    };

    struct ConvergenceSeries {
        std::string suite;
        Algorithm algorithm = Algorithm::map_elites;
        std::vector<RepetitionResult> runs;
        std::vector<AggregateRow> aggregate;
    };

    class ExperimentError : public std::runtime_error {
    public:
        ExperimentError(const std::string& what, std::vector<std::size_t> completed)
            : std::runtime_error(what), _completed(std::move(completed)) {}
        const std::vector<std::size_t>& completed() const { return _completed; }

    private:
        std::vector<std::size_t> _completed;
    };

    /// Linear-interpolation quantile (h = (n-1)q).
    inline double quantile(std::vector<double> values, double q)
    {
        if (values.empty())
            throw std::invalid_argument("quantile: no values");
        if (!(q >= 0. && q <= 1.))
            throw std::invalid_argument("quantile: q must be in [0, 1]");
        std::sort(values.begin(), values.end());
        const double h = (static_cast<double>(values.size()) - 1.) * q;
        const auto lo = static_cast<std::size_t>(std::floor(h));
        const std::size_t hi = std::min(lo + 1, values.size() - 1);
        return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
    }

    /// Last row with evals <= at; nullopt when the history starts later.
    inline std::optional<HistoryRow> value_at(const std::vector<HistoryRow>& history, std::size_t at)
    {
        auto it = std::upper_bound(history.begin(), history.end(), at, [](std::size_t v, const HistoryRow& r) { return v < r.evals; });
        if (it == history.begin())
            return std::nullopt;
        return *std::prev(it);
    }

    /// Union of recorded eval counts from the latest first record onward,
    /// so every repetition has a value at every checkpoint.
    inline std::vector<std::size_t> common_checkpoints(const std::vector<std::vector<HistoryRow>>& histories)
    {
        std::size_t start = 0;
        for (const auto& h : histories) {
            if (h.empty())
                throw std::invalid_argument("common_checkpoints: empty history");
            start = std::max(start, h.front().evals);
        }
        std::vector<std::size_t> cp;
        for (const auto& h : histories)
            for (const auto& r : h)
                if (r.evals >= start)
                    cp.push_back(r.evals);
        std::sort(cp.begin(), cp.end());
        cp.erase(std::unique(cp.begin(), cp.end()), cp.end());
        return cp;
    }

    /// Median and quartiles per checkpoint, histories aligned as step functions.
    inline std::vector<AggregateRow> aggregate_quantiles(const std::vector<std::vector<HistoryRow>>& histories,
        const std::vector<std::size_t>& checkpoints)
    {
        if (histories.empty())
            throw std::invalid_argument("aggregate_quantiles: at least one repetition is required");
        std::vector<AggregateRow> out;
        out.reserve(checkpoints.size());
        std::vector<double> qd(histories.size()), niches(histories.size());
        for (std::size_t c : checkpoints) {
            for (std::size_t r = 0; r < histories.size(); ++r) {
                auto v = value_at(histories[r], c);
                if (!v)
                    throw std::invalid_argument("aggregate_quantiles: checkpoint precedes a repetition's first record");
                qd[r] = v->qd_score;
                niches[r] = static_cast<double>(v->niche_count);
            }
            out.push_back({c, quantile(qd, 0.5), quantile(qd, 0.25), quantile(qd, 0.75), quantile(niches, 0.5),
                quantile(niches, 0.25), quantile(niches, 0.75)});
        }
        return out;
    }

    /// One repetition with the given seed; the LHS initial samples depend
    /// only on the seed, the suite and the DoE size.
    inline RepetitionResult run_repetition(const ExperimentSpec& spec, const QdProblem& problem, std::uint64_t seed)
    {
        RepetitionResult rr;
        rr.seed = seed;
        if (spec.algorithm == Algorithm::map_elites) {
            MapElitesConfig cfg = spec.map_elites;
            cfg.seed = seed;
            const std::size_t init = spec.bqd.doe_size(problem.space);
            if (spec.max_evaluations > 0) {
                if (spec.max_evaluations < init)
                    throw std::invalid_argument("ExperimentSpec: max_evaluations must cover the initial samples");
                cfg.generations = (spec.max_evaluations - init) / cfg.effective_batch();
            }
            auto res = run_map_elites(problem, cfg, lhs_sample(problem.space, init, seed));
            rr.history = std::move(res.history);
            rr.archive = std::move(res.archive);
            rr.eval_count = res.eval_count;
        }
        else {
            BqdConfig cfg = spec.bqd;
            cfg.seed = seed;
            cfg.kernel_mode = spec.algorithm == Algorithm::bqd_gower ? KernelMode::gower : KernelMode::hypersphere;
            if (spec.max_evaluations > 0)
                cfg.max_evaluations = spec.max_evaluations;
            auto res = run_bqd(problem, cfg);
            rr.history = std::move(res.history);
            rr.archive = std::move(res.archive);
            rr.eval_count = res.eval_count;
        }
        return rr;
    }

    /// Runs every repetition (seed = base_seed + r) on up to `threads`
    /// workers, then aggregates. 0 threads means hardware concurrency.
    inline ConvergenceSeries run_experiment(const ExperimentSpec& spec, unsigned threads = 0)
    {
        spec.validate();
        const QdProblem problem = make_suite(spec.suite);
        if (threads == 0)
            threads = std::max(1u, std::thread::hardware_concurrency());
        threads = static_cast<unsigned>(std::min<std::size_t>(threads, spec.repetitions));

        std::vector<std::optional<RepetitionResult>> results(spec.repetitions);
        std::vector<std::string> errors(spec.repetitions);
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t r; (r = next.fetch_add(1)) < spec.repetitions;) {
                try {
                    auto rr = run_repetition(spec, problem, spec.base_seed + r);
                    rr.repetition = r;
                    results[r] = std::move(rr);
                }
                catch (const std::exception& e) {
                    errors[r] = e.what();
                }
            }
        };
        if (threads <= 1) {
            worker();
        }
        else {
            std::vector<std::thread> pool;
            for (unsigned t = 0; t < threads; ++t)
                pool.emplace_back(worker);
            for (auto& t : pool)
                t.join();
        }

        std::vector<std::size_t> completed;
        std::string report;
        for (std::size_t r = 0; r < spec.repetitions; ++r) {
            if (results[r])
                completed.push_back(r);
            else
                report += "\n  repetition " + std::to_string(r) + ": " + errors[r];
        }
        if (completed.size() != spec.repetitions)
            throw ExperimentError(to_string(spec.algorithm) + " on " + spec.suite + ": " + std::to_string(completed.size()) + "/"
                    + std::to_string(spec.repetitions) + " repetitions completed" + report,
                completed);

        ConvergenceSeries s;
        s.suite = spec.suite;
        s.algorithm = spec.algorithm;
        std::vector<std::vector<HistoryRow>> histories;
        for (auto& r : results) {
            histories.push_back(r->history);
            s.runs.push_back(std::move(*r));
        }
        s.aggregate = aggregate_quantiles(histories, common_checkpoints(histories));
        return s;
    }

    /// Shortest round-trip decimal, locale independent.
    inline std::string format_number(double v)
    {
        char buf[64];
        auto res = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, res.ptr);
    }

    inline void write_runs_csv(std::ostream& os, const ConvergenceSeries& s)
    {
        os << "algorithm,suite,repetition,evals,qd_score,niche_count\n";
        for (const auto& r : s.runs)
            for (const auto& h : r.history)
                os << to_string(s.algorithm) << ',' << s.suite << ',' << r.repetition << ',' << h.evals << ','
                   << format_number(h.qd_score) << ',' << h.niche_count << '\n';
    }

    inline void write_aggregate_csv(std::ostream& os, const ConvergenceSeries& s)
    {
        os << "algorithm,suite,evals,median_qd,q25_qd,q75_qd,median_niches,q25_niches,q75_niches\n";
        for (const auto& a : s.aggregate)
            os << to_string(s.algorithm) << ',' << s.suite << ',' << a.evals << ',' << format_number(a.median_qd) << ','
               << format_number(a.q25_qd) << ',' << format_number(a.q75_qd) << ',' << format_number(a.median_niches) << ','
               << format_number(a.q25_niches) << ',' << format_number(a.q75_niches) << '\n';
    }

    /// Writes to a sibling temporary and renames it into place.
    inline void write_file_atomic(const std::filesystem::path& path, const std::string& content)
    {
        auto tmp = path;
        tmp += ".tmp";
        {
            std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
            if (!f)
                throw std::runtime_error("cannot open " + tmp.string() + " for writing");
            f << content;
            f.flush();
            if (!f)
                throw std::runtime_error("write failed for " + tmp.string());
        }
        std::error_code ec;
        std::filesystem::rename(tmp, path, ec);
        if (ec) {
            std::filesystem::remove(tmp);
            throw std::runtime_error("cannot rename " + tmp.string() + ": " + ec.message());
        }
    }

} // namespace bqd
