#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include <bqd/harness.hpp>

namespace bqd {

    /// Invalid configuration; `what()` names the offending field path.
    class ConfigError : public std::runtime_error {
    public:
        using std::runtime_error::runtime_error;
    };

    struct RunConfig {
        std::vector<ExperimentSpec> experiments;
        std::string output_dir = "results";
    };

    namespace detail {

        using json = nlohmann::json;

        inline void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> known)
        {
            for (const auto& [key, value] : obj.items()) {
                bool ok = false;
                for (const char* k : known)
                    ok = ok || key == k;
                if (!ok)
                    throw ConfigError(path + "." + key + ": unknown field");
            }
        }

        inline const json* field(const json& obj, const char* key) { return obj.contains(key) ? &obj.at(key) : nullptr; }

        inline void read_count(const json& obj, const std::string& path, const char* key, std::size_t& out)
        {
            if (const json* v = field(obj, key)) {
                if (!v->is_number_unsigned())
                    throw ConfigError(path + "." + key + ": expected a nonnegative integer");
                out = v->get<std::size_t>();
            }
        }

        inline void read_seed(const json& obj, const std::string& path, const char* key, std::uint64_t& out)
        {
            if (const json* v = field(obj, key)) {
                if (!v->is_number_unsigned())
                    throw ConfigError(path + "." + key + ": expected a nonnegative integer");
                out = v->get<std::uint64_t>();
            }
        }

        inline void read_real(const json& obj, const std::string& path, const char* key, double& out)
        {
            if (const json* v = field(obj, key)) {
                if (!v->is_number())
                    throw ConfigError(path + "." + key + ": expected a number");
                out = v->get<double>();
            }
        }

        inline void require_object(const json& v, const std::string& path)
        {
            if (!v.is_object())
                throw ConfigError(path + ": expected an object");
        }

        inline MapElitesConfig parse_map_elites(const json& j, const std::string& path, MapElitesConfig cfg)
        {
            require_object(j, path);
            reject_unknown(j, path, {"population_size", "batch_size", "generations", "mutation_prob", "mutation_sd"});
            read_count(j, path, "population_size", cfg.population_size);
            read_count(j, path, "batch_size", cfg.batch_size);
            read_count(j, path, "generations", cfg.generations);
            read_real(j, path, "mutation_prob", cfg.mutation_prob);
            read_real(j, path, "mutation_sd", cfg.mutation_sd);
            try {
                cfg.validate();
            }
            catch (const std::invalid_argument& e) {
                throw ConfigError(path + ": " + e.what());
            }
            return cfg;
        }

        inline GpFitOptions parse_gp(const json& j, const std::string& path)
        {
            GpFitOptions opt;
            require_object(j, path);
            reject_unknown(j, path, {"restarts", "max_evaluations_per_restart", "nugget"});
            read_count(j, path, "restarts", opt.restarts);
            read_count(j, path, "max_evaluations_per_restart", opt.max_evaluations_per_restart);
            read_real(j, path, "nugget", opt.nugget);
            if (opt.restarts < 1)
                throw ConfigError(path + ".restarts: must be at least 1");
            if (!(opt.nugget > 0.))
                throw ConfigError(path + ".nugget: must be positive");
            return opt;
        }

        inline BqdConfig parse_bqd(const json& j, const std::string& path)
        {
            BqdConfig cfg;
            require_object(j, path);
            reject_unknown(j, path, {"exploration_k", "ev_thresholds", "batch_p", "stagnation_iters", "initial_doe_size", "aux_solver", "gp"});
            read_real(j, path, "exploration_k", cfg.exploration_k);
            if (const json* v = field(j, "ev_thresholds")) {
                if (!v->is_array())
                    throw ConfigError(path + ".ev_thresholds: expected an array of numbers");
                for (std::size_t i = 0; i < v->size(); ++i) {
                    if (!(*v)[i].is_number())
                        throw ConfigError(path + ".ev_thresholds[" + std::to_string(i) + "]: expected a number");
                    cfg.ev_thresholds.push_back((*v)[i].get<double>());
                }
            }
            read_count(j, path, "batch_p", cfg.batch_p);
            read_count(j, path, "stagnation_iters", cfg.stagnation_iters);
            read_count(j, path, "initial_doe_size", cfg.initial_doe_size);
            if (const json* v = field(j, "aux_solver"))
                cfg.aux_solver = parse_map_elites(*v, path + ".aux_solver", cfg.aux_solver);
            if (const json* v = field(j, "gp"))
                cfg.gp = parse_gp(*v, path + ".gp");
            if (cfg.batch_p < 1)
                throw ConfigError(path + ".batch_p: must be at least 1");
            if (!(cfg.exploration_k >= 0.))
                throw ConfigError(path + ".exploration_k: must be nonnegative");
            for (double t : cfg.ev_thresholds)
                if (!(t >= 0.))
                    throw ConfigError(path + ".ev_thresholds: thresholds must be nonnegative");
            return cfg;
        }

        inline ExperimentSpec parse_experiment(const json& j, const std::string& path)
        {
            require_object(j, path);
            reject_unknown(j, path, {"suite", "algorithm", "max_evaluations", "repetitions", "base_seed", "map_elites", "bqd"});
            ExperimentSpec spec;

            const json* suite = field(j, "suite");
            if (!suite)
                throw ConfigError(path + ".suite: missing");
            if (!suite->is_string())
                throw ConfigError(path + ".suite: expected a string");
            spec.suite = suite->get<std::string>();
            if (!has_suite(spec.suite))
                throw ConfigError(path + ".suite: unknown suite '" + spec.suite + "' (expected rosenbrock, trid or styblinski)");

            const json* algo = field(j, "algorithm");
            if (!algo)
                throw ConfigError(path + ".algorithm: missing");
            auto a = algo->is_string() ? algorithm_from_string(algo->get<std::string>()) : std::nullopt;
            if (!a)
                throw ConfigError(path + ".algorithm: expected MAP_ELITES, BQD_GOWER or BQD_HYPERSPHERE");
            spec.algorithm = *a;

            read_count(j, path, "max_evaluations", spec.max_evaluations);
            read_count(j, path, "repetitions", spec.repetitions);
            read_seed(j, path, "base_seed", spec.base_seed);
            if (spec.repetitions < 1)
                throw ConfigError(path + ".repetitions: must be at least 1");
            if (const json* v = field(j, "map_elites"))
                spec.map_elites = parse_map_elites(*v, path + ".map_elites", spec.map_elites);
            if (const json* v = field(j, "bqd"))
                spec.bqd = parse_bqd(*v, path + ".bqd");

            const QdProblem problem = make_suite(spec.suite);
            const std::size_t doe = spec.bqd.doe_size(problem.space);
            if (spec.algorithm != Algorithm::map_elites) {
                if (spec.max_evaluations == 0)
                    throw ConfigError(path + ".max_evaluations: required for BQD algorithms");
                if (!spec.bqd.ev_thresholds.empty() && spec.bqd.ev_thresholds.size() != problem.n_constraints)
                    throw ConfigError(path + ".bqd.ev_thresholds: suite '" + spec.suite + "' has " + std::to_string(problem.n_constraints)
                        + " constraint(s)");
            }
            if (spec.max_evaluations > 0 && spec.max_evaluations < doe)
                throw ConfigError(path + ".max_evaluations: must be at least the initial DoE size " + std::to_string(doe));
            return spec;
        }

    } // namespace detail

    /// Parses a JSON run configuration; unspecified fields take the
    /// library defaults.
    inline RunConfig parse_run_config(const std::string& text)
    {
        detail::json j;
        try {
            j = detail::json::parse(text);
        }
        catch (const detail::json::parse_error& e) {
            throw ConfigError(std::string("syntax error: ") + e.what());
        }
        RunConfig cfg;
        detail::require_object(j, "$");
        detail::reject_unknown(j, "$", {"output_dir", "experiments"});
        if (const auto* v = detail::field(j, "output_dir")) {
            if (!v->is_string())
                throw ConfigError("$.output_dir: expected a string");
            cfg.output_dir = v->get<std::string>();
        }
        const auto* ex = detail::field(j, "experiments");
        if (!ex)
            throw ConfigError("$.experiments: missing");
        if (!ex->is_array() || ex->empty())
            throw ConfigError("$.experiments: expected a non-empty array");
        for (std::size_t i = 0; i < ex->size(); ++i)
            cfg.experiments.push_back(detail::parse_experiment((*ex)[i], "$.experiments[" + std::to_string(i) + "]"));
        return cfg;
    }

    inline RunConfig load_run_config(const std::string& path)
    {
        std::ifstream f(path, std::ios::binary);
        if (!f)
            throw ConfigError(path + ": cannot open");
        std::ostringstream ss;
        ss << f.rdbuf();
        return parse_run_config(ss.str());
    }

} // namespace bqd
