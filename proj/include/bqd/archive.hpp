#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <json.hpp>

#include <bqd/space.hpp>

namespace bqd {

    /// Hyper-rectangular discretization of the feature space. Bins are
    /// half-open [e_i, e_{i+1}), except the last one per axis which is closed.
    class FeatureGrid {
    public:
        FeatureGrid() = default;

        explicit FeatureGrid(std::vector<std::vector<double>> edges) : _edges(std::move(edges))
        {
            if (_edges.empty())
                throw std::invalid_argument("FeatureGrid: at least one feature axis is required");
            for (const auto& e : _edges) {
                if (e.size() < 2)
                    throw std::invalid_argument("FeatureGrid: each axis needs at least two edges");
                for (std::size_t i = 1; i < e.size(); ++i)
                    if (!(e[i - 1] < e[i]))
                        throw std::invalid_argument("FeatureGrid: edges must be strictly increasing");
            }
        }

        std::size_t dim() const { return _edges.size(); }
        const std::vector<std::vector<double>>& edges() const { return _edges; }
        std::size_t bins_along(std::size_t j) const { return _edges[j].size() - 1; }

        std::size_t total_bins() const
        {
            std::size_t n = 1;
            for (const auto& e : _edges)
                n *= e.size() - 1;
            return n;
        }

        /// Bin index per feature, or nullopt when outside the grid.
        std::optional<std::vector<int>> bin_index(const std::vector<double>& features) const
        {
            if (features.size() != _edges.size())
                throw std::invalid_argument("FeatureGrid::bin_index: feature count does not match the grid");
            std::vector<int> bin(features.size());
            for (std::size_t j = 0; j < features.size(); ++j) {
                const auto& e = _edges[j];
                const double f = features[j];
                if (!(f >= e.front() && f <= e.back()))
                    return std::nullopt;
                auto it = std::upper_bound(e.begin(), e.end(), f);
                auto i = static_cast<int>(it - e.begin()) - 1;
                bin[j] = std::min(i, static_cast<int>(e.size()) - 2);
            }
            return bin;
        }

        /// Row-major flat index of a bin (last feature varies fastest).
        std::size_t linear_index(const std::vector<int>& bin) const
        {
            std::size_t idx = 0;
            for (std::size_t j = 0; j < bin.size(); ++j)
                idx = idx * bins_along(j) + static_cast<std::size_t>(bin[j]);
            return idx;
        }

        std::vector<int> bin_from_linear(std::size_t idx) const
        {
            std::vector<int> bin(dim());
            for (std::size_t j = dim(); j-- > 0;) {
                bin[j] = static_cast<int>(idx % bins_along(j));
                idx /= bins_along(j);
            }
            return bin;
        }

        std::vector<double> bin_center(const std::vector<int>& bin) const
        {
            std::vector<double> c(dim());
            for (std::size_t j = 0; j < dim(); ++j)
                c[j] = 0.5 * (_edges[j][bin[j]] + _edges[j][bin[j] + 1]);
            return c;
        }

        friend bool operator==(const FeatureGrid&, const FeatureGrid&) = default;

    private:
        std::vector<std::vector<double>> _edges;
    };

    struct ArchiveEntry {
        MixedPoint point;
        double objective = 0.;
        std::vector<double> features;
        std::vector<double> constraints;
        std::vector<int> bin;

        friend bool operator==(const ArchiveEntry&, const ArchiveEntry&) = default;
    };

    enum class InsertOutcome { reject_infeasible, reject_out_of_grid, reject_worse, new_niche, improved };

    inline bool accepted(InsertOutcome o) { return o == InsertOutcome::new_niche || o == InsertOutcome::improved; }

    inline bool feasible(const std::vector<double>& constraints)
    {
        return std::all_of(constraints.begin(), constraints.end(), [](double g) { return g <= 0.; });
    }

    /// Niche archive: at most one feasible elite per grid bin.
    class Archive {
    public:
        Archive() = default;
        explicit Archive(FeatureGrid grid) : _grid(std::move(grid)), _cells(_grid.total_bins()) {}

        const FeatureGrid& grid() const { return _grid; }

        /// Constraint-dominance insertion: feasible first, then the lower
        /// objective wins the bin. Ties replace the incumbent.
        InsertOutcome try_insert(const MixedPoint& point, double objective, const std::vector<double>& features,
            const std::vector<double>& constraints)
        {
            if (!feasible(constraints) || std::isnan(objective))
                return InsertOutcome::reject_infeasible;
            auto bin = _grid.bin_index(features);
            if (!bin)
                return InsertOutcome::reject_out_of_grid;
            const std::size_t idx = _grid.linear_index(*bin);
            auto& cell = _cells[idx];
            InsertOutcome outcome = InsertOutcome::new_niche;
            if (cell) {
                if (cell->objective < objective)
                    return InsertOutcome::reject_worse;
                outcome = InsertOutcome::improved;
            }
            else {
                _occupied.push_back(idx);
            }
            cell = ArchiveEntry{point, objective, features, constraints, std::move(*bin)};
            return outcome;
        }

        std::size_t niche_count() const { return _occupied.size(); }
        bool empty() const { return _occupied.empty(); }

        /// Sum of elite objectives, accumulated in bin order.
        double qd_score() const
        {
            double s = 0.;
            for (const auto& c : _cells)
                if (c)
                    s += c->objective;
            return s;
        }

        /// qd_score divided by the total bin count.
        double normalized_qd_score() const { return qd_score() / static_cast<double>(_grid.total_bins()); }

        const std::optional<ArchiveEntry>& cell(std::size_t linear) const { return _cells.at(linear); }
        const std::optional<ArchiveEntry>& cell(const std::vector<int>& bin) const { return _cells.at(_grid.linear_index(bin)); }

        /// Occupied linear indices in order of first occupation.
        const std::vector<std::size_t>& occupied() const { return _occupied; }

        /// Entries in bin order.
        std::vector<const ArchiveEntry*> entries() const
        {
            std::vector<const ArchiveEntry*> out;
            out.reserve(_occupied.size());
            for (const auto& c : _cells)
                if (c)
                    out.push_back(&*c);
            return out;
        }

        /// Same grid and same elite in every bin.
        friend bool operator==(const Archive& a, const Archive& b) { return a._grid == b._grid && a._cells == b._cells; }

    private:
        FeatureGrid _grid;
        std::vector<std::optional<ArchiveEntry>> _cells;
        std::vector<std::size_t> _occupied;
    };

    inline nlohmann::json to_json(const MixedPoint& p)
    {
        return {{"continuous", p.continuous}, {"discrete", p.discrete}, {"categorical", p.categorical}};
    }

    /// {grid: {edges}, cells: [{bin, point, objective, features, constraints}]}
    inline nlohmann::json to_json(const Archive& a)
    {
        nlohmann::json cells = nlohmann::json::array();
        for (const auto* e : a.entries())
            cells.push_back({{"bin", e->bin}, {"point", to_json(e->point)}, {"objective", e->objective}, {"features", e->features},
                {"constraints", e->constraints}});
        return {{"grid", {{"edges", a.grid().edges()}}}, {"qd_score", a.qd_score()},
            {"normalized_qd_score", a.normalized_qd_score()}, {"niche_count", a.niche_count()}, {"cells", cells}};
    }

    inline Archive archive_from_json(const nlohmann::json& j)
    {
        Archive a(FeatureGrid(j.at("grid").at("edges").get<std::vector<std::vector<double>>>()));
        for (const auto& c : j.at("cells")) {
            MixedPoint p;
            p.continuous = c.at("point").at("continuous").get<std::vector<double>>();
            p.discrete = c.at("point").at("discrete").get<std::vector<int>>();
            p.categorical = c.at("point").at("categorical").get<std::vector<int>>();
            a.try_insert(p, c.at("objective").get<double>(), c.at("features").get<std::vector<double>>(),
                c.at("constraints").get<std::vector<double>>());
        }
        return a;
    }

} // namespace bqd
