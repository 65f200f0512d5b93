#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bqd {

    /// One candidate design: continuous coordinates plus level indices for the
    /// discrete and categorical variables.
    struct MixedPoint {
        std::vector<double> continuous;
        std::vector<int> discrete;
        std::vector<int> categorical;

        friend bool operator==(const MixedPoint&, const MixedPoint&) = default;
    };

    struct Bounds {
        double lower = 0.;
        double upper = 1.;
    };

    /// Search domain for mixed problems.
    ///
    /// Discrete variables carry their ordered real level values; categorical
    /// variables only a level count. Both are addressed by level index in a
    /// MixedPoint.
    class MixedSpace {
    public:
        MixedSpace() = default;

        MixedSpace(std::vector<Bounds> continuous_bounds,
            std::vector<std::vector<double>> discrete_levels = {},
            std::vector<int> categorical_levels = {})
            : _continuous(std::move(continuous_bounds)), _discrete(std::move(discrete_levels)), _categorical(std::move(categorical_levels))
        {
            for (const auto& b : _continuous)
                if (!(b.lower < b.upper))
                    throw std::invalid_argument("MixedSpace: continuous bounds require lower < upper");
            for (const auto& levels : _discrete) {
                if (levels.empty())
                    throw std::invalid_argument("MixedSpace: discrete variable without levels");
                for (std::size_t i = 1; i < levels.size(); ++i)
                    if (!(levels[i - 1] < levels[i]))
                        throw std::invalid_argument("MixedSpace: discrete levels must be strictly increasing");
            }
            for (int count : _categorical)
                if (count < 1)
                    throw std::invalid_argument("MixedSpace: categorical variable without levels");
        }

        std::size_t dim_continuous() const { return _continuous.size(); }
        std::size_t dim_discrete() const { return _discrete.size(); }
        std::size_t dim_categorical() const { return _categorical.size(); }
        /// Number of discrete plus categorical variables.
        std::size_t dim_levels() const { return _discrete.size() + _categorical.size(); }

        const std::vector<Bounds>& continuous_bounds() const { return _continuous; }
        const std::vector<std::vector<double>>& discrete_levels() const { return _discrete; }
        const std::vector<int>& categorical_levels() const { return _categorical; }

        /// Level count of the i-th discrete/categorical variable, discrete first.
        int level_count(std::size_t i) const
        {
            return i < _discrete.size() ? static_cast<int>(_discrete[i].size()) : _categorical[i - _discrete.size()];
        }

        /// Level index of the i-th discrete/categorical variable of p, discrete first.
        static int level_of(const MixedPoint& p, std::size_t i)
        {
            return i < p.discrete.size() ? p.discrete[i] : p.categorical[i - p.discrete.size()];
        }

        static int& level_of(MixedPoint& p, std::size_t i)
        {
            return i < p.discrete.size() ? p.discrete[i] : p.categorical[i - p.discrete.size()];
        }

        bool contains(const MixedPoint& p) const
        {
            if (p.continuous.size() != _continuous.size() || p.discrete.size() != _discrete.size() || p.categorical.size() != _categorical.size())
                return false;
            for (std::size_t i = 0; i < _continuous.size(); ++i)
                if (!(p.continuous[i] >= _continuous[i].lower && p.continuous[i] <= _continuous[i].upper))
                    return false;
            for (std::size_t i = 0; i < dim_levels(); ++i) {
                int l = level_of(p, i);
                if (l < 0 || l >= level_count(i))
                    return false;
            }
            return true;
        }

        void check_dimensions(const MixedPoint& p) const
        {
            if (p.continuous.size() != _continuous.size() || p.discrete.size() != _discrete.size() || p.categorical.size() != _categorical.size())
                throw std::invalid_argument("MixedPoint dimensions do not match the space");
        }

        friend bool operator==(const MixedSpace& a, const MixedSpace& b)
        {
            auto same_bounds = std::equal(a._continuous.begin(), a._continuous.end(), b._continuous.begin(), b._continuous.end(),
                [](const Bounds& x, const Bounds& y) { return x.lower == y.lower && x.upper == y.upper; });
            return same_bounds && a._discrete == b._discrete && a._categorical == b._categorical;
        }

    private:
        std::vector<Bounds> _continuous;
        std::vector<std::vector<double>> _discrete;
        std::vector<int> _categorical;
    };

    /// Maps continuous coordinates affinely onto [0,1]; level indices are untouched.
    inline MixedPoint normalize(const MixedSpace& space, const MixedPoint& p)
    {
        space.check_dimensions(p);
        MixedPoint out = p;
        const auto& b = space.continuous_bounds();
        for (std::size_t i = 0; i < b.size(); ++i)
            out.continuous[i] = (p.continuous[i] - b[i].lower) / (b[i].upper - b[i].lower);
        return out;
    }

    inline MixedPoint denormalize(const MixedSpace& space, const MixedPoint& p)
    {
        space.check_dimensions(p);
        MixedPoint out = p;
        const auto& b = space.continuous_bounds();
        for (std::size_t i = 0; i < b.size(); ++i) {
            // endpoints are reproduced exactly
            double u = p.continuous[i];
            out.continuous[i] = u >= 1. ? b[i].upper : (u <= 0. ? b[i].lower : b[i].lower + u * (b[i].upper - b[i].lower));
        }
        return out;
    }

    inline double normalize_coordinate(const MixedSpace& space, std::size_t i, double x)
    {
        const auto& b = space.continuous_bounds()[i];
        return (x - b.lower) / (b.upper - b.lower);
    }

    /// Latin hypercube over the continuous coordinates; levels drawn uniformly.
    ///
    /// Every continuous axis is cut into m strata of equal width and each
    /// stratum receives exactly one point, jittered uniformly inside it.
    inline std::vector<MixedPoint> lhs_sample(const MixedSpace& space, std::size_t m, std::uint64_t seed)
    {
        if (m < 1)
            throw std::invalid_argument("lhs_sample: m must be at least 1");

        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> unif(0., 1.);

        std::vector<MixedPoint> pts(m);
        for (auto& p : pts) {
            p.continuous.resize(space.dim_continuous());
            p.discrete.resize(space.dim_discrete());
            p.categorical.resize(space.dim_categorical());
        }

        std::vector<std::size_t> perm(m);
        const auto& bounds = space.continuous_bounds();
        for (std::size_t d = 0; d < bounds.size(); ++d) {
            std::iota(perm.begin(), perm.end(), 0);
            std::shuffle(perm.begin(), perm.end(), rng);
            const double width = bounds[d].upper - bounds[d].lower;
            for (std::size_t k = 0; k < m; ++k) {
                double u = (static_cast<double>(perm[k]) + unif(rng)) / static_cast<double>(m);
                double x = bounds[d].lower + u * width;
                pts[k].continuous[d] = std::min(x, bounds[d].upper);
            }
        }

        for (std::size_t i = 0; i < space.dim_levels(); ++i) {
            std::uniform_int_distribution<int> levels(0, space.level_count(i) - 1);
            for (auto& p : pts)
                MixedSpace::level_of(p, i) = levels(rng);
        }
        return pts;
    }

    /// Points on a unit cube by the same stratification rule, used for
    /// optimizer restarts.
    inline std::vector<std::vector<double>> lhs_unit(std::size_t dim, std::size_t m, std::uint64_t seed)
    {
        std::vector<Bounds> b(dim, Bounds{0., 1.});
        auto pts = lhs_sample(MixedSpace(std::move(b)), m, seed);
        std::vector<std::vector<double>> out;
        out.reserve(m);
        for (auto& p : pts)
            out.push_back(std::move(p.continuous));
        return out;
    }

} // namespace bqd
