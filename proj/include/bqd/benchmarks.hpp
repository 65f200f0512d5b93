#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <bqd/archive.hpp>
#include <bqd/problem.hpp>
#include <bqd/space.hpp>

namespace bqd {

    /// Coefficients keyed by the tuple of categorical levels.
    class CoefficientTable {
    public:
        CoefficientTable(std::vector<std::string> columns, std::vector<int> level_counts,
            std::vector<std::pair<std::vector<int>, std::vector<double>>> rows)
            : _columns(std::move(columns)), _levels(std::move(level_counts))
        {
            std::size_t combos = 1;
            for (int l : _levels)
                combos *= static_cast<std::size_t>(l);
            for (auto& [key, values] : rows) {
                if (key.size() != _levels.size() || values.size() != _columns.size())
                    throw std::invalid_argument("CoefficientTable: malformed row");
                if (!_rows.emplace(key, std::move(values)).second)
                    throw std::invalid_argument("CoefficientTable: duplicate categorical combination");
            }
            if (_rows.size() != combos)
                throw std::invalid_argument("CoefficientTable: every categorical combination needs exactly one row");
        }

        const std::vector<std::string>& columns() const { return _columns; }
        std::size_t size() const { return _rows.size(); }
        const std::map<std::vector<int>, std::vector<double>>& rows() const { return _rows; }

        const std::vector<double>& row(const std::vector<int>& levels) const
        {
            auto it = _rows.find(levels);
            if (it == _rows.end())
                throw std::out_of_range("CoefficientTable: unknown categorical combination");
            return it->second;
        }

        double at(const std::vector<int>& levels, const std::string& column) const
        {
            for (std::size_t c = 0; c < _columns.size(); ++c)
                if (_columns[c] == column)
                    return row(levels)[c];
            throw std::out_of_range("CoefficientTable: unknown column " + column);
        }

    private:
        std::vector<std::string> _columns;
        std::vector<int> _levels;
        std::map<std::vector<int>, std::vector<double>> _rows;
    };

    inline const CoefficientTable& rosenbrock_coefficients()
    {
        static const CoefficientTable t({"a", "b", "e", "f", "j", "k", "r", "s", "t", "u", "v"}, {6, 2},
            {
                {{0, 0}, {100, 1, 0.7, 2000, 1, 0, 1, -1.2, 0, 0, -1}},
                {{0, 1}, {103, 1.6, 0.2, 1950, -1, 0, 1, -0.2, 0, 0, 0.97}},
                {{1, 0}, {98, 2, 0.3, 2100, 1, 0, 1, -0.7, 0, 0, 0.95}},
                {{1, 1}, {100, 1.7, 0.5, 2020, 1, 0, 1, 0.15, 0, 0, 1.1}},
                {{2, 0}, {95, 4.7, 1.5, 1970, 1, 0.15, 2, 0, 0.5, 0, -0.8}},
                {{2, 1}, {97, 2.4, 1.2, 2100, 1, -0.55, 2, 0.4, 0, -0.8, 0.7}},
                {{3, 0}, {103, 1.7, 2.5, 2070, -1, -1.15, 2, 0, -1.5, 0, 1.8}},
                {{3, 1}, {100, 0.2, 1, 1890, 1, -1.3, 2, 1.4, 0, 0.8, -1.7}},
                {{4, 0}, {96, 1.1, 0.5, 2140, -1, 0.5, 2, 0, -2.3, 0, -0.8}},
                {{4, 1}, {104, 1.5, 2, 1930, -1, 1.4, 2, -2.4, 0, 1.8, -0.8}},
                {{5, 0}, {99, 1.1, 0.5, 2140, 1, -1.5, 2, 0, 2, 0, -0.9}},
                {{5, 1}, {104, 1.5, 2, 2030, 1, 1.8, 2, 0.4, 0, 1, -0.3}},
            });
        return t;
    }

    inline const CoefficientTable& trid_coefficients()
    {
        static const CoefficientTable t({"a", "b", "c", "e", "f", "j", "k", "r", "s", "t", "u"}, {3, 2},
            {
                {{0, 0}, {1, 1, 1, 1, 1, 0.7, 1, 1, 1.5, 1, 0.4}},
                {{1, 0}, {0.95, 1, 1.1, 0.8, 1, 0.4, 1.1, 1, 1.9, 1, 0.1}},
                {{2, 0}, {1, 1.3, 0.97, 1.1, 0.8, 0.1, 1, 0.9, 1.5, 1.1, 0.4}},
                {{0, 1}, {1.1, 0.7, 1, 1, 1, 0.7, 1, 1, 0.7, 1, 1.4}},
                {{1, 1}, {0.7, 0.5, 0.4, 1.5, 1, 1.7, 0.7, 0.7, 0.5, 1, 0.9}},
                {{2, 1}, {0.7, 1, 1.5, 1, 1.3, 0.91, 1, 1, 1.5, 0.7, 0.1}},
            });
        return t;
    }

    inline const CoefficientTable& styblinski_coefficients()
    {
        static const CoefficientTable t({"a", "b", "c", "e", "f", "j", "k"}, {2, 2, 2},
            {
                {{0, 0, 0}, {1, 16, 5, 1.2, 0.7, 3.5, 0.7}},
                {{1, 0, 0}, {1.1, 18, 6.1, 1.4, 0.9, 3.8, 0.2}},
                {{1, 1, 0}, {0.95, 17, 4.9, 1.7, 1.3, 2.8, 0.7}},
                {{0, 1, 0}, {0.94, 12, 6.9, 1.4, 0.2, 1.4, 0.2}},
                {{0, 0, 1}, {0.75, 10, 7, 2.2, 1.7, 1.5, 0.5}},
                {{1, 0, 1}, {1.2, 19, 4.2, 1.5, 2.9, 1.4, 1.2}},
                {{1, 1, 1}, {0.97, 12, 1.9, 0.7, 2.3, 3.8, 0.4}},
                {{0, 1, 1}, {1.1, 18, 4.2, 1.9, 0.7, 2.7, 0.4}},
            });
        return t;
    }

    namespace detail {
        inline std::vector<double> edges_range(double first, double last, double step)
        {
            std::vector<double> e;
            const auto n = static_cast<int>(std::lround((last - first) / step));
            for (int i = 0; i <= n; ++i)
                e.push_back(first + step * i);
            return e;
        }

        inline double ipow(double x, int n)
        {
            double r = 1.;
            for (int i = 0; i < n; ++i)
                r *= x;
            return r;
        }
    } // namespace detail

    /// Modified Rosenbrock: 2 continuous in [-5,5], levels {0..5} x {0,1}.
    inline QdProblem rosenbrock_suite()
    {
        QdProblem p;
        p.name = "rosenbrock";
        p.space = MixedSpace({{-5., 5.}, {-5., 5.}}, {}, {6, 2});
        p.grid = FeatureGrid({detail::edges_range(-50., 50., 10.), detail::edges_range(-50., 80., 10.)});
        p.n_features = 2;
        p.n_constraints = 1;
        p.objective = [](const MixedPoint& x) {
            const auto& c = rosenbrock_coefficients().row(x.categorical);
            const double a = c[0], b = c[1], e = c[2], f = c[3];
            double s = 0.;
            for (std::size_t i = 0; i + 1 < x.continuous.size(); ++i) {
                const double xi = x.continuous[i], xn = x.continuous[i + 1];
                s += a * (xn - xi * xi) * (xn - xi * xi) + b * (e - xn) * (e - xn);
            }
            return -s / f;
        };
        p.features = [](const MixedPoint& x) {
            const auto& c = rosenbrock_coefficients().row(x.categorical);
            const double j = c[4], k = c[5], s = c[7], t = c[8], u = c[9], v = c[10];
            const int r = static_cast<int>(c[6]);
            const double x1 = x.continuous[0], x2 = x.continuous[1];
            return std::vector<double>{j * detail::ipow(x1 - k, r) + s, v * (x2 - t) * (x2 - t) + u};
        };
        p.constraints = [](const MixedPoint& x) {
            const double x1 = x.continuous[0], x2 = x.continuous[1];
            return std::vector<double>{((x1 - 0.5) * (x1 - 0.5) + x2 - 5.6) / 10.};
        };
        return p;
    }

    /// Modified Trid: 4 continuous in [0,1], levels {0,1,2} x {0,1}.
    inline QdProblem trid_suite()
    {
        QdProblem p;
        p.name = "trid";
        p.space = MixedSpace(std::vector<Bounds>(4, Bounds{0., 1.}), {}, {3, 2});
        p.grid = FeatureGrid({detail::edges_range(-1.5, 4.5, 1.), detail::edges_range(-2.5, 2.5, 1.)});
        p.n_features = 2;
        p.n_constraints = 1;
        p.objective = [](const MixedPoint& x) {
            const auto& c = trid_coefficients().row(x.categorical);
            const double a = c[0], b = c[1], cc = c[2];
            const auto& v = x.continuous;
            double s = 0.;
            for (std::size_t i = 0; i < v.size(); ++i)
                s += a * (v[i] - b) * (v[i] - b);
            for (std::size_t i = 1; i < v.size(); ++i)
                s -= cc * v[i] * v[i - 1];
            return s;
        };
        p.features = [](const MixedPoint& x) {
            const auto& c = trid_coefficients().row(x.categorical);
            const double e = c[3], f = c[4], j = c[5], k = c[6], r = c[7], s = c[8], t = c[9], u = c[10];
            const auto& v = x.continuous;
            const double q1 = f * v[0] - j, q2 = t * v[3] * v[2] - u;
            return std::vector<double>{e * v[2] + q1 * q1 + k * v[1], r * v[1] - s + q2 * q2};
        };
        p.constraints = [](const MixedPoint& x) {
            const auto& v = x.continuous;
            return std::vector<double>{(v[0] - 0.4) * (v[0] - 0.4) + 1.5 * v[2] - 1.3};
        };
        return p;
    }

    /// Modified Styblinski-Tang: 6 continuous in [0,1], levels {0,1}^3.
    inline QdProblem styblinski_suite()
    {
        QdProblem p;
        p.name = "styblinski";
        p.space = MixedSpace(std::vector<Bounds>(6, Bounds{0., 1.}), {}, {2, 2, 2});
        p.grid = FeatureGrid({detail::edges_range(0., 12., 2.), detail::edges_range(-5., 5., 2.)});
        p.n_features = 2;
        p.n_constraints = 2;
        p.objective = [](const MixedPoint& x) {
            const auto& c = styblinski_coefficients().row(x.categorical);
            const double a = c[0], b = c[1], cc = c[2];
            double s = 0.;
            for (double xi : x.continuous)
                s += a * xi * xi * xi * xi - b * xi * xi + cc * xi;
            return s;
        };
        p.features = [](const MixedPoint& x) {
            const auto& c = styblinski_coefficients().row(x.categorical);
            const double e = c[3], f = c[4], j = c[5], k = c[6];
            const auto& v = x.continuous;
            return std::vector<double>{(v[2] - e) * (v[2] - e) + (v[4] - f) * (v[4] - f), v[1] + j + (v[3] - k) * (v[3] - k)};
        };
        p.constraints = [](const MixedPoint& x) {
            const auto& v = x.continuous;
            return std::vector<double>{v[0] + v[1] - 1., v[3] + v[5] - 2.};
        };
        return p;
    }

    inline std::vector<std::string> suite_names() { return {"rosenbrock", "trid", "styblinski"}; }

    inline bool has_suite(const std::string& name)
    {
        for (const auto& s : suite_names())
            if (s == name)
                return true;
        return false;
    }

    inline QdProblem make_suite(const std::string& name)
    {
        if (name == "rosenbrock")
            return rosenbrock_suite();
        if (name == "trid")
            return trid_suite();
        if (name == "styblinski")
            return styblinski_suite();
        throw std::invalid_argument("unknown suite '" + name + "'");
    }

} // namespace bqd
