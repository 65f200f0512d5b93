#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace bqd {

    struct NelderMeadOptions {
        std::size_t max_evaluations = 500;
        double initial_step = 0.15;
        double f_tolerance = 1e-8;
        double x_tolerance = 1e-6;
    };

    struct NelderMeadResult {
        std::vector<double> x;
        double value = std::numeric_limits<double>::infinity();
        std::size_t evaluations = 0;
    };

    /// Derivative-free minimization over the unit box [0,1]^n. Trial points are
    /// projected onto the box, so every evaluated point is feasible. Non-finite
    /// objective values are treated as +inf.
    inline NelderMeadResult nelder_mead_unit_box(const std::function<double(const std::vector<double>&)>& f,
        std::vector<double> x0, const NelderMeadOptions& opt = {})
    {
        const std::size_t n = x0.size();
        NelderMeadResult res;

        auto clamp_box = [](std::vector<double>& x) {
            for (auto& v : x)
                v = std::clamp(v, 0., 1.);
        };
        auto eval = [&](const std::vector<double>& x) {
            ++res.evaluations;
            double v = f(x);
            return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
        };

        clamp_box(x0);
        if (n == 0) {
            res.value = eval(x0);
            res.x = x0;
            return res;
        }

        std::vector<std::vector<double>> simplex(n + 1, x0);
        std::vector<double> values(n + 1);
        values[0] = eval(x0);
        for (std::size_t i = 0; i < n; ++i) {
            auto& v = simplex[i + 1];
            v[i] += (x0[i] + opt.initial_step <= 1.) ? opt.initial_step : -opt.initial_step;
            values[i + 1] = eval(v);
        }

        std::vector<std::size_t> order(n + 1);
        std::vector<double> centroid(n), trial(n), trial2(n);

        while (res.evaluations < opt.max_evaluations) {
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
            const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

            // convergence: flat values and a collapsed simplex
            double spread = values[worst] - values[best];
            double size = 0.;
            for (std::size_t i = 0; i <= n; ++i)
                for (std::size_t d = 0; d < n; ++d)
                    size = std::max(size, std::abs(simplex[i][d] - simplex[best][d]));
            if (std::isfinite(spread) && spread <= opt.f_tolerance * (1. + std::abs(values[best])) && size <= opt.x_tolerance)
                break;

            std::fill(centroid.begin(), centroid.end(), 0.);
            for (std::size_t i = 0; i <= n; ++i)
                if (i != worst)
                    for (std::size_t d = 0; d < n; ++d)
                        centroid[d] += simplex[i][d] / static_cast<double>(n);

            auto along = [&](double t, std::vector<double>& out) {
                for (std::size_t d = 0; d < n; ++d)
                    out[d] = centroid[d] + t * (simplex[worst][d] - centroid[d]);
                clamp_box(out);
            };

            along(-1., trial);
            double f_reflect = eval(trial);
            if (f_reflect < values[best]) {
                along(-2., trial2);
                double f_expand = eval(trial2);
                if (f_expand < f_reflect) {
                    simplex[worst] = trial2;
                    values[worst] = f_expand;
                }
                else {
                    simplex[worst] = trial;
                    values[worst] = f_reflect;
                }
                continue;
            }
            if (f_reflect < values[second]) {
                simplex[worst] = trial;
                values[worst] = f_reflect;
                continue;
            }
            // contraction, outside or inside
            const bool outside = f_reflect < values[worst];
            along(outside ? -0.5 : 0.5, trial2);
            double f_contract = eval(trial2);
            if (f_contract < (outside ? f_reflect : values[worst])) {
                simplex[worst] = trial2;
                values[worst] = f_contract;
                continue;
            }
            // shrink toward the best vertex
            for (std::size_t i = 0; i <= n; ++i) {
                if (i == best)
                    continue;
                for (std::size_t d = 0; d < n; ++d)
                    simplex[i][d] = simplex[best][d] + 0.5 * (simplex[i][d] - simplex[best][d]);
                values[i] = eval(simplex[i]);
                if (res.evaluations >= opt.max_evaluations)
                    break;
            }
        }

        std::size_t best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
        res.x = simplex[best];
        res.value = values[best];
        return res;
    }

} // namespace bqd
