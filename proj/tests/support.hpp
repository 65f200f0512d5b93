#pragma once

// Random spaces and hyperparameters shared by the property tests.

#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <bqd/kernels.hpp>
#include <bqd/space.hpp>

namespace bqd::fixtures {

    inline MixedSpace random_space(std::mt19937_64& rng)
    {
        std::uniform_int_distribution<int> dc(0, 3), dq(0, 2), levels(1, 5);
        std::uniform_real_distribution<double> lo(-5., 5.), width(0.1, 10.);
        std::vector<Bounds> b;
        int n_c = dc(rng), n_d = dq(rng), n_q = dq(rng);
        if (n_c + n_d + n_q == 0)
            n_c = 1;
        for (int i = 0; i < n_c; ++i) {
            double l = lo(rng);
            b.push_back({l, l + width(rng)});
        }
        std::vector<std::vector<double>> disc;
        for (int i = 0; i < n_d; ++i) {
            std::vector<double> v;
            for (int k = 0, L = levels(rng); k < L; ++k)
                v.push_back(k * 0.5);
            disc.push_back(v);
        }
        std::vector<int> cat;
        for (int i = 0; i < n_q; ++i)
            cat.push_back(levels(rng));
        return MixedSpace(b, disc, cat);
    }

    /// Hyperparameters drawn log-uniformly within the training bounds.
    inline KernelHyperparams random_hyperparams(const MixedSpace& space, KernelMode mode, std::mt19937_64& rng)
    {
        std::uniform_real_distribution<double> u(0., 1.);
        auto log_uniform = [&](double a, double b) { return a * std::pow(b / a, u(rng)); };
        KernelHyperparams hp;
        hp.mode = mode;
        hp.amplitude = log_uniform(1e-3, 1e3);
        for (std::size_t i = 0; i < space.dim_continuous(); ++i)
            hp.lengthscales.push_back(log_uniform(1e-2, 1e2));
        for (std::size_t i = 0; i < space.dim_levels(); ++i) {
            if (mode == KernelMode::gower) {
                hp.gower_thetas.push_back(log_uniform(1e-2, 1e2));
            }
            else {
                const auto L = static_cast<std::size_t>(space.level_count(i));
                std::vector<double> a(L * (L - 1) / 2);
                for (auto& x : a)
                    x = u(rng) * std::numbers::pi / 2.;
                hp.sphere_angles.push_back(a);
            }
        }
        return hp;
    }

} // namespace bqd::fixtures
