#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include <bqd/space.hpp>

namespace bqd {

    /// Nugget added to covariance diagonals.
    inline constexpr double default_nugget = 1e-6;

    enum class KernelMode { gower, hypersphere };

    inline const char* to_string(KernelMode m) { return m == KernelMode::gower ? "GOWER" : "HYPERSPHERE"; }

    /// Hyperparameters of the mixed product kernel. A single amplitude scales
    /// the whole product; level kernels are pure correlations.
    struct KernelHyperparams {
        KernelMode mode = KernelMode::gower;
        double amplitude = 1.;
        std::vector<double> lengthscales;                 // one per continuous dimension
        std::vector<double> gower_thetas;                 // one per level variable (gower mode)
        std::vector<std::vector<double>> sphere_angles;   // L(L-1)/2 per level variable (hypersphere mode)
        double noise_variance = 0.;

        void validate(const MixedSpace& space) const
        {
            if (!(amplitude > 0.))
                throw std::invalid_argument("KernelHyperparams: amplitude must be positive");
            if (!(noise_variance >= 0.))
                throw std::invalid_argument("KernelHyperparams: noise variance must be nonnegative");
            if (lengthscales.size() != space.dim_continuous())
                throw std::invalid_argument("KernelHyperparams: lengthscale count does not match continuous dimension");
            for (double l : lengthscales)
                if (!(l > 0.))
                    throw std::invalid_argument("KernelHyperparams: lengthscales must be positive");
            const std::size_t dz = space.dim_levels();
            if (mode == KernelMode::gower) {
                if (gower_thetas.size() != dz || !sphere_angles.empty())
                    throw std::invalid_argument("KernelHyperparams: gower mode expects one theta per level variable");
                for (double t : gower_thetas)
                    if (!(t >= 0.))
                        throw std::invalid_argument("KernelHyperparams: gower thetas must be nonnegative");
            }
            else {
                if (sphere_angles.size() != dz || !gower_thetas.empty())
                    throw std::invalid_argument("KernelHyperparams: hypersphere mode expects one angle vector per level variable");
                for (std::size_t i = 0; i < dz; ++i) {
                    std::size_t L = static_cast<std::size_t>(space.level_count(i));
                    if (sphere_angles[i].size() != L * (L - 1) / 2)
                        throw std::invalid_argument("KernelHyperparams: angle count must be L(L-1)/2");
                }
            }
        }
    };

    inline double se_kernel_1d(double x, double x2, double lengthscale)
    {
        const double d = x - x2;
        return std::exp(-d * d / (2. * lengthscale * lengthscale));
    }

    /// Compound-symmetry (Gower distance) correlation.
    inline double gower_kernel_1d(int z, int z2, double theta)
    {
        return z == z2 ? 1. : std::exp(-theta);
    }

    /// Correlation matrix of an L-level variable from its polyspherical angles.
    /// Row m of the lower-triangular factor is a unit vector; the result is the
    /// Gram matrix of those rows, so its diagonal is exactly one.
    inline Eigen::MatrixXd hypersphere_corr_matrix(int level_count, const std::vector<double>& angles)
    {
        const auto L = static_cast<std::size_t>(level_count);
        if (level_count < 1 || angles.size() != L * (L - 1) / 2)
            throw std::invalid_argument("hypersphere_corr_matrix: expected L(L-1)/2 angles");
        for (double a : angles)
            if (!(a >= 0. && a <= std::numbers::pi / 2.))
                throw std::invalid_argument("hypersphere_corr_matrix: angles must lie in [0, pi/2]");

        Eigen::MatrixXd chol = Eigen::MatrixXd::Zero(level_count, level_count);
        chol(0, 0) = 1.;
        for (std::size_t m = 1; m < L; ++m) {
            const double* theta = angles.data() + m * (m - 1) / 2;
            double sin_prod = 1.;
            for (std::size_t j = 0; j < m; ++j) {
                chol(m, j) = std::cos(theta[j]) * sin_prod;
                sin_prod *= std::sin(theta[j]);
            }
            chol(m, m) = sin_prod;
        }
        return chol * chol.transpose();
    }

    /// Level correlation tables for every discrete/categorical variable.
    inline std::vector<Eigen::MatrixXd> level_correlations(const KernelHyperparams& hp, const MixedSpace& space)
    {
        std::vector<Eigen::MatrixXd> out;
        if (hp.mode == KernelMode::hypersphere) {
            out.reserve(space.dim_levels());
            for (std::size_t i = 0; i < space.dim_levels(); ++i)
                out.push_back(hypersphere_corr_matrix(space.level_count(i), hp.sphere_angles[i]));
        }
        return out;
    }

    namespace detail {
        inline double product_kernel_with(const MixedPoint& p, const MixedPoint& p2, const KernelHyperparams& hp,
            const std::vector<Eigen::MatrixXd>& corr)
        {
            double exponent = 0.;
            for (std::size_t i = 0; i < p.continuous.size(); ++i) {
                const double d = (p.continuous[i] - p2.continuous[i]) / hp.lengthscales[i];
                exponent += 0.5 * d * d;
            }
            double factor = 1.;
            const std::size_t dz = p.discrete.size() + p.categorical.size();
            for (std::size_t i = 0; i < dz; ++i) {
                const int a = MixedSpace::level_of(p, i);
                const int b = MixedSpace::level_of(p2, i);
                if (hp.mode == KernelMode::gower) {
                    if (a != b)
                        exponent += hp.gower_thetas[i];
                }
                else {
                    factor *= corr[i](a, b);
                }
            }
            return hp.amplitude * factor * std::exp(-exponent);
        }
    } // namespace detail

    /// amplitude x product of one-dimensional SE and level kernels.
    inline double product_kernel(const MixedPoint& p, const MixedPoint& p2, const KernelHyperparams& hp, const MixedSpace& space)
    {
        space.check_dimensions(p);
        space.check_dimensions(p2);
        hp.validate(space);
        return detail::product_kernel_with(p, p2, hp, level_correlations(hp, space));
    }

    /// Covariance matrix of `points` with noise variance and `jitter` added to
    /// the diagonal.
    inline Eigen::MatrixXd kernel_matrix(const std::vector<MixedPoint>& points, const KernelHyperparams& hp, const MixedSpace& space,
        double jitter = default_nugget)
    {
        if (points.empty())
            throw std::invalid_argument("kernel_matrix: empty point list");
        hp.validate(space);
        for (const auto& p : points)
            space.check_dimensions(p);
        const auto corr = level_correlations(hp, space);
        const auto n = static_cast<Eigen::Index>(points.size());
        Eigen::MatrixXd K(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            K(i, i) = hp.amplitude + hp.noise_variance + jitter;
            for (Eigen::Index j = 0; j < i; ++j) {
                const double k = detail::product_kernel_with(points[i], points[j], hp, corr);
                K(i, j) = k;
                K(j, i) = k;
            }
        }
        return K;
    }

} // namespace bqd
