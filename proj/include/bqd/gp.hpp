#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <bqd/kernels.hpp>
#include <bqd/nelder_mead.hpp>
#include <bqd/space.hpp>

namespace bqd {

    class FactorizationError : public std::runtime_error {
    public:
        using std::runtime_error::runtime_error;
    };

    struct Prediction {
        double mean = 0.;
        double sd = 0.;
    };

    /// Search ranges and effort for hyperparameter training. Continuous
    /// inputs are normalized to [0,1] before the kernel sees them, so the
    /// lengthscale range is scale-free.
    struct GpFitOptions {
        std::size_t restarts = 20;
        /// Nelder-Mead budget per restart; 0 selects 30 x (parameters + 1).
        std::size_t max_evaluations_per_restart = 0;
        double log_amplitude_min = std::log(1e-3), log_amplitude_max = std::log(1e3);
        double log_lengthscale_min = std::log(1e-2), log_lengthscale_max = std::log(1e2);
        double log_theta_min = std::log(1e-2), log_theta_max = std::log(1e2);
        double nugget = default_nugget;
    };

    namespace detail {

        /// Cholesky with escalating jitter: nugget, then x10 twice.
        inline std::optional<std::pair<Eigen::MatrixXd, double>> factorize(Eigen::MatrixXd K, double jitter)
        {
            for (int attempt = 0; attempt < 3; ++attempt) {
                Eigen::LLT<Eigen::MatrixXd> llt(K);
                if (llt.info() == Eigen::Success) {
                    Eigen::MatrixXd L = llt.matrixL();
                    bool ok = true;
                    for (Eigen::Index i = 0; i < L.rows() && ok; ++i)
                        ok = std::isfinite(L(i, i)) && L(i, i) > 0.;
                    if (ok)
                        return std::make_pair(std::move(L), jitter);
                }
                K.diagonal().array() += 9. * jitter;
                jitter *= 10.;
            }
            return std::nullopt;
        }

        struct GlsSolution {
            double mean;
            double quad;
            double log_det;
        };

        /// Ordinary-kriging mean and the quadratic form for a factor L of K.
        inline GlsSolution gls(const Eigen::MatrixXd& L, const Eigen::VectorXd& y, std::optional<double> fixed_mean = std::nullopt)
        {
            const auto tri = L.triangularView<Eigen::Lower>();
            Eigen::VectorXd zy = tri.solve(y);
            Eigen::VectorXd z1 = tri.solve(Eigen::VectorXd::Ones(y.size()));
            double mean = fixed_mean ? *fixed_mean : z1.dot(zy) / z1.squaredNorm();
            double quad = (zy - mean * z1).squaredNorm();
            double log_det = 2. * L.diagonal().array().log().sum();
            return {mean, quad, log_det};
        }

        inline MixedSpace unit_space(const MixedSpace& space)
        {
            return MixedSpace(std::vector<Bounds>(space.dim_continuous(), Bounds{0., 1.}), space.discrete_levels(), space.categorical_levels());
        }

        /// Pairwise input differences, cached once per training set so each
        /// likelihood evaluation is a matrix-vector product plus a Cholesky.
        class PairCache {
        public:
            PairCache(const std::vector<MixedPoint>& x, const MixedSpace& space) : _space(space), _n(x.size())
            {
                const std::size_t npairs = _n * (_n - 1) / 2;
                const std::size_t dc = space.dim_continuous(), dz = space.dim_levels();
                _sq = Eigen::MatrixXd(npairs, dc);
                _mismatch = Eigen::MatrixXd(npairs, dz);
                _levels.assign(dz, std::vector<std::pair<int, int>>(npairs));
                std::size_t k = 0;
                for (std::size_t i = 0; i < _n; ++i)
                    for (std::size_t j = 0; j < i; ++j, ++k) {
                        for (std::size_t d = 0; d < dc; ++d) {
                            double diff = x[i].continuous[d] - x[j].continuous[d];
                            _sq(k, d) = diff * diff;
                        }
                        for (std::size_t q = 0; q < dz; ++q) {
                            int a = MixedSpace::level_of(x[i], q), b = MixedSpace::level_of(x[j], q);
                            _mismatch(k, q) = a == b ? 0. : 1.;
                            _levels[q][k] = {a, b};
                        }
                    }
            }

            Eigen::MatrixXd covariance(const KernelHyperparams& hp, double jitter) const
            {
                Eigen::VectorXd w(_sq.cols());
                for (Eigen::Index d = 0; d < w.size(); ++d)
                    w(d) = 0.5 / (hp.lengthscales[d] * hp.lengthscales[d]);
                Eigen::VectorXd expo = _sq * w;
                if (hp.mode == KernelMode::gower && _mismatch.cols() > 0)
                    expo += _mismatch * Eigen::Map<const Eigen::VectorXd>(hp.gower_thetas.data(), static_cast<Eigen::Index>(hp.gower_thetas.size()));
                Eigen::VectorXd vals = hp.amplitude * (-expo.array()).exp();
                if (hp.mode == KernelMode::hypersphere) {
                    for (std::size_t q = 0; q < _levels.size(); ++q) {
                        Eigen::MatrixXd c = hypersphere_corr_matrix(_space.level_count(q), hp.sphere_angles[q]);
                        for (Eigen::Index k = 0; k < vals.size(); ++k)
                            vals(k) *= c(_levels[q][k].first, _levels[q][k].second);
                    }
                }
                const auto n = static_cast<Eigen::Index>(_n);
                Eigen::MatrixXd K(n, n);
                Eigen::Index k = 0;
                for (Eigen::Index i = 0; i < n; ++i) {
                    K(i, i) = hp.amplitude + hp.noise_variance + jitter;
                    for (Eigen::Index j = 0; j < i; ++j, ++k) {
                        K(i, j) = vals(k);
                        K(j, i) = vals(k);
                    }
                }
                return K;
            }

        private:
            MixedSpace _space;
            std::size_t _n;
            Eigen::MatrixXd _sq;
            Eigen::MatrixXd _mismatch;
            std::vector<std::vector<std::pair<int, int>>> _levels;
        };

    } // namespace detail

    /// Standard Gaussian negative log marginal likelihood of `outputs` under
    /// a constant mean and the kernel matrix of `inputs` (nugget included).
    inline double neg_log_marginal_likelihood(const std::vector<MixedPoint>& inputs, const Eigen::VectorXd& outputs,
        const KernelHyperparams& hp, double mean, const MixedSpace& space, double nugget = default_nugget)
    {
        if (static_cast<Eigen::Index>(inputs.size()) != outputs.size())
            throw std::invalid_argument("neg_log_marginal_likelihood: input/output size mismatch");
        auto fac = detail::factorize(kernel_matrix(inputs, hp, space, nugget), nugget);
        if (!fac)
            throw FactorizationError("neg_log_marginal_likelihood: covariance matrix is not positive definite");
        auto s = detail::gls(fac->first, outputs, mean);
        const double m = static_cast<double>(outputs.size());
        return 0.5 * (s.log_det + s.quad + m * std::log(2. * std::numbers::pi));
    }

    enum class Standardize { yes, no };

    /// Trained Gaussian-process surrogate with an ordinary-kriging constant
    /// mean. Immutable after construction; safe to share across threads.
    class GpModel {
    public:
        /// Conditions a GP on data with fixed hyperparameters (expressed in
        /// standardized output units and normalized input units).
        static GpModel condition(const MixedSpace& space, const std::vector<MixedPoint>& inputs, const std::vector<double>& outputs,
            const KernelHyperparams& hp, Standardize standardize = Standardize::yes, double nugget = default_nugget)
        {
            GpModel m(space, inputs, outputs, standardize);
            hp.validate(m._unit);
            if (m._degenerate)
                return m;
            if (!m._set_hyperparams(hp, nugget))
                throw FactorizationError("GpModel: covariance matrix is not positive definite");
            return m;
        }

        /// Trains hyperparameters by multistart Nelder-Mead on the negative log
        /// marginal likelihood; restarts are a deterministic function of `seed`.
        static GpModel fit(const MixedSpace& space, const std::vector<MixedPoint>& inputs, const std::vector<double>& outputs,
            KernelMode mode, std::uint64_t seed, const GpFitOptions& opt = {})
        {
            if (inputs.size() < 2)
                throw std::invalid_argument("GpModel::fit: at least two training points are required");
            GpModel m(space, inputs, outputs, Standardize::yes);
            m._hp.mode = mode;
            if (m._degenerate) {
                m._hp = m._default_hyperparams(mode);
                m._hp.amplitude = std::exp(opt.log_amplitude_min);
                return m;
            }

            const detail::PairCache cache(m._inputs, m._unit);
            const std::size_t P = m._parameter_count(mode);
            auto objective = [&](const std::vector<double>& u) {
                KernelHyperparams hp = m._decode(u, mode, opt);
                auto fac = detail::factorize(cache.covariance(hp, opt.nugget), opt.nugget);
                if (!fac)
                    return std::numeric_limits<double>::infinity();
                auto s = detail::gls(fac->first, m._y);
                return 0.5 * (s.log_det + s.quad + static_cast<double>(m._y.size()) * std::log(2. * std::numbers::pi));
            };

            NelderMeadOptions nm;
            nm.max_evaluations = opt.max_evaluations_per_restart > 0 ? opt.max_evaluations_per_restart : 30 * (P + 1);

            std::vector<std::vector<double>> starts;
            starts.emplace_back(P, 0.5);
            if (opt.restarts > 1)
                for (auto& s : lhs_unit(P, opt.restarts - 1, seed))
                    starts.push_back(std::move(s));

            double best_value = std::numeric_limits<double>::infinity();
            std::vector<double> best_u;
            for (std::size_t r = 0; r < starts.size() && r < std::max<std::size_t>(opt.restarts, 1); ++r) {
                auto res = nelder_mead_unit_box(objective, starts[r], nm);
                if (std::isfinite(res.value) && res.value < best_value) {
                    best_value = res.value;
                    best_u = res.x;
                }
            }
            if (best_u.empty())
                throw FactorizationError("GpModel::fit: every restart failed to factorize the covariance");
            m._nlml = best_value;
            if (!m._set_hyperparams(m._decode(best_u, mode, opt), opt.nugget))
                throw FactorizationError("GpModel::fit: final covariance is not positive definite");
            return m;
        }

        Prediction predict(const MixedPoint& p) const
        {
            if (_degenerate)
                return {_offset, _scale * std::sqrt(_hp.amplitude)};
            Eigen::VectorXd k = _cross_covariance(p);
            double mean = _mean + k.dot(_alpha);
            _chol.triangularView<Eigen::Lower>().solveInPlace(k);
            double var = std::max(0., _hp.amplitude - k.squaredNorm());
            return {_offset + _scale * mean, _scale * std::sqrt(var)};
        }

        double predict_mean(const MixedPoint& p) const
        {
            if (_degenerate)
                return _offset;
            return _offset + _scale * (_mean + _cross_covariance(p).dot(_alpha));
        }

        const MixedSpace& space() const { return _space; }
        const KernelHyperparams& hyperparams() const { return _hp; }
        /// Constant mean in standardized units.
        double mean() const { return _mean; }
        double output_offset() const { return _offset; }
        double output_scale() const { return _scale; }
        std::size_t size() const { return _inputs.size(); }
        bool degenerate() const { return _degenerate; }
        /// Diagonal jitter actually used by the factorization.
        double jitter() const { return _jitter; }
        const Eigen::MatrixXd& cholesky() const { return _chol; }
        /// Training inputs with continuous coordinates normalized to [0,1].
        const std::vector<MixedPoint>& normalized_inputs() const { return _inputs; }
        /// Standardized training outputs.
        const Eigen::VectorXd& standardized_outputs() const { return _y; }
        /// NLML reached by training (standardized units); NaN when conditioned.
        double training_nlml() const { return _nlml; }

        /// NLML of the standardized data for given hyperparameters, with the
        /// kriging mean in closed form. Used to audit training.
        double nlml_at(const KernelHyperparams& hp, double nugget = default_nugget) const
        {
            auto fac = detail::factorize(kernel_matrix(_inputs, hp, _unit, nugget), nugget);
            if (!fac)
                return std::numeric_limits<double>::infinity();
            auto s = detail::gls(fac->first, _y);
            return 0.5 * (s.log_det + s.quad + static_cast<double>(_y.size()) * std::log(2. * std::numbers::pi));
        }

        /// Hyperparameters for a point of the unit search box used by fit().
        KernelHyperparams decode(const std::vector<double>& u, KernelMode mode, const GpFitOptions& opt = {}) const { return _decode(u, mode, opt); }
        std::size_t parameter_count(KernelMode mode) const { return _parameter_count(mode); }

    private:
        GpModel(const MixedSpace& space, const std::vector<MixedPoint>& inputs, const std::vector<double>& outputs, Standardize standardize)
            : _space(space), _unit(detail::unit_space(space))
        {
            if (inputs.empty() || inputs.size() != outputs.size())
                throw std::invalid_argument("GpModel: inputs and outputs must be nonempty and of equal length");
            _inputs.reserve(inputs.size());
            for (const auto& p : inputs)
                _inputs.push_back(normalize(space, p));

            const auto n = static_cast<Eigen::Index>(outputs.size());
            _y = Eigen::Map<const Eigen::VectorXd>(outputs.data(), n);
            if (standardize == Standardize::yes) {
                _offset = _y.mean();
                double var = (_y.array() - _offset).square().sum() / static_cast<double>(n);
                double sd = std::sqrt(var);
                if (!(sd > 1e-12 * std::max(1., std::abs(_offset)))) {
                    _degenerate = true;
                    _scale = 1.;
                    _mean = 0.;
                    _y.setZero();
                    return;
                }
                _scale = sd;
                _y = (_y.array() - _offset) / _scale;
            }
        }

        std::size_t _parameter_count(KernelMode mode) const
        {
            std::size_t P = 1 + _unit.dim_continuous();
            for (std::size_t q = 0; q < _unit.dim_levels(); ++q) {
                auto L = static_cast<std::size_t>(_unit.level_count(q));
                P += mode == KernelMode::gower ? 1 : L * (L - 1) / 2;
            }
            return P;
        }

        KernelHyperparams _default_hyperparams(KernelMode mode) const { return _decode(std::vector<double>(_parameter_count(mode), 0.5), mode, {}); }

        KernelHyperparams _decode(const std::vector<double>& u, KernelMode mode, const GpFitOptions& opt) const
        {
            auto lerp = [](double lo, double hi, double t) { return lo + std::clamp(t, 0., 1.) * (hi - lo); };
            KernelHyperparams hp;
            hp.mode = mode;
            std::size_t k = 0;
            hp.amplitude = std::exp(lerp(opt.log_amplitude_min, opt.log_amplitude_max, u[k++]));
            for (std::size_t d = 0; d < _unit.dim_continuous(); ++d)
                hp.lengthscales.push_back(std::exp(lerp(opt.log_lengthscale_min, opt.log_lengthscale_max, u[k++])));
            for (std::size_t q = 0; q < _unit.dim_levels(); ++q) {
                if (mode == KernelMode::gower) {
                    hp.gower_thetas.push_back(std::exp(lerp(opt.log_theta_min, opt.log_theta_max, u[k++])));
                }
                else {
                    auto L = static_cast<std::size_t>(_unit.level_count(q));
                    std::vector<double> angles(L * (L - 1) / 2);
                    for (auto& a : angles)
                        a = lerp(0., std::numbers::pi / 2., u[k++]);
                    hp.sphere_angles.push_back(std::move(angles));
                }
            }
            return hp;
        }

        bool _set_hyperparams(const KernelHyperparams& hp, double nugget)
        {
            _hp = hp;
            _corr = level_correlations(_hp, _unit);
            auto fac = detail::factorize(kernel_matrix(_inputs, _hp, _unit, nugget), nugget);
            if (!fac)
                return false;
            _chol = std::move(fac->first);
            _jitter = fac->second;
            auto s = detail::gls(_chol, _y);
            _mean = s.mean;
            _alpha = _chol.triangularView<Eigen::Lower>().solve(_y - Eigen::VectorXd::Constant(_y.size(), _mean));
            _chol.triangularView<Eigen::Lower>().transpose().solveInPlace(_alpha);

            const auto n = static_cast<Eigen::Index>(_inputs.size());
            const auto dc = static_cast<Eigen::Index>(_unit.dim_continuous());
            _scaled = Eigen::MatrixXd(n, dc);
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index d = 0; d < dc; ++d)
                    _scaled(i, d) = _inputs[i].continuous[d] / _hp.lengthscales[d];
            return true;
        }

        Eigen::VectorXd _cross_covariance(const MixedPoint& p) const
        {
            const MixedPoint q = normalize(_space, p);
            const auto n = static_cast<Eigen::Index>(_inputs.size());
            const auto dc = _scaled.cols();
            Eigen::RowVectorXd qs(dc);
            for (Eigen::Index d = 0; d < dc; ++d)
                qs(d) = q.continuous[d] / _hp.lengthscales[d];
            Eigen::VectorXd expo = 0.5 * (_scaled.rowwise() - qs).rowwise().squaredNorm();
            Eigen::VectorXd k(n);
            const std::size_t dz = _unit.dim_levels();
            for (Eigen::Index i = 0; i < n; ++i) {
                double e = expo(i), factor = 1.;
                for (std::size_t z = 0; z < dz; ++z) {
                    int a = MixedSpace::level_of(_inputs[i], z), b = MixedSpace::level_of(q, z);
                    if (_hp.mode == KernelMode::gower) {
                        if (a != b)
                            e += _hp.gower_thetas[z];
                    }
                    else {
                        factor *= _corr[z](a, b);
                    }
                }
                k(i) = _hp.amplitude * factor * std::exp(-e);
            }
            return k;
        }

        MixedSpace _space;
        MixedSpace _unit;
        std::vector<MixedPoint> _inputs;
        Eigen::VectorXd _y;
        double _offset = 0.;
        double _scale = 1.;
        bool _degenerate = false;
        KernelHyperparams _hp;
        std::vector<Eigen::MatrixXd> _corr;
        double _mean = 0.;
        double _jitter = default_nugget;
        double _nlml = std::numeric_limits<double>::quiet_NaN();
        Eigen::MatrixXd _chol;
        Eigen::VectorXd _alpha;
        Eigen::MatrixXd _scaled;
    };

} // namespace bqd
