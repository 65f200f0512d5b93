#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace bqd {

    /// Unscrambled Sobol' low-discrepancy sequence, Joe & Kuo direction
    /// numbers (new-joe-kuo-6.21201), up to 21 dimensions. The sequence starts
    /// at the origin.
    class SobolSequence {
    public:
        static constexpr std::size_t max_dim = 21;
        static constexpr unsigned bits = 32;

        explicit SobolSequence(std::size_t dim) : _dim(dim)
        {
            if (dim < 1 || dim > max_dim)
                throw std::invalid_argument("SobolSequence: dimension must be in [1, 21]");
            _v.resize(dim);
            for (unsigned k = 0; k < bits; ++k)
                _v[0][k] = 1u << (bits - 1 - k);
            for (std::size_t d = 1; d < dim; ++d) {
                const Primitive& prim = primitives()[d - 1];
                const unsigned s = prim.degree;
                auto& v = _v[d];
                for (unsigned k = 0; k < s; ++k)
                    v[k] = prim.m[k] << (bits - 1 - k);
                for (unsigned k = s; k < bits; ++k) {
                    std::uint32_t value = v[k - s] ^ (v[k - s] >> s);
                    for (unsigned j = 1; j < s; ++j)
                        if ((prim.a >> (s - 1 - j)) & 1u)
                            value ^= v[k - j];
                    v[k] = value;
                }
            }
        }

        std::size_t dim() const { return _dim; }

        /// Point number `index` of the sequence (index 0 is the origin).
        std::vector<double> point(std::uint64_t index) const
        {
            std::uint64_t gray = index ^ (index >> 1);
            std::vector<double> out(_dim);
            for (std::size_t d = 0; d < _dim; ++d) {
                std::uint32_t x = 0;
                for (unsigned k = 0; k < bits && (gray >> k) != 0; ++k)
                    if ((gray >> k) & 1u)
                        x ^= _v[d][k];
                out[d] = static_cast<double>(x) / 4294967296.0;
            }
            return out;
        }

    private:
        struct Primitive {
            unsigned degree;
            unsigned a;
            std::array<std::uint32_t, 8> m;
        };

        static const std::array<Primitive, max_dim - 1>& primitives()
        {
            static const std::array<Primitive, max_dim - 1> table = {{
                {1, 0, {1}},
                {2, 1, {1, 3}},
                {3, 1, {1, 3, 1}},
                {3, 2, {1, 1, 1}},
                {4, 1, {1, 1, 3, 3}},
                {4, 4, {1, 3, 5, 13}},
                {5, 2, {1, 1, 5, 5, 17}},
                {5, 4, {1, 1, 5, 5, 5}},
                {5, 7, {1, 1, 7, 11, 19}},
                {5, 11, {1, 1, 5, 1, 1}},
                {5, 13, {1, 1, 1, 3, 11}},
                {5, 14, {1, 3, 5, 5, 31}},
                {6, 1, {1, 3, 3, 9, 7, 49}},
                {6, 13, {1, 1, 1, 15, 21, 21}},
                {6, 16, {1, 3, 1, 13, 27, 49}},
                {6, 19, {1, 1, 1, 15, 7, 5}},
                {6, 22, {1, 3, 1, 15, 13, 25}},
                {6, 25, {1, 1, 5, 5, 19, 61}},
                {7, 1, {1, 3, 7, 11, 23, 15, 103}},
                {7, 4, {1, 3, 7, 13, 13, 15, 69}},
            }};
            return table;
        }

        std::size_t _dim;
        std::vector<std::array<std::uint32_t, bits>> _v;
    };

    /// First n points of the sequence, starting after `offset` skipped points.
    inline std::vector<std::vector<double>> sobol_points(std::size_t dim, std::size_t n, std::uint64_t offset = 0)
    {
        if (n < 1)
            throw std::invalid_argument("sobol_points: n must be at least 1");
        SobolSequence seq(dim);
        std::vector<std::vector<double>> out;
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
            out.push_back(seq.point(offset + i));
        return out;
    }

} // namespace bqd
