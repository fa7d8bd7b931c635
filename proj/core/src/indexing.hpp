#pragma once

// Internal mixed-radix index helpers shared by the tensor kernels.

#include <vector>

#include "lqm/linalg.hpp"

namespace lqm::detail {

// Row-major strides: factor 0 is the most significant digit.
inline std::vector<Index> row_strides(const std::vector<Index>& dims) {
    std::vector<Index> s(dims.size(), 1);
    for (int f = static_cast<int>(dims.size()) - 2; f >= 0; --f) s[f] = s[f + 1] * dims[f + 1];
    return s;
}

// Flat offsets of every multi-index over the listed factors (in list order,
// first factor most significant), other factors held at zero. Offsets over
// disjoint factor sets are additive.
inline std::vector<Index> factor_offsets(const std::vector<Index>& dims,
                                         const std::vector<Index>& strides,
                                         const std::vector<int>& factors) {
    Index n = 1;
    for (int f : factors) n *= dims[f];
    std::vector<Index> off(static_cast<size_t>(n), 0);
    Index repeat = 1;
    for (int f : factors) {
        const Index d = dims[f];
        const Index s = strides[f];
        const Index block = n / (repeat * d);
        Index idx = 0;
        for (Index r = 0; r < repeat; ++r)
            for (Index k = 0; k < d; ++k)
                for (Index b = 0; b < block; ++b) off[idx++] += k * s;
        repeat *= d;
    }
    return off;
}

} // namespace lqm::detail
