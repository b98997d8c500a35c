#pragma once

#include <cstddef>
#include <vector>

#include "pupolicy/errors.hpp"

namespace pupolicy {

// Dense row-major matrix of 64-bit reals. All the numerics in this
// project are desk-scale, so no BLAS backing.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    const double* row(std::size_t r) const { return data.data() + r * cols; }
    double* row(std::size_t r) { return data.data() + r * cols; }

    // Gather a row subset into a new matrix.
    Matrix take_rows(const std::vector<std::size_t>& idx) const {
        Matrix out(idx.size(), cols);
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t c = 0; c < cols; ++c) out.at(i, c) = at(idx[i], c);
        return out;
    }
};

}  // namespace pupolicy
