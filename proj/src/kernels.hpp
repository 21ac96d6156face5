#pragma once

// Internal dense kernels. Single-precision storage, double-precision
// accumulation inside every reduction.

#include <cstddef>
#include <vector>

namespace cim::kernels {

/// Dot product of two float spans accumulated in double (4-way unrolled).
inline double dot_dp(const float* a, const float* b, std::size_t n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += static_cast<double>(a[i]) * static_cast<double>(b[i]);
        s1 += static_cast<double>(a[i + 1]) * static_cast<double>(b[i + 1]);
        s2 += static_cast<double>(a[i + 2]) * static_cast<double>(b[i + 2]);
        s3 += static_cast<double>(a[i + 3]) * static_cast<double>(b[i + 3]);
    }
    for (; i < n; ++i) s0 += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    return (s0 + s1) + (s2 + s3);
}

/// C (m x n, row-major) = A (m x K, rows) . B_rows (n x K, rows), i.e. both
/// operands are indexed by contiguous K-length rows.
void matmul_rowrow(const float* a, std::size_t m, const float* b_rows, std::size_t n,
                   std::size_t k, float* c);

/// Transpose src (rows x cols, row-major) into dst (cols x rows, row-major).
void transpose(const float* src, std::size_t rows, std::size_t cols, float* dst);

/// im2col for stride-1 "same" zero padding with an odd square kernel.
/// Output layout: (H*W) rows of length C*k*k (patch per output pixel).
void im2col_same(const float* img, std::size_t c, std::size_t h, std::size_t w,
                 std::size_t kernel, float* patches);

/// Scatter-add the patch-gradient matrix (H*W x C*k*k) back onto the image.
void col2im_same_add(const float* patches, std::size_t c, std::size_t h, std::size_t w,
                     std::size_t kernel, float* img);

}  // namespace cim::kernels
