#include "kernels.hpp"

#include <cstring>

namespace cim::kernels {

void matmul_rowrow(const float* a, std::size_t m, const float* b_rows, std::size_t n,
                   std::size_t k, float* c) {
    for (std::size_t i = 0; i < m; ++i) {
        const float* ai = a + i * k;
        float* ci = c + i * n;
        for (std::size_t j = 0; j < n; ++j) {
            ci[j] = static_cast<float>(dot_dp(ai, b_rows + j * k, k));
        }
    }
}

void transpose(const float* src, std::size_t rows, std::size_t cols, float* dst) {
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t cc = 0; cc < cols; ++cc) {
            dst[cc * rows + r] = src[r * cols + cc];
        }
    }
}

void im2col_same(const float* img, std::size_t c, std::size_t h, std::size_t w,
                 std::size_t kernel, float* patches) {
    const std::size_t pad = kernel / 2;
    const std::size_t patch_len = c * kernel * kernel;
    std::memset(patches, 0, h * w * patch_len * sizeof(float));
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            float* row = patches + (y * w + x) * patch_len;
            for (std::size_t ch = 0; ch < c; ++ch) {
                const float* plane = img + ch * h * w;
                for (std::size_t ky = 0; ky < kernel; ++ky) {
                    const std::size_t sy = y + ky;
                    if (sy < pad || sy >= h + pad) continue;
                    const float* src_row = plane + (sy - pad) * w;
                    float* dst_row = row + (ch * kernel + ky) * kernel;
                    for (std::size_t kx = 0; kx < kernel; ++kx) {
                        const std::size_t sx = x + kx;
                        if (sx < pad || sx >= w + pad) continue;
                        dst_row[kx] = src_row[sx - pad];
                    }
                }
            }
        }
    }
}

void col2im_same_add(const float* patches, std::size_t c, std::size_t h, std::size_t w,
                     std::size_t kernel, float* img) {
    const std::size_t pad = kernel / 2;
    const std::size_t patch_len = c * kernel * kernel;
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            const float* row = patches + (y * w + x) * patch_len;
            for (std::size_t ch = 0; ch < c; ++ch) {
                float* plane = img + ch * h * w;
                for (std::size_t ky = 0; ky < kernel; ++ky) {
                    const std::size_t sy = y + ky;
                    if (sy < pad || sy >= h + pad) continue;
                    float* dst_row = plane + (sy - pad) * w;
                    const float* src_row = row + (ch * kernel + ky) * kernel;
                    for (std::size_t kx = 0; kx < kernel; ++kx) {
                        const std::size_t sx = x + kx;
                        if (sx < pad || sx >= w + pad) continue;
                        dst_row[sx - pad] += src_row[kx];
                    }
                }
            }
        }
    }
}

}  // namespace cim::kernels
