#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "maskbench/image.hpp"

namespace maskbench {

// Normalized 1-D Gaussian kernel of odd size. Sigma follows the common
// convention sigma = 0.3 * ((size - 1) * 0.5 - 1) + 0.8, so the kernel size
// stays the single user-facing knob.
struct BlurKernel {
    int size = 1;
    double sigma = 0.0;
    std::vector<double> coefficients;

    static BlurKernel from_size(int kernel_size) {
        if (kernel_size < 1 || kernel_size % 2 == 0)
            throw std::invalid_argument("BlurKernel: size must be odd and positive, got " +
                                        std::to_string(kernel_size));
        BlurKernel k;
        k.size = kernel_size;
        k.sigma = 0.3 * ((kernel_size - 1) * 0.5 - 1.0) + 0.8;
        k.coefficients.resize(kernel_size);
        const int r = kernel_size / 2;
        double sum = 0.0;
        for (int i = -r; i <= r; ++i) {
            const double w = std::exp(-(static_cast<double>(i) * i) / (2.0 * k.sigma * k.sigma));
            k.coefficients[i + r] = w;
            sum += w;
        }
        for (double& w : k.coefficients) w /= sum;
        return k;
    }
};

namespace detail {

// Half-sample symmetric reflection: ...cba|abc...xyz|zyx... Folds repeatedly
// so kernels wider than the image stay defined. This extension preserves the
// image sum under a normalized symmetric kernel.
inline int reflect_index(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * n;
    i %= period;
    if (i < 0) i += period;
    return (i < n) ? i : period - 1 - i;
}

} // namespace detail

// Separable Gaussian convolution, reflect borders, size 1 is the identity.
// Intermediate rows stay in double; rounding happens once at the final store.
inline ImageBuffer gaussian_blur(const ImageBuffer& img, int kernel_size) {
    const BlurKernel kernel = BlurKernel::from_size(kernel_size);
    if (kernel_size == 1)
        return img;

    const int w = img.width, h = img.height, ch = img.channels;
    const int r = kernel_size / 2;
    const std::size_t plane = static_cast<std::size_t>(w) * h * ch;

    std::vector<double> tmp(plane);
    // Horizontal pass.
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < ch; ++c) {
                double acc = 0.0;
                for (int k = -r; k <= r; ++k) {
                    const int sx = detail::reflect_index(x + k, w);
                    acc += kernel.coefficients[k + r] * img.at(sx, y, c);
                }
                tmp[(static_cast<std::size_t>(y) * w + x) * ch + c] = acc;
            }
        }
    }

    ImageBuffer out(w, h, ch);
    // Vertical pass.
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < ch; ++c) {
                double acc = 0.0;
                for (int k = -r; k <= r; ++k) {
                    const int sy = detail::reflect_index(y + k, h);
                    acc += kernel.coefficients[k + r] * tmp[(static_cast<std::size_t>(sy) * w + x) * ch + c];
                }
                out.at(x, y, c) = store_u8(acc);
            }
        }
    }
    return out;
}

} // namespace maskbench
