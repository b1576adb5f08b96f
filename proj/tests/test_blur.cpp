#include <catch2/catch.hpp>

#include "maskbench/blur.hpp"
#include "maskbench/rng.hpp"
#include "support/oracles.hpp"

using namespace maskbench;

TEST_CASE("BlurKernel coefficients are symmetric and normalized") {
    for (int size : {1, 3, 5, 9, 31}) {
        const BlurKernel k = BlurKernel::from_size(size);
        REQUIRE(static_cast<int>(k.coefficients.size()) == size);
        double sum = 0.0;
        for (int i = 0; i < size; ++i) {
            sum += k.coefficients[static_cast<std::size_t>(i)];
            CHECK(k.coefficients[static_cast<std::size_t>(i)] ==
                  Approx(k.coefficients[static_cast<std::size_t>(size - 1 - i)]).margin(0.0));
        }
        CHECK(sum == Approx(1.0).margin(1e-9));
        CHECK(k.sigma > 0.0);
    }
}

TEST_CASE("BlurKernel sigma follows the size convention") {
    CHECK(BlurKernel::from_size(3).sigma == Approx(0.8));
    CHECK(BlurKernel::from_size(5).sigma == Approx(1.1));
    CHECK(BlurKernel::from_size(7).sigma == Approx(1.4));
}

TEST_CASE("gaussian_blur rejects even or non-positive sizes") {
    const ImageBuffer img(4, 4, 3);
    CHECK_THROWS_AS(gaussian_blur(img, 2), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_blur(img, 0), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_blur(img, -3), std::invalid_argument);
}

TEST_CASE("gaussian_blur keeps constant images constant") {
    ImageBuffer img(9, 7, 3);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        img.data[i] = static_cast<std::uint8_t>(50 + (i % 3) * 60); // constant per channel
    for (int size : {3, 5, 11})
        CHECK(gaussian_blur(img, size).data == img.data);
}

TEST_CASE("gaussian_blur size 1 is the identity") {
    Rng rng(3);
    ImageBuffer img(8, 8, 4);
    for (auto& v : img.data) v = static_cast<std::uint8_t>(rng.next_below(256));
    CHECK(gaussian_blur(img, 1).data == img.data);
}

TEST_CASE("impulse row matches the hand convolution") {
    ImageBuffer img(5, 1, 1);
    img.data = {0, 0, 255, 0, 0};
    const ImageBuffer out = gaussian_blur(img, 3);

    const std::vector<double> expected =
        oracle::convolve_reflect_1d({0, 0, 255, 0, 0}, 3);
    for (int x = 0; x < 5; ++x)
        CHECK(static_cast<int>(out.at(x, 0, 0)) ==
              static_cast<int>(std::round(expected[static_cast<std::size_t>(x)])));

    // symmetric neighbors agree, and the center equals 255 * center weight
    CHECK(out.at(1, 0, 0) == out.at(3, 0, 0));
    CHECK(out.at(0, 0, 0) == out.at(4, 0, 0));
    const double sigma = 0.8; // documented value for size 3
    const double w = std::exp(-1.0 / (2.0 * sigma * sigma));
    const double center = 1.0 / (1.0 + 2.0 * w);
    CHECK(static_cast<int>(out.at(2, 0, 0)) == static_cast<int>(std::round(255.0 * center)));
}

TEST_CASE("gaussian_blur preserves the mean within one step") {
    Rng rng(41);
    for (int trial = 0; trial < 10; ++trial) {
        const int w = 2 + static_cast<int>(rng.next_below(30));
        const int h = 2 + static_cast<int>(rng.next_below(30));
        ImageBuffer img(w, h, 3);
        for (auto& v : img.data) v = static_cast<std::uint8_t>(rng.next_below(256));
        const int size = 1 + 2 * static_cast<int>(rng.next_below(6));
        const ImageBuffer out = gaussian_blur(img, size);

        for (int c = 0; c < 3; ++c) {
            double before = 0.0, after = 0.0;
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    before += img.at(x, y, c);
                    after += out.at(x, y, c);
                }
            const double n = static_cast<double>(w) * h;
            CHECK(std::abs(before / n - after / n) <= 1.0);
        }
    }
}
