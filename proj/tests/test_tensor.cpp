#include <doctest.h>

#include <cmath>
#include <limits>

#include "cim/errors.hpp"
#include "cim/loss.hpp"
#include "cim/model.hpp"
#include "cim/rng.hpp"
#include "cim/tensor.hpp"

using namespace cim;

TEST_CASE("tensor shape and data invariants") {
    Tensor t({2, 3});
    CHECK(t.size() == 6);
    CHECK(t.rank() == 2);
    CHECK_THROWS_AS(Tensor({2, 0}), Error);
    CHECK_THROWS_AS(Tensor({2, 2}, {1.0f, 2.0f, 3.0f}), Error);
}

TEST_CASE("tensor finiteness check") {
    Tensor t({2}, {1.0f, 2.0f});
    CHECK(t.all_finite());
    t[1] = std::numeric_limits<float>::infinity();
    CHECK_FALSE(t.all_finite());
    CHECK_THROWS_AS(t.require_finite("test"), Error);
}

TEST_CASE("softmax trivial symmetry") {
    std::vector<float> two{0.0f, 0.0f};
    auto p = softmax(std::span<const float>(two));
    CHECK(p[0] == doctest::Approx(0.5));
    CHECK(p[1] == doctest::Approx(0.5));

    std::vector<float> four{3.0f, 3.0f, 3.0f, 3.0f};
    p = softmax(std::span<const float>(four));
    for (double v : p) CHECK(v == doctest::Approx(0.25));
}

TEST_CASE("softmax matches double-precision exp-normalize") {
    std::vector<float> logits{1.0f, 2.0f};
    const auto p = softmax(std::span<const float>(logits));
    const double e1 = std::exp(1.0), e2 = std::exp(2.0);
    CHECK(p[0] == doctest::Approx(e1 / (e1 + e2)).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(e2 / (e1 + e2)).epsilon(1e-12));
}

TEST_CASE("softmax sums to one and is shift-invariant over random vectors") {
    Rng rng(7);
    for (int iter = 0; iter < 10000; ++iter) {
        std::vector<double> logits(10);
        for (auto& v : logits) v = rng.uniform(-20.0, 20.0);
        const auto p = softmax(std::span<const double>(logits));
        double sum = 0.0;
        for (double v : p) {
            REQUIRE(v >= 0.0);
            sum += v;
        }
        REQUIRE(sum == doctest::Approx(1.0).epsilon(1e-6));
    }
    Rng rng2(8);
    for (int iter = 0; iter < 100; ++iter) {
        std::vector<double> logits(6), shifted(6);
        const double c = rng2.uniform(-5.0, 5.0);
        for (std::size_t i = 0; i < 6; ++i) {
            logits[i] = rng2.uniform(-10.0, 10.0);
            shifted[i] = logits[i] + c;
        }
        const auto a = softmax(std::span<const double>(logits));
        const auto b = softmax(std::span<const double>(shifted));
        for (std::size_t i = 0; i < 6; ++i) REQUIRE(a[i] == doctest::Approx(b[i]).epsilon(1e-6));
    }
}

TEST_CASE("argmax examples and tie-break") {
    std::vector<float> v{0.1f, 0.9f, 0.3f};
    CHECK(argmax_class(std::span<const float>(v)) == 1);
    std::vector<float> tie{0.5f, 0.5f};
    CHECK(argmax_class(std::span<const float>(tie)) == 0);
    std::vector<float> empty;
    CHECK_THROWS_AS(argmax_class(std::span<const float>(empty)), Error);
}

TEST_CASE("argmax agrees with linear scan on random vectors") {
    Rng rng(99);
    for (int iter = 0; iter < 200; ++iter) {
        std::vector<float> v(10);
        for (auto& x : v) x = static_cast<float>(rng.uniform(-1.0, 1.0));
        std::size_t best = 0;
        for (std::size_t i = 1; i < v.size(); ++i) {
            if (v[i] > v[best]) best = i;
        }
        REQUIRE(argmax_class(std::span<const float>(v)) == best);
    }
}

TEST_CASE("softmax preserves argmax (monotonicity)") {
    Rng rng(123);
    for (int iter = 0; iter < 1000; ++iter) {
        std::vector<float> v(10);
        for (auto& x : v) x = static_cast<float>(rng.uniform(-20.0, 20.0));
        const auto p = softmax(std::span<const float>(v));
        REQUIRE(argmax_class(std::span<const float>(v)) ==
                argmax_class(std::span<const double>(p)));
    }
}

TEST_CASE("cross entropy limits and exact values") {
    Tensor strong({1, 3}, {40.0f, 0.0f, 0.0f});
    std::vector<int> label0{0};
    CHECK(cross_entropy_loss(strong, label0).scalar == doctest::Approx(0.0).epsilon(1e-6));

    Tensor uniform({1, 10});
    std::vector<int> label3{3};
    CHECK(cross_entropy_loss(uniform, label3).scalar ==
          doctest::Approx(std::log(10.0)).epsilon(1e-6));

    CHECK_THROWS_AS(cross_entropy_loss(uniform, std::vector<int>{11}), Error);
}

TEST_CASE("cross entropy batch matches double-precision oracle") {
    Tensor logits({2, 3}, {0.3f, -1.2f, 2.0f, 1.0f, 1.5f, -0.5f});
    std::vector<int> labels{2, 0};
    const LossValue loss = cross_entropy_loss(logits, labels);

    double expect = 0.0;
    const double rows[2][3] = {{0.3f, -1.2f, 2.0f}, {1.0f, 1.5f, -0.5f}};
    const int lab[2] = {2, 0};
    for (int r = 0; r < 2; ++r) {
        double mx = rows[r][0];
        for (double v : rows[r]) mx = std::max(mx, v);
        double sum = 0.0;
        for (double v : rows[r]) sum += std::exp(v - mx);
        expect += -(rows[r][lab[r]] - mx - std::log(sum));
    }
    expect /= 2.0;
    CHECK(loss.scalar == doctest::Approx(expect).epsilon(1e-6));

    double mean = 0.0;
    for (float v : loss.per_sample) mean += static_cast<double>(v);
    mean /= static_cast<double>(loss.per_sample.size());
    CHECK(loss.scalar == doctest::Approx(mean).epsilon(1e-7));
}

TEST_CASE("sgd step examples") {
    ParamMap params, grads;
    params["w"] = Tensor({1}, {1.0f});
    grads["w"] = Tensor({1}, {0.5f});

    ParamMap frozen = params;
    sgd_step(frozen, grads, 0.0);
    CHECK(frozen["w"][0] == 1.0f);

    sgd_step(params, grads, 0.1);
    CHECK(params["w"][0] == doctest::Approx(0.95f));
}

TEST_CASE("sgd step matches elementwise oracle on random tensors") {
    Rng rng(5);
    ParamMap params, grads;
    Tensor p({4, 7});
    Tensor g({4, 7});
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = static_cast<float>(rng.uniform(-2.0, 2.0));
        g[i] = static_cast<float>(rng.uniform(-2.0, 2.0));
    }
    params["w"] = p;
    grads["w"] = g;
    const double lr = 0.013;
    sgd_step(params, grads, lr);
    for (std::size_t i = 0; i < p.size(); ++i) {
        const float expect = static_cast<float>(static_cast<double>(p[i]) -
                                                lr * static_cast<double>(g[i]));
        REQUIRE(params["w"][i] == expect);
    }

    ParamMap bad;
    bad["w"] = Tensor({3});
    CHECK_THROWS_AS(sgd_step(params, bad, 0.1), Error);
}
