#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cim/analysis.hpp"
#include "cim/errors.hpp"
#include "cim/rng.hpp"

using namespace cim;

namespace {

Model scalar_linear_model(float w) {
    Model m;
    m.input_shape = {1};
    m.classes = 1;
    m.dense("fc0", 1, 1);
    m.params["fc0.weight"][0] = w;
    return m;
}

double normal_pdf(double x, double mu, double sd) {
    const double z = (x - mu) / sd;
    return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

// Adaptive Simpson quadrature, used as the independent oracle for
// expected_probabilities.
double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_quad(double a, double b, double mu, double sd, double eps, int depth) {
    const double m = 0.5 * (a + b);
    const double fa = normal_pdf(a, mu, sd), fb = normal_pdf(b, mu, sd),
                 fm = normal_pdf(m, mu, sd);
    const double whole = simpson(a, b, fa, fm, fb);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double left = simpson(a, m, fa, normal_pdf(lm, mu, sd), fm);
    const double right = simpson(m, b, fm, normal_pdf(rm, mu, sd), fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * eps) {
        return left + right + (left + right - whole) / 15.0;
    }
    return adaptive_quad(a, m, mu, sd, eps / 2.0, depth - 1) +
           adaptive_quad(m, b, mu, sd, eps / 2.0, depth - 1);
}

}  // namespace

TEST_CASE("output change is zero for sigma zero") {
    Model m = scalar_linear_model(1.5f);
    const auto change = output_change(m, Tensor({1}, {2.0f}), NoiseSpec{0.0, 0.0, 1, false}, 0);
    CHECK(change.size() == 1);
    CHECK(change[0] == 0.0);
}

TEST_CASE("output change of a linear model is noise times input") {
    Model m = scalar_linear_model(1.0f);
    const NoiseSpec spec{0.0, 0.05, 11, false};
    const float wn = sample_noise({1}, spec, 0, fnv1a64("fc0.weight", 10))[0];
    const float bn = sample_noise({1}, spec, 0, fnv1a64("fc0.bias", 8))[0];
    const auto change = output_change(m, Tensor({1}, {2.0f}), spec, 0);
    // y = (w+nw)*x + nb - w*x = nw*x + nb, up to float evaluation order
    CHECK(change[0] ==
          doctest::Approx(static_cast<double>(wn) * 2.0 + static_cast<double>(bn))
              .epsilon(1e-5));
}

TEST_CASE("output change matches a two-forward-pass oracle on a random MLP") {
    Model m;
    m.input_shape = {5};
    m.classes = 3;
    m.dense("fc0", 5, 8);
    m.relu();
    m.dense("fc1", 8, 3);
    m.init_params(31);

    Rng rng(4);
    Tensor input({5});
    for (auto& v : input.data()) v = static_cast<float>(rng.uniform(0.0, 1.0));
    const NoiseSpec spec{0.0, 0.04, 5, false};

    const Tensor clean = forward(m, input);
    const Tensor dep = forward_deployed(m, deploy_params(m, spec, 7), input);
    const auto change = output_change(m, input, spec, 7);
    for (std::size_t i = 0; i < 3; ++i) {
        REQUIRE(change[i] == doctest::Approx(static_cast<double>(dep[i]) -
                                             static_cast<double>(clean[i]))
                                 .epsilon(1e-12));
    }
}

TEST_CASE("collect_changes is reproducible and zero at sigma zero") {
    Model m = scalar_linear_model(2.0f);
    const Tensor input({1}, {1.0f});

    const auto zero = collect_changes(m, input, NoiseSpec{0.0, 0.0, 3, false}, 1);
    CHECK(zero.k == 1);
    CHECK(zero.matrix[0] == 0.0);

    const NoiseSpec spec{0.0, 0.1, 19, false};
    const auto a = collect_changes(m, input, spec, 32);
    const auto b = collect_changes(m, input, spec, 32);
    CHECK(a.matrix == b.matrix);
}

TEST_CASE("gaussian fit examples") {
    std::vector<double> constant(10, 3.25);
    CHECK_THROWS_AS(gaussian_fit(constant), Error);

    std::vector<double> pm{-1.0, 1.0};
    const GaussianFit fit = gaussian_fit(pm);
    CHECK(fit.mean == doctest::Approx(0.0));
    CHECK(fit.stddev == doctest::Approx(1.0));  // population divisor K
}

TEST_CASE("gaussian fit recovers generator parameters within 1 percent") {
    Rng rng(101);
    const std::size_t n = 1000000;
    std::vector<double> samples(n);
    for (auto& v : samples) v = 0.3 + 0.05 * rng.normal();
    const GaussianFit fit = gaussian_fit(samples);
    CHECK(fit.mean == doctest::Approx(0.3).epsilon(0.01));
    CHECK(fit.stddev == doctest::Approx(0.05).epsilon(0.01));
}

TEST_CASE("histogram probabilities examples") {
    std::vector<double> two{0.0, 1.0};
    const Histogram h2 = histogram_probabilities(two, 2);
    CHECK(h2.observed[0] == doctest::Approx(0.5));
    CHECK(h2.observed[1] == doctest::Approx(0.5));

    // uniform over bin centers -> equal probabilities
    std::vector<double> centers;
    for (int b = 0; b < 5; ++b) centers.push_back(0.1 + 0.2 * b);
    const Histogram h5 = histogram_probabilities(centers, 5);
    for (double p : h5.observed) CHECK(p == doctest::Approx(0.2));

    std::vector<double> degenerate(4, 1.0);
    CHECK_THROWS_AS(histogram_probabilities(degenerate, 4), Error);
}

TEST_CASE("histogram matches a direct counting oracle") {
    Rng rng(55);
    std::vector<double> samples(5000);
    for (auto& v : samples) v = rng.uniform(-2.0, 3.0);
    const std::size_t bins = 37;
    const Histogram h = histogram_probabilities(samples, bins);

    double sum = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
        std::size_t count = 0;
        for (double v : samples) {
            const bool last = (b + 1 == bins);
            if (v >= h.edges[b] && (last ? v <= h.edges[b + 1] : v < h.edges[b + 1])) ++count;
        }
        REQUIRE(h.observed[b] ==
                doctest::Approx(static_cast<double>(count) / 5000.0).epsilon(1e-12));
        sum += h.observed[b];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("expected probabilities: symmetry, totality, quadrature oracle") {
    // symmetric bins about the mean give symmetric masses
    std::vector<double> edges{-2.0, -1.0, 0.0, 1.0, 2.0};
    const auto sym = expected_probabilities(0.0, 0.7, edges);
    CHECK(sym[0] == doctest::Approx(sym[3]).epsilon(1e-12));
    CHECK(sym[1] == doctest::Approx(sym[2]).epsilon(1e-12));

    // one bin covering +-8 std holds essentially all mass
    std::vector<double> wide{-8.0, 8.0};
    CHECK(expected_probabilities(0.0, 1.0, wide)[0] == doctest::Approx(1.0).epsilon(1e-12));

    // arbitrary edges vs adaptive quadrature of the density
    std::vector<double> arb{-0.31, -0.05, 0.02, 0.4, 1.7};
    const double mu = 0.13, sd = 0.21;
    const auto e = expected_probabilities(mu, sd, arb);
    for (std::size_t i = 0; i + 1 < arb.size(); ++i) {
        const double oracle = adaptive_quad(arb[i], arb[i + 1], mu, sd, 1e-13, 40);
        REQUIRE(e[i] == doctest::Approx(oracle).epsilon(1e-9));
    }
}

TEST_CASE("mse and chi-square metrics") {
    std::vector<double> o{0.6, 0.4}, e{0.5, 0.5};
    CHECK(mse_metric(o, o) == 0.0);
    CHECK(mse_metric(o, e) == doctest::Approx(0.01));
    CHECK(chi_square_metric(o, o).value == 0.0);
    CHECK(chi_square_metric(o, e).value == doctest::Approx(0.04));

    std::vector<double> bad{0.1};
    CHECK_THROWS_AS(mse_metric(o, bad), Error);

    // epsilon exclusion
    std::vector<double> o2{0.5, 0.5, 0.0}, e2{0.5, 0.5, 1e-15};
    const auto chi = chi_square_metric(o2, e2);
    CHECK(chi.excluded_bins == 1);
    CHECK(chi.value == doctest::Approx(0.0));

    std::vector<double> all_tiny{1e-15, 1e-15};
    CHECK_THROWS_AS(chi_square_metric(o, all_tiny), Error);
}

TEST_CASE("metrics are permutation-covariant") {
    Rng rng(66);
    std::vector<double> o(20), e(20);
    for (std::size_t i = 0; i < 20; ++i) {
        o[i] = rng.uniform(0.0, 1.0);
        e[i] = rng.uniform(0.01, 1.0);
    }
    std::vector<std::size_t> perm = iota_indices(20);
    rng.shuffle(perm);
    std::vector<double> op(20), ep(20);
    for (std::size_t i = 0; i < 20; ++i) {
        op[i] = o[perm[i]];
        ep[i] = e[perm[i]];
    }
    CHECK(mse_metric(o, e) == doctest::Approx(mse_metric(op, ep)).epsilon(1e-12));
    CHECK(chi_square_metric(o, e).value ==
          doctest::Approx(chi_square_metric(op, ep).value).epsilon(1e-12));
}

TEST_CASE("metrics against independently computed random pairs") {
    Rng rng(31);
    for (int iter = 0; iter < 50; ++iter) {
        const std::size_t n = 10 + rng.uniform_index(50);
        std::vector<double> o(n), e(n);
        for (std::size_t i = 0; i < n; ++i) {
            o[i] = rng.uniform(0.0, 0.1);
            e[i] = rng.uniform(0.001, 0.1);
        }
        double mse = 0.0, chi = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mse += (o[i] - e[i]) * (o[i] - e[i]);
            chi += (o[i] - e[i]) * (o[i] - e[i]) / e[i];
        }
        mse /= static_cast<double>(n);
        REQUIRE(mse_metric(o, e) == doctest::Approx(mse).epsilon(1e-12));
        REQUIRE(chi_square_metric(o, e).value == doctest::Approx(chi).epsilon(1e-12));
    }
}

TEST_CASE("pipeline sanity: true gaussian draws pass the fit thresholds") {
    // 10k draws, 100 bins; chi^2 < 0.1 and MSE < 1e-3 in at least 99 of 100
    // seeded repetitions.
    int pass = 0;
    for (std::uint64_t rep = 0; rep < 100; ++rep) {
        Rng rng(derive_key(4242, rep));
        std::vector<double> samples(10000);
        for (auto& v : samples) v = 0.01 * rng.normal() - 0.002;
        const GaussianFit fit = gaussian_fit(samples);
        const Histogram hist = histogram_probabilities(samples, 100);
        const auto expected = expected_probabilities(fit.mean, fit.stddev, hist.edges);
        const double chi = chi_square_metric(hist.observed, expected).value;
        const double mse = mse_metric(hist.observed, expected);
        if (chi < 0.1 && mse < 1e-3) ++pass;
    }
    CHECK(pass >= 99);
}

TEST_CASE("bimodal mixture scores far worse than a gaussian") {
    Rng rng(17);
    std::vector<double> gauss(10000), mixture(10000);
    for (std::size_t i = 0; i < 10000; ++i) {
        gauss[i] = rng.normal();
        mixture[i] = (i % 2 == 0 ? -3.0 : 3.0) + 0.5 * rng.normal();
    }
    auto score = [](const std::vector<double>& samples) {
        const GaussianFit fit = gaussian_fit(samples);
        const Histogram hist = histogram_probabilities(samples, 100);
        const auto expected = expected_probabilities(fit.mean, fit.stddev, hist.edges);
        return chi_square_metric(hist.observed, expected).value;
    };
    const double chi_gauss = score(gauss);
    const double chi_mix = score(mixture);
    CHECK(chi_gauss < 0.1);
    CHECK(chi_mix > 10.0 * chi_gauss);
}

TEST_CASE("run_study handles sigma zero with degenerate flags, never a crash") {
    Dataset d;
    d.classes = 3;
    d.split = "test";
    d.images = Tensor({2, 1, 2, 2}, {0.1f, 0.2f, 0.3f, 0.4f, 0.5f, 0.6f, 0.7f, 0.8f});
    d.labels = {0, 1};
    Model m2;
    m2.input_shape = {1, 2, 2};
    m2.classes = 3;
    m2.flatten();
    m2.dense("fc0", 4, 3);
    m2.init_params(9);

    const FitReport report = run_study(m2, d, 0, NoiseSpec{0.0, 0.0, 1, false}, 16, 10);
    CHECK(report.degenerate_elements == 3);
    for (const auto& e : report.elements) CHECK(e.degenerate);
}

TEST_CASE("run_study report invariants on a real model") {
    Model m;
    m.input_shape = {1, 4, 4};
    m.classes = 5;
    m.conv2d("conv0", 1, 2, 3);
    m.relu();
    m.flatten();
    m.dense("fc0", 32, 5);
    m.init_params(123);

    Dataset d;
    d.classes = 5;
    d.split = "test";
    d.images = Tensor({3, 1, 4, 4});
    Rng rng(8);
    for (auto& v : d.images.data()) v = static_cast<float>(rng.uniform(0.0, 1.0));
    d.labels = {0, 1, 2};

    const FitReport report = run_study(m, d, 1, NoiseSpec{0.0, 0.04, 77, false}, 2000, 50);
    CHECK(report.elements.size() == 5);
    CHECK(report.degenerate_elements == 0);
    for (const auto& e : report.elements) {
        double osum = 0.0, esum = 0.0;
        for (double v : e.observed) osum += v;
        for (double v : e.expected) esum += v;
        REQUIRE(osum == doctest::Approx(1.0).epsilon(1e-9));
        REQUIRE(esum <= 1.0 + 1e-12);
        // 1 - sum(E) is at most the Gaussian mass outside [min, max]
        const double lo = e.edges.front(), hi = e.edges.back();
        const double below = 0.5 * std::erfc((e.mean - lo) / (e.stddev * std::sqrt(2.0)));
        const double above = 0.5 * std::erfc((hi - e.mean) / (e.stddev * std::sqrt(2.0)));
        REQUIRE(1.0 - esum <= below + above + 1e-12);
    }
}
