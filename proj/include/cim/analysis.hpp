#pragma once

#include <span>

#include "cim/dataset.hpp"
#include "cim/deploy.hpp"

namespace cim {

/// K x C matrix of output-change vectors: row j is F(W + N_j, I) - F(W, I).
struct OutputChangeSamples {
    std::size_t input_index = 0;
    NoiseSpec noise;
    std::size_t k = 0;
    std::size_t classes = 0;
    std::vector<double> matrix;  // row-major K x C

    double at(std::size_t row, std::size_t col) const { return matrix[row * classes + col]; }
    /// Column `col` gathered across all K rows.
    std::vector<double> element_samples(std::size_t col) const;
};

/// Output change for one noise sample, on pre-softmax logits by default.
std::vector<double> output_change(const Model& m, const Tensor& input, const NoiseSpec& spec,
                                  std::uint64_t sample_index, bool post_softmax = false);

/// K output-change rows using sample_index 0..K-1; reproducible per seed.
OutputChangeSamples collect_changes(const Model& m, const Tensor& input, const NoiseSpec& spec,
                                    std::size_t k, bool post_softmax = false);

struct GaussianFit {
    double mean = 0.0;
    double stddev = 0.0;  // population-style, divisor K
};

/// Maximum-likelihood Gaussian fit; zero variance raises a numeric error
/// ("degenerate fit").
GaussianFit gaussian_fit(std::span<const double> samples);

struct Histogram {
    std::vector<double> edges;     // n_bins + 1, spanning [min, max]
    std::vector<double> observed;  // probabilities, sum to 1
};

/// Equal-width bins over the empirical [min, max]; rightmost bin closed.
Histogram histogram_probabilities(std::span<const double> samples, std::size_t n_bins);

/// E_i = Phi((edge_{i+1}-mean)/std) - Phi((edge_i-mean)/std), double-precision CDF.
std::vector<double> expected_probabilities(double mean, double stddev,
                                           std::span<const double> edges);

/// (1/N) * sum (O_i - E_i)^2
double mse_metric(std::span<const double> observed, std::span<const double> expected);

struct ChiSquareResult {
    double value = 0.0;
    std::size_t excluded_bins = 0;  // bins with E_i below epsilon
};

/// sum (O_i - E_i)^2 / E_i over bins with E_i >= eps.
ChiSquareResult chi_square_metric(std::span<const double> observed,
                                  std::span<const double> expected, double eps = 1e-12);

/// Goodness-of-fit record for one output element.
struct ElementFit {
    std::size_t element = 0;
    bool degenerate = false;  // zero-variance samples (e.g. sigma = 0)
    double mean = 0.0;
    double stddev = 0.0;
    double chi_square = 0.0;
    double mse = 0.0;
    std::size_t excluded_bins = 0;
    std::vector<double> edges;
    std::vector<double> observed;
    std::vector<double> expected;
};

struct FitReport {
    std::size_t input_index = 0;
    NoiseSpec noise;
    std::size_t k = 0;
    std::size_t bins = 100;
    bool post_softmax = false;
    std::vector<ElementFit> elements;
    std::size_t degenerate_elements = 0;
    double avg_chi_square = 0.0;  // over non-degenerate elements
    double avg_mse = 0.0;
};

/// Full study for one input image: collect K change vectors, histogram and
/// fit each output element, and score the fits.
FitReport run_study(const Model& m, const Dataset& data, std::size_t input_index,
                    const NoiseSpec& spec, std::size_t k, std::size_t n_bins,
                    bool post_softmax = false);

}  // namespace cim
