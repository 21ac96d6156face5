#include "cim/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "cim/errors.hpp"
#include "cim/loss.hpp"
#include "parallel.hpp"

namespace cim {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

std::vector<double> logits_of(const Model& m, const ParamMap& params, const Tensor& input,
                              bool post_softmax) {
    const Tensor out = forward_deployed(m, params, input);
    std::vector<double> v(out.data().begin(), out.data().end());
    if (post_softmax) {
        return softmax(std::span<const double>(v));
    }
    return v;
}

}  // namespace

std::vector<double> OutputChangeSamples::element_samples(std::size_t col) const {
    if (col >= classes) throw data_error("output element index out of range");
    std::vector<double> out(k);
    for (std::size_t row = 0; row < k; ++row) out[row] = at(row, col);
    return out;
}

std::vector<double> output_change(const Model& m, const Tensor& input, const NoiseSpec& spec,
                                  std::uint64_t sample_index, bool post_softmax) {
    const auto original = logits_of(m, programmed_params(m), input, post_softmax);
    const auto deployed =
        logits_of(m, deploy_params(m, spec, sample_index), input, post_softmax);
    std::vector<double> change(original.size());
    for (std::size_t i = 0; i < change.size(); ++i) change[i] = deployed[i] - original[i];
    return change;
}

OutputChangeSamples collect_changes(const Model& m, const Tensor& input, const NoiseSpec& spec,
                                    std::size_t k, bool post_softmax) {
    if (k < 1) throw config_error("collect_changes needs K >= 1");
    const auto original = logits_of(m, programmed_params(m), input, post_softmax);

    OutputChangeSamples samples;
    samples.noise = spec;
    samples.k = k;
    samples.classes = original.size();
    samples.matrix.assign(k * original.size(), 0.0);
    detail::parallel_for(k, [&](std::size_t j) {
        const auto dep = logits_of(m, deploy_params(m, spec, j), input, post_softmax);
        for (std::size_t c = 0; c < dep.size(); ++c) {
            samples.matrix[j * samples.classes + c] = dep[c] - original[c];
        }
    });
    for (double v : samples.matrix) {
        if (!std::isfinite(v)) throw numeric_error("non-finite output change");
    }
    return samples;
}

GaussianFit gaussian_fit(std::span<const double> samples) {
    if (samples.size() < 2) throw data_error("gaussian fit needs at least 2 samples");
    const double n = static_cast<double>(samples.size());
    double sum = 0.0;
    for (double v : samples) sum += v;
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : samples) ss += (v - mean) * (v - mean);
    const double var = ss / n;
    if (var <= 0.0) throw numeric_error("degenerate fit: zero variance");
    return {mean, std::sqrt(var)};
}

Histogram histogram_probabilities(std::span<const double> samples, std::size_t n_bins) {
    if (n_bins < 2) throw config_error("histogram needs at least 2 bins");
    if (samples.empty()) throw data_error("histogram of empty sample vector");
    const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
    const double lo = *lo_it, hi = *hi_it;
    if (!(hi > lo)) throw numeric_error("degenerate range: all samples equal");

    Histogram h;
    h.edges.resize(n_bins + 1);
    for (std::size_t i = 0; i <= n_bins; ++i) {
        h.edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_bins);
    }
    h.edges.front() = lo;
    h.edges.back() = hi;

    std::vector<std::size_t> counts(n_bins, 0);
    const double width = (hi - lo) / static_cast<double>(n_bins);
    for (double v : samples) {
        std::size_t bin = static_cast<std::size_t>((v - lo) / width);
        if (bin >= n_bins) bin = n_bins - 1;  // rightmost bin closed
        ++counts[bin];
    }
    h.observed.resize(n_bins);
    const double inv = 1.0 / static_cast<double>(samples.size());
    for (std::size_t i = 0; i < n_bins; ++i) {
        h.observed[i] = static_cast<double>(counts[i]) * inv;
    }
    return h;
}

std::vector<double> expected_probabilities(double mean, double stddev,
                                           std::span<const double> edges) {
    if (!(stddev > 0.0)) throw numeric_error("expected probabilities need stddev > 0");
    if (edges.size() < 2) throw config_error("need at least two bin edges");
    std::vector<double> e(edges.size() - 1);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double a = normal_cdf((edges[i] - mean) / stddev);
        const double b = normal_cdf((edges[i + 1] - mean) / stddev);
        e[i] = b - a;
    }
    return e;
}

double mse_metric(std::span<const double> observed, std::span<const double> expected) {
    if (observed.size() != expected.size()) throw data_error("metric length mismatch");
    if (observed.empty()) throw data_error("metric of empty vectors");
    double sum = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double d = observed[i] - expected[i];
        sum += d * d;
    }
    return sum / static_cast<double>(observed.size());
}

ChiSquareResult chi_square_metric(std::span<const double> observed,
                                  std::span<const double> expected, double eps) {
    if (observed.size() != expected.size()) throw data_error("metric length mismatch");
    ChiSquareResult r;
    std::size_t included = 0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (expected[i] < eps) {
            ++r.excluded_bins;
            continue;
        }
        const double d = observed[i] - expected[i];
        r.value += d * d / expected[i];
        ++included;
    }
    if (included == 0) throw numeric_error("all bins excluded from chi-square");
    return r;
}

FitReport run_study(const Model& m, const Dataset& data, std::size_t input_index,
                    const NoiseSpec& spec, std::size_t k, std::size_t n_bins,
                    bool post_softmax) {
    if (input_index >= data.size()) {
        throw config_error("input index " + std::to_string(input_index) +
                           " out of range for dataset of " + std::to_string(data.size()));
    }
    const Tensor input = data.example(input_index);
    const OutputChangeSamples samples = collect_changes(m, input, spec, k, post_softmax);

    FitReport report;
    report.input_index = input_index;
    report.noise = spec;
    report.k = k;
    report.bins = n_bins;
    report.post_softmax = post_softmax;

    double chi_sum = 0.0, mse_sum = 0.0;
    std::size_t fitted = 0;
    for (std::size_t c = 0; c < samples.classes; ++c) {
        ElementFit ef;
        ef.element = c;
        const auto col = samples.element_samples(c);
        try {
            const GaussianFit fit = gaussian_fit(col);
            const Histogram hist = histogram_probabilities(col, n_bins);
            ef.mean = fit.mean;
            ef.stddev = fit.stddev;
            ef.edges = hist.edges;
            ef.observed = hist.observed;
            ef.expected = expected_probabilities(fit.mean, fit.stddev, hist.edges);
            const ChiSquareResult chi = chi_square_metric(ef.observed, ef.expected);
            ef.chi_square = chi.value;
            ef.excluded_bins = chi.excluded_bins;
            ef.mse = mse_metric(ef.observed, ef.expected);
            chi_sum += ef.chi_square;
            mse_sum += ef.mse;
            ++fitted;
        } catch (const Error& e) {
            if (e.category() != "numeric") throw;
            ef.degenerate = true;
            ++report.degenerate_elements;
        }
        report.elements.push_back(std::move(ef));
    }
    if (fitted > 0) {
        report.avg_chi_square = chi_sum / static_cast<double>(fitted);
        report.avg_mse = mse_sum / static_cast<double>(fitted);
    }
    return report;
}

}  // namespace cim
