#include "cim/eval.hpp"

#include <algorithm>
#include <cmath>

#include "cim/errors.hpp"
#include "cim/loss.hpp"
#include "parallel.hpp"

namespace cim {

namespace {

constexpr std::size_t kEvalChunk = 128;

double accuracy_with_params(const Model& m, const ParamMap& params, const Dataset& test) {
    if (test.size() == 0) throw data_error("empty test set");
    std::size_t correct = 0;
    std::vector<std::size_t> idx;
    for (std::size_t start = 0; start < test.size(); start += kEvalChunk) {
        const std::size_t end = std::min(test.size(), start + kEvalChunk);
        idx.clear();
        for (std::size_t i = start; i < end; ++i) idx.push_back(i);
        const Tensor batch = test.gather(idx);
        const Tensor logits = forward_deployed(m, params, batch);
        const std::size_t c = logits.extent(1);
        for (std::size_t r = 0; r < idx.size(); ++r) {
            std::span<const float> row(logits.data().data() + r * c, c);
            if (argmax_class(row) == static_cast<std::size_t>(test.labels[idx[r]])) ++correct;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(test.size());
}

}  // namespace

Statistic statistic_from_string(const std::string& s) {
    if (s == "mean") return Statistic::Mean;
    if (s == "p95min") return Statistic::P95Min;
    if (s == "max") return Statistic::Max;
    throw config_error("unknown statistic '" + s + "' (expected mean|p95min|max)");
}

std::string to_string(Statistic s) {
    switch (s) {
        case Statistic::Mean: return "mean";
        case Statistic::P95Min: return "p95min";
        case Statistic::Max: return "max";
    }
    return "?";
}

double reduce(std::span<const double> samples, Statistic statistic) {
    if (samples.empty()) throw data_error("reduce of empty sample vector");
    switch (statistic) {
        case Statistic::Mean: {
            double sum = 0.0;
            for (double v : samples) sum += v;
            return sum / static_cast<double>(samples.size());
        }
        case Statistic::P95Min: {
            std::vector<double> sorted(samples.begin(), samples.end());
            std::sort(sorted.begin(), sorted.end());
            const std::size_t k = samples.size();
            const std::size_t rank = static_cast<std::size_t>(
                std::ceil(0.05 * static_cast<double>(k)));
            return sorted[std::max<std::size_t>(rank, 1) - 1];
        }
        case Statistic::Max: {
            double mx = samples[0];
            for (double v : samples) mx = std::max(mx, v);
            return mx;
        }
    }
    throw config_error("unknown statistic");
}

double clean_accuracy(const Model& m, const Dataset& test) {
    return accuracy_with_params(m, programmed_params(m), test);
}

double evaluate_once(const Model& m, const Dataset& test, const NoiseSpec& spec,
                     std::uint64_t sample_index) {
    return accuracy_with_params(m, deploy_params(m, spec, sample_index), test);
}

EvalDistribution evaluate_distribution(const Model& m, const Dataset& test,
                                       const NoiseSpec& spec, std::size_t k) {
    if (k < 1) throw config_error("evaluation needs K >= 1 noise samples");
    EvalDistribution dist;
    dist.noise = spec;
    dist.k = k;
    dist.samples.assign(k, 0.0);
    detail::parallel_for(k, [&](std::size_t i) {
        dist.samples[i] = evaluate_once(m, test, spec, i);
    });
    dist.clean_accuracy = clean_accuracy(m, test);
    dist.mean = reduce(dist.samples, Statistic::Mean);
    dist.p95min = reduce(dist.samples, Statistic::P95Min);
    dist.max = reduce(dist.samples, Statistic::Max);
    return dist;
}

}  // namespace cim
