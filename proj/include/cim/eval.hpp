#pragma once

#include <span>
#include <string>

#include "cim/dataset.hpp"
#include "cim/deploy.hpp"

namespace cim {

enum class Statistic { Mean, P95Min, Max };

Statistic statistic_from_string(const std::string& s);
std::string to_string(Statistic s);

/// Distribution of perturbed test accuracies over K independent deployments.
struct EvalDistribution {
    std::vector<double> samples;  // accuracy per noise sample, index-ordered
    double clean_accuracy = 0.0;  // sigma = 0
    double mean = 0.0;
    double p95min = 0.0;  // empirical 5th percentile (nearest rank)
    double max = 0.0;
    NoiseSpec noise;
    std::size_t k = 0;
};

/// mean: double-precision sum / K. p95min: nearest-rank value at
/// ceil(0.05*K) in ascending order. max: maximum sample.
double reduce(std::span<const double> samples, Statistic statistic);

/// Accuracy of the model with its programmed (unperturbed) weights.
double clean_accuracy(const Model& m, const Dataset& test);

/// Fraction of test examples whose argmax class under W + N_j matches the label.
double evaluate_once(const Model& m, const Dataset& test, const NoiseSpec& spec,
                     std::uint64_t sample_index);

/// K deployments with sample_index 0..K-1; reductions populated. The K
/// evaluations are independent and run in parallel, results ordered by index.
EvalDistribution evaluate_distribution(const Model& m, const Dataset& test,
                                       const NoiseSpec& spec, std::size_t k);

}  // namespace cim
