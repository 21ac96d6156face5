#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cim/eval.hpp"
#include "cim/train.hpp"

namespace cim {

/// Child-network template dimensions plus the per-layer choice lists.
/// Full-scale values: 6 conv + 2 FC, hidden 1024, channels {24,36,48,64},
/// filter {1,3,5,7}, int bits {0..3}, fraction bits {0..6}.
struct SearchSpace {
    std::vector<std::size_t> input_shape{3, 32, 32};
    std::size_t classes = 10;
    std::size_t conv_layers = 6;
    std::size_t fc_layers = 2;
    std::size_t fc_hidden = 1024;
    std::vector<std::size_t> channel_choices{24, 36, 48, 64};
    std::vector<std::size_t> filter_choices{1, 3, 5, 7};
    std::vector<int> int_bit_choices{0, 1, 2, 3};
    std::vector<int> frac_bit_choices{0, 1, 2, 3, 4, 5, 6};
    bool quantized = true;

    /// Cardinality of each decision slot, in sampling order: per conv layer
    /// (channels, filter, int bits, frac bits), then per FC layer
    /// (int bits, frac bits).
    std::vector<std::size_t> slot_cardinalities() const;
    std::string slot_name(std::size_t slot) const;
    void validate() const;
};

struct ConvChoice {
    std::size_t channels = 0;
    std::size_t filter = 0;
    int int_bits = 0;
    int frac_bits = 0;
    bool operator==(const ConvChoice&) const = default;
};

struct FcChoice {
    int int_bits = 0;
    int frac_bits = 0;
    bool operator==(const FcChoice&) const = default;
};

/// Decoded genome: one token per decision slot plus the layer choices they
/// decode to. decode(encode(a)) == a.
struct ArchitectureSpec {
    std::vector<std::size_t> tokens;
    std::vector<ConvChoice> conv;
    std::vector<FcChoice> fc;
    std::size_t fc_hidden = 0;
    std::vector<std::size_t> input_shape;
    std::size_t classes = 10;
    bool quantized = true;

    bool operator==(const ArchitectureSpec&) const = default;
};

ArchitectureSpec decode_architecture(const SearchSpace& space,
                                     std::span<const std::size_t> tokens);
std::vector<std::size_t> encode_architecture(const ArchitectureSpec& arch);

/// Instantiates the child network: [conv+ReLU] x conv_layers, flatten,
/// hidden FC layers with ReLU, and a final FC producing the class logits.
Model build_child_model(const ArchitectureSpec& arch);

struct ControllerConfig {
    std::size_t hidden = 64;
    std::size_t embed = 32;
    double lr = 5e-3;
    double baseline_decay = 0.95;
    std::uint64_t seed = 0;
};

/// Recurrent policy over the decision slots: an LSTM cell consumes the
/// embedding of the previous token and a per-slot linear head produces the
/// choice logits. Heads start at zero, so the initial policy is uniform.
class Controller {
public:
    Controller(std::vector<std::size_t> cardinalities, ControllerConfig cfg);

    struct SampleResult {
        std::vector<std::size_t> tokens;
        std::vector<double> log_probs;  // per slot, of the sampled token
        double total_log_prob = 0.0;
    };

    /// Samples one token sequence; draws are keyed by the internal episode
    /// counter, so a fixed controller seed replays the same sequence of
    /// architectures given the same rewards.
    SampleResult sample_architecture();

    struct UpdateResult {
        bool applied = false;  // false when a non-finite gradient was skipped
        double advantage = 0.0;
    };

    /// REINFORCE step: move parameters along grad sum(log p) * (reward -
    /// baseline), then fold the reward into the EMA baseline. The baseline
    /// initializes to the first reward.
    UpdateResult update(const SampleResult& sample, double reward);

    /// Choice distribution at slot `prefix.size()` after consuming `prefix`.
    std::vector<double> slot_probabilities(std::span<const std::size_t> prefix) const;

    double baseline() const noexcept { return baseline_ ? *baseline_ : 0.0; }
    std::size_t episodes_sampled() const noexcept { return episode_counter_; }
    const std::vector<std::size_t>& cardinalities() const noexcept { return cards_; }

private:
    struct StepCache;
    void step_forward(std::size_t slot, std::span<const float> x, std::vector<float>& h,
                      std::vector<float>& c, StepCache* cache) const;
    std::vector<double> step_logits(std::size_t slot, std::span<const float> h) const;

    std::vector<std::size_t> cards_;
    ControllerConfig cfg_;
    std::size_t episode_counter_ = 0;
    std::optional<double> baseline_;

    // Parameters (float storage, double-precision accumulation in updates).
    std::vector<float> start_;                  // E
    std::vector<float> wx_, wh_, b_;            // 4H x E, 4H x H, 4H
    std::vector<std::vector<float>> embed_;     // slot t: cards[t] x E (input of slot t+1)
    std::vector<std::vector<float>> head_w_;    // slot t: cards[t] x H
    std::vector<std::vector<float>> head_b_;    // slot t: cards[t]
};

/// reward = reduce(dist.samples, statistic); no rescaling.
double compute_reward(const EvalDistribution& dist, Statistic statistic);

struct EpisodeRecord {
    std::size_t episode = 0;
    ArchitectureSpec arch;
    EvalDistribution dist;
    double reward = 0.0;
    double wall_time_s = 0.0;
    bool failed = false;  // child training failed; reward forced to 0
    std::size_t trained_batches = 0;
};

/// True when the same architecture was sampled `repeat_t` consecutive times
/// or the episode count reached `episode_limit`.
bool check_termination(const std::vector<EpisodeRecord>& history, std::size_t episode_limit,
                       std::size_t repeat_t = 5);

struct SearchConfig {
    std::size_t episodes = 100;
    std::size_t child_epochs = 1;
    std::size_t eval_samples = 5;  // K
    Statistic statistic = Statistic::Mean;
    NoiseSpec noise;
    std::uint64_t seed = 0;
    std::size_t child_batch_size = 32;
    double child_lr = 0.05;
    std::size_t repeat_termination = 5;
    ControllerConfig controller;  // controller seed derived from `seed` when 0
};

struct SearchResult {
    EpisodeRecord best;
    std::vector<EpisodeRecord> history;
};

/// Trains and evaluates one candidate architecture exactly as an episode of
/// run_search does (same derived seeds per episode index). A failing child
/// yields reward 0 with the failure flag set.
EpisodeRecord run_episode(const ArchitectureSpec& arch, const SearchConfig& cfg,
                          std::size_t episode_index, const Dataset& train_set,
                          const Dataset& test_set);

/// The UAE loop: sample architecture, noise-train the child, evaluate the
/// perturbed-accuracy distribution, reduce it to a reward, update the
/// controller. A failing child records reward 0 and the search continues.
/// `on_episode` fires after every episode (history persistence hook).
SearchResult run_search(const SearchSpace& space, const SearchConfig& cfg,
                        const Dataset& train_set, const Dataset& test_set,
                        const std::function<void(const EpisodeRecord&)>& on_episode = {});

}  // namespace cim
