#include "cim/nas.hpp"

#include <chrono>
#include <cmath>

#include "cim/errors.hpp"
#include "cim/rng.hpp"
#include "kernels.hpp"

namespace cim {

// ---------------------------------------------------------------------------
// Search space and architecture encoding

std::vector<std::size_t> SearchSpace::slot_cardinalities() const {
    std::vector<std::size_t> cards;
    for (std::size_t i = 0; i < conv_layers; ++i) {
        cards.push_back(channel_choices.size());
        cards.push_back(filter_choices.size());
        cards.push_back(int_bit_choices.size());
        cards.push_back(frac_bit_choices.size());
    }
    for (std::size_t j = 0; j < fc_layers; ++j) {
        cards.push_back(int_bit_choices.size());
        cards.push_back(frac_bit_choices.size());
    }
    return cards;
}

std::string SearchSpace::slot_name(std::size_t slot) const {
    static const char* conv_dims[] = {"channels", "filter", "int_bits", "frac_bits"};
    static const char* fc_dims[] = {"int_bits", "frac_bits"};
    if (slot < conv_layers * 4) {
        return "conv" + std::to_string(slot / 4) + "." + conv_dims[slot % 4];
    }
    const std::size_t rest = slot - conv_layers * 4;
    if (rest < fc_layers * 2) {
        return "fc" + std::to_string(rest / 2) + "." + fc_dims[rest % 2];
    }
    throw config_error("slot index out of range");
}

void SearchSpace::validate() const {
    if (fc_layers < 1) throw config_error("search space needs at least one FC layer");
    if (channel_choices.empty() || filter_choices.empty() || int_bit_choices.empty() ||
        frac_bit_choices.empty()) {
        throw config_error("search space choice lists must be non-empty");
    }
    for (std::size_t f : filter_choices) {
        if (f % 2 == 0) throw config_error("filter sizes must be odd for same padding");
    }
    if (conv_layers > 0 && input_shape.size() != 3) {
        throw config_error("convolutional search space needs a (C,H,W) input shape");
    }
    if (classes < 2) throw config_error("search space needs at least 2 classes");
}

ArchitectureSpec decode_architecture(const SearchSpace& space,
                                     std::span<const std::size_t> tokens) {
    const auto cards = space.slot_cardinalities();
    if (tokens.size() != cards.size()) {
        throw config_error("token count " + std::to_string(tokens.size()) +
                           " does not match " + std::to_string(cards.size()) + " slots");
    }
    for (std::size_t t = 0; t < tokens.size(); ++t) {
        if (tokens[t] >= cards[t]) {
            throw config_error("token " + std::to_string(tokens[t]) + " out of range for slot " +
                               space.slot_name(t));
        }
    }

    ArchitectureSpec arch;
    arch.tokens.assign(tokens.begin(), tokens.end());
    arch.fc_hidden = space.fc_hidden;
    arch.input_shape = space.input_shape;
    arch.classes = space.classes;
    arch.quantized = space.quantized;
    std::size_t t = 0;
    for (std::size_t i = 0; i < space.conv_layers; ++i) {
        ConvChoice cc;
        cc.channels = space.channel_choices[tokens[t++]];
        cc.filter = space.filter_choices[tokens[t++]];
        cc.int_bits = space.int_bit_choices[tokens[t++]];
        cc.frac_bits = space.frac_bit_choices[tokens[t++]];
        arch.conv.push_back(cc);
    }
    for (std::size_t j = 0; j < space.fc_layers; ++j) {
        FcChoice fc;
        fc.int_bits = space.int_bit_choices[tokens[t++]];
        fc.frac_bits = space.frac_bit_choices[tokens[t++]];
        arch.fc.push_back(fc);
    }
    return arch;
}

std::vector<std::size_t> encode_architecture(const ArchitectureSpec& arch) {
    if (arch.tokens.empty()) throw config_error("architecture carries no decision tokens");
    const std::size_t expected = arch.conv.size() * 4 + arch.fc.size() * 2;
    if (arch.tokens.size() != expected) {
        throw config_error("architecture token count inconsistent with layer choices");
    }
    return arch.tokens;
}

Model build_child_model(const ArchitectureSpec& arch) {
    if (arch.fc.empty()) throw config_error("child model needs at least one FC layer");
    Model m;
    m.input_shape = arch.input_shape;
    m.classes = arch.classes;
    m.quantized = arch.quantized;

    std::vector<std::size_t> shape = arch.input_shape;
    for (std::size_t i = 0; i < arch.conv.size(); ++i) {
        const ConvChoice& cc = arch.conv[i];
        const QuantSpec q{cc.int_bits, cc.frac_bits};
        m.conv2d("conv" + std::to_string(i), shape[0], cc.channels, cc.filter, q);
        m.relu();
        shape[0] = cc.channels;
    }
    m.flatten();
    std::size_t features = shape_product(shape);
    for (std::size_t j = 0; j < arch.fc.size(); ++j) {
        const FcChoice& fc = arch.fc[j];
        const QuantSpec q{fc.int_bits, fc.frac_bits};
        const bool last = (j + 1 == arch.fc.size());
        const std::size_t out = last ? arch.classes : arch.fc_hidden;
        m.dense("fc" + std::to_string(j), features, out, q);
        if (!last) m.relu();
        features = out;
    }
    return m;
}

// ---------------------------------------------------------------------------
// Recurrent policy controller

struct Controller::StepCache {
    std::vector<float> x, h_prev, c_prev;
    std::vector<float> gi, gf, gg, go;  // post-activation gates
    std::vector<float> c, tanh_c, h;
    std::vector<double> probs;
    std::size_t token = 0;
};

Controller::Controller(std::vector<std::size_t> cardinalities, ControllerConfig cfg)
    : cards_(std::move(cardinalities)), cfg_(cfg) {
    if (cards_.empty()) throw config_error("controller needs at least one decision slot");
    for (std::size_t c : cards_) {
        if (c == 0) throw config_error("decision slot with empty choice list");
    }
    const std::size_t h = cfg_.hidden, e = cfg_.embed;
    Rng rng(derive_key(cfg_.seed, 0xC0117011ull));
    const double lim_x = std::sqrt(6.0 / static_cast<double>(e + h));
    const double lim_h = std::sqrt(6.0 / static_cast<double>(h + h));

    start_.resize(e);
    for (auto& v : start_) v = static_cast<float>(rng.uniform(-0.1, 0.1));
    wx_.resize(4 * h * e);
    for (auto& v : wx_) v = static_cast<float>(rng.uniform(-lim_x, lim_x));
    wh_.resize(4 * h * h);
    for (auto& v : wh_) v = static_cast<float>(rng.uniform(-lim_h, lim_h));
    b_.assign(4 * h, 0.0f);
    for (std::size_t u = 0; u < h; ++u) b_[h + u] = 1.0f;  // forget-gate bias

    embed_.resize(cards_.size());
    head_w_.resize(cards_.size());
    head_b_.resize(cards_.size());
    for (std::size_t t = 0; t < cards_.size(); ++t) {
        embed_[t].resize(cards_[t] * e);
        for (auto& v : embed_[t]) v = static_cast<float>(rng.uniform(-0.1, 0.1));
        // Zeroed heads give an exactly uniform initial policy.
        head_w_[t].assign(cards_[t] * h, 0.0f);
        head_b_[t].assign(cards_[t], 0.0f);
    }
}

void Controller::step_forward(std::size_t slot, std::span<const float> x, std::vector<float>& h,
                              std::vector<float>& c, StepCache* cache) const {
    (void)slot;
    const std::size_t hh = cfg_.hidden, e = cfg_.embed;
    std::vector<double> a(4 * hh);
    for (std::size_t r = 0; r < 4 * hh; ++r) {
        a[r] = static_cast<double>(b_[r]) +
               kernels::dot_dp(wx_.data() + r * e, x.data(), e) +
               kernels::dot_dp(wh_.data() + r * hh, h.data(), hh);
    }
    std::vector<float> gi(hh), gf(hh), gg(hh), go(hh), c_new(hh), tanh_c(hh), h_new(hh);
    for (std::size_t u = 0; u < hh; ++u) {
        gi[u] = static_cast<float>(1.0 / (1.0 + std::exp(-a[u])));
        gf[u] = static_cast<float>(1.0 / (1.0 + std::exp(-a[hh + u])));
        gg[u] = static_cast<float>(std::tanh(a[2 * hh + u]));
        go[u] = static_cast<float>(1.0 / (1.0 + std::exp(-a[3 * hh + u])));
        c_new[u] = gf[u] * c[u] + gi[u] * gg[u];
        tanh_c[u] = static_cast<float>(std::tanh(static_cast<double>(c_new[u])));
        h_new[u] = go[u] * tanh_c[u];
    }
    if (cache) {
        cache->x.assign(x.begin(), x.end());
        cache->h_prev = h;
        cache->c_prev = c;
        cache->gi = gi;
        cache->gf = gf;
        cache->gg = gg;
        cache->go = go;
        cache->c = c_new;
        cache->tanh_c = tanh_c;
        cache->h = h_new;
    }
    h = std::move(h_new);
    c = std::move(c_new);
}

std::vector<double> Controller::step_logits(std::size_t slot, std::span<const float> h) const {
    const std::size_t hh = cfg_.hidden;
    std::vector<double> logits(cards_[slot]);
    for (std::size_t j = 0; j < cards_[slot]; ++j) {
        logits[j] = static_cast<double>(head_b_[slot][j]) +
                    kernels::dot_dp(head_w_[slot].data() + j * hh, h.data(), hh);
    }
    return logits;
}

namespace {

std::vector<double> softmax_double(const std::vector<double>& logits) {
    double mx = logits[0];
    for (double v : logits) mx = std::max(mx, v);
    std::vector<double> p(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = std::exp(logits[i] - mx);
        sum += p[i];
    }
    for (double& v : p) v /= sum;
    return p;
}

std::size_t sample_from(const std::vector<double>& probs, double u) {
    double cum = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        cum += probs[i];
        if (u < cum) return i;
    }
    return probs.size() - 1;
}

}  // namespace

Controller::SampleResult Controller::sample_architecture() {
    const std::uint64_t draw_key = derive_key(cfg_.seed, 0xD7A3ull + episode_counter_);
    ++episode_counter_;

    SampleResult result;
    std::vector<float> h(cfg_.hidden, 0.0f), c(cfg_.hidden, 0.0f);
    std::span<const float> x(start_);
    for (std::size_t t = 0; t < cards_.size(); ++t) {
        step_forward(t, x, h, c, nullptr);
        const auto probs = softmax_double(step_logits(t, h));
        const double u =
            static_cast<double>(mix64(derive_key(draw_key, t)) >> 11) * 0x1.0p-53;
        const std::size_t token = sample_from(probs, u);
        result.tokens.push_back(token);
        result.log_probs.push_back(std::log(std::max(probs[token], 1e-300)));
        result.total_log_prob += result.log_probs.back();
        x = std::span<const float>(embed_[t].data() + token * cfg_.embed, cfg_.embed);
    }
    return result;
}

std::vector<double> Controller::slot_probabilities(std::span<const std::size_t> prefix) const {
    if (prefix.size() >= cards_.size()) throw config_error("prefix covers all slots");
    std::vector<float> h(cfg_.hidden, 0.0f), c(cfg_.hidden, 0.0f);
    std::span<const float> x(start_);
    for (std::size_t t = 0; t <= prefix.size(); ++t) {
        step_forward(t, x, h, c, nullptr);
        if (t == prefix.size()) return softmax_double(step_logits(t, h));
        if (prefix[t] >= cards_[t]) throw config_error("prefix token out of range");
        x = std::span<const float>(embed_[t].data() + prefix[t] * cfg_.embed, cfg_.embed);
    }
    throw config_error("unreachable");
}

Controller::UpdateResult Controller::update(const SampleResult& sample, double reward) {
    if (sample.tokens.size() != cards_.size()) {
        throw config_error("sample token count does not match controller slots");
    }
    if (!baseline_) baseline_ = reward;
    const double advantage = reward - *baseline_;
    *baseline_ = cfg_.baseline_decay * *baseline_ + (1.0 - cfg_.baseline_decay) * reward;

    if (advantage == 0.0) return {true, 0.0};

    const std::size_t hh = cfg_.hidden, e = cfg_.embed, T = cards_.size();

    // Re-run the sequence for the sampled tokens, keeping per-step caches.
    std::vector<StepCache> caches(T);
    {
        std::vector<float> h(hh, 0.0f), c(hh, 0.0f);
        std::span<const float> x(start_);
        for (std::size_t t = 0; t < T; ++t) {
            step_forward(t, x, h, c, &caches[t]);
            caches[t].probs = softmax_double(step_logits(t, caches[t].h));
            caches[t].token = sample.tokens[t];
            x = std::span<const float>(embed_[t].data() + sample.tokens[t] * e, e);
        }
    }

    // BPTT of the negative log-likelihood of the sampled tokens.
    std::vector<double> d_start(e, 0.0), d_wx(4 * hh * e, 0.0), d_wh(4 * hh * hh, 0.0),
        d_b(4 * hh, 0.0);
    std::vector<std::vector<double>> d_embed(T), d_head_w(T), d_head_b(T);
    for (std::size_t t = 0; t < T; ++t) {
        d_embed[t].assign(embed_[t].size(), 0.0);
        d_head_w[t].assign(head_w_[t].size(), 0.0);
        d_head_b[t].assign(head_b_[t].size(), 0.0);
    }

    std::vector<double> dh(hh, 0.0), dc(hh, 0.0), da(4 * hh), dx(e);
    for (std::size_t t = T; t-- > 0;) {
        const StepCache& s = caches[t];
        std::vector<double> dlogits = s.probs;
        dlogits[s.token] -= 1.0;
        for (std::size_t j = 0; j < cards_[t]; ++j) {
            d_head_b[t][j] += dlogits[j];
            for (std::size_t u = 0; u < hh; ++u) {
                d_head_w[t][j * hh + u] += dlogits[j] * static_cast<double>(s.h[u]);
            }
        }
        for (std::size_t u = 0; u < hh; ++u) {
            double acc = 0.0;
            for (std::size_t j = 0; j < cards_[t]; ++j) {
                acc += static_cast<double>(head_w_[t][j * hh + u]) * dlogits[j];
            }
            dh[u] += acc;
        }
        for (std::size_t u = 0; u < hh; ++u) {
            const double i_ = s.gi[u], f_ = s.gf[u], g_ = s.gg[u], o_ = s.go[u];
            const double tc = s.tanh_c[u];
            const double do_ = dh[u] * tc;
            const double dcu = dc[u] + dh[u] * o_ * (1.0 - tc * tc);
            const double di = dcu * g_;
            const double df = dcu * static_cast<double>(s.c_prev[u]);
            const double dg = dcu * i_;
            da[u] = di * i_ * (1.0 - i_);
            da[hh + u] = df * f_ * (1.0 - f_);
            da[2 * hh + u] = dg * (1.0 - g_ * g_);
            da[3 * hh + u] = do_ * o_ * (1.0 - o_);
            dc[u] = dcu * f_;
        }
        for (std::size_t r = 0; r < 4 * hh; ++r) {
            d_b[r] += da[r];
            const double g = da[r];
            if (g == 0.0) continue;
            double* wxr = d_wx.data() + r * e;
            for (std::size_t k = 0; k < e; ++k) wxr[k] += g * static_cast<double>(s.x[k]);
            double* whr = d_wh.data() + r * hh;
            for (std::size_t u = 0; u < hh; ++u) whr[u] += g * static_cast<double>(s.h_prev[u]);
        }
        for (std::size_t k = 0; k < e; ++k) {
            double acc = 0.0;
            for (std::size_t r = 0; r < 4 * hh; ++r) {
                acc += static_cast<double>(wx_[r * e + k]) * da[r];
            }
            dx[k] = acc;
        }
        if (t == 0) {
            for (std::size_t k = 0; k < e; ++k) d_start[k] += dx[k];
        } else {
            double* row = d_embed[t - 1].data() + caches[t - 1].token * e;
            for (std::size_t k = 0; k < e; ++k) row[k] += dx[k];
        }
        for (std::size_t u = 0; u < hh; ++u) {
            double acc = 0.0;
            for (std::size_t r = 0; r < 4 * hh; ++r) {
                acc += static_cast<double>(wh_[r * hh + u]) * da[r];
            }
            dh[u] = acc;
        }
    }

    // Non-finite gradients skip the parameter move.
    auto finite = [](const std::vector<double>& v) {
        for (double x : v) {
            if (!std::isfinite(x)) return false;
        }
        return true;
    };
    bool ok = finite(d_start) && finite(d_wx) && finite(d_wh) && finite(d_b);
    for (std::size_t t = 0; ok && t < T; ++t) {
        ok = finite(d_embed[t]) && finite(d_head_w[t]) && finite(d_head_b[t]);
    }
    if (!ok || !std::isfinite(advantage)) return {false, advantage};

    const double scale = cfg_.lr * advantage;
    auto apply = [scale](std::vector<float>& p, const std::vector<double>& g) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            p[i] = static_cast<float>(static_cast<double>(p[i]) - scale * g[i]);
        }
    };
    apply(start_, d_start);
    apply(wx_, d_wx);
    apply(wh_, d_wh);
    apply(b_, d_b);
    for (std::size_t t = 0; t < T; ++t) {
        apply(embed_[t], d_embed[t]);
        apply(head_w_[t], d_head_w[t]);
        apply(head_b_[t], d_head_b[t]);
    }
    return {true, advantage};
}

// ---------------------------------------------------------------------------
// Search loop

double compute_reward(const EvalDistribution& dist, Statistic statistic) {
    return reduce(dist.samples, statistic);
}

bool check_termination(const std::vector<EpisodeRecord>& history, std::size_t episode_limit,
                       std::size_t repeat_t) {
    if (history.size() >= episode_limit) return true;
    if (repeat_t > 0 && history.size() >= repeat_t) {
        const auto& last = history.back().arch.tokens;
        for (std::size_t i = history.size() - repeat_t; i < history.size(); ++i) {
            if (history[i].arch.tokens != last) return false;
        }
        return true;
    }
    return false;
}

EpisodeRecord run_episode(const ArchitectureSpec& arch, const SearchConfig& cfg,
                          std::size_t episode_index, const Dataset& train_set,
                          const Dataset& test_set) {
    EpisodeRecord rec;
    rec.episode = episode_index;
    rec.arch = arch;
    try {
        Model child = build_child_model(arch);
        child.init_params(derive_key(derive_key(cfg.seed, 0x14171ull), episode_index));

        TrainConfig tc;
        tc.epochs = cfg.child_epochs;
        tc.batch_size = cfg.child_batch_size;
        tc.lr = cfg.child_lr;
        tc.quantize = arch.quantized;
        tc.seed = derive_key(derive_key(cfg.seed, 0x54138ull), episode_index);
        tc.noise = cfg.noise;
        tc.noise.seed = derive_key(derive_key(cfg.noise.seed, episode_index), 1);
        tc.track_accuracy = false;
        const TrainLog tl = train(child, train_set, tc);
        rec.trained_batches = tl.total_batches;

        NoiseSpec eval_noise = cfg.noise;
        eval_noise.seed = derive_key(derive_key(cfg.noise.seed, episode_index), 2);
        rec.dist = evaluate_distribution(child, test_set, eval_noise, cfg.eval_samples);
        rec.reward = compute_reward(rec.dist, cfg.statistic);
    } catch (const Error&) {
        rec.failed = true;
        rec.reward = 0.0;
    }
    return rec;
}

SearchResult run_search(const SearchSpace& space, const SearchConfig& cfg,
                        const Dataset& train_set, const Dataset& test_set,
                        const std::function<void(const EpisodeRecord&)>& on_episode) {
    space.validate();
    if (cfg.episodes < 1) throw config_error("search needs at least one episode");
    if (cfg.eval_samples < 1) throw config_error("search needs K >= 1 evaluation samples");

    ControllerConfig ctrl = cfg.controller;
    if (ctrl.seed == 0) ctrl.seed = derive_key(cfg.seed, 0xC011ull);
    Controller controller(space.slot_cardinalities(), ctrl);

    SearchResult result;
    while (!check_termination(result.history, cfg.episodes, cfg.repeat_termination)) {
        const std::size_t ep = result.history.size();
        const auto t0 = std::chrono::steady_clock::now();

        const auto sample = controller.sample_architecture();
        EpisodeRecord rec =
            run_episode(decode_architecture(space, sample.tokens), cfg, ep, train_set, test_set);
        controller.update(sample, rec.reward);
        rec.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.history.push_back(std::move(rec));
        if (on_episode) on_episode(result.history.back());
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < result.history.size(); ++i) {
        if (result.history[i].reward > result.history[best].reward) best = i;
    }
    result.best = result.history[best];
    return result;
}

}  // namespace cim
