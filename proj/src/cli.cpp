#include "cim/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cim/checkpoint.hpp"
#include "cim/errors.hpp"
#include "cim/manifest.hpp"
#include "cim/rng.hpp"
#include "cim/serialize.hpp"

namespace cim::cli {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr std::size_t kAuto = static_cast<std::size_t>(-1);

// Seed stream tags so each consumer gets an independent stream.
enum : std::uint64_t {
    kSeedInit = 0x11ull,
    kSeedTrain = 0x22ull,
    kSeedNoise = 0x33ull,
    kSeedSubsetTrain = 0x44ull,
    kSeedSubsetTest = 0x55ull,
};

struct DatasetFlags {
    std::string dataset;  // mnist | cifar10
    std::string data_dir;
    std::size_t train_subset = kAuto;
    std::size_t test_subset = kAuto;
};

void add_dataset_flags(CLI::App* cmd, DatasetFlags& flags) {
    cmd->add_option("--dataset", flags.dataset, "Dataset: mnist | cifar10")->required();
    cmd->add_option("--data-dir", flags.data_dir, "Directory with dataset files")->required();
    cmd->add_option("--train-subset", flags.train_subset,
                    "Stratified training subset size (0 = full; default: desk scale)");
    cmd->add_option("--test-subset", flags.test_subset,
                    "Stratified test subset size (0 = full; default: desk scale)");
}

Dataset load_split(const DatasetFlags& flags, bool train, std::uint64_t seed) {
    const fs::path dir = flags.data_dir;
    Dataset d;
    std::size_t desk_default = 0;
    if (flags.dataset == "mnist") {
        const fs::path images = dir / (train ? "train-images-idx3-ubyte" : "t10k-images-idx3-ubyte");
        const fs::path labels = dir / (train ? "train-labels-idx1-ubyte" : "t10k-labels-idx1-ubyte");
        d = load_mnist(images, labels);
        desk_default = train ? 10000 : 2000;
    } else if (flags.dataset == "cifar10") {
        std::vector<fs::path> batches;
        if (train) {
            for (int i = 1; i <= 5; ++i) {
                const fs::path p = dir / ("data_batch_" + std::to_string(i) + ".bin");
                if (fs::exists(p)) batches.push_back(p);
            }
            if (batches.empty()) throw io_error("no data_batch_*.bin files in '" + dir.string() + "'");
        } else {
            batches.push_back(dir / "test_batch.bin");
        }
        d = load_cifar10(batches);
        desk_default = train ? 8000 : 2000;
    } else {
        throw config_error("unknown dataset '" + flags.dataset + "' (expected mnist|cifar10)");
    }
    d.split = train ? "train" : "test";
    d.validate();

    std::size_t want = train ? flags.train_subset : flags.test_subset;
    if (want == kAuto) want = std::min(desk_default, d.size());  // clamped desk default
    if (want == 0 || want == d.size()) return d;
    const std::uint64_t tag = train ? kSeedSubsetTrain : kSeedSubsetTest;
    return subset(d, want, derive_key(seed, tag));
}

/// Architecture flag: a builtin template name or a path to an
/// ArchitectureSpec JSON file (as written by `search`).
Model model_from_arch(const std::string& arch, bool quantize) {
    const QuantSpec default_q{2, 4};
    Model m;
    if (arch == "mlp" || arch == "mlp-sigmoid") {
        m.input_shape = {1, 28, 28};
        m.classes = 10;
        m.flatten();
        m.dense("fc0", 784, 256, default_q);
        if (arch == "mlp") {
            m.relu();
        } else {
            m.sigmoid();
        }
        m.dense("fc1", 256, 10, default_q);
    } else if (arch == "cnn") {
        m.input_shape = {3, 32, 32};
        m.classes = 10;
        m.conv2d("conv0", 3, 8, 3, default_q);
        m.relu();
        m.conv2d("conv1", 8, 8, 3, default_q);
        m.relu();
        m.flatten();
        m.dense("fc0", 8 * 32 * 32, 10, default_q);
    } else {
        const ArchitectureSpec spec = architecture_from_json(read_json_file(arch));
        m = build_child_model(spec);
        m.quantized = spec.quantized || quantize;
        return m;
    }
    m.quantized = quantize;
    return m;
}

void emit_manifest(const fs::path& manifest_path, const std::string& command,
                   const std::vector<std::string>& argv, std::uint64_t seed,
                   const NoiseSpec& noise, const std::vector<fs::path>& artifacts,
                   double wall_time_s) {
    RunManifest m;
    m.command = command;
    m.argv = argv;
    m.seed = seed;
    m.noise = noise;
    m.wall_time_s = wall_time_s;
    for (const auto& p : artifacts) {
        m.artifacts.push_back({p.string(), canonical_file_hash(p)});
    }
    write_manifest(manifest_path, m);
}

// ---------------------------------------------------------------------------

int cmd_train(const std::vector<std::string>& argv, const DatasetFlags& data_flags,
              const std::string& arch, std::size_t epochs, std::size_t batch_size, double lr,
              double mu, double sigma, bool sigma_is_variance, bool quantize,
              std::uint64_t seed, const std::string& out) {
    const auto t0 = Clock::now();
    const Dataset train_set = load_split(data_flags, true, seed);
    const Dataset test_set = load_split(data_flags, false, seed);

    Model model = model_from_arch(arch, quantize);
    if (model.input_shape != train_set.example_shape()) {
        throw config_error("architecture input " + shape_to_string(model.input_shape) +
                           " does not match dataset images " +
                           shape_to_string(train_set.example_shape()));
    }
    model.init_params(derive_key(seed, kSeedInit));

    TrainConfig cfg;
    cfg.epochs = epochs;
    cfg.batch_size = batch_size;
    cfg.lr = lr;
    cfg.noise = NoiseSpec{mu, sigma, derive_key(seed, kSeedNoise), sigma_is_variance};
    cfg.quantize = model.quantized;
    cfg.seed = derive_key(seed, kSeedTrain);
    const TrainLog log = train(model, train_set, cfg, &test_set);

    const fs::path out_path = out;
    save_checkpoint(out_path, model.params);
    Json log_json = train_log_to_json(log);
    log_json["arch"] = arch;
    log_json["dataset"] = data_flags.dataset;
    log_json["noise"] = noise_to_json(cfg.noise);
    log_json["quantized"] = model.quantized;
    log_json["train_examples"] = train_set.size();
    log_json["test_examples"] = test_set.size();
    const fs::path log_path = out_path.string() + ".log.json";
    write_json_file(log_path, log_json);

    const double wall = std::chrono::duration<double>(Clock::now() - t0).count();
    emit_manifest(out_path.string() + ".manifest.json", "train", argv, seed, cfg.noise,
                  {out_path, log_path}, wall);

    std::cout << "trained " << arch << " on " << data_flags.dataset << ": final loss "
              << (log.epoch_loss.empty() ? 0.0 : log.epoch_loss.back()) << ", clean accuracy "
              << (log.epoch_accuracy.empty() ? 0.0 : log.epoch_accuracy.back()) << "\n";
    std::cout << "checkpoint written to " << out_path.string() << "\n";
    return 0;
}

int cmd_eval(const std::vector<std::string>& argv, const DatasetFlags& data_flags,
             const std::string& arch, const std::string& checkpoint, std::size_t samples,
             const std::string& statistic, double mu, double sigma, bool sigma_is_variance,
             bool quantize, std::uint64_t seed, const std::string& out) {
    const auto t0 = Clock::now();
    const Dataset test_set = load_split(data_flags, false, seed);
    Model model = model_from_arch(arch, quantize);
    model.params = load_checkpoint(checkpoint);
    model.validate();

    const NoiseSpec noise{mu, sigma, derive_key(seed, kSeedNoise), sigma_is_variance};
    const Statistic stat = statistic_from_string(statistic);
    const EvalDistribution dist = evaluate_distribution(model, test_set, noise, samples);
    const double reward = reduce(dist.samples, stat);

    Json j = eval_to_json(dist);
    j["statistic"] = statistic;
    j["reward"] = reward;
    j["arch"] = arch;
    j["checkpoint"] = checkpoint;
    j["dataset"] = data_flags.dataset;
    j["test_examples"] = test_set.size();
    const fs::path out_path = out;
    write_json_file(out_path, j);

    const double wall = std::chrono::duration<double>(Clock::now() - t0).count();
    emit_manifest(out_path.string() + ".manifest.json", "eval", argv, seed, noise, {out_path},
                  wall);

    std::cout << "clean " << dist.clean_accuracy << "  mean " << dist.mean << "  p95min "
              << dist.p95min << "  max " << dist.max << "  (" << statistic << " -> " << reward
              << ")\n";
    return 0;
}

int cmd_analyze(const std::vector<std::string>& argv, const DatasetFlags& data_flags,
                const std::string& arch, const std::string& checkpoint, std::size_t samples,
                std::size_t bins, std::size_t input_index, bool post_softmax, double mu,
                double sigma, bool sigma_is_variance, bool quantize, std::uint64_t seed,
                const std::string& out) {
    const auto t0 = Clock::now();
    const Dataset test_set = load_split(data_flags, false, seed);
    Model model = model_from_arch(arch, quantize);
    model.params = load_checkpoint(checkpoint);
    model.validate();

    const NoiseSpec noise{mu, sigma, derive_key(seed, kSeedNoise), sigma_is_variance};
    const FitReport report = run_study(model, test_set, input_index, noise, samples, bins,
                                       post_softmax);

    const fs::path out_path = out;
    write_json_file(out_path, fit_report_to_json(report));
    const fs::path hist_path = out_path.string() + ".hist.txt";
    {
        std::ofstream hist(hist_path);
        if (!hist) throw io_error("cannot write '" + hist_path.string() + "'");
        hist << fit_report_histogram_table(report);
    }

    const double wall = std::chrono::duration<double>(Clock::now() - t0).count();
    emit_manifest(out_path.string() + ".manifest.json", "analyze", argv, seed, noise,
                  {out_path, hist_path}, wall);

    std::cout << "analyzed input " << input_index << " with K=" << samples << ", " << bins
              << " bins: avg chi_square " << report.avg_chi_square << ", avg mse "
              << report.avg_mse << ", degenerate elements " << report.degenerate_elements
              << "\n";
    return 0;
}

int cmd_search(const std::vector<std::string>& argv, const DatasetFlags& data_flags,
               const std::string& space_flag, std::size_t episodes, std::size_t child_epochs,
               std::size_t samples, const std::string& statistic, double mu, double sigma,
               bool sigma_is_variance, std::uint64_t seed, double child_lr,
               std::size_t child_batch, const std::string& out_dir) {
    const auto t0 = Clock::now();
    const Dataset train_set = load_split(data_flags, true, seed);
    const Dataset test_set = load_split(data_flags, false, seed);

    SearchSpace space;
    if (space_flag == "table2") {
        space.input_shape = train_set.example_shape();
    } else {
        space = space_from_json(read_json_file(space_flag));
    }
    if (space.input_shape != train_set.example_shape()) {
        throw config_error("search space input " + shape_to_string(space.input_shape) +
                           " does not match dataset images " +
                           shape_to_string(train_set.example_shape()));
    }

    SearchConfig cfg;
    cfg.episodes = episodes;
    cfg.child_epochs = child_epochs;
    cfg.eval_samples = samples;
    cfg.statistic = statistic_from_string(statistic);
    cfg.noise = NoiseSpec{mu, sigma, derive_key(seed, kSeedNoise), sigma_is_variance};
    cfg.seed = seed;
    cfg.child_lr = child_lr;
    cfg.child_batch_size = child_batch;

    const fs::path dir = out_dir;
    fs::create_directories(dir);
    const fs::path history_path = dir / "history.ndjson";
    std::ofstream history(history_path);
    if (!history) throw io_error("cannot write '" + history_path.string() + "'");

    const SearchResult result =
        run_search(space, cfg, train_set, test_set, [&](const EpisodeRecord& rec) {
            history << episode_to_json(rec).dump() << "\n";
            history.flush();
        });
    history.close();

    const fs::path best_path = dir / "best_architecture.json";
    write_json_file(best_path, architecture_to_json(result.best.arch));

    const double wall = std::chrono::duration<double>(Clock::now() - t0).count();
    emit_manifest(dir / "manifest.json", "search", argv, seed, cfg.noise,
                  {history_path, best_path}, wall);

    std::cout << "searched " << result.history.size() << " episodes; best episode "
              << result.best.episode << " reward " << result.best.reward << " (clean "
              << result.best.dist.clean_accuracy << ")\n";
    std::cout << "best architecture written to " << best_path.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// report: render result files into aligned text tables

struct ReportTables {
    std::vector<std::pair<std::string, EvalDistribution>> evals;
    std::vector<std::pair<std::string, Json>> fits;
    std::vector<std::pair<std::string, std::vector<EpisodeRecord>>> histories;
};

void render_evals(std::ostream& os, ReportTables& tables) {
    os << "== evaluations ==\n";
    os << "file  clean  mean  p95min  max  K\n";
    for (const auto& [name, d] : tables.evals) {
        os << name << "  " << d.clean_accuracy << "  " << d.mean << "  " << d.p95min << "  "
           << d.max << "  " << d.k << "\n";
    }
}

void render_fits(std::ostream& os, ReportTables& tables) {
    os << "== gaussian fits ==\n";
    os << "file  avg_chi_square  avg_mse  degenerate\n";
    double chi_sum = 0.0, mse_sum = 0.0;
    for (const auto& [name, j] : tables.fits) {
        const double chi = j.at("avg_chi_square").get<double>();
        const double mse = j.at("avg_mse").get<double>();
        chi_sum += chi;
        mse_sum += mse;
        os << name << "  " << chi << "  " << mse << "  "
           << j.at("degenerate_elements").get<std::size_t>() << "\n";
    }
    if (tables.fits.size() > 1) {
        os << "average  " << chi_sum / static_cast<double>(tables.fits.size()) << "  "
           << mse_sum / static_cast<double>(tables.fits.size()) << "  -\n";
    }
}

void render_histories(std::ostream& os, ReportTables& tables) {
    os << "== search histories ==\n";
    os << "file  episodes  best_reward  mean_reward  best_clean  best_mean  best_p95min  wall_s\n";
    std::vector<std::tuple<double, std::string, std::string>> rows;
    for (const auto& [name, records] : tables.histories) {
        double best = 0.0, sum = 0.0, wall = 0.0;
        const EpisodeRecord* best_rec = &records.front();
        for (const auto& r : records) {
            sum += r.reward;
            wall += r.wall_time_s;
            if (r.reward > best) {
                best = r.reward;
                best_rec = &r;
            }
        }
        const double mean = sum / static_cast<double>(records.size());
        std::ostringstream row;
        row << name << "  " << records.size() << "  " << best << "  " << mean << "  "
            << best_rec->dist.clean_accuracy << "  " << best_rec->dist.mean << "  "
            << best_rec->dist.p95min << "  " << wall;
        rows.emplace_back(mean, name, row.str());
    }
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        return std::get<0>(a) > std::get<0>(b);
    });
    for (const auto& [mean, name, row] : rows) os << row << "\n";
}

int cmd_report(const std::vector<std::string>& argv, const std::vector<std::string>& files,
               const std::string& out) {
    const auto t0 = Clock::now();
    ReportTables tables;
    for (const auto& file : files) {
        const auto records = read_json_records(file);
        if (records.size() == 1 && records[0].contains("elements")) {
            tables.fits.emplace_back(file, records[0]);
        } else if (records.size() == 1 && records[0].contains("samples")) {
            tables.evals.emplace_back(file, eval_from_json(records[0]));
        } else if (records[0].contains("episode")) {
            std::vector<EpisodeRecord> history;
            for (const auto& r : records) history.push_back(episode_from_json(r));
            tables.histories.emplace_back(file, std::move(history));
        } else {
            throw format_error("unrecognized result file '" + file + "'");
        }
    }

    std::ostringstream os;
    if (!tables.evals.empty()) render_evals(os, tables);
    if (!tables.fits.empty()) render_fits(os, tables);
    if (!tables.histories.empty()) render_histories(os, tables);
    std::cout << os.str();

    if (!out.empty()) {
        std::ofstream f(out);
        if (!f) throw io_error("cannot write '" + out + "'");
        f << os.str();
        f.close();
        const double wall = std::chrono::duration<double>(Clock::now() - t0).count();
        emit_manifest(out + ".manifest.json", "report", argv, 0, NoiseSpec{0.0, 0.0, 0, false},
                      {fs::path(out)}, wall);
    }
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Quantized-DNN device-uncertainty toolkit: noise-aware training, "
                 "Monte-Carlo output-change analysis, and uncertainty-aware NAS"};
    app.require_subcommand(1);

    std::uint64_t seed = 1;
    app.add_option("--seed", seed, "Master seed (subset choice, init, noise streams)")
        ->capture_default_str();

    // train
    auto* train_cmd = app.add_subcommand("train", "Train a model (noise-aware when sigma > 0)");
    DatasetFlags train_data;
    add_dataset_flags(train_cmd, train_data);
    std::string train_arch = "mlp";
    std::size_t train_epochs = 3, train_batch = 32;
    double train_lr = 0.05, train_mu = 0.0, train_sigma = 0.0;
    bool train_sigma_var = false, train_quant = false;
    std::string train_out = "model.cimw";
    train_cmd->add_option("--arch", train_arch, "mlp | mlp-sigmoid | cnn | <arch.json>")
        ->capture_default_str();
    train_cmd->add_option("--epochs", train_epochs)->capture_default_str();
    train_cmd->add_option("--batch-size", train_batch)->capture_default_str();
    train_cmd->add_option("--lr", train_lr)->capture_default_str();
    train_cmd->add_option("--mu", train_mu, "Noise mean")->capture_default_str();
    train_cmd->add_option("--sigma", train_sigma, "Training noise sigma (0 = vanilla SGD)")
        ->capture_default_str();
    train_cmd->add_flag("--sigma-is-variance", train_sigma_var,
                        "Interpret sigma as variance instead of stddev");
    train_cmd->add_flag("--quantize", train_quant, "Quantization-aware training");
    train_cmd->add_option("--out", train_out, "Checkpoint output path")->capture_default_str();

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "K-sample perturbed-accuracy distribution");
    DatasetFlags eval_data;
    add_dataset_flags(eval_cmd, eval_data);
    std::string eval_arch = "mlp", eval_ckpt, eval_stat = "mean", eval_out = "eval.json";
    std::size_t eval_samples = 100;
    double eval_mu = 0.0, eval_sigma = 0.04;
    bool eval_sigma_var = false, eval_quant = false;
    eval_cmd->add_option("--arch", eval_arch)->capture_default_str();
    eval_cmd->add_option("--checkpoint", eval_ckpt)->required();
    eval_cmd->add_option("--samples", eval_samples, "K noise samples")->capture_default_str();
    eval_cmd->add_option("--statistic", eval_stat, "mean | p95min | max")->capture_default_str();
    eval_cmd->add_option("--mu", eval_mu)->capture_default_str();
    eval_cmd->add_option("--sigma", eval_sigma)->capture_default_str();
    eval_cmd->add_flag("--sigma-is-variance", eval_sigma_var);
    eval_cmd->add_flag("--quantize", eval_quant);
    eval_cmd->add_option("--out", eval_out)->capture_default_str();

    // analyze
    auto* an_cmd = app.add_subcommand("analyze", "Monte-Carlo output-change Gaussian-fit study");
    DatasetFlags an_data;
    add_dataset_flags(an_cmd, an_data);
    std::string an_arch = "mlp", an_ckpt, an_out = "fit.json";
    std::size_t an_samples = 10000, an_bins = 100, an_input = 0;
    double an_mu = 0.0, an_sigma = 0.04;
    bool an_sigma_var = false, an_quant = false, an_post_softmax = false;
    an_cmd->add_option("--arch", an_arch)->capture_default_str();
    an_cmd->add_option("--checkpoint", an_ckpt)->required();
    an_cmd->add_option("--samples", an_samples, "K noise samples")->capture_default_str();
    an_cmd->add_option("--bins", an_bins, "Histogram bins N")->capture_default_str();
    an_cmd->add_option("--input-index", an_input, "Test image index")->capture_default_str();
    an_cmd->add_flag("--post-softmax", an_post_softmax, "Analyze softmax outputs instead of logits");
    an_cmd->add_option("--mu", an_mu)->capture_default_str();
    an_cmd->add_option("--sigma", an_sigma)->capture_default_str();
    an_cmd->add_flag("--sigma-is-variance", an_sigma_var);
    an_cmd->add_flag("--quantize", an_quant);
    an_cmd->add_option("--out", an_out)->capture_default_str();

    // search
    auto* search_cmd = app.add_subcommand("search", "Uncertainty-aware architecture search");
    DatasetFlags search_data;
    add_dataset_flags(search_cmd, search_data);
    std::string search_space = "table2", search_stat = "mean", search_out = "search-out";
    std::size_t search_episodes = 50, search_child_epochs = 1, search_samples = 5,
                search_child_batch = 32;
    double search_mu = 0.0, search_sigma = 0.04, search_child_lr = 0.05;
    bool search_sigma_var = false;
    search_cmd->add_option("--space", search_space, "table2 | <space.json>")
        ->capture_default_str();
    search_cmd->add_option("--episodes", search_episodes)->capture_default_str();
    search_cmd->add_option("--child-epochs", search_child_epochs)->capture_default_str();
    search_cmd->add_option("--samples", search_samples, "K per evaluation")->capture_default_str();
    search_cmd->add_option("--statistic", search_stat, "mean | p95min | max")
        ->capture_default_str();
    search_cmd->add_option("--mu", search_mu)->capture_default_str();
    search_cmd->add_option("--sigma", search_sigma)->capture_default_str();
    search_cmd->add_flag("--sigma-is-variance", search_sigma_var);
    search_cmd->add_option("--child-lr", search_child_lr)->capture_default_str();
    search_cmd->add_option("--child-batch-size", search_child_batch)->capture_default_str();
    search_cmd->add_option("--out-dir", search_out)->capture_default_str();

    // report
    auto* report_cmd = app.add_subcommand("report", "Summarize result files as tables");
    std::vector<std::string> report_files;
    std::string report_out;
    report_cmd->add_option("files", report_files, "eval/fit/history result files")
        ->required()
        ->expected(-1);
    report_cmd->add_option("--out", report_out, "Also write the rendered table to a file");

    std::vector<std::string> raw(args);
    try {
        std::vector<const char*> argv;
        argv.push_back("cim");
        for (const auto& a : raw) argv.push_back(a.c_str());
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: usage: " << e.what() << "\n";
        return 2;
    }

    try {
        if (app.got_subcommand(train_cmd)) {
            return cmd_train(raw, train_data, train_arch, train_epochs, train_batch, train_lr,
                             train_mu, train_sigma, train_sigma_var, train_quant, seed,
                             train_out);
        }
        if (app.got_subcommand(eval_cmd)) {
            return cmd_eval(raw, eval_data, eval_arch, eval_ckpt, eval_samples, eval_stat,
                            eval_mu, eval_sigma, eval_sigma_var, eval_quant, seed, eval_out);
        }
        if (app.got_subcommand(an_cmd)) {
            return cmd_analyze(raw, an_data, an_arch, an_ckpt, an_samples, an_bins, an_input,
                               an_post_softmax, an_mu, an_sigma, an_sigma_var, an_quant, seed,
                               an_out);
        }
        if (app.got_subcommand(search_cmd)) {
            return cmd_search(raw, search_data, search_space, search_episodes,
                              search_child_epochs, search_samples, search_stat, search_mu,
                              search_sigma, search_sigma_var, seed, search_child_lr,
                              search_child_batch, search_out);
        }
        if (app.got_subcommand(report_cmd)) {
            return cmd_report(raw, report_files, report_out);
        }
        throw usage_error("no subcommand given");
    } catch (const Error& e) {
        std::cerr << "error: " << e.category() << ": " << e.what() << "\n";
        if (e.category() == "usage") return 2;
        if (e.category() == "io") return 3;
        if (e.category() == "format") return 4;
        if (e.category() == "data") return 5;
        if (e.category() == "config") return 6;
        if (e.category() == "numeric") return 7;
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace cim::cli
