#include "cim/serialize.hpp"

#include <fstream>
#include <sstream>

#include "cim/errors.hpp"

namespace cim {

namespace {

template <typename T>
T require(const Json& j, const char* key) {
    if (!j.contains(key)) throw format_error(std::string("missing key '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception& e) {
        throw format_error(std::string("bad value for key '") + key + "': " + e.what());
    }
}

}  // namespace

Json noise_to_json(const NoiseSpec& spec) {
    return Json{{"mu", spec.mu},
                {"sigma", spec.sigma},
                {"seed", spec.seed},
                {"sigma_is_variance", spec.sigma_is_variance}};
}

NoiseSpec noise_from_json(const Json& j) {
    NoiseSpec spec;
    spec.mu = require<double>(j, "mu");
    spec.sigma = require<double>(j, "sigma");
    spec.seed = require<std::uint64_t>(j, "seed");
    spec.sigma_is_variance = j.value("sigma_is_variance", false);
    return spec;
}

Json architecture_to_json(const ArchitectureSpec& arch) {
    Json conv = Json::array();
    for (const auto& c : arch.conv) {
        conv.push_back(Json{{"channels", c.channels},
                            {"filter", c.filter},
                            {"int_bits", c.int_bits},
                            {"frac_bits", c.frac_bits}});
    }
    Json fc = Json::array();
    for (const auto& f : arch.fc) {
        fc.push_back(Json{{"int_bits", f.int_bits}, {"frac_bits", f.frac_bits}});
    }
    return Json{{"tokens", arch.tokens},
                {"conv", conv},
                {"fc", fc},
                {"fc_hidden", arch.fc_hidden},
                {"input", arch.input_shape},
                {"classes", arch.classes},
                {"quantized", arch.quantized}};
}

ArchitectureSpec architecture_from_json(const Json& j) {
    ArchitectureSpec arch;
    arch.tokens = require<std::vector<std::size_t>>(j, "tokens");
    for (const auto& c : require<Json>(j, "conv")) {
        arch.conv.push_back(ConvChoice{require<std::size_t>(c, "channels"),
                                       require<std::size_t>(c, "filter"),
                                       require<int>(c, "int_bits"),
                                       require<int>(c, "frac_bits")});
    }
    for (const auto& f : require<Json>(j, "fc")) {
        arch.fc.push_back(FcChoice{require<int>(f, "int_bits"), require<int>(f, "frac_bits")});
    }
    arch.fc_hidden = require<std::size_t>(j, "fc_hidden");
    arch.input_shape = require<std::vector<std::size_t>>(j, "input");
    arch.classes = require<std::size_t>(j, "classes");
    arch.quantized = require<bool>(j, "quantized");
    return arch;
}

Json space_to_json(const SearchSpace& space) {
    return Json{{"input", space.input_shape},
                {"classes", space.classes},
                {"conv_layers", space.conv_layers},
                {"fc_layers", space.fc_layers},
                {"fc_hidden", space.fc_hidden},
                {"channels", space.channel_choices},
                {"filters", space.filter_choices},
                {"int_bits", space.int_bit_choices},
                {"frac_bits", space.frac_bit_choices},
                {"quantized", space.quantized}};
}

SearchSpace space_from_json(const Json& j) {
    SearchSpace s;
    s.input_shape = require<std::vector<std::size_t>>(j, "input");
    s.classes = require<std::size_t>(j, "classes");
    s.conv_layers = require<std::size_t>(j, "conv_layers");
    s.fc_layers = require<std::size_t>(j, "fc_layers");
    s.fc_hidden = require<std::size_t>(j, "fc_hidden");
    s.channel_choices = require<std::vector<std::size_t>>(j, "channels");
    s.filter_choices = require<std::vector<std::size_t>>(j, "filters");
    s.int_bit_choices = require<std::vector<int>>(j, "int_bits");
    s.frac_bit_choices = require<std::vector<int>>(j, "frac_bits");
    s.quantized = require<bool>(j, "quantized");
    s.validate();
    return s;
}

Json eval_to_json(const EvalDistribution& dist) {
    return Json{{"samples", dist.samples},
                {"clean_accuracy", dist.clean_accuracy},
                {"mean", dist.mean},
                {"p95min", dist.p95min},
                {"max", dist.max},
                {"k", dist.k},
                {"noise", noise_to_json(dist.noise)}};
}

EvalDistribution eval_from_json(const Json& j) {
    EvalDistribution d;
    d.samples = require<std::vector<double>>(j, "samples");
    d.clean_accuracy = require<double>(j, "clean_accuracy");
    d.mean = require<double>(j, "mean");
    d.p95min = require<double>(j, "p95min");
    d.max = require<double>(j, "max");
    d.k = require<std::size_t>(j, "k");
    d.noise = noise_from_json(require<Json>(j, "noise"));
    return d;
}

Json fit_report_to_json(const FitReport& report) {
    Json elements = Json::array();
    for (const auto& e : report.elements) {
        Json je{{"element", e.element}, {"degenerate", e.degenerate}};
        if (!e.degenerate) {
            je["mean"] = e.mean;
            je["std"] = e.stddev;
            je["chi_square"] = e.chi_square;
            je["mse"] = e.mse;
            je["excluded_bins"] = e.excluded_bins;
            je["edges"] = e.edges;
            je["observed"] = e.observed;
            je["expected"] = e.expected;
        }
        elements.push_back(std::move(je));
    }
    return Json{{"input_index", report.input_index},
                {"noise", noise_to_json(report.noise)},
                {"k", report.k},
                {"bins", report.bins},
                {"post_softmax", report.post_softmax},
                {"elements", elements},
                {"degenerate_elements", report.degenerate_elements},
                {"avg_chi_square", report.avg_chi_square},
                {"avg_mse", report.avg_mse}};
}

std::string fit_report_histogram_table(const FitReport& report) {
    std::ostringstream os;
    os.precision(9);
    for (const auto& e : report.elements) {
        os << "# element " << e.element;
        if (e.degenerate) {
            os << " degenerate\n";
            continue;
        }
        os << " mean " << e.mean << " std " << e.stddev << " chi_square " << e.chi_square
           << " mse " << e.mse << "\n";
        for (std::size_t b = 0; b + 1 < e.edges.size(); ++b) {
            const double center = 0.5 * (e.edges[b] + e.edges[b + 1]);
            os << center << " " << e.observed[b] << " " << e.expected[b] << "\n";
        }
    }
    return os.str();
}

Json episode_to_json(const EpisodeRecord& rec) {
    return Json{{"episode", rec.episode},
                {"arch", architecture_to_json(rec.arch)},
                {"eval", eval_to_json(rec.dist)},
                {"reward", rec.reward},
                {"failed", rec.failed},
                {"trained_batches", rec.trained_batches},
                {"wall_time_s", rec.wall_time_s}};
}

EpisodeRecord episode_from_json(const Json& j) {
    EpisodeRecord rec;
    rec.episode = require<std::size_t>(j, "episode");
    rec.arch = architecture_from_json(require<Json>(j, "arch"));
    rec.dist = eval_from_json(require<Json>(j, "eval"));
    rec.reward = require<double>(j, "reward");
    rec.failed = require<bool>(j, "failed");
    rec.trained_batches = require<std::size_t>(j, "trained_batches");
    rec.wall_time_s = require<double>(j, "wall_time_s");
    return rec;
}

Json train_log_to_json(const TrainLog& log) {
    return Json{{"epoch_loss", log.epoch_loss},
                {"epoch_accuracy", log.epoch_accuracy},
                {"skipped_batches", log.skipped_batches},
                {"total_batches", log.total_batches},
                {"noise_samples_used", log.noise_samples_used}};
}

std::vector<Json> read_json_records(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();

    try {
        return {Json::parse(text)};
    } catch (const Json::exception&) {
        // fall through to NDJSON
    }
    std::vector<Json> records;
    std::istringstream lines(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            records.push_back(Json::parse(line));
        } catch (const Json::exception& e) {
            throw format_error("malformed JSON at " + path.string() + ":" +
                               std::to_string(lineno) + ": " + e.what());
        }
    }
    if (records.empty()) throw format_error("no JSON records in '" + path.string() + "'");
    return records;
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path.string() + "'");
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw format_error("malformed JSON in '" + path.string() + "': " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write '" + path.string() + "'");
    out << j.dump(2) << "\n";
    if (!out) throw io_error("write failed for '" + path.string() + "'");
}

}  // namespace cim
