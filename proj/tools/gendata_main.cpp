// Writes seeded synthetic datasets in the exact MNIST IDX / CIFAR-10 binary
// layouts, so the toolkit can be exercised on machines without the real
// datasets. The files parse with any standard loader.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "cim/errors.hpp"
#include "cim/synthetic.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
    CLI::App app{"Synthetic dataset generator (MNIST IDX / CIFAR-10 binary layout)"};
    std::string format = "mnist";
    std::string out_dir = ".";
    std::size_t train_count = 12000, test_count = 2400;
    std::uint64_t seed = 1;
    app.add_option("--format", format, "mnist | cifar10")->capture_default_str();
    app.add_option("--out-dir", out_dir)->capture_default_str();
    app.add_option("--train", train_count, "Training example count")->capture_default_str();
    app.add_option("--test", test_count, "Test example count")->capture_default_str();
    app.add_option("--seed", seed)->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    try {
        const fs::path dir = out_dir;
        fs::create_directories(dir);
        if (format == "mnist") {
            const auto train = cim::make_synthetic_mnist(train_count, seed, "train");
            const auto test = cim::make_synthetic_mnist(test_count, seed, "test");
            cim::write_idx_pair(train, dir / "train-images-idx3-ubyte",
                                dir / "train-labels-idx1-ubyte");
            cim::write_idx_pair(test, dir / "t10k-images-idx3-ubyte",
                                dir / "t10k-labels-idx1-ubyte");
        } else if (format == "cifar10") {
            const auto train = cim::make_synthetic_cifar(train_count, seed, "train");
            const auto test = cim::make_synthetic_cifar(test_count, seed, "test");
            cim::write_cifar_batch(train, dir / "data_batch_1.bin");
            cim::write_cifar_batch(test, dir / "test_batch.bin");
        } else {
            throw cim::config_error("unknown format '" + format + "'");
        }
        std::cout << "wrote synthetic " << format << " dataset (" << train_count << " train, "
                  << test_count << " test) to " << dir.string() << "\n";
        return 0;
    } catch (const cim::Error& e) {
        std::cerr << "error: " << e.category() << ": " << e.what() << "\n";
        return 1;
    }
}
