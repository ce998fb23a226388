#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "fext/experiment.hpp"

namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "fext_experiment" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_sinc_config(const fs::path& dir, const std::string& pipeline) {
    const fs::path path = dir / "experiment.toml";
    std::ofstream out(path);
    out << "alpha = 2.0\n"
        << "pipeline = [" << pipeline << "]\n"
        << "[domain]\n"
        << "dimension = 1\n"
        << "shape = \"cube\"\n"
        << "half_width = 0.5\n"
        << "[family]\n"
        << "kind = \"closed_form\"\n"
        << "base = \"sinc_power\"\n"
        << "power = 2\n"
        << "construction = \"single\"\n"
        << "[solver]\n"
        << "delta = 1e-6\n"
        << "tau_g = 0.25\n"
        << "tau_sigma = 0.5\n"
        << "iterations = 20\n"
        << "rule = \"tensor\"\n"
        << "tensor_resolution = 256\n"
        << "[cascade]\n"
        << "products = 64\n"
        << "periodization_terms = 129\n"
        << "grid_points = 2049\n"
        << "grid_window = 8.0\n"
        << "spatial_samples = 129\n"
        << "[gp]\n"
        << "steps = 40\n"
        << "grid_points = 512\n"
        << "grid_window = 1.5\n"
        << "[output]\n"
        << "directory = \"out\"\n";
    return path;
}

}  // namespace

TEST_CASE("solve pipeline produces sigma, multiplier and trace artifacts") {
    const fs::path dir = fresh_dir("solve");
    const fs::path config_path = write_sinc_config(dir, "\"solve\"");
    const auto cfg = fext::ExperimentConfig::load(config_path);
    const auto manifest = fext::run_experiment(cfg);

    CHECK(fs::exists(dir / "out" / "sigma.csv"));
    CHECK(fs::exists(dir / "out" / "multiplier.csv"));
    CHECK(fs::exists(dir / "out" / "trace.csv"));
    CHECK(fs::exists(dir / "out" / "manifest.txt"));
    CHECK(manifest.entries.size() == 3);

    // every CSV starts with a header row
    for (const auto& [sha, rel] : manifest.entries) {
        std::ifstream in(dir / "out" / rel);
        std::string header;
        std::getline(in, header);
        CHECK(header.find_first_not_of("abcdefghijklmnopqrstuvwxyz_0123456789 [],\r") == std::string::npos);
    }
}

TEST_CASE("cascade pipeline emits the eight panels") {
    const fs::path dir = fresh_dir("cascade");
    const fs::path config_path = write_sinc_config(dir, "\"cascade\"");
    auto cfg = fext::ExperimentConfig::load(config_path);
    cfg.write_pgm = false;
    const auto manifest = fext::run_experiment(cfg);
    for (const char* name : {"family.csv", "mask.csv", "phi_hat.csv", "phi.csv", "periodization.csv",
                             "wavelet_mask.csv", "psi_hat.csv", "psi.csv"}) {
        CHECK(fs::exists(dir / "out" / name));
    }
    CHECK(manifest.entries.size() == 8);

    // line-plot rasters accompany the panels when PGM output is on
    cfg.write_pgm = true;
    fext::run_experiment(cfg, std::nullopt, dir / "out_pgm");
    CHECK(fs::exists(dir / "out_pgm" / "phi.pgm"));
    CHECK(fs::exists(dir / "out_pgm" / "psi.pgm"));
    std::ifstream in(dir / "out_pgm" / "phi.pgm", std::ios::binary);
    std::string magic;
    in >> magic;
    CHECK(magic == "P5");
}

TEST_CASE("reruns with the same seed are byte-identical") {
    const fs::path dir = fresh_dir("determinism");
    const fs::path config_path = write_sinc_config(dir, "\"solve\", \"extrapolate\", \"gp_baseline\"");
    auto cfg = fext::ExperimentConfig::load(config_path);

    const auto first = fext::run_experiment(cfg, 7, dir / "out1");
    const auto second = fext::run_experiment(cfg, 7, dir / "out2");
    REQUIRE(first.entries.size() == second.entries.size());
    for (std::size_t i = 0; i < first.entries.size(); ++i) {
        CHECK(first.entries[i].second == second.entries[i].second);
        CHECK(first.entries[i].first == second.entries[i].first);  // equal hashes
    }

    const auto third = fext::run_experiment(cfg, 8, dir / "out3");
    bool any_differ = false;
    for (std::size_t i = 0; i < first.entries.size(); ++i)
        any_differ = any_differ || third.entries[i].first != first.entries[i].first;
    // fixed tensor rule: seed only enters Monte Carlo paths, so hashes agree
    CHECK_FALSE(any_differ);
}

TEST_CASE("monte carlo experiment responds to the seed override") {
    const fs::path dir = fresh_dir("seeded");
    const fs::path path = dir / "experiment.toml";
    {
        std::ofstream out(path);
        out << "alpha = 2.0\n"
            << "pipeline = [\"solve\"]\n"
            << "[domain]\n"
            << "dimension = 1\nshape = \"cube\"\nhalf_width = 0.5\n"
            << "[family]\n"
            << "kind = \"closed_form\"\nbase = \"sinc_power\"\npower = 2\n"
            << "construction = \"translates\"\noffsets = [0.25]\n"
            << "[solver]\n"
            << "delta = 1e-3\ntau_g = 0.15\ntau_sigma = 0.75\niterations = 5\n"
            << "rule = \"monte_carlo\"\nschedule_min = 100\nschedule_max = 500\nseed = 3\n"
            << "[output]\ndirectory = \"out\"\n";
    }
    const auto cfg = fext::ExperimentConfig::load(path);
    const auto a = fext::run_experiment(cfg, std::nullopt, dir / "a");
    const auto b = fext::run_experiment(cfg, std::nullopt, dir / "b");
    const auto c = fext::run_experiment(cfg, 99, dir / "c");
    CHECK(a.entries[0].first == b.entries[0].first);   // same seed, same sigma.csv
    CHECK(a.entries[0].first != c.entries[0].first);   // overridden seed changes it
}

TEST_CASE("unknown stages and bad configs fail with context") {
    const fs::path dir = fresh_dir("errors");
    const fs::path config_path = write_sinc_config(dir, "\"warp\"");
    const auto cfg = fext::ExperimentConfig::load(config_path);
    CHECK_THROWS_WITH(fext::run_experiment(cfg), Catch::Matchers::ContainsSubstring("unknown pipeline stage"));

    // missing IDX paths are rejected at load time
    const fs::path bad = dir / "bad.toml";
    {
        std::ofstream out(bad);
        out << "alpha = 4.0\n"
            << "pipeline = [\"solve\"]\n"
            << "[domain]\ndimension = 2\nshape = \"annulus\"\nr_min = 0.5\nr_max = 2.0\n"
            << "[family]\nkind = \"idx\"\nimages = \"does-not-exist\"\nlabels = \"nope\"\n"
            << "digit = 8\ncount = 5\n";
    }
    CHECK_THROWS_WITH(fext::ExperimentConfig::load(bad),
                      Catch::Matchers::ContainsSubstring("does not exist"));
}

TEST_CASE("gp baseline stage writes a monotone residual table") {
    const fs::path dir = fresh_dir("gp");
    const fs::path config_path = write_sinc_config(dir, "\"gp_baseline\"");
    const auto cfg = fext::ExperimentConfig::load(config_path);
    fext::run_experiment(cfg);
    std::ifstream in(dir / "out" / "gp_residuals.csv");
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line);  // header
    double prev = 1e300;
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        const double r = std::stod(line.substr(comma + 1));
        CHECK(r <= prev + 1e-14);
        prev = r;
        ++rows;
    }
    CHECK(rows == 40);
}
