// Command-line front end: runs the landmark spectral clustering pipeline,
// the exact small-instance solver, the k-means baseline, or landmark sweeps.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "scal/error.hpp"
#include "scal/pipeline.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Landmark spectral clustering with an autoencoder eigensolver"};

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file; flags override its values");

    std::string dataset = "two_moons";
    app.add_option("--dataset", dataset,
                   "two_moons|two_circles|moon_circle|rings|csv|idx")
        ->check(CLI::IsMember({"two_moons", "two_circles", "moon_circle", "rings",
                               "concentric_rings", "csv", "idx"}));
    int n = 4000;
    app.add_option("--n", n, "points to generate (generator datasets)");
    double noise = 0.05;
    app.add_option("--noise", noise, "generator jitter standard deviation");
    std::string csv_path;
    app.add_option("--csv-path", csv_path, "CSV input path (--dataset csv)");
    int label_column = -1;
    app.add_option("--label-column", label_column, "CSV label column index");
    std::string idx_images, idx_labels;
    app.add_option("--idx-images", idx_images, "IDX image file (--dataset idx)");
    app.add_option("--idx-labels", idx_labels, "IDX label file (--dataset idx)");
    std::string normalize = "auto";
    app.add_option("--normalize", normalize, "min-max scale features: auto|on|off")
        ->check(CLI::IsMember({"auto", "on", "off"}));

    std::string method = "scal_r";
    app.add_option("--method", method, "scal_r|scal_k|kmeans|exact")
        ->check(CLI::IsMember({"scal_r", "scal_k", "kmeans", "exact"}));
    std::string landmark_method;
    app.add_option("--landmark-method", landmark_method,
                   "override landmark selection: random|kmeans")
        ->check(CLI::IsMember({"random", "kmeans"}));
    int landmarks = 200;
    app.add_option("--landmarks", landmarks, "number of landmarks p");
    int clusters = 2;
    app.add_option("--clusters", clusters, "number of clusters k");
    std::vector<int> arch;
    app.add_option("--arch", arch,
                   "hidden layer sizes (5 values) or full layer sizes (7); default auto")
        ->expected(-1);

    int epochs = 10;
    app.add_option("--epochs", epochs, "training epochs");
    int batch_size = 64;
    app.add_option("--batch-size", batch_size, "mini-batch size");
    double lr = -1.0;
    app.add_option("--lr", lr, "learning rate");
    std::uint64_t seed = 0;
    app.add_option("--seed", seed, "random seed");
    std::string out_dir = "out";
    app.add_option("--out-dir", out_dir, "output directory");
    int restarts = 10;
    app.add_option("--kmeans-restarts", restarts, "k-means restarts");
    bool dump_matrices = false;
    app.add_flag("--dump-matrices", dump_matrices, "write w.lspc and s.lspc checkpoints");
    bool save_model = false;
    app.add_flag("--save-model", save_model, "write model.laen");

    std::vector<int> sweep_p;
    app.add_option("--sweep", sweep_p, "landmark counts for a sweep run")->delimiter(',');
    int repeats = 3;
    app.add_option("--repeats", repeats, "repeats per sweep cell");

    CLI11_PARSE(app, argc, argv);

    try {
        scal::PipelineConfig config;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) {
                std::cerr << "error: cannot open config file '" << config_path << "'\n";
                return 1;
            }
            config = scal::config_from_json(nlohmann::json::parse(in));
        }

        // Flags the user actually passed override the config file.
        auto set = [&app](const char* flag) { return app.count(flag) > 0; };
        if (set("--dataset") || config_path.empty()) config.dataset = dataset;
        if (set("--n") || config_path.empty()) config.n = n;
        if (set("--noise") || config_path.empty()) config.noise = noise;
        if (set("--csv-path")) config.csv_path = csv_path;
        if (set("--label-column")) config.label_column = label_column;
        if (set("--idx-images")) config.idx_images = idx_images;
        if (set("--idx-labels")) config.idx_labels = idx_labels;
        if (set("--normalize")) config.normalize = normalize;
        if (set("--method") || config_path.empty()) {
            config.method = scal::method_from_string(method);
        }
        if (set("--landmarks") || config_path.empty()) config.landmarks = landmarks;
        if (set("--clusters") || config_path.empty()) config.clusters = clusters;
        if (set("--arch")) config.architecture = arch;
        if (set("--epochs") || config_path.empty()) config.train.epochs = epochs;
        if (set("--batch-size") || config_path.empty()) config.train.batch_size = batch_size;
        if (set("--lr")) config.train.learning_rate = lr;
        if (set("--seed") || config_path.empty()) config.seed = seed;
        if (set("--out-dir") || config_path.empty()) config.out_dir = out_dir;
        if (set("--kmeans-restarts")) config.kmeans_restarts = restarts;
        if (set("--dump-matrices")) config.dump_matrices = dump_matrices;
        if (set("--save-model")) config.save_model = save_model;

        if (set("--landmark-method")) {
            // Landmark selection override: scal_r/scal_k only differ here.
            const bool kmeans_landmarks = landmark_method == "kmeans";
            if (config.method == scal::Method::scal_r && kmeans_landmarks) {
                config.method = scal::Method::scal_k;
            } else if (config.method == scal::Method::scal_k && !kmeans_landmarks) {
                config.method = scal::Method::scal_r;
            }
        }

        if (!sweep_p.empty() || set("--repeats")) {
            if (sweep_p.empty()) {
                sweep_p = {100, 200, 500, 1000};  // default landmark grid
            }
            const auto cells = scal::sweep(config, sweep_p, repeats);
            int failed = 0;
            for (const auto& cell : cells) {
                if (cell.ok) {
                    std::printf("p=%-6d repeat=%-3d purity=%-8.4f total=%.3fs norm=%.3f\n",
                                cell.p, cell.repeat, cell.purity, cell.times.total(),
                                cell.time_total_norm);
                } else {
                    ++failed;
                    std::printf("p=%-6d repeat=%-3d FAILED: %s\n", cell.p, cell.repeat,
                                cell.error.c_str());
                }
            }
            std::printf("sweep written to %s/sweep.csv (%zu cells, %d failed)\n",
                        config.out_dir.c_str(), cells.size(), failed);
            return failed == static_cast<int>(cells.size()) ? 1 : 0;
        }

        const scal::RunReport report = scal::run_pipeline(config);
        std::cout << report.to_json().dump(2) << '\n';
        std::cerr << "outputs written to " << config.out_dir << "/\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
