#include "scal/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>

#include "scal/affinity.hpp"
#include "scal/error.hpp"
#include "scal/landmarks.hpp"
#include "scal/matrix_io.hpp"
#include "scal/metrics.hpp"
#include "scal/rng.hpp"

namespace scal {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Seed-stream tags for the pipeline stages.
enum : std::uint64_t { kSeedLandmarks = 1, kSeedInit = 2, kSeedTrain = 3, kSeedCluster = 4 };

template <typename F>
auto timed(double& slot, F&& f) {
    const auto start = Clock::now();
    if constexpr (std::is_void_v<decltype(f())>) {
        f();
        slot += seconds_since(start);
    } else {
        auto result = f();
        slot += seconds_since(start);
        return result;
    }
}

template <typename F>
auto stage(const char* name, F&& f) {
    try {
        return f();
    } catch (const PipelineError&) {
        throw;
    } catch (const std::exception& e) {
        throw PipelineError(name, e.what());
    }
}

/// Removes every file written so far when a later write fails.
class OutputGuard {
public:
    ~OutputGuard() {
        if (!committed_) {
            for (const auto& path : written_) {
                std::error_code ec;
                fs::remove(path, ec);
            }
        }
    }
    void add(const fs::path& path) { written_.push_back(path); }
    void commit() { committed_ = true; }

private:
    std::vector<fs::path> written_;
    bool committed_ = false;
};

void write_outputs(const Dataset& dataset, const PipelineConfig& config,
                   const RunReport& report) {
    const fs::path dir(config.out_dir);
    fs::create_directories(dir);
    OutputGuard guard;

    {
        const fs::path path = dir / "labels.csv";
        guard.add(path);
        std::ofstream out(path);
        if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
        for (std::size_t i = 0; i < report.assignment.labels.size(); ++i) {
            out << i << ',' << report.assignment.labels[i] << '\n';
        }
        if (!out) throw FormatError("write failed for '" + path.string() + "'");
    }
    {
        const fs::path path = dir / "metrics.json";
        guard.add(path);
        std::ofstream out(path);
        if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
        out << report.to_json().dump(2) << '\n';
        if (!out) throw FormatError("write failed for '" + path.string() + "'");
    }
    if (dataset.dim() == 2) {
        const fs::path path = dir / "points.csv";
        guard.add(path);
        std::ofstream out(path);
        if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
        out << "x,y,cluster\n";
        char buf[64];
        for (Eigen::Index i = 0; i < dataset.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g", dataset.features(i, 0),
                          dataset.features(i, 1));
            out << buf << ',' << report.assignment.labels[static_cast<std::size_t>(i)] << '\n';
        }
        if (!out) throw FormatError("write failed for '" + path.string() + "'");
    }
    guard.commit();
}

} // namespace

Method method_from_string(const std::string& name) {
    if (name == "scal_r") return Method::scal_r;
    if (name == "scal_k") return Method::scal_k;
    if (name == "kmeans" || name == "kmeans_baseline") return Method::kmeans_baseline;
    if (name == "exact") return Method::exact;
    throw ParameterError("unknown method '" + name + "'");
}

std::string to_string(Method method) {
    switch (method) {
    case Method::scal_r: return "scal_r";
    case Method::scal_k: return "scal_k";
    case Method::kmeans_baseline: return "kmeans";
    case Method::exact: return "exact";
    }
    return "?";
}

nlohmann::json RunReport::to_json() const {
    nlohmann::json j;
    j["dataset"] = dataset_name;
    j["method"] = scal::to_string(method);
    j["p"] = p;
    j["k"] = k;
    j["seed"] = seed;
    j["purity"] = purity ? nlohmann::json(*purity) : nlohmann::json(nullptr);
    j["nmi"] = nmi ? nlohmann::json(*nmi) : nlohmann::json(nullptr);
    j["wall_times"] = {{"landmarks", times.landmarks},
                       {"affinity", times.affinity},
                       {"train", times.train},
                       {"cluster", times.cluster}};
    return j;
}

std::vector<int> auto_architecture(int p, int k) {
    if (p < 1 || k < 1) throw ParameterError("auto_architecture: p and k must be positive");
    return {p,
            std::min(512, 2 * p),
            std::min(256, p),
            std::max(2, k),
            std::min(256, p),
            std::min(512, 2 * p),
            p};
}

Dataset prepare_dataset(const PipelineConfig& config) {
    Dataset dataset;
    bool from_csv = false;
    if (config.dataset == "csv") {
        dataset = load_csv(config.csv_path, config.label_column);
        from_csv = true;
    } else if (config.dataset == "idx") {
        dataset = load_idx(config.idx_images, config.idx_labels);
    } else {
        dataset = generate_synthetic(shape_from_string(config.dataset), config.n,
                                     config.noise, config.seed);
    }

    bool normalize = false;
    if (config.normalize == "on") normalize = true;
    else if (config.normalize == "off") normalize = false;
    else if (config.normalize == "auto") normalize = from_csv;
    else throw ParameterError("normalize must be one of auto|on|off");

    return normalize ? min_max_scale(dataset) : dataset;
}

RunReport run_on_dataset(const Dataset& dataset, const PipelineConfig& config) {
    const auto n = static_cast<int>(dataset.size());
    const int k = config.clusters;
    if (k < 1) throw PipelineError("config", "clusters must be positive");

    RunReport report;
    report.dataset_name = dataset.name;
    report.method = config.method;
    report.k = k;
    report.seed = config.seed;
    report.p = (config.method == Method::scal_r || config.method == Method::scal_k)
                   ? config.landmarks
                   : 0;

    if (config.method == Method::kmeans_baseline) {
        report.assignment = stage("cluster", [&] {
            return timed(report.times.cluster, [&] {
                return cluster(dataset.features, k, derive_seed(config.seed, kSeedCluster),
                               config.kmeans_restarts);
            });
        });
    } else if (config.method == Method::exact) {
        report.assignment = stage("exact", [&] {
            return timed(report.times.cluster, [&] {
                return spectral_cluster_exact(dataset, k, std::nullopt,
                                              derive_seed(config.seed, kSeedCluster),
                                              config.oracle_cap);
            });
        });
    } else {
        const int p = config.landmarks;
        if (p < 1 || p > n) {
            throw PipelineError("landmarks", "p=" + std::to_string(p) +
                                                 " must lie in [1, n=" + std::to_string(n) + "]");
        }

        // Algorithm stages: landmarks -> W -> D -> S -> train -> encode -> k-means.
        const LandmarkSet landmarks = stage("landmarks", [&] {
            return timed(report.times.landmarks, [&] {
                return config.method == Method::scal_k
                           ? select_kmeans(dataset, p, derive_seed(config.seed, kSeedLandmarks))
                           : select_random(dataset, p, derive_seed(config.seed, kSeedLandmarks));
            });
        });

        AffinityMatrix w;
        ScaledMatrix s;
        stage("affinity", [&] {
            timed(report.times.affinity, [&] {
                const Eigen::MatrixXd d2 = landmark_sq_distances(dataset, landmarks);
                w = affinity_from_sq_distances(d2, median_bandwidth(d2));
                s = scaled_input(w, degree_vector(w));
            });
        });

        std::vector<int> arch = config.architecture;
        if (arch.empty()) arch = auto_architecture(p, k);
        if (arch.size() == 5) {
            // Hidden sizes only; wrap with the input/output width p.
            arch.insert(arch.begin(), p);
            arch.push_back(p);
        }
        if (arch.size() != 7 || arch.front() != p || arch.back() != p) {
            throw PipelineError("train", "architecture must list 5 hidden sizes or 7 sizes "
                                         "with input and output equal to p");
        }

        TrainConfig train_config = config.train;
        train_config.seed = derive_seed(config.seed, kSeedTrain);
        train_config.batch_size = std::min<int>(train_config.batch_size, n);

        const TrainResult trained = stage("train", [&] {
            return timed(report.times.train, [&] {
                return train(init_network(arch, derive_seed(config.seed, kSeedInit)), s,
                             train_config);
            });
        });
        report.loss_history = trained.loss_history;

        report.assignment = stage("cluster", [&] {
            return timed(report.times.cluster, [&] {
                const Embedding embedding = encode(trained.params, s);
                return cluster(embedding.z.transpose(), k,
                               derive_seed(config.seed, kSeedCluster), config.kmeans_restarts);
            });
        });

        if (config.dump_matrices) {
            stage("dump", [&] {
                const fs::path dir(config.out_dir);
                fs::create_directories(dir);
                write_matrix((dir / "w.lspc").string(), w.w);
                write_matrix((dir / "s.lspc").string(), s.s);
            });
        }
        if (config.save_model) {
            stage("dump", [&] {
                const fs::path dir(config.out_dir);
                fs::create_directories(dir);
                save_network((dir / "model.laen").string(), trained.params);
            });
        }
    }

    if (dataset.has_labels()) {
        report.purity = purity(report.assignment, dataset.labels);
        report.nmi = nmi(report.assignment, dataset.labels);
    }

    if (config.write_outputs) {
        stage("output", [&] { write_outputs(dataset, config, report); });
    }
    return report;
}

RunReport run_pipeline(const PipelineConfig& config) {
    const Dataset dataset = stage("load", [&] { return prepare_dataset(config); });
    return run_on_dataset(dataset, config);
}

std::vector<SweepCell> sweep(const PipelineConfig& config, const std::vector<int>& p_values,
                             int repeats) {
    if (p_values.empty()) throw ParameterError("sweep: empty p list");
    if (repeats < 1) throw ParameterError("sweep: repeats must be positive");

    const Dataset dataset = stage("load", [&] { return prepare_dataset(config); });
    for (int p : p_values) {
        if (p < 1 || p > dataset.size()) {
            throw ParameterError("sweep: p=" + std::to_string(p) + " must lie in [1, n=" +
                                 std::to_string(dataset.size()) + "]");
        }
    }
    const int p_max = *std::max_element(p_values.begin(), p_values.end());

    std::vector<SweepCell> cells;
    for (int repeat = 0; repeat < repeats; ++repeat) {
        for (int p : p_values) {
            SweepCell cell;
            cell.p = p;
            cell.repeat = repeat;
            cell.seed = config.seed + static_cast<std::uint64_t>(repeat);

            PipelineConfig run = config;
            run.landmarks = p;
            run.seed = cell.seed;
            run.write_outputs = false;
            run.dump_matrices = false;
            run.save_model = false;
            try {
                const RunReport report = run_on_dataset(dataset, run);
                cell.ok = true;
                cell.purity = report.purity.value_or(std::nan(""));
                cell.nmi = report.nmi.value_or(std::nan(""));
                cell.times = report.times;
            } catch (const std::exception& e) {
                cell.ok = false;  // marked failed; the sweep continues
                cell.error = e.what();
            }
            cells.push_back(std::move(cell));
        }
    }

    // Times normalized to the largest-p run of the same repeat.
    for (auto& cell : cells) {
        const auto anchor = std::find_if(cells.begin(), cells.end(), [&](const SweepCell& c) {
            return c.repeat == cell.repeat && c.p == p_max && c.ok;
        });
        cell.time_total_norm = (cell.ok && anchor != cells.end() && anchor->times.total() > 0.0)
                                   ? cell.times.total() / anchor->times.total()
                                   : std::nan("");
    }

    const fs::path dir(config.out_dir);
    fs::create_directories(dir);
    const fs::path path = dir / "sweep.csv";
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
    out << "p,repeat,seed,status,purity,nmi,t_landmarks,t_affinity,t_train,t_cluster,"
           "t_total,t_total_norm,error\n";
    for (const auto& cell : cells) {
        out << cell.p << ',' << cell.repeat << ',' << cell.seed << ','
            << (cell.ok ? "ok" : "failed") << ',';
        if (cell.ok) {
            out << cell.purity << ',' << cell.nmi << ',' << cell.times.landmarks << ','
                << cell.times.affinity << ',' << cell.times.train << ',' << cell.times.cluster
                << ',' << cell.times.total() << ',' << cell.time_total_norm << ',';
        } else {
            out << ",,,,,,,,";
        }
        std::string msg = cell.error;
        std::replace(msg.begin(), msg.end(), ',', ';');
        out << '"' << msg << '"' << '\n';
    }
    if (!out) throw FormatError("write failed for '" + path.string() + "'");
    return cells;
}

PipelineConfig config_from_json(const nlohmann::json& j) {
    PipelineConfig config;
    if (j.contains("dataset")) config.dataset = j.at("dataset").get<std::string>();
    if (j.contains("n")) config.n = j.at("n").get<int>();
    if (j.contains("noise")) config.noise = j.at("noise").get<double>();
    if (j.contains("csv_path")) config.csv_path = j.at("csv_path").get<std::string>();
    if (j.contains("label_column") && !j.at("label_column").is_null()) {
        config.label_column = j.at("label_column").get<int>();
    }
    if (j.contains("idx_images")) config.idx_images = j.at("idx_images").get<std::string>();
    if (j.contains("idx_labels")) config.idx_labels = j.at("idx_labels").get<std::string>();
    if (j.contains("normalize")) config.normalize = j.at("normalize").get<std::string>();
    if (j.contains("method")) config.method = method_from_string(j.at("method").get<std::string>());
    if (j.contains("landmarks")) config.landmarks = j.at("landmarks").get<int>();
    if (j.contains("clusters")) config.clusters = j.at("clusters").get<int>();
    if (j.contains("arch") && !j.at("arch").is_null()) {
        if (j.at("arch").is_string()) {
            if (j.at("arch").get<std::string>() != "auto") {
                throw ParameterError("arch must be \"auto\" or an integer array");
            }
        } else {
            config.architecture = j.at("arch").get<std::vector<int>>();
        }
    }
    if (j.contains("epochs")) config.train.epochs = j.at("epochs").get<int>();
    if (j.contains("batch_size")) config.train.batch_size = j.at("batch_size").get<int>();
    if (j.contains("learning_rate")) config.train.learning_rate = j.at("learning_rate").get<double>();
    if (j.contains("shuffle")) config.train.shuffle = j.at("shuffle").get<bool>();
    if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("out_dir")) config.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("kmeans_restarts")) config.kmeans_restarts = j.at("kmeans_restarts").get<int>();
    if (j.contains("oracle_cap")) config.oracle_cap = j.at("oracle_cap").get<int>();
    if (j.contains("dump_matrices")) config.dump_matrices = j.at("dump_matrices").get<bool>();
    if (j.contains("save_model")) config.save_model = j.at("save_model").get<bool>();
    return config;
}

} // namespace scal
