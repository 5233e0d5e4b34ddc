// Command-line front end for the DEGAN anomaly-detection pipeline:
// synth -> gridsearch -> train -> detect -> eval (+ plot).

#include "degan/detector.hpp"
#include "degan/eval.hpp"
#include "degan/gan.hpp"
#include "degan/motif.hpp"
#include "degan/plot.hpp"
#include "degan/selection.hpp"
#include "degan/synth.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace degan;

namespace {

struct RunOptions {
    gan::GanConfig gan;
    std::string arch = "cnn";
    std::string noise = "normal";
    Eigen::Index clusters = 1;
    std::string metric = "euclidean";
    Scalar bandwidth = 50.0;
    std::vector<Scalar> rt{100, 150, 200};
    int jobs = 1;
    int repeats = 1;
    std::string out = "out";
};

std::vector<Scalar> parse_list(const std::string& csv) {
    std::vector<Scalar> vals;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) vals.push_back(parse_scalar(tok));
    return vals;
}

/// Config-file values override built-in defaults; CLI flags override both.
RunOptions load_config_defaults(int argc, char** argv) {
    RunOptions opt;
    std::string config_path;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
    if (config_path.empty()) return opt;

    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cli: cannot open config " + config_path);
    json j = json::parse(in);
    if (j.contains("wl")) opt.gan.wl = j["wl"].get<Eigen::Index>();
    if (j.contains("noise_dim")) opt.gan.noise_dim = j["noise_dim"].get<Eigen::Index>();
    if (j.contains("g_lr")) opt.gan.g_lr = j["g_lr"].get<Scalar>();
    if (j.contains("d_lr")) opt.gan.d_lr = j["d_lr"].get<Scalar>();
    if (j.contains("epochs")) opt.gan.max_epochs = j["epochs"].get<Eigen::Index>();
    if (j.contains("checkpoint_interval"))
        opt.gan.checkpoint_interval = j["checkpoint_interval"].get<Eigen::Index>();
    if (j.contains("batch")) opt.gan.batch_size = j["batch"].get<Eigen::Index>();
    if (j.contains("seed")) opt.gan.seed = j["seed"].get<uint64_t>();
    if (j.contains("dropout")) opt.gan.dropout_rate = j["dropout"].get<Scalar>();
    if (j.contains("arch")) opt.arch = j["arch"].get<std::string>();
    if (j.contains("noise")) opt.noise = j["noise"].get<std::string>();
    if (j.contains("clusters")) opt.clusters = j["clusters"].get<Eigen::Index>();
    if (j.contains("metric")) opt.metric = j["metric"].get<std::string>();
    if (j.contains("bandwidth")) opt.bandwidth = j["bandwidth"].get<Scalar>();
    if (j.contains("rt")) opt.rt = j["rt"].get<std::vector<Scalar>>();
    if (j.contains("jobs")) opt.jobs = j["jobs"].get<int>();
    if (j.contains("repeats")) opt.repeats = j["repeats"].get<int>();
    if (j.contains("out")) opt.out = j["out"].get<std::string>();
    return opt;
}

void add_gan_flags(CLI::App* cmd, RunOptions& opt, std::string& config_path) {
    cmd->add_option("--config", config_path, "JSON config file (flags override it)");
    cmd->add_option("--wl", opt.gan.wl, "sliding window length");
    cmd->add_option("--noise-dim", opt.gan.noise_dim, "generator noise dimension");
    cmd->add_option("--g-lr", opt.gan.g_lr, "generator learning rate");
    cmd->add_option("--d-lr", opt.gan.d_lr, "discriminator learning rate");
    cmd->add_option("--epochs", opt.gan.max_epochs, "maximum training epochs");
    cmd->add_option("--checkpoint-interval", opt.gan.checkpoint_interval,
                    "epochs between checkpoints");
    cmd->add_option("--batch", opt.gan.batch_size, "batch size");
    cmd->add_option("--seed", opt.gan.seed, "RNG seed");
    cmd->add_option("--dropout", opt.gan.dropout_rate, "discriminator dropout rate");
    cmd->add_option("--arch", opt.arch, "discriminator architecture: cnn|dense")
        ->check(CLI::IsMember({"cnn", "dense"}));
    cmd->add_option("--noise", opt.noise, "noise mode: normal|uniform01")
        ->check(CLI::IsMember({"normal", "uniform01"}));
}

void finalize_gan_config(RunOptions& opt) {
    opt.gan.d_arch = opt.arch == "dense" ? nn::ArchTag::DenseD : nn::ArchTag::CnnD;
    opt.gan.noise = opt.noise == "uniform01" ? gan::NoiseMode::Uniform01
                                             : gan::NoiseMode::Normal;
}

synth::AnomalyKind kind_from_string(const std::string& s) {
    if (s == "spike") return synth::AnomalyKind::Spike;
    if (s == "level_shift") return synth::AnomalyKind::LevelShift;
    if (s == "burst") return synth::AnomalyKind::Burst;
    throw std::runtime_error("cli: unknown anomaly kind '" + s + "'");
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir) {
    std::ifstream in(spec_path);
    if (!in) throw std::runtime_error("cli: cannot open spec " + spec_path);
    json j = json::parse(in);
    const std::string kind = j.value("kind", "track");
    fs::create_directories(out_dir);

    if (kind == "track") {
        synth::TrackSpec spec;
        spec.miles = j.value("miles", 5);
        spec.samples_per_mile = j.value("samples_per_mile", 5280);
        spec.inspections = j.value("inspections", 3);
        spec.noise_sigma = j.value("noise_sigma", 0.1);
        spec.seed = j.value("seed", 0);
        for (const auto& plan : j.value("plans", json::array())) {
            spec.plans.emplace_back();
            for (const auto& a : plan)
                spec.plans.back().push_back({a.at("position").get<Scalar>(),
                                             kind_from_string(a.value("kind", "spike")),
                                             a.value("magnitude", 10.0)});
        }
        const auto files = synth::write_track(synth::gen_track(spec), out_dir);
        std::cout << "wrote " << files.size() << " files to " << out_dir << "\n";
    } else if (kind == "sine") {
        synth::SineSpec spec = j.value("mode", "dispersed") == "clustered"
                                   ? synth::SineSpec::clustered(j.value("count", 10000),
                                                                j.value("length", 100),
                                                                j.value("seed", 0))
                                   : synth::SineSpec::dispersed(j.value("count", 10000),
                                                                j.value("length", 100),
                                                                j.value("seed", 0));
        const Matrix rows = synth::gen_sine_set(spec);
        const std::string path = (fs::path(out_dir) / "sines.csv").string();
        std::ofstream out(path);
        for (Eigen::Index r = 0; r < rows.rows(); ++r) {
            for (Eigen::Index c = 0; c < rows.cols(); ++c) {
                if (c) out << ',';
                out << format_scalar(rows(r, c));
            }
            out << '\n';
        }
        std::ofstream manifest((fs::path(out_dir) / "manifest.json").string());
        manifest << json{{"files", {"sines.csv"}}}.dump(2) << '\n';
        std::cout << "wrote " << rows.rows() << " waves to " << path << "\n";
    } else {
        throw std::runtime_error("cli: spec kind must be 'track' or 'sine'");
    }
    return 0;
}

void write_selection(const selection::SelectionResult& sel, const std::string& dir) {
    const std::string ckpt = "checkpoint_epoch_" + std::to_string(sel.epoch) + ".txt";
    nn::save_checkpoint(sel.d_params, sel.epoch, (fs::path(dir) / "selected_d.txt").string());
    json j{{"mode", sel.mode == selection::SelectionMode::UnlabeledNa ? "unlabeled_na"
                                                                      : "labeled_f1"},
           {"epoch", sel.epoch},
           {"score", std::isinf(sel.score) ? json("inf") : json(sel.score)},
           {"checkpoint", ckpt}};
    std::ofstream((fs::path(dir) / "selection.json").string()) << j.dump(2) << '\n';
}

int run_train(RunOptions opt, const std::string& train_path, const std::string& val_path,
              const std::string& selection_mode, const std::string& labels_path) {
    finalize_gan_config(opt);
    const TimeSeries train = load_series(train_path);
    const TimeSeries val = load_series(val_path);
    const WindowMatrix windows = extract_windows(train, opt.gan.wl);

    for (int rep = 0; rep < opt.repeats; ++rep) {
        gan::GanConfig cfg = opt.gan;
        cfg.seed = opt.gan.seed + static_cast<uint64_t>(rep);
        const std::string dir =
            opt.repeats > 1 ? (fs::path(opt.out) / ("run" + std::to_string(rep))).string()
                            : opt.out;
        fs::create_directories(dir);

        if (opt.clusters > 1) {
            const auto md = motif::motif_train(windows, val, opt.clusters,
                                               motif::metric_from_string(opt.metric), cfg);
            std::ofstream((fs::path(dir) / "cluster_model.json").string())
                << motif::cluster_model_to_json(md.clusters) << '\n';
            for (size_t c = 0; c < md.discriminators.size(); ++c)
                nn::save_checkpoint(
                    md.discriminators[c], md.selected_epochs[c],
                    (fs::path(dir) / ("selected_cluster" + std::to_string(c) + ".txt"))
                        .string());
            std::cout << dir << ": " << opt.clusters << " cluster discriminators selected\n";
            continue;
        }

        const auto series = gan::train_gan(windows, val, cfg);
        gan::write_training_log(series, (fs::path(dir) / "training_log.csv").string());
        for (const auto& rec : series.records)
            nn::save_checkpoint(
                rec.d_params, rec.epoch,
                (fs::path(dir) / ("checkpoint_epoch_" + std::to_string(rec.epoch) + ".txt"))
                    .string());

        selection::SelectionResult sel;
        if (selection_mode == "f1") {
            selection::LabeledValidation lv;
            lv.series = val;
            lv.labels = load_labels(labels_path);
            lv.kde.bandwidth = opt.bandwidth;
            lv.r_t = opt.rt.front();
            sel = selection::select_discriminator(series, selection::SelectionMode::LabeledF1,
                                                  lv);
        } else {
            sel = selection::select_discriminator(series, selection::SelectionMode::UnlabeledNa);
        }
        write_selection(sel, dir);
        std::cout << dir << ": selected epoch " << sel.epoch << " (score "
                  << format_scalar(sel.score) << ")\n";
    }
    return 0;
}

int run_detect(const RunOptions& opt, const std::string& model_path,
               const std::string& series_path, const std::string& labels_path,
               const std::optional<Scalar>& threshold) {
    const TimeSeries series = load_series(series_path);
    detector::KdeConfig kde;
    kde.bandwidth = opt.bandwidth;
    kde.threshold_override = threshold;

    detector::DetectionReport report;
    if (fs::is_directory(model_path)) {
        const fs::path cm = fs::path(model_path) / "cluster_model.json";
        if (fs::exists(cm)) {
            std::ifstream in(cm);
            motif::MotifDetector md;
            md.clusters = motif::cluster_model_from_json(
                std::string(std::istreambuf_iterator<char>(in), {}));
            for (Eigen::Index c = 0; c < md.clusters.k; ++c) {
                const auto cp = nn::load_checkpoint(
                    (fs::path(model_path) / ("selected_cluster" + std::to_string(c) + ".txt"))
                        .string());
                md.discriminators.push_back(cp.net);
                md.selected_epochs.push_back(cp.epoch);
            }
            report = motif::motif_detect(md, series, kde);
        } else {
            const auto cp =
                nn::load_checkpoint((fs::path(model_path) / "selected_d.txt").string());
            report = detector::detect(cp.net, series, kde);
        }
    } else {
        const auto cp = nn::load_checkpoint(model_path);
        report = detector::detect(cp.net, series, kde);
    }

    fs::create_directories(opt.out);
    detector::write_report(report, (fs::path(opt.out) / "report.json").string());
    std::optional<LabeledAnomalies> labels;
    if (!labels_path.empty()) labels = load_labels(labels_path);
    plot::write_detection_svg(series, report, (fs::path(opt.out) / "plot.svg").string(),
                              labels);
    std::cout << report.predicted_anomalies.size() << " predicted anomalies ("
              << report.flagged_midpoints.size() << " flagged windows)\n";
    return 0;
}

std::vector<Scalar> predictions_from_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cli: cannot open report " + path);
    return json::parse(in).at("predicted_anomalies").get<std::vector<Scalar>>();
}

int run_eval(const std::vector<std::string>& reports, const std::vector<std::string>& labels,
             const std::string& predictions_csv, const std::vector<Scalar>& rt,
             const std::string& out_path) {
    std::vector<std::pair<std::string, std::vector<Scalar>>> prediction_sets;
    if (!predictions_csv.empty())
        prediction_sets.emplace_back("inline", parse_list(predictions_csv));
    for (const auto& r : reports)
        prediction_sets.emplace_back(fs::path(r).stem().string(), predictions_from_report(r));
    if (prediction_sets.size() != labels.size())
        throw std::runtime_error("cli: need one --labels per prediction set");

    std::vector<std::pair<std::string, std::vector<eval::EvalReport>>> rows;
    std::vector<std::vector<eval::EvalReport>> per_rt(rt.size());
    for (size_t i = 0; i < prediction_sets.size(); ++i) {
        const LabeledAnomalies truth = load_labels(labels[i]);
        std::vector<eval::EvalReport> cols;
        for (size_t t = 0; t < rt.size(); ++t) {
            cols.push_back(eval::match_and_score(truth, prediction_sets[i].second, rt[t]));
            per_rt[t].push_back(cols.back());
        }
        rows.emplace_back(prediction_sets[i].first, cols);
    }
    if (rows.size() > 1) {
        std::vector<eval::EvalReport> agg;
        for (const auto& reports_at_rt : per_rt) agg.push_back(eval::aggregate(reports_at_rt));
        rows.emplace_back("aggregate", agg);
    }
    eval::write_eval_csv(rows, out_path);
    for (const auto& [name, cols] : rows)
        for (const auto& r : cols)
            std::cout << name << " rt=" << format_scalar(r.r_t)
                      << " recall=" << (r.recall ? format_scalar(*r.recall) : "n/a")
                      << " precision=" << (r.precision ? format_scalar(*r.precision) : "n/a")
                      << " f1=" << (r.f1 ? format_scalar(*r.f1) : "n/a") << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        RunOptions opt = load_config_defaults(argc, argv);

        CLI::App app{"GAN-discriminator time-series anomaly detection"};
        app.require_subcommand(1);
        std::string config_path;

        auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset");
        std::string spec_path;
        synth_cmd->add_option("spec", spec_path, "JSON spec file")->required();
        synth_cmd->add_option("--config", config_path, "JSON config file");
        synth_cmd->add_option("--out", opt.out, "output directory");

        auto* grid_cmd = app.add_subcommand("gridsearch", "learning-rate grid search");
        std::string train_path, val_path;
        std::string g_grid_csv, d_grid_csv;
        grid_cmd->add_option("--train", train_path, "training series CSV")->required();
        grid_cmd->add_option("--validation", val_path, "clean validation series CSV")
            ->required();
        add_gan_flags(grid_cmd, opt, config_path);
        grid_cmd->add_option("--g-lr-grid", g_grid_csv, "comma list of generator rates");
        grid_cmd->add_option("--d-lr-grid", d_grid_csv, "comma list of discriminator rates");
        grid_cmd->add_option("--jobs", opt.jobs, "parallel training runs");
        grid_cmd->add_option("--out", opt.out, "output directory");

        auto* train_cmd = app.add_subcommand("train", "train a GAN and select its D");
        std::string selection_mode = "na", train_labels_path;
        train_cmd->add_option("--train", train_path, "training series CSV")->required();
        train_cmd->add_option("--validation", val_path, "validation series CSV")->required();
        add_gan_flags(train_cmd, opt, config_path);
        train_cmd->add_option("--clusters", opt.clusters, "motif cluster count (1 = plain)");
        train_cmd->add_option("--metric", opt.metric, "cluster metric: euclidean|dtw")
            ->check(CLI::IsMember({"euclidean", "dtw"}));
        train_cmd->add_option("--selection", selection_mode, "selection mode: na|f1")
            ->check(CLI::IsMember({"na", "f1"}));
        train_cmd->add_option("--labels", train_labels_path,
                              "validation labels (f1 selection)");
        train_cmd->add_option("--bandwidth", opt.bandwidth, "KDE bandwidth (f1 selection)");
        train_cmd->add_option("--rt", opt.rt, "tolerance grid (f1 selection)");
        train_cmd->add_option("--repeats", opt.repeats, "independent seeded repeats");
        train_cmd->add_option("--out", opt.out, "run directory");

        auto* detect_cmd = app.add_subcommand("detect", "detect anomalies on a series");
        std::string model_path, labels_path;
        Scalar threshold_flag = -1;
        detect_cmd->add_option("--config", config_path, "JSON config file");
        detect_cmd->add_option("--model", model_path, "checkpoint file or run directory")
            ->required();
        detect_cmd->add_option("--series", train_path, "test series CSV")->required();
        detect_cmd->add_option("--bandwidth", opt.bandwidth, "KDE bandwidth");
        detect_cmd->add_option("--threshold", threshold_flag,
                               "fixed peak height (overrides the histogram rule)");
        detect_cmd->add_option("--labels", labels_path, "ground-truth labels (plot only)");
        detect_cmd->add_option("--out", opt.out, "output directory");

        auto* eval_cmd = app.add_subcommand("eval", "tolerance-based scoring");
        std::vector<std::string> report_paths, label_paths;
        std::string predictions_csv, eval_out = "eval.csv";
        eval_cmd->add_option("--config", config_path, "JSON config file");
        eval_cmd->add_option("--report", report_paths, "detection report JSON (repeatable)");
        eval_cmd->add_option("--predictions", predictions_csv,
                             "inline comma list of predicted positions");
        eval_cmd->add_option("--labels", label_paths, "ground-truth CSV (one per report)");
        eval_cmd->add_option("--rt", opt.rt, "tolerance grid");
        eval_cmd->add_option("--out", eval_out, "output CSV");

        auto* plot_cmd = app.add_subcommand("plot", "render a detection report as SVG");
        std::string plot_report, plot_out = "plot.svg";
        plot_cmd->add_option("--config", config_path, "JSON config file");
        plot_cmd->add_option("--series", train_path, "series CSV")->required();
        plot_cmd->add_option("--report", plot_report, "detection report JSON")->required();
        plot_cmd->add_option("--labels", labels_path, "ground-truth labels");
        plot_cmd->add_option("--out", plot_out, "output SVG");

        CLI11_PARSE(app, argc, argv);

        if (synth_cmd->parsed()) return cmd_synth(spec_path, opt.out);

        if (grid_cmd->parsed()) {
            finalize_gan_config(opt);
            const TimeSeries train = load_series(train_path);
            const TimeSeries val = load_series(val_path);
            const WindowMatrix windows = extract_windows(train, opt.gan.wl);
            const auto g_grid = g_grid_csv.empty() ? selection::kDefaultGLrGrid
                                                   : parse_list(g_grid_csv);
            const auto d_grid = d_grid_csv.empty() ? selection::kDefaultDLrGrid
                                                   : parse_list(d_grid_csv);
            const auto res = selection::grid_search_lr(windows, val, opt.gan, g_grid, d_grid,
                                                       opt.jobs);
            fs::create_directories(opt.out);
            selection::write_grid_report(res,
                                         (fs::path(opt.out) / "grid_report.csv").string());
            std::cout << "best pair: g_lr=" << format_scalar(res.best_g_lr)
                      << " d_lr=" << format_scalar(res.best_d_lr) << "\n";
            return 0;
        }

        if (train_cmd->parsed())
            return run_train(opt, train_path, val_path, selection_mode, train_labels_path);

        if (detect_cmd->parsed()) {
            std::optional<Scalar> threshold;
            if (detect_cmd->count("--threshold")) threshold = threshold_flag;
            return run_detect(opt, model_path, train_path, labels_path, threshold);
        }

        if (eval_cmd->parsed())
            return run_eval(report_paths, label_paths, predictions_csv, opt.rt, eval_out);

        if (plot_cmd->parsed()) {
            const TimeSeries series = load_series(train_path);
            std::ifstream in(plot_report);
            if (!in) throw std::runtime_error("cli: cannot open report " + plot_report);
            const json j = json::parse(in);
            detector::DetectionReport report;
            report.flagged_midpoints = j.at("flagged_midpoints").get<std::vector<Scalar>>();
            const auto grid = j.at("grid").get<std::vector<Scalar>>();
            const auto density = j.at("density").get<std::vector<Scalar>>();
            report.grid = Eigen::Map<const Vector>(grid.data(),
                                                   static_cast<Eigen::Index>(grid.size()));
            report.density = Eigen::Map<const Vector>(
                density.data(), static_cast<Eigen::Index>(density.size()));
            report.peak_threshold = j.at("peak_threshold").get<Scalar>();
            report.predicted_anomalies =
                j.at("predicted_anomalies").get<std::vector<Scalar>>();
            std::optional<LabeledAnomalies> labels;
            if (!labels_path.empty()) labels = load_labels(labels_path);
            plot::write_detection_svg(series, report, plot_out, labels);
            return 0;
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
