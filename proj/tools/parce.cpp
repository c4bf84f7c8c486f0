// Command-line front end for the PaRCE navigation artifact.
//
//   gen-data   generate the tile corpus, manifest and OOD composites
//   train      train the softmax terrain classifier
//   fit-ae     fit the linear autoencoder
//   calibrate  fit the per-class loss Gaussians (overall | regional)
//   score      competency score for one image, or a whole manifest to CSV
//   navigate   run one closed-loop episode in a scenario
//   benchmark  run the variants x scenarios table
//   metrics    KS / AUROC / FPR@95TPR from a score CSV

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "parce/competency.hpp"
#include "parce/episode.hpp"
#include "parce/ini.hpp"
#include "parce/metrics.hpp"
#include "parce/rng.hpp"

namespace fs = std::filesystem;
using namespace parce;

namespace {

struct CommonOpts {
    std::string config = "configs/default.ini";
    std::uint64_t seed = 0;
    std::string artifacts = "artifacts";
};

Ini load_config(const CommonOpts& opts) {
    if (fs::exists(opts.config)) return Ini::from_file(opts.config);
    std::cerr << "note: config " << opts.config << " not found, using built-in defaults\n";
    return {};
}

CorpusParams corpus_params(const Ini& ini) {
    CorpusParams p;
    p.n_classes = static_cast<int>(ini.get_int("data", "classes", p.n_classes));
    p.tiles_per_class = static_cast<int>(ini.get_int("data", "tiles_per_class", p.tiles_per_class));
    p.test_tiles_per_class =
        static_cast<int>(ini.get_int("data", "test_tiles_per_class", p.test_tiles_per_class));
    p.n_ood_composites = static_cast<int>(ini.get_int("data", "ood_composites", p.n_ood_composites));
    p.tile_size = static_cast<int>(ini.get_int("data", "tile_size", p.tile_size));
    p.holdout_fraction = ini.get_double("data", "holdout_fraction", p.holdout_fraction);
    return p;
}

CameraModel camera_from(const Ini& ini) {
    CameraModel cam;
    cam.height_above_ground = ini.get_double("camera", "height", cam.height_above_ground);
    cam.pitch = ini.get_double("camera", "pitch_deg", 15.0) * M_PI / 180.0;
    cam.horizontal_fov = ini.get_double("camera", "hfov_deg", 90.0) * M_PI / 180.0;
    cam.vertical_fov = ini.get_double("camera", "vfov_deg", 90.0) * M_PI / 180.0;
    cam.image_width = static_cast<int>(ini.get_int("camera", "width", cam.image_width));
    cam.image_height = static_cast<int>(ini.get_int("camera", "height_px", cam.image_height));
    cam.max_view_distance = ini.get_double("camera", "max_view_distance", cam.max_view_distance);
    return cam;
}

FhParams fh_from(const Ini& ini) {
    FhParams fh;
    fh.k = ini.get_double("segmentation", "k", fh.k);
    fh.min_size = static_cast<int>(ini.get_int("segmentation", "min_size", fh.min_size));
    fh.smoothing_sigma = ini.get_double("segmentation", "sigma", fh.smoothing_sigma);
    return fh;
}

CompetencyConfig competency_from(const Ini& ini) {
    CompetencyConfig c;
    c.confidence_overall = ini.get_double("competency", "confidence_overall", c.confidence_overall);
    c.confidence_regional = ini.get_double("competency", "confidence_regional", c.confidence_regional);
    c.threshold_overall = ini.get_double("competency", "threshold_overall", c.threshold_overall);
    c.threshold_regional = ini.get_double("competency", "threshold_regional", c.threshold_regional);
    return c;
}

PlannerConfig planner_from(const Ini& ini) {
    PlannerConfig p;
    p.n_samples = static_cast<int>(ini.get_int("planner", "n_samples", p.n_samples));
    p.horizon = static_cast<int>(ini.get_int("planner", "horizon", p.horizon));
    p.bounds.lo.throttle = ini.get_double("planner", "u_min_throttle", p.bounds.lo.throttle);
    p.bounds.hi.throttle = ini.get_double("planner", "u_max_throttle", p.bounds.hi.throttle);
    p.bounds.lo.steer = ini.get_double("planner", "u_min_steer", p.bounds.lo.steer);
    p.bounds.hi.steer = ini.get_double("planner", "u_max_steer", p.bounds.hi.steer);
    p.w_ori = ini.get_double("planner", "w_ori", p.w_ori);
    p.w_goal_x = ini.get_double("planner", "w_goal_x", p.w_goal_x);
    p.w_goal_y = ini.get_double("planner", "w_goal_y", p.w_goal_y);
    p.footprint_length = ini.get_double("planner", "footprint_length", p.footprint_length);
    p.footprint_width = ini.get_double("planner", "footprint_width", p.footprint_width);
    p.backup_time = ini.get_double("planner", "backup_time", p.backup_time);
    p.turn_time = ini.get_double("planner", "turn_time", p.turn_time);
    p.backup_speed = ini.get_double("planner", "backup_speed", p.backup_speed);
    p.turn_rate = ini.get_double("planner", "turn_rate", p.turn_rate);
    p.near_field_range = ini.get_double("planner", "near_field_range", p.near_field_range);
    const CompetencyConfig c = competency_from(ini);
    p.eta_overall = c.threshold_overall;
    p.eta_regional = c.threshold_regional;
    return p;
}

EpisodeConfig episode_from(const Ini& ini) {
    EpisodeConfig cfg;
    cfg.dynamics.dt = ini.get_double("dynamics", "dt", cfg.dynamics.dt);
    cfg.dynamics.alpha = ini.get_double("dynamics", "alpha", cfg.dynamics.alpha);
    cfg.dynamics.beta = ini.get_double("dynamics", "beta", cfg.dynamics.beta);
    cfg.camera = camera_from(ini);
    cfg.planner = planner_from(ini);
    cfg.lqr = LqrWeights::table_defaults();
    for (int i = 0; i < 5; ++i)
        cfg.lqr.Q(i, i) = ini.get_double("lqr", "q" + std::to_string(i), cfg.lqr.Q(i, i));
    for (int i = 0; i < 2; ++i)
        cfg.lqr.R(i, i) = ini.get_double("lqr", "r" + std::to_string(i), cfg.lqr.R(i, i));
    cfg.replan_interval = static_cast<int>(ini.get_int("episode", "replan_interval", cfg.replan_interval));
    return cfg;
}

CompetencyEstimator load_estimator(const CommonOpts& opts, const Ini& ini) {
    const fs::path dir = opts.artifacts;
    return {load_classifier((dir / "classifier.bin").string()),
            load_autoencoder((dir / "autoencoder.bin").string()),
            load_loss_model((dir / "calib_overall.csv").string()),
            load_loss_model((dir / "calib_regional.csv").string()),
            competency_from(ini),
            fh_from(ini)};
}

std::string scenario_path(const std::string& arg, const std::string& scenario_dir) {
    if (fs::exists(arg)) return arg;
    const fs::path p = fs::path(scenario_dir) / ("scenario" + arg + ".ini");
    if (fs::exists(p)) return p.string();
    throw std::runtime_error("scenario not found: " + arg + " (tried " + p.string() + ")");
}

int run_gen_data(const CommonOpts& opts, const std::string& out_dir) {
    const Ini ini = load_config(opts);
    const CorpusParams params = corpus_params(ini);
    std::cout << "generating corpus: " << params.n_classes << " classes x "
              << params.tiles_per_class << " tiles (+" << params.test_tiles_per_class
              << " test) at " << params.tile_size << "px\n";
    const LabeledDataset data = generate_corpus(params, opts.seed);
    save_corpus(data, out_dir, "manifest.csv");

    fs::create_directories(fs::path(out_dir) / "ood");
    std::ofstream ood_list(fs::path(out_dir) / "ood_manifest.csv");
    ood_list << "ppm_path\n";
    for (int i = 0; i < params.n_ood_composites; ++i) {
        const Image img = generate_ood_composite(params, hash_combine(opts.seed, 0xc0deULL + i));
        std::ostringstream name;
        name << "ood/composite_" << i << ".ppm";
        write_ppm(img, (fs::path(out_dir) / name.str()).string());
        ood_list << name.str() << '\n';
    }
    std::cout << "wrote " << data.size() << " tiles + " << params.n_ood_composites
              << " OOD composites under " << out_dir << "\n";
    return 0;
}

int run_train(const CommonOpts& opts, const std::string& data_dir) {
    const Ini ini = load_config(opts);
    const LabeledDataset corpus = load_corpus((fs::path(data_dir) / "manifest.csv").string());
    const LabeledDataset train = corpus.filter(Split::train);
    const LabeledDataset holdout = corpus.filter(Split::holdout);
    const int epochs = static_cast<int>(ini.get_int("train", "epochs", 300));
    const double lr = ini.get_double("train", "learning_rate", 1.0);

    std::cout << "training on " << train.size() << " tiles (" << epochs << " epochs, lr " << lr
              << ")\n";
    const Classifier clf = train_classifier(train, epochs, lr, opts.seed);
    std::cout << "train accuracy " << 100.0 * accuracy(clf, train) << "%, holdout accuracy "
              << 100.0 * accuracy(clf, holdout) << "%\n";

    fs::create_directories(opts.artifacts);
    save_classifier(clf, (fs::path(opts.artifacts) / "classifier.bin").string());
    const double T = fit_temperature(clf, holdout);
    std::ofstream((fs::path(opts.artifacts) / "temperature.txt").string()) << T << "\n";
    std::cout << "saved classifier; fitted temperature T = " << T << "\n";
    return 0;
}

int run_fit_ae(const CommonOpts& opts, const std::string& data_dir) {
    const Ini ini = load_config(opts);
    const LabeledDataset corpus = load_corpus((fs::path(data_dir) / "manifest.csv").string());
    const LabeledDataset train = corpus.filter(Split::train);
    const int rank = static_cast<int>(ini.get_int("autoencoder", "rank", 32));
    std::cout << "fitting rank-" << rank << " autoencoder on " << train.size() << " tiles\n";
    const LinearAutoencoder ae = fit_autoencoder(train, rank, opts.seed);
    double loss = 0.0;
    for (const Image& img : train.images) loss += reconstruct(ae, img).loss.value;
    std::cout << "mean train reconstruction loss " << loss / train.size() << "\n";
    fs::create_directories(opts.artifacts);
    save_autoencoder(ae, (fs::path(opts.artifacts) / "autoencoder.bin").string());
    return 0;
}

int run_calibrate(const CommonOpts& opts, const std::string& data_dir, const std::string& mode) {
    const Ini ini = load_config(opts);
    const LabeledDataset corpus = load_corpus((fs::path(data_dir) / "manifest.csv").string());
    const LabeledDataset holdout = corpus.filter(Split::holdout);
    const LinearAutoencoder ae =
        load_autoencoder((fs::path(opts.artifacts) / "autoencoder.bin").string());
    const int n_classes = static_cast<int>(ini.get_int("data", "classes", 4));

    ClassLossModel model;
    std::string out_name;
    if (mode == "overall") {
        model = calibrate_overall(ae, holdout, n_classes);
        out_name = "calib_overall.csv";
    } else if (mode == "regional") {
        model = calibrate_regional(ae, holdout, n_classes, fh_from(ini));
        out_name = "calib_regional.csv";
    } else {
        std::cerr << "mode must be 'overall' or 'regional'\n";
        return 1;
    }
    for (int c = 0; c < model.n_classes(); ++c)
        std::cout << "class " << c << ": mu=" << model.per_class[c].mu
                  << " sigma=" << model.per_class[c].sigma << " n=" << model.per_class[c].n_samples
                  << "\n";
    save_loss_model(model, (fs::path(opts.artifacts) / out_name).string());
    return 0;
}

int score_one(const CommonOpts& opts, const Ini& ini, const std::string& image_path,
              const std::string& map_out) {
    const CompetencyEstimator est = load_estimator(opts, ini);
    const Image img = read_ppm(image_path);
    // Sky exclusion applies only to camera-sized renders.
    std::vector<std::uint8_t> sky;
    const CameraModel cam = camera_from(ini);
    if (img.width == cam.image_width && img.height == cam.image_height) sky = sky_mask(cam);

    const CompetencyRecord rec = est.score(img, sky, true);
    const ClassPosterior post = predict(est.classifier(), img);
    double T = 1.0;
    if (std::ifstream tf{(fs::path(opts.artifacts) / "temperature.txt").string()}) tf >> T;

    std::cout << "overall_competency " << rec.overall << "\n";
    std::cout << "predicted_class " << post.argmax << " (p=" << post.max_prob() << ")\n";
    std::cout << "baseline_msp " << score_baseline(BaselineMethod::msp, post) << "\n";
    std::cout << "baseline_temperature " << score_baseline(BaselineMethod::temperature, post, T)
              << "\n";
    std::cout << "baseline_entropy " << score_baseline(BaselineMethod::entropy, post) << "\n";
    std::cout << "baseline_energy " << score_baseline(BaselineMethod::energy, post) << "\n";

    write_map_pgm(rec, map_out);
    write_map_csv(rec, map_out + ".csv");
    std::cout << "regional map written to " << map_out << " (+.csv)\n";
    return 0;
}

// Scores a manifest into a CSV usable by the `metrics` subcommand. Groups:
// correct_id / misclassified_id for labeled rows, ood for the OOD manifest.
int score_corpus(const CommonOpts& opts, const Ini& ini, const std::string& manifest,
                 const std::string& ood_manifest, const std::string& out_csv) {
    const CompetencyEstimator est = load_estimator(opts, ini);
    double T = 1.0;
    if (std::ifstream tf{(fs::path(opts.artifacts) / "temperature.txt").string()}) tf >> T;

    std::ofstream out(out_csv);
    if (!out) throw std::runtime_error("cannot open for write: " + out_csv);
    out << "path,group,competency,msp,temperature,entropy,energy\n";
    auto emit = [&](const std::string& path, const Image& img, const std::string& group) {
        const CompetencyRecord rec = est.score(img, {}, false);
        const ClassPosterior post = predict(est.classifier(), img);
        out << path << ',' << group << ',' << rec.overall << ','
            << score_baseline(BaselineMethod::msp, post) << ','
            << score_baseline(BaselineMethod::temperature, post, T) << ','
            << score_baseline(BaselineMethod::entropy, post) << ','
            << score_baseline(BaselineMethod::energy, post) << '\n';
    };

    if (!manifest.empty()) {
        const LabeledDataset data = load_corpus(manifest);
        const LabeledDataset test = data.filter(Split::test);
        const LabeledDataset& use = test.size() > 0 ? test : data;
        for (std::size_t i = 0; i < use.size(); ++i) {
            const bool correct = predict(est.classifier(), use.images[i]).argmax == use.labels[i];
            emit("img" + std::to_string(i), use.images[i],
                 correct ? "correct_id" : "misclassified_id");
        }
    }
    if (!ood_manifest.empty()) {
        std::ifstream in(ood_manifest);
        if (!in) throw std::runtime_error("cannot open: " + ood_manifest);
        const fs::path base = fs::path(ood_manifest).parent_path();
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            emit(line, read_ppm((base / line).string()), "ood");
        }
    }
    std::cout << "scores written to " << out_csv << "\n";
    return 0;
}

int run_metrics(const std::string& scores_csv, const std::string& column, const std::string& pos_group,
                const std::string& neg_group) {
    std::ifstream in(scores_csv);
    if (!in) throw std::runtime_error("cannot open: " + scores_csv);
    std::string header;
    std::getline(in, header);
    std::vector<std::string> cols;
    {
        std::istringstream hs(header);
        std::string c;
        while (std::getline(hs, c, ',')) cols.push_back(c);
    }
    int value_idx = -1, group_idx = -1;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (cols[i] == column) value_idx = static_cast<int>(i);
        if (cols[i] == "group") group_idx = static_cast<int>(i);
    }
    if (value_idx < 0 || group_idx < 0)
        throw std::runtime_error("scores CSV needs 'group' and '" + column + "' columns");

    std::vector<double> pos, neg;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::vector<std::string> fields;
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        const std::string& group = fields[group_idx];
        const double value = std::stod(fields[value_idx]);
        if (group == pos_group) pos.push_back(value);
        if (group == neg_group) neg.push_back(value);
    }
    std::cout << "n_pos " << pos.size() << " (" << pos_group << "), n_neg " << neg.size() << " ("
              << neg_group << ")\n";
    std::cout << "ks_distance " << ks_distance(pos, neg) << "\n";
    std::cout << "auroc " << auroc(pos, neg) << "\n";
    std::cout << "fpr_at_95tpr " << fpr_at_tpr(pos, neg, 0.95) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PaRCE competency estimation and competency-aware navigation"};
    app.require_subcommand(1);

    CommonOpts opts;
    app.add_option("--config", opts.config, "INI config file")->capture_default_str();
    app.add_option("--seed", opts.seed, "master seed")->capture_default_str();
    app.add_option("--artifacts", opts.artifacts, "model artifact directory")->capture_default_str();

    std::string data_dir = "data";
    std::string out_dir;

    auto* gen = app.add_subcommand("gen-data", "generate the tile corpus and OOD composites");
    gen->add_option("--out", data_dir, "output directory")->capture_default_str();

    auto* train = app.add_subcommand("train", "train the terrain classifier");
    train->add_option("--data", data_dir, "corpus directory")->capture_default_str();

    auto* fit = app.add_subcommand("fit-ae", "fit the linear autoencoder");
    fit->add_option("--data", data_dir, "corpus directory")->capture_default_str();

    std::string calib_mode = "overall";
    auto* calib = app.add_subcommand("calibrate", "calibrate the loss Gaussians");
    calib->add_option("mode", calib_mode, "overall | regional")->required();
    calib->add_option("--data", data_dir, "corpus directory")->capture_default_str();

    std::string image_path, map_out = "competency_map.pgm";
    std::string manifest, ood_manifest, scores_out = "scores.csv";
    auto* score = app.add_subcommand("score", "score an image (or a manifest with --manifest)");
    score->add_option("image", image_path, "input PPM image");
    score->add_option("--map-out", map_out, "output PGM map path")->capture_default_str();
    score->add_option("--manifest", manifest, "score a labeled manifest instead");
    score->add_option("--ood-manifest", ood_manifest, "additional OOD image list");
    score->add_option("--out", scores_out, "output CSV for manifest scoring")->capture_default_str();

    std::string scenario = "1", variant_str = "baseline", scenario_dir = "configs";
    std::string episode_out = "episodes.csv";
    std::string log_dir;
    auto* nav = app.add_subcommand("navigate", "run one closed-loop episode");
    nav->add_option("--scenario", scenario, "scenario id (1-5) or INI path")->capture_default_str();
    nav->add_option("--variant", variant_str, "planner variant")->capture_default_str();
    nav->add_option("--scenario-dir", scenario_dir, "scenario config directory")->capture_default_str();
    nav->add_option("--out", episode_out, "episode result CSV (appended)")->capture_default_str();
    nav->add_option("--log-dir", log_dir, "write overlays + diagnostics here");

    int trials = 10;
    std::string bench_out = "benchmark";
    auto* bench = app.add_subcommand("benchmark", "run the full variants x scenarios table");
    bench->add_option("--scenario-dir", scenario_dir, "scenario config directory")->capture_default_str();
    bench->add_option("--trials", trials, "trials per cell")->capture_default_str();
    bench->add_option("--out", bench_out, "output directory")->capture_default_str();

    std::string metric_col = "competency", pos_group = "ood", neg_group = "correct_id";
    std::string metrics_csv;
    auto* met = app.add_subcommand("metrics", "distribution metrics from a score CSV");
    met->add_option("scores", metrics_csv, "score CSV from `score --manifest`")->required();
    met->add_option("--column", metric_col, "score column to evaluate")->capture_default_str();
    met->add_option("--pos", pos_group, "positive (detected) group")->capture_default_str();
    met->add_option("--neg", neg_group, "negative group")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return run_gen_data(opts, data_dir);
        if (train->parsed()) return run_train(opts, data_dir);
        if (fit->parsed()) return run_fit_ae(opts, data_dir);
        if (calib->parsed()) return run_calibrate(opts, data_dir, calib_mode);
        if (score->parsed()) {
            const Ini ini = load_config(opts);
            if (!manifest.empty() || !ood_manifest.empty())
                return score_corpus(opts, ini, manifest, ood_manifest, scores_out);
            if (image_path.empty()) {
                std::cerr << "score: provide an image or --manifest\n";
                return 1;
            }
            return score_one(opts, ini, image_path, map_out);
        }
        if (nav->parsed()) {
            const Ini ini = load_config(opts);
            const ScenarioSpec spec = load_scenario(scenario_path(scenario, scenario_dir));
            const CompetencyEstimator est = load_estimator(opts, ini);
            const EpisodeConfig cfg = episode_from(ini);
            EpisodeLog log;
            const EpisodeLog* log_ptr = nullptr;
            if (!log_dir.empty()) {
                log.dir = log_dir;
                log_ptr = &log;
            }
            const EpisodeResult r = run_episode(spec, variant_from_name(variant_str), est, cfg,
                                                opts.seed, log_ptr);
            append_episode_csv(r, episode_out);
            std::cout << (r.outcome == Outcome::success ? "success" : "timeout")
                      << (r.collided ? " (collided)" : "") << ", nav_time " << r.nav_time
                      << " s, path_length " << r.path_length << " m\n";
            return 0;
        }
        if (bench->parsed()) {
            const Ini ini = load_config(opts);
            std::vector<ScenarioSpec> scenarios;
            for (int i = 1; i <= 5; ++i)
                scenarios.push_back(load_scenario(scenario_path(std::to_string(i), scenario_dir)));
            const CompetencyEstimator est = load_estimator(opts, ini);
            const EpisodeConfig cfg = episode_from(ini);
            const std::vector<Variant> variants = {
                Variant::baseline,        Variant::overall_turning, Variant::regional_turning,
                Variant::regional_trajectory, Variant::both_turning, Variant::both_trajectory};
            const BenchmarkTable table =
                run_benchmark(scenarios, variants, trials, est, cfg, opts.seed, true);
            write_benchmark_csv(table, scenarios, bench_out);
            std::cout << "benchmark tables written under " << bench_out << "\n";
            return 0;
        }
        if (met->parsed()) return run_metrics(metrics_csv, metric_col, pos_group, neg_group);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
