// tcmap: radiometric thermal tone-mapping pipeline.
//
// Subcommands: convert, tonemap, embed, train, compare, bench,
// inspect-weights. Every run is deterministic given its inputs and --seed;
// outputs are written atomically (temp file + rename).
//
// Exit codes: 0 success, 2 validation/usage error, 3 I/O error.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tcmap/baselines.hpp"
#include "tcmap/checkpoint.hpp"
#include "tcmap/compression.hpp"
#include "tcmap/embedding.hpp"
#include "tcmap/error.hpp"
#include "tcmap/image_io.hpp"
#include "tcmap/metrics.hpp"
#include "tcmap/radiometry.hpp"
#include "tcmap/scene.hpp"
#include "tcmap/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

struct GlobalOpts {
    std::uint64_t seed = 0;
    std::string profile;
    std::string config;
};

tcmap::RadiometricFrame load_frame(const std::string& path, const std::string& format,
                                   bool mask14) {
    tcmap::FrameFormat fmt;
    if (format == "auto")
        fmt = tcmap::guess_frame_format(path);
    else if (format == "tirf")
        fmt = tcmap::FrameFormat::RawBinary;
    else if (format == "png16")
        fmt = tcmap::FrameFormat::Png16;
    else
        throw tcmap::ValidationError("unknown frame format '" + format + "'");
    auto frame = tcmap::load_raw_frame(path, fmt);
    if (mask14) {
        // For sensors that store 14 significant bits low-aligned in a 16-bit
        // container.
        for (auto& c : frame.counts) c &= 0x3fffu;
        frame.bit_depth = 14;
    }
    return frame;
}

tcmap::CameraProfile require_profile(const GlobalOpts& g) {
    if (g.profile.empty())
        throw tcmap::ValidationError("this command needs --profile <file>");
    return tcmap::load_profile(g.profile);
}

std::vector<double> parse_period_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    if (out.empty()) throw tcmap::ValidationError("empty period list");
    return out;
}

std::vector<std::uint8_t> to_rgb8(const tcmap::ToneMappedImage& img) {
    const std::size_t plane = static_cast<std::size_t>(img.width) * img.height;
    std::vector<std::uint8_t> rgb(plane * 3);
    for (std::size_t p = 0; p < plane; ++p)
        for (int c = 0; c < 3; ++c)
            rgb[p * 3 + c] = tcmap::round_u8(img.channel(c)[p]);
    return rgb;
}

// ---- train configuration file ----

struct TrainFileConfig {
    tcmap::TrainConfig train;
    tcmap::SceneParams scene;
    int scene_count = 200;
    std::uint64_t scene_seed = 1;
    bool emit_scenes = false;
};

TrainFileConfig parse_train_config(const json& j) {
    TrainFileConfig cfg;
    cfg.train.n_channels = j.value("n_channels", cfg.train.n_channels);
    cfg.train.period_lo = j.value("period_lo", cfg.train.period_lo);
    cfg.train.period_hi = j.value("period_hi", cfg.train.period_hi);
    cfg.train.resample_periods_per_step =
        j.value("resample_periods_per_step", cfg.train.resample_periods_per_step);
    cfg.train.epochs = j.value("epochs", cfg.train.epochs);
    cfg.train.batch_size = j.value("batch_size", cfg.train.batch_size);
    cfg.train.lr = j.value("lr", cfg.train.lr);
    if (!j.contains("seed")) throw tcmap::ValidationError("train config must set 'seed'");
    cfg.train.seed = j.at("seed").get<std::uint64_t>();
    cfg.train.loss = tcmap::task_loss_from_name(j.value("loss", std::string("object_contrast")));
    cfg.train.parallel_embed = j.value("parallel_embed", false);

    if (j.contains("scene")) {
        const json& s = j.at("scene");
        cfg.scene_count = s.value("count", cfg.scene_count);
        cfg.scene_seed = s.value("seed", cfg.scene_seed);
        cfg.scene.width = s.value("width", cfg.scene.width);
        cfg.scene.height = s.value("height", cfg.scene.height);
        cfg.scene.ambient_lo = s.value("ambient_lo", cfg.scene.ambient_lo);
        cfg.scene.ambient_hi = s.value("ambient_hi", cfg.scene.ambient_hi);
        cfg.scene.n_objects = s.value("n_objects", cfg.scene.n_objects);
        cfg.scene.noise_std = s.value("noise_std", cfg.scene.noise_std);
        cfg.scene.blob_dt_min = s.value("blob_dt_min", cfg.scene.blob_dt_min);
        cfg.scene.blob_dt_max = s.value("blob_dt_max", cfg.scene.blob_dt_max);
    }
    cfg.emit_scenes = j.value("emit_scenes", false);
    cfg.train.validate();
    if (cfg.scene_count < 1) throw tcmap::ValidationError("scene.count must be >= 1");
    return cfg;
}

json train_config_to_json(const TrainFileConfig& cfg) {
    json j;
    j["n_channels"] = cfg.train.n_channels;
    j["period_lo"] = cfg.train.period_lo;
    j["period_hi"] = cfg.train.period_hi;
    j["resample_periods_per_step"] = cfg.train.resample_periods_per_step;
    j["epochs"] = cfg.train.epochs;
    j["batch_size"] = cfg.train.batch_size;
    j["lr"] = cfg.train.lr;
    j["seed"] = cfg.train.seed;
    j["loss"] = tcmap::task_loss_name(cfg.train.loss);
    j["parallel_embed"] = cfg.train.parallel_embed;
    j["emit_scenes"] = cfg.emit_scenes;
    j["scene"] = {{"count", cfg.scene_count},
                  {"seed", cfg.scene_seed},
                  {"width", cfg.scene.width},
                  {"height", cfg.scene.height},
                  {"ambient_lo", cfg.scene.ambient_lo},
                  {"ambient_hi", cfg.scene.ambient_hi},
                  {"n_objects", cfg.scene.n_objects},
                  {"noise_std", cfg.scene.noise_std},
                  {"blob_dt_min", cfg.scene.blob_dt_min},
                  {"blob_dt_max", cfg.scene.blob_dt_max}};
    return j;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw tcmap::IoError("cannot open config: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw tcmap::ValidationError(path + ": " + e.what());
    }
    return j;
}

// ---- subcommands ----

int cmd_convert(const GlobalOpts& g, const std::string& input, const std::string& format,
                bool mask14, const std::string& output, const std::string& preview) {
    auto profile = require_profile(g);
    auto frame = load_frame(input, format, mask14);
    auto temp = tcmap::counts_to_celsius(frame, profile);

    tcmap::FloatTensorFile t{1, temp.height, temp.width, temp.celsius};
    tcmap::write_temb(t, output);
    std::cout << "wrote " << output << " (" << temp.width << "x" << temp.height << ")\n";

    if (!preview.empty()) {
        auto [mn, mx] = std::minmax_element(temp.celsius.begin(), temp.celsius.end());
        tcmap::ToneMapped8 img{temp.width, temp.height,
                               std::vector<std::uint8_t>(temp.celsius.size(), 0)};
        if (*mx > *mn)
            for (std::size_t i = 0; i < temp.celsius.size(); ++i)
                img.gray[i] = tcmap::round_u8((temp.celsius[i] - *mn) / (*mx - *mn) * 255.0);
        tcmap::write_png8_gray(img, preview);
        std::cout << "wrote " << preview << "\n";
    }
    return 0;
}

int cmd_tonemap(const GlobalOpts& g, const std::string& input, const std::string& format,
                bool mask14, const std::string& op, const std::string& checkpoint,
                const std::string& output, double lo, double hi, int bin_width, int bin_count,
                std::pair<int, int> grid, const std::string& omega_csv) {
    auto frame = load_frame(input, format, mask14);

    if (op == "tcnet") {
        if (checkpoint.empty())
            throw tcmap::ValidationError("operator tcnet needs --checkpoint");
        auto profile = require_profile(g);
        auto ckpt = tcmap::load_checkpoint(checkpoint);
        auto temp = tcmap::counts_to_celsius(frame, profile);
        auto res = tcmap::compress_image(tcmap::embed(temp, ckpt.eval_periods), ckpt.net);
        tcmap::write_png8_rgb(res.image.width, res.image.height, to_rgb8(res.image), output);
        std::string csv_path = omega_csv.empty()
                                   ? fs::path(output).replace_extension(".omega.csv").string()
                                   : omega_csv;
        auto report = tcmap::inspect_weights(res.weights, ckpt.eval_periods);
        tcmap::atomic_write_text(csv_path, tcmap::weight_report_csv(report));
        std::cout << "wrote " << output << " and " << csv_path << "\n";
        return 0;
    }

    tcmap::ToneMapped8 img;
    if (op == "raw")
        img = tcmap::tonemap_raw(frame);
    else if (op == "minmax")
        img = tcmap::tonemap_minmax(frame);
    else if (op == "clip")
        img = tcmap::tonemap_clip(frame, lo, hi);
    else if (op == "he")
        img = bin_count > 0 ? tcmap::tonemap_he(frame, bin_count, tcmap::HeBinning::Count)
                            : tcmap::tonemap_he(frame, bin_width, tcmap::HeBinning::Width);
    else if (op == "fieldscale")
        img = tcmap::tonemap_fieldscale_lite(frame, grid.first, grid.second);
    else
        throw tcmap::ValidationError("unknown operator '" + op + "'");
    tcmap::write_png8_gray(img, output);
    std::cout << "wrote " << output << "\n";
    return 0;
}

int cmd_embed(const GlobalOpts& g, const std::string& input, const std::string& format,
              bool mask14, int channels, const std::string& period_list, double lo, double hi,
              const std::string& output, const std::string& png_dir) {
    auto profile = require_profile(g);
    auto frame = load_frame(input, format, mask14);
    auto temp = tcmap::counts_to_celsius(frame, profile);

    tcmap::PeriodSet periods;
    if (!period_list.empty()) {
        periods.periods = parse_period_list(period_list);
        periods.validate();
    } else {
        periods = tcmap::sample_periods(channels, g.seed, lo, hi);
    }

    auto emb = tcmap::embed(temp, periods);
    tcmap::FloatTensorFile t{emb.channels, emb.height, emb.width, emb.data};
    tcmap::write_temb(t, output);
    std::cout << "wrote " << output << " (N=" << emb.channels << ", periods:";
    for (double d : periods.periods) std::cout << " " << d;
    std::cout << ")\n";

    if (!png_dir.empty()) {
        fs::create_directories(png_dir);
        auto imgs = tcmap::embedding_to_images(emb);
        for (std::size_t k = 0; k < imgs.size(); ++k) {
            char name[32];
            std::snprintf(name, sizeof(name), "channel_%02zu.png", k);
            tcmap::write_png8_gray(imgs[k], (fs::path(png_dir) / name).string());
        }
        std::cout << "wrote " << imgs.size() << " channel images to " << png_dir << "\n";
    }
    return 0;
}

std::string jsonl_train_log(const TrainFileConfig& cfg, const tcmap::TrainResult& result) {
    std::ostringstream out;
    json meta{{"type", "meta"},
              {"loss", tcmap::task_loss_name(cfg.train.loss)},
              {"n_channels", cfg.train.n_channels},
              {"seed", cfg.train.seed},
              {"eval_periods", result.eval_periods.periods}};
    out << meta.dump() << "\n";
    std::size_t next_epoch_rec = 0;
    for (const auto& s : result.steps) {
        json rec{{"type", "step"},
                 {"epoch", s.epoch},
                 {"step", s.step},
                 {"loss", s.loss},
                 {"periods", s.periods}};
        out << rec.dump() << "\n";
        // epoch summary right after its last step
        if (next_epoch_rec < result.epochs.size() &&
            (&s == &result.steps.back() || (&s + 1)->epoch != s.epoch)) {
            const auto& e = result.epochs[next_epoch_rec++];
            json erec{{"type", "epoch"},
                      {"epoch", e.epoch},
                      {"mean_loss", e.mean_loss},
                      {"omega", e.omega_probe.omega}};
            out << erec.dump() << "\n";
        }
    }
    return out.str();
}

int cmd_train(const GlobalOpts& g, const std::string& out_dir) {
    if (g.config.empty()) throw tcmap::ValidationError("train needs --config <file>");
    TrainFileConfig cfg = parse_train_config(load_json_file(g.config));

    fs::create_directories(out_dir);
    auto profile = tcmap::default_scene_profile();
    if (!g.profile.empty()) profile = tcmap::load_profile(g.profile);

    auto scenes = tcmap::generate_scenes(cfg.scene_seed, cfg.scene_count, cfg.scene, profile);
    auto result = tcmap::train(cfg.train, scenes, profile);

    const auto ckpt_path = (fs::path(out_dir) / "checkpoint.tcnw").string();
    tcmap::save_checkpoint(result.checkpoint(), ckpt_path);
    tcmap::atomic_write_text((fs::path(out_dir) / "train_log.jsonl").string(),
                             jsonl_train_log(cfg, result));
    tcmap::atomic_write_text((fs::path(out_dir) / "config.json").string(),
                             train_config_to_json(cfg).dump(2) + "\n");
    tcmap::save_profile(profile, (fs::path(out_dir) / "profile.txt").string());

    if (cfg.emit_scenes) {
        const auto scene_dir = fs::path(out_dir) / "scenes";
        fs::create_directories(scene_dir);
        json manifest;
        manifest["generator_seed"] = cfg.scene_seed;
        manifest["profile"] = "profile.txt";
        manifest["width"] = cfg.scene.width;
        manifest["height"] = cfg.scene.height;
        json files = json::array();
        for (std::size_t i = 0; i < scenes.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof(name), "scene_%04zu.tirf", i);
            tcmap::write_tirf(scenes[i].frame, (scene_dir / name).string());
            files.push_back(std::string("scenes/") + name);
        }
        manifest["scenes"] = files;
        tcmap::atomic_write_text((fs::path(out_dir) / "manifest.json").string(),
                                 manifest.dump(2) + "\n");
    }

    std::cout << "trained " << tcmap::task_loss_name(cfg.train.loss) << " for "
              << cfg.train.epochs << " epochs on " << scenes.size() << " scenes\n"
              << "first epoch mean loss: " << result.epochs.front().mean_loss << "\n"
              << "final epoch mean loss: " << result.epochs.back().mean_loss << "\n"
              << "wrote " << ckpt_path << "\n";
    return 0;
}

int cmd_compare(const GlobalOpts&, const std::string& dataset_dir, const std::string& ckpt_a,
                const std::string& ckpt_b, const std::string& output,
                const std::string& hist_csv) {
    const auto manifest_path = fs::path(dataset_dir) / "manifest.json";
    if (!fs::exists(manifest_path))
        throw tcmap::IoError("dataset dir has no manifest.json: " + dataset_dir);
    json manifest = load_json_file(manifest_path.string());
    auto profile =
        tcmap::load_profile((fs::path(dataset_dir) / manifest.at("profile").get<std::string>())
                                .string());

    auto a = tcmap::load_checkpoint(ckpt_a);
    auto b = tcmap::load_checkpoint(ckpt_b);
    if (a.net.n_embeddings != b.net.n_embeddings)
        throw tcmap::ValidationError("checkpoints disagree on N: " +
                                     std::to_string(a.net.n_embeddings) + " vs " +
                                     std::to_string(b.net.n_embeddings));

    const auto& files = manifest.at("scenes");
    if (files.empty()) throw tcmap::ValidationError("dataset manifest lists no scenes");

    // Both nets run on checkpoint A's evaluation periods so entropy/KL
    // differences are attributable to the networks alone.
    std::vector<tcmap::HistogramDist> hists_a, hists_b;
    double entropy_a = 0.0, entropy_b = 0.0, omega_diff = 0.0;
    for (const auto& f : files) {
        auto frame = tcmap::read_tirf((fs::path(dataset_dir) / f.get<std::string>()).string());
        auto temp = tcmap::counts_to_celsius(frame, profile);
        auto emb = tcmap::embed(temp, a.eval_periods);
        auto res_a = tcmap::compress_image(emb, a.net);
        auto res_b = tcmap::compress_image(emb, b.net);
        auto lum_a = tcmap::luminance_of(res_a.image);
        auto lum_b = tcmap::luminance_of(res_b.image);
        hists_a.push_back(tcmap::normalize(tcmap::histogram_of(lum_a)));
        hists_b.push_back(tcmap::normalize(tcmap::histogram_of(lum_b)));
        entropy_a += tcmap::image_entropy(lum_a) / static_cast<double>(files.size());
        entropy_b += tcmap::image_entropy(lum_b) / static_cast<double>(files.size());
        for (std::size_t i = 0; i < res_a.weights.omega.size(); ++i)
            omega_diff = std::max(omega_diff,
                                  std::abs(static_cast<double>(res_a.weights.omega[i]) -
                                           res_b.weights.omega[i]));
    }
    auto avg_a = tcmap::average_histogram(hists_a);
    auto avg_b = tcmap::average_histogram(hists_b);
    const double kl_ab = tcmap::histogram_kl(avg_a, avg_b);
    const double kl_ba = tcmap::histogram_kl(avg_b, avg_a);

    std::ostringstream csv;
    csv << "metric,value\n";
    csv << "n_scenes," << files.size() << "\n";
    csv << "entropy_mean_a," << entropy_a << "\n";
    csv << "entropy_mean_b," << entropy_b << "\n";
    csv << "kl_a_to_b," << kl_ab << "\n";
    csv << "kl_b_to_a," << kl_ba << "\n";
    csv << "omega_max_abs_diff," << omega_diff << "\n";
    tcmap::atomic_write_text(output, csv.str());
    std::cout << csv.str();

    if (!hist_csv.empty()) {
        std::ostringstream h;
        h << "bin,hist_a,hist_b\n";
        for (int i = 0; i < 256; ++i) h << i << "," << avg_a[i] << "," << avg_b[i] << "\n";
        tcmap::atomic_write_text(hist_csv, h.str());
    }
    return 0;
}

int cmd_bench(const GlobalOpts& g, int channels, int width, int height, int iters) {
    if (iters < 10) throw tcmap::ValidationError("bench needs --iters >= 10");

    // Synthetic temperature field; radiometry is not part of the timing.
    tcmap::TemperatureMap temp;
    temp.width = width;
    temp.height = height;
    temp.celsius.resize(static_cast<std::size_t>(width) * height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            temp.celsius[static_cast<std::size_t>(y) * width + x] =
                static_cast<float>(10.0 + 20.0 * std::sin(0.01 * x) + 0.02 * y);

    auto periods = tcmap::sample_periods(channels, g.seed ? g.seed : 42);
    auto median_ms = [](std::vector<double>& v) {
        std::sort(v.begin(), v.end());
        return v[v.size() / 2];
    };

    std::vector<double> embed_ms;
    tcmap::ThermalEmbedding emb;
    for (int i = 0; i < iters; ++i) {
        auto t0 = std::chrono::steady_clock::now();
        emb = tcmap::embed(temp, periods);
        auto t1 = std::chrono::steady_clock::now();
        embed_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }

    auto net = tcmap::CompressionNet::random_init(channels, g.seed ? g.seed : 42);
    auto batch = tcmap::make_embedding_batch({emb});
    std::vector<double> compress_ms;
    for (int i = 0; i < iters; ++i) {
        auto t0 = std::chrono::steady_clock::now();
        auto fwd = tcmap::compress_forward(batch, net);
        auto t1 = std::chrono::steady_clock::now();
        compress_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }

    std::cout << "embed TE(" << channels << ") " << width << "x" << height << ": median "
              << median_ms(embed_ms) << " ms over " << iters << " iters\n"
              << "compress_forward: median " << median_ms(compress_ms) << " ms over " << iters
              << " iters\n";
    return 0;
}

int cmd_inspect_weights(const GlobalOpts& g, const std::string& checkpoint,
                        const std::string& input, const std::string& format, bool mask14,
                        const std::string& omega_csv_in, const std::string& period_list,
                        const std::string& output) {
    tcmap::WeightReport report;
    if (!omega_csv_in.empty()) {
        std::ifstream in(omega_csv_in);
        if (!in) throw tcmap::IoError("cannot open " + omega_csv_in);
        std::stringstream ss;
        ss << in.rdbuf();
        auto [weights, periods] = tcmap::weights_from_csv(ss.str());
        if (!period_list.empty()) {
            periods.periods = parse_period_list(period_list);
            periods.validate();
        }
        report = tcmap::inspect_weights(weights, periods);
    } else if (!checkpoint.empty() && !input.empty()) {
        auto profile = require_profile(g);
        auto ckpt = tcmap::load_checkpoint(checkpoint);
        auto frame = load_frame(input, format, mask14);
        auto temp = tcmap::counts_to_celsius(frame, profile);
        auto res = tcmap::compress_image(tcmap::embed(temp, ckpt.eval_periods), ckpt.net);
        report = tcmap::inspect_weights(res.weights, ckpt.eval_periods);
    } else {
        throw tcmap::ValidationError(
            "inspect-weights needs either --omega-csv or --checkpoint with --input");
    }

    std::cout << tcmap::weight_report_table(report);
    if (!output.empty()) {
        tcmap::atomic_write_text(output, tcmap::weight_report_csv(report));
        std::cout << "wrote " << output << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"radiometric thermal tone-mapping pipeline"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--seed", g.seed, "global RNG seed")->capture_default_str();
    app.add_option("--profile", g.profile, "camera profile file");
    app.add_option("--config", g.config, "JSON config file (train)");

    // convert
    std::string in_path, out_path, format = "auto", preview;
    bool mask14 = false;
    auto* convert = app.add_subcommand("convert", "raw counts -> absolute temperature tensor");
    convert->add_option("--input", in_path)->required();
    convert->add_option("--output", out_path)->required();
    convert->add_option("--format", format)->check(CLI::IsMember({"auto", "tirf", "png16"}));
    convert->add_option("--preview", preview, "also write a min-max scaled preview PNG");
    convert->add_flag("--mask14", mask14, "mask counts to the low 14 bits");

    // tonemap
    std::string op, checkpoint, omega_csv;
    double clip_lo = 0.01, clip_hi = 0.99;
    int bin_width = 30, bin_count = 0;
    std::pair<int, int> grid{8, 8};
    auto* tonemap = app.add_subcommand("tonemap", "render an 8-bit image");
    tonemap->add_option("--input", in_path)->required();
    tonemap->add_option("--output", out_path)->required();
    tonemap->add_option("--operator", op)
        ->required()
        ->check(CLI::IsMember({"raw", "minmax", "clip", "he", "fieldscale", "tcnet"}));
    tonemap->add_option("--format", format)->check(CLI::IsMember({"auto", "tirf", "png16"}));
    tonemap->add_option("--checkpoint", checkpoint, "trained network (operator tcnet)");
    tonemap->add_option("--lo", clip_lo, "clip: low percentile")->capture_default_str();
    tonemap->add_option("--hi", clip_hi, "clip: high percentile")->capture_default_str();
    tonemap->add_option("--bin-width", bin_width, "he: bin width in counts")->capture_default_str();
    tonemap->add_option("--bin-count", bin_count, "he: fixed bin count instead of width");
    tonemap->add_option("--grid", grid, "fieldscale: rows cols")->delimiter('x');
    tonemap->add_option("--omega-csv", omega_csv, "tcnet: where to write the weight CSV");
    tonemap->add_flag("--mask14", mask14);

    // embed
    int channels = 3;
    std::string period_list, png_dir;
    double period_lo = 4.5, period_hi = 45.0;
    auto* embed_cmd = app.add_subcommand("embed", "sinusoidal thermal embedding -> TEMB tensor");
    embed_cmd->add_option("--input", in_path)->required();
    embed_cmd->add_option("--output", out_path)->required();
    embed_cmd->add_option("--format", format)->check(CLI::IsMember({"auto", "tirf", "png16"}));
    embed_cmd->add_option("--channels", channels)->capture_default_str();
    embed_cmd->add_option("--periods", period_list, "comma-separated D values (skips sampling)");
    embed_cmd->add_option("--lo", period_lo)->capture_default_str();
    embed_cmd->add_option("--hi", period_hi)->capture_default_str();
    embed_cmd->add_option("--png-dir", png_dir, "also export per-channel PNGs");
    embed_cmd->add_flag("--mask14", mask14);

    // train
    std::string out_dir;
    auto* train_cmd = app.add_subcommand("train", "train the compression net on synthetic scenes");
    train_cmd->add_option("--out", out_dir)->required();

    // compare
    std::string dataset_dir, ckpt_a, ckpt_b, hist_csv;
    auto* compare = app.add_subcommand("compare", "cross-task metrics for two checkpoints");
    compare->add_option("--dataset", dataset_dir)->required();
    compare->add_option("--checkpoint-a", ckpt_a)->required();
    compare->add_option("--checkpoint-b", ckpt_b)->required();
    compare->add_option("--output", out_path)->required();
    compare->add_option("--hist-csv", hist_csv, "also write the average histograms");

    // bench
    int bench_w = 640, bench_h = 512, iters = 50;
    auto* bench = app.add_subcommand("bench", "embedding / compression timing");
    bench->add_option("--channels", channels)->capture_default_str();
    bench->add_option("--width", bench_w)->capture_default_str();
    bench->add_option("--height", bench_h)->capture_default_str();
    bench->add_option("--iters", iters)->capture_default_str();

    // inspect-weights
    std::string omega_csv_in;
    auto* inspect = app.add_subcommand("inspect-weights", "per-period weight table");
    inspect->add_option("--checkpoint", checkpoint);
    inspect->add_option("--input", in_path, "frame to compute weights on");
    inspect->add_option("--format", format)->check(CLI::IsMember({"auto", "tirf", "png16"}));
    inspect->add_option("--omega-csv", omega_csv_in, "read weights from a CSV instead");
    inspect->add_option("--periods", period_list, "override periods (with --omega-csv)");
    inspect->add_option("--output", out_path, "write the report CSV here");
    inspect->add_flag("--mask14", mask14);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (convert->parsed()) return cmd_convert(g, in_path, format, mask14, out_path, preview);
        if (tonemap->parsed())
            return cmd_tonemap(g, in_path, format, mask14, op, checkpoint, out_path, clip_lo,
                               clip_hi, bin_width, bin_count, grid, omega_csv);
        if (embed_cmd->parsed())
            return cmd_embed(g, in_path, format, mask14, channels, period_list, period_lo,
                             period_hi, out_path, png_dir);
        if (train_cmd->parsed()) return cmd_train(g, out_dir);
        if (compare->parsed())
            return cmd_compare(g, dataset_dir, ckpt_a, ckpt_b, out_path, hist_csv);
        if (bench->parsed()) return cmd_bench(g, channels, bench_w, bench_h, iters);
        if (inspect->parsed())
            return cmd_inspect_weights(g, checkpoint, in_path, format, mask14, omega_csv_in,
                                       period_list, out_path);
    } catch (const tcmap::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const tcmap::TrainingDiverged& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const tcmap::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
