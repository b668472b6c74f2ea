#include "CLI11.hpp"
#include "gsep/io.hpp"
#include "gsep/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <iostream>

using namespace gsep;

namespace {

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

ExperimentConfig load_experiment(const std::string& config_path, uint64_t seed_override,
                                 const std::string& out_override, const std::string& fmt) {
    Config cfg = config_path.empty() ? Config::parse("seed = 1") : Config::load(config_path);
    if (seed_override != 0) cfg.set("seed", std::to_string(seed_override));
    if (!cfg.has("seed")) cfg.set("seed", "1");
    ExperimentConfig ec = ExperimentConfig::from_config(cfg);
    if (!out_override.empty()) ec.out_dir = out_override;
    if (!fmt.empty()) ec.image_format = fmt;
    return ec;
}

int cmd_gen(const ExperimentConfig& ec) {
    const std::string dir = ec.out_dir.empty() ? "phantoms_out" : ec.out_dir;
    std::filesystem::create_directories(dir);
    GoldenSetup gs = build_golden(ec);
    Image p = gen_points(gs.grid, gs.points);
    Image l = gen_line(gs.grid, gs.line);
    Image t = gen_texture(gs.grid, gs.texture);
    auto emit = [&](const std::string& name, const Image& im) {
        if (ec.image_format == "pgm" || ec.image_format == "both")
            write_pgm(dir + "/" + name + ".pgm", im);
        if (ec.image_format != "pgm") write_raw(dir + "/" + name + ".gsep", im);
    };
    emit("points", p);
    emit("line", l);
    emit("texture", t);
    Image sum = Image::zero(gs.grid);
    sum.v = p.v + l.v + t.v;
    emit("composite", sum);
    write_phantom_spec(dir + "/points.phantom", gs.points);
    write_phantom_spec(dir + "/line.phantom", gs.line);
    write_phantom_spec(dir + "/texture.phantom", gs.texture);
    std::cout << "phantoms written to " << dir << "\n";
    return 0;
}

int cmd_separate(const ExperimentConfig& ec) {
    double t0 = now_seconds();
    Report rep = run(ec);
    double wall = now_seconds() - t0;
    const std::string dir = ec.out_dir.empty() ? "separate_out" : ec.out_dir;
    write_report(dir, ec, rep, wall);
    std::cout << rep.summary_csv;
    std::cout << "report written to " << dir << " (" << wall << " s)\n";
    return 0;
}

int cmd_coherence(const ExperimentConfig& ec, int j_lo, int j_hi) {
    GoldenSetup gs = build_golden(ec);
    if (j_hi < 0) j_hi = gs.j_max - 1;
    std::vector<DecayRow> rows;
    for (int j = j_lo; j <= j_hi; j++) {
        auto mu_rows = coherence_decay_rows(gs, j);
        rows.insert(rows.end(), mu_rows.begin(), mu_rows.end());
        auto d_rows = delta_decay_rows(gs, j);
        rows.insert(rows.end(), d_rows.begin(), d_rows.end());
    }
    std::string csv = decay_csv(rows);
    std::cout << csv;
    if (!ec.out_dir.empty()) {
        std::filesystem::create_directories(ec.out_dir);
        atomic_write_text(ec.out_dir + "/coherence.csv", csv);
    }
    return 0;
}

int cmd_bench(const ExperimentConfig& ec) {
    FrequencyGrid g = FrequencyGrid::make(ec.n);
    Image f = Image::zero(g);
    uint64_t s = ec.seed * 2654435761u + 1;
    for (int i = 0; i < g.n; i++)
        for (int j = 0; j < g.n; j++) {
            s = s * 6364136223846793005ull + 1442695040888963407ull;
            f.v(i, j) = cplx(double(s >> 11) / double(1ull << 53) - 0.5, 0.0);
        }
    auto bench = [&](const std::string& name, auto&& fn, int reps) {
        double t0 = now_seconds();
        for (int r = 0; r < reps; r++) fn();
        double dt = (now_seconds() - t0) / reps;
        std::cout << name << ": " << dt * 1e3 << " ms\n";
    };
    bench("spectrum", [&] { spectrum(f); }, 10);
    auto wav = std::make_shared<const FrameFamily>(build_wavelet_frame(g, win::j_max_for(g.n)));
    auto sh = std::make_shared<const FrameFamily>(build_shearlet_frame(g, win::j_max_for(g.n)));
    bench("wavelet analyze+synthesize", [&] { synthesize(*wav, analyze(wav, f)); }, 3);
    bench("shearlet analyze+synthesize", [&] { synthesize(*sh, analyze(sh, f)); }, 3);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"frame-based separation / inpainting / denoising toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir, format;
    uint64_t seed = 0;
    app.add_option("--config", config_path, "experiment config file");
    app.add_option("--seed", seed, "seed override");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--format", format, "image format: csv|raw|pgm");

    auto* gen = app.add_subcommand("gen", "generate phantom components");
    auto* sep = app.add_subcommand("separate", "run a separation experiment");
    auto* coh = app.add_subcommand("coherence", "diagnostics tables only");
    int j_lo = 2, j_hi = -1;
    coh->add_option("--j-lo", j_lo, "first scale");
    coh->add_option("--j-hi", j_hi, "last scale");
    auto* bench = app.add_subcommand("bench", "transform/solve timings");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        ExperimentConfig ec = load_experiment(config_path, seed, out_dir, format);
        if (gen->parsed()) return cmd_gen(ec);
        if (sep->parsed()) return cmd_separate(ec);
        if (coh->parsed()) return cmd_coherence(ec, j_lo, j_hi);
        if (bench->parsed()) return cmd_bench(ec);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
