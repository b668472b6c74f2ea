#include "gsep/pipeline.hpp"

#include "gsep/io.hpp"

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>
#include <set>

namespace gsep {

namespace {

uint64_t subseed(uint64_t seed, uint64_t tag) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ull * (tag + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// spectrum-space resampling between power-of-two grids (unitary values kept)
Image resample_grid(const Image& img, FrequencyGrid target) {
    if (target.n == img.grid.n) return img;
    Spectrum src = spectrum(img);
    Spectrum dst = Spectrum::zero(target);
    int half = std::min(img.grid.n, target.n) / 2;
    for (int x1 = -half; x1 < half; x1++)
        for (int x2 = -half; x2 < half; x2++) dst.at_freq(x1, x2) = src.at_freq(x1, x2);
    return inverse_spectrum(dst);
}

struct ScaleFrames {
    std::shared_ptr<const FrameFamily> wavelet, shearlet, gabor;
};

bool window_sees_band(int jp, int j_max_built, bool closed, const Vector2i& b) {
    double w = (closed && jp == j_max_built) ? win::w_top(jp, b.x(), b.y())
                                             : win::w_j(jp, b.x(), b.y());
    return w > 0;
}

ScaleFrames build_scale_frames(FrequencyGrid grid_j, int j, int j_max_full,
                               const TextureSpec& texture) {
    int j_hi = std::min(j + 1, j_max_full);
    bool closed = (j_hi == j_max_full);
    bool lowpass = j <= 1;
    FrameFamily w = build_wavelet_frame(grid_j, j_hi, FrameOptions{true, closed});
    FrameFamily s = build_shearlet_frame(grid_j, j_hi, FrameOptions{true, closed});
    ScaleFrames out;
    out.wavelet =
        std::make_shared<const FrameFamily>(w.scale_slice(std::max(0, j - 1), j_hi, lowpass));
    out.shearlet =
        std::make_shared<const FrameFamily>(s.scale_slice(std::max(0, j - 1), j_hi, lowpass));

    std::set<std::pair<int, int>> bands;
    int inset = grid_j.n / 2 - 2;
    for (const Vector2i& b : texture.bands)
        for (int o1 = -1; o1 <= 1; o1++)
            for (int o2 = -1; o2 <= 1; o2++) {
                Vector2i nb(b.x() + o1, b.y() + o2);
                if (std::abs(nb.x()) > inset || std::abs(nb.y()) > inset) continue;
                for (int jp = std::max(0, j - 1); jp <= j_hi; jp++)
                    if (window_sees_band(jp, j_hi, closed, nb)) {
                        bands.insert({nb.x(), nb.y()});
                        break;
                    }
            }
    std::vector<Vector2i> blist;
    for (const auto& [b1, b2] : bands) blist.push_back(Vector2i(b1, b2));
    out.gabor = std::make_shared<const FrameFamily>(build_gabor_frame(grid_j, blist));
    return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_config(const Config& cfg) {
    ExperimentConfig ec;
    ec.n = cfg.get_int("n", 256);
    ec.epsilon = cfg.get_double("epsilon", 0.25);
    ec.j_lo = cfg.get_int("j_lo", 1);
    ec.j_hi = cfg.get_int("j_hi", -1);
    ec.h0 = cfg.get_double("h0", 0.12);
    ec.strip_exp = cfg.get_double("strip_exp", 1.0 + ec.epsilon + 0.05);
    ec.noise_level = cfg.get_double("noise_level", 0.0);
    std::string mode = cfg.get_string("mode", "constrained");
    ec.mode = mode == "constrained"         ? SolveMode::constrained
              : mode == "constrained_noisy" ? SolveMode::constrained_noisy
              : mode == "unconstrained"
                  ? SolveMode::unconstrained
                  : throw std::runtime_error("bad mode: " + mode);
    std::string reg = cfg.get_string("regularizer", "l1");
    ec.reg = reg == "l1" ? Regularizer::l1 : Regularizer::l2sq;
    ec.lambda_override = cfg.get_double("lambda", 0.0);
    ec.solver.max_iters = cfg.get_int("max_iters", 2000);
    ec.solver.tol = cfg.get_double("tol", 1e-6);
    ec.solver.step_scale = cfg.get_double("step_scale", 0.9);
    ec.solver.trace_every = cfg.get_int("trace_every", 1);
    ec.seed = cfg.get_u64("seed");  // seed is mandatory
    ec.out_dir = cfg.get_string("out", "");
    ec.points_K = cfg.get_int("points_K", 5);
    ec.point_exponent = cfg.get_double("point_exponent", -0.5);
    ec.line_rho_frac = cfg.get_double("line_rho", 0.35);
    std::string lw = cfg.get_string("line_w", "smooth");
    ec.line_weight = lw == "box" ? LineWeight::box : lw == "cos2" ? LineWeight::cos2
                                                                  : LineWeight::smooth;
    ec.texture_budget = cfg.get_double("texture_budget", 0.5);
    ec.d_max = cfg.get_double("d_max", 1.0);
    ec.fitted_grids = cfg.get_int("fitted_grids", 1) != 0;
    ec.certificates = cfg.get_int("certificates", 1) != 0;
    ec.kappa_trials = cfg.get_int("kappa_trials", 16);
    ec.image_format = cfg.get_string("format", "raw");
    return ec;
}

double GoldenSetup::h_px(int j) const {
    return double(grid.n) * h0 * std::pow(2.0, -strip_exp * j);
}

StripMask GoldenSetup::mask_at(int j) const { return StripMask::make(grid, h_px(j)); }

GoldenSetup build_golden(const ExperimentConfig& cfg) {
    GoldenSetup gs;
    gs.grid = FrequencyGrid::make(cfg.n);
    gs.j_max = win::j_max_for(cfg.n);
    gs.h0 = cfg.h0;
    gs.eps = cfg.epsilon;
    gs.strip_exp = cfg.strip_exp;
    gs.bank = multiscale_bank(gs.grid, gs.j_max);
    gs.wavelet = std::make_shared<const FrameFamily>(build_wavelet_frame(gs.grid, gs.j_max));
    gs.shearlet = std::make_shared<const FrameFamily>(build_shearlet_frame(gs.grid, gs.j_max));

    const int n = cfg.n;
    // point positions: known region at every solved scale, clear of the line
    double h_widest = gs.h_px(std::max(0, cfg.j_lo)) + 4.0;
    std::mt19937_64 rng(subseed(cfg.seed, 101));
    gs.points.spectral_exponent = cfg.point_exponent;
    int guard = std::max(4, n / 16);
    while (int(gs.points.positions.size()) < cfg.points_K) {
        int x1 = int(rng() % uint64_t(n));
        int x2 = int(rng() % uint64_t(n));
        int d1 = std::abs(x1 - n / 2);
        if (double(std::min(d1, n - d1)) <= h_widest) continue;
        int d2 = std::min(x2, n - x2);
        if (d2 < guard) continue;  // keep clear of the line column
        bool ok = true;
        for (const Vector2i& p : gs.points.positions) {
            int e1 = std::abs(p.x() - x1), e2 = std::abs(p.y() - x2);
            e1 = std::min(e1, n - e1);
            e2 = std::min(e2, n - e2);
            if (e1 * e1 + e2 * e2 < (n / 8) * (n / 8)) ok = false;
        }
        if (ok) gs.points.positions.push_back(Vector2i(x1, x2));
    }
    gs.line.rho = cfg.line_rho_frac * n;
    gs.line.weight = cfg.line_weight;
    gs.texture = make_texture_spec(gs.grid, gs.j_max, cfg.epsilon, cfg.texture_budget, cfg.d_max,
                                   subseed(cfg.seed, 202));

    std::set<std::pair<int, int>> expanded;
    int inset = n / 2 - 2;
    for (const Vector2i& b : gs.texture.bands)
        for (int o1 = -1; o1 <= 1; o1++)
            for (int o2 = -1; o2 <= 1; o2++) {
                Vector2i nb(b.x() + o1, b.y() + o2);
                if (std::abs(nb.x()) <= inset && std::abs(nb.y()) <= inset)
                    expanded.insert({nb.x(), nb.y()});
            }
    std::vector<Vector2i> blist;
    for (const auto& [b1, b2] : expanded) blist.push_back(Vector2i(b1, b2));
    gs.gabor = std::make_shared<const FrameFamily>(build_gabor_frame(gs.grid, blist));

    Image p = gen_points(gs.grid, gs.points);
    Image l = gen_line(gs.grid, gs.line);
    Image t = gen_texture(gs.grid, gs.texture);
    gs.stack_p = decompose(p, gs.bank);
    gs.stack_l = decompose(l, gs.bank);
    gs.stack_t = decompose(t, gs.bank);
    normalize_band_energies(gs.stack_p, gs.stack_l, gs.stack_t);
    return gs;
}

std::vector<DecayRow> coherence_decay_rows(const GoldenSetup& gs, int j) {
    const double eps = gs.eps;
    StripMask mask = gs.mask_at(j);
    ClusterSet L1 = cluster_wavelet(gs.wavelet, j, eps, gs.points.positions);
    ClusterSet L2 = cluster_shearlet(gs.shearlet, j, eps, 0);
    ClusterSet L3 = cluster_gabor(gs.gabor, j, eps, gs.texture.bands);
    auto mu = [&](const ClusterSet& c, const std::shared_ptr<const FrameFamily>& p, Projection pr) {
        return cluster_coherence(c, p, pr, &mask);
    };
    std::vector<DecayRow> rows;
    rows.push_back({"mu(L1,Phi;Psi)", j, mu(L1, gs.shearlet, Projection::none)});
    rows.push_back({"mu(L2,Psi;Phi)", j, mu(L2, gs.wavelet, Projection::none)});
    rows.push_back({"mu(L3,G;Psi)", j, mu(L3, gs.shearlet, Projection::none)});
    rows.push_back({"mu(L3,G;Phi)", j, mu(L3, gs.wavelet, Projection::none)});
    rows.push_back({"mu(L1,Phi;G)", j, mu(L1, gs.gabor, Projection::none)});
    rows.push_back({"mu(L2,Psi;G)", j, mu(L2, gs.gabor, Projection::none)});
    rows.push_back({"mu(L3,PMG;Psi)", j, mu(L3, gs.shearlet, Projection::missing)});
    rows.push_back({"mu(L2,PMPsi;G)", j, mu(L2, gs.gabor, Projection::missing)});
    rows.push_back({"mu(L2,PMPsi;Psi)", j, mu(L2, gs.shearlet, Projection::missing)});
    rows.push_back({"mu(L3,PMG;G)", j, mu(L3, gs.gabor, Projection::missing)});
    return rows;
}

std::vector<DecayRow> delta_decay_rows(const GoldenSetup& gs, int j) {
    const double eps = gs.eps;
    ClusterSet L1 = cluster_wavelet(gs.wavelet, j, eps, gs.points.positions);
    ClusterSet L2 = cluster_shearlet(gs.shearlet, j, eps, 0);
    ClusterSet L3 = cluster_gabor(gs.gabor, j, eps, gs.texture.bands);
    std::vector<DecayRow> rows;
    rows.push_back(
        {"delta_1", j, relative_sparsity(analyze(gs.wavelet, gs.stack_p.band(j)), L1)});
    rows.push_back(
        {"delta_2", j, relative_sparsity(analyze(gs.shearlet, gs.stack_l.band(j)), L2)});
    rows.push_back({"delta_3", j, relative_sparsity(analyze(gs.gabor, gs.stack_t.band(j)), L3)});
    return rows;
}

ScaleDiagnostics scale_diagnostics(const GoldenSetup& gs, int j, int kappa_trials, uint64_t seed,
                                   double lambda) {
    StripMask mask = gs.mask_at(j);
    std::vector<ComponentSetup> comps;
    comps.push_back({gs.wavelet, cluster_wavelet(gs.wavelet, j, gs.eps, gs.points.positions),
                     false});
    comps.push_back({gs.shearlet, cluster_shearlet(gs.shearlet, j, gs.eps, 0), true});
    comps.push_back({gs.gabor, cluster_gabor(gs.gabor, j, gs.eps, gs.texture.bands), true});
    ScaleDiagnostics out;
    CoherenceTable table = compute_coherence_table(comps, &mask);
    out.mu = kappa_upper_bound(table, {false, true, true});
    out.kappa_lo = kappa_sampled_lower_bound(comps, &mask, kappa_trials, seed);
    out.lambda_rep = check_lambda_condition(comps, lambda);
    return out;
}

std::string decay_csv(const std::vector<DecayRow>& rows) {
    std::ostringstream os;
    os.precision(12);
    os << "name,j,value\n";
    for (const DecayRow& r : rows) os << r.name << "," << r.j << "," << r.value << "\n";
    return os.str();
}

Report run(const ExperimentConfig& cfg) {
    GoldenSetup gs = build_golden(cfg);
    const int n = cfg.n;
    const int j_hi = cfg.j_hi < 0 ? gs.j_max : cfg.j_hi;
    Report rep;

    // full-grid recovered bands per component, zero until solved
    std::vector<SubbandStack> recovered(3);
    for (int c = 0; c < 3; c++) {
        recovered[size_t(c)] = gs.stack_p;  // copy layout
        recovered[size_t(c)].low = Image::zero(gs.grid);
        for (auto& [j, im] : recovered[size_t(c)].bands) im = Image::zero(gs.grid);
    }

    for (int j = cfg.j_lo; j <= j_hi; j++) {
        ScaleResult sr;
        sr.j = j;
        const Image& tp = gs.stack_p.band(j);
        const Image& tl = gs.stack_l.band(j);
        const Image& tt = gs.stack_t.band(j);
        Image clean = Image::zero(gs.grid);
        clean.v = tp.v + tl.v + tt.v;
        if (clean.norm() < 1e-14) {
            sr.skipped_empty = true;
            sr.n_used = n;
            rep.scales.push_back(sr);
            continue;
        }
        // fitted grid for this scale's slice
        int n_j = n;
        if (cfg.fitted_grids && j + 1 < gs.j_max && (1 << (2 * j + 3)) < n)
            n_j = std::max(32, 1 << (2 * j + 3));
        FrequencyGrid grid_j = FrequencyGrid::make(n_j);
        sr.n_used = n_j;
        std::vector<Image> truth = {resample_grid(tp, grid_j), resample_grid(tl, grid_j),
                                    resample_grid(tt, grid_j)};
        Image clean_j = Image::zero(grid_j);
        clean_j.v = truth[0].v + truth[1].v + truth[2].v;
        StripMask mask_j = StripMask::make(grid_j, double(n_j) * cfg.h0 *
                                                        std::pow(2.0, -cfg.strip_exp * j));
        double nl = (cfg.mode == SolveMode::constrained) ? 0.0 : cfg.noise_level;
        Degraded deg = degrade(clean_j, mask_j, nl, subseed(cfg.seed, 300 + uint64_t(j)));

        ScaleFrames frames = build_scale_frames(grid_j, j, gs.j_max, gs.texture);
        if (nl > 0) {
            double e1 = analyze(frames.wavelet, deg.noise).l1();
            double e2 = analyze(frames.shearlet, deg.noise).l1();
            double e3 = analyze(frames.gabor, deg.noise).l1();
            sr.noise_eps = std::min({e1, e2, e3});
        }

        SeparationProblem prob;
        prob.observed = deg.observed;
        prob.mask = mask_j;
        prob.frames = {frames.wavelet, frames.shearlet, frames.gabor};
        prob.mode = cfg.mode;
        prob.reg = cfg.reg;
        prob.lambda = cfg.lambda_override > 0 ? cfg.lambda_override : std::pow(4.0, j);
        prob.opts = cfg.solver;

        SeparationResult result;
        try {
            result = solve(prob);
        } catch (const std::exception& e) {
            sr.error = e.what();
            rep.scales.push_back(sr);
            continue;
        }
        sr.iterations = result.iterations;
        sr.converged = result.converged;
        sr.residual = result.residual;
        sr.report = residual_report(result, truth);

        if (cfg.certificates) {
            std::vector<Vector2i> pts_j = gs.points.positions;
            for (Vector2i& p : pts_j)
                p = Vector2i(int(std::lround(double(p.x()) * n_j / n)) % n_j,
                             int(std::lround(double(p.y()) * n_j / n)) % n_j);
            std::vector<ComponentSetup> comps;
            comps.push_back(
                {frames.wavelet, cluster_wavelet(frames.wavelet, j, cfg.epsilon, pts_j), false});
            comps.push_back(
                {frames.shearlet, cluster_shearlet(frames.shearlet, j, cfg.epsilon, 0), true});
            comps.push_back(
                {frames.gabor, cluster_gabor(frames.gabor, j, cfg.epsilon, gs.texture.bands),
                 true});
            CoherenceTable table = compute_coherence_table(comps, &mask_j);
            KappaBounds mu = kappa_upper_bound(table, {false, true, true});
            std::vector<double> deltas;
            for (int c = 0; c < 3; c++)
                deltas.push_back(
                    relative_sparsity(analyze(comps[size_t(c)].frame, truth[size_t(c)]),
                                      comps[size_t(c)].cluster));
            sr.kappa_lo = kappa_sampled_lower_bound(comps, &mask_j, cfg.kappa_trials,
                                                    subseed(cfg.seed, 400 + uint64_t(j)));
            sr.cert = error_certificate(
                deltas, mu,
                nl > 0 ? std::optional<double>(sr.noise_eps) : std::nullopt);
        }

        for (int c = 0; c < 3; c++) {
            Image full = resample_grid(result.components[size_t(c)], gs.grid);
            for (auto& [jj, im] : recovered[size_t(c)].bands)
                if (jj == j) im = full;
        }
        rep.scales.push_back(sr);
    }

    for (int c = 0; c < 3; c++) rep.reassembled.push_back(reconstruct(recovered[size_t(c)]));

    Image clean_full = Image::zero(gs.grid);
    clean_full.v = reconstruct(gs.stack_p).v + reconstruct(gs.stack_l).v + reconstruct(gs.stack_t).v;
    rep.observed = degrade(clean_full, gs.mask_at(cfg.j_lo), 0.0, 0).observed;

    std::ostringstream os;
    os.precision(12);
    os << "j,n_used,err_points,err_line,err_texture,rel_sum,abs_err_sum,delta,mu_cN,kappa_lo,"
          "bound,valid,noise_eps,iterations,converged,residual,skipped,error\n";
    for (const ScaleResult& s : rep.scales) {
        os << s.j << "," << s.n_used << ",";
        if (s.report.rel_err.size() == 3)
            os << s.report.rel_err[0] << "," << s.report.rel_err[1] << "," << s.report.rel_err[2];
        else
            os << ",,";
        os << "," << s.report.rel_sum << "," << s.report.abs_err_sum << "," << s.cert.delta << ","
           << s.cert.mu.mu_cN << "," << s.kappa_lo << "," << (s.cert.valid ? s.cert.bound : 0.0)
           << "," << (s.cert.valid ? 1 : 0) << "," << s.noise_eps << "," << s.iterations << ","
           << (s.converged ? 1 : 0) << "," << s.residual << "," << (s.skipped_empty ? 1 : 0) << ","
           << s.error << "\n";
    }
    rep.summary_csv = os.str();
    return rep;
}

void write_report(const std::string& dir, const ExperimentConfig& cfg, const Report& rep,
                  double wall_seconds) {
    std::filesystem::create_directories(dir);
    atomic_write_text(dir + "/summary.csv", rep.summary_csv);
    const char* names[3] = {"points", "line", "texture"};
    if (cfg.image_format != "none") {
        for (size_t c = 0; c < rep.reassembled.size(); c++) {
            if (cfg.image_format == "raw" || cfg.image_format == "both")
                write_raw(dir + "/recovered_" + names[c] + ".gsep", rep.reassembled[c]);
            if (cfg.image_format == "pgm" || cfg.image_format == "both")
                write_pgm(dir + "/recovered_" + names[c] + ".pgm", rep.reassembled[c]);
        }
        if (cfg.image_format == "raw" || cfg.image_format == "both")
            write_raw(dir + "/observed.gsep", rep.observed);
        if (cfg.image_format == "pgm" || cfg.image_format == "both")
            write_pgm(dir + "/observed.pgm", rep.observed);
    }
    // wall time kept out of the deterministic artifacts
    std::ostringstream t;
    t << "wall_seconds = " << wall_seconds << "\n";
    atomic_write_text(dir + "/timing.txt", t.str());
}

}  // namespace gsep
