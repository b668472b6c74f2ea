#include "gsep/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

namespace gsep {

namespace {

inline double torus_dist(int a, int b, int n) {
    int d = std::abs(a - b);
    return double(std::min(d, n - d));
}

double scale_radius_px(int n, double eps, int jp) {
    return double(n) * std::pow(2.0, (eps - 2.0) * jp);
}

Image project(const Image& img, Projection proj, const StripMask* mask) {
    if (proj == Projection::none) return img;
    if (!mask) throw std::invalid_argument("projection requested without a mask");
    return apply_mask(*mask, img,
                      proj == Projection::missing ? MaskPart::missing : MaskPart::known);
}

}  // namespace

bool ClusterSet::subband_active(const SubbandMeta& meta) const {
    if (meta.lowpass) return false;
    if (variant == ClusterVariant::wavelet) return radius_px.count(meta.j) > 0;
    if (variant == ClusterVariant::shearlet)
        return meta.cone == Cone::vertical && std::abs(meta.l) <= 1 &&
               halfwidth_px.count(meta.j) > 0;
    return false;
}

RArray ClusterSet::indicator(int b) const {
    const int n = frame->grid.n;
    const SubbandMeta& meta = frame->bands.at(size_t(b)).meta;
    RArray ind = RArray::Zero(n, n);
    if (!subband_active(meta)) return ind;
    if (variant == ClusterVariant::wavelet) {
        double r = radius_px.at(meta.j);
        // offsets up to n reach every torus cell; membership is toroidal distance
        int ri = std::min(int(std::floor(r)), n);
        for (const Vector2i& c : centers) {
            for (int d1 = -ri; d1 <= ri; d1++)
                for (int d2 = -ri; d2 <= ri; d2++)
                    if (double(d1) * d1 + double(d2) * d2 <= r * r)
                        ind(((c.x() + d1) % n + n) % n, ((c.y() + d2) % n + n) % n) = 1.0;
        }
    } else {
        // |k_2 - l k_1| <= 2^(eps j') in the paper's sheared index units is
        // |2^(2j') x_2| <= 2^(eps j') at the atom center (the shear terms
        // cancel), i.e. a column band |x_2 - line| <= n 2^((eps-2) j') px
        // shared by the l = -1, 0, 1 orientations.
        double hw = halfwidth_px.at(meta.j);
        for (int x2 = 0; x2 < n; x2++)
            if (torus_dist(x2, line_col, n) <= hw) ind.col(x2).setConstant(1.0);
    }
    return ind;
}

size_t ClusterSet::member_count() const {
    size_t total = 0;
    if (variant == ClusterVariant::gabor) {
        long ball = torus_ball_count(2 * frame->grid.n, ball_radius);
        return size_t(ball) * bands.size();
    }
    for (int b = 0; b < frame->subband_count(); b++) {
        if (!subband_active(frame->bands[size_t(b)].meta)) continue;
        total += size_t(indicator(b).sum());
    }
    return total;
}

ClusterSet cluster_wavelet(const std::shared_ptr<const FrameFamily>& frame, int j, double eps,
                           const std::vector<Vector2i>& points) {
    if (points.empty()) throw std::invalid_argument("cluster_wavelet: empty point cloud");
    ClusterSet cs;
    cs.frame = frame;
    cs.variant = ClusterVariant::wavelet;
    cs.j = j;
    cs.eps = eps;
    cs.centers = points;
    for (int jp = std::max(0, j - 1); jp <= std::min(frame->j_max, j + 1); jp++)
        cs.radius_px[jp] = scale_radius_px(frame->grid.n, eps, jp);
    return cs;
}

ClusterSet cluster_shearlet(const std::shared_ptr<const FrameFamily>& frame, int j, double eps,
                            int line_col) {
    ClusterSet cs;
    cs.frame = frame;
    cs.variant = ClusterVariant::shearlet;
    cs.j = j;
    cs.eps = eps;
    cs.line_col = line_col;
    for (int jp = std::max(0, j - 1); jp <= std::min(frame->j_max, j + 1); jp++)
        cs.halfwidth_px[jp] = scale_radius_px(frame->grid.n, eps, jp);
    return cs;
}

ClusterSet cluster_gabor(const std::shared_ptr<const FrameFamily>& frame, int j, double eps,
                         const std::vector<Vector2i>& I_T) {
    ClusterSet cs;
    cs.frame = frame;
    cs.variant = ClusterVariant::gabor;
    cs.j = j;
    cs.eps = eps;
    cs.ball_radius = double(frame->grid.n) * std::pow(2.0, eps * j / 6.0);
    // I_T^pm cap supp W_j, intersected with the frame's active bands
    std::set<std::pair<int, int>> expanded;
    for (const Vector2i& b : I_T)
        for (int o1 = -1; o1 <= 1; o1++)
            for (int o2 = -1; o2 <= 1; o2++) expanded.insert({b.x() + o1, b.y() + o2});
    for (const GaborBand& gb : frame->gbands) {
        if (!expanded.count({gb.freq.x(), gb.freq.y()})) continue;
        if (win::w_j(j, gb.freq.x(), gb.freq.y()) <= 0) continue;
        cs.bands.push_back(gb.freq);
    }
    return cs;
}

long disc_lattice_count(double r) {
    long count = 0;
    int ri = int(std::floor(r));
    for (int d1 = -ri; d1 <= ri; d1++) {
        double rem = r * r - double(d1) * d1;
        if (rem < 0) continue;
        count += 2 * long(std::floor(std::sqrt(rem))) + 1;
    }
    return count;
}

long torus_ball_count(int two_n, double r) {
    long count = 0;
    for (int m1 = 0; m1 < two_n; m1++) {
        double t1 = torus_dist(m1, 0, two_n);
        double rem = r * r - t1 * t1;
        if (rem < 0) continue;
        long lim = long(std::floor(std::sqrt(rem)));
        count += std::min<long>(2 * lim + 1, two_n);
    }
    return count;
}

namespace {

// l1 of the coefficients, restricted inside or outside the cluster.
double masked_l1(const CoefficientSet& coeffs, const ClusterSet& cluster, bool inside) {
    const FrameFamily& f = *coeffs.frame;
    const int n = f.grid.n;
    double acc = 0;
    for (int b = 0; b < f.subband_count(); b++) {
        const Field& fld = coeffs.fields[size_t(b)];
        if (!cluster.subband_active(f.bands[size_t(b)].meta)) {
            if (!inside) acc += fld.a.abs().sum();
            continue;
        }
        RArray ind = cluster.indicator(b);
        for (int x1 = 0; x1 < n; x1++)
            for (int x2 = 0; x2 < n; x2++) {
                bool in = ind(x1, x2) != 0.0;
                if (in == inside) acc += std::abs(fld.at(x1, x2));
            }
    }
    if (coeffs.gabor_dense) {
        const int n2 = 2 * n;
        for (size_t b = 0; b < f.gbands.size(); b++) {
            bool band_in = cluster.variant == ClusterVariant::gabor &&
                           std::count(cluster.bands.begin(), cluster.bands.end(), f.gbands[b].freq);
            for (int m1 = 0; m1 < n2; m1++)
                for (int m2 = 0; m2 < n2; m2++) {
                    double t1 = torus_dist(m1, 0, n2), t2 = torus_dist(m2, 0, n2);
                    bool in = band_in &&
                              t1 * t1 + t2 * t2 <= cluster.ball_radius * cluster.ball_radius;
                    if (in == inside) acc += std::abs(coeffs.gdense[b](m1, m2));
                }
        }
    } else {
        long ball = cluster.variant == ClusterVariant::gabor
                        ? torus_ball_count(2 * n, cluster.ball_radius)
                        : 0;
        for (size_t b = 0; b < f.gbands.size(); b++) {
            bool band_in = cluster.variant == ClusterVariant::gabor &&
                           std::count(cluster.bands.begin(), cluster.bands.end(), f.gbands[b].freq);
            double per_atom = std::abs(coeffs.gtone[b]) / double(2 * n);
            long total = 4L * n * n;
            long in_count = band_in ? ball : 0;
            acc += per_atom * double(inside ? in_count : total - in_count);
        }
    }
    return acc;
}

}  // namespace

double cluster_l1(const CoefficientSet& coeffs, const ClusterSet& cluster) {
    if (coeffs.frame.get() != cluster.frame.get())
        throw std::invalid_argument("cluster_l1: cluster built for a different frame");
    return masked_l1(coeffs, cluster, true);
}

double relative_sparsity(const CoefficientSet& coeffs, const ClusterSet& cluster) {
    if (coeffs.frame.get() != cluster.frame.get())
        throw std::invalid_argument("relative_sparsity: cluster built for a different frame");
    return masked_l1(coeffs, cluster, false);
}

Image cluster_sum_image(const ClusterSet& cluster) {
    const FrameFamily& f = *cluster.frame;
    const int n = f.grid.n;
    if (cluster.variant != ClusterVariant::gabor) {
        CoefficientSet ind;
        ind.frame = cluster.frame;
        ind.fields.resize(f.bands.size());
        for (int b = 0; b < f.subband_count(); b++) {
            ind.fields[size_t(b)].transposed = false;
            if (cluster.subband_active(f.bands[size_t(b)].meta))
                ind.fields[size_t(b)].a = cluster.indicator(b).cast<cplx>();
            else
                ind.fields[size_t(b)].a = CArray::Zero(n, n);
        }
        ind.gtone.assign(f.gbands.size(), cplx(0, 0));
        return synthesize(f, ind);
    }
    // gabor: sum over the position ball collapses to the indicator's DFT at
    // each band frequency
    const int n2 = 2 * n;
    CArray ball = CArray::Zero(n2, n2);
    int ri = int(std::floor(cluster.ball_radius));
    for (int m1 = 0; m1 < n2; m1++) {
        double t1 = torus_dist(m1, 0, n2);
        double rem = cluster.ball_radius * cluster.ball_radius - t1 * t1;
        if (rem < 0) continue;
        int lim = int(std::floor(std::sqrt(rem)));
        (void)ri;
        for (int m2 = 0; m2 < n2; m2++)
            if (torus_dist(m2, 0, n2) <= lim) ball(m1, m2) = cplx(1, 0);
    }
    Spectrum2 ball_hat;
    fft::forward(ball, ball_hat);
    Spectrum acc = Spectrum::zero(f.grid);
    FrequencyGrid g2 = FrequencyGrid{n2};
    for (const GaborBand& gb : f.gbands) {
        bool member = std::count(cluster.bands.begin(), cluster.bands.end(), gb.freq) > 0;
        if (!member) continue;
        // D(xi) = sum_{m in ball} e^{+2 pi i xi.m/(2n)} = 2n conj(uDFT(ball))(xi)
        cplx d = std::conj(ball_hat.at(g2.index(gb.freq.x()), g2.index(gb.freq.y()))) * double(n2);
        acc.at_freq(gb.freq.x(), gb.freq.y()) += gb.tap * d / double(n2);
    }
    return inverse_spectrum(acc);
}

double cluster_coherence(const ClusterSet& cluster,
                         const std::shared_ptr<const FrameFamily>& partner, Projection proj,
                         const StripMask* mask) {
    if (!(cluster.frame->grid == partner->grid))
        throw std::invalid_argument("cluster_coherence: grid mismatch");
    Image s = project(cluster_sum_image(cluster), proj, mask);
    CoefficientSet c = analyze(partner, s);
    double mu = 0;
    for (const Field& fld : c.fields) mu = std::max(mu, fld.a.abs().maxCoeff());
    const int n = partner->grid.n;
    for (cplx t : c.gtone) mu = std::max(mu, std::abs(t) / double(2 * n));
    return mu;
}

CoherenceTable compute_coherence_table(const std::vector<ComponentSetup>& comps,
                                       const StripMask* mask) {
    CoherenceTable table;
    const int N = int(comps.size());
    for (int m = 0; m < N; m++) {
        if (comps[size_t(m)].has_missing)
            table[{m, m, Projection::missing}] = cluster_coherence(
                comps[size_t(m)].cluster, comps[size_t(m)].frame, Projection::missing, mask);
        for (int p = 0; p < N; p++) {
            if (p == m) continue;
            table[{m, p, Projection::none}] = cluster_coherence(
                comps[size_t(m)].cluster, comps[size_t(p)].frame, Projection::none, mask);
            if (comps[size_t(m)].has_missing) {
                table[{m, p, Projection::known}] = cluster_coherence(
                    comps[size_t(m)].cluster, comps[size_t(p)].frame, Projection::known, mask);
                table[{m, p, Projection::missing}] = cluster_coherence(
                    comps[size_t(m)].cluster, comps[size_t(p)].frame, Projection::missing, mask);
            }
        }
    }
    return table;
}

KappaBounds kappa_upper_bound(const CoherenceTable& table, const std::vector<bool>& has_missing) {
    const int N = int(has_missing.size());
    auto need = [&](int m, int p, Projection proj) {
        auto it = table.find({m, p, proj});
        if (it == table.end()) throw std::invalid_argument("kappa_upper_bound: missing entry");
        return it->second;
    };
    KappaBounds kb;
    for (int m = 0; m < N; m++) {
        // Lemma (iii): own missing term + cross terms with P_K (unprojected for
        // components without missing content)
        double sum_cN = has_missing[size_t(m)] ? need(m, m, Projection::missing) : 0.0;
        double sum_sep = 0;
        for (int c = 0; c < N; c++) {
            if (c == m) continue;
            if (has_missing[size_t(c)]) {
                sum_cN += need(c, m, Projection::known);
                sum_sep += need(c, m, Projection::none) + need(c, m, Projection::missing);
            } else {
                sum_cN += need(c, m, Projection::none);
                sum_sep += need(c, m, Projection::none);
            }
        }
        kb.mu_cN = std::max(kb.mu_cN, sum_cN);
        kb.mu_sep = std::max(kb.mu_sep, sum_sep);
        if (has_missing[size_t(m)])
            kb.mu_inp = std::max(kb.mu_inp, need(m, m, Projection::missing));
    }
    return kb;
}

double kappa_sampled_lower_bound(const std::vector<ComponentSetup>& comps, const StripMask* mask,
                                 int trials, uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("kappa_sampled_lower_bound: trials >= 1");
    const int N = int(comps.size());
    if (N == 0) return 0;
    const FrequencyGrid grid = comps[0].frame->grid;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::cauchy_distribution<double> heavy(0.0, 1.0);

    double best = 0;
    for (int t = 0; t < trials; t++) {
        std::vector<Image> f(size_t(N), Image::zero(grid));
        for (int m = 0; m < N; m++) {
            const FrameFamily& fr = *comps[size_t(m)].frame;
            CoefficientSet c;
            c.frame = comps[size_t(m)].frame;
            c.fields.resize(fr.bands.size());
            for (size_t b = 0; b < fr.bands.size(); b++) {
                c.fields[b].transposed = false;
                c.fields[b].a = CArray::Zero(grid.n, grid.n);
            }
            c.gtone.assign(fr.gbands.size(), cplx(0, 0));
            int atoms = 24;
            for (int a = 0; a < atoms; a++) {
                double mag = std::abs(heavy(rng));
                double ph = 2.0 * M_PI * unit(rng);
                cplx val = mag * cplx(std::cos(ph), std::sin(ph));
                if (!fr.bands.empty() && (fr.gbands.empty() || unit(rng) < 0.7)) {
                    size_t b = size_t(rng() % fr.bands.size());
                    int x1 = int(rng() % uint64_t(grid.n)), x2 = int(rng() % uint64_t(grid.n));
                    c.fields[b].a(x1, x2) += val;
                } else if (!fr.gbands.empty()) {
                    size_t b = size_t(rng() % fr.gbands.size());
                    int m1 = int(rng() % uint64_t(2 * grid.n)), m2 = int(rng() % uint64_t(2 * grid.n));
                    const Vector2i& bf = fr.gbands[b].freq;
                    double phm = 2.0 * M_PI * (double(bf.x()) * m1 + double(bf.y()) * m2) /
                                 double(2 * grid.n);
                    // delta coefficient at position m contributes a pure phase
                    c.gtone[b] += val * cplx(std::cos(phm), std::sin(phm)) / double(2 * grid.n);
                }
            }
            f[size_t(m)] = synthesize(fr, c);
        }
        // enforce sum f in H_M by removing the known part of the sum from f_1
        if (mask) {
            Image sum = Image::zero(grid);
            for (const Image& fm : f) sum.v += fm.v;
            Image pk = apply_mask(*mask, sum, MaskPart::known);
            f[0].v -= pk.v;
        } else {
            // H_M = {0}: the tuple must sum to zero
            Image sum = Image::zero(grid);
            for (const Image& fm : f) sum.v += fm.v;
            f[0].v -= sum.v;
        }
        double num = 0, den = 0;
        for (int m = 0; m < N; m++) {
            const auto& comp = comps[size_t(m)];
            CoefficientSet all = analyze(comp.frame, f[size_t(m)]);
            den += all.l1();
            if (comp.has_missing && mask) {
                Image pk = apply_mask(*mask, f[size_t(m)], MaskPart::known);
                Image pm = apply_mask(*mask, f[size_t(m)], MaskPart::missing);
                num += cluster_l1(analyze(comp.frame, pk), comp.cluster);
                num += cluster_l1(analyze(comp.frame, pm), comp.cluster);
            } else {
                num += cluster_l1(all, comp.cluster);
            }
        }
        if (den <= 1e-300) continue;  // degenerate tuple, resample
        best = std::max(best, num / den);
    }
    return best;
}

Certificate error_certificate(const std::vector<double>& deltas, const KappaBounds& mu,
                              std::optional<double> noise_eps) {
    Certificate cert;
    cert.delta_m = deltas;
    for (double d : deltas) {
        if (d < 0) throw std::invalid_argument("error_certificate: delta >= 0");
        cert.delta += d;
    }
    cert.mu = mu;
    cert.noisy = noise_eps.has_value();
    cert.noise_eps = noise_eps.value_or(0.0);
    cert.valid = mu.mu_cN < 0.5;
    if (cert.valid)
        cert.bound = (2.0 * cert.delta + 2.0 * mu.mu_cN * cert.noise_eps) / (1.0 - 2.0 * mu.mu_cN);
    return cert;
}

LambdaReport check_lambda_condition(const std::vector<ComponentSetup>& comps, double lambda) {
    if (lambda < 0) throw std::invalid_argument("check_lambda_condition: lambda >= 0");
    LambdaReport rep;
    rep.lambda = lambda;
    if (comps.empty()) {
        rep.pass = true;
        return rep;
    }
    const FrequencyGrid grid = comps[0].frame->grid;
    const int n = grid.n;
    RArray total = RArray::Zero(n, n);
    for (const ComponentSetup& comp : comps) {
        const FrameFamily& fr = *comp.frame;
        RArray own = RArray::Zero(n, n);
        for (int b = 0; b < fr.subband_count(); b++) {
            if (!comp.cluster.subband_active(fr.bands[size_t(b)].meta)) continue;
            RArray ind = comp.cluster.indicator(b);
            if (ind.sum() == 0) continue;
            Image kappa = fr.subband_kernel(b);
            // sum_{k in Lambda} |kappa(x - k)| = (ind (*) |kappa|)(x), circular
            CArray a = kappa.v.abs().cast<cplx>();
            CArray bb = ind.cast<cplx>();
            Spectrum2 ah, bh;
            fft::forward(a, ah);
            fft::forward(bb, bh);
            Spectrum2 prod;
            prod.n = n;
            prod.s = ah.s * bh.s;
            CArray conv;
            fft::inverse(prod, conv);
            own += (conv * double(n)).real().max(0.0);
        }
        if (comp.cluster.variant == ClusterVariant::gabor) {
            // |g_{m,band}(x)| = 1/(2 n^2) for every tone atom
            long ball = torus_ball_count(2 * n, comp.cluster.ball_radius);
            double c = double(ball) * double(comp.cluster.bands.size()) / (2.0 * n * n);
            own += c;
        }
        rep.component_max.push_back(own.maxCoeff());
        total += own;
    }
    rep.max_ratio = total.maxCoeff();
    rep.pass = rep.max_ratio <= lambda;
    return rep;
}

std::string certificate_csv_header() {
    return "j,pair,projection,mu,delta_1,delta_2,delta_3,kappa_lo,bound,valid\n";
}

std::string certificate_csv_rows(int j, const CoherenceTable& table, const Certificate& cert,
                                 double kappa_lo, const std::vector<std::string>& names) {
    std::ostringstream os;
    os.precision(12);
    auto proj_name = [](Projection p) {
        return p == Projection::none ? "none" : p == Projection::missing ? "PM" : "PK";
    };
    auto d = [&](size_t i) { return i < cert.delta_m.size() ? cert.delta_m[i] : 0.0; };
    for (const auto& [key, mu] : table) {
        os << j << "," << names.at(size_t(key.cluster_of)) << "->"
           << names.at(size_t(key.partner)) << "," << proj_name(key.proj) << "," << mu << ","
           << d(0) << "," << d(1) << "," << d(2) << "," << kappa_lo << ","
           << (cert.valid ? cert.bound : std::nan("")) << "," << (cert.valid ? 1 : 0) << "\n";
    }
    return os.str();
}

}  // namespace gsep
