#include "gsep/frames.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <limits>

namespace gsep {
namespace {

inline int wrap(int i, int n) { return ((i % n) + n) % n; }

// Evaluates `eval` over the signed-frequency rectangle [lo1,hi1]x[lo2,hi2],
// shrinks to the tight nonzero support, and returns the boxed profile.
// Support sets are symmetric intervals here, so signed min/max bounds give a
// contiguous toroidal box.
Subband boxed_profile(const FrequencyGrid& g, SubbandMeta meta, int lo1, int hi1, int lo2,
                      int hi2, const std::function<double(double, double)>& eval) {
    lo1 = std::max(lo1, -g.n / 2);
    hi1 = std::min(hi1, g.n / 2 - 1);
    lo2 = std::max(lo2, -g.n / 2);
    hi2 = std::min(hi2, g.n / 2 - 1);
    const int m1 = hi1 - lo1 + 1, m2 = hi2 - lo2 + 1;
    RArray vals(m1, m2);
    int min1 = m1, max1 = -1, min2 = m2, max2 = -1;
    for (int a = 0; a < m1; a++)
        for (int b = 0; b < m2; b++) {
            double v = eval(double(lo1 + a), double(lo2 + b));
            vals(a, b) = v;
            if (v != 0.0) {
                min1 = std::min(min1, a);
                max1 = std::max(max1, a);
                min2 = std::min(min2, b);
                max2 = std::max(max2, b);
            }
        }
    Subband sb;
    sb.meta = meta;
    if (max1 < 0) {  // identically zero subband (e.g. W_0 on the integer grid)
        sb.box = Box{g.index(0), 1, g.index(0), 1};
        sb.profile = RArray::Zero(1, 1);
        return sb;
    }
    sb.box = Box{wrap(g.index(lo1 + min1), g.n), max1 - min1 + 1, wrap(g.index(lo2 + min2), g.n),
                 max2 - min2 + 1};
    sb.profile = vals.block(min1, min2, max1 - min1 + 1, max2 - min2 + 1);
    return sb;
}

// Pointwise squared-profile sum over the grid.
RArray profile_total(const FrameFamily& f) {
    const int n = f.grid.n;
    RArray total = RArray::Zero(n, n);
    for (const Subband& sb : f.bands)
        for (int r = 0; r < sb.box.nr; r++)
            for (int c = 0; c < sb.box.nc; c++)
                total(wrap(sb.box.r0 + r, n), wrap(sb.box.c0 + c, n)) +=
                    sb.profile(r, c) * sb.profile(r, c);
    return total;
}

// Divide every profile by sqrt(total) pointwise where positive, restoring the
// exact discrete tiling.
void renormalize(FrameFamily& f) {
    const int n = f.grid.n;
    RArray total = profile_total(f);
    for (Subband& sb : f.bands)
        for (int r = 0; r < sb.box.nr; r++)
            for (int c = 0; c < sb.box.nc; c++) {
                double t = total(wrap(sb.box.r0 + r, n), wrap(sb.box.c0 + c, n));
                if (t > 0) sb.profile(r, c) /= std::sqrt(t);
            }
}

void append_lowpass(FrameFamily& f) {
    SubbandMeta meta;
    meta.lowpass = true;
    f.bands.push_back(boxed_profile(
        f.grid, meta, -f.grid.n / 8 - 1, f.grid.n / 8 + 1, -f.grid.n / 8 - 1, f.grid.n / 8 + 1,
        [](double x1, double x2) { return win::theta_hat(x1, x2); }));
    f.has_lowpass = true;
}

// outer edge of supp W_j; W_0 touches only the origin on the integer grid
int scale_extent(int j) { return j == 0 ? 1 : 1 << (2 * j - 1); }

}  // namespace

FrameFamily build_wavelet_frame(FrequencyGrid grid, int j_max, FrameOptions opts) {
    if (j_max < 0 || scale_extent(j_max) > grid.n / 2)
        throw std::invalid_argument("build_wavelet_frame: j_max too large for grid");
    FrameFamily f;
    f.kind = FrameKind::wavelet;
    f.grid = grid;
    f.j_max = j_max;
    f.top_closed = opts.close_top;
    if (opts.lowpass) append_lowpass(f);
    for (int j = 0; j <= j_max; j++) {
        SubbandMeta meta;
        meta.j = j;
        bool top = opts.close_top && j == j_max;
        int ext = top ? grid.n / 2 : scale_extent(j);
        f.bands.push_back(boxed_profile(grid, meta, -ext, ext, -ext, ext,
                                        [j, top](double x1, double x2) {
                                            return top ? win::w_top(j, x1, x2)
                                                       : win::w_j(j, x1, x2);
                                        }));
    }
    renormalize(f);
    f.certified_parseval = true;
    return f;
}

FrameFamily build_shearlet_frame(FrequencyGrid grid, int j_max, FrameOptions opts) {
    if (j_max < 0 || scale_extent(j_max) > grid.n / 2)
        throw std::invalid_argument("build_shearlet_frame: j_max too large for grid");
    FrameFamily f;
    f.kind = FrameKind::shearlet;
    f.grid = grid;
    f.j_max = j_max;
    f.top_closed = opts.close_top;
    if (opts.lowpass) append_lowpass(f);
    for (int j = 0; j <= j_max; j++) {
        bool top = opts.close_top && j == j_max;
        int ext = top ? grid.n / 2 : scale_extent(j);
        for (int cone = 0; cone < 2; cone++) {
            for (int l = -(1 << j); l <= (1 << j); l++) {
                SubbandMeta meta;
                meta.j = j;
                meta.l = l;
                meta.cone = cone == 0 ? Cone::horizontal : Cone::vertical;
                auto eval = [j, l, top, cone](double x1, double x2) {
                    double w = top ? win::w_top(j, x1, x2) : win::w_j(j, x1, x2);
                    if (w == 0.0) return 0.0;
                    double v = cone == 0 ? win::cone_h(j, l, x1, x2) : win::cone_v(j, l, x1, x2);
                    return w * v;
                };
                f.bands.push_back(boxed_profile(grid, meta, -ext, ext, -ext, ext, eval));
            }
        }
    }
    renormalize(f);
    f.certified_parseval = true;
    return f;
}

FrameFamily build_gabor_frame(FrequencyGrid grid, const std::vector<Vector2i>& active_bands) {
    FrameFamily f;
    f.kind = FrameKind::gabor;
    f.grid = grid;
    const int half = grid.n / 2;
    for (const Vector2i& b : active_bands) {
        if (b.x() < -half + 1 || b.x() > half - 2 || b.y() < -half + 1 || b.y() > half - 2)
            throw std::invalid_argument("build_gabor_frame: band outside lattice inset");
        f.gbands.push_back(GaborBand{b, win::gabor_g(0.0, 0.0)});
    }
    f.certified_parseval = true;
    return f;
}

FrameFamily build_custom_frame(FrequencyGrid grid, std::vector<Subband> bands) {
    FrameFamily f;
    f.kind = FrameKind::custom;
    f.grid = grid;
    f.bands = std::move(bands);
    return f;
}

FrameFamily make_weighted_family(const FrameFamily& f) {
    FrameFamily out = f;
    out.certified_parseval = false;
    for (Subband& sb : out.bands) sb.profile *= subband_weight(sb);
    // gabor taps are already O(1); they are the weights
    return out;
}

FrameFamily make_dual_family(const FrameFamily& weighted) {
    const int n = weighted.grid.n;
    RArray total = profile_total(weighted);
    FrameFamily out = weighted;
    out.certified_parseval = false;
    for (Subband& sb : out.bands)
        for (int r = 0; r < sb.box.nr; r++)
            for (int c = 0; c < sb.box.nc; c++) {
                double t = total(wrap(sb.box.r0 + r, n), wrap(sb.box.c0 + c, n));
                if (t > 0) sb.profile(r, c) /= t;
            }
    for (GaborBand& gb : out.gbands)
        if (gb.tap != 0.0) gb.tap = 1.0 / gb.tap;
    return out;
}

std::pair<double, double> frame_multiplier_range(const FrameFamily& f) {
    RArray total = profile_total(f);
    double lo = std::numeric_limits<double>::infinity(), hi = 0;
    for (int i = 0; i < f.grid.n; i++)
        for (int j = 0; j < f.grid.n; j++) {
            double t = total(i, j);
            if (t > 0) {
                lo = std::min(lo, t);
                hi = std::max(hi, t);
            }
        }
    for (const GaborBand& gb : f.gbands) {
        double t = gb.tap * gb.tap;
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }
    if (!std::isfinite(lo)) lo = 0;
    return {lo, hi};
}

Image FrameFamily::profile_image(int b) const {
    const Subband& sb = bands.at(size_t(b));
    Image out = Image::zero(grid);
    for (int r = 0; r < sb.box.nr; r++)
        for (int c = 0; c < sb.box.nc; c++)
            out.v(wrap(sb.box.r0 + r, grid.n), wrap(sb.box.c0 + c, grid.n)) = sb.profile(r, c);
    return out;
}

Image FrameFamily::subband_kernel(int b) const {
    const Subband& sb = bands.at(size_t(b));
    Spectrum ones = Spectrum::zero(grid);
    ones.s.s.setConstant(cplx(1.0, 0.0));
    Field fld;
    fft::band_to_field(ones.s, sb.box, sb.profile, fld);
    Image out = Image::zero(grid);
    for (int x1 = 0; x1 < grid.n; x1++)
        for (int x2 = 0; x2 < grid.n; x2++) out.v(x1, x2) = fld.at(x1, x2) / double(grid.n);
    return out;
}

FrameFamily FrameFamily::scale_slice(int jlo, int jhi, bool keep_lowpass) const {
    if (kind == FrameKind::gabor)
        throw std::invalid_argument("scale_slice: not applicable to gabor frames");
    FrameFamily out;
    out.kind = kind;
    out.grid = grid;
    out.j_max = std::min(jhi, j_max);
    out.top_closed = top_closed;
    out.certified_parseval = certified_parseval;
    for (const Subband& sb : bands) {
        if (sb.meta.lowpass ? keep_lowpass : (sb.meta.j >= jlo && sb.meta.j <= jhi))
            out.bands.push_back(sb);
    }
    out.has_lowpass = keep_lowpass && has_lowpass;
    return out;
}

CoefficientSet analyze(const std::shared_ptr<const FrameFamily>& frame, const Image& img) {
    const FrameFamily& f = *frame;
    if (!(f.grid == img.grid)) throw std::invalid_argument("analyze: grid mismatch");
    CoefficientSet out;
    out.frame = frame;
    Spectrum spec = spectrum(img);
    out.fields.resize(f.bands.size());
    for (size_t b = 0; b < f.bands.size(); b++)
        fft::band_to_field(spec.s, f.bands[b].box, f.bands[b].profile, out.fields[b]);
    out.gtone.resize(f.gbands.size());
    for (size_t b = 0; b < f.gbands.size(); b++) {
        const GaborBand& gb = f.gbands[b];
        out.gtone[b] = spec.at_freq(gb.freq.x(), gb.freq.y()) * gb.tap;
    }
    return out;
}

CoefficientSet analyze_gabor_dense(const std::shared_ptr<const FrameFamily>& frame,
                                   const Image& img) {
    const FrameFamily& f = *frame;
    if (f.kind != FrameKind::gabor) throw std::invalid_argument("analyze_gabor_dense: not gabor");
    if (f.grid.n > 64)
        throw std::invalid_argument("analyze_gabor_dense: dense fields permitted only for n <= 64");
    CoefficientSet out;
    out.frame = frame;
    out.gabor_dense = true;
    Spectrum spec = spectrum(img);
    const int n = f.grid.n, n2 = 2 * n;
    out.gdense.resize(f.gbands.size());
    for (size_t b = 0; b < f.gbands.size(); b++) {
        const GaborBand& gb = f.gbands[b];
        CArray& fld = out.gdense[b];
        fld.resize(n2, n2);
        // c(m) = (1/2n) sum_o f_hat(band+o) g(o) e^{-2 pi i (band+o).m / 2n}
        for (int m1 = 0; m1 < n2; m1++)
            for (int m2 = 0; m2 < n2; m2++) {
                cplx acc = 0;
                for (int o1 = -1; o1 <= 1; o1++)
                    for (int o2 = -1; o2 <= 1; o2++) {
                        double g = win::gabor_g(double(o1), double(o2));
                        if (g == 0.0) continue;
                        int f1 = gb.freq.x() + o1, f2 = gb.freq.y() + o2;
                        double ph = -2.0 * M_PI * (double(f1) * m1 + double(f2) * m2) / double(n2);
                        acc += spec.at_freq(f1, f2) * g * cplx(std::cos(ph), std::sin(ph));
                    }
                fld(m1, m2) = acc / double(n2);
            }
    }
    return out;
}

Image synthesize(const FrameFamily& f, const CoefficientSet& coeffs) {
    if (coeffs.frame.get() != &f && !(coeffs.frame->grid == f.grid))
        throw std::invalid_argument("synthesize: frame mismatch");
    Spectrum acc = Spectrum::zero(f.grid);
    for (size_t b = 0; b < f.bands.size(); b++)
        fft::field_to_band_accum(coeffs.fields[b], f.bands[b].box, f.bands[b].profile, acc.s);
    const int n = f.grid.n, n2 = 2 * n;
    if (coeffs.gabor_dense) {
        for (size_t b = 0; b < f.gbands.size(); b++) {
            const GaborBand& gb = f.gbands[b];
            const CArray& fld = coeffs.gdense[b];
            for (int o1 = -1; o1 <= 1; o1++)
                for (int o2 = -1; o2 <= 1; o2++) {
                    double g = win::gabor_g(double(o1), double(o2));
                    if (g == 0.0) continue;
                    int f1 = gb.freq.x() + o1, f2 = gb.freq.y() + o2;
                    cplx acc2 = 0;
                    for (int m1 = 0; m1 < n2; m1++)
                        for (int m2 = 0; m2 < n2; m2++) {
                            double ph =
                                2.0 * M_PI * (double(f1) * m1 + double(f2) * m2) / double(n2);
                            acc2 += fld(m1, m2) * cplx(std::cos(ph), std::sin(ph));
                        }
                    acc.at_freq(f1, f2) += acc2 * g / double(n2);
                }
        }
    } else {
        // tone mode: the (2n)^2 position sum collapses to the band frequency
        for (size_t b = 0; b < f.gbands.size(); b++) {
            const GaborBand& gb = f.gbands[b];
            acc.at_freq(gb.freq.x(), gb.freq.y()) += coeffs.gtone[b] * gb.tap;
        }
    }
    return inverse_spectrum(acc);
}

double CoefficientSet::l1() const {
    double s = 0;
    for (const Field& f : fields) s += f.a.abs().sum();
    const int n = frame->grid.n;
    if (gabor_dense)
        for (const CArray& g : gdense) s += g.abs().sum();
    else
        for (cplx t : gtone) s += 2.0 * n * std::abs(t);
    return s;
}

double CoefficientSet::l2() const {
    double s = 0;
    for (const Field& f : fields) s += f.a.abs2().sum();
    if (gabor_dense)
        for (const CArray& g : gdense) s += g.abs2().sum();
    else
        for (cplx t : gtone) s += std::norm(t);
    return std::sqrt(s);
}

cplx CoefficientSet::dot(const CoefficientSet& other) const {
    cplx s = 0;
    for (size_t b = 0; b < fields.size(); b++) {
        const CArray& a = fields[b].a;
        const CArray& bb = other.fields[b].a;
        if (fields[b].transposed == other.fields[b].transposed)
            s += (a * bb.conjugate()).sum();
        else
            s += (a * bb.transpose().conjugate()).sum();
    }
    if (!gabor_dense && !other.gabor_dense)
        for (size_t b = 0; b < gtone.size(); b++) s += gtone[b] * std::conj(other.gtone[b]);
    else if (gabor_dense && other.gabor_dense)
        for (size_t b = 0; b < gdense.size(); b++)
            s += (gdense[b] * other.gdense[b].conjugate()).sum();
    else
        throw std::invalid_argument("dot: mixed gabor representations");
    return s;
}

cplx CoefficientSet::at(const AtomIndex& idx) const {
    const FrameFamily& f = *frame;
    const int n = f.grid.n;
    if (idx.kind == FrameKind::gabor) {
        for (size_t b = 0; b < f.gbands.size(); b++) {
            if (f.gbands[b].freq == idx.band) {
                if (gabor_dense) return gdense[b](idx.pos.x(), idx.pos.y());
                double ph = -2.0 * M_PI *
                            (double(idx.band.x()) * idx.pos.x() + double(idx.band.y()) * idx.pos.y()) /
                            double(2 * n);
                return gtone[b] * cplx(std::cos(ph), std::sin(ph)) / double(2 * n);
            }
        }
        throw std::out_of_range("atom band not in frame");
    }
    for (size_t b = 0; b < f.bands.size(); b++) {
        const SubbandMeta& m = f.bands[b].meta;
        if (m.lowpass == idx.lowpass && (idx.lowpass || (m.j == idx.j && m.cone == idx.cone &&
                                                          m.l == idx.l)))
            return fields[b].at(idx.pos.x(), idx.pos.y());
    }
    throw std::out_of_range("atom subband not in frame");
}

FrameBounds frame_bounds_estimate(const std::shared_ptr<const FrameFamily>& frame, int iters) {
    if (iters < 1) throw std::invalid_argument("frame_bounds_estimate: iters >= 1");
    const int n = frame->grid.n;
    auto apply_S = [&](const Image& x) { return synthesize(*frame, analyze(frame, x)); };
    // deterministic pseudo-random start
    Image v = Image::zero(frame->grid);
    uint64_t state = 0x9e3779b97f4a7c15ull;
    for (int i = 0; i < n; i++)
        for (int j = 0; j < n; j++) {
            state = state * 6364136223846793005ull + 1442695040888963407ull;
            double re = double(state >> 11) / double(1ull << 53) - 0.5;
            state = state * 6364136223846793005ull + 1442695040888963407ull;
            double im = double(state >> 11) / double(1ull << 53) - 0.5;
            v.v(i, j) = cplx(re, im);
        }
    double B = 0;
    for (int k = 0; k < iters; k++) {
        Image Sv = apply_S(v);
        double nv = v.norm();
        B = (Sv.v * v.v.conjugate()).sum().real() / (nv * nv);
        double ns = Sv.norm();
        if (ns == 0) {
            B = 0;
            break;
        }
        v.v = Sv.v / ns;
    }
    // smallest bound via shifted iteration on cI - S
    double c = B * 1.05 + 1e-12;
    Image u = Image::zero(frame->grid);
    state = 0xdeadbeefcafef00dull;
    for (int i = 0; i < n; i++)
        for (int j = 0; j < n; j++) {
            state = state * 6364136223846793005ull + 1442695040888963407ull;
            u.v(i, j) = cplx(double(state >> 11) / double(1ull << 53) - 0.5, 0.0);
        }
    double A = B;
    for (int k = 0; k < iters; k++) {
        Image Su = apply_S(u);
        Image t{frame->grid, c * u.v - Su.v};
        double nu = u.norm();
        A = (Su.v * u.v.conjugate()).sum().real() / (nu * nu);
        double nt = t.norm();
        if (nt == 0) break;
        u.v = t.v / nt;
    }
    return FrameBounds{A, B};
}

void save_coefficients(const std::string& path, const CoefficientSet& coeffs) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path);
    const FrameFamily& f = *coeffs.frame;
    auto put32 = [&](int32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); };
    put32(int32_t(f.kind));
    put32(f.grid.n);
    put32(int32_t(coeffs.fields.size()));
    put32(int32_t(coeffs.gtone.size() + coeffs.gdense.size()));
    for (size_t b = 0; b < coeffs.fields.size(); b++) {
        const SubbandMeta& m = f.bands[b].meta;
        put32(m.lowpass ? 1 : 0);
        put32(m.j);
        put32(m.l);
        put32(int32_t(m.cone));
        const int n = f.grid.n;
        for (int x1 = 0; x1 < n; x1++)
            for (int x2 = 0; x2 < n; x2++) {
                cplx v = coeffs.fields[b].at(x1, x2);
                os.write(reinterpret_cast<const char*>(&v), sizeof(cplx));
            }
    }
    for (size_t b = 0; b < coeffs.gtone.size(); b++) {
        put32(f.gbands[b].freq.x());
        put32(f.gbands[b].freq.y());
        cplx v = coeffs.gtone[b];
        os.write(reinterpret_cast<const char*>(&v), sizeof(cplx));
    }
}

}  // namespace gsep
