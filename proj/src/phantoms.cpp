#include "gsep/phantoms.hpp"

#include "gsep/config.hpp"
#include "gsep/io.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace gsep {

Image gen_points(FrequencyGrid grid, const PointCloud& cloud, const StripMask* forbidden) {
    if (cloud.positions.empty()) throw std::invalid_argument("gen_points: empty cloud");
    std::set<std::pair<int, int>> seen;
    for (const Vector2i& p : cloud.positions) {
        if (!seen.insert({p.x(), p.y()}).second)
            throw std::invalid_argument("gen_points: duplicate position");
        if (forbidden && forbidden->missing_row(p.x()))
            throw std::invalid_argument("gen_points: position in missing strip");
    }
    Spectrum sp = Spectrum::zero(grid);
    const int n = grid.n;
    for (int i1 = 0; i1 < n; i1++)
        for (int i2 = 0; i2 < n; i2++) {
            int x1 = grid.freq(i1), x2 = grid.freq(i2);
            if (x1 == 0 && x2 == 0) continue;  // DC of a distribution is undefined
            double amp = std::pow(std::sqrt(double(x1) * x1 + double(x2) * x2),
                                  cloud.spectral_exponent);
            cplx acc = 0;
            for (const Vector2i& p : cloud.positions) {
                double ph = -2.0 * M_PI * (double(x1) * p.x() + double(x2) * p.y()) / n;
                acc += cplx(std::cos(ph), std::sin(ph));
            }
            sp.s.at(i1, i2) = amp * acc;
        }
    return inverse_spectrum(sp);
}

namespace {

double line_weight(LineWeight w, double t, double rho) {
    double a = std::abs(t);
    if (a > rho) return 0.0;
    switch (w) {
        case LineWeight::box:
            return 1.0;
        case LineWeight::cos2: {
            double c = std::cos(M_PI * t / (2.0 * rho));
            return c * c;
        }
        case LineWeight::smooth: {
            double flat = 0.7 * rho;
            if (a <= flat) return 1.0;
            return std::cos(M_PI / 2.0 * win::meyer_nu((a - flat) / (0.3 * rho)));
        }
    }
    return 0.0;
}

}  // namespace

Image gen_line(FrequencyGrid grid, const LineSegment& seg) {
    const int n = grid.n;
    if (!(seg.rho > 0) || seg.rho >= n / 2.0)
        throw std::invalid_argument("gen_line: need 0 < rho < n/2");
    // 1-D quadrature of w over [-rho, rho], trapezoid at 1/8 px spacing,
    // segment center shifted to x1 = n/2
    const double dt = 1.0 / 8.0;
    const int steps = std::max(8, int(std::ceil(2.0 * seg.rho / dt)));
    Spectrum sp = Spectrum::zero(grid);
    for (int i1 = 0; i1 < n; i1++) {
        int xi1 = grid.freq(i1);
        if (xi1 == 0) continue;  // DC removed
        cplx acc = 0;
        for (int s = 0; s <= steps; s++) {
            double t = -seg.rho + 2.0 * seg.rho * s / steps;
            double wgt = (s == 0 || s == steps) ? 0.5 : 1.0;
            double ph = -2.0 * M_PI * xi1 * (t + n / 2.0) / n;
            acc += wgt * line_weight(seg.weight, t, seg.rho) * cplx(std::cos(ph), std::sin(ph));
        }
        acc *= (2.0 * seg.rho / steps) / n;  // unitary spectrum of the line measure
        for (int i2 = 0; i2 < n; i2++) sp.s.at(i1, i2) = acc;
    }
    return inverse_spectrum(sp);
}

Image gen_texture(FrequencyGrid grid, const TextureSpec& spec) {
    if (spec.bands.size() != spec.coeffs.size())
        throw std::invalid_argument("gen_texture: bands/coeffs size mismatch");
    Spectrum sp = Spectrum::zero(grid);
    const int half = grid.n / 2;
    for (size_t i = 0; i < spec.bands.size(); i++) {
        const Vector2i& b = spec.bands[i];
        if (b.x() < -half + 1 || b.x() > half - 2 || b.y() < -half + 1 || b.y() > half - 2)
            throw std::invalid_argument("gen_texture: band outside lattice");
        for (int o1 = -1; o1 <= 1; o1++)
            for (int o2 = -1; o2 <= 1; o2++) {
                double g = win::gabor_g(double(o1), double(o2));
                if (g == 0.0) continue;
                sp.at_freq(b.x() + o1, b.y() + o2) += spec.coeffs[i] * g;
            }
    }
    return inverse_spectrum(sp);
}

TextureSpec make_texture_spec(FrequencyGrid grid, int j_max, double eps, double budget_scale,
                              double d_max, uint64_t seed) {
    TextureSpec spec;
    spec.epsilon = eps;
    spec.d_max = d_max;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::set<std::pair<int, int>> used;
    for (int j = 1; j <= j_max; j++) {
        double budget = budget_scale * std::pow(2.0, (1.0 - eps) * j);
        int want = std::max(j >= 2 ? 1 : 0, int(std::floor(budget)));
        // sample in the corona plateau so W_j(band) = 1
        double lo = std::ldexp(1.0, 2 * j - 3);
        double hi = std::ldexp(1.0, 2 * j - 2);
        int tries = 0, placed = 0;
        while (placed < want && tries < 2000) {
            tries++;
            double r = lo + (hi - lo) * unit(rng);
            double a = 2.0 * M_PI * unit(rng);
            Vector2i band(int(std::lround(r * std::cos(a))), int(std::lround(r * std::sin(a))));
            if (band.x() == 0 && band.y() == 0) continue;
            if (std::abs(band.x()) > grid.n / 2 - 2 || std::abs(band.y()) > grid.n / 2 - 2)
                continue;
            if (win::w_j(j, band.x(), band.y()) < 1.0) continue;
            if (!used.insert({band.x(), band.y()}).second) continue;
            double mag = d_max * std::sqrt(unit(rng));
            double ph = 2.0 * M_PI * unit(rng);
            spec.bands.push_back(band);
            spec.coeffs.push_back(mag * cplx(std::cos(ph), std::sin(ph)));
            placed++;
        }
    }
    return spec;
}

SparsityAudit texture_sparsity_audit(FrequencyGrid grid, const TextureSpec& spec, int j_max) {
    SparsityAudit audit;
    for (int j = 0; j <= j_max; j++) {
        int cnt = 0, cnt_exp = 0;
        std::set<std::pair<int, int>> expanded;
        for (const Vector2i& b : spec.bands) {
            if (win::w_j(j, b.x(), b.y()) > 0) cnt++;
            for (int o1 = -1; o1 <= 1; o1++)
                for (int o2 = -1; o2 <= 1; o2++) expanded.insert({b.x() + o1, b.y() + o2});
        }
        for (const auto& [b1, b2] : expanded)
            if (win::w_j(j, double(b1), double(b2)) > 0) cnt_exp++;
        double budget = std::pow(2.0, (1.0 - spec.epsilon) * j);
        audit.count_per_j.push_back(cnt);
        audit.count_expanded_per_j.push_back(cnt_exp);
        audit.budget_per_j.push_back(budget);
        if (cnt > budget) audit.plain_ok = false;
        if (cnt_exp > budget) audit.expanded_ok = false;
    }
    return audit;
}

Degraded degrade(const Image& img, const StripMask& mask, double noise_level, uint64_t seed) {
    if (noise_level < 0) throw std::invalid_argument("degrade: noise_level >= 0");
    Degraded out;
    out.observed = apply_mask(mask, img, MaskPart::known);
    out.noise = Image::zero(img.grid);
    if (noise_level > 0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> nd(0.0, 1.0);
        for (int x1 = 0; x1 < img.grid.n; x1++) {
            if (mask.missing_row(x1)) continue;
            for (int x2 = 0; x2 < img.grid.n; x2++)
                out.noise.v(x1, x2) = cplx(nd(rng), nd(rng));
        }
        double nn = out.noise.norm();
        if (nn > 0) out.noise.v *= noise_level * out.observed.norm() / nn;
        out.observed.v += out.noise.v;
    }
    return out;
}

BandNormalization normalize_band_energies(SubbandStack& p, SubbandStack& l, SubbandStack& t) {
    if (p.bands.size() != l.bands.size() || p.bands.size() != t.bands.size())
        throw std::invalid_argument("normalize_band_energies: stacks not aligned");
    BandNormalization out;
    for (size_t b = 0; b < p.bands.size(); b++) {
        Image* ims[3] = {&p.bands[b].second, &l.bands[b].second, &t.bands[b].second};
        double norms[3], target = 0;
        for (int k = 0; k < 3; k++) {
            norms[k] = ims[k]->norm();
            target = std::max(target, norms[k]);
        }
        double scl[3] = {1, 1, 1};
        for (int k = 0; k < 3; k++) {
            if (norms[k] == 0 || target == 0) {
                out.skipped.push_back(p.bands[b].first);
            } else {
                scl[k] = target / norms[k];
                ims[k]->v *= scl[k];
            }
        }
        out.scale_p.push_back(scl[0]);
        out.scale_l.push_back(scl[1]);
        out.scale_t.push_back(scl[2]);
    }
    return out;
}

PhantomSpec read_phantom_spec(const std::string& path) {
    Config cfg = Config::load(path);
    std::string kind = cfg.get_string("kind");
    if (kind == "points") {
        PointCloud pc;
        pc.spectral_exponent = cfg.get_double("exponent", -0.5);
        for (const auto& xy : cfg.get_int_pairs("positions"))
            pc.positions.push_back(Vector2i(xy.first, xy.second));
        return pc;
    }
    if (kind == "line") {
        LineSegment seg;
        seg.rho = cfg.get_double("rho");
        std::string w = cfg.get_string("w_profile", "smooth");
        seg.weight = w == "box"    ? LineWeight::box
                     : w == "cos2" ? LineWeight::cos2
                                   : LineWeight::smooth;
        return seg;
    }
    if (kind == "texture") {
        TextureSpec ts;
        ts.epsilon = cfg.get_double("epsilon", 0.25);
        ts.d_max = cfg.get_double("d_max", 1.0);
        for (const auto& xy : cfg.get_int_pairs("bands"))
            ts.bands.push_back(Vector2i(xy.first, xy.second));
        for (const auto& c : cfg.get_double_pairs("coeffs"))
            ts.coeffs.push_back(cplx(c.first, c.second));
        return ts;
    }
    throw std::invalid_argument("unknown phantom kind: " + kind);
}

void write_phantom_spec(const std::string& path, const PhantomSpec& spec) {
    std::ostringstream os;
    os.precision(17);
    if (std::holds_alternative<PointCloud>(spec)) {
        const auto& pc = std::get<PointCloud>(spec);
        os << "kind = points\n"
           << "K = " << pc.positions.size() << "\n"
           << "exponent = " << pc.spectral_exponent << "\npositions = ";
        for (size_t i = 0; i < pc.positions.size(); i++)
            os << (i ? "; " : "") << pc.positions[i].x() << "," << pc.positions[i].y();
        os << "\n";
    } else if (std::holds_alternative<LineSegment>(spec)) {
        const auto& seg = std::get<LineSegment>(spec);
        os << "kind = line\nrho = " << seg.rho << "\nw_profile = "
           << (seg.weight == LineWeight::box    ? "box"
               : seg.weight == LineWeight::cos2 ? "cos2"
                                                : "smooth")
           << "\n";
    } else {
        const auto& ts = std::get<TextureSpec>(spec);
        os << "kind = texture\nepsilon = " << ts.epsilon << "\nd_max = " << ts.d_max
           << "\nbands = ";
        for (size_t i = 0; i < ts.bands.size(); i++)
            os << (i ? "; " : "") << ts.bands[i].x() << "," << ts.bands[i].y();
        os << "\ncoeffs = ";
        for (size_t i = 0; i < ts.coeffs.size(); i++)
            os << (i ? "; " : "") << ts.coeffs[i].real() << "," << ts.coeffs[i].imag();
        os << "\n";
    }
    atomic_write_text(path, os.str());
}

Image gen_phantom(FrequencyGrid grid, const PhantomSpec& spec) {
    if (std::holds_alternative<PointCloud>(spec))
        return gen_points(grid, std::get<PointCloud>(spec));
    if (std::holds_alternative<LineSegment>(spec))
        return gen_line(grid, std::get<LineSegment>(spec));
    return gen_texture(grid, std::get<TextureSpec>(spec));
}

}  // namespace gsep
