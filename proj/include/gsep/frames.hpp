#pragma once
#include "gsep/grid.hpp"
#include "gsep/windows.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

// Frequency-domain frame families on the periodic grid.
//
// Wavelet / shearlet / lowpass subbands are fully redundant: every subband
// profile P_b is translated over the whole spatial grid, so analysis is
//   c_b = uIDFT(f_hat .* P_b)
// and the discrete tight-frame certificate is the pointwise tiling
//   sum_b P_b(xi)^2 = 1.
// Profiles are renormalized by 1/sqrt(total) after construction so the
// tiling holds exactly on the grid despite periodization and cone seams.
//
// The Gabor family lives on the half-pixel modulation lattice (2n)^2 per
// active band n in Z^2; the window evaluated at integer frequency offsets
// collapses to a single tap, which makes each band's coefficient field a
// rank-one phase pattern ("tone mode"). Dense per-band fields are kept only
// for small grids.

namespace gsep {

enum class FrameKind { wavelet, shearlet, gabor, custom };
enum class Cone { none, horizontal, vertical };

struct SubbandMeta {
    bool lowpass = false;
    int j = -1;
    Cone cone = Cone::none;
    int l = 0;
};

struct Subband {
    SubbandMeta meta;
    Box box;
    RArray profile;  // real, >= 0
};

struct GaborBand {
    Vector2i freq;  // signed band frequency
    double tap = 1.0;  // window value at the center offset (1 for cos window)
};

// Tagged atom address. Ordering is lexicographic on
// (kind, lowpass, j, cone, l, band, position).
struct AtomIndex {
    FrameKind kind = FrameKind::custom;
    bool lowpass = false;
    int j = 0;
    Cone cone = Cone::none;
    int l = 0;
    Vector2i band{0, 0};  // gabor
    Vector2i pos{0, 0};   // pixel (w/s) or half-pixel index (gabor)

    friend bool operator<(const AtomIndex& a, const AtomIndex& b) {
        auto key = [](const AtomIndex& x) {
            return std::make_tuple(int(x.kind), x.lowpass, x.j, int(x.cone), x.l, x.band.x(),
                                   x.band.y(), x.pos.x(), x.pos.y());
        };
        return key(a) < key(b);
    }
    friend bool operator==(const AtomIndex& a, const AtomIndex& b) {
        return !(a < b) && !(b < a);
    }
};

struct FrameOptions {
    bool lowpass = true;
    bool close_top = true;  // finest scale absorbs the remainder to Nyquist
};

class FrameFamily {
public:
    FrameKind kind = FrameKind::custom;
    FrequencyGrid grid;
    int j_max = 0;
    bool has_lowpass = false;
    bool top_closed = false;
    // renormalized builders certify B <= 1 (slices of Parseval frames too)
    bool certified_parseval = false;
    std::vector<Subband> bands;      // wavelet/shearlet/custom
    std::vector<GaborBand> gbands;   // gabor

    int subband_count() const { return int(bands.size()); }
    int gabor_band_count() const { return int(gbands.size()); }

    // Spatial kernel of subband b: kappa_b = (1/n) uIDFT(P_b); atom (b,k) is
    // kappa_b translated to k.
    Image subband_kernel(int b) const;
    Image profile_image(int b) const;  // P_b as a full-grid real image

    // Subbands whose scale lies in [jlo, jhi] (lowpass kept iff keep_lowpass).
    FrameFamily scale_slice(int jlo, int jhi, bool keep_lowpass) const;
};

FrameFamily build_wavelet_frame(FrequencyGrid grid, int j_max, FrameOptions opts = {});
FrameFamily build_shearlet_frame(FrequencyGrid grid, int j_max, FrameOptions opts = {});
FrameFamily build_gabor_frame(FrequencyGrid grid, const std::vector<Vector2i>& active_bands);
// Test/bench hook: explicit profiles, no renormalization.
FrameFamily build_custom_frame(FrequencyGrid grid, std::vector<Subband> bands);

// l1 weight of a subband: the atom l2 norm up to the common 1/n factor.
// Weighting coefficients by this restores the decimated-lattice normalization
// (2^2j for corona scales, 2^(3j/2) for shearlet wedges) on the fully
// redundant grid; the plain Gabor tap plays the same role there.
inline double subband_weight(const Subband& sb) { return std::sqrt(sb.profile.square().sum()); }

// Atoms scaled by their subband weights: a tight-frame family becomes a
// general frame whose operator is the Fourier multiplier sum_b w_b^2 P_b^2.
FrameFamily make_weighted_family(const FrameFamily& f);
// Canonical synthesis pseudo-dual of a weighted family: profiles divided by
// the multiplier on its support.
FrameFamily make_dual_family(const FrameFamily& weighted);
// Extremes of the frame multiplier over the family's spectral support.
std::pair<double, double> frame_multiplier_range(const FrameFamily& f);

struct CoefficientSet {
    std::shared_ptr<const FrameFamily> frame;
    std::vector<Field> fields;   // per subband, full grid
    std::vector<cplx> gtone;     // per gabor band: f_hat(band) * tap
    std::vector<CArray> gdense;  // per gabor band: (2n)^2 field (small grids)
    bool gabor_dense = false;

    double l1() const;
    double l2() const;
    cplx dot(const CoefficientSet& other) const;  // <this, other>
    cplx at(const AtomIndex& idx) const;
};

CoefficientSet analyze(const std::shared_ptr<const FrameFamily>& frame, const Image& img);
// Dense Gabor coefficient fields; permitted only for n <= 64.
CoefficientSet analyze_gabor_dense(const std::shared_ptr<const FrameFamily>& frame,
                                   const Image& img);
Image synthesize(const FrameFamily& frame, const CoefficientSet& coeffs);

struct FrameBounds {
    double A = 0, B = 0;
};
FrameBounds frame_bounds_estimate(const std::shared_ptr<const FrameFamily>& frame, int iters);

// Per-subband binary serialization {kind, j, l, cone, grid n} + field data.
void save_coefficients(const std::string& path, const CoefficientSet& coeffs);

}  // namespace gsep
