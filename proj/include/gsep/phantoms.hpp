#pragma once
#include "gsep/frames.hpp"
#include "gsep/multiscale.hpp"

#include <random>
#include <string>
#include <variant>
#include <vector>

// Synthetic components: point singularities, a line distribution crossing the
// missing strip, and band-sparse texture. Everything is generated in the
// frequency domain and is bit-reproducible from (spec, seed).
//
// Geometry: the line occupies {x2 = 0}, running along x1 and centered at
// x1 = n/2, so it crosses the missing strip {|x1 - n/2| <= h} transversally.

namespace gsep {

struct PointCloud {
    std::vector<Vector2i> positions;  // pixel coordinates, distinct
    double spectral_exponent = -0.5;  // |xi|^s amplitude; -1/2 matches |x|^(-3/2)
};

enum class LineWeight { box, cos2, smooth };

struct LineSegment {
    double rho = 0;  // half-length in pixels, < n/2
    LineWeight weight = LineWeight::smooth;
};

struct TextureSpec {
    std::vector<Vector2i> bands;  // I_T
    std::vector<cplx> coeffs;     // d_n, |d_n| <= d_max
    double d_max = 1.0;
    double epsilon = 0.25;
};

Image gen_points(FrequencyGrid grid, const PointCloud& cloud,
                 const StripMask* forbidden = nullptr);
Image gen_line(FrequencyGrid grid, const LineSegment& seg);
Image gen_texture(FrequencyGrid grid, const TextureSpec& spec);

// Samples I_T per corona plateau with |I_T cap A_j| <= budget_scale * 2^((1-eps)j),
// coefficients uniform on the complex unit disk clipped to d_max.
TextureSpec make_texture_spec(FrequencyGrid grid, int j_max, double eps, double budget_scale,
                              double d_max, uint64_t seed);

struct SparsityAudit {
    std::vector<int> count_per_j;           // |I_T cap A_j|
    std::vector<int> count_expanded_per_j;  // |I_T^pm cap A_j|
    std::vector<double> budget_per_j;       // 2^((1-eps)j)
    bool plain_ok = true;     // counts within budget
    bool expanded_ok = true;  // expanded counts within budget (often violated at
                              // coarse scales; informational)
};
SparsityAudit texture_sparsity_audit(FrequencyGrid grid, const TextureSpec& spec, int j_max);

struct Degraded {
    Image observed;  // P_K img + eta
    Image noise;     // eta (supported on the known part)
};
Degraded degrade(const Image& img, const StripMask& mask, double noise_level, uint64_t seed);

struct BandNormalization {
    std::vector<double> scale_p, scale_l, scale_t;  // per band j = 0..j_max
    std::vector<int> skipped;                        // zero-energy bands
};
// Rescales each component's band to the max of the three norms, in place.
BandNormalization normalize_band_energies(SubbandStack& p, SubbandStack& l, SubbandStack& t);

// Flat key-value phantom spec files (keys: kind, K, positions, exponent, rho,
// w_profile, epsilon, bands, coeffs, seed, d_max).
using PhantomSpec = std::variant<PointCloud, LineSegment, TextureSpec>;
PhantomSpec read_phantom_spec(const std::string& path);
void write_phantom_spec(const std::string& path, const PhantomSpec& spec);
Image gen_phantom(FrequencyGrid grid, const PhantomSpec& spec);

}  // namespace gsep
