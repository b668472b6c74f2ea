#pragma once
#include "gsep/fft.hpp"
#include "gsep/types.hpp"

#include <stdexcept>

// Discrete periodic image domain. Spatial lattice {0,..,n-1}^2 with unit
// spacing and period n, frequency lattice Z^2 in [-n/2, n/2)^2. x1 indexes
// rows of the sample array, x2 columns.

namespace gsep {

struct FrequencyGrid {
    int n = 0;

    static FrequencyGrid make(int n) {
        // n >= 8 admits the tiny solver-oracle instances; production grids are >= 16
        if (n < 8 || (n & (n - 1)) != 0)
            throw std::invalid_argument("grid side must be a power of two, >= 8");
        return FrequencyGrid{n};
    }
    // storage index <-> signed frequency
    int freq(int index) const { return index < n / 2 ? index : index - n; }
    int index(int xi) const { return xi >= 0 ? xi : xi + n; }
    bool operator==(const FrequencyGrid&) const = default;
};

struct Image {
    FrequencyGrid grid;
    CArray v;  // n x n, row = x1

    static Image zero(FrequencyGrid g) {
        Image im{g, CArray::Zero(g.n, g.n)};
        return im;
    }
    double norm() const { return std::sqrt(v.abs2().sum()); }
};

struct Spectrum {
    FrequencyGrid grid;
    Spectrum2 s;

    cplx at_freq(int xi1, int xi2) const { return s.at(grid.index(xi1), grid.index(xi2)); }
    cplx& at_freq(int xi1, int xi2) { return s.at(grid.index(xi1), grid.index(xi2)); }
    double norm() const { return std::sqrt(s.squaredNorm()); }

    static Spectrum zero(FrequencyGrid g) {
        Spectrum sp{g, {}};
        sp.s.n = g.n;
        sp.s.s = CArray::Zero(g.n, g.n);
        return sp;
    }
};

Spectrum spectrum(const Image& img);
Image inverse_spectrum(const Spectrum& spec);

// Horizontal strip of missing rows: {x : |x1 - center| <= h} with toroidal
// distance. h = 0 still removes the degenerate one-row strip.
struct StripMask {
    FrequencyGrid grid;
    double h = 0.0;
    int center = 0;

    static StripMask make(FrequencyGrid g, double h, int center = -1) {
        if (h < 0) throw std::invalid_argument("strip half-width must be >= 0");
        return StripMask{g, h, center < 0 ? g.n / 2 : center};
    }
    bool missing_row(int x1) const {
        int d = std::abs(x1 - center);
        d = std::min(d, grid.n - d);
        return double(d) <= h;
    }
};

enum class MaskPart { known, missing };

Image apply_mask(const StripMask& mask, const Image& img, MaskPart part);

inline double l2_error_rel(const Image& a, const Image& b) {
    double nb = b.norm();
    return nb == 0 ? (a.norm() == 0 ? 0.0 : std::numeric_limits<double>::infinity())
                   : std::sqrt((a.v - b.v).abs2().sum()) / nb;
}

}  // namespace gsep
