#include "gsep/grid.hpp"

namespace gsep {

Spectrum spectrum(const Image& img) {
    Spectrum out{img.grid, {}};
    fft::forward(img.v, out.s);
    return out;
}

Image inverse_spectrum(const Spectrum& spec) {
    Image out{spec.grid, {}};
    fft::inverse(spec.s, out.v);
    return out;
}

Image apply_mask(const StripMask& mask, const Image& img, MaskPart part) {
    if (!(mask.grid == img.grid)) throw std::invalid_argument("apply_mask: grid mismatch");
    const int n = img.grid.n;
    Image out = Image::zero(img.grid);
    for (int x1 = 0; x1 < n; x1++) {
        bool miss = mask.missing_row(x1);
        if ((part == MaskPart::missing) == miss) out.v.row(x1) = img.v.row(x1);
    }
    return out;
}

}  // namespace gsep
