#pragma once
#include "gsep/types.hpp"

// DFT bridge. All transforms are unitary (1/n per 2-D pass each way), so
// ||spectrum(f)||_2 = ||f||_2 exactly up to round-off.
//
// Spectra are stored transposed (xi2-major) so that both passes of every
// 2-D transform run over contiguous memory with a single small transpose.
// Callers index spectra through Spectrum2 accessors and never see the layout.
//
// Band transforms exploit the compact frequency support of frame profiles:
// a subband whose box is narrow in one frequency axis costs
// (n + narrow_extent) 1-D transforms instead of 2n.

namespace gsep {

// Spectrum storage: s(xi2_index, xi1_index).
struct Spectrum2 {
    int n = 0;
    CArray s;  // n x n, row = xi2 index, col = xi1 index

    cplx at(int i1, int i2) const { return s(i2, i1); }
    cplx& at(int i1, int i2) { return s(i2, i1); }
    double squaredNorm() const { return s.abs2().sum(); }
};

// A subband coefficient field on the full spatial grid. `transposed` means
// the array holds f(x2, x1); pointwise consumers do not care, geometric
// consumers use at().
struct Field {
    CArray a;
    bool transposed = false;

    cplx at(int x1, int x2) const { return transposed ? a(x2, x1) : a(x1, x2); }
    cplx& at(int x1, int x2) { return transposed ? a(x2, x1) : a(x1, x2); }
};

namespace fft {

// img (x1-major) -> transposed spectrum, unitary.
void forward(const CArray& img, Spectrum2& out);
// transposed spectrum -> img (x1-major), unitary.
void inverse(const Spectrum2& spec, CArray& out);

// field = unitary IDFT of (spec .* prof) where prof is real, supported on box.
// Output field layout is chosen by the pruning direction.
void band_to_field(const Spectrum2& spec, const Box& box, const RArray& prof,
                   Field& out);

// spec += prof .* unitary DFT(field), restricted to box.
void field_to_band_accum(const Field& field, const Box& box, const RArray& prof,
                         Spectrum2& spec);

// Drops cached FFTW plans (leak checkers / long test binaries).
void clear_plan_cache();

}  // namespace fft
}  // namespace gsep
