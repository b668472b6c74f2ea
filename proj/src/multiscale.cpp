#include "gsep/multiscale.hpp"

#include "gsep/io.hpp"

#include <filesystem>
#include <sstream>

namespace gsep {

const Image& SubbandStack::band(int j) const {
    for (const auto& [jj, im] : bands)
        if (jj == j) return im;
    throw std::out_of_range("SubbandStack: no such band");
}

std::shared_ptr<const FrameFamily> multiscale_bank(FrequencyGrid grid, int j_max) {
    return std::make_shared<const FrameFamily>(build_wavelet_frame(grid, j_max));
}

SubbandStack decompose(const Image& img, int j_max) {
    return decompose(img, multiscale_bank(img.grid, j_max));
}

SubbandStack decompose(const Image& img, std::shared_ptr<const FrameFamily> bank) {
    if (!(bank->grid == img.grid)) throw std::invalid_argument("decompose: grid mismatch");
    SubbandStack st;
    st.bank = bank;
    st.grid = img.grid;
    st.j_max = bank->j_max;
    Spectrum spec = spectrum(img);
    for (const Subband& sb : bank->bands) {
        Field fld;
        fft::band_to_field(spec.s, sb.box, sb.profile, fld);
        Image im = Image::zero(img.grid);
        for (int x1 = 0; x1 < img.grid.n; x1++)
            for (int x2 = 0; x2 < img.grid.n; x2++) im.v(x1, x2) = fld.at(x1, x2);
        if (sb.meta.lowpass)
            st.low = std::move(im);
        else
            st.bands.emplace_back(sb.meta.j, std::move(im));
    }
    if (st.low.v.size() == 0) st.low = Image::zero(img.grid);
    return st;
}

Image reconstruct(const SubbandStack& st) {
    Spectrum acc = Spectrum::zero(st.grid);
    for (const Subband& sb : st.bank->bands) {
        const Image* im = nullptr;
        if (sb.meta.lowpass) {
            im = &st.low;
        } else {
            for (const auto& [j, band] : st.bands)
                if (j == sb.meta.j) im = &band;
            if (!im) continue;  // band dropped from the stack
        }
        if (!(im->grid == st.grid)) throw std::invalid_argument("reconstruct: grid mismatch");
        Field fld{im->v, false};
        fft::field_to_band_accum(fld, sb.box, sb.profile, acc.s);
    }
    return inverse_spectrum(acc);
}

void dump_stack(const std::string& dir, const SubbandStack& st) {
    std::filesystem::create_directories(dir);
    std::ostringstream manifest;
    auto put = [&](int j, const Image& im) {
        std::ostringstream name;
        name << "band_" << (j < 0 ? std::string("low") : std::to_string(j)) << ".gsep";
        write_raw(dir + "/" + name.str(), im);
        manifest << j << " " << name.str() << " " << im.norm() << "\n";
    };
    put(-1, st.low);
    for (const auto& [j, im] : st.bands) put(j, im);
    atomic_write_text(dir + "/manifest.txt", manifest.str());
}

}  // namespace gsep
