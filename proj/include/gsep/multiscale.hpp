#pragma once
#include "gsep/frames.hpp"

#include <vector>

// Band-pass filter bank F_j (hat F_j = W_j, hat F_low = Theta). Filters are
// applied as pointwise spectral multiplication; the same windows are used for
// decomposition and reconstruction, so sum(W^2) = 1 makes the bank an exact
// two-sided inverse:  f = F_low*f_low + sum_j F_j*f_(j).

namespace gsep {

struct SubbandStack {
    std::shared_ptr<const FrameFamily> bank;  // wavelet bank (windows + lowpass)
    FrequencyGrid grid;
    int j_max = 0;
    Image low;
    std::vector<std::pair<int, Image>> bands;  // (j, f_(j))

    const Image& band(int j) const;
};

std::shared_ptr<const FrameFamily> multiscale_bank(FrequencyGrid grid, int j_max);

SubbandStack decompose(const Image& img, int j_max);
SubbandStack decompose(const Image& img, std::shared_ptr<const FrameFamily> bank);
Image reconstruct(const SubbandStack& stack);

// Directory dump: one raw image per band plus manifest.txt rows
// "j filename l2_norm" (low band written as j = -1).
void dump_stack(const std::string& dir, const SubbandStack& stack);

}  // namespace gsep
