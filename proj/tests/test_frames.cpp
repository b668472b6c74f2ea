#include "doctest.h"
#include "gsep/frames.hpp"
#include "test_util.hpp"

using namespace gsep;

namespace {

std::shared_ptr<const FrameFamily> shared(FrameFamily f) {
    return std::make_shared<const FrameFamily>(std::move(f));
}

RArray squared_profile_sum(const FrameFamily& f) {
    RArray total = RArray::Zero(f.grid.n, f.grid.n);
    for (int b = 0; b < f.subband_count(); b++) {
        Image p = f.profile_image(b);
        total += p.v.real() * p.v.real();
    }
    return total;
}

}  // namespace

TEST_CASE("wavelet tiling certificate holds pointwise") {
    auto g = FrequencyGrid::make(64);
    auto f = build_wavelet_frame(g, win::j_max_for(64));
    RArray total = squared_profile_sum(f);
    CHECK((total - 1.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("non-adjacent corona windows have disjoint supports") {
    auto g = FrequencyGrid::make(64);
    auto f = build_wavelet_frame(g, 2, FrameOptions{true, false});  // plain W_j, no closure
    // profile images for scales 0 and 2 never overlap
    Image p0, p2;
    bool have0 = false, have2 = false;
    for (int b = 0; b < f.subband_count(); b++) {
        if (f.bands[b].meta.lowpass) continue;
        if (f.bands[b].meta.j == 0) p0 = f.profile_image(b), have0 = true;
        if (f.bands[b].meta.j == 2) p2 = f.profile_image(b), have2 = true;
    }
    REQUIRE(have0);
    REQUIRE(have2);
    CHECK((p0.v.real() * p2.v.real()).abs().maxCoeff() == 0.0);
}

TEST_CASE("shearlet tiling and orientation counts") {
    auto g = FrequencyGrid::make(64);
    auto f = build_shearlet_frame(g, win::j_max_for(64));
    RArray total = squared_profile_sum(f);
    CHECK((total - 1.0).abs().maxCoeff() < 1e-12);

    int per_cone_j1 = 0;
    for (const Subband& sb : f.bands)
        if (!sb.meta.lowpass && sb.meta.j == 1 && sb.meta.cone == Cone::vertical) per_cone_j1++;
    CHECK(per_cone_j1 == 5);  // 2*2^1 + 1
}

TEST_CASE("parseval round trip, wavelet and shearlet") {
    auto g = FrequencyGrid::make(64);
    Image f = test::random_image(g, 21);
    for (auto kind : {0, 1}) {
        auto fam = shared(kind == 0 ? build_wavelet_frame(g, 3) : build_shearlet_frame(g, 3));
        CoefficientSet c = analyze(fam, f);
        CHECK(std::abs(c.l2() - f.norm()) < 1e-10 * f.norm());
        Image back = synthesize(*fam, c);
        CHECK(test::rel_err(back, f) < 1e-10);
    }
}

TEST_CASE("analysis energy localizes to adjacent scales") {
    auto g = FrequencyGrid::make(64);
    auto fam = shared(build_wavelet_frame(g, 3));
    // band-limit a random image to scale 2 by analysis/synthesis of that scale only
    Image f = test::random_image(g, 33);
    auto slice = shared(fam->scale_slice(2, 2, false));
    Image f2 = synthesize(*slice, analyze(slice, f));
    CoefficientSet c = analyze(fam, f2);
    double inside = 0, outside = 0;
    for (size_t b = 0; b < c.fields.size(); b++) {
        const SubbandMeta& m = fam->bands[b].meta;
        double e = c.fields[b].a.abs2().sum();
        bool adjacent = !m.lowpass && std::abs(m.j - 2) <= 1;
        (adjacent ? inside : outside) += e;
    }
    CHECK(outside < 1e-10 * (inside + outside));
}

TEST_CASE("adjointness of analyze/synthesize") {
    auto g = FrequencyGrid::make(32);
    auto fam = shared(build_shearlet_frame(g, 2));
    Image f = test::random_image(g, 40);
    CoefficientSet c = analyze(fam, test::random_image(g, 41));
    // <Phi* f, c> == <f, Phi c>
    cplx lhs = analyze(fam, f).dot(c);
    Image sc = synthesize(*fam, c);
    cplx rhs = (f.v * sc.v.conjugate()).sum();
    CHECK(std::abs(lhs - rhs) < 1e-10 * (1.0 + std::abs(lhs)));
}

TEST_CASE("wavelet atom analysis peaks at its own translate") {
    auto g = FrequencyGrid::make(64);
    auto fam = shared(build_wavelet_frame(g, 3));
    int b2 = -1;
    for (int b = 0; b < fam->subband_count(); b++)
        if (!fam->bands[b].meta.lowpass && fam->bands[b].meta.j == 2) b2 = b;
    REQUIRE(b2 >= 0);
    Image kernel = fam->subband_kernel(b2);
    // place the atom at (20, 36): f(x) = kappa(x - p)
    Image f = Image::zero(g);
    for (int x1 = 0; x1 < 64; x1++)
        for (int x2 = 0; x2 < 64; x2++) f.v(x1, x2) = kernel.v((x1 - 20 + 64) % 64, (x2 - 36 + 64) % 64);
    CoefficientSet c = analyze(fam, f);
    int a1 = -1, a2 = -1;
    double best = -1;
    for (int x1 = 0; x1 < 64; x1++)
        for (int x2 = 0; x2 < 64; x2++)
            if (std::abs(c.fields[size_t(b2)].at(x1, x2)) > best) {
                best = std::abs(c.fields[size_t(b2)].at(x1, x2));
                a1 = x1;
                a2 = x2;
            }
    CHECK(a1 == 20);
    CHECK(a2 == 36);
}

TEST_CASE("gabor: band-limited parseval on a pure tone") {
    auto g = FrequencyGrid::make(32);
    auto fam = shared(build_gabor_frame(g, {Vector2i(5, 0)}));
    Image tone = Image::zero(g);
    for (int x1 = 0; x1 < 32; x1++)
        for (int x2 = 0; x2 < 32; x2++) {
            double ph = 2.0 * M_PI * 5.0 * x1 / 32.0;
            tone.v(x1, x2) = cplx(std::cos(ph), std::sin(ph));
        }
    CoefficientSet c = analyze(fam, tone);
    CHECK(std::abs(c.l2() - tone.norm()) < 1e-10 * tone.norm());
    Image back = synthesize(*fam, c);
    CHECK(test::rel_err(back, tone) < 1e-10);
}

TEST_CASE("gabor: dense fields agree with tone mode") {
    auto g = FrequencyGrid::make(16);
    auto fam = shared(build_gabor_frame(g, {Vector2i(3, 1), Vector2i(-2, 4)}));
    Image f = test::random_image(g, 55);
    CoefficientSet tone = analyze(fam, f);
    CoefficientSet dense = analyze_gabor_dense(fam, f);
    CHECK(std::abs(tone.l1() - dense.l1()) < 1e-10 * (1.0 + dense.l1()));
    CHECK(std::abs(tone.l2() - dense.l2()) < 1e-10 * (1.0 + dense.l2()));
    Image s1 = synthesize(*fam, tone);
    Image s2 = synthesize(*fam, dense);
    CHECK(test::rel_err(s1, s2) < 1e-10);
}

TEST_CASE("gabor dense analysis is rejected on large grids") {
    auto g = FrequencyGrid::make(128);
    auto fam = shared(build_gabor_frame(g, {Vector2i(5, 0)}));
    CHECK_THROWS_AS(analyze_gabor_dense(fam, Image::zero(g)), std::invalid_argument);
}

TEST_CASE("gabor bands must stay inside the inset lattice") {
    auto g = FrequencyGrid::make(32);
    CHECK_THROWS_AS(build_gabor_frame(g, {Vector2i(15, 0)}), std::invalid_argument);
    CHECK_NOTHROW(build_gabor_frame(g, {Vector2i(14, 0)}));
}

TEST_CASE("frame bounds: parseval, scaled, and DC-deficient families") {
    auto g = FrequencyGrid::make(32);
    auto fam = shared(build_wavelet_frame(g, 2));
    FrameBounds fb = frame_bounds_estimate(fam, 30);
    CHECK(std::abs(fb.A - 1.0) < 1e-6);
    CHECK(std::abs(fb.B - 1.0) < 1e-6);

    // scaling every atom by 2 scales the frame operator by 4
    FrameFamily scaled = *fam;
    for (Subband& sb : scaled.bands) sb.profile *= 2.0;
    FrameBounds fb2 = frame_bounds_estimate(shared(std::move(scaled)), 30);
    CHECK(std::abs(fb2.A - 4.0) < 1e-5);
    CHECK(std::abs(fb2.B - 4.0) < 1e-5);

    // without the lowpass block the DC direction is lost
    auto nolp = shared(build_wavelet_frame(g, 2, FrameOptions{false, true}));
    Image dc = Image::zero(g);
    dc.v.setConstant(cplx(1, 0));
    Image Sdc = synthesize(*nolp, analyze(nolp, dc));
    CHECK(Sdc.norm() / dc.norm() < 0.1);
    FrameBounds fb3 = frame_bounds_estimate(nolp, 40);
    CHECK(fb3.A < 0.1);
    CHECK(fb3.B <= 1.0 + 1e-9);
}

TEST_CASE("atom index ordering is total and deterministic") {
    AtomIndex a, b;
    a.kind = FrameKind::wavelet;
    a.j = 1;
    b.kind = FrameKind::wavelet;
    b.j = 2;
    CHECK(a < b);
    b.j = 1;
    b.pos = Vector2i(0, 1);
    CHECK(a < b);
    CHECK(!(b < a));
}
