#include "doctest.h"
#include "gsep/phantoms.hpp"
#include "test_util.hpp"

#include <filesystem>

using namespace gsep;

TEST_CASE("single point at center: real, symmetric, peaked") {
    auto g = FrequencyGrid::make(64);
    PointCloud pc;
    pc.positions = {Vector2i(32, 32)};
    Image p = gen_points(g, pc);
    CHECK(p.v.imag().abs().maxCoeff() < 1e-10 * p.norm());
    // peak at the singularity
    int a1 = -1, a2 = -1;
    double best = -1e300;
    for (int x1 = 0; x1 < 64; x1++)
        for (int x2 = 0; x2 < 64; x2++)
            if (p.v(x1, x2).real() > best) best = p.v(x1, x2).real(), a1 = x1, a2 = x2;
    CHECK(a1 == 32);
    CHECK(a2 == 32);
    // reflection symmetry about the center
    double asym = 0;
    for (int d1 = -10; d1 <= 10; d1++)
        for (int d2 = -10; d2 <= 10; d2++)
            asym = std::max(asym, std::abs(p.v(32 + d1, 32 + d2).real() -
                                           p.v(32 - d1, 32 - d2).real()));
    CHECK(asym < 1e-10 * best);
}

TEST_CASE("point spectrum is Hermitian") {
    auto g = FrequencyGrid::make(32);
    PointCloud pc;
    pc.positions = {Vector2i(7, 21), Vector2i(25, 9)};
    Spectrum sp = spectrum(gen_points(g, pc));
    double herm = 0;
    for (int x1 = -15; x1 <= 15; x1++)
        for (int x2 = -15; x2 <= 15; x2++)
            herm = std::max(herm, std::abs(sp.at_freq(x1, x2) - std::conj(sp.at_freq(-x1, -x2))));
    CHECK(herm < 1e-10);
}

TEST_CASE("point band energies grow at a steady geometric rate") {
    auto g = FrequencyGrid::make(256);
    PointCloud pc;
    pc.positions = {Vector2i(100, 140)};
    Image p = gen_points(g, pc);
    SubbandStack st = decompose(p, win::j_max_for(256));
    std::vector<double> slopes;
    for (int j = 1; j + 1 < win::j_max_for(256); j++)
        slopes.push_back(std::log2(st.band(j + 1).norm() / st.band(j).norm()));
    double mean = 0;
    for (double s : slopes) mean += s / double(slopes.size());
    for (double s : slopes) CHECK(std::abs(s - mean) < 0.3);
}

TEST_CASE("gen_points validation") {
    auto g = FrequencyGrid::make(32);
    PointCloud pc;
    CHECK_THROWS_AS(gen_points(g, pc), std::invalid_argument);
    pc.positions = {Vector2i(5, 5), Vector2i(5, 5)};
    CHECK_THROWS_AS(gen_points(g, pc), std::invalid_argument);
    pc.positions = {Vector2i(16, 5)};
    StripMask m = StripMask::make(g, 2.0);  // rows 14..18 missing
    CHECK_THROWS_AS(gen_points(g, pc, &m), std::invalid_argument);
    pc.positions = {Vector2i(3, 5)};
    CHECK_NOTHROW(gen_points(g, pc, &m));
}

TEST_CASE("line: spectrum constant along xi2, mass on the line column") {
    auto g = FrequencyGrid::make(64);
    LineSegment seg;
    seg.rho = 20;
    seg.weight = LineWeight::box;
    Image l = gen_line(g, seg);
    CHECK(l.v.imag().abs().maxCoeff() < 1e-10 * l.norm());
    Spectrum sp = spectrum(l);
    double var = 0;
    for (int i1 = 0; i1 < 64; i1++) {
        cplx first = sp.s.at(i1, 0);
        for (int i2 = 0; i2 < 64; i2++) var = std::max(var, std::abs(sp.s.at(i1, i2) - first));
    }
    CHECK(var < 1e-12 * l.norm());

    // nearly all l1 mass on the line column (full-band image)
    double on = 0, total = 0;
    for (int x1 = 0; x1 < 64; x1++)
        for (int x2 = 0; x2 < 64; x2++) {
            double a = std::abs(l.v(x1, x2));
            total += a;
            if (x2 <= 1 || x2 >= 63) on += a;
        }
    CHECK(on / total > 0.99);
}

TEST_CASE("line mass stays near the line after keeping scales <= 2") {
    auto g = FrequencyGrid::make(16);  // j_max(16) = 2: scales <= 2 is the full bank
    LineSegment seg;
    seg.rho = 5;
    seg.weight = LineWeight::box;
    Image l = gen_line(g, seg);
    SubbandStack st = decompose(l, 2);
    Image smooth = reconstruct(st);
    double near = 0, total = 0;
    for (int x1 = 0; x1 < 16; x1++)
        for (int x2 = 0; x2 < 16; x2++) {
            double a = std::abs(smooth.v(x1, x2));
            total += a;
            int d = std::min(x2, 16 - x2);
            if (d <= 2) near += a;
        }
    CHECK(near / total >= 0.95);
}

TEST_CASE("line band energy concentrates on the vertical cone, |l| <= 1") {
    auto g = FrequencyGrid::make(64);
    LineSegment seg;
    seg.rho = 22;
    Image l = gen_line(g, seg);
    SubbandStack st = decompose(l, 3);
    auto sh = std::make_shared<const FrameFamily>(build_shearlet_frame(g, 3));
    CoefficientSet c = analyze(sh, st.band(3));
    double in = 0, total = 0;
    for (size_t b = 0; b < c.fields.size(); b++) {
        const SubbandMeta& meta = sh->bands[b].meta;
        if (meta.lowpass || meta.j != 3) continue;
        double e = c.fields[b].a.abs2().sum();
        total += e;
        if (meta.cone == Cone::vertical && std::abs(meta.l) <= 1) in += e;
    }
    CHECK(in / total >= 0.90);
}

TEST_CASE("texture: single band is a modulated window with tight support") {
    auto g = FrequencyGrid::make(64);
    TextureSpec ts;
    ts.bands = {Vector2i(8, 0)};
    ts.coeffs = {cplx(1, 0)};
    Image t = gen_texture(g, ts);
    Spectrum sp = spectrum(t);
    for (int x1 = -32; x1 < 32; x1++)
        for (int x2 = -32; x2 < 32; x2++) {
            if (std::abs(x1 - 8) <= 1 && std::abs(x2) <= 1) continue;
            CHECK(std::abs(sp.at_freq(x1, x2)) < 1e-12);
        }
    SUBCASE("empty spec gives the zero image") {
        TextureSpec empty;
        CHECK(gen_texture(g, empty).norm() == 0.0);
    }
}

TEST_CASE("gabor analysis recovers texture coefficients") {
    auto g = FrequencyGrid::make(64);
    TextureSpec ts = make_texture_spec(g, 3, 0.25, 0.5, 1.0, 99);
    REQUIRE(ts.bands.size() >= 2);
    Image t = gen_texture(g, ts);
    auto fam = std::make_shared<const FrameFamily>(build_gabor_frame(g, ts.bands));
    CoefficientSet c = analyze(fam, t);
    for (size_t b = 0; b < ts.bands.size(); b++) {
        // locate the matching frame band
        for (size_t fb = 0; fb < fam->gbands.size(); fb++)
            if (fam->gbands[fb].freq == ts.bands[b])
                CHECK(std::abs(c.gtone[fb] - ts.coeffs[b]) < 1e-8 * std::abs(ts.coeffs[b]));
    }
}

TEST_CASE("texture sparsity audit respects the growth budget") {
    auto g = FrequencyGrid::make(256);
    TextureSpec ts = make_texture_spec(g, 4, 0.25, 0.5, 1.0, 7);
    SparsityAudit audit = texture_sparsity_audit(g, ts, 4);
    CHECK(audit.plain_ok);
    for (size_t j = 0; j < audit.count_per_j.size(); j++)
        CHECK(double(audit.count_per_j[j]) <= audit.budget_per_j[j]);
}

TEST_CASE("degrade: exactness, determinism, strip geometry") {
    auto g = FrequencyGrid::make(32);
    Image f = test::random_image(g, 5);
    StripMask m = StripMask::make(g, 3.0);

    Degraded d0 = degrade(f, m, 0.0, 1);
    CHECK(test::rel_err(d0.observed, apply_mask(m, f, MaskPart::known)) == 0.0);
    CHECK(d0.noise.norm() == 0.0);

    Degraded a = degrade(f, m, 0.1, 42);
    Degraded b = degrade(f, m, 0.1, 42);
    CHECK((a.observed.v - b.observed.v).abs().maxCoeff() == 0.0);  // bit identical
    Degraded c = degrade(f, m, 0.1, 43);
    CHECK((a.observed.v - c.observed.v).abs().maxCoeff() > 0.0);

    // noise lives on the known rows only and has the requested size
    for (int x1 = 0; x1 < 32; x1++)
        if (m.missing_row(x1)) CHECK(a.noise.v.row(x1).abs().maxCoeff() == 0.0);
    CHECK(std::abs(a.noise.norm() - 0.1 * d0.observed.norm()) < 1e-12);
}

TEST_CASE("band energy normalization equalizes the three components") {
    auto g = FrequencyGrid::make(64);
    PointCloud pc;
    pc.positions = {Vector2i(10, 40)};
    LineSegment seg;
    seg.rho = 20;
    TextureSpec ts = make_texture_spec(g, 3, 0.25, 0.5, 1.0, 11);
    SubbandStack sp = decompose(gen_points(g, pc), 3);
    SubbandStack sl = decompose(gen_line(g, seg), 3);
    SubbandStack st = decompose(gen_texture(g, ts), 3);
    BandNormalization bn = normalize_band_energies(sp, sl, st);
    for (size_t b = 0; b < sp.bands.size(); b++) {
        int j = sp.bands[b].first;
        double np = sp.band(j).norm(), nl = sl.band(j).norm(), nt = st.band(j).norm();
        if (np == 0 || nl == 0 || nt == 0) continue;  // skipped bands
        CHECK(std::abs(np - nl) < 1e-12 * np);
        CHECK(std::abs(np - nt) < 1e-12 * np);
    }
    // equal inputs stay unchanged
    SubbandStack c1 = sp, c2 = sp, c3 = sp;
    BandNormalization bn2 = normalize_band_energies(c1, c2, c3);
    for (double s : bn2.scale_p) CHECK(s == 1.0);
    (void)bn;
}

TEST_CASE("phantom spec files round trip") {
    auto g = FrequencyGrid::make(32);
    TextureSpec ts = make_texture_spec(g, 2, 0.25, 1.0, 1.0, 3);
    write_phantom_spec("test_phantom.cfg", ts);
    PhantomSpec back = read_phantom_spec("test_phantom.cfg");
    REQUIRE(std::holds_alternative<TextureSpec>(back));
    Image t1 = gen_texture(g, ts);
    Image t2 = gen_phantom(g, back);
    CHECK(test::rel_err(t2, t1) < 1e-12);
    std::filesystem::remove("test_phantom.cfg");
}
