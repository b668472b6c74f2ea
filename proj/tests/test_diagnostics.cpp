#include "doctest.h"
#include "gsep/diagnostics.hpp"
#include "gsep/phantoms.hpp"
#include "test_util.hpp"
#include <set>

using namespace gsep;

namespace {
std::shared_ptr<const FrameFamily> shared(FrameFamily f) {
    return std::make_shared<const FrameFamily>(std::move(f));
}
}  // namespace

TEST_CASE("disc lattice counts match brute force") {
    CHECK(disc_lattice_count(1.0) == 5);                  // {0, +-e1, +-e2}
    CHECK(disc_lattice_count(std::pow(2.0, 0.25 * 8)) == 49);  // radius 4
    CHECK(disc_lattice_count(std::pow(2.0, 0.2)) == 5);   // M_j at eps=.24, j=5
    // brute force cross-check
    for (double r : {0.5, 1.5, 2.2, 3.7}) {
        long brute = 0;
        for (int a = -10; a <= 10; a++)
            for (int b = -10; b <= 10; b++)
                if (a * a + b * b <= r * r) brute++;
        CHECK(disc_lattice_count(r) == brute);
    }
}

TEST_CASE("torus ball count matches brute force") {
    int two_n = 16;
    for (double r : {0.0, 1.4, 3.3, 7.9, 11.0}) {
        long brute = 0;
        for (int m1 = 0; m1 < two_n; m1++)
            for (int m2 = 0; m2 < two_n; m2++) {
                int t1 = std::min(m1, two_n - m1), t2 = std::min(m2, two_n - m2);
                if (t1 * t1 + t2 * t2 <= r * r) brute++;
            }
        CHECK(torus_ball_count(two_n, r) == brute);
    }
}

TEST_CASE("wavelet cluster grows with eps and rejects empty clouds") {
    auto g = FrequencyGrid::make(64);
    auto fam = shared(build_wavelet_frame(g, 3));
    CHECK_THROWS_AS(cluster_wavelet(fam, 2, 0.25, {}), std::invalid_argument);
    std::vector<Vector2i> pts = {Vector2i(32, 32)};
    ClusterSet small = cluster_wavelet(fam, 2, 0.20, pts);
    ClusterSet large = cluster_wavelet(fam, 2, 0.30, pts);
    CHECK(large.member_count() >= small.member_count());
    CHECK(small.member_count() > 0);
}

TEST_CASE("shearlet cluster: vertical cone band around the line") {
    auto g = FrequencyGrid::make(64);
    auto fam = shared(build_shearlet_frame(g, 3));
    ClusterSet cs = cluster_shearlet(fam, 2, 0.25, 0);
    int active_v = 0;
    for (int b = 0; b < fam->subband_count(); b++) {
        const SubbandMeta& m = fam->bands[size_t(b)].meta;
        bool act = cs.subband_active(m);
        if (m.cone == Cone::horizontal) CHECK(!act);  // never members
        if (act) {
            CHECK(m.cone == Cone::vertical);
            CHECK(std::abs(m.l) <= 1);
            CHECK(std::abs(m.j - 2) <= 1);
            active_v++;
            // column band of the documented half-width, same for every shear
            RArray ind = cs.indicator(b);
            double hw = 64.0 * std::pow(2.0, (0.25 - 2.0) * m.j);
            for (int x2 = 0; x2 < 64; x2++) {
                double d = std::min(x2, 64 - x2);
                CHECK((ind(0, x2) != 0.0) == (d <= hw));
            }
        }
    }
    CHECK(active_v == 9);  // 3 shears x 3 scales
}

TEST_CASE("shearlet cluster count scales like 2^((eps-2) j)") {
    auto g = FrequencyGrid::make(256);
    auto fam = shared(build_shearlet_frame(g, 4));
    double eps = 0.25;
    std::vector<double> counts;
    for (int j = 1; j <= 3; j++) {
        // count the scale-j slice only, one shear, to isolate the width scaling
        ClusterSet cs = cluster_shearlet(fam, j, eps, 0);
        double hw = cs.halfwidth_px.at(j);
        counts.push_back(256.0 * (2.0 * std::floor(hw) + 1.0));
    }
    for (size_t i = 0; i + 1 < counts.size(); i++) {
        double slope = std::log2(counts[i + 1] / counts[i]);
        CHECK(std::abs(slope - (eps - 2.0)) < 0.3);
    }
}

TEST_CASE("gabor cluster: bands, ball, emptiness") {
    auto g = FrequencyGrid::make(64);
    TextureSpec ts = make_texture_spec(g, 3, 0.25, 0.5, 1.0, 21);
    REQUIRE(!ts.bands.empty());
    std::set<std::pair<int, int>> expanded;
    for (const Vector2i& b : ts.bands)
        for (int o1 = -1; o1 <= 1; o1++)
            for (int o2 = -1; o2 <= 1; o2++) expanded.insert({b.x() + o1, b.y() + o2});
    std::vector<Vector2i> active(expanded.size() ? 0 : 0);
    for (const auto& [a, b] : expanded)
        if (std::abs(a) <= 30 && std::abs(b) <= 30) active.push_back(Vector2i(a, b));
    auto fam = shared(build_gabor_frame(g, active));

    ClusterSet c3 = cluster_gabor(fam, 3, 0.25, ts.bands);
    CHECK(!c3.bands.empty());
    // every cluster band lies in I_T^pm and in supp W_3
    for (const Vector2i& b : c3.bands) {
        CHECK(expanded.count({b.x(), b.y()}) == 1);
        CHECK(win::w_j(3, b.x(), b.y()) > 0);
    }
    CHECK(c3.ball_radius == doctest::Approx(64.0 * std::pow(2.0, 0.25 * 3 / 6.0)));
    // member bound: |ball| * |bands|
    CHECK(c3.member_count() ==
          size_t(torus_ball_count(128, c3.ball_radius)) * c3.bands.size());

    // no texture content at a scale -> empty cluster
    ClusterSet c0 = cluster_gabor(fam, 0, 0.25, ts.bands);
    CHECK(c0.bands.empty());
    CHECK(cluster_sum_image(c0).norm() == 0.0);
}

TEST_CASE("relative sparsity: full and empty clusters") {
    auto g = FrequencyGrid::make(32);
    // frame sliced to scales 1..3 so a full-radius cluster covers every index
    auto fam = shared(build_wavelet_frame(g, 2, FrameOptions{false, true}).scale_slice(1, 2, false));
    Image f = test::random_image(g, 31);
    CoefficientSet c = analyze(fam, f);
    // eps chosen so the disc radius exceeds the grid at every scale
    ClusterSet full = cluster_wavelet(fam, 1, 2.1, {Vector2i(16, 16)});
    full.radius_px[1] = 100;
    full.radius_px[2] = 100;
    CHECK(relative_sparsity(c, full) < 1e-12 * c.l1());
    CHECK(cluster_l1(c, full) == doctest::Approx(c.l1()));

    auto gab = shared(build_gabor_frame(g, {Vector2i(5, 2), Vector2i(-3, 7)}));
    CoefficientSet cg = analyze(gab, f);
    ClusterSet empty = cluster_gabor(gab, 2, 0.25, {});
    CHECK(relative_sparsity(cg, empty) == doctest::Approx(cg.l1()));
    CHECK(cluster_l1(cg, empty) == 0.0);
}

TEST_CASE("coherence of the delta frame with itself is 1") {
    auto g = FrequencyGrid::make(16);
    std::vector<Subband> bands(1);
    bands[0].meta.j = 0;
    bands[0].box = Box{0, 16, 0, 16};
    bands[0].profile = RArray::Ones(16, 16);  // atoms are unit deltas
    auto fam = shared(build_custom_frame(g, std::move(bands)));
    ClusterSet cs = cluster_wavelet(fam, 0, 0.25, {Vector2i(8, 8)});
    cs.radius_px[0] = 3.0;  // any nonempty set of deltas
    double mu = cluster_coherence(cs, fam, Projection::none, nullptr);
    CHECK(mu == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("empty cluster has zero coherence") {
    auto g = FrequencyGrid::make(32);
    auto gab = shared(build_gabor_frame(g, {Vector2i(4, 1)}));
    auto fam = shared(build_wavelet_frame(g, 2));
    ClusterSet empty = cluster_gabor(gab, 2, 0.25, {});
    CHECK(cluster_coherence(empty, fam, Projection::none, nullptr) == 0.0);
}

TEST_CASE("sum-inside coherence never exceeds the sum-outside variant") {
    auto g = FrequencyGrid::make(32);
    auto wav = shared(build_wavelet_frame(g, 2));
    auto sh = shared(build_shearlet_frame(g, 2));
    ClusterSet cs = cluster_wavelet(wav, 2, 0.25, {Vector2i(16, 16)});
    double inside = cluster_coherence(cs, sh, Projection::none, nullptr);

    // sum-outside: max_partner sum_{i in Lambda} |<phi_i, psi_partner>|,
    // exhaustively via per-atom analyses
    RArray acc;
    bool first = true;
    std::vector<RArray> sums;
    for (int b = 0; b < wav->subband_count(); b++) {
        if (!cs.subband_active(wav->bands[size_t(b)].meta)) continue;
        RArray ind = cs.indicator(b);
        for (int x1 = 0; x1 < 32; x1++)
            for (int x2 = 0; x2 < 32; x2++) {
                if (ind(x1, x2) == 0.0) continue;
                CoefficientSet atom;
                atom.frame = wav;
                atom.fields.resize(wav->bands.size());
                for (size_t bb = 0; bb < wav->bands.size(); bb++) {
                    atom.fields[bb].transposed = false;
                    atom.fields[bb].a = CArray::Zero(32, 32);
                }
                atom.fields[size_t(b)].a(x1, x2) = 1.0;
                atom.gtone.assign(wav->gbands.size(), cplx(0, 0));
                CoefficientSet resp = analyze(sh, synthesize(*wav, atom));
                size_t k = 0;
                for (const Field& fl : resp.fields) {
                    RArray mag = fl.a.abs();
                    if (first)
                        sums.push_back(mag);
                    else
                        sums[k] += mag;
                    k++;
                }
                first = false;
            }
    }
    double outside = 0;
    for (const RArray& s : sums) outside = std::max(outside, s.maxCoeff());
    CHECK(inside <= outside + 1e-10);
    CHECK(outside > 0);
    (void)acc;
}

TEST_CASE("kappa upper bound assembles the lemma maxima") {
    auto g = FrequencyGrid::make(32);
    auto wav = shared(build_wavelet_frame(g, 2));
    auto sh = shared(build_shearlet_frame(g, 2));

    SUBCASE("N=1, no missing part: zero") {
        CoherenceTable t;
        KappaBounds kb = kappa_upper_bound(t, {false});
        CHECK(kb.mu_cN == 0.0);
        CHECK(kb.mu_inp == 0.0);
        CHECK(kb.mu_sep == 0.0);
    }
    SUBCASE("N=2 with P_M = 0 reduces to the max cross coherence") {
        std::vector<ComponentSetup> comps;
        comps.push_back({wav, cluster_wavelet(wav, 2, 0.25, {Vector2i(16, 16)}), false});
        comps.push_back({sh, cluster_shearlet(sh, 2, 0.25, 0), false});
        CoherenceTable table = compute_coherence_table(comps, nullptr);
        KappaBounds kb = kappa_upper_bound(table, {false, false});
        double m01 = table.at({0, 1, Projection::none});
        double m10 = table.at({1, 0, Projection::none});
        CHECK(kb.mu_cN == doctest::Approx(std::max(m01, m10)));
        CHECK(kb.mu_inp == 0.0);
    }
    SUBCASE("missing entries are an error") {
        CoherenceTable t;
        CHECK_THROWS_AS(kappa_upper_bound(t, {true, true}), std::invalid_argument);
    }
}

TEST_CASE("kappa sandwich on a small golden-style configuration") {
    auto g = FrequencyGrid::make(32);
    auto wav = shared(build_wavelet_frame(g, 2));
    auto sh = shared(build_shearlet_frame(g, 2));
    StripMask mask = StripMask::make(g, 2.0);
    std::vector<ComponentSetup> comps;
    comps.push_back({wav, cluster_wavelet(wav, 2, 0.25, {Vector2i(8, 20)}), false});
    comps.push_back({sh, cluster_shearlet(sh, 2, 0.25, 0), true});
    CoherenceTable table = compute_coherence_table(comps, &mask);
    KappaBounds kb = kappa_upper_bound(table, {false, true});
    double lo = kappa_sampled_lower_bound(comps, &mask, 8, 77);
    CHECK(lo <= kb.mu_cN + 1e-9);
    CHECK(lo >= 0.0);
    // determinism
    CHECK(kappa_sampled_lower_bound(comps, &mask, 8, 77) == doctest::Approx(lo));
}

TEST_CASE("certificate arithmetic") {
    KappaBounds mu;
    mu.mu_cN = 0.25;
    Certificate c = error_certificate({0.05, 0.05}, mu, std::nullopt);
    CHECK(c.valid);
    CHECK(c.bound == doctest::Approx(0.4));  // 2*0.1 / (1 - 0.5)

    Certificate noisy = error_certificate({0.1}, mu, 0.2);
    CHECK(noisy.bound == doctest::Approx(0.6));  // (0.2 + 0.1) / 0.5

    mu.mu_cN = 0.5;
    Certificate invalid = error_certificate({0.1}, mu, std::nullopt);
    CHECK(!invalid.valid);

    CHECK_THROWS_AS(error_certificate({-0.1}, mu, std::nullopt), std::invalid_argument);
}

TEST_CASE("lambda condition: exact delta-probe evaluation") {
    auto g = FrequencyGrid::make(16);
    auto wav = shared(build_wavelet_frame(g, 1));
    std::vector<ComponentSetup> comps;
    comps.push_back({wav, cluster_wavelet(wav, 1, 0.25, {Vector2i(8, 8)}), false});
    LambdaReport rep = check_lambda_condition(comps, 100.0);
    CHECK(rep.pass);

    // brute force: max over pixels of the cluster-restricted analysis l1
    double brute = 0;
    for (int x1 = 0; x1 < 16; x1++)
        for (int x2 = 0; x2 < 16; x2++) {
            Image delta = Image::zero(g);
            delta.v(x1, x2) = 1.0;
            brute = std::max(brute, cluster_l1(analyze(wav, delta), comps[0].cluster));
        }
    CHECK(rep.max_ratio == doctest::Approx(brute).epsilon(1e-9));

    LambdaReport fail = check_lambda_condition(comps, 0.0);
    CHECK(!fail.pass);  // lambda = 0 fails once any cluster atom is nonzero
}
