#pragma once
#include "gsep/frames.hpp"

#include <map>
#include <optional>

// Cluster sets, relative sparsity delta, cluster coherence mu_c, joint
// concentration bounds and the recovery-error certificate
//   sum_m ||f_m* - f_m||_2 <= (2 delta + 2 mu eps) / (1 - 2 mu),  mu < 1/2.
//
// Cluster coherence follows the sum-inside-the-inner-product definition:
//   mu_c(Lambda, A; B) = max_{b in B} | < sum_{i in Lambda} a_i , b > |,
// computed as one synthesis of an indicator coefficient vector followed by
// one analysis against the partner frame. Parseval self-duals throughout.
//
// Cluster grid mapping (paper lattice -> pixels): scale-j' lattice units are
// n 2^{-2j'} pixels, so paper radius 2^{eps j'} maps to n 2^{(eps-2)j'} px.
// The Gabor position ball B(0, M_j), M_j = 2^{eps j/6}, maps to half-pixel
// index radius n M_j on the (2n)^2 modulation torus.

namespace gsep {

enum class ClusterVariant { wavelet, shearlet, gabor };
enum class Projection { none, missing, known };

struct ClusterSet {
    std::shared_ptr<const FrameFamily> frame;
    ClusterVariant variant;
    int j = 0;
    double eps = 0.25;

    // wavelet: discs around point positions, per scale in the +/- union
    std::vector<Vector2i> centers;
    std::map<int, double> radius_px;  // scale -> pixel radius

    // shearlet: vertical cone, |l| <= 1, column band around the line
    int line_col = 0;
    std::map<int, double> halfwidth_px;  // scale -> pixel half-width

    // gabor: position ball x band set
    double ball_radius = 0;  // half-pixel index radius on the (2n)^2 torus
    std::vector<Vector2i> bands;

    bool subband_active(const SubbandMeta& meta) const;
    RArray indicator(int b) const;  // 0/1 over (x1, x2) for subband b
    size_t member_count() const;
};

ClusterSet cluster_wavelet(const std::shared_ptr<const FrameFamily>& frame, int j, double eps,
                           const std::vector<Vector2i>& points);
ClusterSet cluster_shearlet(const std::shared_ptr<const FrameFamily>& frame, int j, double eps,
                            int line_col = 0);
ClusterSet cluster_gabor(const std::shared_ptr<const FrameFamily>& frame, int j, double eps,
                         const std::vector<Vector2i>& I_T);

// Integer lattice points in the closed disc of radius r (paper-unit helper).
long disc_lattice_count(double r);
// Points of the (2n)^2 torus lattice within toroidal distance r of 0.
long torus_ball_count(int two_n, double r);

// l1 mass of the coefficients inside / outside the cluster.
double cluster_l1(const CoefficientSet& coeffs, const ClusterSet& cluster);
double relative_sparsity(const CoefficientSet& coeffs, const ClusterSet& cluster);

// Sum of the cluster's atoms as an image (one synthesis of the indicator).
Image cluster_sum_image(const ClusterSet& cluster);

double cluster_coherence(const ClusterSet& cluster,
                         const std::shared_ptr<const FrameFamily>& partner, Projection proj,
                         const StripMask* mask);

struct CoherenceKey {
    int cluster_of;  // component index owning the cluster
    int partner;     // component whose frame is scanned
    Projection proj;
    auto operator<=>(const CoherenceKey&) const = default;
};
using CoherenceTable = std::map<CoherenceKey, double>;

struct ComponentSetup {
    std::shared_ptr<const FrameFamily> frame;
    ClusterSet cluster;
    bool has_missing = true;  // no-missing components enter unprojected (Remark handling)
};

CoherenceTable compute_coherence_table(const std::vector<ComponentSetup>& comps,
                                       const StripMask* mask);

struct KappaBounds {
    double mu_cN = 0;   // Lemma (iii) assembly
    double mu_sep = 0;  // separation part
    double mu_inp = 0;  // inpainting part
};
KappaBounds kappa_upper_bound(const CoherenceTable& table, const std::vector<bool>& has_missing);

double kappa_sampled_lower_bound(const std::vector<ComponentSetup>& comps, const StripMask* mask,
                                 int trials, uint64_t seed);

struct Certificate {
    std::vector<double> delta_m;
    double delta = 0;
    KappaBounds mu;
    double noise_eps = 0;
    bool noisy = false;
    bool valid = false;  // mu_cN < 1/2
    double bound = 0;    // defined only when valid
};
Certificate error_certificate(const std::vector<double>& deltas, const KappaBounds& mu,
                              std::optional<double> noise_eps);

struct LambdaReport {
    double max_ratio = 0;
    std::vector<double> component_max;  // max over x of each cluster's own sum
    double lambda = 0;
    bool pass = false;
};
// Exact sup_z sum_m ||1_{Lambda_m} Phi_m^* z||_1 / ||z||_1 via delta probes
// (the l1->l1 operator norm is the max column sum).
LambdaReport check_lambda_condition(const std::vector<ComponentSetup>& comps, double lambda);

// CSV schema: j,pair,projection,mu,delta_1,delta_2,delta_3,kappa_lo,bound,valid
std::string certificate_csv_header();
std::string certificate_csv_rows(int j, const CoherenceTable& table, const Certificate& cert,
                                 double kappa_lo, const std::vector<std::string>& names);

}  // namespace gsep
