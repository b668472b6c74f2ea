#pragma once
#include "gsep/frames.hpp"

#include <optional>
#include <string>
#include <vector>

// l1-analysis separation / inpainting / denoising:
//
//   min sum_m ||Phi_m^* f_m||_1   s.t.  P_K(sum f_m) = observed        (constrained)
//   min sum_m ||Phi_m^* f_m||_1 + lambda R(P_K(sum f_m) - observed)    (unconstrained)
//
// solved by a first-order primal-dual scheme over the product of N images:
// per iteration (a) soft-threshold-type prox on each analysis l1 term via
// the dual clamp, (b) Euclidean projection onto the affine constraint set
//   f_m <- f_m - (1/N) P_K(sum f - rhs)
// (or the prox of lambda R on the known-part residual), (c) extrapolation.
// Steps tau = sigma = sqrt(0.9 / B_est).

namespace gsep {

enum class SolveMode { constrained, constrained_noisy, unconstrained };
enum class Regularizer { l1, l2sq };

struct SolverOptions {
    int max_iters = 2000;
    double tol = 1e-6;
    double step_scale = 0.9;
    uint64_t seed = 0;
    int trace_every = 1;
    int bound_iters = 8;  // power iterations for B_est
};

struct SeparationProblem {
    Image observed;
    std::optional<StripMask> mask;  // nullopt: no missing part (P_K = Id)
    std::vector<std::shared_ptr<const FrameFamily>> frames;
    SolveMode mode = SolveMode::constrained;
    Regularizer reg = Regularizer::l1;
    double lambda = 0;  // unconstrained only
    SolverOptions opts;
};

struct TraceRow {
    int iter = 0;
    double objective = 0;
    double residual = 0;
    double step = 0;
};

struct SeparationResult {
    std::vector<Image> components;
    std::vector<TraceRow> trace;
    int iterations = 0;
    bool converged = false;
    double objective = 0;
    double residual = 0;
    std::string error;  // nonempty if this band failed (per-scale runs)
};

SeparationResult solve(const SeparationProblem& problem);

// Independent per-band solves; one band's failure is recorded, not fatal.
std::vector<SeparationResult> solve_per_scale(std::vector<SeparationProblem> problems);

struct ResidualReport {
    std::vector<double> rel_err;         // ||f_m* - f_m|| / ||f_m||
    std::vector<bool> not_applicable;    // zero-norm ground truth
    double rel_sum = 0;                  // sum of applicable relative errors
    double abs_err_sum = 0;              // sum_m ||f_m* - f_m||_2 (certificate side)
    bool swap_suspect = false;           // some f_m* is closer to another truth
};
ResidualReport residual_report(const SeparationResult& result,
                               const std::vector<Image>& ground_truth);

std::string trace_csv(const SeparationResult& result);

}  // namespace gsep
