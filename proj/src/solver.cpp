#include "gsep/solver.hpp"

#include <cmath>
#include <sstream>

namespace gsep {

namespace {

inline cplx radial_clamp(cplx z, double c) {
    double a = std::abs(z);
    return a <= c ? z : z * (c / a);
}

inline int wrap(int i, int n) { return ((i % n) + n) % n; }

struct FrameState {
    std::shared_ptr<const FrameFamily> frame;
    std::vector<Field> y;       // dual fields per subband, |y| <= w_b
    std::vector<Field> a_prev;  // analysis of the previous primal iterate
    std::vector<double> w;      // subband l1 weights ||P_b||_2
    std::vector<cplx> gw;       // gabor dual scalars, |w| <= tap
    std::vector<cplx> ga_prev;
    RArray sight;  // 0/1 spectral support of the family (frequencies its
                   // analysis sees); the component is confined to it
};

// Union of the subband supports plus the gabor band frequencies, in the
// transposed spectrum layout.
RArray frame_sight(const FrameFamily& f) {
    const int n = f.grid.n;
    RArray s = RArray::Zero(n, n);
    for (const Subband& sb : f.bands)
        for (int r = 0; r < sb.box.nr; r++)
            for (int c = 0; c < sb.box.nc; c++)
                if (sb.profile(r, c) != 0.0)
                    s(wrap(sb.box.c0 + c, n), wrap(sb.box.r0 + r, n)) = 1.0;
    for (const GaborBand& gb : f.gbands)
        s(f.grid.index(gb.freq.y()), f.grid.index(gb.freq.x())) = 1.0;
    return s;
}

}  // namespace

SeparationResult solve(const SeparationProblem& prob) {
    const int N = int(prob.frames.size());
    if (N < 1) throw std::invalid_argument("solve: need at least one frame");
    const FrequencyGrid grid = prob.observed.grid;
    for (const auto& fr : prob.frames)
        if (!(fr->grid == grid)) throw std::invalid_argument("solve: frame grid mismatch");
    if (prob.mode == SolveMode::unconstrained && !(prob.lambda > 0))
        throw std::invalid_argument("solve: unconstrained mode needs lambda > 0");
    const int n = grid.n;

    SeparationResult res;
    res.components.assign(size_t(N), Image::zero(grid));
    if (prob.observed.norm() == 0) {  // zero data: zero components, zero objective
        res.converged = true;
        return res;
    }

    // Parseval-certified families have B <= 1 by construction; otherwise power
    // iteration approaches B from below, so pad the estimate before stepping.
    // The weighted terms get per-subband dual steps sigma_b = budget/(tau w_b^2);
    // the convergence condition tau * max_xi sum_b sigma_b w_b^2 P_b^2 <= 1 then
    // reduces to the same budget over the unweighted tiling.
    double B_est = 0;
    bool all_certified = true;
    for (const auto& fr : prob.frames) all_certified = all_certified && fr->certified_parseval;
    if (all_certified) {
        B_est = 1.0;
    } else {
        for (const auto& fr : prob.frames)
            B_est = std::max(
                B_est, frame_bounds_estimate(fr, std::max(prob.opts.bound_iters, 12)).B * 1.2);
    }
    if (!(B_est > 0)) B_est = 1.0;
    const double budget = prob.opts.step_scale / B_est;
    const double step = std::sqrt(budget);
    const double tau = step;

    Image b = prob.mask ? apply_mask(*prob.mask, prob.observed, MaskPart::known) : prob.observed;
    const double bnorm = b.norm();

    auto st = std::vector<FrameState>(size_t(N));
    for (int m = 0; m < N; m++) {
        st[size_t(m)].frame = prob.frames[size_t(m)];
        const FrameFamily& fr = *prob.frames[size_t(m)];
        st[size_t(m)].y.resize(fr.bands.size());
        st[size_t(m)].a_prev.resize(fr.bands.size());
        st[size_t(m)].gw.assign(fr.gbands.size(), cplx(0, 0));
        st[size_t(m)].ga_prev.assign(fr.gbands.size(), cplx(0, 0));
        st[size_t(m)].sight = frame_sight(fr);
        for (const Subband& sb : fr.bands) st[size_t(m)].w.push_back(subband_weight(sb));
    }

    // primal lives in the spectrum domain; feasible-ish warm start b/N
    std::vector<Spectrum> x;
    for (int m = 0; m < N; m++) {
        Image x0 = Image::zero(grid);
        if (prob.mode != SolveMode::unconstrained) x0.v = b.v / double(N);
        x.push_back(spectrum(x0));
    }

    Field scratch_field;
    int iter = 0;
    bool converged = false;
    double objective = 0, residual = 0;
    double prev_change = 0;
    (void)prev_change;

    for (iter = 0; iter < prob.opts.max_iters; iter++) {
        objective = 0;
        double change2 = 0, xnorm2 = 0;
        std::vector<Spectrum> xnew;
        Image sum_space = Image::zero(grid);
        for (int m = 0; m < N; m++) {
            FrameState& s = st[size_t(m)];
            const FrameFamily& fr = *s.frame;
            // confine the component to its frame's sight before the dual reads
            x[size_t(m)].s.s *= s.sight.cast<cplx>();

            Spectrum grad = Spectrum::zero(grid);
            for (size_t bnd = 0; bnd < fr.bands.size(); bnd++) {
                const Subband& sb = fr.bands[bnd];
                fft::band_to_field(x[size_t(m)].s, sb.box, sb.profile, scratch_field);
                Field& y = s.y[bnd];
                Field& ap = s.a_prev[bnd];
                const size_t count = size_t(n) * size_t(n);
                if (y.a.size() == 0) {
                    y.transposed = scratch_field.transposed;
                    y.a = CArray::Zero(n, n);
                }
                if (ap.a.size() == 0) {
                    ap.transposed = scratch_field.transposed;
                    ap.a = CArray::Zero(n, n);
                }
                cplx* yp = y.a.data();
                cplx* app = ap.a.data();
                const cplx* anew = scratch_field.a.data();
                // dual of the w_b-weighted l1 term: uniform increment `step`
                // on the raw coefficients, clamp radius w_b (threshold = step /
                // weight after rescaling); gradient is the raw synthesis
                const double wb = s.w[bnd];
                double l1 = 0;
                for (size_t i = 0; i < count; i++) {
                    l1 += std::abs(anew[i]);
                    // extrapolated xbar = 2 x^k - x^{k-1}; at k=0, xbar = x^0
                    cplx xbar = iter == 0 ? anew[i] : 2.0 * anew[i] - app[i];
                    yp[i] = radial_clamp(yp[i] + step * xbar, wb);
                    app[i] = anew[i];
                }
                objective += wb * l1;
                fft::field_to_band_accum(y, sb.box, sb.profile, grad.s);
            }
            for (size_t bnd = 0; bnd < fr.gbands.size(); bnd++) {
                // gabor l1 weight = tap (its profile norm); the (2n)^2 position
                // sum collapses on the tone representation
                const GaborBand& gb = fr.gbands[bnd];
                const double wb = gb.tap;
                cplx anew = x[size_t(m)].at_freq(gb.freq.x(), gb.freq.y());
                objective += wb * 2.0 * n * gb.tap * std::abs(anew);
                cplx xbar = iter == 0 ? anew : 2.0 * anew - s.ga_prev[bnd];
                s.gw[bnd] = radial_clamp(s.gw[bnd] + step * gb.tap * xbar / double(2 * n), wb);
                s.ga_prev[bnd] = anew;
                grad.at_freq(gb.freq.x(), gb.freq.y()) += 2.0 * n * gb.tap * s.gw[bnd];
            }
            Spectrum xn{grid, {}};
            xn.s.n = n;
            xn.s.s = x[size_t(m)].s.s - tau * grad.s.s;
            xn.s.s *= s.sight.cast<cplx>();  // spectral support projection
            xnew.push_back(std::move(xn));
            sum_space.v += inverse_spectrum(xnew.back()).v;
        }

        // prox of the data term on the known-part residual
        Image r = prob.mask ? apply_mask(*prob.mask, sum_space, MaskPart::known) : sum_space;
        r.v -= b.v;
        Image shift = Image::zero(grid);
        switch (prob.mode) {
            case SolveMode::constrained:
            case SolveMode::constrained_noisy:
                shift.v = r.v / double(N);
                break;
            case SolveMode::unconstrained: {
                if (prob.reg == Regularizer::l1) {
                    double c = prob.lambda * tau * N;
                    for (int i = 0; i < n; i++)
                        for (int k = 0; k < n; k++)
                            shift.v(i, k) = radial_clamp(r.v(i, k), c) / double(N);
                } else {
                    double f = 2.0 * prob.lambda * tau / (1.0 + 2.0 * prob.lambda * tau * N);
                    shift.v = r.v * f;
                }
                break;
            }
        }
        Spectrum shift_hat = spectrum(shift);
        for (int m = 0; m < N; m++) {
            xnew[size_t(m)].s.s -= shift_hat.s.s;
            change2 += (xnew[size_t(m)].s.s - x[size_t(m)].s.s).abs2().sum();
            xnorm2 += xnew[size_t(m)].s.s.abs2().sum();
            x[size_t(m)].s.s = std::move(xnew[size_t(m)].s.s);
        }
        residual = bnorm > 0 ? std::sqrt((r.v - double(N) * shift.v).abs2().sum()) / bnorm : 0.0;

        if (prob.opts.trace_every > 0 && iter % prob.opts.trace_every == 0)
            res.trace.push_back(TraceRow{iter, objective, residual, step});

        if (!std::isfinite(objective) || !std::isfinite(residual) ||
            std::sqrt(xnorm2) > 1e8 * std::max(bnorm, 1.0))
            throw std::runtime_error("solve: diverged (non-finite iterate; reduce step scale)");

        double rel_change = std::sqrt(change2) / std::max(std::sqrt(xnorm2), 1e-300);
        if (iter > 0 && rel_change < prob.opts.tol) {
            converged = true;
            iter++;
            break;
        }
    }

    for (int m = 0; m < N; m++) res.components[size_t(m)] = inverse_spectrum(x[size_t(m)]);
    res.iterations = iter;
    res.converged = converged;
    res.objective = objective;
    res.residual = residual;
    return res;
}

std::vector<SeparationResult> solve_per_scale(std::vector<SeparationProblem> problems) {
    std::vector<SeparationResult> out;
    out.reserve(problems.size());
    for (const SeparationProblem& p : problems) {
        try {
            out.push_back(solve(p));
        } catch (const std::exception& e) {
            SeparationResult fail;
            fail.error = e.what();
            fail.components.assign(p.frames.size(), Image::zero(p.observed.grid));
            out.push_back(std::move(fail));
        }
    }
    return out;
}

ResidualReport residual_report(const SeparationResult& result,
                               const std::vector<Image>& ground_truth) {
    if (result.components.size() != ground_truth.size())
        throw std::invalid_argument("residual_report: component count mismatch");
    ResidualReport rep;
    const size_t N = ground_truth.size();
    for (size_t m = 0; m < N; m++) {
        double tn = ground_truth[m].norm();
        double err = std::sqrt((result.components[m].v - ground_truth[m].v).abs2().sum());
        rep.abs_err_sum += err;
        if (tn == 0) {
            rep.rel_err.push_back(0);
            rep.not_applicable.push_back(true);
        } else {
            rep.rel_err.push_back(err / tn);
            rep.not_applicable.push_back(false);
            rep.rel_sum += err / tn;
        }
    }
    for (size_t m = 0; m < N && !rep.swap_suspect; m++) {
        double self = std::sqrt((result.components[m].v - ground_truth[m].v).abs2().sum());
        for (size_t o = 0; o < N; o++) {
            if (o == m) continue;
            double cross = std::sqrt((result.components[m].v - ground_truth[o].v).abs2().sum());
            if (cross < self) {
                rep.swap_suspect = true;
                break;
            }
        }
    }
    return rep;
}

std::string trace_csv(const SeparationResult& result) {
    std::ostringstream os;
    os.precision(12);
    os << "iter,objective,residual,step\n";
    for (const TraceRow& t : result.trace)
        os << t.iter << "," << t.objective << "," << t.residual << "," << t.step << "\n";
    return os.str();
}

}  // namespace gsep
