#include "gsep/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace gsep::fft {
namespace {

// Batched contiguous 1-D transforms, planned once per (len, rows, sign).
// FFTW_ESTIMATE keeps plan selection deterministic across runs, which the
// bit-identical-rerun contract requires. Row counts are bucketed so the
// cache stays small while padding waste stays under ~25%.
struct BatchPlan {
    fftw_plan plan = nullptr;
    fftw_complex* in = nullptr;
    fftw_complex* out = nullptr;
    int len = 0, rows = 0;
};

std::map<std::tuple<int, int, int>, BatchPlan>& plan_cache() {
    static std::map<std::tuple<int, int, int>, BatchPlan> cache;
    return cache;
}
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

int bucket_rows(int rows) {
    // 1,2,3,4,6,8,12,16,24,... powers of two and 1.5x steps
    int b = 1;
    while (b < rows) {
        if (b == 1) b = 2;
        else if ((b & (b - 1)) == 0) b += b / 2;
        else b = (b / 3) * 4;
    }
    return b;
}

BatchPlan& get_plan(int len, int rows, int sign) {
    std::lock_guard<std::mutex> lock(plan_mutex());
    int rb = bucket_rows(rows);
    auto key = std::make_tuple(len, rb, sign);
    auto it = plan_cache().find(key);
    if (it != plan_cache().end()) return it->second;

    BatchPlan p;
    p.len = len;
    p.rows = rb;
    p.in = fftw_alloc_complex(size_t(len) * rb);
    p.out = fftw_alloc_complex(size_t(len) * rb);
    std::memset(p.in, 0, sizeof(fftw_complex) * size_t(len) * rb);
    int n[1] = {len};
    p.plan = fftw_plan_many_dft(1, n, rb, p.in, nullptr, 1, len, p.out, nullptr,
                                1, len, sign, FFTW_ESTIMATE);
    if (!p.plan) throw std::runtime_error("fftw plan creation failed");
    return plan_cache().emplace(key, p).first->second;
}

inline cplx* as_cplx(fftw_complex* p) { return reinterpret_cast<cplx*>(p); }

inline int wrap(int i, int n) { return i >= n ? i - n : i; }

// dst (cols x rows) = src (rows x cols) transposed, 32x32 blocks.
void transpose_into(const cplx* src, int rows, int cols, cplx* dst) {
    constexpr int B = 32;
    for (int i0 = 0; i0 < rows; i0 += B)
        for (int j0 = 0; j0 < cols; j0 += B) {
            int i1 = std::min(i0 + B, rows), j1 = std::min(j0 + B, cols);
            for (int i = i0; i < i1; i++)
                for (int j = j0; j < j1; j++) dst[size_t(j) * rows + i] = src[size_t(i) * cols + j];
        }
}

std::vector<cplx>& scratch(int which, size_t need) {
    static std::vector<cplx> bufs[3];
    if (bufs[which].size() < need) bufs[which].resize(need);
    return bufs[which];
}

// Batched transform of `rows` contiguous rows of length `len`. Input is
// copied from `src` (or assembled by `fill`), output written to `dst`.
template <class Fill>
void run_batch(int len, int rows, int sign, Fill&& fill, cplx* dst) {
    BatchPlan& p = get_plan(len, rows, sign);
    fill(as_cplx(p.in));
    fftw_execute(p.plan);
    std::memcpy(dst, p.out, sizeof(cplx) * size_t(len) * rows);
}

}  // namespace

void clear_plan_cache() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    for (auto& [k, p] : plan_cache()) {
        fftw_destroy_plan(p.plan);
        fftw_free(p.in);
        fftw_free(p.out);
    }
    plan_cache().clear();
}

void forward(const CArray& img, Spectrum2& out) {
    const int n = int(img.rows());
    if (img.cols() != n) throw std::invalid_argument("fft: non-square image");
    out.n = n;
    out.s.resize(n, n);
    auto& t1 = scratch(0, size_t(n) * n);
    auto& t2 = scratch(1, size_t(n) * n);
    // pass over x2 (contiguous), per x1 row
    run_batch(n, n, FFTW_FORWARD,
              [&](cplx* in) { std::memcpy(in, img.data(), sizeof(cplx) * size_t(n) * n); },
              t1.data());
    transpose_into(t1.data(), n, n, t2.data());  // -> [xi2][x1]
    // pass over x1, per xi2 row; result is the transposed spectrum
    run_batch(n, n, FFTW_FORWARD,
              [&](cplx* in) { std::memcpy(in, t2.data(), sizeof(cplx) * size_t(n) * n); },
              out.s.data());
    out.s *= 1.0 / n;
}

void inverse(const Spectrum2& spec, CArray& out) {
    const int n = spec.n;
    out.resize(n, n);
    auto& t1 = scratch(0, size_t(n) * n);
    auto& t2 = scratch(1, size_t(n) * n);
    // pass over xi1 (contiguous in the transposed spectrum), per xi2 row
    run_batch(n, n, FFTW_BACKWARD,
              [&](cplx* in) { std::memcpy(in, spec.s.data(), sizeof(cplx) * size_t(n) * n); },
              t1.data());
    transpose_into(t1.data(), n, n, t2.data());  // -> [x1][xi2]
    run_batch(n, n, FFTW_BACKWARD,
              [&](cplx* in) { std::memcpy(in, t2.data(), sizeof(cplx) * size_t(n) * n); },
              out.data());
    out *= 1.0 / n;
}

void band_to_field(const Spectrum2& spec, const Box& box, const RArray& prof,
                   Field& out) {
    const int n = spec.n;
    const int nr = box.nr, nc = box.nc;
    if (prof.rows() != nr || prof.cols() != nc)
        throw std::invalid_argument("band_to_field: profile/box shape mismatch");

    const double inv_n = 1.0 / n;
    if (nc <= nr) {
        // xi2-narrow: nc transforms over xi1, then n over xi2. Field comes out
        // in natural (x1,x2) layout.
        auto& t1 = scratch(0, size_t(nc) * n);
        run_batch(n, nc, FFTW_BACKWARD,
                  [&](cplx* in) {
                      std::memset(in, 0, sizeof(cplx) * size_t(nc) * n);
                      for (int c = 0; c < nc; c++) {
                          cplx* row = in + size_t(c) * n;
                          const int i2 = wrap(box.c0 + c, n);
                          for (int r = 0; r < nr; r++)
                              row[wrap(box.r0 + r, n)] = spec.s(i2, wrap(box.r0 + r, n)) * prof(r, c);
                      }
                  },
                  t1.data());
        auto& t2 = scratch(1, size_t(n) * nc);
        transpose_into(t1.data(), nc, n, t2.data());  // -> [x1][c]
        out.transposed = false;
        out.a.resize(n, n);
        run_batch(n, n, FFTW_BACKWARD,
                  [&](cplx* in) {
                      std::memset(in, 0, sizeof(cplx) * size_t(n) * n);
                      for (int x1 = 0; x1 < n; x1++) {
                          cplx* row = in + size_t(x1) * n;
                          const cplx* src = t2.data() + size_t(x1) * nc;
                          for (int c = 0; c < nc; c++) row[wrap(box.c0 + c, n)] = src[c];
                      }
                  },
                  out.a.data());
    } else {
        // xi1-narrow: nr transforms over xi2, then n over xi1. Field comes out
        // transposed (x2,x1).
        auto& t1 = scratch(0, size_t(nr) * n);
        run_batch(n, nr, FFTW_BACKWARD,
                  [&](cplx* in) {
                      std::memset(in, 0, sizeof(cplx) * size_t(nr) * n);
                      for (int r = 0; r < nr; r++) {
                          cplx* row = in + size_t(r) * n;
                          const int i1 = wrap(box.r0 + r, n);
                          for (int c = 0; c < nc; c++)
                              row[wrap(box.c0 + c, n)] = spec.s(wrap(box.c0 + c, n), i1) * prof(r, c);
                      }
                  },
                  t1.data());
        auto& t2 = scratch(1, size_t(n) * nr);
        transpose_into(t1.data(), nr, n, t2.data());  // -> [x2][r]
        out.transposed = true;
        out.a.resize(n, n);
        run_batch(n, n, FFTW_BACKWARD,
                  [&](cplx* in) {
                      std::memset(in, 0, sizeof(cplx) * size_t(n) * n);
                      for (int x2 = 0; x2 < n; x2++) {
                          cplx* row = in + size_t(x2) * n;
                          const cplx* src = t2.data() + size_t(x2) * nr;
                          for (int r = 0; r < nr; r++) row[wrap(box.r0 + r, n)] = src[r];
                      }
                  },
                  out.a.data());
    }
    out.a *= inv_n;
}

void field_to_band_accum(const Field& field, const Box& box, const RArray& prof,
                         Spectrum2& spec) {
    const int n = spec.n;
    const int nr = box.nr, nc = box.nc;
    if (prof.rows() != nr || prof.cols() != nc)
        throw std::invalid_argument("field_to_band_accum: profile/box shape mismatch");
    const double inv_n = 1.0 / n;

    auto& t1 = scratch(0, size_t(n) * n);
    if (!field.transposed) {
        // pass over x2 per x1 row, keep box columns, then nc transforms over x1
        run_batch(n, n, FFTW_FORWARD,
                  [&](cplx* in) { std::memcpy(in, field.a.data(), sizeof(cplx) * size_t(n) * n); },
                  t1.data());
        auto& sl = scratch(1, size_t(n) * nc);
        for (int x1 = 0; x1 < n; x1++) {
            const cplx* row = t1.data() + size_t(x1) * n;
            cplx* dst = sl.data() + size_t(x1) * nc;
            for (int c = 0; c < nc; c++) dst[c] = row[wrap(box.c0 + c, n)];
        }
        auto& t2 = scratch(2, size_t(nc) * n);
        transpose_into(sl.data(), n, nc, t2.data());  // -> [c][x1]
        auto& w = scratch(1, size_t(nc) * n);
        run_batch(n, nc, FFTW_FORWARD,
                  [&](cplx* in) { std::memcpy(in, t2.data(), sizeof(cplx) * size_t(nc) * n); },
                  w.data());
        for (int c = 0; c < nc; c++) {
            const cplx* row = w.data() + size_t(c) * n;
            const int i2 = wrap(box.c0 + c, n);
            for (int r = 0; r < nr; r++) {
                const int i1 = wrap(box.r0 + r, n);
                spec.s(i2, i1) += prof(r, c) * row[i1] * inv_n;
            }
        }
    } else {
        // mirrored for (x2,x1)-layout fields: keep box rows, nr transforms over x2
        run_batch(n, n, FFTW_FORWARD,
                  [&](cplx* in) { std::memcpy(in, field.a.data(), sizeof(cplx) * size_t(n) * n); },
                  t1.data());
        auto& sl = scratch(1, size_t(n) * nr);
        for (int x2 = 0; x2 < n; x2++) {
            const cplx* row = t1.data() + size_t(x2) * n;
            cplx* dst = sl.data() + size_t(x2) * nr;
            for (int r = 0; r < nr; r++) dst[r] = row[wrap(box.r0 + r, n)];
        }
        auto& t2 = scratch(2, size_t(nr) * n);
        transpose_into(sl.data(), n, nr, t2.data());  // -> [r][x2]
        auto& w = scratch(1, size_t(nr) * n);
        run_batch(n, nr, FFTW_FORWARD,
                  [&](cplx* in) { std::memcpy(in, t2.data(), sizeof(cplx) * size_t(nr) * n); },
                  w.data());
        for (int r = 0; r < nr; r++) {
            const cplx* row = w.data() + size_t(r) * n;
            const int i1 = wrap(box.r0 + r, n);
            for (int c = 0; c < nc; c++) {
                const int i2 = wrap(box.c0 + c, n);
                spec.s(i2, i1) += prof(r, c) * row[i2] * inv_n;
            }
        }
    }
}

}  // namespace gsep::fft
