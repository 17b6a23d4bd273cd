# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-trial kernel for Monte Carlo runs of the Gaussian protocol.

Mirrors ``bellswap._trial_fallback.TrialKernel`` (see its docstring for the
variate protocol and semantics); selected automatically by
``bellswap.kernels`` when the extension is built. Instances hold scratch
buffers and are not thread-safe; use one instance per worker.
"""

from libc.math cimport ceil, exp, sqrt, M_PI
from libc.stdint cimport int64_t

import numpy as np

TRIAL_FIELDS = ("x_d", "p_d", "t", "delta_p", "abandoned", "pa", "pb",
                "fidelity", "fidelity_extra", "success", "bell_pairs")


cdef class TrialKernel:
    cdef public int n, s_c, n_b, dim, half, m_dim, s2, n_pat, e_dim
    cdef public double sigma, threshold, delta, step, xd_scale, comp_scale
    cdef int off
    cdef double[::1] cumw
    cdef double[::1] w
    cdef double[::1] w2
    cdef double[::1] blocks
    cdef int64_t[::1] rmap
    # per-trial outputs of _trial
    cdef double o_xd, o_pd, o_dp, o_fid, o_fide
    cdef int64_t o_t
    cdef int o_abandoned, o_pa, o_pb, o_success, o_pairs

    impl = "compiled"

    def __init__(self, int n, double sigma, int s_c, double threshold):
        if s_c < 0 or s_c > n - 2:
            raise ValueError(f"s_c must satisfy 0 <= s_c <= n - 2, got {s_c}")
        self.n = n
        self.sigma = sigma
        self.s_c = s_c
        self.threshold = threshold
        self.dim = 1 << n
        self.half = self.dim >> 1
        self.n_b = n - 1 - s_c
        self.m_dim = 1 << self.n_b
        self.s2 = 1 << s_c
        self.n_pat = 2 * self.s2
        self.e_dim = self.dim >> s_c
        self.delta = sqrt(2.0 * M_PI / self.dim)
        self.step = self.delta / sqrt(2.0)
        self.xd_scale = sigma / sqrt(2.0)
        self.comp_scale = 1.0 / (sigma * sqrt(2.0))
        self.off = self.dim - 1
        d = np.arange(-(self.dim - 1), self.dim)
        self.cumw = np.cumsum((self.dim - np.abs(d)) / float(self.dim) ** 2)
        self.w = np.zeros(2 * self.dim - 1)
        self.w2 = np.zeros(2 * self.dim - 1)
        self.blocks = np.zeros(self.n_pat * self.n_pat)
        self.rmap = np.zeros(self.dim, dtype=np.int64)

    cdef int _search_right(self, double[::1] cum, double target, int size) noexcept:
        # first index with cum[idx] > target, clamped into range
        cdef int lo = 0, hi = size, mid
        while lo < hi:
            mid = (lo + hi) >> 1
            if cum[mid] > target:
                hi = mid
            else:
                lo = mid + 1
        if lo >= size:
            lo = size - 1
        return lo

    cdef void _trial(self, double z1, double ud, double z2, double um) noexcept:
        cdef int dim = self.dim, off = self.off, s_c = self.s_c
        cdef int s2 = self.s2, m_dim = self.m_dim, n_pat = self.n_pat
        cdef int half = self.half, e_dim = self.e_dim
        cdef int d, j, pa, pb, b0a, b0b, sa, sb, ma, mb, idx, base_a, base_b
        cdef int64_t t, r
        cdef double p_d, x, tf, arg, acc, total, target, diag, val, enorm, fid

        self.o_xd = z1 * self.xd_scale
        d = self._search_right(self.cumw, ud, 2 * dim - 1) - off
        p_d = d * self.step + z2 * self.comp_scale
        self.o_pd = p_d
        x = sqrt(2.0) * p_d / self.delta
        tf = ceil(x - 0.5)
        t = <int64_t> tf
        self.o_t = t
        self.o_dp = x - tf
        self.o_fid = 0.0
        self.o_fide = 0.0
        self.o_success = 0
        self.o_pairs = 0
        self.o_pa = -1
        self.o_pb = -1
        if t < -half or t > half:
            self.o_abandoned = 1
            return
        self.o_abandoned = 0

        for j in range(2 * dim - 1):
            arg = self.sigma * (p_d - (j - off) * self.step)
            val = exp(-0.5 * arg * arg)
            self.w[j] = val
            self.w2[j] = val * val
        for j in range(dim):
            r = (j + t) % dim
            if r < 0:
                r += dim
            self.rmap[j] = r

        for pa in range(n_pat):
            b0a = pa >> s_c
            sa = pa & (s2 - 1)
            for pb in range(n_pat):
                b0b = pb >> s_c
                sb = pb & (s2 - 1)
                base_b = b0b * half + sb
                acc = 0.0
                for ma in range(m_dim):
                    r = self.rmap[b0a * half + ma * s2 + sa] + off - base_b
                    for mb in range(m_dim):
                        acc += self.w2[r - mb * s2]
                self.blocks[pa * n_pat + pb] = acc
        total = 0.0
        for idx in range(n_pat * n_pat):
            total += self.blocks[idx]
            self.blocks[idx] = total
        if not (total > 0.0) or total != total:
            self.o_abandoned = 1
            return
        target = um * total
        idx = self._search_right(self.blocks, target, n_pat * n_pat)
        pa = idx // n_pat
        pb = idx % n_pat
        self.o_pa = pa
        self.o_pb = pb

        # block value back from the cumulative array
        acc = self.blocks[idx] - (self.blocks[idx - 1] if idx > 0 else 0.0)
        if not acc > 0.0:
            # clamped draw landed on a zero-mass block (float-rounding artifact)
            return
        b0a = pa >> s_c
        sa = pa & (s2 - 1)
        b0b = pb >> s_c
        sb = pb & (s2 - 1)
        base_a = b0a * half + sa
        base_b = b0b * half + sb
        diag = 0.0
        for ma in range(m_dim):
            diag += self.w[self.rmap[base_a + ma * s2] - (base_b + ma * s2) + off]
        fid = diag * diag / (m_dim * acc)
        if fid > 1.0:
            fid = 1.0
        self.o_fid = fid

        if t == 0 and sa == sb:
            enorm = 0.0
            diag = 0.0
            for ma in range(e_dim):
                r = self.rmap[ma * s2 + sa] + off
                for mb in range(e_dim):
                    val = self.w[r - (mb * s2 + sb)]
                    enorm += val * val
                diag += self.w[r - (ma * s2 + sb)]
            fid = diag * diag / (e_dim * enorm)
            if fid > 1.0:
                fid = 1.0
            self.o_fide = fid

        if pa == pb:
            if (b0a == 0 and 0 <= t <= half) or (b0a == 1 and -half <= t <= 0):
                if self.o_fid >= self.threshold:
                    self.o_success = 1
                    if t == 0 and self.o_fide >= self.threshold:
                        self.o_pairs = self.n_b + 1
                    else:
                        self.o_pairs = self.n_b

    def trial(self, double z1, double ud, double z2, double um):
        """One trial from four variates; returns a TRIAL_FIELDS tuple."""
        self._trial(z1, ud, z2, um)
        return (self.o_xd, self.o_pd, int(self.o_t), self.o_dp,
                bool(self.o_abandoned), self.o_pa, self.o_pb,
                self.o_fid, self.o_fide, bool(self.o_success), self.o_pairs)

    def run_batch(self, double[::1] z1s, double[::1] uds, double[::1] z2s, double[::1] ums):
        """Trials from pre-drawn variate arrays; returns per-trial result arrays."""
        cdef Py_ssize_t count = z1s.shape[0], i
        success = np.zeros(count, dtype=bool)
        abandoned = np.zeros(count, dtype=bool)
        extra = np.zeros(count, dtype=bool)
        fidelity = np.zeros(count, dtype=np.float64)
        cdef unsigned char[::1] succ_v = success.view(np.uint8)
        cdef unsigned char[::1] aban_v = abandoned.view(np.uint8)
        cdef unsigned char[::1] extra_v = extra.view(np.uint8)
        cdef double[::1] fid_v = fidelity
        for i in range(count):
            self._trial(z1s[i], uds[i], z2s[i], ums[i])
            succ_v[i] = self.o_success
            aban_v[i] = self.o_abandoned
            extra_v[i] = 1 if self.o_pairs == self.n_b + 1 else 0
            fid_v[i] = self.o_fid
        return success, abandoned, extra, fidelity
