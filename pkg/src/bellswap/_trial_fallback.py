"""Pure-numpy per-trial kernel for Monte Carlo runs of the Gaussian protocol.

This is the reference implementation mirrored by the compiled extension
``bellswap._trial_core``; ``bellswap.kernels`` picks whichever is available.

A kernel instance is bound to one operating point (n, sigma, s_c, threshold)
and maps four uniform/normal variates to one trial outcome:

    z1 -> x_d = z1 * sigma/sqrt(2)
    ud -> integer grid difference d (inverse CDF on triangular weights)
    z2 -> p_d = d * delta/sqrt(2) + z2 / (sigma*sqrt(2))
    um -> joint purification outcome (inverse CDF over outcome blocks,
          lexicographic in (alice bits, bob bits))

Phases cancel exactly under the x_d correction for Gaussian modes, so the
kernel works directly with the corrected real amplitude table; equality with
the explicit operator pipeline is covered by tests. Instances hold scratch
buffers and are not thread-safe; use one instance per worker.
"""

from __future__ import annotations

from math import ceil, pi, sqrt

import numpy as np

TRIAL_FIELDS = ("x_d", "p_d", "t", "delta_p", "abandoned", "pa", "pb",
                "fidelity", "fidelity_extra", "success", "bell_pairs")


class TrialKernel:
    impl = "python"

    def __init__(self, n: int, sigma: float, s_c: int, threshold: float):
        if not 0 <= s_c <= n - 2:
            raise ValueError(f"s_c must satisfy 0 <= s_c <= n - 2, got {s_c}")
        self.n = n
        self.sigma = float(sigma)
        self.s_c = s_c
        self.threshold = float(threshold)
        self.dim = 1 << n
        self.half = self.dim >> 1
        self.n_b = n - 1 - s_c
        self.m_dim = 1 << self.n_b          # diagonal length of an outcome block
        self.s2 = 1 << s_c
        self.n_pat = 2 * self.s2            # per-side outcome patterns (b0, fine bits)
        self.e_dim = self.dim >> s_c        # per-side dimension with fine bits removed
        self.delta = sqrt(2.0 * pi / self.dim)
        self.step = self.delta / sqrt(2.0)
        self.xd_scale = self.sigma / sqrt(2.0)
        self.comp_scale = 1.0 / (self.sigma * sqrt(2.0))
        d = np.arange(-(self.dim - 1), self.dim)
        self.d_grid = d
        self.cumw = np.cumsum((self.dim - np.abs(d)) / self.dim**2)
        self.off = self.dim - 1
        # index helpers reused across trials
        self._cols = np.arange(self.dim)
        pa = np.arange(self.n_pat)
        b0 = pa >> s_c
        fine = pa & (self.s2 - 1)
        self._rows_by_pat = b0[:, None] * self.half + np.arange(self.m_dim)[None, :] * self.s2 + fine[:, None]
        self._erows_by_fine = np.arange(self.e_dim)[:, None] * self.s2  # + fine

    def _draw_d(self, ud: float) -> int:
        idx = min(int(np.searchsorted(self.cumw, ud, side="right")), self.cumw.size - 1)
        return idx - self.off

    def trial(self, z1: float, ud: float, z2: float, um: float):
        """One trial from four variates; returns a TRIAL_FIELDS tuple."""
        x_d = z1 * self.xd_scale
        d = self._draw_d(ud)
        p_d = d * self.step + z2 * self.comp_scale
        x = sqrt(2.0) * p_d / self.delta
        t = ceil(x - 0.5)
        delta_p = x - t
        if abs(t) > self.half:
            return (x_d, p_d, t, delta_p, True, -1, -1, 0.0, 0.0, False, 0)

        arg = self.sigma * (p_d - self.d_grid * self.step)
        w = np.exp(-0.5 * arg * arg)
        w2 = w * w
        rmap = (self._cols + t) % self.dim

        table = w2[rmap[:, None] - self._cols[None, :] + self.off]
        blocks = (
            table.reshape(2, self.m_dim, self.s2, 2, self.m_dim, self.s2)
            .sum(axis=(1, 4))
            .reshape(self.n_pat * self.n_pat)
        )
        cum = np.cumsum(blocks)
        total = cum[-1]
        if not np.isfinite(total) or total <= 0.0:
            return (x_d, p_d, t, delta_p, True, -1, -1, 0.0, 0.0, False, 0)
        idx = min(int(np.searchsorted(cum, um * total, side="right")), blocks.size - 1)
        pa, pb = divmod(idx, self.n_pat)
        if not blocks[idx] > 0.0:
            # clamped draw landed on a zero-mass block (float-rounding artifact)
            return (x_d, p_d, t, delta_p, False, pa, pb, 0.0, 0.0, False, 0)

        rows = self._rows_by_pat[pa]
        cols = self._rows_by_pat[pb]
        diag = w[rmap[rows] - cols + self.off].sum()
        fidelity = min(diag * diag / (self.m_dim * blocks[idx]), 1.0)

        fid_extra = 0.0
        sa, sb = pa & (self.s2 - 1), pb & (self.s2 - 1)
        if t == 0 and sa == sb:
            erows = (self._erows_by_fine + sa).ravel()
            ecols = (self._erows_by_fine + sb).ravel()
            sub = w[rmap[erows][:, None] - ecols[None, :] + self.off]
            enorm = (sub * sub).sum()
            ediag = np.trace(sub)
            fid_extra = min(ediag * ediag / (self.e_dim * enorm), 1.0)

        b0a = pa >> self.s_c
        sign_ok = (b0a == 0 and 0 <= t <= self.half) or (b0a == 1 and -self.half <= t <= 0)
        success = pa == pb and sign_ok and fidelity >= self.threshold
        if success and t == 0 and fid_extra >= self.threshold:
            pairs = self.n_b + 1
        elif success:
            pairs = self.n_b
        else:
            pairs = 0
        return (x_d, p_d, t, delta_p, False, pa, pb, fidelity, fid_extra, success, pairs)

    def run_batch(self, z1s, uds, z2s, ums):
        """Trials from pre-drawn variate arrays; returns per-trial result arrays."""
        count = len(z1s)
        success = np.zeros(count, dtype=bool)
        abandoned = np.zeros(count, dtype=bool)
        extra = np.zeros(count, dtype=bool)
        fidelity = np.zeros(count, dtype=np.float64)
        for i in range(count):
            res = self.trial(z1s[i], uds[i], z2s[i], ums[i])
            abandoned[i] = res[4]
            success[i] = res[9]
            fidelity[i] = res[7]
            extra[i] = res[10] == self.n_b + 1
        return success, abandoned, extra, fidelity
