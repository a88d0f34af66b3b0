"""Hot loops for Monte Carlo replicas (numba-compiled).

Each kernel advances one urn replica by consuming a block of presupplied
uniforms ``u`` from index ``pos``; when the block runs dry the kernel
returns with ``done = 0`` and the caller refills.  Because numpy
generators hand out uniforms sequentially regardless of block size, the
trajectory is a pure function of the replica's stream no matter how the
blocks are sized.  A kernel that would step outside its weight tables
returns ``done = -1``; the caller rebuilds bigger tables and reruns the
replica from scratch (deterministic for the same reason).

Signature convention: ``kernel(b, r, u, pos, FIXED..., STATE...)``
returning ``(pos, STATE..., done)``, so callers resume by splatting the
returned state back in.  ``u[pos] < r/(b+r)`` draws red.  All kernels
release the GIL.
"""

from __future__ import annotations

import numba

_SIG_KW = dict(cache=True, nogil=True)


@numba.njit(**_SIG_KW)
def record_at_draws(b, r, u, pos, rec_draws, out_disc, blues, reds, rec_i):
    """Record D at each draw count in ``rec_draws`` (sorted ascending).

    Returns (pos, blues, reds, rec_i, done); done once every index is
    recorded.
    """
    n_rec = rec_draws.shape[0]
    while True:
        if rec_i >= n_rec:
            return pos, blues, reds, rec_i, 1
        if pos >= u.shape[0]:
            return pos, blues, reds, rec_i, 0
        if blues + 1 >= b.shape[0] or reds + 1 >= r.shape[0]:
            return pos, blues, reds, rec_i, -1
        rw = r[reds]
        if u[pos] < rw / (b[blues] + rw):
            reds += 1
        else:
            blues += 1
        pos += 1
        while rec_i < n_rec and blues + reds == rec_draws[rec_i]:
            out_disc[rec_i] = reds - blues
            rec_i += 1


@numba.njit(**_SIG_KW)
def record_tau_and_draw(b, r, u, pos, btarget, dtarget, blues, reds, d_tau, d_end):
    """Record D at the draw where blues reaches btarget and at draw dtarget.

    Returns (pos, blues, reds, d_tau, d_end, done).  Callers pass a
    sentinel for the not-yet-recorded values; with ``dtarget = 0`` the
    d_end slot keeps its sentinel.
    """
    while True:
        if blues >= btarget and blues + reds >= dtarget:
            return pos, blues, reds, d_tau, d_end, 1
        if pos >= u.shape[0]:
            return pos, blues, reds, d_tau, d_end, 0
        if blues + 1 >= b.shape[0] or reds + 1 >= r.shape[0]:
            return pos, blues, reds, d_tau, d_end, -1
        rw = r[reds]
        if u[pos] < rw / (b[blues] + rw):
            reds += 1
        else:
            blues += 1
            if blues == btarget:
                d_tau = reds - blues
        pos += 1
        if blues + reds == dtarget:
            d_end = reds - blues


@numba.njit(**_SIG_KW)
def window_sup(b, r, u, pos, bstart, bend, blues, reds, d_ref, sup, started):
    """Sup of |D - D_ref| between the bstart-th and bend-th blue draw.

    D_ref is D at the draw where blues reaches bstart; the sup runs over
    every subsequent draw up to and including the one where blues reaches
    bend.  Returns (pos, blues, reds, d_ref, sup, started, done).
    """
    while True:
        if blues >= bend:
            return pos, blues, reds, d_ref, sup, started, 1
        if pos >= u.shape[0]:
            return pos, blues, reds, d_ref, sup, started, 0
        if blues + 1 >= b.shape[0] or reds + 1 >= r.shape[0]:
            return pos, blues, reds, d_ref, sup, started, -1
        rw = r[reds]
        if u[pos] < rw / (b[blues] + rw):
            reds += 1
        else:
            blues += 1
            if started == 0 and blues == bstart:
                d_ref = reds - blues
                started = 1
        pos += 1
        if started == 1:
            dev = reds - blues - d_ref
            if dev < 0:
                dev = -dev
            if dev > sup:
                sup = dev
