"""Compiled simulation kernels for long runs.

These mirror the transition functions in :mod:`cgident.protocols` on flat
integer arrays (one array per variable). They carry no invariant checks or
state census; the test suite replays identical schedules through both paths
and requires identical trajectories.

Phase codes are twice the phase value: 2, 3, 4, 6, 8 for phases 1, 1.5, 2, 3, 4.
CIW_{n,k} mode vectors are bitmasks (bit g is mode[g]), so k <= 62.
"""

from __future__ import annotations

import numpy as np
from numba import njit

CIW_N, CIW_NK, CIG = 0, 1, 2
PROTOCOL_IDS = {"ciw_n": CIW_N, "ciw_nk": CIW_NK, "cig": CIG}

PH1, PH15, PH2, PH3, PH4 = 2, 3, 4, 6, 8

# layout of the stats vector shared between the driver and the kernel
S_STEPS = 0
S_COMPLETED_ROUNDS = 1
S_SEEN = 2
S_ROUND_ID = 3
S_CERT_STEP = 4
S_CERT_ROUND = 5
S_SIGHTINGS = 6
S_FIRST_SIGHTING = 7
S_N4 = 8
S_NSIZE = 9
S_NTOK = 10
S_N4N = 11
S_SIZE_STABLE_STEP = 12
S_MAX_CNT = 13
S_MAX_SIZE = 14
N_STATS = 15


@njit(cache=True)
def _ciw_step(a, b, n, L, PH, MO, C):
    if L[a] == 1 and L[b] == 1:
        c = C[a] + C[b]
        L[b] = 0
        C[b] = 0
        if c == n:
            PH[a] = PH2
            C[a] = 0
        else:
            C[a] = c
    elif L[a] == 1 and PH[a] == PH2 and MO[a] == MO[b]:
        c = C[a] + 1
        MO[b] = 1 - MO[b]
        if c == n - 1:
            PH[a] = PH3
            C[a] = 1
            MO[a] = 1 - MO[a]
        else:
            C[a] = c
    elif L[a] == 1 and PH[a] == PH3 and PH[b] == PH1:
        L[a] = 0
        L[b] = 1
        PH[b] = PH2
    elif PH[a] == PH3 and PH[b] == PH3 and C[a] > 0 and C[b] > 0:
        c = C[a] + C[b]
        C[b] = 0
        C[a] = c
        if c == n:
            PH[a] = PH4
    elif PH[a] == PH4:
        PH[b] = PH4


@njit(cache=True)
def _ciwk_step(a, b, n, k, L, PH, MO, G, C):
    if L[a] == 1 and L[b] == 1 and PH[a] == PH1 and PH[b] == PH1:
        c = C[a] + C[b]
        L[b] = 0
        C[b] = 0
        C[a] = c
        if c == n:
            PH[a] = PH15
        return
    if L[a] == 1 and PH[a] == PH15 and G[b] == k:
        c = C[a] - 1
        G[b] = c % k
        if c < k:
            L[b] = 1
            PH[b] = PH2
        if c == 1:
            PH[a] = PH2
            C[a] = 0
            G[a] = 0
        else:
            C[a] = c
        return
    if L[a] == 1 and PH[a] == PH2:
        bit = np.int64(1) << G[a]
        if (MO[a] & bit) == (MO[b] & bit):
            c = C[a] + 1
            MO[b] ^= bit
            if c == n - 1:
                PH[a] = PH3
                C[a] = 1
                MO[a] ^= bit
            else:
                C[a] = c
            return
    if L[a] == 1 and PH[a] == PH3 and PH[b] == PH1 and G[a] == G[b]:
        L[a] = 0
        L[b] = 1
        PH[b] = PH2
        return
    if PH[a] == PH3 and PH[b] == PH3 and C[a] > 0 and C[b] > 0:
        c = C[a] + C[b]
        C[b] = 0
        C[a] = c
        if c == n:
            PH[a] = PH4
        return
    if PH[a] == PH4:
        PH[b] = PH4


@njit(cache=True)
def _reset(x, L, PH, MO, C):
    L[x] = 1
    PH[x] = PH1
    MO[x] = 0
    C[x] = 1


@njit(cache=True)
def _cig_step(a, b, L, PH, MO, C, T, S):
    if T[a] == 1 and T[b] == 1:
        s = S[a] + S[b]
        T[b] = 0
        S[a] = s
        S[b] = s
        _reset(a, L, PH, MO, C)
        _reset(b, L, PH, MO, C)
    elif (T[a] == 1 and S[a] <= S[b]) or (T[b] == 1 and S[b] <= S[a]):
        t = T[a]
        T[a] = T[b]
        T[b] = t
        s = S[a]
        S[a] = S[b]
        S[b] = s
    elif S[a] > S[b]:
        T[b] = T[a]
        T[a] = 0
        S[b] = S[a]
        _reset(b, L, PH, MO, C)
    elif S[b] > S[a]:
        T[a] = T[b]
        T[b] = 0
        S[a] = S[b]
        _reset(a, L, PH, MO, C)
    if S[a] == S[b]:
        s = S[a]
        _ciw_step(a, b, s, L, PH, MO, C)
        if C[a] > s:
            C[a] = s
        if C[b] > s:
            C[b] = s


@njit(cache=True)
def _contrib(x, n, proto, PH, T, S, st, sign):
    if PH[x] == PH4:
        st[S_N4] += sign
    if proto == CIG:
        if S[x] == n:
            st[S_NSIZE] += sign
            if PH[x] == PH4:
                st[S_N4N] += sign
        if T[x] == 1:
            st[S_NTOK] += sign


@njit(cache=True)
def init_stats(proto, n, PH, T, S, st):
    st[:] = 0
    st[S_CERT_STEP] = -1
    st[S_CERT_ROUND] = -1
    st[S_FIRST_SIGHTING] = -1
    st[S_SIZE_STABLE_STEP] = -1
    for x in range(n):
        _contrib(x, n, proto, PH, T, S, st, 1)


@njit(cache=True)
def run_block(proto, n, k, L, PH, MO, G, C, T, S, src, dst, idx, seen, st,
              stop_at_certificate):
    """Apply the interactions ``idx`` (arc indices) in order.

    Returns the number of interactions consumed; stops early, just after
    the certifying interaction, when ``stop_at_certificate`` is set.
    """
    m = src.shape[0]
    for t in range(idx.shape[0]):
        i = idx[t]
        a = src[i]
        b = dst[i]
        # round bookkeeping: this interaction belongs to round completed+1
        this_round = st[S_COMPLETED_ROUNDS] + 1
        if seen[i] != st[S_ROUND_ID]:
            seen[i] = st[S_ROUND_ID]
            st[S_SEEN] += 1
            if st[S_SEEN] == m:
                st[S_COMPLETED_ROUNDS] += 1
                st[S_ROUND_ID] += 1
                st[S_SEEN] = 0
        _contrib(a, n, proto, PH, T, S, st, -1)
        _contrib(b, n, proto, PH, T, S, st, -1)
        if proto == CIW_N:
            _ciw_step(a, b, n, L, PH, MO, C)
        elif proto == CIW_NK:
            _ciwk_step(a, b, n, k, L, PH, MO, G, C)
        else:
            _cig_step(a, b, L, PH, MO, C, T, S)
        _contrib(a, n, proto, PH, T, S, st, 1)
        _contrib(b, n, proto, PH, T, S, st, 1)
        st[S_STEPS] += 1
        step = st[S_STEPS]
        for x in (a, b):
            if C[x] > st[S_MAX_CNT]:
                st[S_MAX_CNT] = C[x]
            if S[x] > st[S_MAX_SIZE]:
                st[S_MAX_SIZE] = S[x]
        if proto == CIG:
            sighting = st[S_N4N] > 0
            certified = st[S_N4N] == n and st[S_NTOK] == 1
            if st[S_SIZE_STABLE_STEP] < 0 and st[S_NSIZE] == n and st[S_NTOK] == 1:
                st[S_SIZE_STABLE_STEP] = step
        else:
            sighting = st[S_N4] > 0
            certified = st[S_N4] == n
        if sighting:
            st[S_SIGHTINGS] += 1
            if st[S_FIRST_SIGHTING] < 0:
                st[S_FIRST_SIGHTING] = step
        if certified and st[S_CERT_STEP] < 0:
            st[S_CERT_STEP] = step
            st[S_CERT_ROUND] = this_round
            if stop_at_certificate:
                return t + 1
    return idx.shape[0]


@njit(cache=True)
def _parse_rounds(idx, m, seen, state, out):
    nout = 0
    for t in range(idx.shape[0]):
        i = idx[t]
        state[2] += 1
        if seen[i] != state[0]:
            seen[i] = state[0]
            state[1] += 1
            if state[1] == m:
                out[nout] = state[2]
                nout += 1
                state[0] += 1
                state[1] = 0
                state[2] = 0
    return nout


def parse_rounds(idx: np.ndarray, m: int, seen: np.ndarray, state: np.ndarray) -> list:
    """Greedy round parse over one chunk; ``seen``/``state`` carry across chunks."""
    out = np.empty(idx.shape[0], dtype=np.int64)
    k = _parse_rounds(idx, m, seen, state, out)
    return out[:k].tolist()
