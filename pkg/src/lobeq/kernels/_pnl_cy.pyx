# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled fill/P&L kernel; semantics identical to ``_pnl_py``.

No fast-math, no reassociation: the accumulation order matches the Python
fallback exactly so results are bit-identical.
"""


def accumulate_pnl(const unsigned char[::1] is_jump,
                   const unsigned char[::1] it_wins,
                   const double[::1] jump_size,
                   const unsigned char[::1] noise_buy,
                   const double[::1] noise_mag,
                   const double[::1] drift,
                   const double[::1] x,
                   const double[::1] imm_ahead,
                   const double[::1] nmm_ahead,
                   const double[::1] eff_lvl,
                   const double[::1] nmm_lvl,
                   long long[::1] imm_n,
                   double[::1] imm_sum,
                   double[::1] imm_sumsq,
                   long long[::1] nmm_n,
                   double[::1] nmm_sum,
                   double[::1] nmm_sumsq,
                   double[::1] exec_vol,
                   long long[::1] counters):
    cdef Py_ssize_t n = is_jump.shape[0]
    cdef Py_ssize_t m = x.shape[0]
    cdef Py_ssize_t e, l
    cdef double b, q, d, g, rem, lvl, take
    cdef bint win
    cdef long long n_jumps = 0, n_wins = 0, n_buys = 0

    for e in range(n):
        if is_jump[e]:
            n_jumps += 1
            b = jump_size[e]
            win = it_wins[e]
            if win:
                n_wins += 1
            l = 0
            while l < m and x[l] < b:
                g = x[l] - b
                nmm_n[l] += 1
                nmm_sum[l] += g
                nmm_sumsq[l] += g * g
                if win:
                    imm_n[l] += 1
                    imm_sum[l] += g
                    imm_sumsq[l] += g * g
                l += 1
            l = 0
            while l < m and x[l] <= b:
                if win:
                    exec_vol[l] += eff_lvl[l]
                else:
                    exec_vol[l] += nmm_lvl[l]
                l += 1
        elif noise_buy[e]:
            n_buys += 1
            q = noise_mag[e]
            d = drift[e]
            l = 0
            while l < m and imm_ahead[l] < q:
                g = x[l] - d
                imm_n[l] += 1
                imm_sum[l] += g
                imm_sumsq[l] += g * g
                l += 1
            l = 0
            while l < m and nmm_ahead[l] < q:
                g = x[l] - d
                nmm_n[l] += 1
                nmm_sum[l] += g
                nmm_sumsq[l] += g * g
                l += 1
            rem = q
            l = 0
            while l < m and rem > 0.0:
                lvl = eff_lvl[l]
                take = lvl if lvl < rem else rem
                exec_vol[l] += take
                rem -= take
                l += 1

    counters[0] += n_jumps
    counters[1] += n_wins
    counters[2] += n_buys
