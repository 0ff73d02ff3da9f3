"""JIT-compiled inner-loop kernels.

Each kernel is a pure function of its array arguments: all randomness
arrives as pre-drawn uniforms in [0, 1), so the kernels are deterministic,
directly unit-testable with hand-built coin patterns, and identical in
behaviour whether or not numba is present (without numba they run as
plain Python, slowly but correctly).

Tour kernels operate on local vertex indices 0..L-1; callers map to and
from global vertex ids.
"""

from __future__ import annotations

import math

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True

    def _jit(fn):
        return njit(cache=True)(fn)

except ImportError:  # pragma: no cover - sandbox always has numba
    HAVE_NUMBA = False

    def _jit(fn):
        return fn


def _ordered_crossover(pa, pb, coins, c):
    # Heads (coins < c) keep the parent-A entry in A's order; the rest of
    # the result is B's entries not already taken, in B's order.
    n, length = pa.shape
    out = np.empty((n, length), np.int32)
    taken = np.zeros(length, np.bool_)
    for r in range(n):
        taken[:] = False
        k = 0
        for i in range(length):
            if coins[r, i] < c:
                v = pa[r, i]
                out[r, k] = v
                taken[v] = True
                k += 1
        for i in range(length):
            v = pb[r, i]
            if not taken[v]:
                out[r, k] = v
                k += 1
    return out


def _swap_mutation(tours, coins, targets, m):
    # Position i swaps with a uniform position when its coin comes up
    # heads; swaps apply in place left to right, so later coins see the
    # partially mutated row.
    n, length = tours.shape
    out = tours.copy()
    for r in range(n):
        for i in range(length):
            if coins[r, i] < m:
                j = int(targets[r, i] * length)
                if j >= length:
                    j = length - 1
                tmp = out[r, i]
                out[r, i] = out[r, j]
                out[r, j] = tmp
    return out


def _path_costs(tours, dist):
    n, length = tours.shape
    out = np.zeros(n)
    for r in range(n):
        s = 0.0
        for i in range(length - 1):
            s += dist[tours[r, i], tours[r, i + 1]]
        out[r] = s
    return out


def _softmax_pick(fitness, u):
    # Weights exp(f - max f); u holds one uniform per draw.
    n = fitness.shape[0]
    mx = fitness[0]
    for i in range(1, n):
        if fitness[i] > mx:
            mx = fitness[i]
    cum = np.empty(n)
    total = 0.0
    for i in range(n):
        total += np.exp(fitness[i] - mx)
        cum[i] = total
    k = u.shape[0]
    out = np.empty(k, np.int64)
    for j in range(k):
        x = u[j] * total
        lo, hi = 0, n - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if cum[mid] < x:
                lo = mid + 1
            else:
                hi = mid
        out[j] = lo
    return out


def _tournament_pick(fitness, cost, ids, rounds, size, u):
    # Each round partially Fisher-Yates-shuffles the remaining pool with
    # the round's uniforms, takes the best of the first `size` entries,
    # and removes the winner from the pool.  Fitness ties break to the
    # lower cost, then the lower id; fitness is a monotone transform of
    # cost, so the cost key only resolves ties where the exponential map
    # saturates in float64.
    n = fitness.shape[0]
    pool = np.arange(n)
    pn = n
    out = np.empty(rounds, np.int64)
    for r in range(rounds):
        ss = size if size < pn else pn
        for t in range(ss):
            j = t + int(u[r, t] * (pn - t))
            if j >= pn:
                j = pn - 1
            pool[t], pool[j] = pool[j], pool[t]
        best_pos = 0
        for t in range(1, ss):
            a, b = pool[t], pool[best_pos]
            if (
                fitness[a] > fitness[b]
                or (fitness[a] == fitness[b] and cost[a] < cost[b])
                or (fitness[a] == fitness[b] and cost[a] == cost[b] and ids[a] < ids[b])
            ):
                best_pos = t
        out[r] = pool[best_pos]
        pool[best_pos] = pool[pn - 1]
        pn -= 1
    return out


def _composite_terms(preds, ys, coeffs, lam1, lam2, gamma):
    # MSE/(2N) + lam1 * pinball(gamma)/N + lam2 * sum(a_k^2), one row per
    # candidate model.
    n, npts = preds.shape
    ncoef = coeffs.shape[1]
    out = np.empty(n)
    for r in range(n):
        sq = 0.0
        pin = 0.0
        for i in range(npts):
            res = ys[i] - preds[r, i]
            sq += res * res
            if res > 0.0:
                pin += gamma * res
            elif res < 0.0:
                pin -= (1.0 - gamma) * res
        l2 = 0.0
        for i in range(ncoef):
            l2 += coeffs[r, i] * coeffs[r, i]
        out[r] = sq / (2.0 * npts) + lam1 * pin / npts + lam2 * l2
    return out


def _repair_tours(tours, old_to_new, arrivals, u):
    # Drop departed vertices keeping order, then insert each arrival at a
    # uniform position of the growing row. old_to_new maps old local
    # indices to new ones, -1 for departed vertices.
    n, _ = tours.shape
    n_arr = arrivals.shape[0]
    n_keep = 0
    for v in old_to_new:
        if v >= 0:
            n_keep += 1
    new_len = n_keep + n_arr
    out = np.empty((n, new_len), np.int32)
    for r in range(n):
        k = 0
        for v in tours[r]:
            w = old_to_new[v]
            if w >= 0:
                out[r, k] = w
                k += 1
        for a in range(n_arr):
            pos = int(u[r, a] * (k + 1))
            if pos > k:
                pos = k
            for i in range(k, pos, -1):
                out[r, i] = out[r, i - 1]
            out[r, pos] = arrivals[a]
            k += 1
    return out


ordered_crossover_kernel = _jit(_ordered_crossover)
swap_mutation_kernel = _jit(_swap_mutation)
path_costs_kernel = _jit(_path_costs)
softmax_pick_kernel = _jit(_softmax_pick)
tournament_pick_kernel = _jit(_tournament_pick)
composite_terms_kernel = _jit(_composite_terms)
repair_tours_kernel = _jit(_repair_tours)


def _tsp_generation(
    genomes,
    fitness,
    cost,
    ids,
    next_id,
    u_sel,
    cross_u,
    partner_u,
    cross_coins,
    mut_coins,
    mut_targets,
    crossover_rate,
    point_prob,
    mutation_rate,
):
    # Fused softmax-selection generation for permutation genomes: gather
    # survivors (cloned repeats get fresh ids), build crossover pairs, and
    # stack survivors + offspring + mutants.  Composes the kernels above
    # on the same pre-drawn uniforms the generic engine path would use,
    # so both paths produce identical populations; this one just avoids
    # per-step array churn in the interpreter.
    n, length = genomes.shape
    k = u_sel.shape[0]
    n_off = cross_coins.shape[0]
    total = k + n_off + k

    sel_idx = softmax_pick_kernel(fitness, u_sel)
    out = np.empty((total, length), np.int32)
    out_ids = np.empty(total, np.int64)
    sur_fit = np.empty(k)
    sur_cost = np.empty(k)
    seen = np.zeros(n, np.bool_)
    nid = next_id
    for i in range(k):
        si = sel_idx[i]
        for t in range(length):
            out[i, t] = genomes[si, t]
        sur_fit[i] = fitness[si]
        sur_cost[i] = cost[si]
        if seen[si]:
            out_ids[i] = nid
            nid += 1
        else:
            seen[si] = True
            out_ids[i] = ids[si]

    if n_off > 0:
        pa = np.empty((n_off, length), np.int32)
        pb = np.empty((n_off, length), np.int32)
        row = 0
        for i in range(k):
            if cross_u[i] < crossover_rate:
                j = int(partner_u[i] * (k - 1))
                if j >= i:
                    j += 1
                for t in range(length):
                    pa[row, t] = out[i, t]
                    pb[row, t] = out[j, t]
                row += 1
        out[k : k + n_off] = ordered_crossover_kernel(pa, pb, cross_coins, point_prob)

    out[k + n_off :] = swap_mutation_kernel(out[:k], mut_coins, mut_targets, mutation_rate)
    for t in range(n_off + k):
        out_ids[k + t] = nid + t
    nid += n_off + k
    return out, sur_fit, sur_cost, out_ids, nid


tsp_generation_kernel = _jit(_tsp_generation)


def _tsp_eval(tours, dist, clamp):
    # Open-path weight per row, mapped to fitness exp(min(L/w, clamp));
    # zero-ish weights are floored at 1e-9 before dividing.
    cost = path_costs_kernel(tours, dist)
    n = cost.shape[0]
    length = tours.shape[1]
    fit = np.empty(n)
    for i in range(n):
        w = cost[i]
        if w < 1e-9:
            w = 1e-9
        e = length / w
        if e > clamp:
            e = clamp
        fit[i] = math.exp(e)
    return fit, cost


tsp_eval_kernel = _jit(_tsp_eval)


def _elite_and_cap(out, f2, c2, out_ids, elite_genome, elite_fitness, elite_cost, elite_id, cap):
    # Engine tail shared by the fused run loops: advance the best-ever
    # member under (fitness desc, cost asc, id asc), re-append it when the
    # generation lost it, then truncate to the cap keeping original order.
    tot = out.shape[0]
    length = out.shape[1]

    bi = 0
    for i in range(1, tot):
        if f2[i] > f2[bi] or (
            f2[i] == f2[bi]
            and (c2[i] < c2[bi] or (c2[i] == c2[bi] and out_ids[i] < out_ids[bi]))
        ):
            bi = i
    if f2[bi] > elite_fitness or (f2[bi] == elite_fitness and c2[bi] < elite_cost):
        elite_fitness = f2[bi]
        elite_cost = c2[bi]
        elite_id = out_ids[bi]
        elite_genome = out[bi].copy()

    found = False
    for i in range(tot):
        if out_ids[i] == elite_id:
            found = True
            break
    if found:
        g3, f3, c3, i3 = out, f2, c2, out_ids
        size3 = tot
    else:
        size3 = tot + 1
        g3 = np.empty((size3, length), out.dtype)
        f3 = np.empty(size3)
        c3 = np.empty(size3)
        i3 = np.empty(size3, np.int64)
        g3[:tot] = out
        f3[:tot] = f2
        c3[:tot] = c2
        i3[:tot] = out_ids
        g3[tot] = elite_genome
        f3[tot] = elite_fitness
        c3[tot] = elite_cost
        i3[tot] = elite_id

    if size3 > cap:
        boundary = np.partition(f3, size3 - cap)[size3 - cap]
        keep = np.zeros(size3, np.bool_)
        n_keep = 0
        for i in range(size3):
            if f3[i] > boundary:
                keep[i] = True
                n_keep += 1
        short = cap - n_keep
        if short > 0:
            tcount = 0
            for i in range(size3):
                if f3[i] == boundary:
                    tcount += 1
            tied = np.empty(tcount, np.int64)
            tcost = np.empty(tcount)
            tids = np.empty(tcount, np.int64)
            w = 0
            for i in range(size3):
                if f3[i] == boundary:
                    tied[w] = i
                    tcost[w] = c3[i]
                    tids[w] = i3[i]
                    w += 1
            o1 = np.argsort(tids, kind="mergesort")
            o2 = np.argsort(tcost[o1], kind="mergesort")
            for j in range(short):
                keep[tied[o1[o2[j]]]] = True
        g4 = np.empty((cap, length), out.dtype)
        f4 = np.empty(cap)
        c4 = np.empty(cap)
        i4 = np.empty(cap, np.int64)
        w = 0
        for i in range(size3):
            if keep[i]:
                g4[w] = g3[i]
                f4[w] = f3[i]
                c4[w] = c3[i]
                i4[w] = i3[i]
                w += 1
        return g4, f4, c4, i4, elite_genome, elite_fitness, elite_cost, elite_id
    return g3, f3, c3, i3, elite_genome, elite_fitness, elite_cost, elite_id


elite_and_cap_kernel = _jit(_elite_and_cap)


def _tsp_run(
    genomes,
    fitness,
    cost,
    ids,
    next_id,
    elite_genome,
    elite_fitness,
    elite_cost,
    elite_id,
    dist,
    clamp,
    generations,
    keep_fraction,
    crossover_rate,
    point_prob,
    mutation_rate,
    cap,
    rng,
):
    # Whole training run in one call: per generation, draw the uniforms in
    # the order the generic engine path draws them, build the generation
    # with the fused kernel above, evaluate the new rows, advance the
    # best-ever member (re-appending it when truncation or selection lost
    # it), and truncate to the cap under (fitness desc, cost asc, id asc)
    # keeping original order.  Callers guarantee the population floor can
    # never trigger (keep_fraction >= 0.5 and size >= floor), which is the
    # one engine branch this loop does not reproduce.
    for _ in range(generations):
        n = genomes.shape[0]
        length = genomes.shape[1]
        k = int(math.ceil(round(keep_fraction * n, 9)))
        u = rng.random(3 * k)
        u_sel = u[:k]
        cross_u = u[k : 2 * k]
        partner_u = u[2 * k :]
        n_off = 0
        if k > 1 and crossover_rate > 0.0:
            for i in range(k):
                if cross_u[i] < crossover_rate:
                    n_off += 1
        if n_off > 0:
            cross_coins = rng.random((n_off, length))
        else:
            cross_coins = np.empty((0, length))
        mut_coins = rng.random((k, length))
        mut_targets = rng.random((k, length))
        out, sur_fit, sur_cost, out_ids, nid = tsp_generation_kernel(
            genomes,
            fitness,
            cost,
            ids,
            next_id,
            u_sel,
            cross_u,
            partner_u,
            cross_coins,
            mut_coins,
            mut_targets,
            crossover_rate,
            point_prob,
            mutation_rate,
        )
        next_id = nid
        tot = out.shape[0]
        new_fit, new_cost = tsp_eval_kernel(out[k:], dist, clamp)
        f2 = np.empty(tot)
        c2 = np.empty(tot)
        for i in range(k):
            f2[i] = sur_fit[i]
            c2[i] = sur_cost[i]
        for i in range(tot - k):
            f2[k + i] = new_fit[i]
            c2[k + i] = new_cost[i]

        genomes, fitness, cost, ids, elite_genome, elite_fitness, elite_cost, elite_id = (
            elite_and_cap_kernel(out, f2, c2, out_ids, elite_genome, elite_fitness, elite_cost, elite_id, cap)
        )
    return genomes, fitness, cost, ids, next_id, elite_genome, elite_fitness, elite_cost, elite_id


tsp_run_kernel = _jit(_tsp_run)


def _reg_eval(genomes, vander_t, ys, lam1, lam2, gamma):
    # Composite objective and exp(-cost) fitness per coefficient row.
    # vander_t is the design matrix transposed to (width, points) so the
    # prediction accumulation streams contiguously over points; the
    # objective terms then reduce over points in ascending order, the
    # same order composite_terms uses.
    n, width = genomes.shape
    npts = vander_t.shape[1]
    fit = np.empty(n)
    cost = np.empty(n)
    acc = np.empty(npts)
    for r in range(n):
        for i in range(npts):
            acc[i] = 0.0
        for w in range(width):
            g = genomes[r, w]
            for i in range(npts):
                acc[i] += g * vander_t[w, i]
        sq = 0.0
        pin = 0.0
        for i in range(npts):
            res = ys[i] - acc[i]
            sq += res * res
            if res > 0.0:
                pin += gamma * res
            elif res < 0.0:
                pin -= (1.0 - gamma) * res
        l2 = 0.0
        for w in range(width):
            l2 += genomes[r, w] * genomes[r, w]
        c = sq / (2.0 * npts) + lam1 * pin / npts + lam2 * l2
        cost[r] = c
        fit[r] = math.exp(-c)
    return fit, cost


reg_eval_kernel = _jit(_reg_eval)


def _reg_run(
    genomes,
    fitness,
    cost,
    ids,
    next_id,
    elite_genome,
    elite_fitness,
    elite_cost,
    elite_id,
    vander_t,
    ys,
    lam1,
    lam2,
    gamma,
    generations,
    keep_fraction,
    sample_fraction,
    crossover_rate,
    point_prob,
    mutation_rate,
    mutation_std,
    cap,
    rng,
):
    # Whole coefficient-GA training run in one call, mirroring the generic
    # engine path for tournament selection: same draw order, same
    # operators (per-locus swap crossover, additive Gaussian mutation),
    # same elite-and-cap tail.  Callers guarantee the population floor
    # can never trigger.
    for _ in range(generations):
        n = genomes.shape[0]
        width = genomes.shape[1]
        k = int(math.ceil(round(keep_fraction * n, 9)))
        size = int(math.ceil(round(sample_fraction * n, 9)))
        sel_n = k * size
        u = rng.random(sel_n + 2 * k)
        sel_idx = tournament_pick_kernel(fitness, cost, ids, k, size, u[:sel_n].reshape((k, size)))
        cross_u = u[sel_n : sel_n + k]
        partner_u = u[sel_n + k :]

        n_off = 0
        if k > 1 and crossover_rate > 0.0:
            for i in range(k):
                if cross_u[i] < crossover_rate:
                    n_off += 1
        tot = k + n_off + k
        out = np.empty((tot, width))
        out_ids = np.empty(tot, np.int64)
        f2 = np.empty(tot)
        c2 = np.empty(tot)
        for i in range(k):
            si = sel_idx[i]
            for w in range(width):
                out[i, w] = genomes[si, w]
            out_ids[i] = ids[si]
            f2[i] = fitness[si]
            c2[i] = cost[si]

        if n_off > 0:
            coins = rng.random((n_off, width))
            row = k
            ri = 0
            for i in range(k):
                if cross_u[i] < crossover_rate:
                    j = int(partner_u[i] * (k - 1))
                    if j >= i:
                        j += 1
                    for w in range(width):
                        if coins[ri, w] < point_prob:
                            out[row, w] = out[j, w]
                        else:
                            out[row, w] = out[i, w]
                    row += 1
                    ri += 1

        mut_coins = rng.random((k, width))
        noise = rng.normal(0.0, mutation_std, (k, width))
        for i in range(k):
            for w in range(width):
                hit = 1.0 if mut_coins[i, w] < mutation_rate else 0.0
                out[k + n_off + i, w] = out[i, w] + hit * noise[i, w]

        for t in range(n_off + k):
            out_ids[k + t] = next_id + t
        next_id += n_off + k

        new_fit, new_cost = reg_eval_kernel(out[k:], vander_t, ys, lam1, lam2, gamma)
        for i in range(tot - k):
            f2[k + i] = new_fit[i]
            c2[k + i] = new_cost[i]

        genomes, fitness, cost, ids, elite_genome, elite_fitness, elite_cost, elite_id = (
            elite_and_cap_kernel(out, f2, c2, out_ids, elite_genome, elite_fitness, elite_cost, elite_id, cap)
        )
    return genomes, fitness, cost, ids, next_id, elite_genome, elite_fitness, elite_cost, elite_id


reg_run_kernel = _jit(_reg_run)
