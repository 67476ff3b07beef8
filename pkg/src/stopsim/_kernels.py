"""Compiled inner loops of the two-phase insertion search.

These functions evaluate, for one vehicle, the best position to insert a new
pick-up into the current schedule and then the best later position for the
matching drop-off, exactly as the object-level API defines it, but over flat
coordinate arrays so a whole fleet can be scanned per request in microseconds.

The evaluation is incremental: one prefix pass yields the completion time,
occupancy and validity up to every position, one suffix pass yields the
tightest downstream window margin and occupancy extrema, after which every
candidate position is O(1).  Inserting a stop delays every later stop by the
same amount, so a single comparison against the suffix bounds decides
feasibility.  Time accumulation uses the same operation order as the
reference implementation in :mod:`stopsim.scheduling`, keeping the two paths
bit-identical.

The fleet scan takes a caller-supplied scan order plus per-vehicle lower
bounds on the remaining schedule cost.  Any insertion adds at least the two
dwell times, so once the next vehicle's bound plus dwells exceeds the best
cost found (beyond a small guard) the scan stops.  Bounds of zero disable
the pruning; with valid lower bounds the result is identical to a full scan,
including ties, which always resolve to the smallest pick-up position, then
drop-off position, then vehicle index.

Positions are 0-based here; the public API converts to 1-based.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# slack added to the pruning threshold so that accumulated float drift in the
# maintained cost bounds can never skip a true winner or an exact tie
PRUNE_GUARD = 1e-6


@njit(cache=True)
def _scan_insertion(
    px, py, t0, n0,
    sx, sy, st, sd, srho, n,
    xx, xy, xt, xdt, xrho,
    lo,
    speed, b_pick, b_drop, t_loss, cap,
    that, moves, occ, okpref, sfx_margin, sfx_need, sfx_omin, sfx_omax,
):
    """Best position >= ``lo`` to insert one stop point into one schedule.

    Returns ``(cost, position)`` of the cheapest feasible tentative schedule,
    ties to the smallest position, or ``(inf, -1)`` if none is feasible.
    ``cost`` is the full execution time of the tentative schedule from the
    vehicle's current position.  The trailing arguments are scratch arrays of
    length at least ``n + 1``.
    """
    xb = b_pick if xrho > 0 else b_drop

    t = t0
    o = n0
    prevx = px
    prevy = py
    ok = True
    okpref[0] = True
    for k in range(n):
        d = abs(sx[k] - prevx) + abs(sy[k] - prevy)
        mv = 0.0
        if d > 0.0:
            mv = d / speed + t_loss
            t = t + d / speed + t_loss
        if srho[k] > 0:
            t = t + b_pick
        else:
            t = t + b_drop
        o = o + srho[k]
        that[k] = t
        moves[k] = mv
        occ[k] = o
        if not (st[k] <= t and t < st[k] + sd[k] and 0 <= o and o < cap):
            ok = False
        okpref[k + 1] = ok
        prevx = sx[k]
        prevy = sy[k]

    base = that[n - 1] - t0 if n > 0 else 0.0

    # tightest bounds over the suffix k >= i: inserting at i shifts every
    # later completion by the same delta and every later occupancy by xrho
    sfx_margin[n] = np.inf
    sfx_need[n] = -np.inf
    sfx_omin[n] = np.int64(1) << 60
    sfx_omax[n] = -(np.int64(1) << 60)
    for k in range(n - 1, -1, -1):
        m = st[k] + sd[k] - that[k]
        w = st[k] - that[k]
        sfx_margin[k] = m if m < sfx_margin[k + 1] else sfx_margin[k + 1]
        sfx_need[k] = w if w > sfx_need[k + 1] else sfx_need[k + 1]
        sfx_omin[k] = occ[k] if occ[k] < sfx_omin[k + 1] else sfx_omin[k + 1]
        sfx_omax[k] = occ[k] if occ[k] > sfx_omax[k + 1] else sfx_omax[k + 1]

    best_c = np.inf
    best_i = -1
    for i in range(lo, n + 1):
        if not okpref[i]:
            break
        if i > 0:
            prx = sx[i - 1]
            pry = sy[i - 1]
            tprev = that[i - 1]
            oprev = occ[i - 1]
        else:
            prx = px
            pry = py
            tprev = t0
            oprev = np.int64(n0)
        # completion times grow along the schedule, so once even a zero-move
        # insertion would close the window every later position fails too
        if tprev + xb >= xt + xdt:
            break
        dx = abs(xx - prx) + abs(xy - pry)
        tx = tprev
        mvx = 0.0
        if dx > 0.0:
            mvx = dx / speed + t_loss
            tx = tx + dx / speed + t_loss
        tx = tx + xb
        if not (xt <= tx and tx < xt + xdt):
            continue
        ox = oprev + xrho
        if not (0 <= ox and ox < cap):
            continue
        if i < n:
            dn = abs(sx[i] - xx) + abs(sy[i] - xy)
            mvn = dn / speed + t_loss if dn > 0.0 else 0.0
            delta = mvx + xb + mvn - moves[i]
            if not (delta >= sfx_need[i] and delta < sfx_margin[i]):
                continue
            if not (sfx_omax[i] + xrho < cap and sfx_omin[i] + xrho >= 0):
                continue
            c = base + delta
        else:
            c = base + mvx + xb
        if c < best_c:
            best_c = c
            best_i = i
    return best_c, best_i


@njit(cache=True)
def _eval_vehicle(
    px, py, t0, n0,
    cx, cy, ct, cd, cr, n,
    ax, ay, at, adt,
    bx, by, bt, bdt,
    speed, b_pick, b_drop, t_loss, cap,
    that, moves, occ, okpref, sfx_margin, sfx_need, sfx_omin, sfx_omax,
    tx_, ty_, tt_, td_, tr_,
):
    """Two-phase insertion of a pick-up/drop-off pair into one vehicle's schedule.

    Phase 1 fixes the cheapest feasible pick-up position, phase 2 then picks
    the cheapest feasible drop-off position strictly after it; the phases are
    greedy and sequential, never jointly optimized.  Returns ``(cost,
    pickup_pos, dropoff_pos)`` with 0-based positions, or ``(inf, -1, -1)``.
    ``cx..cr`` hold the current schedule; scratch arrays must hold at least
    ``n + 2`` elements.
    """
    c1, i = _scan_insertion(
        px, py, t0, n0,
        cx, cy, ct, cd, cr, n,
        ax, ay, at, adt, np.int8(1), 0,
        speed, b_pick, b_drop, t_loss, cap,
        that, moves, occ, okpref, sfx_margin, sfx_need, sfx_omin, sfx_omax,
    )
    if i < 0:
        return np.inf, -1, -1

    for k in range(i):
        tx_[k] = cx[k]
        ty_[k] = cy[k]
        tt_[k] = ct[k]
        td_[k] = cd[k]
        tr_[k] = cr[k]
    tx_[i] = ax
    ty_[i] = ay
    tt_[i] = at
    td_[i] = adt
    tr_[i] = 1
    for k in range(i, n):
        tx_[k + 1] = cx[k]
        ty_[k + 1] = cy[k]
        tt_[k + 1] = ct[k]
        td_[k + 1] = cd[k]
        tr_[k + 1] = cr[k]

    c2, j = _scan_insertion(
        px, py, t0, n0,
        tx_, ty_, tt_, td_, tr_, n + 1,
        bx, by, bt, bdt, np.int8(-1), i + 1,
        speed, b_pick, b_drop, t_loss, cap,
        that, moves, occ, okpref, sfx_margin, sfx_need, sfx_omin, sfx_omax,
    )
    if j < 0:
        return np.inf, -1, -1
    return c2, i, j


@njit(cache=True)
def eval_vehicle(
    px, py, t0, n0,
    sx, sy, st, sd, srho,
    ax, ay, at, adt,
    bx, by, bt, bdt,
    speed, b_pick, b_drop, t_loss, cap,
):
    """Allocating convenience wrapper around :func:`_eval_vehicle`."""
    n = sx.shape[0]
    that = np.empty(n + 2)
    moves = np.empty(n + 2)
    occ = np.empty(n + 2, np.int64)
    okpref = np.empty(n + 3, np.bool_)
    sfx_margin = np.empty(n + 2)
    sfx_need = np.empty(n + 2)
    sfx_omin = np.empty(n + 2, np.int64)
    sfx_omax = np.empty(n + 2, np.int64)
    tx_ = np.empty(n + 1)
    ty_ = np.empty(n + 1)
    tt_ = np.empty(n + 1)
    td_ = np.empty(n + 1)
    tr_ = np.empty(n + 1, np.int8)
    return _eval_vehicle(
        px, py, t0, n0,
        sx, sy, st, sd, srho, n,
        ax, ay, at, adt, bx, by, bt, bdt,
        speed, b_pick, b_drop, t_loss, cap,
        that, moves, occ, okpref, sfx_margin, sfx_need, sfx_omin, sfx_omax,
        tx_, ty_, tt_, td_, tr_,
    )


@njit(cache=True)
def best_assignment(
    AX, AY, AT, N0, NL, HH,
    SX, SY, ST, SD, SR,
    order, bounds, now,
    ax, ay, at, adt,
    bx, by, bt, bdt,
    speed, b_pick, b_drop, t_loss, cap,
):
    """Scan the fleet in ``order`` and return the cheapest feasible insertion.

    Schedules live in padded row arrays; row ``v`` holds ``NL[v]`` stops
    starting at column ``HH[v]``.  Vehicles are evaluated from their position
    at ``now``, interpolated along the current leg (x segment before y,
    uniform over the leg's movement time).  ``bounds[v]`` must be a lower
    bound on the cost of vehicle ``v``'s current schedule evaluated from that
    position; with ``order`` ascending in ``bounds`` the scan stops early.
    Returns ``(vehicle, pickup_pos, dropoff_pos, cost, pos_x, pos_y)`` where
    the last two are the winner's interpolated position, or ``(-1, -1, -1,
    inf, 0, 0)`` when no vehicle can serve the pair.
    """
    maxn = 0
    for v in range(NL.shape[0]):
        if NL[v] > maxn:
            maxn = NL[v]
    that = np.empty(maxn + 2)
    moves = np.empty(maxn + 2)
    occ = np.empty(maxn + 2, np.int64)
    okpref = np.empty(maxn + 3, np.bool_)
    sfx_margin = np.empty(maxn + 2)
    sfx_need = np.empty(maxn + 2)
    sfx_omin = np.empty(maxn + 2, np.int64)
    sfx_omax = np.empty(maxn + 2, np.int64)
    tx_ = np.empty(maxn + 1)
    ty_ = np.empty(maxn + 1)
    tt_ = np.empty(maxn + 1)
    td_ = np.empty(maxn + 1)
    tr_ = np.empty(maxn + 1, np.int8)

    # the direct stop-to-stop move is a lower bound on any pick-up to
    # drop-off progression inside a tentative schedule
    d_ab = abs(bx - ax) + abs(by - ay)
    mv_ab = d_ab / speed + t_loss if d_ab > 0.0 else 0.0

    min_added = b_pick + b_drop
    best_c = np.inf
    best_v = -1
    best_i = -1
    best_j = -1
    best_px = 0.0
    best_py = 0.0
    for idx in range(order.shape[0]):
        v = order[idx]
        if bounds[v] + min_added > best_c + PRUNE_GUARD:
            break
        h = HH[v]
        n = NL[v]
        px = AX[v]
        py = AY[v]
        if n > 0:
            hx = SX[v, h]
            hy = SY[v, h]
            ddx = hx - px
            ddy = hy - py
            d = abs(ddx) + abs(ddy)
            if d > 0.0:
                m = d / speed + t_loss
                frac = (now - AT[v]) / m
                if frac < 0.0:
                    frac = 0.0
                elif frac > 1.0:
                    frac = 1.0
                trav = frac * d
                adx = abs(ddx)
                gx = trav if trav < adx else adx
                rem = trav - adx
                if rem < 0.0:
                    rem = 0.0
                ady = abs(ddy)
                gy = rem if rem < ady else ady
                sgnx = 1.0 if ddx > 0.0 else (-1.0 if ddx < 0.0 else 0.0)
                sgny = 1.0 if ddy > 0.0 else (-1.0 if ddy < 0.0 else 0.0)
                px = px + sgnx * gx
                py = py + sgny * gy

        # cheapest conceivable completion times: reject without scanning when
        # even they fall past the (strict) window closes, and skip vehicles
        # that provably cannot beat the best tentative cost found so far
        d0 = abs(ax - px) + abs(ay - py)
        earliest_pick = now
        if d0 > 0.0:
            earliest_pick = earliest_pick + d0 / speed + t_loss
        earliest_pick = earliest_pick + b_pick
        if earliest_pick >= at + adt:
            continue
        if earliest_pick + mv_ab + b_drop >= bt + bdt:
            continue
        if earliest_pick - now + mv_ab + b_drop > best_c + PRUNE_GUARD:
            continue

        e = h + n
        c, i, j = _eval_vehicle(
            px, py, now, N0[v],
            SX[v, h:e], SY[v, h:e], ST[v, h:e], SD[v, h:e], SR[v, h:e], n,
            ax, ay, at, adt, bx, by, bt, bdt,
            speed, b_pick, b_drop, t_loss, cap,
            that, moves, occ, okpref, sfx_margin, sfx_need, sfx_omin, sfx_omax,
            tx_, ty_, tt_, td_, tr_,
        )
        if c < best_c or (c == best_c and v < best_v):
            best_c = c
            best_v = v
            best_i = i
            best_j = j
            best_px = px
            best_py = py
    return best_v, best_i, best_j, best_c, best_px, best_py
