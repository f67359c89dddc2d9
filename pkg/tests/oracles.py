"""Independent reference implementations used as test oracles.

Nothing here imports from the package under test.
"""

import math


def pseudocode_hysteresis(steps, ss_high, scaling, delta, q_high, q_low, q_init):
    """Straight-line transcription of the signal-strength hysteresis listing.

    ``steps`` is a sequence of ``("hello", ss)`` and ``("miss", None)``
    items applied to an already-created table entry. Returns one
    ``(quality, pending, sum_sig_var, status)`` tuple per step.
    """
    Link_quality = q_init
    Link_pending = True
    Sum_sig_var = 0.0
    Last_ss = None
    status = "Pending"
    trace = []
    for kind, ss in steps:
        if kind == "hello":
            if ss > ss_high:
                Link_quality = (1 - scaling) * Link_quality + scaling
            else:
                if Link_pending == False:
                    Sum_sig_var += (Last_ss - ss) if Last_ss is not None else 0.0
                    if Sum_sig_var >= delta:
                        Link_quality = scaling * Link_quality
                        Sum_sig_var = 0
                if Link_pending == True:
                    Sum_sig_var += (ss - Last_ss) if Last_ss is not None else 0.0
                    if Sum_sig_var >= delta:
                        Link_quality = min(q_high, (1 - scaling) * Link_quality + scaling)
                        Sum_sig_var = 0
            Last_ss = ss
        else:
            Link_quality = (1 - scaling) * Link_quality
        # change the status on a threshold crossing and reinitialize the accumulator
        if Link_quality >= q_high and status != "Valid":
            status = "Valid"
            Link_pending = False
            Sum_sig_var = 0
        elif Link_quality <= q_low and status == "Valid":
            status = "Invalid"
            Link_pending = True
            Sum_sig_var = 0
        trace.append((Link_quality, Link_pending, float(Sum_sig_var), status))
    return trace


def friis_dbm(pt_dbm, freq_hz, d, gt=1.0, gr=1.0, loss=1.0):
    lam = 299_792_458.0 / freq_hz
    pt_mw = 10 ** (pt_dbm / 10)
    return 10 * math.log10(pt_mw * gt * gr * lam**2 / ((4 * math.pi) ** 2 * d**2 * loss))


def two_ray_far_dbm(pt_dbm, ht, hr, d, gt=1.0, gr=1.0, loss=1.0):
    pt_mw = 10 ** (pt_dbm / 10)
    return 10 * math.log10(pt_mw * gt * gr * ht**2 * hr**2 / (d**4 * loss))


def hop_counts_bfs(adjacency, root):
    """Plain BFS hop counts over an undirected adjacency dict."""
    dist = {root: 0}
    queue = [root]
    for u in queue:
        for v in adjacency.get(u, ()):
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist
