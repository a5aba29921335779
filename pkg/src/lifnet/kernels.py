"""Hot loops: the three-layer LIF time stepping and plug-in entropy counts.

Each kernel exists twice. The ``_nb`` version is an explicit loop compiled by
numba that only touches weight rows of channels that actually spiked. The
``_np`` version is vectorized numpy (one matmul per layer, a python loop over
timesteps). ``lif_forward`` and ``plugin_entropies`` dispatch on the active
backend, see :mod:`lifnet._accel`.
"""

import numpy as np

from lifnet import _accel
from lifnet._accel import njit


@njit
def _layer_nb(spk_in, w, v, decay, gain, bias, v_th, v_reset, spiking, s_out, m_out):
    n_in, n_out = w.shape
    cur = np.zeros(n_out)
    for i in range(n_in):
        if spk_in[i] != 0:
            for j in range(n_out):
                cur[j] += w[i, j]
    for j in range(n_out):
        vj = decay * v[j] + gain * cur[j] + bias
        m_out[j] = vj
        if vj >= v_th:
            s_out[j] = 1
            v[j] = v_reset if spiking else vj
        else:
            v[j] = vj


@njit
def _forward_nb(x, w1, w2, w3, decay, gain, bias, v_th, v_reset, out_spiking):
    t_steps = x.shape[0]
    h1 = w1.shape[1]
    h2 = w2.shape[1]
    n_out = w3.shape[1]
    s1 = np.zeros((t_steps, h1), np.uint8)
    s2 = np.zeros((t_steps, h2), np.uint8)
    s3 = np.zeros((t_steps, n_out), np.uint8)
    m1 = np.empty((t_steps, h1))
    m2 = np.empty((t_steps, h2))
    m3 = np.empty((t_steps, n_out))
    v1 = np.zeros(h1)
    v2 = np.zeros(h2)
    v3 = np.zeros(n_out)
    for t in range(t_steps):
        _layer_nb(x[t], w1, v1, decay[0], gain[0], bias[0], v_th[0], v_reset[0],
                  True, s1[t], m1[t])
        _layer_nb(s1[t], w2, v2, decay[1], gain[1], bias[1], v_th[1], v_reset[1],
                  True, s2[t], m2[t])
        _layer_nb(s2[t], w3, v3, decay[2], gain[2], bias[2], v_th[2], v_reset[2],
                  out_spiking, s3[t], m3[t])
    return s1, s2, s3, m1, m2, m3


def _layer_np(spk_in, w, decay, gain, bias, v_th, v_reset, spiking):
    currents = spk_in.astype(np.float64) @ w
    t_steps, n_out = currents.shape
    spikes = np.zeros((t_steps, n_out), np.uint8)
    trace = np.empty((t_steps, n_out))
    v = np.zeros(n_out)
    for t in range(t_steps):
        v = decay * v + gain * currents[t] + bias
        trace[t] = v
        fired = v >= v_th
        spikes[t] = fired
        if spiking:
            v = np.where(fired, v_reset, v)
    return spikes, trace


def _forward_np(x, w1, w2, w3, decay, gain, bias, v_th, v_reset, out_spiking):
    out = []
    spk = x
    for k, (w, spiking) in enumerate(((w1, True), (w2, True), (w3, out_spiking))):
        spk, trace = _layer_np(spk, w, decay[k], gain[k], bias[k], v_th[k],
                               v_reset[k], spiking)
        out.append((spk, trace))
    (s1, m1), (s2, m2), (s3, m3) = out
    return s1, s2, s3, m1, m2, m3


def lif_forward(x, w1, w2, w3, decay, gain, bias, v_th, v_reset, out_spiking):
    """Run the input raster ``x`` (T x d, binary) through three LIF layers.

    Per-layer parameters are length-3 float arrays ordered (hidden 1,
    hidden 2, output). Returns ``(s1, s2, s3, m1, m2, m3)``: uint8 spike
    rasters and float membrane traces, the traces holding the integrated
    potential before any reset. With ``out_spiking`` false the output layer
    never resets and ``s3`` only marks steps where it sat at or above
    threshold.
    """
    args = (np.ascontiguousarray(x), np.ascontiguousarray(w1, dtype=np.float64),
            np.ascontiguousarray(w2, dtype=np.float64),
            np.ascontiguousarray(w3, dtype=np.float64),
            decay, gain, bias, v_th, v_reset, bool(out_spiking))
    if _accel.BACKEND == "numba":
        return _forward_nb(*args)
    return _forward_np(*args)


@njit
def _entropies_nb(a, b, ka, kb):
    n = a.shape[0]
    joint = np.zeros((ka, kb))
    for t in range(n):
        joint[a[t], b[t]] += 1.0
    pa = np.zeros(ka)
    pb = np.zeros(kb)
    h_ab = 0.0
    for i in range(ka):
        for j in range(kb):
            c = joint[i, j]
            if c > 0:
                p = c / n
                h_ab -= p * np.log2(p)
                pa[i] += c
                pb[j] += c
    h_a = 0.0
    for i in range(ka):
        if pa[i] > 0:
            p = pa[i] / n
            h_a -= p * np.log2(p)
    h_b = 0.0
    for j in range(kb):
        if pb[j] > 0:
            p = pb[j] / n
            h_b -= p * np.log2(p)
    return h_a, h_b, h_ab


def _entropy_from_counts(counts):
    p = counts[counts > 0] / counts.sum()
    return float(-(p * np.log2(p)).sum())


def _entropies_np(a, b, ka, kb):
    joint = np.bincount(a * kb + b, minlength=ka * kb).reshape(ka, kb).astype(np.float64)
    return (_entropy_from_counts(joint.sum(axis=1)),
            _entropy_from_counts(joint.sum(axis=0)),
            _entropy_from_counts(joint.ravel()))


def plugin_entropies(a, b, ka, kb):
    """Plug-in Shannon entropies in bits of two paired symbol sequences.

    ``a`` takes values in ``range(ka)`` and ``b`` in ``range(kb)``. Returns
    ``(H(a), H(b), H(a, b))``.
    """
    a = np.ascontiguousarray(a, dtype=np.int64)
    b = np.ascontiguousarray(b, dtype=np.int64)
    if _accel.BACKEND == "numba":
        return _entropies_nb(a, b, int(ka), int(kb))
    return _entropies_np(a, b, int(ka), int(kb))
