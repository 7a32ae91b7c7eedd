"""Scalar-loop reference implementations used as independent test oracles.

Nothing here imports the library; every function is a direct transcription of
the textbook definition with explicit Python loops.
"""

import math

import numpy as np


def conv2d_loops(x, k, pad=((0, 0), (0, 0)), stride=(1, 1)):
    c_in, h, w = x.shape
    c_out, _, kh, kw = k.shape
    (p0, p1), (q0, q1) = pad
    xp = np.zeros((c_in, h + p0 + p1, w + q0 + q1))
    xp[:, p0 : p0 + h, q0 : q0 + w] = x
    ho = (h + p0 + p1 - kh) // stride[0] + 1
    wo = (w + q0 + q1 - kw) // stride[1] + 1
    out = np.zeros((c_out, ho, wo))
    for o in range(c_out):
        for r in range(ho):
            for c in range(wo):
                acc = 0.0
                for ci in range(c_in):
                    for i in range(kh):
                        for j in range(kw):
                            acc += k[o, ci, i, j] * xp[ci, r * stride[0] + i, c * stride[1] + j]
                out[o, r, c] = acc
    return out


def conv1d_loops(x, k, pad=(0, 0), stride=1):
    c_in, t = x.shape
    c_out, _, kw = k.shape
    xp = [[0.0] * pad[0] + list(row) + [0.0] * pad[1] for row in x]
    to = (t + pad[0] + pad[1] - kw) // stride + 1
    out = np.zeros((c_out, to))
    for o in range(c_out):
        for s in range(to):
            out[o, s] = sum(k[o, ci, j] * xp[ci][s * stride + j] for ci in range(c_in) for j in range(kw))
    return out


def _sig(v):
    return 1.0 / (1.0 + math.exp(-v))


def lstm_loops(x, w_ih, w_hh, b):
    """Per-unit scalar recurrence; gate order input, forget, candidate, output."""
    steps, feats = x.shape
    hidden = w_hh.shape[1]
    h = [0.0] * hidden
    c = [0.0] * hidden
    seq = []
    for t in range(steps):
        new_h, new_c = [], []
        for u in range(hidden):
            z = []
            for gate in range(4):
                row = gate * hidden + u
                acc = b[row]
                acc += sum(w_ih[row, f] * x[t, f] for f in range(feats))
                acc += sum(w_hh[row, v] * h[v] for v in range(hidden))
                z.append(acc)
            i, f, g, o = _sig(z[0]), _sig(z[1]), math.tanh(z[2]), _sig(z[3])
            cu = f * c[u] + i * g
            new_c.append(cu)
            new_h.append(o * math.tanh(cu))
        h, c = new_h, new_c
        seq.append(list(h))
    return np.array(seq)


def batchnorm_two_pass(x, gamma, beta, eps):
    """Channel axis 1; mean first, then variance around it."""
    out = np.empty_like(x)
    for ch in range(x.shape[1]):
        vals = x[:, ch].ravel()
        mu = sum(vals) / len(vals)
        var = sum((v - mu) ** 2 for v in vals) / len(vals)
        out[:, ch] = (x[:, ch] - mu) / math.sqrt(var + eps) * gamma[ch] + beta[ch]
    return out


def gap_loops(x):
    out = []
    for ch in range(x.shape[0]):
        vals = x[ch].ravel()
        total = 0.0
        for v in vals:
            total += v
        out.append(total / len(vals))
    return np.array(out)


def cross_entropy_direct(logits, labels):
    total = 0.0
    for row, lab in zip(logits, labels):
        m = max(row)
        lse = m + math.log(sum(math.exp(v - m) for v in row))
        total += lse - row[lab]
    return total / len(labels)


def pearson_direct(a, b):
    a = list(np.ravel(a))
    b = list(np.ravel(b))
    n = len(a)
    ma, mb = sum(a) / n, sum(b) / n
    cov = sum((x - ma) * (y - mb) for x, y in zip(a, b))
    va = sum((x - ma) ** 2 for x in a)
    vb = sum((y - mb) ** 2 for y in b)
    return cov / math.sqrt(va * vb)
