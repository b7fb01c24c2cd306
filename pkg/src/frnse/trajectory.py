"""Time-sampled solutions: node fields, diagnostics, norm-law residuals."""

from dataclasses import dataclass

import numpy as np

from .grid import h1_norm, l2_norm
from .nonlinear import big_g1


@dataclass(frozen=True)
class Trajectory:
    """A solution sampled at increasing times t_0 < ... < t_m.

    All fields share one grid. Node times need not be uniform (the adaptive
    stepper produces nonuniform snapshots); the fixed-point solver always
    builds uniform ones.
    """

    times: tuple
    fields: tuple

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        fields = tuple(self.fields)
        if len(times) != len(fields):
            raise ValueError("times and fields length mismatch")
        if not fields:
            raise ValueError("trajectory needs at least one node")
        spec = fields[0].spec
        for f in fields:
            if f.spec != spec:
                raise ValueError("trajectory fields live on different grids")
        if any(t1 >= t2 for t1, t2 in zip(times, times[1:])):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "fields", fields)

    @property
    def spec(self):
        return self.fields[0].spec

    def __len__(self):
        return len(self.fields)

    def final(self):
        return self.fields[-1]

    def is_finite(self):
        return all(f.is_finite() for f in self.fields)

    def diagnostics(self, kspec):
        """Per-node (t, l2, h1, G1) arrays."""
        t = np.array(self.times)
        l2 = np.array([l2_norm(f) for f in self.fields])
        h1 = np.array([h1_norm(f) for f in self.fields])
        g1v = np.array([big_g1(f, kspec) for f in self.fields])
        return t, l2, h1, g1v


def sup_h1_distance(fields_a, fields_b):
    """max over nodes of ||a_j - b_j||_H1 (the discretized X-norm distance)."""
    if len(fields_a) != len(fields_b):
        raise ValueError("node count mismatch")
    return max(h1_norm(a - b) for a, b in zip(fields_a, fields_b))


def dot_values(times, values):
    """Second-order time derivative estimates on (possibly nonuniform) nodes.

    Interior nodes use the three-point nonuniform central stencil; the
    endpoints use one-sided three-point stencils. Needs at least 3 nodes.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    if t.shape != y.shape or t.ndim != 1 or len(t) < 3:
        raise ValueError("need matching 1D arrays with at least 3 nodes")
    out = np.empty_like(y)
    hl = t[1:-1] - t[:-2]
    hr = t[2:] - t[1:-1]
    out[1:-1] = (
        hl**2 * y[2:] - hr**2 * y[:-2] + (hr**2 - hl**2) * y[1:-1]
    ) / (hl * hr * (hl + hr))
    # one-sided second-order endpoints
    h0, h1_ = t[1] - t[0], t[2] - t[1]
    out[0] = (
        -(2 * h0 + h1_) / (h0 * (h0 + h1_)) * y[0]
        + (h0 + h1_) / (h0 * h1_) * y[1]
        - h0 / (h1_ * (h0 + h1_)) * y[2]
    )
    ha, hb = t[-2] - t[-3], t[-1] - t[-2]
    out[-1] = (
        hb / (ha * (ha + hb)) * y[-3]
        - (ha + hb) / (ha * hb) * y[-2]
        + (2 * hb + ha) / (hb * (ha + hb)) * y[-1]
    )
    return out


def norm_law_residuals(times, l2, g1v, params):
    """Residual of d/dt ||psi||^2 = 2*alpha2*G1(psi)*(1 - ||psi||^2) per node.

    Finite-differences the stored node norms (dot_values) and subtracts the
    predicted right-hand side; returns the signed residual array.
    """
    msq = np.asarray(l2, dtype=float) ** 2
    predicted = 2.0 * params.alpha2 * np.asarray(g1v, dtype=float) * (1.0 - msq)
    return dot_values(times, msq) - predicted
