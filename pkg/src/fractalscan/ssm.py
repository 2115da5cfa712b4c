"""Selective state-space scan at desk scale.

Continuous dynamics h'(t) = A h(t) + B x(t), y(t) = C h(t) + D x(t) are
discretized with a zero-order hold (Abar = exp(delta A)) and run as a
strictly sequential recurrence h_t = Abar h_{t-1} + Bbar x_t. The selective
variant re-derives B, C and the step size from each input sample before each
step. Hidden dimensions stay small (<= 16 or so); nothing here is trained.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

# Below this smallest singular value of delta*A the closed-form
# (delta A)^-1 (exp(delta A) - I) is replaced by its power series.
SERIES_THRESHOLD = 1e-6

# softplus offset chosen so the step size is ~0.1 for zero input
DELTA_INIT = 0.1


def softplus(z):
    return np.logaddexp(0.0, z)


def softplus_inverse(y: float) -> float:
    if y <= 0:
        raise ValueError("softplus is strictly positive")
    return float(y + np.log1p(-np.exp(-y)))


def _as_state_vector(v, m: int, name: str) -> np.ndarray:
    out = np.asarray(v, dtype=float).reshape(-1)
    if out.shape != (m,):
        raise ValueError(f"{name} must have {m} entries, got shape {np.shape(v)}")
    if not np.isfinite(out).all():
        raise ValueError(f"{name} has non-finite entries")
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class ContinuousSSM:
    """One-channel continuous-time system: state matrix A (m x m), input
    column B, output row C, and scalar feedthrough D."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: float = 0.0

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
            raise ValueError(f"A must be square, got shape {A.shape}")
        if not np.isfinite(A).all():
            raise ValueError("A has non-finite entries")
        A = A.copy()
        A.flags.writeable = False
        m = A.shape[0]
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", _as_state_vector(self.B, m, "B"))
        object.__setattr__(self, "C", _as_state_vector(self.C, m, "C"))
        object.__setattr__(self, "D", float(self.D))

    @property
    def m(self) -> int:
        return self.A.shape[0]

    def a_diagonal(self) -> np.ndarray | None:
        """The diagonal of A if A is diagonal, else None."""
        d = np.diagonal(self.A)
        if np.count_nonzero(self.A - np.diag(d)) == 0:
            return d
        return None


@dataclass(frozen=True, eq=False)
class DiscreteSSM:
    """Zero-order-hold discretization of a ContinuousSSM at step `delta`."""

    Abar: np.ndarray
    Bbar: np.ndarray
    C: np.ndarray
    D: float
    delta: float

    def __post_init__(self):
        Abar = np.asarray(self.Abar, dtype=float)
        m = Abar.shape[0]
        Abar = Abar.copy()
        Abar.flags.writeable = False
        object.__setattr__(self, "Abar", Abar)
        object.__setattr__(self, "Bbar", _as_state_vector(self.Bbar, m, "Bbar"))
        object.__setattr__(self, "C", _as_state_vector(self.C, m, "C"))
        object.__setattr__(self, "D", float(self.D))
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")

    @property
    def m(self) -> int:
        return self.Abar.shape[0]


def _phi1_scalar(z: np.ndarray) -> np.ndarray:
    """(e^z - 1) / z elementwise, with the power series sum_k z^k/(k+1)!
    taking over below the singularity threshold."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    small = np.abs(z) < SERIES_THRESHOLD
    zb = z[~small]
    out[~small] = np.expm1(zb) / zb
    zs = z[small]
    term = np.ones_like(zs)
    acc = np.ones_like(zs)
    k = 1
    while k < 40:
        term = term * zs / (k + 1)
        acc = acc + term
        if not np.any(np.abs(term) > np.finfo(float).eps * np.abs(acc)):
            break
        k += 1
    out[small] = acc
    return out


def _phi1_matrix(M: np.ndarray) -> np.ndarray:
    """Power series sum_k M^k/(k+1)! (the matrix (e^M - I) M^-1 limit)."""
    m = M.shape[0]
    term = np.eye(m)
    acc = np.eye(m)
    for k in range(1, 60):
        term = term @ M / (k + 1)
        acc = acc + term
        if np.linalg.norm(term, ord=np.inf) <= np.finfo(float).eps * np.linalg.norm(acc, ord=np.inf):
            break
    return acc


def discretize_zoh(ssm: ContinuousSSM, delta: float) -> DiscreteSSM:
    """Zero-order-hold discretization.

    Abar = exp(delta A) and Bbar = (delta A)^-1 (exp(delta A) - I) delta B.
    When the smallest singular value of delta*A drops below 1e-6 the inverse
    is replaced by the (always convergent) power series, which is exact in
    the A -> 0 limit. Diagonal A takes a per-element scalar path.
    """
    if not (np.isfinite(delta) and delta > 0):
        raise ValueError(f"delta must be positive and finite, got {delta}")
    diag = ssm.a_diagonal()
    if diag is not None:
        z = delta * diag
        abar = np.diag(np.exp(z))
        bbar = delta * _phi1_scalar(z) * ssm.B
        return DiscreteSSM(abar, bbar, ssm.C, ssm.D, delta)
    M = delta * ssm.A
    E = expm(M)
    if np.linalg.svd(M, compute_uv=False)[-1] < SERIES_THRESHOLD:
        bbar = _phi1_matrix(M) @ (delta * ssm.B)
    else:
        bbar = np.linalg.solve(M, (E - np.eye(ssm.m)) @ (delta * ssm.B))
    return DiscreteSSM(E, bbar, ssm.C, ssm.D, delta)


def scan_recurrence(dssm: DiscreteSSM, inputs) -> np.ndarray:
    """Run h_t = Abar h_{t-1} + Bbar x_t from h_0 = 0 and emit
    y_t = C h_t + D x_t for every step."""
    x = np.asarray(inputs, dtype=float).reshape(-1)
    if x.size == 0:
        raise ValueError("empty input sequence")
    if not np.isfinite(x).all():
        raise ValueError("inputs contain non-finite values")
    h = np.zeros(dssm.m)
    out = np.empty(x.shape[0])
    for t, xt in enumerate(x):
        h = dssm.Abar @ h + dssm.Bbar * xt
        out[t] = dssm.C @ h + dssm.D * xt
    return out


@dataclass(frozen=True, eq=False)
class SelectiveParams:
    """Input-dependent parameterization for one scalar channel.

    B(x) = w_b x + b_b and C(x) = w_c x + b_c are affine maps into the state
    dimension; the step size is delta(x) = softplus(p + w_delta x + b_delta),
    positive by construction. `p` defaults to the offset that makes
    delta(0) equal DELTA_INIT.
    """

    w_b: np.ndarray
    b_b: np.ndarray
    w_c: np.ndarray
    b_c: np.ndarray
    w_delta: float = 0.0
    b_delta: float = 0.0
    p: float = softplus_inverse(DELTA_INIT)

    def __post_init__(self):
        m = np.asarray(self.w_b).size
        for name in ("w_b", "b_b", "w_c", "b_c"):
            object.__setattr__(self, name, _as_state_vector(getattr(self, name), m, name))
        object.__setattr__(self, "w_delta", float(self.w_delta))
        object.__setattr__(self, "b_delta", float(self.b_delta))
        object.__setattr__(self, "p", float(self.p))

    @property
    def m(self) -> int:
        return self.w_b.shape[0]

    def delta_of(self, x) -> np.ndarray:
        return softplus(self.p + self.w_delta * np.asarray(x, dtype=float) + self.b_delta)


def selective_scan(params: SelectiveParams, base: ContinuousSSM, inputs) -> np.ndarray:
    """Selective recurrence: at each step derive B_t, C_t, delta_t from the
    input sample, discretize (A, B_t) with delta_t, and advance one step of
    the recurrence. Equals the naive per-step loop to float precision."""
    if params.m != base.m:
        raise ValueError(f"params dimension {params.m} != state dimension {base.m}")
    x = np.asarray(inputs, dtype=float).reshape(-1)
    if x.size == 0:
        raise ValueError("empty input sequence")
    if not np.isfinite(x).all():
        raise ValueError("inputs contain non-finite values")
    T = x.shape[0]
    delta = params.delta_of(x)
    if not (delta > 0).all():
        raise ValueError("step sizes must stay positive")
    diag = base.a_diagonal()
    if diag is None:
        # dense A: per-step discretization (desk-scale sequences only)
        h = np.zeros(base.m)
        out = np.empty(T)
        for t, xt in enumerate(x):
            step = ContinuousSSM(base.A, params.w_b * xt + params.b_b,
                                 params.w_c * xt + params.b_c, base.D)
            d = discretize_zoh(step, float(delta[t]))
            h = d.Abar @ h + d.Bbar * xt
            out[t] = d.C @ h + d.D * xt
        return out
    # diagonal A: batch the per-step discretizations, sequential state loop
    z = delta[:, None] * diag[None, :]
    abar = np.exp(z)
    b_t = x[:, None] * params.w_b[None, :] + params.b_b[None, :]
    u = delta[:, None] * _phi1_scalar(z) * b_t * x[:, None]
    c_t = x[:, None] * params.w_c[None, :] + params.b_c[None, :]
    hs = np.empty((T, base.m))
    h = np.zeros(base.m)
    for t in range(T):
        h = abar[t] * h + u[t]
        hs[t] = h
    return np.einsum("tm,tm->t", c_t, hs) + base.D * x


def scan_over_grid(order, field, params: SelectiveParams,
                   base: ContinuousSSM) -> np.ndarray:
    """Scan a grid along an order, run the selective recurrence over the
    resulting sequence, and scatter the outputs back to grid positions."""
    from fractalscan.curves import apply_order, invert_order

    seq = apply_order(order, np.asarray(field, dtype=float))
    out = selective_scan(params, base, seq)
    return invert_order(order, out)


def random_ssm(m: int, seed: int = 0, dense: bool = False,
               d_scale: float = 1.0) -> ContinuousSSM:
    """A reproducible random system; A is negative-real diagonal unless
    `dense` asks for a general (still comfortably stable) matrix."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, m, int(dense)]))
    if dense:
        R = 0.3 * rng.standard_normal((m, m))
        A = R - (1.0 + np.abs(R).sum(axis=1).max()) * np.eye(m)
    else:
        A = np.diag(-rng.uniform(0.2, 2.0, m))
    B = rng.standard_normal(m)
    C = rng.standard_normal(m)
    D = float(d_scale * rng.standard_normal())
    return ContinuousSSM(A, B, C, D)


def random_selective(m: int, seed: int = 0, input_gain: float = 0.5) -> SelectiveParams:
    """Reproducible random selective parameterization with delta(0) ~ 0.1."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, m, 1]))
    scale = 1.0 / np.sqrt(m)
    return SelectiveParams(
        w_b=input_gain * scale * rng.standard_normal(m),
        b_b=scale * rng.standard_normal(m),
        w_c=input_gain * scale * rng.standard_normal(m),
        b_c=scale * rng.standard_normal(m),
        w_delta=float(0.1 * input_gain * rng.standard_normal()),
        b_delta=0.0,
    )


def to_json(base: ContinuousSSM, delta: float | None = None,
            params: SelectiveParams | None = None) -> str:
    """Serialize a system: static form carries `delta`, selective form the
    weight blocks. Exactly one of `delta` / `params` must be given."""
    if (delta is None) == (params is None):
        raise ValueError("pass exactly one of delta (static) or params (selective)")
    doc: dict = {"m": base.m, "D": base.D}
    diag = base.a_diagonal()
    if diag is not None:
        doc["A_diag"] = diag.tolist()
    else:
        doc["A"] = base.A.tolist()
    if delta is not None:
        doc["B"] = base.B.tolist()
        doc["C"] = base.C.tolist()
        doc["delta"] = float(delta)
    else:
        doc["B"] = base.B.tolist()
        doc["C"] = base.C.tolist()
        doc["selective"] = {
            "w_b": params.w_b.tolist(), "b_b": params.b_b.tolist(),
            "w_c": params.w_c.tolist(), "b_c": params.b_c.tolist(),
            "w_delta": params.w_delta, "b_delta": params.b_delta,
            "p": params.p,
        }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def from_json(text: str):
    """Inverse of `to_json`: returns (base, delta, params) with exactly one
    of delta/params set."""
    doc = json.loads(text)
    if "A_diag" in doc:
        A = np.diag(np.asarray(doc["A_diag"], dtype=float))
    else:
        A = np.asarray(doc["A"], dtype=float)
    base = ContinuousSSM(A, doc["B"], doc["C"], doc.get("D", 0.0))
    if "selective" in doc:
        s = doc["selective"]
        params = SelectiveParams(s["w_b"], s["b_b"], s["w_c"], s["b_c"],
                                 s.get("w_delta", 0.0), s.get("b_delta", 0.0),
                                 s.get("p", softplus_inverse(DELTA_INIT)))
        return base, None, params
    return base, float(doc["delta"]), None
