"""Joint multi-label trainer and predictor.

The model couples a linear predictor (weights W, bias z) with an explicit
label-correlation matrix (B, bias t) learned by self-representation of the
label matrix, tied together through a graph-Laplacian penalty on the
correlation-aware decision function

    g(x) = (x W + z^T) B + t^T.

Training minimizes

    1/2 ||Y - X W - 1 z^T||_F^2  +  gamma/2 tr(K^T L K)
    + beta/2 ||Y - Y B - 1 t^T||_F^2
    + lambda/2 (||W||_F^2 + ||z||^2 + ||B||_F^2 + ||t||^2),

with K the matrix of g values on the training instances, by alternating
exact solves of the four blockwise-convex subproblems in the order
W, B, z, t.  Self-representation keeps the rank of the label matrix intact
while exposing label-to-label influence directly in B.
"""

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .graph import build_graph
from .linalg import solve_linear, solve_w_system


class DimensionMismatch(Exception):
    """Training or prediction inputs have non-conforming shapes."""


class DegenerateDenominator(Exception):
    """The bias-t denominator beta*n + gamma*1'L1 + lambda is numerically zero."""


class EmptyDataset(Exception):
    """Training data has no instances, features, or labels."""


class ZeroColumn(Exception):
    """A correlation-matrix column is entirely zero (untrained or degenerate label)."""


@dataclass(frozen=True)
class HyperParams:
    """Training weights and loop controls.

    beta weighs the label self-representation loss, gamma the Laplacian
    penalty, lam the ridge penalty on all parameter blocks.  s is the
    neighbor count of the similarity graph.  The sweep loop stops when the
    objective changes by less than tol or after max_iter sweeps.
    """

    beta: float = 2.0
    gamma: float = 1.0
    lam: float = 1.0
    s: int = 10
    max_iter: int = 50
    tol: float = 1e-3

    def __post_init__(self):
        if self.beta < 0 or self.gamma < 0 or self.lam < 0:
            raise ValueError("beta, gamma, lam must be nonnegative")
        if self.max_iter < 0:
            raise ValueError("max_iter must be >= 0")
        if self.tol <= 0:
            raise ValueError("tol must be positive")


@dataclass(frozen=True)
class FitOptions:
    """Training variants.

    use_high_order=False pins B to the identity and t to zero, so the
    predictor degenerates to x W + z^T.  joint=False first solves the label
    self-representation alone, then fits W and z with B and t frozen.
    use_laplacian=False drops the graph term (gamma treated as 0).
    random_init switches the zero initialization to small seeded noise.
    """

    use_high_order: bool = True
    joint: bool = True
    use_laplacian: bool = True
    random_init: bool = False
    init_seed: int = 0


@dataclass(frozen=True, eq=False)
class HomiModel:
    """Fitted parameters plus the hyper-parameters and objective trace.

    input_mean / input_scale, when set, record the feature standardization
    applied before training so serialized models are self-contained.
    """

    W: np.ndarray
    B: np.ndarray
    z: np.ndarray
    t: np.ndarray
    hyper: HyperParams
    loss_trace: tuple = ()
    options: FitOptions = field(default_factory=FitOptions)
    input_mean: np.ndarray | None = None
    input_scale: np.ndarray | None = None
    label_names: tuple | None = None

    @property
    def n_features(self):
        return self.W.shape[0]

    @property
    def n_labels(self):
        return self.W.shape[1]

    def with_scaler(self, mean, scale):
        return replace(
            self, input_mean=np.asarray(mean, float), input_scale=np.asarray(scale, float)
        )


class _Products:
    """Parameter-independent products of one (X, Y, L) triple.

    Every update and the objective reduce to these, so the n x n Laplacian
    is touched once per fit instead of once per sweep.
    """

    def __init__(self, X, Y, L, gamma):
        self.X, self.Y = X, Y
        self.n, self.m = X.shape
        self.l = Y.shape[1]
        self.XtX = X.T @ X
        self.XtY = X.T @ Y
        self.Xt1 = X.sum(axis=0)
        self.Yt1 = Y.sum(axis=0)
        self.YtY = Y.T @ Y
        self.gamma = float(gamma) if L is not None else 0.0
        if self.gamma != 0.0:
            XtL = X.T @ L
            self.XtLX = XtL @ X
            self.XtL1 = XtL.sum(axis=1)
            self.oLo = float(L.sum())
        else:
            self.XtLX = np.zeros((self.m, self.m))
            self.XtL1 = np.zeros(self.m)
            self.oLo = 0.0


def _m_products(pr, W, z):
    """(M^T L M, M^T L 1) for M = X W + 1 z^T, from cached pieces."""
    XtLXW = pr.XtLX @ W
    v = W.T @ pr.XtL1
    MtLM = W.T @ XtLXW + np.outer(v, z) + np.outer(z, v) + pr.oLo * np.outer(z, z)
    MtL1 = v + pr.oLo * z
    return MtLM, MtL1


def _objective(pr, W, B, z, t, beta, lam):
    fit_res = pr.Y - pr.X @ W - z[None, :]
    val = 0.5 * float((fit_res * fit_res).sum())
    self_res = pr.Y - pr.Y @ B - t[None, :]
    val += 0.5 * beta * float((self_res * self_res).sum())
    if pr.gamma != 0.0:
        MtLM, MtL1 = _m_products(pr, W, z)
        trace = (
            float((B * (MtLM @ B)).sum())
            + 2.0 * float(t @ (B.T @ MtL1))
            + pr.oLo * float(t @ t)
        )
        val += 0.5 * pr.gamma * trace
    val += 0.5 * lam * (
        float((W * W).sum()) + float(z @ z) + float((B * B).sum()) + float(t @ t)
    )
    return val


def _update_w(pr, B, z, t, lam):
    P = pr.XtX + lam * np.eye(pr.m)
    R = pr.XtY - np.outer(pr.Xt1, z)
    if pr.gamma == 0.0:
        return solve_linear(P, R)
    R = R - pr.gamma * np.outer(pr.XtL1, B @ (B.T @ z + t))
    return solve_w_system(P, pr.gamma * pr.XtLX, B @ B.T, R)


def _update_b(pr, W, z, t, beta, lam):
    H = beta * pr.YtY + lam * np.eye(pr.l)
    RHS = beta * (pr.YtY - np.outer(pr.Yt1, t))
    if pr.gamma != 0.0:
        MtLM, MtL1 = _m_products(pr, W, z)
        H = H + pr.gamma * MtLM
        RHS = RHS - pr.gamma * np.outer(MtL1, t)
    return solve_linear(H, RHS)


def _update_z(pr, W, B, t, lam):
    A = (pr.n + lam) * np.eye(pr.l)
    rhs = pr.Yt1 - W.T @ pr.Xt1
    if pr.gamma != 0.0:
        A = A + (pr.gamma * pr.oLo) * (B @ B.T)
        rhs = rhs - pr.gamma * (B @ (B.T @ (W.T @ pr.XtL1) + pr.oLo * t))
    return solve_linear(A, rhs)


def _t_denominator(pr, beta, lam):
    return beta * pr.n + pr.gamma * pr.oLo + lam


def _update_t(pr, W, B, z, beta, lam):
    denom = _t_denominator(pr, beta, lam)
    if denom <= 1e-12:
        raise DegenerateDenominator(
            f"beta*n + gamma*1'L1 + lambda = {denom:.3e} is not positive"
        )
    num = beta * (pr.Yt1 - B.T @ pr.Yt1)
    if pr.gamma != 0.0:
        num = num - pr.gamma * (B.T @ (W.T @ pr.XtL1 + pr.oLo * z))
    return num / denom


def _check_conforming(X, Y, L, W=None, B=None, z=None, t=None):
    n, m = X.shape
    if Y.shape[0] != n:
        raise DimensionMismatch(f"X has {n} rows, Y has {Y.shape[0]}")
    l = Y.shape[1]
    if L is not None and L.shape != (n, n):
        raise DimensionMismatch(f"L must be {n}x{n}, got {L.shape}")
    if W is not None and W.shape != (m, l):
        raise DimensionMismatch(f"W must be {m}x{l}, got {W.shape}")
    if B is not None and B.shape != (l, l):
        raise DimensionMismatch(f"B must be {l}x{l}, got {B.shape}")
    if z is not None and z.shape != (l,):
        raise DimensionMismatch(f"z must have length {l}, got {z.shape}")
    if t is not None and t.shape != (l,):
        raise DimensionMismatch(f"t must have length {l}, got {t.shape}")


def _prepare(X, Y, L):
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    L = None if L is None else np.asarray(L, dtype=float)
    if X.ndim != 2 or Y.ndim != 2:
        raise DimensionMismatch("X and Y must be 2-dimensional")
    return X, Y, L


def objective(X, Y, L, W, B, z, t, hyper):
    """Value of the training objective at the given parameter blocks.

    L may be None, meaning the graph term is absent.
    """
    X, Y, L = _prepare(X, Y, L)
    W, B = np.asarray(W, float), np.asarray(B, float)
    z, t = np.asarray(z, float), np.asarray(t, float)
    _check_conforming(X, Y, L, W, B, z, t)
    pr = _Products(X, Y, L, hyper.gamma)
    return _objective(pr, W, B, z, t, hyper.beta, hyper.lam)


def update_w(X, Y, L, B, z, t, hyper):
    """Exact solve of the weight subproblem with B, z, t fixed."""
    X, Y, L = _prepare(X, Y, L)
    B, z, t = np.asarray(B, float), np.asarray(z, float), np.asarray(t, float)
    _check_conforming(X, Y, L, B=B, z=z, t=t)
    return _update_w(_Products(X, Y, L, hyper.gamma), B, z, t, hyper.lam)


def update_b(X, Y, L, W, z, t, hyper):
    """Exact solve of the label-correlation subproblem with W, z, t fixed."""
    X, Y, L = _prepare(X, Y, L)
    W, z, t = np.asarray(W, float), np.asarray(z, float), np.asarray(t, float)
    _check_conforming(X, Y, L, W=W, z=z, t=t)
    return _update_b(_Products(X, Y, L, hyper.gamma), W, z, t, hyper.beta, hyper.lam)


def update_z(X, Y, L, W, B, t, hyper):
    """Exact solve of the predictor-bias subproblem with W, B, t fixed."""
    X, Y, L = _prepare(X, Y, L)
    W, B, t = np.asarray(W, float), np.asarray(B, float), np.asarray(t, float)
    _check_conforming(X, Y, L, W=W, B=B, t=t)
    return _update_z(_Products(X, Y, L, hyper.gamma), W, B, t, hyper.lam)


def update_t(X, Y, L, W, B, z, hyper):
    """Exact solve of the self-representation-bias subproblem with W, B, z fixed."""
    X, Y, L = _prepare(X, Y, L)
    W, B, z = np.asarray(W, float), np.asarray(B, float), np.asarray(z, float)
    _check_conforming(X, Y, L, W=W, B=B, z=z)
    return _update_t(_Products(X, Y, L, hyper.gamma), W, B, z, hyper.beta, hyper.lam)


def _initial_blocks(m, l, options):
    if options.random_init:
        rng = np.random.default_rng(options.init_seed)
        return (
            0.01 * rng.standard_normal((m, l)),
            0.01 * rng.standard_normal((l, l)),
            0.01 * rng.standard_normal(l),
            0.01 * rng.standard_normal(l),
        )
    return np.zeros((m, l)), np.zeros((l, l)), np.zeros(l), np.zeros(l)


def _selfrep_objective(pr, B, t, beta, lam):
    res = pr.Y - pr.Y @ B - t[None, :]
    return (
        0.5 * beta * float((res * res).sum())
        + 0.5 * lam * (float((B * B).sum()) + float(t @ t))
    )


def fit(X, Y, hyper=None, options=None):
    """Train the model by alternating exact blockwise updates.

    X is expected standardized (zero mean, unit deviation per feature);
    Y must be binary.  The similarity graph is built on X with the neighbor
    count clamped to n-1 (no graph at all for a single-instance set).  The
    objective is recorded after every full sweep; the loop stops when it
    changes by less than hyper.tol or after hyper.max_iter sweeps.
    """
    hyper = hyper if hyper is not None else HyperParams()
    options = options if options is not None else FitOptions()
    X, Y, _ = _prepare(X, Y, None)
    _check_conforming(X, Y, None)
    n, m = X.shape
    l = Y.shape[1]
    if n == 0 or m == 0 or l == 0:
        raise EmptyDataset(f"got n={n}, m={m}, l={l}")
    if not np.isin(Y, (0.0, 1.0)).all():
        raise ValueError("Y entries must be 0 or 1")

    gamma_eff = hyper.gamma if options.use_laplacian else 0.0
    L = None
    if gamma_eff != 0.0 and n >= 2:
        L = build_graph(X, min(max(hyper.s, 1), n - 1)).L

    pr = _Products(X, Y, L, gamma_eff)
    W, B, z, t = _initial_blocks(m, l, options)

    if not options.use_high_order:
        B = np.eye(l)
        t = np.zeros(l)
    elif _t_denominator(pr, hyper.beta, hyper.lam) <= 1e-12:
        # Fail fast: the t subproblem is ill-posed for every sweep.
        raise DegenerateDenominator(
            "beta*n + gamma*1'L1 + lambda is not positive; "
            "increase beta or lambda"
        )

    if options.use_high_order and not options.joint:
        B, t = _fit_selfrep(pr, B, t, hyper)

    trace = []
    loss_prev = _objective(pr, W, B, z, t, hyper.beta, hyper.lam)
    for _ in range(hyper.max_iter):
        W = _update_w(pr, B, z, t, hyper.lam)
        if options.use_high_order and options.joint:
            B = _update_b(pr, W, z, t, hyper.beta, hyper.lam)
        z = _update_z(pr, W, B, t, hyper.lam)
        if options.use_high_order and options.joint:
            t = _update_t(pr, W, B, z, hyper.beta, hyper.lam)
        loss = _objective(pr, W, B, z, t, hyper.beta, hyper.lam)
        trace.append(loss)
        if abs(loss_prev - loss) < hyper.tol:
            break
        loss_prev = loss

    return HomiModel(
        W=W, B=B, z=z, t=t, hyper=hyper, loss_trace=tuple(trace), options=options
    )


def _fit_selfrep(pr, B, t, hyper):
    """Step-wise pre-solve: B, t from the self-representation loss alone."""
    pr0 = _Products(pr.X, pr.Y, None, 0.0)
    prev = _selfrep_objective(pr0, B, t, hyper.beta, hyper.lam)
    for _ in range(hyper.max_iter):
        B = _update_b(pr0, None, None, t, hyper.beta, hyper.lam)
        t = _update_t(pr0, None, B, None, hyper.beta, hyper.lam)
        cur = _selfrep_objective(pr0, B, t, hyper.beta, hyper.lam)
        if abs(prev - cur) < hyper.tol:
            break
        prev = cur
    return B, t


def decision_values(model, X):
    """Correlation-aware decision scores g(x) = (x W + z^T) B + t^T, row-wise."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise DimensionMismatch(
            f"X must have {model.n_features} columns, got shape {X.shape}"
        )
    return (X @ model.W + model.z[None, :]) @ model.B + model.t[None, :]


def predict(model, X):
    """Binary label matrix: 1 where the decision value strictly exceeds 0.5."""
    return (decision_values(model, X) > 0.5).astype(int)


def normalized_correlations(model):
    """Correlation matrix B rescaled column-wise into [-1, 1].

    Each column is divided by its maximum absolute entry, which preserves
    the sign pattern.  Raises ZeroColumn for an all-zero column.
    """
    B = model.B
    colmax = np.abs(B).max(axis=0)
    zero = np.flatnonzero(colmax == 0.0)
    if zero.size:
        raise ZeroColumn(f"columns {zero.tolist()} of B are entirely zero")
    return B / colmax[None, :]


MODEL_FORMAT = "homi-model"
MODEL_VERSION = 1


def model_to_json(model):
    """Self-describing text form of a model; floats keep full precision."""
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "n_features": model.n_features,
        "n_labels": model.n_labels,
        "hyper": {
            "beta": model.hyper.beta,
            "gamma": model.hyper.gamma,
            "lambda": model.hyper.lam,
            "s": model.hyper.s,
            "max_iter": model.hyper.max_iter,
            "tol": model.hyper.tol,
        },
        "options": {
            "use_high_order": model.options.use_high_order,
            "joint": model.options.joint,
            "use_laplacian": model.options.use_laplacian,
            "random_init": model.options.random_init,
            "init_seed": model.options.init_seed,
        },
        "input_mean": None if model.input_mean is None else model.input_mean.tolist(),
        "input_scale": None if model.input_scale is None else model.input_scale.tolist(),
        "label_names": None if model.label_names is None else list(model.label_names),
        "W": model.W.tolist(),
        "B": model.B.tolist(),
        "z": model.z.tolist(),
        "t": model.t.tolist(),
        "loss_trace": list(model.loss_trace),
    }
    return json.dumps(doc, indent=1)


def save_model(model, path):
    Path(path).write_text(model_to_json(model), encoding="utf-8")


def model_from_json(text):
    doc = json.loads(text)
    if doc.get("format") != MODEL_FORMAT:
        raise ValueError("not a model document")
    hyper = HyperParams(
        beta=doc["hyper"]["beta"],
        gamma=doc["hyper"]["gamma"],
        lam=doc["hyper"]["lambda"],
        s=doc["hyper"]["s"],
        max_iter=doc["hyper"]["max_iter"],
        tol=doc["hyper"]["tol"],
    )
    options = FitOptions(**doc["options"])
    mean = doc.get("input_mean")
    scale = doc.get("input_scale")
    names = doc.get("label_names")
    return HomiModel(
        W=np.array(doc["W"], dtype=float).reshape(doc["n_features"], doc["n_labels"]),
        B=np.array(doc["B"], dtype=float).reshape(doc["n_labels"], doc["n_labels"]),
        z=np.array(doc["z"], dtype=float),
        t=np.array(doc["t"], dtype=float),
        hyper=hyper,
        loss_trace=tuple(doc.get("loss_trace", ())),
        options=options,
        input_mean=None if mean is None else np.array(mean, dtype=float),
        input_scale=None if scale is None else np.array(scale, dtype=float),
        label_names=None if names is None else tuple(names),
    )


def load_model(path):
    return model_from_json(Path(path).read_text(encoding="utf-8"))
