"""Dataset ingestion and preparation: MULAN-style ARFF, statistics, scaling, folds.

The ARFF dialect accepted here is the one the MULAN benchmark archive uses:
numeric attributes and numeric-coded nominal attributes (e.g. {0,1}), dense
rows or sparse `{index value, ...}` rows, `?` for missing feature values, and
`%` comments.  Labels are designated either as the last q attributes or by an
explicit attribute-name list (optionally read from a MULAN label XML file).
"""

import io
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class ParseError(Exception):
    """Malformed ARFF input; carries the offending 1-based line number."""

    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class UnknownLabelName(Exception):
    """A requested label name is not among the declared attributes."""


class NonBinaryLabelValue(Exception):
    """A label column contains a value outside {0,1} (or {-1,1})."""


class InvalidK(Exception):
    """Fold count k is out of the valid range [2, n]."""


@dataclass(frozen=True)
class Dataset:
    X: np.ndarray
    Y: np.ndarray
    feature_names: tuple
    label_names: tuple

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def m(self):
        return self.X.shape[1]

    @property
    def l(self):
        return self.Y.shape[1]


@dataclass(frozen=True)
class DatasetStats:
    n: int
    m: int
    l: int
    lcard: float
    lden: float
    dl: int


@dataclass(frozen=True)
class ScalerStats:
    mean: np.ndarray
    scale: np.ndarray


@dataclass(frozen=True)
class FoldPlan:
    k: int
    assignments: np.ndarray
    seed: int


_ATTR_RE = re.compile(
    r"@attribute\s+('(?P<q1>[^']*)'|\"(?P<q2>[^\"]*)\"|(?P<bare>\S+))\s+(?P<type>.+)$",
    re.IGNORECASE,
)


def _unquote(token):
    token = token.strip()
    if len(token) >= 2 and token[0] == token[-1] and token[0] in "'\"":
        return token[1:-1]
    return token


def _read_lines(source):
    if isinstance(source, (str, Path)) and "\n" not in str(source):
        with open(source, "r", encoding="utf-8", errors="replace") as fh:
            return fh.read().splitlines()
    if isinstance(source, str):
        return source.splitlines()
    if isinstance(source, io.IOBase) or hasattr(source, "read"):
        return source.read().splitlines()
    raise TypeError("source must be a path, text, or readable stream")


def parse_arff(source, label_spec):
    """Parse an ARFF document into a Dataset.

    label_spec is either an int q (the last q attributes are labels) or an
    iterable of attribute names.  Label values must be binary; {-1,1}-coded
    label columns are remapped to {0,1}.  Missing feature values (`?`) are
    imputed with the column mean over observed entries, so the returned X
    never contains NaN.
    """
    lines = _read_lines(source)
    attr_names = []
    attr_nominal = []  # None for numeric, else frozenset of allowed tokens
    data_start = None

    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        low = line.lower()
        if low.startswith("@relation"):
            continue
        if low.startswith("@attribute"):
            m = _ATTR_RE.match(line)
            if m is None:
                raise ParseError(line_no, "malformed @attribute declaration")
            name = m.group("q1") or m.group("q2") or m.group("bare")
            if name in attr_names:
                raise ParseError(line_no, f"duplicate attribute name {name!r}")
            type_spec = m.group("type").strip()
            if type_spec.startswith("{"):
                if not type_spec.endswith("}"):
                    raise ParseError(line_no, "unterminated nominal value list")
                tokens = [_unquote(t) for t in type_spec[1:-1].split(",")]
                try:
                    for t in tokens:
                        float(t)
                except ValueError:
                    raise ParseError(
                        line_no, f"non-numeric nominal attribute {name!r} unsupported"
                    ) from None
                attr_nominal.append(frozenset(tokens))
            elif type_spec.split()[0].lower() in ("numeric", "real", "integer"):
                attr_nominal.append(None)
            else:
                raise ParseError(
                    line_no, f"unsupported attribute type {type_spec!r} for {name!r}"
                )
            attr_names.append(name)
            continue
        if low.startswith("@data"):
            data_start = line_no
            break
        raise ParseError(line_no, f"unexpected directive {line.split()[0]!r}")

    if data_start is None:
        raise ParseError(len(lines) or 1, "missing @data section")
    if not attr_names:
        raise ParseError(data_start, "no attributes declared")

    n_attr = len(attr_names)
    rows = []
    for line_no, raw in enumerate(lines[data_start:], start=data_start + 1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        if line.startswith("{"):
            rows.append(_parse_sparse_row(line, line_no, n_attr, attr_nominal))
        else:
            rows.append(_parse_dense_row(line, line_no, n_attr, attr_nominal))

    values = (
        np.array(rows, dtype=float) if rows else np.zeros((0, n_attr), dtype=float)
    )
    label_idx = _resolve_labels(attr_names, label_spec)
    label_set = set(label_idx)
    feature_idx = [i for i in range(n_attr) if i not in label_set]

    X = values[:, feature_idx]
    Y = values[:, label_idx]
    label_names = tuple(attr_names[i] for i in label_idx)
    _validate_labels(Y, label_names)
    X = _impute_columns(X)
    return Dataset(
        X=X,
        Y=Y,
        feature_names=tuple(attr_names[i] for i in feature_idx),
        label_names=label_names,
    )


def _parse_value(token, line_no, attr_i, nominal):
    token = _unquote(token)
    if token == "?":
        return np.nan
    if nominal is not None and token not in nominal:
        raise ParseError(
            line_no, f"value {token!r} not in nominal set of attribute {attr_i}"
        )
    try:
        return float(token)
    except ValueError:
        raise ParseError(line_no, f"cannot parse value {token!r}") from None


def _parse_dense_row(line, line_no, n_attr, attr_nominal):
    tokens = line.split(",")
    if len(tokens) != n_attr:
        raise ParseError(
            line_no, f"expected {n_attr} values, got {len(tokens)}"
        )
    return [
        _parse_value(tok, line_no, i, attr_nominal[i]) for i, tok in enumerate(tokens)
    ]


def _parse_sparse_row(line, line_no, n_attr, attr_nominal):
    if not line.endswith("}"):
        raise ParseError(line_no, "unterminated sparse row")
    row = [0.0] * n_attr
    body = line[1:-1].strip()
    if not body:
        return row
    for pair in body.split(","):
        parts = pair.split()
        if len(parts) != 2:
            raise ParseError(line_no, f"malformed sparse entry {pair!r}")
        try:
            idx = int(parts[0])
        except ValueError:
            raise ParseError(line_no, f"bad sparse index {parts[0]!r}") from None
        if not 0 <= idx < n_attr:
            raise ParseError(line_no, f"sparse index {idx} out of range")
        row[idx] = _parse_value(parts[1], line_no, idx, attr_nominal[idx])
    return row


def _resolve_labels(attr_names, label_spec):
    if isinstance(label_spec, (int, np.integer)):
        q = int(label_spec)
        if q < 0 or q > len(attr_names):
            raise ValueError(f"label count {q} out of range for {len(attr_names)} attributes")
        return list(range(len(attr_names) - q, len(attr_names)))
    wanted = list(label_spec)
    index = {name: i for i, name in enumerate(attr_names)}
    missing = [name for name in wanted if name not in index]
    if missing:
        raise UnknownLabelName(f"not in attribute list: {missing}")
    # Declaration order, regardless of the order names were given in.
    return sorted(index[name] for name in wanted)


def _validate_labels(Y, label_names):
    for j in range(Y.shape[1]):
        col = Y[:, j]
        if np.isnan(col).any():
            raise NonBinaryLabelValue(f"label {label_names[j]!r} has missing values")
        vals = set(np.unique(col).tolist())
        if vals <= {0.0, 1.0}:
            continue
        if vals <= {-1.0, 1.0}:
            col[col == -1.0] = 0.0
            continue
        bad = sorted(vals - {0.0, 1.0})
        raise NonBinaryLabelValue(f"label {label_names[j]!r} has values {bad}")


def _impute_columns(X):
    if X.size == 0 or not np.isnan(X).any():
        return X
    mask = np.isnan(X)
    with np.errstate(invalid="ignore"):
        means = np.nanmean(np.where(mask, np.nan, X), axis=0)
    means = np.where(np.isnan(means), 0.0, means)
    X = X.copy()
    X[mask] = np.broadcast_to(means, X.shape)[mask]
    return X


def read_label_xml(source):
    """Attribute names from a MULAN label list: <label name="..."/> elements."""
    if isinstance(source, (str, Path)) and "\n" not in str(source) and "<" not in str(source):
        text = Path(source).read_text(encoding="utf-8")
    elif hasattr(source, "read"):
        text = source.read()
    else:
        text = str(source)
    root = ET.fromstring(text)
    names = [
        el.attrib["name"]
        for el in root.iter()
        if el.tag.split("}")[-1] == "label" and "name" in el.attrib
    ]
    if not names:
        raise ValueError("no <label name=...> elements found")
    return names


def dump_arff(dataset, relation="dataset"):
    """Serialize a Dataset back to dense ARFF text (full float precision)."""
    out = [f"@relation {relation}", ""]
    for name in dataset.feature_names:
        out.append(f"@attribute '{name}' numeric")
    for name in dataset.label_names:
        out.append(f"@attribute '{name}' {{0,1}}")
    out.append("")
    out.append("@data")
    full = np.hstack([dataset.X, dataset.Y]) if dataset.m or dataset.l else dataset.X
    for row in full:
        out.append(
            ",".join(
                str(int(v)) if float(v).is_integer() else repr(float(v)) for v in row
            )
        )
    return "\n".join(out) + "\n"


def dataset_stats(d):
    """Cardinality, density, and distinct-label-set count of a dataset."""
    n, m, l = d.n, d.m, d.l
    total = float(d.Y.sum())
    lcard = total / n if n else 0.0
    lden = lcard / l if l else 0.0
    dl = int(np.unique(d.Y, axis=0).shape[0]) if n else 0
    return DatasetStats(n=n, m=m, l=l, lcard=lcard, lden=lden, dl=dl)


def format_stats_csv(named_stats):
    """Comma-separated stats table; columns follow n, m, l, LCard, LDen, DL."""
    lines = ["dataset,n,m,l,lcard,lden,dl"]
    for name, s in named_stats:
        lines.append(f"{name},{s.n},{s.m},{s.l},{s.lcard:.6g},{s.lden:.6g},{s.dl}")
    return "\n".join(lines) + "\n"


def standardize(train_X, apply_X=None):
    """Per-feature z-scoring with statistics from the training block only.

    Uses the population deviation.  Zero-deviation features are centered and
    passed through with a unit divisor.  NaN entries (missing values) are
    imputed with the training-column mean before scaling.
    """
    train_X = np.asarray(train_X, dtype=float)
    if train_X.ndim != 2 or train_X.shape[0] == 0:
        raise ValueError("train_X must be a non-empty 2-d array")
    with np.errstate(invalid="ignore"):
        mean = np.nanmean(train_X, axis=0)
    mean = np.where(np.isnan(mean), 0.0, mean)

    def fill(X):
        if not np.isnan(X).any():
            return X
        X = X.copy()
        idx = np.isnan(X)
        X[idx] = np.broadcast_to(mean, X.shape)[idx]
        return X

    filled = fill(train_X)
    scale = filled.std(axis=0)
    scale = np.where(scale <= 0.0, 1.0, scale)
    train_out = (filled - mean) / scale
    apply_out = None
    if apply_X is not None:
        apply_X = np.asarray(apply_X, dtype=float)
        apply_out = (fill(apply_X) - mean) / scale
    return train_out, apply_out, ScalerStats(mean=mean, scale=scale)


def kfold_split(n, k, seed):
    """Seeded permutation split into k folds whose sizes differ by at most 1."""
    if not 2 <= k <= n:
        raise InvalidK(f"k={k} not in [2, {n}]")
    perm = np.random.default_rng(seed).permutation(n)
    assignments = np.empty(n, dtype=int)
    sizes = [n // k + (1 if f < n % k else 0) for f in range(k)]
    start = 0
    for fold, size in enumerate(sizes):
        assignments[perm[start : start + size]] = fold
        start += size
    return FoldPlan(k=k, assignments=assignments, seed=seed)
