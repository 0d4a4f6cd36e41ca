"""Plain-text readers and writers.

All formats are UTF-8, whitespace separated, ``\\n`` line endings, and begin
with a versioned header line. Writers emit floats with ``repr`` (shortest
round-trip form), so ``parse(write(x))`` reproduces ``x`` bit for bit and
``write(parse(text)) == text`` for canonical text. Every parse error is a
:class:`~boundmon.errors.FormatError` carrying a 1-based line number.

``.mlog``::

    #MLOG v1 dim=<n> type=<interval|zonotope>
    <t> <l1> <u1> ... <ln> <un>                     (interval)
    <t> <m> <c1>..<cn> <g11>..<gn1> ... <g1m>..<gnm>  (zonotope, column-major)

``.mbeh``::

    #MBEH v1 dim=<n>
    <t> <x1> ... <xn>        one line per t = 0, 1, ..., T

``.model``::

    #MODEL v1 dim=<n>
    names <name1> ... <namen>
    max_generators <k>
    [nominal]
    <n rows of n numbers>
    [uncertainty]
    <row> <col> <lo> <hi>     1-based cell indices
    [init]                    optional, n lines of <lo> <hi>
    <lo> <hi>

``.unsafe``::

    #UNSAFE v1 dim=<n>
    halfspace <a1> ... <an> >= <b>
    zonotope <m> <c1>..<cn> <generators column-major>
    2*x1 - x3 <= 4            (expression shorthand; also >=)
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .dynamics import UncertainLinearSystem
from .errors import BoundmonError, FormatError
from .flowpipe import concat_bounds
from .geometry import Halfspace, IntervalBox, UnsafeSpec, Zonotope, interval_hull
from .offline import Log, Sample, Verdict
from .online import Behavior

_NUM = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_NUM_RE = re.compile(_NUM + r"\Z")
_INT_RE = re.compile(r"\d+\Z")


def fmt(x: float) -> str:
    return repr(float(x))


def _lines(text: str) -> Iterator[Tuple[int, str]]:
    """Yield ``(lineno, stripped)`` for non-blank, non-comment lines after the header."""
    for no, raw in enumerate(text.split("\n"), start=1):
        if "\r" in raw:
            raise FormatError("carriage return found; only \\n line endings are allowed", no)
        if no == 1:
            continue
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield no, line


def _header(text: str, pattern: str) -> re.Match:
    first = text.split("\n", 1)[0].rstrip("\r")
    m = re.fullmatch(pattern, first)
    if m is None:
        raise FormatError(f"malformed header {first[:60]!r}", 1)
    return m


def _dim(m: re.Match) -> int:
    n = int(m.group("dim"))
    if n < 1:
        raise FormatError("dimension must be >= 1", 1)
    return n


def _float(tok: str, no: int, what: str = "number") -> float:
    if not _NUM_RE.match(tok):
        raise FormatError(f"invalid {what} {tok!r}", no)
    x = float(tok)
    if not np.isfinite(x):
        raise FormatError(f"{what} {tok!r} is not finite", no)
    return x


def _int(tok: str, no: int, what: str) -> int:
    if not _INT_RE.match(tok):
        raise FormatError(f"invalid {what} {tok!r}", no)
    return int(tok)


def _floats(toks: Sequence[str], no: int) -> np.ndarray:
    return np.array([_float(t, no) for t in toks], dtype=float)


def _wrap(no: int):
    """Context manager turning invariant violations into line-numbered diagnostics."""

    class _Ctx:
        def __enter__(self):
            return self

        def __exit__(self, et, ev, tb):
            if ev is not None and isinstance(ev, BoundmonError) and not isinstance(ev, FormatError):
                raise FormatError(str(ev), no) from ev
            return False

    return _Ctx()


# --- logs -------------------------------------------------------------------

_MLOG_HEADER = r"#MLOG v1 dim=(?P<dim>\d+) type=(?P<kind>interval|zonotope)"


def _zonotope_tokens(toks: List[str], n: int, no: int) -> Zonotope:
    if not toks:
        raise FormatError("missing generator count", no)
    m = _int(toks[0], no, "generator count")
    want = 1 + n + n * m
    if len(toks) != want:
        raise FormatError(f"expected {want} fields for a zonotope with {m} generators, got {len(toks)}", no)
    vals = _floats(toks[1:], no)
    with _wrap(no):
        return Zonotope(vals[:n], vals[n:].reshape(m, n).T)


def _zonotope_fields(z: Zonotope) -> List[str]:
    return [str(z.order)] + [fmt(x) for x in z.center] + [fmt(x) for x in z.generators.T.ravel()]


def parse_mlog(text: str) -> Log:
    m = _header(text, _MLOG_HEADER)
    n, kind = _dim(m), m.group("kind")
    samples = []
    prev = None
    last_no = 1
    for no, line in _lines(text):
        last_no = no
        toks = line.split()
        t = _int(toks[0], no, "time")
        if prev is not None and t <= prev:
            raise FormatError(f"time {t} is not after previous time {prev}", no)
        if kind == "interval":
            if len(toks) != 1 + 2 * n:
                raise FormatError(f"expected {1 + 2 * n} fields for an interval sample, got {len(toks)}", no)
            vals = _floats(toks[1:], no)
            lo, hi = vals[0::2], vals[1::2]
            if np.any(lo > hi):
                i = int(np.argmax(lo > hi)) + 1
                raise FormatError(f"upper bound below lower bound in dimension {i}", no)
            region = IntervalBox(lo, hi)
        else:
            region = _zonotope_tokens(toks[1:], n, no)
        samples.append(Sample(t, region))
        prev = t
    if not samples:
        raise FormatError("log contains no samples", last_no)
    return Log(n, tuple(samples))


def write_mlog(log: Log) -> str:
    kind = log.kind
    out = [f"#MLOG v1 dim={log.dimension} type={kind}"]
    for s in log.samples:
        if kind == "interval":
            box = s.region
            fields = [fmt(x) for pair in zip(box.lower, box.upper) for x in pair]
        else:
            fields = _zonotope_fields(s.zonotope)
        out.append(" ".join([str(s.time)] + fields))
    return "\n".join(out) + "\n"


# --- behaviors --------------------------------------------------------------

_MBEH_HEADER = r"#MBEH v1 dim=(?P<dim>\d+)"


def parse_mbeh(text: str) -> Behavior:
    n = _dim(_header(text, _MBEH_HEADER))
    rows = []
    last_no = 1
    for no, line in _lines(text):
        last_no = no
        toks = line.split()
        t = _int(toks[0], no, "time")
        if t != len(rows):
            raise FormatError(f"expected time {len(rows)}, got {t}", no)
        if len(toks) != 1 + n:
            raise FormatError(f"expected {1 + n} fields, got {len(toks)}", no)
        rows.append(_floats(toks[1:], no))
    if not rows:
        raise FormatError("behavior contains no states", last_no)
    return Behavior(np.array(rows))


def write_mbeh(beh: Behavior) -> str:
    out = [f"#MBEH v1 dim={beh.dimension}"]
    for t, row in enumerate(beh.values):
        out.append(" ".join([str(t)] + [fmt(x) for x in row]))
    return "\n".join(out) + "\n"


# --- models -----------------------------------------------------------------

_MODEL_HEADER = r"#MODEL v1 dim=(?P<dim>\d+)"
_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass
class ModelMeta:
    names: Tuple[str, ...]
    max_generators: int
    init: Optional[IntervalBox] = None


def parse_model(text: str) -> Tuple[UncertainLinearSystem, ModelMeta]:
    n = _dim(_header(text, _MODEL_HEADER))
    names: Optional[Tuple[str, ...]] = None
    max_gen: Optional[int] = None
    section = None
    rows: List[np.ndarray] = []
    cells = {}
    init_rows: List[Tuple[float, float]] = []
    seen = set()
    last_no = 1
    for no, line in _lines(text):
        last_no = no
        toks = line.split()
        if line.startswith("["):
            if line not in ("[nominal]", "[uncertainty]", "[init]"):
                raise FormatError(f"unknown section {line!r}", no)
            if line in seen:
                raise FormatError(f"duplicate section {line}", no)
            seen.add(line)
            section = line
            continue
        if section is None:
            key = toks[0]
            if key == "names":
                if len(toks) != 1 + n:
                    raise FormatError(f"expected {n} variable names, got {len(toks) - 1}", no)
                for name in toks[1:]:
                    if not _NAME_RE.match(name):
                        raise FormatError(f"invalid variable name {name!r}", no)
                if len(set(toks[1:])) != n:
                    raise FormatError("variable names must be distinct", no)
                names = tuple(toks[1:])
            elif key == "max_generators":
                if len(toks) != 2:
                    raise FormatError("max_generators takes one value", no)
                max_gen = _int(toks[1], no, "max_generators")
                if max_gen < n:
                    raise FormatError(f"max_generators {max_gen} is below dimension {n}", no)
            else:
                raise FormatError(f"unknown key {key!r}", no)
        elif section == "[nominal]":
            if len(rows) == n:
                raise FormatError(f"nominal matrix has more than {n} rows", no)
            if len(toks) != n:
                raise FormatError(f"nominal row has {len(toks)} entries, expected {n}", no)
            rows.append(_floats(toks, no))
        elif section == "[uncertainty]":
            if len(toks) != 4:
                raise FormatError(f"uncertainty entry needs 4 fields (row col lo hi), got {len(toks)}", no)
            i, j = _int(toks[0], no, "row index"), _int(toks[1], no, "column index")
            if not (1 <= i <= n and 1 <= j <= n):
                raise FormatError(f"uncertainty cell ({i}, {j}) out of range 1..{n}", no)
            lo, hi = _float(toks[2], no), _float(toks[3], no)
            if lo > hi:
                raise FormatError(f"uncertainty interval at ({i}, {j}) has lo > hi", no)
            if (i - 1, j - 1) in cells:
                raise FormatError(f"duplicate uncertainty cell ({i}, {j})", no)
            cells[(i - 1, j - 1)] = (lo, hi)
        else:
            if len(init_rows) == n:
                raise FormatError(f"init has more than {n} rows", no)
            if len(toks) != 2:
                raise FormatError("init row needs 2 fields (lo hi)", no)
            lo, hi = _float(toks[0], no), _float(toks[1], no)
            if lo > hi:
                raise FormatError("init interval has lo > hi", no)
            init_rows.append((lo, hi))
    if len(rows) != n:
        raise FormatError(f"nominal matrix has {len(rows)} rows, expected {n}", last_no)
    if "[init]" in seen and len(init_rows) != n:
        raise FormatError(f"init has {len(init_rows)} rows, expected {n}", last_no)
    with _wrap(last_no):
        sys = UncertainLinearSystem(np.array(rows), cells)
    init = None
    if init_rows:
        arr = np.array(init_rows)
        init = IntervalBox(arr[:, 0], arr[:, 1])
    meta = ModelMeta(
        names=names or tuple(f"x{i + 1}" for i in range(n)),
        max_generators=max_gen if max_gen is not None else 5 * n,
        init=init,
    )
    return sys, meta


def write_model(sys: UncertainLinearSystem, meta: Optional[ModelMeta] = None) -> str:
    n = sys.dimension
    if meta is None:
        meta = ModelMeta(tuple(f"x{i + 1}" for i in range(n)), 5 * n)
    out = [f"#MODEL v1 dim={n}", "names " + " ".join(meta.names), f"max_generators {meta.max_generators}"]
    out.append("[nominal]")
    out.extend(" ".join(fmt(x) for x in row) for row in sys.nominal)
    out.append("[uncertainty]")
    for (i, j), (lo, hi) in sorted(sys.uncertainty.items()):
        out.append(f"{i + 1} {j + 1} {fmt(lo)} {fmt(hi)}")
    if meta.init is not None:
        out.append("[init]")
        out.extend(f"{fmt(lo)} {fmt(hi)}" for lo, hi in zip(meta.init.lower, meta.init.upper))
    return "\n".join(out) + "\n"


# --- unsafe specs -----------------------------------------------------------

_UNSAFE_HEADER = r"#UNSAFE v1 dim=(?P<dim>\d+)"
_TERM_RE = re.compile(r"([+-]?)(?:(" + r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?" + r")\*)?([A-Za-z_][A-Za-z0-9_]*)")


def _parse_expression(expr: str, index: dict, n: int, no: int) -> np.ndarray:
    s = expr.replace(" ", "")
    if not s:
        raise FormatError("empty left-hand side", no)
    normal = np.zeros(n)
    pos = 0
    while pos < len(s):
        m = _TERM_RE.match(s, pos)
        if m is None or (pos > 0 and not m.group(1)):
            raise FormatError(f"cannot parse term at {s[pos:]!r}", no)
        sign = -1.0 if m.group(1) == "-" else 1.0
        coef = float(m.group(2)) if m.group(2) else 1.0
        var = m.group(3)
        if var not in index:
            raise FormatError(f"unknown variable {var!r}", no)
        normal[index[var]] += sign * coef
        pos = m.end()
    return normal


def parse_unsafe(text: str, names: Optional[Sequence[str]] = None) -> UnsafeSpec:
    """Parse an unsafe spec; ``names`` adds aliases for ``x1..xn`` in expressions."""
    n = _dim(_header(text, _UNSAFE_HEADER))
    index = {f"x{i + 1}": i for i in range(n)}
    if names is not None:
        if len(names) != n:
            raise FormatError(f"{len(names)} variable names given for dimension {n}", 1)
        index.update({name: i for i, name in enumerate(names)})
    disjuncts = []
    last_no = 1
    for no, line in _lines(text):
        last_no = no
        toks = line.split()
        if toks[0] == "halfspace":
            if len(toks) != n + 3 or toks[n + 1] != ">=":
                raise FormatError(f"halfspace line must be 'halfspace <{n} numbers> >= <offset>'", no)
            normal = _floats(toks[1 : n + 1], no)
            offset = _float(toks[n + 2], no, "offset")
            if not np.any(normal != 0.0):
                raise FormatError("halfspace normal is zero", no)
            disjuncts.append(Halfspace(normal, offset))
        elif toks[0] == "zonotope":
            disjuncts.append(_zonotope_tokens(toks[1:], n, no))
        else:
            m = re.fullmatch(r"(.+?)(>=|<=)(.+)", line)
            if m is None:
                raise FormatError(f"unrecognised constraint {line[:60]!r}", no)
            normal = _parse_expression(m.group(1), index, n, no)
            offset = _float(m.group(3).strip(), no, "offset")
            if not np.any(normal != 0.0):
                raise FormatError("constraint has a zero normal", no)
            if m.group(2) == "<=":
                normal, offset = -normal, -offset
            disjuncts.append(Halfspace(normal + 0.0, offset + 0.0))
    if not disjuncts:
        raise FormatError("unsafe spec has no disjuncts", last_no)
    return UnsafeSpec(tuple(disjuncts))


def write_unsafe(u: UnsafeSpec) -> str:
    out = [f"#UNSAFE v1 dim={u.dim}"]
    for d in u.disjuncts:
        if isinstance(d, Halfspace):
            out.append(" ".join(["halfspace"] + [fmt(x) for x in d.normal] + [">=", fmt(d.offset)]))
        else:
            out.append(" ".join(["zonotope"] + _zonotope_fields(d)))
    return "\n".join(out) + "\n"


# --- plot exports -----------------------------------------------------------

CSV_HEADER = "t,reach_lower,reach_upper,sample_lower,sample_upper,unsafe_threshold"


class PlotRow(NamedTuple):
    t: int
    reach_lower: float
    reach_upper: float
    sample_lower: Optional[float]
    sample_upper: Optional[float]
    unsafe_threshold: Optional[float]


def unsafe_threshold(u: UnsafeSpec, dim: int) -> Optional[float]:
    """Threshold of the first halfspace that constrains only coordinate ``dim``."""
    for d in u.disjuncts:
        if isinstance(d, Halfspace) and d.normal[dim] != 0.0 and np.count_nonzero(d.normal) == 1:
            return d.offset / d.normal[dim]
    return None


def _check_dim_index(dim: int, n: int) -> None:
    if not 0 <= dim < n:
        raise IndexError(f"dimension index {dim} out of range for dimension {n}")


def plot_rows(verdict: Verdict, log: Log, u: Optional[UnsafeSpec], dim: int) -> List[PlotRow]:
    n = verdict.segments[0].sets[0].dim
    _check_dim_index(dim, n)
    thr = unsafe_threshold(u, dim) if u is not None else None
    boxes = {}
    for s in log.samples:
        box = s.region if isinstance(s.region, IntervalBox) else interval_hull(s.region)
        boxes[s.time] = (float(box.lower[dim]), float(box.upper[dim]))
    rows = []
    for t, z in concat_bounds(verdict.segments):
        h = interval_hull(z)
        lo, hi = boxes.get(t, (None, None))
        rows.append(PlotRow(t, float(h.lower[dim]), float(h.upper[dim]), lo, hi, thr))
    return rows


def _cell(x: Optional[float]) -> str:
    return "" if x is None else fmt(x)


def write_plot_csv(rows: Sequence[PlotRow]) -> str:
    out = [CSV_HEADER]
    for r in rows:
        out.append(",".join([str(r.t)] + [_cell(x) for x in r[1:]]))
    return "\n".join(out) + "\n"


def parse_plot_csv(text: str) -> List[PlotRow]:
    lines = text.split("\n")
    if lines[0] != CSV_HEADER:
        raise FormatError("malformed CSV header", 1)
    if lines[-1] != "":
        raise FormatError("missing final newline", len(lines))
    rows = []
    for no, line in enumerate(lines[1:-1], start=2):
        cells = line.split(",")
        if len(cells) != 6:
            raise FormatError(f"expected 6 columns, got {len(cells)}", no)
        t = _int(cells[0], no, "time")
        reach = [_float(c, no) for c in cells[1:3]]
        rest = [None if c == "" else _float(c, no) for c in cells[3:]]
        if (rest[0] is None) != (rest[1] is None):
            raise FormatError("sample bounds must both be present or both empty", no)
        if rows and t != rows[-1].t + 1:
            raise FormatError(f"expected time {rows[-1].t + 1}, got {t}", no)
        rows.append(PlotRow(t, reach[0], reach[1], rest[0], rest[1], rest[2]))
    return rows


def export_plot_data(verdict: Verdict, log: Log, u: Optional[UnsafeSpec], dim: int) -> str:
    return write_plot_csv(plot_rows(verdict, log, u, dim))


@dataclass
class _Layer:
    rows: List[PlotRow]
    band: str
    mark: str


_W, _H, _M = 800, 400, 40


def export_plot_svg(
    verdict: Verdict,
    log: Log,
    u: Optional[UnsafeSpec],
    dim: int,
    overlay: Optional[Tuple[Verdict, Log]] = None,
    label: str = "",
) -> str:
    """Render reach band, sample marks and unsafe threshold, in that order.

    ``overlay`` is drawn underneath in green/magenta (e.g. an offline run
    compared against an online one).
    """
    layers = []
    if overlay is not None:
        layers.append(_Layer(plot_rows(overlay[0], overlay[1], u, dim), "#2ca02c", "#d62ad6"))
    layers.append(_Layer(plot_rows(verdict, log, u, dim), "#1f77b4", "#000000"))
    thr = unsafe_threshold(u, dim) if u is not None else None

    ts = [r.t for layer in layers for r in layer.rows]
    ys = [v for layer in layers for r in layer.rows for v in r[1:5] if v is not None]
    if thr is not None:
        ys.append(thr)
    t0, t1 = min(ts), max(ts)
    y0, y1 = min(ys), max(ys)
    if t1 == t0:
        t1 = t0 + 1
    if y1 == y0:
        y0, y1 = y0 - 1.0, y1 + 1.0
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad

    def px(t):
        return f"{_M + (t - t0) / (t1 - t0) * (_W - 2 * _M):.3f}"

    def py(y):
        return f"{_H - _M - (y - y0) / (y1 - y0) * (_H - 2 * _M):.3f}"

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="#ffffff"/>',
        f'<line x1="{_M}" y1="{_H - _M}" x2="{_W - _M}" y2="{_H - _M}" stroke="#444444"/>',
        f'<line x1="{_M}" y1="{_M}" x2="{_M}" y2="{_H - _M}" stroke="#444444"/>',
        f'<text x="{_M}" y="{_M - 10}" font-size="12" font-family="sans-serif">{label}</text>',
        f'<text x="{_M - 4}" y="{_H - _M + 14}" font-size="10" text-anchor="end">{y0:.4g}</text>',
        f'<text x="{_M - 4}" y="{_M}" font-size="10" text-anchor="end">{y1:.4g}</text>',
        f'<text x="{_W - _M}" y="{_H - _M + 14}" font-size="10" text-anchor="end">t={t1}</text>',
    ]
    for layer in layers:
        pts = [f"{px(r.t)},{py(r.reach_upper)}" for r in layer.rows]
        pts += [f"{px(r.t)},{py(r.reach_lower)}" for r in reversed(layer.rows)]
        out.append(f'<polygon class="reach" points="{" ".join(pts)}" fill="{layer.band}" fill-opacity="0.45" stroke="{layer.band}"/>')
    half = max(1.5, 0.3 * (_W - 2 * _M) / max(1, t1 - t0))
    for layer in layers:
        for r in layer.rows:
            if r.sample_lower is None:
                continue
            x = float(px(r.t))
            top, bottom = float(py(r.sample_upper)), float(py(r.sample_lower))
            out.append(
                f'<rect class="sample" x="{x - half:.3f}" y="{top:.3f}" width="{2 * half:.3f}" '
                f'height="{max(bottom - top, 1.0):.3f}" fill="{layer.mark}"/>'
            )
    if thr is not None:
        out.append(
            f'<line class="unsafe" x1="{_M}" y1="{py(thr)}" x2="{_W - _M}" y2="{py(thr)}" '
            f'stroke="#d62728" stroke-width="1.5" stroke-dasharray="6,4"/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
