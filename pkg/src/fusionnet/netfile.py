"""Plain-text network description files.

One directive per line, ``#`` starts a comment::

    n 3
    edge 2 1
    edge 3 1
    model wgn sigma 1.0 1.0 0.5
    prior 0.5
    cost 0 1 1 0

``model corr mu <mu> sigs2 <s2> tau <tau> lam <lam>`` describes the
correlated two-sensor model (``n 2``, ``edge 2 1``). Node 1 is the fusion
center and may not have outgoing arrows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from .errors import FusionError, ParseError
from .models import CorrelatedModel, WgnModel
from .netgraph import Dag, dag_from_edges
from .objectives import CostMatrix

CORR_KEYS = ("mu", "sigs2", "tau", "lam")


@dataclass(frozen=True)
class NetworkSpec:
    dag: Dag
    model: WgnModel | CorrelatedModel | None = None
    prior: float | None = None
    cost: CostMatrix | None = None


def _num(tok: str, line: int, what: str) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise ParseError(f"{what}: expected a number, got {tok!r}", line) from None
    if not math.isfinite(v):
        raise ParseError(f"{what}: value must be finite, got {tok!r}", line)
    return v


def _int(tok: str, line: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"{what}: expected an integer, got {tok!r}", line) from None


def parse_network(text: str) -> NetworkSpec:
    n = None
    edges = []
    model_line = None
    prior = cost = None
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = raw.split("#", 1)[0].split()
        if not toks:
            continue
        key, args = toks[0].lower(), toks[1:]
        if key in ("n", "model", "prior", "cost") and key in seen:
            raise ParseError(f"duplicate '{key}' directive", lineno)
        seen.add(key)
        if key == "n":
            if len(args) != 1:
                raise ParseError("'n' takes exactly one value", lineno)
            n = _int(args[0], lineno, "n")
            if n < 1:
                raise ParseError("node count must be positive", lineno)
        elif key == "edge":
            if len(args) != 2:
                raise ParseError("'edge' takes two node indices", lineno)
            i, j = _int(args[0], lineno, "edge"), _int(args[1], lineno, "edge")
            if i == 1:
                raise ParseError(f"node 1 is the fusion center and cannot send (edge 1 -> {j})", lineno)
            edges.append((i, j, lineno))
        elif key == "model":
            model_line = (args, lineno)
        elif key == "prior":
            if len(args) != 1:
                raise ParseError("'prior' takes one value", lineno)
            prior = _num(args[0], lineno, "prior")
            if not 0.0 < prior < 1.0:
                raise ParseError(f"prior must lie in (0,1), got {prior}", lineno)
        elif key == "cost":
            if len(args) != 4:
                raise ParseError("'cost' takes four values c00 c01 c10 c11", lineno)
            vals = [_num(a, lineno, "cost") for a in args]
            try:
                cost = CostMatrix(*vals)
            except FusionError as exc:
                raise ParseError(str(exc), lineno) from None
        else:
            raise ParseError(f"unknown directive {toks[0]!r}", lineno)
    if n is None:
        raise ParseError("missing 'n <count>' directive")
    for i, j, lineno in edges:
        if not (1 <= i <= n and 1 <= j <= n):
            raise ParseError(f"edge {i} -> {j} references a node outside 1..{n}", lineno)
    dag = dag_from_edges(n, [(i, j) for i, j, _ in edges])
    model = _parse_model(*model_line, n) if model_line else None
    if isinstance(model, CorrelatedModel) and dag.edges != ((2, 1),):
        raise ParseError("the correlated model needs the two-node network 'n 2' / 'edge 2 1'", model_line[1])
    return NetworkSpec(dag, model, prior, cost)


def _parse_model(args, lineno, n):
    if not args:
        raise ParseError("'model' needs a kind (wgn or corr)", lineno)
    kind = args[0].lower()
    try:
        if kind == "wgn":
            if len(args) < 2 or args[1].lower() != "sigma":
                raise ParseError("expected 'model wgn sigma <s1> ... <sn>'", lineno)
            sig = [_num(a, lineno, "sigma") for a in args[2:]]
            if len(sig) != n:
                raise ParseError(f"{len(sig)} noise levels given for {n} nodes", lineno)
            return WgnModel(tuple(sig))
        if kind == "corr":
            rest = args[1:]
            if len(rest) != 2 * len(CORR_KEYS):
                raise ParseError("expected 'model corr mu <m> sigs2 <s> tau <t> lam <l>'", lineno)
            vals = {}
            for k, v in zip(rest[0::2], rest[1::2]):
                k = k.lower()
                if k not in CORR_KEYS or k in vals:
                    raise ParseError(f"unexpected or repeated key {k!r} in correlated model", lineno)
                vals[k] = _num(v, lineno, k)
            return CorrelatedModel(vals["mu"], vals["sigs2"], vals["tau"], vals["lam"])
    except ParseError:
        raise
    except FusionError as exc:
        raise ParseError(str(exc), lineno) from None
    raise ParseError(f"unknown model kind {args[0]!r}", lineno)


def load_network(path) -> NetworkSpec:
    return parse_network(Path(path).read_text())


def serialize_network(spec: NetworkSpec) -> str:
    lines = [f"n {spec.dag.n}"]
    lines += [f"edge {i} {j}" for i, j in spec.dag.edges]
    m = spec.model
    if isinstance(m, WgnModel):
        lines.append("model wgn sigma " + " ".join(repr(s) for s in m.sigmas))
    elif isinstance(m, CorrelatedModel):
        lines.append(f"model corr mu {m.mu!r} sigs2 {m.sigma_s2!r} tau {m.tau!r} lam {m.lam!r}")
    if spec.prior is not None:
        lines.append(f"prior {spec.prior!r}")
    if spec.cost is not None:
        c = spec.cost
        lines.append(f"cost {c.c00!r} {c.c01!r} {c.c10!r} {c.c11!r}")
    return "\n".join(lines) + "\n"
