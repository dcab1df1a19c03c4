"""Line-oriented text formats for tensors, decompositions and certificates."""

from __future__ import annotations

import re
from typing import Iterable

import numpy as np

from .bounds.layer_reduction import BoundCertificate, CertificateBase, CertificateStep
from .decompositions import Decomposition
from .errors import ParseError, TensorRankError
from .fields import Field, parse_field
from .tensor import SimpleTensor, Tensor


def _lines(text: str) -> list[str]:
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


def _expect(lines: list[str], pos: int, prefix: str) -> str:
    if pos >= len(lines):
        raise ParseError(f"unexpected end of input, expected {prefix!r}")
    line = lines[pos]
    if line != prefix and not line.startswith(prefix + " "):
        raise ParseError(f"line {pos + 1}: expected {prefix!r}, got {line!r}")
    return line[len(prefix) :].strip()


def _ints(text: str, what: str) -> list[int]:
    try:
        return [int(t) for t in text.split()]
    except ValueError as exc:
        raise ParseError(f"bad {what}: {text!r}") from exc


def _header(lines: list[str], kind: str) -> tuple[Field, tuple[int, ...]]:
    if not lines or lines[0] != f"{kind} v1":
        raise ParseError(f"missing '{kind} v1' header")
    field = parse_field(_expect(lines, 1, "field"))
    shape = tuple(_ints(_expect(lines, 2, "shape"), "shape"))
    if not shape or any(n < 1 for n in shape):
        raise ParseError(f"bad shape {shape}")
    return field, shape


# ---------------------------------------------------------------------------
# Tensors
# ---------------------------------------------------------------------------


def format_tensor(T: Tensor, dense: bool = False) -> str:
    """Sparse listing of nonzero cells; ``dense=True`` lists every cell."""
    F = T.field
    out = ["tensor v1", f"field {F.literal}", "shape " + " ".join(str(n) for n in T.shape)]
    if dense:
        cells = ((tuple(int(i) for i in idx), T.data[idx]) for idx in np.ndindex(*T.shape))
    else:
        cells = T.nonzeros()
    for idx, v in cells:
        out.append(" ".join(str(i) for i in idx) + " " + F.format(v))
    out.append("end")
    return "\n".join(out) + "\n"


def parse_tensor(text: str) -> Tensor:
    lines = _lines(text)
    F, shape = _header(lines, "tensor")
    if lines[-1] != "end":
        raise ParseError("missing 'end'")
    data = F.zeros(shape)
    d = len(shape)
    for n, line in enumerate(lines[3:-1], 4):
        parts = line.split()
        if len(parts) != d + 1:
            raise ParseError(f"line {n}: expected {d} indices and a scalar")
        idx = tuple(_ints(" ".join(parts[:d]), "index"))
        if any(not 0 <= i < m for i, m in zip(idx, shape)):
            raise ParseError(f"line {n}: index {idx} outside shape {shape}")
        data[idx] = F.parse(parts[d])
    return Tensor(F, data)


# ---------------------------------------------------------------------------
# Decompositions
# ---------------------------------------------------------------------------


def format_decomposition(D: Decomposition) -> str:
    F = D.field
    out = ["decomposition v1", f"field {F.literal}", "shape " + " ".join(str(n) for n in D.shape), f"terms {len(D.terms)}"]
    for t in D.terms:
        for j, v in enumerate(t.vectors):
            out.append(f"vec {j} " + " ".join(F.format(x) for x in v))
    out.append("end")
    return "\n".join(out) + "\n"


def parse_decomposition(text: str) -> Decomposition:
    lines = _lines(text)
    F, shape = _header(lines, "decomposition")
    r = _ints(_expect(lines, 3, "terms"), "term count")
    if len(r) != 1 or r[0] < 0:
        raise ParseError("bad term count")
    r = r[0]
    d = len(shape)
    body = lines[4:]
    if len(body) != r * d + 1 or body[-1] != "end":
        raise ParseError(f"expected {r * d} vec lines followed by 'end'")
    terms = []
    for t in range(r):
        vecs = []
        for j in range(d):
            line = body[t * d + j]
            parts = line.split()
            if len(parts) < 2 or parts[0] != "vec" or parts[1] != str(j):
                raise ParseError(f"term {t}: expected 'vec {j}', got {line!r}")
            if len(parts) - 2 != shape[j]:
                raise ParseError(f"term {t} axis {j}: expected {shape[j]} scalars")
            vecs.append(F.array([F.parse(s) for s in parts[2:]]))
        terms.append(SimpleTensor(F, vecs))
    return Decomposition(F, shape, terms)


# ---------------------------------------------------------------------------
# Certificates
# ---------------------------------------------------------------------------


def _format_set(ix: Iterable[int]) -> str:
    ix = sorted(ix)
    runs = []
    k = 0
    while k < len(ix):
        j = k
        while j + 1 < len(ix) and ix[j + 1] == ix[j] + 1:
            j += 1
        runs.append(str(ix[k]) if j == k else f"{ix[k]}-{ix[j]}")
        k = j + 1
    return ",".join(runs)


def _parse_set(text: str) -> tuple[int, ...]:
    out: list[int] = []
    if not text:
        return ()
    for part in text.split(","):
        m = re.fullmatch(r"(\d+)(?:-(\d+))?", part)
        if not m:
            raise ParseError(f"bad index set {text!r}")
        a = int(m.group(1))
        b = int(m.group(2)) if m.group(2) else a
        if b < a:
            raise ParseError(f"bad range {part!r}")
        out.extend(range(a, b + 1))
    return tuple(out)


def _format_split(split) -> str:
    rows, cols = split
    return ",".join(map(str, rows)) + "|" + ",".join(map(str, cols))


def format_certificate(cert: BoundCertificate) -> str:
    out = ["certificate v1", f"tensor sha256:{cert.tensor_digest}"]
    for s in cert.steps:
        elim = ",".join(map(str, s.eliminate)) if s.eliminate else "none"
        box = ";".join(f"{a}:{_format_set(ix)}" for a, ix in enumerate(s.box))
        out.append(f"step axis={s.axis} eliminate={elim} box={box}")
    b = cert.base
    if b.kind == "flattening":
        out.append(f"base flattening split={_format_split(b.split)} value={b.value}")
    else:
        out.append(f"base {b.kind} value={b.value}")
    out.append(f"claim {cert.claim}")
    if cert.partial:
        out.append("partial")
    out.append("end")
    return "\n".join(out) + "\n"


def _fields(text: str) -> dict[str, str]:
    out = {}
    for tok in text.split():
        if "=" not in tok:
            raise ParseError(f"expected key=value, got {tok!r}")
        k, v = tok.split("=", 1)
        out[k] = v
    return out


def parse_certificate(text: str) -> BoundCertificate:
    lines = _lines(text)
    if not lines or lines[0] != "certificate v1":
        raise ParseError("missing 'certificate v1' header")
    digest = _expect(lines, 1, "tensor")
    if not digest.startswith("sha256:"):
        raise ParseError("tensor line must carry a sha256 digest")
    digest = digest[len("sha256:") :]
    steps = []
    pos = 2
    while pos < len(lines) and lines[pos].startswith("step "):
        kv = _fields(lines[pos][5:])
        try:
            axis = int(kv["axis"])
            elim = () if kv["eliminate"] == "none" else _parse_set(kv["eliminate"])
            box_parts = kv["box"].split(";")
        except (KeyError, ValueError) as exc:
            raise ParseError(f"line {pos + 1}: malformed step") from exc
        box = []
        for a, part in enumerate(box_parts):
            head, _, rest = part.partition(":")
            if head != str(a):
                raise ParseError(f"line {pos + 1}: box axes must be listed in order")
            box.append(_parse_set(rest))
        steps.append(CertificateStep(axis, tuple(elim), tuple(box)))
        pos += 1
    base_text = _expect(lines, pos, "base")
    kind, _, rest = base_text.partition(" ")
    kv = _fields(rest)
    try:
        value = int(kv["value"])
    except (KeyError, ValueError) as exc:
        raise ParseError("base line needs value=<int>") from exc
    split = None
    if kind == "flattening":
        if "split" not in kv or "|" not in kv["split"]:
            raise ParseError("flattening base needs split=<rows>|<cols>")
        r, c = kv["split"].split("|")
        split = (tuple(_parse_set(r)), tuple(_parse_set(c)))
    elif kind != "oracle":
        raise ParseError(f"unknown base kind {kind!r}")
    pos += 1
    claim = _ints(_expect(lines, pos, "claim"), "claim")
    if len(claim) != 1:
        raise ParseError("claim needs one integer")
    pos += 1
    partial = False
    if pos < len(lines) and lines[pos] == "partial":
        partial = True
        pos += 1
    if pos != len(lines) - 1 or lines[pos] != "end":
        raise ParseError("expected 'end'")
    return BoundCertificate(digest, tuple(steps), CertificateBase(kind, value, split), claim[0], partial)


def read_any(text: str):
    """Parse whichever of the three formats ``text`` holds."""
    head = text.lstrip().split("\n", 1)[0].strip()
    parsers = {
        "tensor v1": parse_tensor,
        "decomposition v1": parse_decomposition,
        "certificate v1": parse_certificate,
    }
    if head not in parsers:
        raise ParseError(f"unrecognised file header {head!r}")
    try:
        return parsers[head](text)
    except ParseError:
        raise
    except TensorRankError as exc:
        raise ParseError(str(exc)) from exc
