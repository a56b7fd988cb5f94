"""Line-oriented problem-file format.

A problem file is plain text: `#` starts a comment, blank lines are ignored,
and each statement is a key followed by its value(s), whitespace-separated.
Array values (g, H, W) may continue across as many lines as needed, which
keeps matrices readable as one row per line.  Keys:

    n        problem dimension (positive integer), must precede g/H/W
    f0       constant term
    beta     cubic coefficient
    sigma    quartic coefficient (>= 0)
    g        n values
    H        n*n values row-major, or n(n+1)/2 with `layout upper`
    W        optional weight matrix, same layouts as H
    layout   `dense` (default) or `upper`; must precede H and W
    id       rest of the line: instance name carried into reports
    comment  rest of the line: ignored free text

Numbers are decimal (`-12`, `6.02e23`) or exact hex floats (`0x1.8p+1`);
hex is only attempted for tokens starting with 0x so that `1.5` keeps its
decimal meaning.  Unknown and duplicate keys are rejected.  All parse errors
carry the 1-based line and column of the offending token.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

import numpy as np

from .core import CqrProblem
from .errors import ParseError

__all__ = ["load", "loads", "dumps", "sha256_digest"]

_NUM_SCALARS = ("n", "f0", "beta", "sigma")
_ARRAY_KEYS = ("g", "H", "W")
_LINE_KEYS = ("id", "comment")
_ALL_KEYS = _NUM_SCALARS + _ARRAY_KEYS + _LINE_KEYS + ("layout",)
_REQUIRED = ("n", "f0", "beta", "sigma", "g", "H")


def _parse_number(token: str, line: int, col: int) -> float:
    low = token.lower()
    try:
        if low.startswith(("0x", "+0x", "-0x")):
            value = float.fromhex(token)
        else:
            value = float(token)
    except ValueError:
        raise ParseError(f"expected a number, got {token!r}", line, col) from None
    if not np.isfinite(value):
        raise ParseError(f"non-finite value {token!r}", line, col)
    return value


def _square_from_upper(vals: list[float], n: int) -> np.ndarray:
    m = np.zeros((n, n))
    k = 0
    for i in range(n):
        for j in range(i, n):
            m[i, j] = m[j, i] = vals[k]
            k += 1
    return m


def loads(text: str) -> CqrProblem:
    """Parse a problem document into a validated CqrProblem."""
    seen: dict[str, tuple[int, int]] = {}
    numbers: dict[str, list[float]] = {}
    strings: dict[str, str] = {}
    layout = "dense"

    fill_key: str | None = None      # statement currently consuming values
    fill_need = 0
    fill_vals: list[float] = []
    fill_loc = (1, 1)
    want_layout_word = False
    matrices_read = False
    n_checked = False
    last_line = 1

    for lineno, raw in enumerate(text.splitlines(), start=1):
        last_line = lineno
        body = raw.split("#", 1)[0]
        pos = 0
        while True:
            while pos < len(body) and body[pos].isspace():
                pos += 1
            if pos >= len(body):
                break
            start = pos
            while pos < len(body) and not body[pos].isspace():
                pos += 1
            token = body[start:pos]
            col = start + 1

            if want_layout_word:
                if token not in ("dense", "upper"):
                    raise ParseError(
                        f"layout must be 'dense' or 'upper', got {token!r}",
                        lineno,
                        col,
                    )
                layout = token
                want_layout_word = False
                continue

            if fill_key is not None:
                fill_vals.append(_parse_number(token, lineno, col))
                if len(fill_vals) == fill_need:
                    numbers[fill_key] = fill_vals
                    fill_key, fill_vals = None, []
                continue

            if token not in _ALL_KEYS:
                raise ParseError(f"unknown key {token!r}", lineno, col)
            if token in seen:
                first_line = seen[token][0]
                raise ParseError(
                    f"duplicate key {token!r} (first given at line {first_line})",
                    lineno,
                    col,
                )
            seen[token] = (lineno, col)

            if token in _LINE_KEYS:
                rest = body[pos:].strip()
                if not rest:
                    raise ParseError(f"{token} requires a value", lineno, col)
                strings[token] = rest
                break  # rest of this line belongs to the value

            if token == "layout":
                if matrices_read:
                    raise ParseError(
                        "layout must appear before H and W", lineno, col
                    )
                want_layout_word = True
                continue

            if token in _ARRAY_KEYS:
                if "n" not in numbers:
                    raise ParseError(f"n must be given before {token}", lineno, col)
                n = int(numbers["n"][0])
                if token == "g":
                    fill_need = n
                else:
                    fill_need = n * (n + 1) // 2 if layout == "upper" else n * n
                    matrices_read = True
            else:  # numeric scalar
                fill_need = 1
            fill_key, fill_vals, fill_loc = token, [], (lineno, col)

        # validate n as soon as its value has been read
        if "n" in numbers and not n_checked:
            v = numbers["n"][0]
            n_line, n_col = seen["n"]
            if v != int(v) or int(v) <= 0:
                raise ParseError(f"n must be a positive integer, got {v}", n_line, n_col)
            n_checked = True

    if want_layout_word:
        raise ParseError("layout requires a value", *seen["layout"])
    if fill_key is not None:
        if fill_need == 1:
            raise ParseError(f"{fill_key} requires a value", *fill_loc)
        raise ParseError(
            f"{fill_key} expects {fill_need} values, got {len(fill_vals)}",
            last_line,
            1,
        )

    missing = [k for k in _REQUIRED if k not in numbers]
    if missing:
        raise ParseError(
            f"missing required key(s): {', '.join(missing)}", last_line, 1
        )

    n = int(numbers["n"][0])
    g = np.asarray(numbers["g"], dtype=float)
    upper = layout == "upper"
    hv = numbers["H"]
    H = _square_from_upper(hv, n) if upper else np.asarray(hv).reshape(n, n)
    W = None
    if "W" in numbers:
        wv = numbers["W"]
        W = _square_from_upper(wv, n) if upper else np.asarray(wv).reshape(n, n)

    return CqrProblem(
        f0=numbers["f0"][0],
        beta=numbers["beta"][0],
        sigma=numbers["sigma"][0],
        g=g,
        H=H,
        W=W,
        name=strings.get("id", ""),
    )


def load(path: str | Path) -> CqrProblem:
    return loads(Path(path).read_text(encoding="utf-8"))


def dumps(problem: CqrProblem) -> str:
    """Canonical dense-layout document; floats as shortest exact decimals."""
    out: list[str] = []
    if problem.name:
        out.append(f"id {problem.name}")
    out.append(f"n {problem.n}")
    out.append(f"f0 {problem.f0!r}")
    out.append(f"beta {problem.beta!r}")
    out.append(f"sigma {problem.sigma!r}")
    out.append("g " + " ".join(repr(float(v)) for v in problem.g))
    out.append("H")
    for row in problem.H:
        out.append("  " + " ".join(repr(float(v)) for v in row))
    if problem.W is not None:
        out.append("W")
        for row in problem.W:
            out.append("  " + " ".join(repr(float(v)) for v in row))
    return "\n".join(out) + "\n"


def sha256_digest(data: str | bytes) -> str:
    if isinstance(data, str):
        data = data.encode("utf-8")
    return hashlib.sha256(data).hexdigest()
