"""Plain-text formats for distributions, samples, decompositions and set-function tables.

Distribution::

    vars n
    cards c_0 ... c_{n-1}
    p        (one line per cell, row-major, last variable fastest)

Samples::

    samples n m
    cards c_0 ... c_{n-1}
    x_0 ... x_{n-1}      (m lines)

Decomposition::

    td n_bags
    bag i: v ...
    edge i j

Set-function table (for ``minimize``)::

    ground n
    mask value          (one line per subset, subset given as a bitmask)

Lines starting with ``#`` and blank lines are ignored everywhere.
"""

from __future__ import annotations

from pathlib import Path
from typing import Union

import numpy as np

from .discrete import JointTable, VarSet, validate
from .errors import FormatError
from .estimation import SampleSet
from .treedecomp import TreeDecomposition

PathLike = Union[str, Path]


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def _lines(text: str) -> list[str]:
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


def _header(line: str, word: str, count: int) -> list[int]:
    parts = line.split()
    if parts[0] != word or len(parts) != count + 1:
        raise FormatError(f"expected '{word}' header with {count} value(s), got {line!r}")
    try:
        return [int(p) for p in parts[1:]]
    except ValueError as exc:
        raise FormatError(f"bad integer in {line!r}") from exc


def _cards(line: str, n: int) -> tuple[int, ...]:
    parts = line.split()
    if parts[0] != "cards" or len(parts) != n + 1:
        raise FormatError(f"expected 'cards' line with {n} values, got {line!r}")
    try:
        return tuple(int(p) for p in parts[1:])
    except ValueError as exc:
        raise FormatError(f"bad cardinality in {line!r}") from exc


def format_distribution(t: JointTable) -> str:
    out = [f"vars {t.n}", "cards " + " ".join(map(str, t.cards))]
    out.extend(fmt_float(p) for p in t.probs)
    return "\n".join(out) + "\n"


def parse_distribution(text: str) -> JointTable:
    lines = _lines(text)
    if len(lines) < 2:
        raise FormatError("distribution file is truncated")
    (n,) = _header(lines[0], "vars", 1)
    cards = _cards(lines[1], n)
    try:
        probs = np.array([float(x) for x in lines[2:]])
    except ValueError as exc:
        raise FormatError("probability lines must be decimal numbers") from exc
    t = JointTable(VarSet(cards), probs)
    validate(t)
    return t


def format_samples(s: SampleSet) -> str:
    out = [f"samples {s.n} {s.m}", "cards " + " ".join(map(str, s.cards))]
    out.extend(" ".join(map(str, row)) for row in s.rows.tolist())
    return "\n".join(out) + "\n"


def parse_samples(text: str) -> SampleSet:
    lines = _lines(text)
    if len(lines) < 2:
        raise FormatError("sample file is truncated")
    n, m = _header(lines[0], "samples", 2)
    cards = _cards(lines[1], n)
    body = lines[2:]
    if len(body) != m:
        raise FormatError(f"header announces {m} rows, found {len(body)}")
    try:
        rows = np.array([[int(x) for x in ln.split()] for ln in body], dtype=np.int64)
    except ValueError as exc:
        raise FormatError("sample rows must be integers") from exc
    if rows.shape != (m, n):
        raise FormatError(f"expected {m} rows of {n} integers")
    return SampleSet(VarSet(cards), rows)


def format_td(td: TreeDecomposition) -> str:
    out = [f"td {len(td.bags)}"]
    out.extend(f"bag {i}: " + " ".join(map(str, b)) for i, b in enumerate(td.bags))
    out.extend(f"edge {i} {j}" for i, j in td.edges)
    return "\n".join(out) + "\n"


def parse_td(text: str) -> TreeDecomposition:
    lines = _lines(text)
    if not lines:
        raise FormatError("decomposition file is empty")
    (nb,) = _header(lines[0], "td", 1)
    bags: dict[int, tuple[int, ...]] = {}
    edges = []
    try:
        for ln in lines[1:]:
            if ln.startswith("bag"):
                head, _, rest = ln.partition(":")
                bags[int(head.split()[1])] = tuple(int(v) for v in rest.split())
            elif ln.startswith("edge"):
                _, i, j = ln.split()
                edges.append((int(i), int(j)))
            else:
                raise FormatError(f"unexpected line {ln!r}")
    except (ValueError, IndexError) as exc:
        raise FormatError(f"malformed decomposition line: {exc}") from exc
    if sorted(bags) != list(range(nb)):
        raise FormatError(f"expected bags 0..{nb - 1}, got {sorted(bags)}")
    return TreeDecomposition(tuple(bags[i] for i in range(nb)), tuple(edges))


def parse_oracle_table(text: str) -> tuple[int, dict[int, float]]:
    lines = _lines(text)
    if not lines:
        raise FormatError("oracle file is empty")
    (n,) = _header(lines[0], "ground", 1)
    values: dict[int, float] = {}
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise FormatError(f"expected 'mask value', got {ln!r}")
        try:
            mask, value = int(parts[0], 0), float(parts[1])
        except ValueError as exc:
            raise FormatError(f"bad oracle line {ln!r}") from exc
        if mask < 0 or mask >= 1 << n:
            raise FormatError(f"mask {mask} outside a ground set of {n}")
        values[mask] = value
    return n, values


def format_oracle_table(n: int, values: dict[int, float]) -> str:
    out = [f"ground {n}"]
    out.extend(f"{mask} {fmt_float(values[mask])}" for mask in sorted(values))
    return "\n".join(out) + "\n"


def read_text(path: PathLike) -> str:
    return Path(path).read_text()


def write_text(path: PathLike, text: str) -> None:
    Path(path).write_text(text)
