"""Reading and writing system files.

Text format::

    # comment lines start with '#'
    r m
    <r lines of m integers>       (the matrix A)
    <optional line of r integers> (b; zeros when omitted)

JSON format: ``{"A": [[...], ...], "b": [...]}`` with ``b`` optional.
Partition files are JSON lists of partitions, each a list of classes of
1-based column indices.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Union

from .errors import LinsolError, ParseError
from .exact_linalg import IntMatrix
from .partitions import Partition, PartitionFamily
from .system_properties import SystemSpec


def _ints(line: str, lineno: int) -> list[int]:
    try:
        return [int(tok) for tok in line.split()]
    except ValueError:
        raise ParseError(f"line {lineno}: expected integers, got {line.strip()!r}") from None


def _build(A, b) -> SystemSpec:
    try:
        return SystemSpec(IntMatrix(A), b)
    except LinsolError as exc:
        raise ParseError(str(exc)) from exc


def parse_system_text(text: str) -> SystemSpec:
    lines = [(i, ln) for i, ln in enumerate(text.splitlines(), start=1)
             if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ParseError("empty system file")
    head = _ints(lines[0][1], lines[0][0])
    if len(head) != 2 or head[0] < 1 or head[1] < 1:
        raise ParseError(f"line {lines[0][0]}: header must be 'r m' with positive r, m")
    r, m = head
    body = lines[1:]
    if len(body) not in (r, r + 1):
        raise ParseError(f"expected {r} matrix rows and an optional b line, got {len(body)} lines")
    A = []
    for i, ln in body[:r]:
        row = _ints(ln, i)
        if len(row) != m:
            raise ParseError(f"line {i}: expected {m} entries, got {len(row)}")
        A.append(row)
    b = None
    if len(body) == r + 1:
        i, ln = body[r]
        b = _ints(ln, i)
        if len(b) != r:
            raise ParseError(f"line {i}: b needs {r} entries, got {len(b)}")
    return _build(A, b)


def parse_system_json(text: str) -> SystemSpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or "A" not in doc:
        raise ParseError('JSON system needs an object with key "A"')
    A, b = doc["A"], doc.get("b")

    def int_list(v):
        return isinstance(v, list) and all(isinstance(x, int) and not isinstance(x, bool) for x in v)

    if not isinstance(A, list) or not A or not all(int_list(row) for row in A):
        raise ParseError('"A" must be a nonempty array of integer arrays')
    if len({len(row) for row in A}) != 1 or not A[0]:
        raise ParseError('rows of "A" must have equal nonzero length')
    if b is not None and (not int_list(b) or len(b) != len(A)):
        raise ParseError(f'"b" must be an array of {len(A)} integers')
    return _build(A, b)


def parse_system(text: str) -> SystemSpec:
    if text.lstrip().startswith("{"):
        return parse_system_json(text)
    return parse_system_text(text)


def load_system(path: Union[str, Path]) -> SystemSpec:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    return parse_system(text)


def format_matrix(A: IntMatrix) -> str:
    lines = [f"{A.rows} {A.cols}"]
    lines += [" ".join(str(v) for v in row) for row in A.tolist()]
    return "\n".join(lines) + "\n"


def format_system_text(spec: SystemSpec) -> str:
    return format_matrix(spec.A) + " ".join(str(v) for v in spec.b) + "\n"


def system_to_dict(spec: SystemSpec) -> dict:
    return {"A": spec.A.tolist(), "b": list(spec.b)}


def format_system_json(spec: SystemSpec) -> str:
    return json.dumps(system_to_dict(spec)) + "\n"


def parse_partitions(text: str, m: int) -> PartitionFamily:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid partition JSON: {exc}") from None
    if not isinstance(doc, list):
        raise ParseError("partition file must hold a list of partitions")
    try:
        return PartitionFamily(m, [Partition(classes) for classes in doc])
    except (LinsolError, TypeError, ValueError) as exc:
        raise ParseError(f"bad partition: {exc}") from None


def load_partitions(path: Union[str, Path], m: int) -> PartitionFamily:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    return parse_partitions(text, m)
