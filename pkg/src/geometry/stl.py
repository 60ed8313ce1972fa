"""
STL Reader/Writer
Parses binary and ASCII STL into a triangle soup and writes both formats back.

Binary layout: 80-byte header, uint32 LE triangle count, then per triangle
12 float32 LE (normal + 3 vertices) and a uint16 attribute word.
"""

from dataclasses import dataclass
from typing import Iterable, Optional, Tuple, Union
import logging

import numpy as np

from src.errors import StlParseError

HEADER_SIZE = 80
COUNT_SIZE = 4
RECORD_SIZE = 50

_BINARY_RECORD = np.dtype(
    [
        ("normal", "<f4", (3,)),
        ("vertices", "<f4", (3, 3)),
        ("attribute", "<u2"),
    ]
)

logger = logging.getLogger("geometry.stl")


@dataclass(frozen=True, eq=False)
class TriangleSoup:
    """
    Triangles in file order, before any vertex welding.

    Attributes:
        triangles: (n, 3, 3) float64 array, one row of three vertices per triangle
        normals: optional (n, 3) float64 array of stored facet normals
    """

    triangles: np.ndarray
    normals: Optional[np.ndarray] = None

    def __post_init__(self):
        tris = np.asarray(self.triangles, dtype=np.float64).reshape(-1, 3, 3)
        if not np.all(np.isfinite(tris)):
            raise ValueError("Triangle soup contains non-finite coordinates")
        object.__setattr__(self, "triangles", tris)
        if self.normals is not None:
            object.__setattr__(
                self, "normals", np.asarray(self.normals, dtype=np.float64).reshape(-1, 3)
            )

    def __len__(self) -> int:
        return self.triangles.shape[0]

    @property
    def vertex_count(self) -> int:
        return 3 * len(self)

    @property
    def degenerate(self) -> np.ndarray:
        """Boolean mask of zero-area triangles."""
        if len(self) == 0:
            return np.zeros(0, dtype=bool)
        a, b, c = self.triangles[:, 0], self.triangles[:, 1], self.triangles[:, 2]
        cross = np.cross(b - a, c - a)
        return ~np.any(cross != 0.0, axis=1)


def load_stl(data: bytes) -> TriangleSoup:
    """
    Parse STL bytes, detecting binary vs ASCII.

    A file is binary when its declared triangle count matches its length
    (count * 50 + 84 == len). Otherwise a leading "solid" keyword selects the
    ASCII grammar; anything else is a binary file with a bad count.

    Args:
        data: Raw file contents

    Returns:
        TriangleSoup with all triangles in file order
    """
    data = bytes(data)
    if len(data) >= HEADER_SIZE + COUNT_SIZE:
        declared = int(np.frombuffer(data, dtype="<u4", count=1, offset=HEADER_SIZE)[0])
        if declared * RECORD_SIZE + HEADER_SIZE + COUNT_SIZE == len(data):
            return _parse_binary(data, declared)

    if data.lstrip()[:5].lower() == b"solid":
        return _parse_ascii(data)

    if len(data) < HEADER_SIZE + COUNT_SIZE:
        raise StlParseError(
            "File too short for a binary STL header", offset=len(data)
        )
    declared = int(np.frombuffer(data, dtype="<u4", count=1, offset=HEADER_SIZE)[0])
    available = (len(data) - HEADER_SIZE - COUNT_SIZE) // RECORD_SIZE
    if available < declared:
        raise StlParseError(
            f"Truncated binary STL: declared {declared} triangles, found {available}",
            offset=HEADER_SIZE + COUNT_SIZE + available * RECORD_SIZE,
            record=available + 1,
        )
    raise StlParseError(
        f"Triangle count mismatch: declared {declared}, file holds "
        f"{(len(data) - HEADER_SIZE - COUNT_SIZE) / RECORD_SIZE:g} records",
        offset=HEADER_SIZE,
    )


def _parse_binary(data: bytes, count: int) -> TriangleSoup:
    records = np.frombuffer(
        data, dtype=_BINARY_RECORD, count=count, offset=HEADER_SIZE + COUNT_SIZE
    )
    triangles = records["vertices"].astype(np.float64)
    finite = np.isfinite(triangles).reshape(count, 9).all(axis=1)
    if not finite.all():
        bad = int(np.argmin(finite))
        raise StlParseError(
            "Non-finite vertex coordinate",
            offset=HEADER_SIZE + COUNT_SIZE + bad * RECORD_SIZE,
            record=bad + 1,
        )
    logger.debug(f"Parsed binary STL with {count} triangles")
    return TriangleSoup(triangles, records["normal"].astype(np.float64))


def _parse_ascii(data: bytes) -> TriangleSoup:
    try:
        text = data.decode("ascii")
    except UnicodeDecodeError as e:
        raise StlParseError("ASCII STL contains non-ASCII bytes", offset=e.start) from e

    lines = [(n, line.split()) for n, line in enumerate(text.splitlines(), start=1)]
    lines = [(n, tokens) for n, tokens in lines if tokens]
    if not lines or lines[0][1][0].lower() != "solid":
        raise StlParseError("Expected 'solid'", line=lines[0][0] if lines else 1)

    triangles = []
    normals = []
    pos = 1

    def expect(keyword: Tuple[str, ...]) -> Tuple[int, list]:
        nonlocal pos
        if pos >= len(lines):
            raise StlParseError(f"Unexpected end of file, expected '{' '.join(keyword)}'",
                                line=lines[-1][0])
        n, tokens = lines[pos]
        if tuple(t.lower() for t in tokens[: len(keyword)]) != keyword:
            raise StlParseError(
                f"Expected '{' '.join(keyword)}', got '{' '.join(tokens)}'", line=n
            )
        pos += 1
        return n, tokens[len(keyword):]

    def floats(n: int, tokens: list) -> list:
        if len(tokens) != 3:
            raise StlParseError(f"Expected 3 numbers, got {len(tokens)}", line=n)
        try:
            values = [float(t) for t in tokens]
        except ValueError as e:
            raise StlParseError(f"Unparseable number in '{' '.join(tokens)}'", line=n) from e
        if not all(np.isfinite(values)):
            raise StlParseError("Non-finite coordinate", line=n)
        return values

    while True:
        if pos >= len(lines):
            raise StlParseError("Missing 'endsolid'", line=lines[-1][0])
        n, tokens = lines[pos]
        keyword = tokens[0].lower()
        if keyword == "endsolid":
            break
        if keyword != "facet":
            raise StlParseError(f"Expected 'facet' or 'endsolid', got '{tokens[0]}'", line=n)

        n, rest = expect(("facet", "normal"))
        normals.append(floats(n, rest))
        expect(("outer", "loop"))
        triangle = []
        for _ in range(3):
            n, rest = expect(("vertex",))
            triangle.append(floats(n, rest))
        triangles.append(triangle)
        expect(("endloop",))
        expect(("endfacet",))

    logger.debug(f"Parsed ASCII STL with {len(triangles)} triangles")
    return TriangleSoup(
        np.array(triangles, dtype=np.float64).reshape(-1, 3, 3),
        np.array(normals, dtype=np.float64).reshape(-1, 3),
    )


def facet_normals(triangles: np.ndarray) -> np.ndarray:
    """Unit normals by the right-hand rule; zero rows for degenerate triangles."""
    triangles = np.asarray(triangles, dtype=np.float64).reshape(-1, 3, 3)
    cross = np.cross(triangles[:, 1] - triangles[:, 0], triangles[:, 2] - triangles[:, 0])
    norms = np.linalg.norm(cross, axis=1, keepdims=True)
    return np.divide(cross, norms, out=np.zeros_like(cross), where=norms > 0.0)


def dump_ascii_stl(triangles: Union[np.ndarray, Iterable], name: str = "mesh") -> str:
    """
    Write triangles as an ASCII STL document.

    Coordinates use repr() so loading the text back is bit-exact.
    """
    tris = np.asarray(triangles, dtype=np.float64).reshape(-1, 3, 3)
    normals = facet_normals(tris)
    out = [f"solid {name}"]
    for tri, normal in zip(tris, normals):
        out.append("  facet normal " + " ".join(repr(float(c)) for c in normal))
        out.append("    outer loop")
        for vertex in tri:
            out.append("      vertex " + " ".join(repr(float(c)) for c in vertex))
        out.append("    endloop")
        out.append("  endfacet")
    out.append(f"endsolid {name}")
    return "\n".join(out) + "\n"


def dump_binary_stl(triangles: Union[np.ndarray, Iterable], header: bytes = b"") -> bytes:
    """Write triangles as binary STL (coordinates narrowed to float32)."""
    tris = np.asarray(triangles, dtype=np.float64).reshape(-1, 3, 3)
    records = np.zeros(tris.shape[0], dtype=_BINARY_RECORD)
    records["normal"] = facet_normals(tris)
    records["vertices"] = tris
    head = header[:HEADER_SIZE].ljust(HEADER_SIZE, b"\0")
    return head + np.array([tris.shape[0]], dtype="<u4").tobytes() + records.tobytes()
