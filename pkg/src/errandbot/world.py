"""Static environment: occupancy grid, landmark dictionary, and geometry helpers.

The grid and the dictionary are immutable after loading, so they can be read
from any thread without locking.
"""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass

import numpy as np

FREE_CHAR = "."
OCCUPIED_CHAR = "#"


class MapFormatError(Exception):
    def __init__(self, line: int, reason: str):
        super().__init__(f"map line {line}: {reason}")
        self.line = line
        self.reason = reason


class LandmarkFormatError(Exception):
    pass


class DuplicateLandmark(Exception):
    def __init__(self, name: str):
        super().__init__(f"duplicate landmark name or alias: {name!r}")
        self.name = name


class LandmarkOffMap(Exception):
    def __init__(self, name: str):
        super().__init__(f"landmark {name!r} lies outside the map")
        self.name = name


class LandmarkOnObstacle(Exception):
    def __init__(self, name: str):
        super().__init__(f"landmark {name!r} lies on an occupied cell")
        self.name = name


class OutOfBounds(Exception):
    pass


class UnknownLocation(Exception):
    """A queried place name that the dictionary does not know.

    ``field`` is filled in by callers that know which task slot the query
    came from (pickup vs delivery); the dictionary itself only sees strings.
    """

    def __init__(self, query: str, field: str | None = None):
        where = f" ({field})" if field else ""
        super().__init__(f"unknown location{where}: {query!r}")
        self.query = query
        self.field = field


class AmbiguousLocation(Exception):
    def __init__(self, query: str, candidates: list[str]):
        super().__init__(f"ambiguous location {query!r}: matches {candidates}")
        self.query = query
        self.candidates = candidates


def wrap_angle(a: float) -> float:
    """Normalize an angle into (-pi, pi]."""
    return math.pi - (math.pi - a) % (2.0 * math.pi)


@dataclass(frozen=True)
class Pose2D:
    x: float
    y: float
    heading: float

    def __post_init__(self):
        object.__setattr__(self, "heading", wrap_angle(self.heading))

    @property
    def position(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass
class GridMap:
    """Occupancy grid. ``cells[row, col]`` is True when occupied; row 0 sits at
    the origin corner and row index increases with world y."""

    resolution: float
    origin: tuple[float, float]
    width: int
    height: int
    cells: np.ndarray

    def __post_init__(self):
        if self.resolution <= 0:
            raise ValueError("resolution must be > 0")
        if self.width < 1 or self.height < 1:
            raise ValueError("grid must be at least 1x1")
        if self.cells.shape != (self.height, self.width):
            raise ValueError("cell array shape does not match size")

    def __eq__(self, other) -> bool:
        if not isinstance(other, GridMap):
            return NotImplemented
        return (
            self.resolution == other.resolution
            and self.origin == other.origin
            and self.width == other.width
            and self.height == other.height
            and np.array_equal(self.cells, other.cells)
        )

    def in_bounds_cell(self, cx: int, cy: int) -> bool:
        return 0 <= cx < self.width and 0 <= cy < self.height

    def is_occupied(self, cx: int, cy: int) -> bool:
        return bool(self.cells[cy, cx])

    def world_to_cell(self, x: float, y: float) -> tuple[int, int]:
        """Cell containing a world point: floor((p - origin) / resolution)."""
        cx = math.floor((x - self.origin[0]) / self.resolution)
        cy = math.floor((y - self.origin[1]) / self.resolution)
        if not self.in_bounds_cell(cx, cy):
            raise OutOfBounds(f"point ({x}, {y}) is outside the map")
        return (cx, cy)

    def cell_to_world(self, cx: int, cy: int) -> tuple[float, float]:
        """Center of a cell in world coordinates."""
        return (
            self.origin[0] + (cx + 0.5) * self.resolution,
            self.origin[1] + (cy + 0.5) * self.resolution,
        )

    def occupied_at_point(self, x: float, y: float) -> bool:
        return self.is_occupied(*self.world_to_cell(x, y))

    def free_cells(self) -> list[tuple[int, int]]:
        """All free cells in row-major order (stable for seeded sampling)."""
        rows, cols = np.nonzero(~self.cells)
        return [(int(c), int(r)) for r, c in zip(rows, cols)]

    def inflate(self, radius: float) -> "GridMap":
        """Grow obstacles: every free cell whose center lies within ``radius``
        of an occupied cell's center becomes occupied. Returns a new map."""
        if radius < 0:
            raise ValueError("radius must be >= 0")
        r_cells = radius / self.resolution
        k = math.floor(r_cells + 1e-9)
        offsets = [
            (dx, dy)
            for dx in range(-k, k + 1)
            for dy in range(-k, k + 1)
            if math.hypot(dx, dy) <= r_cells + 1e-9
        ]
        out = self.cells.copy()
        for row, col in zip(*np.nonzero(self.cells)):
            for dx, dy in offsets:
                cx, cy = int(col) + dx, int(row) + dy
                if 0 <= cx < self.width and 0 <= cy < self.height:
                    out[cy, cx] = True
        return GridMap(self.resolution, self.origin, self.width, self.height, out)


def _format_float(v: float) -> str:
    return repr(float(v))


def load_map(text: str) -> GridMap:
    """Parse the ``gridmap v1`` text format.

    Header lines may be interleaved with blank lines and ``//`` comments; the
    grid block itself must be contiguous. File rows run top to bottom, so file
    row 0 becomes internal row (height - 1).
    """
    lines = text.splitlines()
    pos = 0

    def next_significant() -> tuple[int, str]:
        nonlocal pos
        while pos < len(lines):
            lineno = pos + 1
            stripped = lines[pos].strip()
            pos += 1
            if stripped == "" or stripped.startswith("//"):
                continue
            return lineno, stripped
        raise MapFormatError(len(lines) + 1, "unexpected end of file")

    lineno, header = next_significant()
    if header != "gridmap v1":
        raise MapFormatError(lineno, f"unsupported header {header!r}")

    lineno, res_line = next_significant()
    m = re.fullmatch(r"resolution\s+(\S+)", res_line)
    if not m:
        raise MapFormatError(lineno, "expected 'resolution <decimal>'")
    try:
        resolution = float(m.group(1))
    except ValueError:
        raise MapFormatError(lineno, "resolution is not a number") from None
    if resolution <= 0:
        raise MapFormatError(lineno, "resolution must be > 0")

    lineno, origin_line = next_significant()
    m = re.fullmatch(r"origin\s+(\S+)\s+(\S+)", origin_line)
    if not m:
        raise MapFormatError(lineno, "expected 'origin <x> <y>'")
    try:
        origin = (float(m.group(1)), float(m.group(2)))
    except ValueError:
        raise MapFormatError(lineno, "origin coordinates are not numbers") from None

    lineno, size_line = next_significant()
    m = re.fullmatch(r"size\s+(\d+)\s+(\d+)", size_line)
    if not m:
        raise MapFormatError(lineno, "expected 'size <width> <height>'")
    width, height = int(m.group(1)), int(m.group(2))
    if width < 1 or height < 1:
        raise MapFormatError(lineno, "size must be at least 1x1")

    # First grid row may still be preceded by blanks/comments; the rest must
    # follow consecutively.
    first_lineno, first_row = next_significant()
    rows = [(first_lineno, first_row)]
    for i in range(1, height):
        if pos >= len(lines):
            raise MapFormatError(len(lines) + 1, f"expected {height} grid rows")
        rows.append((pos + 1, lines[pos].rstrip("\n")))
        pos += 1

    cells = np.zeros((height, width), dtype=bool)
    for file_row, (lineno, row) in enumerate(rows):
        if len(row) != width:
            raise MapFormatError(lineno, f"row has {len(row)} cells, expected {width}")
        internal_row = height - 1 - file_row
        for col, ch in enumerate(row):
            if ch == OCCUPIED_CHAR:
                cells[internal_row, col] = True
            elif ch != FREE_CHAR:
                raise MapFormatError(lineno, f"illegal cell character {ch!r}")

    while pos < len(lines):
        if lines[pos].strip():
            raise MapFormatError(pos + 1, "unexpected content after grid block")
        pos += 1

    return GridMap(resolution, origin, width, height, cells)


def serialize_map(grid: GridMap) -> str:
    """Canonical writer for the gridmap v1 format (no comments, no blanks)."""
    out = [
        "gridmap v1",
        f"resolution {_format_float(grid.resolution)}",
        f"origin {_format_float(grid.origin[0])} {_format_float(grid.origin[1])}",
        f"size {grid.width} {grid.height}",
    ]
    for internal_row in range(grid.height - 1, -1, -1):
        out.append(
            "".join(
                OCCUPIED_CHAR if grid.cells[internal_row, col] else FREE_CHAR
                for col in range(grid.width)
            )
        )
    return "\n".join(out) + "\n"


@dataclass(frozen=True)
class LandmarkRef:
    """A resolved pointer to dictionary data; never constructed from scratch."""

    name: str
    position: tuple[float, float]


@dataclass(frozen=True)
class Landmark:
    name: str
    aliases: tuple[str, ...]
    position: tuple[float, float]

    def ref(self) -> LandmarkRef:
        return LandmarkRef(self.name, self.position)


def _canon(s: str) -> str:
    return re.sub(r"\s+", " ", s.strip().lower())


class LandmarkDictionary:
    """Named key locations with aliases; the lookup table that replaces any
    semantic reasoning about place names."""

    def __init__(self, landmarks: list[Landmark]):
        self._landmarks: list[Landmark] = []
        self._by_name: dict[str, Landmark] = {}
        self._by_alias: dict[str, Landmark] = {}
        for lm in landmarks:
            self._add(lm)

    def _add(self, lm: Landmark) -> None:
        if lm.name in self._by_name or lm.name in self._by_alias:
            raise DuplicateLandmark(lm.name)
        for alias in lm.aliases:
            if alias in self._by_name or alias in self._by_alias:
                raise DuplicateLandmark(alias)
        if len(set(lm.aliases)) != len(lm.aliases):
            raise DuplicateLandmark(lm.name)
        self._landmarks.append(lm)
        self._by_name[lm.name] = lm
        for alias in lm.aliases:
            self._by_alias[alias] = lm

    def __len__(self) -> int:
        return len(self._landmarks)

    def __iter__(self):
        return iter(self._landmarks)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LandmarkDictionary):
            return NotImplemented
        return self._landmarks == other._landmarks

    def names(self) -> list[str]:
        return [lm.name for lm in self._landmarks]

    def lookup(self, query: str) -> LandmarkRef:
        """Resolve a place name.

        Precedence: exact canonical name, then exact alias, then the unique
        landmark whose name or alias token set contains (or is contained in)
        the query token set. An ambiguous third-tier match is an error, and
        nothing ever resolves to a landmark that is not in the dictionary.
        """
        if not query:
            raise UnknownLocation(query)
        if query in self._by_name:
            return self._by_name[query].ref()
        if query in self._by_alias:
            return self._by_alias[query].ref()

        qtokens = set(query.split())
        hits: list[Landmark] = []
        for lm in self._landmarks:
            for cand in (lm.name, *lm.aliases):
                ctokens = set(cand.split())
                if qtokens <= ctokens or ctokens <= qtokens:
                    hits.append(lm)
                    break
        if len(hits) == 1:
            return hits[0].ref()
        if len(hits) > 1:
            raise AmbiguousLocation(query, [lm.name for lm in hits])
        raise UnknownLocation(query)


def load_landmarks(text: str, grid: GridMap | None = None) -> LandmarkDictionary:
    """Parse the landmark CSV (``name,alias1|alias2,x,y``).

    Position validation (inside map bounds, on a free cell) runs only when a
    grid is supplied; name-only consumers such as corpus evaluation load the
    dictionary without one.
    """
    landmarks: list[Landmark] = []
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        stripped = raw_line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            row = next(csv.reader(io.StringIO(raw_line)))
        except (csv.Error, StopIteration) as exc:
            raise LandmarkFormatError(f"line {lineno}: {exc}") from None
        if len(row) != 4:
            raise LandmarkFormatError(
                f"line {lineno}: expected 4 fields (name,aliases,x,y), got {len(row)}"
            )
        name = _canon(row[0])
        if not name:
            raise LandmarkFormatError(f"line {lineno}: empty landmark name")
        aliases = tuple(_canon(a) for a in row[1].split("|") if _canon(a))
        try:
            position = (float(row[2]), float(row[3]))
        except ValueError:
            raise LandmarkFormatError(f"line {lineno}: bad coordinates") from None
        if grid is not None:
            try:
                cell = grid.world_to_cell(*position)
            except OutOfBounds:
                raise LandmarkOffMap(name) from None
            if grid.is_occupied(*cell):
                raise LandmarkOnObstacle(name)
        landmarks.append(Landmark(name, aliases, position))
    return LandmarkDictionary(landmarks)


def serialize_landmarks(dictionary: LandmarkDictionary) -> str:
    """Canonical CSV writer; preserves load order."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for lm in dictionary:
        writer.writerow(
            [lm.name, "|".join(lm.aliases), _format_float(lm.position[0]), _format_float(lm.position[1])]
        )
    return buf.getvalue()
