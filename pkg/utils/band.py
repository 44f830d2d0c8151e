"""
Polygonal Moebius Bands
=======================

Flat charts, folded immersions and the objects read off them:

- FlatBand: a chart of M_lambda as a strip 0 <= x <= 1 cut by bends; bend k
  joins (0, l_k) to (1, r_k); the top bend is glued to the bottom one with
  left and right ends exchanged
- ImmersedBand: one affine isometry per facet (a 3x3 matrix [R | o] mapping
  flat points to space)
- RidgeCurve: bend vectors v_k; edges 2*mu_i*E_i
- TPattern / Normalization: a perpendicular coplanar pair of bend images and
  the standard position it induces
- straightened ridge arcs, pitch profiles, zero-slope bends and the property
  checks of a special immersed band

Geometry runs in numpy float64; flat heights are kept as mpmath values so a
band file round-trips at 32 digits.
"""

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import mpmath
import numpy as np
from scipy.optimize import brentq, root
from scipy.spatial.transform import Rotation

from utils.errors import (
    ClosureFailure,
    DegenerateBand,
    DegeneratePattern,
    NotSim,
    ParseError,
    ProjectionDegenerate,
)
from utils.design_system import save_svg, styled_figure
from utils.settings import Tolerances
from utils.slope_domain import (
    SlopePair,
    aspect_lower_bound,
    eval_constraints,
    omega_contains,
    omegahat_contains,
)

logger = logging.getLogger(__name__)

LEFT = "left"
RIGHT = "right"
FILE_DIGITS = 32
FOLDED = "folded"
EXPLICIT = "explicit"
HEIGHT_TOL = 1e-12
GRID = 33
RANK_DIGITS = 9

Real = Union[int, float, str, "mpmath.mpf"]


def _mpf(value: Real):
    if isinstance(value, str):
        with mpmath.workprec(max(mpmath.mp.prec, 128)):
            return mpmath.mpf(value)
    return mpmath.mpf(value)


def _dec(value) -> str:
    return mpmath.nstr(mpmath.mpf(value), FILE_DIGITS, min_fixed=-8, max_fixed=8)


def _same(a, b) -> bool:
    return abs(a - b) <= HEIGHT_TOL * max(1, abs(a), abs(b))


# =============================================================================
# FLAT BANDS
# =============================================================================

@dataclass(frozen=True, eq=False)
class FlatBand:
    """
    Chart of M_lambda cut along the bend e_0

    Consecutive bends share exactly one endpoint; the facet between them is
    the triangle spanned by the two bends. lambda is the mean length of the
    two vertical sides.
    """
    lam: object
    bends: Tuple[Tuple[object, object], ...]

    def __post_init__(self):
        bends = [(_mpf(l), _mpf(r)) for l, r in self.bends]
        if len(bends) < 2:
            raise DegenerateBand("a band needs at least two bends")
        clean = [bends[0]]
        for k, (l, r) in enumerate(bends[1:], start=1):
            pl, pr = clean[-1]
            if _same(l, pl) and r > pr:
                clean.append((pl, r))
            elif _same(r, pr) and l > pl:
                clean.append((l, pr))
            else:
                raise DegenerateBand(
                    f"bends {k - 1} and {k} must share one endpoint and advance on the other side")
        object.__setattr__(self, "bends", tuple(clean))
        lam = _mpf(self.lam)
        sides = ((clean[-1][0] - clean[0][0]) + (clean[-1][1] - clean[0][1])) / 2
        if lam <= 0 or not _same(lam, sides):
            raise DegenerateBand(f"lambda {mpmath.nstr(lam, 15)} does not match the chart ({mpmath.nstr(sides, 15)})")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "_heights", np.array([[float(l), float(r)] for l, r in clean]))
        bottom = clean[0][1] - clean[0][0]
        top = clean[-1][1] - clean[-1][0]
        if not _same(abs(bottom), abs(top)):
            raise DegenerateBand("top and bottom bends have different lengths")

    @property
    def n_facets(self) -> int:
        return len(self.bends) - 1

    @property
    def heights(self) -> np.ndarray:
        return self._heights

    def apex_side(self, i: int) -> str:
        return LEFT if self.bends[i][0] == self.bends[i + 1][0] else RIGHT

    @property
    def apexes(self) -> List[Dict]:
        """Apex of each facet: side and height"""
        out = []
        for i in range(self.n_facets):
            side = self.apex_side(i)
            height = self.bends[i][0] if side == LEFT else self.bends[i][1]
            out.append({"side": side, "height": height})
        return out

    @property
    def signs(self) -> Tuple[int, ...]:
        """mu_i = -1 iff the ridge of facet i lies on the left edge"""
        return tuple(1 if self.apex_side(i) == LEFT else -1 for i in range(self.n_facets))

    def bend_slope(self, k: int) -> float:
        l, r = self.bends[k]
        return float(r - l)

    def bend_at(self, i: int, s: float) -> Tuple[float, float]:
        """Heights (l, r) of the bend of facet i at ridge parameter s in [0, 1]"""
        h = self.heights
        (l0, r0), (l1, r1) = h[i], h[i + 1]
        return l0 + s * (l1 - l0), r0 + s * (r1 - r0)

    def triangle(self, i: int) -> np.ndarray:
        """Flat vertices [left_i, right_i, far] of facet i"""
        h = self.heights
        far = (1.0, h[i + 1][1]) if self.apex_side(i) == LEFT else (0.0, h[i + 1][0])
        return np.array([(0.0, h[i][0]), (1.0, h[i][1]), far])


def flat_band(lam: Real, bends: Sequence[Tuple[Real, Real]]) -> FlatBand:
    return FlatBand(lam, tuple((l, r) for l, r in bends))


# =============================================================================
# IMMERSED BANDS
# =============================================================================

def _apply(frame: np.ndarray, p) -> np.ndarray:
    return frame[:, :2] @ np.asarray(p, dtype=float) + frame[:, 2]


def _after_flat(frame: np.ndarray, A: np.ndarray, a: np.ndarray) -> np.ndarray:
    """frame composed with the flat map p -> A p + a"""
    out = np.empty((3, 3))
    out[:, :2] = frame[:, :2] @ A
    out[:, 2] = frame[:, :2] @ a + frame[:, 2]
    return out


def _before_space(Q: np.ndarray, q: np.ndarray, frame: np.ndarray) -> np.ndarray:
    """The spatial map P -> Q P + q composed with frame"""
    out = np.empty((3, 3))
    out[:, :2] = Q @ frame[:, :2]
    out[:, 2] = Q @ frame[:, 2] + q
    return out


@dataclass(frozen=True, eq=False)
class ImmersedBand:
    """Flat chart plus one affine isometry per facet"""
    flat: FlatBand
    frames: np.ndarray
    creases: Optional[Tuple[object, ...]] = None
    closure_residual: float = 0.0

    @property
    def n_facets(self) -> int:
        return self.flat.n_facets

    @property
    def signs(self) -> Tuple[int, ...]:
        return self.flat.signs

    @property
    def facets(self) -> np.ndarray:
        """Facet vertex images, shape (n, 3, 3)"""
        return np.array([[_apply(self.frames[i], p) for p in self.flat.triangle(i)]
                         for i in range(self.n_facets)])

    def point(self, i: int, p) -> np.ndarray:
        return _apply(self.frames[i], p)

    def bend_image(self, i: int, s: float) -> Tuple[np.ndarray, np.ndarray]:
        """Images of the left and right ends of the bend of facet i at parameter s"""
        l, r = self.flat.bend_at(i, s)
        return self.point(i, (0.0, l)), self.point(i, (1.0, r))

    def edge_image(self, k: int) -> Tuple[np.ndarray, np.ndarray]:
        """Image of the triangulation bend e_k, k = 0..n"""
        if k < self.n_facets:
            return self.bend_image(k, 0.0)
        return self.bend_image(self.n_facets - 1, 1.0)

    def bend_vector(self, k: int) -> np.ndarray:
        left, right = self.edge_image(k)
        return right - left

    def isometry_residual(self) -> float:
        """Largest side-length mismatch between a facet and its flat triangle"""
        worst = 0.0
        for i, image in enumerate(self.facets):
            flat = self.flat.triangle(i)
            for a, b in ((0, 1), (1, 2), (0, 2)):
                worst = max(worst, abs(np.linalg.norm(image[a] - image[b]) - np.linalg.norm(flat[a] - flat[b])))
        return worst

    def lipschitz_residual(self) -> float:
        """Largest deviation of R^T R from the identity over all frames"""
        return max(float(np.abs(f[:, :2].T @ f[:, :2] - np.eye(2)).max()) for f in self.frames)

    def with_frames(self, flat: FlatBand, frames: Sequence[np.ndarray]) -> "ImmersedBand":
        return ImmersedBand(flat, np.array(frames), None, self.closure_residual)


def _closure(flat: FlatBand, frames: Sequence[np.ndarray]) -> float:
    h = flat.heights
    first, last = frames[0], frames[-1]
    top_left = _apply(last, (0.0, h[-1][0]))
    top_right = _apply(last, (1.0, h[-1][1]))
    bottom_left = _apply(first, (0.0, h[0][0]))
    bottom_right = _apply(first, (1.0, h[0][1]))
    return float(max(np.linalg.norm(top_left - bottom_right), np.linalg.norm(top_right - bottom_left)))


def build_immersed(flat: FlatBand, creases: Sequence[Real], tol_close: float = Tolerances.CLOSE) -> ImmersedBand:
    """
    Fold a flat band

    Facet 0 is placed in the XY-plane by (x, y) -> (x, y, 0). Each following
    facet is the previous frame rotated about the shared bend line, oriented
    from its left to its right end, by the crease angle; pi folds flat.

    Args:
        flat: Flat chart
        creases: One angle in (0, 2pi) per interior bend
        tol_close: Closure tolerance

    Returns:
        ImmersedBand

    Raises:
        ClosureFailure: if the top bend misses the flipped bottom bend
    """
    n = flat.n_facets
    if len(creases) != n - 1:
        raise ValueError(f"expected {n - 1} crease angles, got {len(creases)}")
    angles = [float(_mpf(c)) for c in creases]
    for angle in angles:
        if not 0 < angle < 2 * math.pi:
            raise ValueError(f"crease angle {angle} outside (0, 2pi)")

    frame = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]])
    frames = [frame]
    h = flat.heights
    for i, angle in enumerate(angles):
        left = _apply(frame, (0.0, h[i + 1][0]))
        right = _apply(frame, (1.0, h[i + 1][1]))
        axis = (right - left) / np.linalg.norm(right - left)
        Q = Rotation.from_rotvec(axis * angle).as_matrix()
        frame = _before_space(Q, left - Q @ left, frame)
        frames.append(frame)

    residual = _closure(flat, frames)
    logger.debug("folded %d facets, closure residual %.3e", n, residual)
    if residual > tol_close:
        raise ClosureFailure(residual)
    return ImmersedBand(flat, np.array(frames), tuple(_mpf(c) for c in creases), residual)


def explicit_band(flat: FlatBand, facets: Sequence[Sequence[Sequence[float]]],
                  tol_iso: float = Tolerances.ISO, tol_close: float = Tolerances.CLOSE) -> ImmersedBand:
    """
    Band from given facet vertex images

    The affine map of each facet is solved from its three vertices; facets
    must be isometric to their flat triangles, consecutive facets must share
    their bend and the band must close up.
    """
    images = np.asarray(facets, dtype=float)
    if images.shape != (flat.n_facets, 3, 3):
        raise DegenerateBand(f"expected {flat.n_facets} facets of three 3-space points, got shape {images.shape}")
    frames = []
    for i, image in enumerate(images):
        tri = flat.triangle(i)
        A = np.column_stack([tri[1] - tri[0], tri[2] - tri[0]])
        V = np.column_stack([image[1] - image[0], image[2] - image[0]])
        R = V @ np.linalg.inv(A)
        frame = np.empty((3, 3))
        frame[:, :2] = R
        frame[:, 2] = image[0] - R @ tri[0]
        frames.append(frame)
    band = ImmersedBand(flat, np.array(frames), None, _closure(flat, frames))

    iso = band.isometry_residual()
    if iso > tol_iso:
        raise DegenerateBand(f"facets are not isometric to the flat triangles: residual {iso:.3e}")
    h = flat.heights
    for i in range(flat.n_facets - 1):
        for p in ((0.0, h[i + 1][0]), (1.0, h[i + 1][1])):
            gap = np.linalg.norm(_apply(frames[i], p) - _apply(frames[i + 1], p))
            if gap > tol_iso:
                raise DegenerateBand(f"facets {i} and {i + 1} do not share their bend: gap {gap:.3e}")
    if band.closure_residual > tol_close:
        raise ClosureFailure(band.closure_residual)
    return band


def creases_of(band: ImmersedBand) -> List[float]:
    """Crease angles in [0, 2pi) recovered from the facet frames"""
    out = []
    h = band.flat.heights
    for i in range(band.n_facets - 1):
        f0, f1 = band.frames[i], band.frames[i + 1]
        n0 = np.cross(f0[:, 0], f0[:, 1])
        n1 = np.cross(f1[:, 0], f1[:, 1])
        left = _apply(f0, (0.0, h[i + 1][0]))
        right = _apply(f0, (1.0, h[i + 1][1]))
        axis = (right - left) / np.linalg.norm(right - left)
        angle = math.atan2(float(np.dot(np.cross(n0, n1), axis)), float(np.dot(n0, n1)))
        out.append(angle % (2 * math.pi))
    return out


def split_facet(band: ImmersedBand, facet_index: int, s: float) -> Tuple[ImmersedBand, int]:
    """
    Make the bend of a facet at parameter s a triangulation edge

    Returns:
        (refined band, index of the bend as an edge)
    """
    if s <= Tolerances.PARAM:
        return band, facet_index
    if s >= 1 - Tolerances.PARAM:
        return band, facet_index + 1
    l, r = band.flat.bend_at(facet_index, s)
    old_l, old_r = band.flat.bends[facet_index]
    if band.flat.apex_side(facet_index) == LEFT:
        new = (old_l, _mpf(r))
    else:
        new = (_mpf(l), old_r)
    bends = list(band.flat.bends)
    bends.insert(facet_index + 1, new)
    frames = list(band.frames)
    frames.insert(facet_index + 1, band.frames[facet_index].copy())
    creases = None
    if band.creases is not None:
        creases = tuple(band.creases[:facet_index]) + (mpmath.mpf(0),) + tuple(band.creases[facet_index:])
    refined = ImmersedBand(FlatBand(band.flat.lam, tuple(bends)), np.array(frames), creases, band.closure_residual)
    return refined, facet_index + 1


# =============================================================================
# RIDGE CURVE
# =============================================================================

@dataclass(frozen=True, eq=False)
class RidgeCurve:
    """Vertices v_0..v_n (bend vectors) and edges 2*mu_i*E_i"""
    vertices: np.ndarray
    edges: np.ndarray
    signs: Tuple[int, ...]
    switch_residual: float = 0.0

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.edges, axis=1).sum())

    @property
    def min_norm(self) -> float:
        return float(np.linalg.norm(self.vertices, axis=1).min())

    def line_distances(self) -> np.ndarray:
        """Distance from the origin to the line extending each edge"""
        a, b = self.vertices[:-1], self.vertices[1:]
        return np.linalg.norm(np.cross(a, b), axis=1) / np.linalg.norm(b - a, axis=1)

    def endpoint_residual(self) -> float:
        """Distance of the endpoints from (B,0,0) and (-B,0,0)"""
        B = np.linalg.norm(self.vertices[0])
        start = np.array([B, 0.0, 0.0])
        return float(max(np.linalg.norm(self.vertices[0] - start), np.linalg.norm(self.vertices[-1] + start)))


def _standard_rotation(vertices: np.ndarray) -> np.ndarray:
    """Rotation taking v_0 to +X and the most perpendicular vertex into the XY-plane, +Y side"""
    x = vertices[0] / np.linalg.norm(vertices[0])
    norms = np.linalg.norm(vertices, axis=1)
    cosines = np.abs(vertices @ x) / norms
    k = int(np.argmin(cosines))
    y = vertices[k] - np.dot(vertices[k], x) * x
    if np.linalg.norm(y) < 1e-14:
        helper = np.eye(3)[int(np.argmin(np.abs(x)))]
        y = helper - np.dot(helper, x) * x
    y = y / np.linalg.norm(y)
    return np.vstack([x, y, np.cross(x, y)])


def ridge_curve(band: ImmersedBand) -> RidgeCurve:
    """
    Ridge curve of a band

    Raises:
        DegenerateBand: if a core-curve edge has zero length
    """
    n = band.n_facets
    vectors = np.array([band.bend_vector(k) for k in range(n + 1)])
    mids = np.array([sum(band.edge_image(k)) / 2 for k in range(n + 1)])
    core = mids[1:] - mids[:-1]
    short = np.linalg.norm(core, axis=1) < 1e-14
    if short.any():
        raise DegenerateBand(f"core edge {int(np.argmax(short))} has zero length")
    signs = np.array(band.signs, dtype=float)
    edges = 2 * signs[:, None] * core
    residual = float(np.abs((vectors[1:] - vectors[:-1]) - edges).max())
    Q = _standard_rotation(vectors)
    return RidgeCurve(vectors @ Q.T, edges @ Q.T, band.signs, residual)


# =============================================================================
# BAND FILES
# =============================================================================

def _require(data: Dict, key: str):
    if key not in data:
        raise ParseError(f"band file is missing {key!r}")
    return data[key]


def _require_list(data: Dict, key: str) -> List:
    value = _require(data, key)
    if not isinstance(value, list):
        raise ParseError(f"{key!r} must be a list, not {type(value).__name__}")
    return value


def _pair(entry, key: str) -> Tuple:
    if not isinstance(entry, list) or len(entry) != 2:
        raise ParseError(f"each entry of {key!r} must be a [left, right] pair, got {entry!r}")
    return _mpf(entry[0]), _mpf(entry[1])


def _check_apexes(given: List, flat: "FlatBand") -> None:
    derived = flat.apexes
    if len(given) != len(derived):
        raise ParseError("apexes do not match the bends")
    for a, d in zip(given, derived):
        if not isinstance(a, dict) or "side" not in a or "height" not in a:
            raise ParseError(f"apex entries need 'side' and 'height', got {a!r}")
        if a["side"] != d["side"] or not _same(_mpf(a["height"]), d["height"]):
            raise ParseError("apexes do not match the bends")


def parse_band(data: Dict, tol_close: float = Tolerances.CLOSE) -> ImmersedBand:
    """
    Band from its JSON form

    Both formats carry ``lambda`` and ``bends`` ([left, right] height pairs);
    ``apexes`` are optional and checked against the bends. The folded format
    adds ``creases``; the explicit format adds ``facets``. Any structural
    problem raises ParseError.
    """
    if not isinstance(data, dict):
        raise ParseError("band file must hold a JSON object")
    fmt = _require(data, "format")
    if fmt not in (FOLDED, EXPLICIT):
        raise ParseError(f"unknown band format {fmt!r}")
    try:
        bends = [_pair(entry, "bends") for entry in _require_list(data, "bends")]
        flat = FlatBand(_mpf(_require(data, "lambda")), tuple(bends))
        if "apexes" in data:
            _check_apexes(_require_list(data, "apexes"), flat)
        if fmt == FOLDED:
            creases = [_mpf(c) for c in _require_list(data, "creases")]
        else:
            facets = _require_list(data, "facets")
            points = [[[float(_mpf(c)) for c in p] for p in facet] for facet in facets]
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad value in band file: {exc}") from exc

    try:
        if fmt == FOLDED:
            return build_immersed(flat, creases, tol_close)
        return explicit_band(flat, points, tol_close=tol_close)
    except (TypeError, ValueError) as exc:
        raise ParseError(str(exc)) from exc


def load_band_file(path: Union[str, Path], tol_close: float = Tolerances.CLOSE) -> ImmersedBand:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: not valid JSON ({exc.msg} at line {exc.lineno})") from exc
    logger.info("loaded band file %s (%s)", path, data.get("format") if isinstance(data, dict) else "?")
    return parse_band(data, tol_close)


def band_to_dict(band: ImmersedBand, fmt: str = FOLDED) -> Dict:
    data = {
        "format": fmt,
        "lambda": _dec(band.flat.lam),
        "bends": [[_dec(l), _dec(r)] for l, r in band.flat.bends],
        "apexes": [{"side": a["side"], "height": _dec(a["height"])} for a in band.flat.apexes],
    }
    if fmt == FOLDED:
        creases = band.creases if band.creases is not None else creases_of(band)
        data["creases"] = [_dec(c) for c in creases]
    elif fmt == EXPLICIT:
        data["facets"] = [[[_dec(c) for c in p] for p in facet] for facet in band.facets]
    else:
        raise ValueError(f"unknown band format {fmt!r}")
    return data


def dump_band_file(band: ImmersedBand, path: Union[str, Path], fmt: str = FOLDED) -> Path:
    path = Path(path)
    path.write_text(json.dumps(band_to_dict(band, fmt), indent=2) + "\n")
    logger.info("wrote %s band file %s", fmt, path)
    return path


# =============================================================================
# T-PATTERNS
# =============================================================================

@dataclass(frozen=True, eq=False)
class TPattern:
    """
    Two bend images that are perpendicular and coplanar with disjoint
    interiors; the line extending beta_t misses beta_b (touching at an
    endpoint of beta_b counts as a miss)
    """
    facet_b: int
    s_b: float
    facet_t: int
    s_t: float
    image_b: np.ndarray
    image_t: np.ndarray
    perp: float
    plane_gap: float
    ambiguous: bool = False

    @property
    def coords(self) -> Tuple[float, float]:
        return self.facet_b + self.s_b, self.facet_t + self.s_t

    def as_dict(self) -> Dict:
        return {
            "beta_b": {"facet": self.facet_b, "s": self.s_b},
            "beta_t": {"facet": self.facet_t, "s": self.s_t},
            "perpendicularity": self.perp,
            "plane_gap": self.plane_gap,
            "ambiguous": self.ambiguous,
        }


def _classify(band: ImmersedBand, a: Tuple[int, float], b: Tuple[int, float],
              tol_perp: float, tol_plane: float) -> Optional[TPattern]:
    seg_a = np.array(band.bend_image(*a))
    seg_b = np.array(band.bend_image(*b))
    da, db = seg_a[1] - seg_a[0], seg_b[1] - seg_b[0]
    la, lb = np.linalg.norm(da), np.linalg.norm(db)
    perp = float(abs(np.dot(da, db)) / (la * lb))
    if perp > tol_perp:
        return None
    normal = np.cross(da, db)
    normal = normal / np.linalg.norm(normal)
    gap = float(abs(np.dot(normal, seg_b[0] - seg_a[0])))
    if gap > tol_plane:
        return None

    # parameters where each segment's line crosses the other segment
    s_star = float(np.dot(seg_b[0] - seg_a[0], da) / la ** 2)
    u_star = float(np.dot(seg_a[0] - seg_b[0], db) / lb ** 2)
    eps = Tolerances.PARAM
    b_line_meets_a = eps < s_star < 1 - eps
    a_line_meets_b = eps < u_star < 1 - eps
    on_a = -eps <= s_star <= 1 + eps
    on_b = -eps <= u_star <= 1 + eps
    if b_line_meets_a and a_line_meets_b:
        return None
    if on_a and on_b and not (b_line_meets_a or a_line_meets_b):
        # shared endpoint
        return None

    ambiguous = False
    if a_line_meets_b:
        bottom, top, img_b, img_t = a, b, seg_a, seg_b
    elif b_line_meets_a:
        bottom, top, img_b, img_t = b, a, seg_b, seg_a
    else:
        ambiguous = True
        if la >= lb:
            bottom, top, img_b, img_t = a, b, seg_a, seg_b
        else:
            bottom, top, img_b, img_t = b, a, seg_b, seg_a
        logger.info("both extending lines miss at facets %d/%d; labeling with T <= B", a[0], b[0])
    return TPattern(bottom[0], float(bottom[1]), top[0], float(top[1]), img_b, img_t, perp, gap, ambiguous)


def facets_coplanar(band: ImmersedBand, i: int, j: int, tol: float = Tolerances.PLANE) -> bool:
    """True if the images of facets i and j lie in one plane"""
    fi, fj = band.frames[i], band.frames[j]
    ni = np.cross(fi[:, 0], fi[:, 1])
    nj = np.cross(fj[:, 0], fj[:, 1])
    if np.linalg.norm(np.cross(ni, nj)) > tol:
        return False
    return abs(np.dot(ni, fj[:, 2] - fi[:, 2])) <= tol


def _pair_residual(band: ImmersedBand, i: int, j: int):
    def residual(params):
        s, u = params
        a0, a1 = band.bend_image(i, s)
        b0, b1 = band.bend_image(j, u)
        da, db = a1 - a0, b1 - b0
        scale = np.linalg.norm(da) * np.linalg.norm(db)
        return [np.dot(da, db) / scale, np.dot(np.cross(da, db), b0 - a0) / scale]
    return residual


def _pair_samples(band: ImmersedBand, i: int, j: int):
    """Grid parameters with the perpendicularity and coplanarity residuals on the grid"""
    ss = np.linspace(0.0, 1.0, GRID)
    seg_a = np.array([band.bend_image(i, s) for s in ss])
    seg_b = np.array([band.bend_image(j, s) for s in ss])
    da = seg_a[:, 1] - seg_a[:, 0]
    db = seg_b[:, 1] - seg_b[:, 0]
    scale = np.linalg.norm(da, axis=1)[:, None] * np.linalg.norm(db, axis=1)[None, :]
    dots = (da @ db.T) / scale
    cross = np.cross(da[:, None, :], db[None, :, :])
    offset = seg_b[None, :, 0, :] - seg_a[:, None, 0, :]
    triple = np.einsum("ijk,ijk->ij", cross, offset) / scale
    return ss, dots, triple


def _grid_seeds(band: ImmersedBand, i: int, j: int) -> List[Tuple[float, float]]:
    """Centers of grid cells where both residual components change sign"""
    ss, dots, triple = _pair_samples(band, i, j)
    seeds = []
    for p in range(GRID - 1):
        for q in range(GRID - 1):
            c1 = dots[p:p + 2, q:q + 2]
            c2 = triple[p:p + 2, q:q + 2]
            if c1.min() <= 0 <= c1.max() and c2.min() <= 0 <= c2.max():
                seeds.append(((ss[p] + ss[p + 1]) / 2, (ss[q] + ss[q + 1]) / 2))
    return seeds


def _perpendicular_curve(band: ImmersedBand, i: int, j: int, tol: float) -> List[Tuple[float, float]]:
    """
    Points of the perpendicularity curve of a coplanar facet pair

    Each grid row (fixed s) and column (fixed u) is searched for zeros of
    the normalized dot product; sign changes are refined with brentq.
    """
    ss, dots, _ = _pair_samples(band, i, j)

    def dot(s, u):
        a0, a1 = band.bend_image(i, s)
        b0, b1 = band.bend_image(j, u)
        da, db = a1 - a0, b1 - b0
        return float(np.dot(da, db) / (np.linalg.norm(da) * np.linalg.norm(db)))

    points: List[Tuple[float, float]] = []
    for p, fixed in enumerate(ss):
        for values, along_rows in ((dots[p, :], True), (dots[:, p], False)):
            for q in range(GRID):
                if abs(values[q]) <= tol:
                    free = float(ss[q])
                elif q < GRID - 1 and values[q] * values[q + 1] < 0:
                    fn = (lambda x: dot(fixed, x)) if along_rows else (lambda x: dot(x, fixed))
                    free = brentq(fn, ss[q], ss[q + 1], xtol=Tolerances.PARAM)
                else:
                    continue
                points.append((float(fixed), free) if along_rows else (free, float(fixed)))
    return points


def facet_pair_patterns(band: ImmersedBand, i: int, j: int, tol: float = Tolerances.PERP,
                        tol_plane: float = Tolerances.PLANE) -> List[TPattern]:
    """
    T-patterns with beta_b and beta_t in facets i and j

    Non-coplanar pairs are swept on a GRID x GRID grid in the two bend
    parameters; cells where both residuals change sign seed a scipy root
    solve. In a coplanar pair the coplanarity residual vanishes and the
    perpendicular bends form a curve, which is traced row by row and column
    by column; candidates less than one grid cell apart along it collapse to
    the first one found.
    """
    found: List[TPattern] = []
    if facets_coplanar(band, i, j, tol_plane):
        for s, u in _perpendicular_curve(band, i, j, tol):
            tp = _classify(band, (i, s), (j, u), tol, tol_plane)
            if tp is not None:
                found.append(tp)
        return _dedupe(found, band.n_facets, 1.0 / (GRID - 1))

    residual = _pair_residual(band, i, j)
    for seed in _grid_seeds(band, i, j):
        sol = root(residual, seed, method="hybr", tol=1e-14)
        if not sol.success:
            continue
        s, u = sol.x
        if not (-Tolerances.PARAM <= s <= 1 + Tolerances.PARAM
                and -Tolerances.PARAM <= u <= 1 + Tolerances.PARAM):
            continue
        tp = _classify(band, (i, float(np.clip(s, 0, 1))), (j, float(np.clip(u, 0, 1))), tol, tol_plane)
        if tp is not None:
            found.append(tp)
    return found


def _circular_gap(a: float, b: float, n: int) -> float:
    d = abs(a - b) % n
    return min(d, n - d)


def _dedupe(patterns: List[TPattern], n: int, tol: float) -> List[TPattern]:
    kept: List[TPattern] = []
    for tp in patterns:
        cb, ct = tp.coords
        duplicate = any(
            (_circular_gap(cb, kb, n) <= tol and _circular_gap(ct, kt, n) <= tol)
            or (_circular_gap(cb, kt, n) <= tol and _circular_gap(ct, kb, n) <= tol)
            for kb, kt in (k.coords for k in kept))
        if not duplicate:
            kept.append(tp)
    return kept


def pattern_from_edges(band: ImmersedBand, k_b: int, k_t: int) -> TPattern:
    """TPattern on two triangulation edges, labeled as given"""
    n = band.n_facets
    seg_b = np.array(band.edge_image(k_b % n))
    seg_t = np.array(band.edge_image(k_t % n))
    db, dt = seg_b[1] - seg_b[0], seg_t[1] - seg_t[0]
    perp = float(abs(np.dot(db, dt)) / (np.linalg.norm(db) * np.linalg.norm(dt)))
    normal = np.cross(db, dt)
    gap = float(abs(np.dot(normal / np.linalg.norm(normal), seg_t[0] - seg_b[0])))
    return TPattern(k_b % n, 0.0, k_t % n, 0.0, seg_b, seg_t, perp, gap)


def _rank(band: ImmersedBand, tp: TPattern) -> Tuple[float, float, float]:
    try:
        norm = normalize(band, tp)
    except (DegeneratePattern, DegenerateBand) as exc:
        logger.info("pattern at %s cannot be normalized: %s", tp.coords, exc)
        return math.inf, math.inf, math.inf
    # |y| and |x| equal to within RANK_DIGITS tie
    return (round(abs(norm.y), RANK_DIGITS), round(abs(norm.x), RANK_DIGITS),
            band.flat.bend_at(tp.facet_b, tp.s_b)[0])


def find_t_patterns(band: ImmersedBand, tol: float = Tolerances.PERP,
                    tol_plane: float = Tolerances.PLANE) -> List[TPattern]:
    """
    Detect T-patterns

    Pairs of triangulation edges are tested directly, then every pair of
    facets is searched with facet_pair_patterns.

    Returns:
        Patterns ordered by |y|, then |x| of their normalization, then by the
        flat height of beta_b; ties keep edge patterns first
    """
    n = band.n_facets
    found: List[TPattern] = []
    for k in range(n):
        for m in range(k + 1, n):
            tp = _classify(band, (k, 0.0), (m, 0.0), tol, tol_plane)
            if tp is not None:
                found.append(tp)

    coplanar = 0
    for i in range(n):
        for j in range(i + 1, n):
            coplanar += facets_coplanar(band, i, j, tol_plane)
            found.extend(facet_pair_patterns(band, i, j, tol, tol_plane))

    patterns = _dedupe(found, n, Tolerances.PARAM * 100)
    ranked = sorted(patterns, key=lambda tp: _rank(band, tp))
    logger.info("found %d T-patterns (%d candidates, %d coplanar facet pairs)",
                len(ranked), len(found), coplanar)
    return ranked


# =============================================================================
# NORMALIZATION
# =============================================================================

def _mirror(band: ImmersedBand) -> ImmersedBand:
    """Relabel through x -> 1 - x"""
    flat = FlatBand(band.flat.lam, tuple((r, l) for l, r in band.flat.bends))
    A, a = np.diag([-1.0, 1.0]), np.array([1.0, 0.0])
    return band.with_frames(flat, [_after_flat(f, A, a) for f in band.frames])


def _symmetrize(band: ImmersedBand) -> ImmersedBand:
    """
    Half-turn of the chart composed with the half-turn of space about the
    X-axis; reverses the bend order and keeps e_0 in place
    """
    flat = band.flat
    c = flat.bends[0][0] + flat.bends[-1][1]
    bends = tuple((c - r, c - l) for l, r in reversed(flat.bends))
    D = np.diag([1.0, -1.0, -1.0])
    A, a = -np.eye(2), np.array([1.0, float(c)])
    frames = [_before_space(D, np.zeros(3), _after_flat(f, A, a)) for f in reversed(band.frames)]
    return band.with_frames(FlatBand(flat.lam, bends), frames)


def _recut(band: ImmersedBand, k: int) -> ImmersedBand:
    """
    Chart cut along e_k instead of e_0

    The facets below e_k move above the top through the gluing map, which is
    a planar isometry only when the top bend mirrors the bottom bend.
    """
    if k == 0:
        return band
    flat = band.flat
    s0, sn = flat.bend_slope(0), flat.bend_slope(flat.n_facets)
    if abs(s0 + sn) > HEIGHT_TOL * max(1.0, abs(s0)):
        raise DegeneratePattern(
            f"cannot re-cut at bend {k}: bottom slope {s0:.6g} and top slope {sn:.6g} are not mirrored")
    delta = flat.bends[-1][0] - flat.bends[0][1]
    moved = tuple((r + delta, l + delta) for l, r in flat.bends[1:k + 1])
    bends = tuple(flat.bends[k:]) + moved
    A, a = np.diag([-1.0, 1.0]), np.array([1.0, -float(delta)])
    frames = list(band.frames[k:]) + [_after_flat(f, A, a) for f in band.frames[:k]]
    return band.with_frames(FlatBand(flat.lam, bends), frames)


def _place(band: ImmersedBand, k_t: int) -> ImmersedBand:
    """Rigid motion putting e_0 from (-B,0,0) to the origin and e_{k_t} along +Y"""
    v0 = band.bend_vector(0)
    vt = band.bend_vector(k_t)
    x = v0 / np.linalg.norm(v0)
    y = vt - np.dot(vt, x) * x
    if np.linalg.norm(y) < 1e-12:
        raise DegeneratePattern("beta_t is parallel to beta_b")
    y = y / np.linalg.norm(y)
    Q = np.vstack([x, y, np.cross(x, y)])
    origin = band.edge_image(0)[1]
    return band.with_frames(band.flat, [_before_space(Q, -Q @ origin, f) for f in band.frames])


def _as_edges(band: ImmersedBand, tp: TPattern) -> Tuple[ImmersedBand, int, int]:
    """Split facets so that both pattern bends are triangulation edges"""
    if tp.facet_b + tp.s_b >= tp.facet_t + tp.s_t:
        work, k_b = split_facet(band, tp.facet_b, tp.s_b)
        before = work.n_facets
        work, k_t = split_facet(work, tp.facet_t, tp.s_t)
        if work.n_facets > before and k_b >= k_t:
            k_b += 1
    else:
        work, k_t = split_facet(band, tp.facet_t, tp.s_t)
        before = work.n_facets
        work, k_b = split_facet(work, tp.facet_b, tp.s_b)
        if work.n_facets > before and k_t >= k_b:
            k_t += 1
    n = work.n_facets
    return work, k_b % n, k_t % n


@dataclass(frozen=True, eq=False)
class Normalization:
    """
    Standard position of a band with respect to a T-pattern

    ``band`` is cut along beta_b = e_0 with beta_t = e_{k_t}. Trapezoid 1
    runs from beta_b up to beta_t; trapezoid 2 from beta_t to the top.
    """
    pattern: TPattern
    band: ImmersedBand
    k_t: int
    b: float
    t: float
    B: float
    T: float
    L1: float
    R1: float
    L2: float
    R2: float
    x: float
    y: float
    mirrored: bool = False
    symmetrized: bool = False
    recut: bool = False

    @property
    def S1(self) -> float:
        return self.L1 + self.R1

    @property
    def S2(self) -> float:
        return self.L2 + self.R2

    @property
    def lam(self) -> float:
        return float(self.band.flat.lam)

    def slopes(self) -> SlopePair:
        return SlopePair(self.b, self.t)

    def trapezoid(self, j: int) -> Tuple[ImmersedBand, int]:
        """(band, index of beta_t) whose bottom trapezoid is trapezoid j"""
        if j == 1:
            return self.band, self.k_t
        if j == 2:
            k = self.band.n_facets - self.k_t
            return _place(_symmetrize(self.band), k), k
        raise ValueError(f"trapezoid index must be 1 or 2, got {j}")

    def sides(self, j: int) -> Tuple[float, float]:
        return (self.L1, self.R1) if j == 1 else (self.L2, self.R2)

    def as_dict(self) -> Dict:
        return {
            "b": self.b, "t": self.t, "B": self.B, "T": self.T,
            "L1": self.L1, "R1": self.R1, "L2": self.L2, "R2": self.R2,
            "S1": self.S1, "S2": self.S2, "lambda": self.lam,
            "x": self.x, "y": self.y,
            "mirrored": self.mirrored, "symmetrized": self.symmetrized, "recut": self.recut,
        }


def normalize(band: ImmersedBand, tp: TPattern) -> Normalization:
    """
    Standard normalization of a band with respect to a T-pattern

    Cuts the chart along beta_b, mirrors so that L1 >= R1, moves beta_b* to
    run from (-B,0,0) to the origin with beta_t* parallel to +Y in the
    XY-plane and applies the chart/space half-turn pair when y < 0.

    Raises:
        DegeneratePattern: if B or T vanishes, both bends coincide, or the
            chart cannot be re-cut at beta_b
    """
    work, k_b, k_t = _as_edges(band, tp)
    n = work.n_facets
    if k_b == k_t:
        raise DegeneratePattern("beta_b and beta_t are the same bend")
    recut = k_b != 0
    if recut:
        work = _recut(work, k_b)
        k_t = (k_t - k_b) % n

    h = work.flat.heights
    mirrored = (h[k_t][0] - h[0][0]) < (h[k_t][1] - h[0][1]) - HEIGHT_TOL
    if mirrored:
        work = _mirror(work)
    work = _place(work, k_t)

    symmetrized = False
    mid = sum(work.edge_image(k_t)) / 2
    if mid[1] < -Tolerances.REFINED:
        k_t = n - k_t
        work = _place(_symmetrize(work), k_t)
        symmetrized = True
        mid = sum(work.edge_image(k_t)) / 2

    B = float(np.linalg.norm(work.bend_vector(0)))
    T = float(np.linalg.norm(work.bend_vector(k_t)))
    if B < 1e-12 or T < 1e-12:
        raise DegeneratePattern(f"degenerate special bends: B = {B}, T = {T}")
    h = work.flat.heights
    norm = Normalization(
        pattern=tp, band=work, k_t=k_t,
        b=work.flat.bend_slope(0), t=work.flat.bend_slope(k_t), B=B, T=T,
        L1=float(h[k_t][0] - h[0][0]), R1=float(h[k_t][1] - h[0][1]),
        L2=float(h[n][1] - h[k_t][1]), R2=float(h[n][0] - h[k_t][0]),
        x=float(mid[0]), y=float(mid[1]),
        mirrored=mirrored, symmetrized=symmetrized, recut=recut)
    logger.debug("normalized: %s", norm.as_dict())
    return norm


# =============================================================================
# TRAPEZOID QUANTITIES
# =============================================================================

def lemma42_check(norm: Normalization) -> List[Dict]:
    """
    Straightened ridge arcs of each trapezoid

    L_str and R_str sum the ridge edges of facets with ridge on the left and
    on the right. Their sum is (-B, T, 0) and their difference is 2*Theta
    with Theta = (B/2 + x, +-y, 0). The chain
    |(B,R,0) - zeta| <= |(B+x, |R_str|, 0) - zeta| <= |p - zeta| = |L_str| <= L
    with zeta = (0, T, 0) yields B^2 - L^2 + (T - R)^2 <= 0.
    """
    B, T, x = norm.B, norm.T, norm.x
    zeta = np.array([0.0, T, 0.0])
    out = []
    for j in (1, 2):
        band, k = norm.trapezoid(j)
        vectors = np.array([band.bend_vector(i) for i in range(k + 1)])
        gammas = vectors[1:] - vectors[:-1]
        signs = np.array(band.signs[:k])
        l_str = gammas[signs < 0].sum(axis=0) if (signs < 0).any() else np.zeros(3)
        r_str = gammas[signs > 0].sum(axis=0) if (signs > 0).any() else np.zeros(3)
        y = norm.y if j == 1 else -norm.y
        theta = np.array([B / 2 + x, y, 0.0])
        L, R = norm.sides(j)
        p = np.array([B, 0.0, 0.0]) + r_str
        chain = [
            float(np.linalg.norm(np.array([B, R, 0.0]) - zeta)),
            float(np.linalg.norm(np.array([B + x, np.linalg.norm(r_str), 0.0]) - zeta)),
            float(np.linalg.norm(p - zeta)),
            float(np.linalg.norm(l_str)),
            L,
        ]
        value = B ** 2 - L ** 2 + (T - R) ** 2
        out.append({
            "trapezoid": j,
            "L_str": l_str.tolist(),
            "R_str": r_str.tolist(),
            "Theta": theta.tolist(),
            "p": p.tolist(),
            "sum_residual": float(np.linalg.norm(r_str + l_str - np.array([-B, T, 0.0]))),
            "difference_residual": float(np.linalg.norm(r_str - l_str - 2 * theta)),
            "chain": chain,
            "chain_holds": all(a <= b + 1e-9 for a, b in zip(chain, chain[1:])),
            "value": value,
            "inequality_holds": value <= 1e-9,
        })
    return out


def pitch_profile(norm: Normalization, trapezoid_index: int = 1,
                  samples: int = Tolerances.INTERIOR_SAMPLES) -> np.ndarray:
    """
    Unwrapped pitch angles along a trapezoid

    The pitch of a bend is the direction of its XY-projection modulo pi.
    Here it is unwrapped continuously from beta_b, so values may leave
    [0, pi); reduce_pitch gives the angles modulo pi.

    Raises:
        ProjectionDegenerate: if a bend image is vertical
    """
    band, k = norm.trapezoid(trapezoid_index)
    angles: List[float] = []
    previous = 0.0
    for i in range(k):
        params = np.linspace(0.0, 1.0, samples + 2)
        if i < k - 1:
            params = params[:-1]
        for s in params:
            left, right = band.bend_image(i, float(s))
            d = (right - left)[:2]
            if np.linalg.norm(d) < Tolerances.VERTICAL:
                raise ProjectionDegenerate(f"bend of facet {i} at s = {s:.4f} projects to a point")
            raw = math.atan2(d[1], d[0])
            angle = raw + round((previous - raw) / math.pi) * math.pi
            angles.append(angle)
            previous = angle
    return np.array(angles)


def reduce_pitch(angles: Sequence[float]) -> np.ndarray:
    """Pitch angles reduced into [0, pi)"""
    return np.mod(np.asarray(angles, dtype=float), math.pi)


def pitch_backtrack(angles: Sequence[float]) -> float:
    """Largest distance of a middle angle from the interval of an earlier and a later one"""
    a = np.asarray(angles, dtype=float)
    if a.size < 3:
        return 0.0
    pre_max = np.maximum.accumulate(a)[:-2]
    pre_min = np.minimum.accumulate(a)[:-2]
    suf_max = np.maximum.accumulate(a[::-1])[::-1][2:]
    suf_min = np.minimum.accumulate(a[::-1])[::-1][2:]
    mid = a[1:-1]
    below = np.minimum(pre_max, suf_max) - mid
    above = mid - np.maximum(pre_min, suf_min)
    return float(max(below.max(), above.max(), 0.0))


def zero_slope_bends(norm: Normalization, tol: float = Tolerances.SLOPE) -> List[Dict]:
    """
    Bends of flat slope 0 in each trapezoid

    Slopes run linearly within a facet from b down to t; every strict sign
    change is solved with brentq. b = 0 exactly (the triangular limit) is
    accepted; beta_b itself is then the slope-0 bend and is not repeated.

    Raises:
        NotSim: if (b, t) lies outside the quadrant b >= 0 >= t
    """
    if norm.b < -tol or norm.t > tol:
        raise NotSim(f"(b, t) = ({norm.b:.6g}, {norm.t:.6g}) is outside the quadrant b >= 0 >= t")
    out = []
    for j in (1, 2):
        band, k = norm.trapezoid(j)
        for i in range(k):
            def slope(s, i=i, band=band):
                l, r = band.flat.bend_at(i, s)
                return r - l
            lo, hi = slope(0.0), slope(1.0)
            if lo * hi >= 0:
                continue
            s = brentq(slope, 0.0, 1.0, xtol=tol)
            l, r = band.flat.bend_at(i, s)
            out.append({"trapezoid": j, "facet": i, "s": s, "left": l, "right": r, "slope": r - l})
    return out


def hull_angles(norm: Normalization) -> Dict:
    """
    Interior angles of the triangle spanned by (-B, 0) and the endpoints of
    beta_t*; degenerate when |y| >= T/2
    """
    B, T, x, y = norm.B, norm.T, norm.x, norm.y
    if abs(y) >= T / 2:
        return {"degenerate": True}
    P = np.array([-B, 0.0])
    lower = np.array([x, y - T / 2])
    upper = np.array([x, y + T / 2])

    def angle(at, u, v):
        a, b = u - at, v - at
        return float(math.acos(np.clip(np.dot(a, b) / (np.linalg.norm(a) * np.linalg.norm(b)), -1, 1)))

    angles = {"left": angle(P, lower, upper), "bottom": angle(lower, P, upper), "top": angle(upper, P, lower)}
    return {"degenerate": False, **angles, "min": min(angles.values())}


def constraint_report(norm: Normalization, tol: float = 1e-9) -> Dict:
    """Unaveraged length constraints and S >= max(f, g)"""
    B, T = norm.B, norm.T
    values = eval_constraints(norm.slopes())
    S = (norm.S1 + norm.S2) / 2
    report = {
        "R1 + R2 - T": norm.R1 + norm.R2 - T,
        "L1 + L2 - 2 sqrt(B^2 + T^2/4)": norm.L1 + norm.L2 - 2 * math.sqrt(B ** 2 + T ** 2 / 4),
        "S - f": S - float(values.f),
        "S - g": S - float(values.g),
    }
    report["holds"] = all(v >= -tol for v in report.values())
    return report


def theorem41_properties(norm: Normalization, tol: float = 1e-9) -> Dict:
    """Aspect bounds, (x, y) bounds and hull angles of a special immersed band"""
    lower = float(aspect_lower_bound(norm.b))
    hull = hull_angles(norm)
    return {
        "aspect_lower_bound": lower,
        "S1 bound": norm.S1 >= lower - tol,
        "S2 bound": norm.S2 >= lower - tol,
        "x < 1/18": norm.x < 1 / 18,
        "|y| < 1/30": abs(norm.y) < 1 / 30,
        "hull": hull,
        "hull angles > pi/4": (not hull["degenerate"]) and hull["min"] > math.pi / 4,
    }


def slopes_in_omega(norm: Normalization, eps: Real = 0) -> bool:
    return omega_contains(norm.slopes(), eps)


# =============================================================================
# REPORTING
# =============================================================================

def ridge_projection_svg(band: ImmersedBand, path: Union[str, Path]) -> Path:
    """XY-projection of the ridge curve with the unit circle"""
    ridge = ridge_curve(band)
    fig, ax = styled_figure()
    circle = np.linspace(0, 2 * math.pi, 361)
    ax.plot(np.cos(circle), np.sin(circle), linestyle="--", linewidth=0.8, label="unit circle")
    ax.plot(ridge.vertices[:, 0], ridge.vertices[:, 1], marker="o", markersize=3, label="ridge curve")
    ax.set_aspect("equal")
    ax.set_xlabel("X")
    ax.set_ylabel("Y")
    ax.legend(loc="upper right")
    return save_svg(fig, path)


def analyze(band: ImmersedBand, samples: int = Tolerances.INTERIOR_SAMPLES) -> Dict:
    """
    Every band check in one report

    ``checks`` maps each invariant to a boolean; the bound properties of a
    special band are only checked when lambda <= sqrt 3.
    """
    lam = float(band.flat.lam)
    ridge = ridge_curve(band)
    checks = {
        "isometry": band.isometry_residual() <= Tolerances.ISO,
        "closure": band.closure_residual <= Tolerances.CLOSE,
        "ridge length is 2 lambda": abs(ridge.length - 2 * lam) <= 1e-9 * max(1.0, lam),
        "ridge lines tangent to the unit sphere": float(np.abs(ridge.line_distances() - 1).max()) <= 1e-6,
        "ridge edges are 2 mu E": ridge.switch_residual <= 1e-9,
    }
    report: Dict = {
        "lambda": lam,
        "facets": band.n_facets,
        "signs": list(band.signs),
        "closure_residual": band.closure_residual,
        "isometry_residual": band.isometry_residual(),
        "ridge": {"length": ridge.length, "min_norm": ridge.min_norm},
    }

    patterns = find_t_patterns(band)
    checks["T-pattern found"] = bool(patterns)
    report["patterns"] = [tp.as_dict() for tp in patterns]
    if patterns:
        try:
            norm = normalize(band, patterns[0])
        except DegeneratePattern as exc:
            report["normalization_error"] = str(exc)
            checks["normalization"] = False
        else:
            report["normalization"] = norm.as_dict()
            checks["lambda = (S1 + S2)/2"] = abs(norm.lam - (norm.S1 + norm.S2) / 2) <= 1e-9
            placed = ridge_curve(norm.band)
            checks["ridge endpoints at (B,0,0) and (-B,0,0)"] = placed.endpoint_residual() <= 1e-9
            lemma = lemma42_check(norm)
            report["trapezoids"] = lemma
            checks["straightened arcs"] = all(
                e["sum_residual"] <= 1e-9 and e["difference_residual"] <= 1e-9 for e in lemma)
            report["constraints"] = constraint_report(norm)
            report["omega"] = {"contains": slopes_in_omega(norm), "omegahat": omegahat_contains(norm.slopes())}

            special = lam <= math.sqrt(3) + 1e-9
            properties = theorem41_properties(norm)
            report["properties"] = properties
            try:
                profiles = {j: pitch_profile(norm, j, samples) for j in (1, 2)}
                backtrack = max(pitch_backtrack(angles) for angles in profiles.values())
                report["pitch_backtrack"] = backtrack
                report["pitch_range"] = {
                    str(j): [float(reduce_pitch(angles).min()), float(reduce_pitch(angles).max())]
                    for j, angles in profiles.items()
                }
            except ProjectionDegenerate as exc:
                report["pitch_error"] = str(exc)
                backtrack = None
            try:
                report["zero_slope_bends"] = zero_slope_bends(norm)
            except NotSim as exc:
                report["zero_slope_error"] = str(exc)
            if special:
                for name in ("S1 bound", "S2 bound", "x < 1/18", "|y| < 1/30", "hull angles > pi/4"):
                    checks[name] = bool(properties[name])
                checks["pitch backtrack < pi/30"] = backtrack is not None and backtrack < math.pi / 30

    report["checks"] = checks
    report["passed"] = all(checks.values())
    return report


# =============================================================================
# FIXTURES
# =============================================================================

def triangular_band() -> ImmersedBand:
    """
    The flat-folded triangular band at lambda = sqrt 3: four facets with
    signs +1, -1, +1, -1 and every crease pi
    """
    r3 = mpmath.sqrt(3)
    bends = [(0, 0), (0, 1 / r3), (2 / r3, 1 / r3), (2 / r3, r3), (r3, r3)]
    return build_immersed(flat_band(r3, bends), [mpmath.pi] * 3)
