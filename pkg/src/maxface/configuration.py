"""Configurations of neck positions: finite blocks, periodic stacks, the
(l, u) change of variables, concatenation, admissibility checks, and the
built-in example families.

A block stores layers k = 0..h-1 plus the translation C; the implied closing
layer is {p_{0,1} + C}. Periodic extension is p-space: p_{k+T,i} = p_{k,i} + C
for every integer k. The printed sign-rule concatenation is implemented
separately (concat_paper_rule) and only cross-validated against p-space
stacking, because its parity cases disagree with the worked point lists.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

from .errors import DomainError, UsageError
from .numeric import DEFAULT_TOLERANCE, TolerancePolicy, require_finite

CONFIG_SCHEMA = "maxface-config/1"


@dataclass(frozen=True)
class Layer:
    """One layer of neck positions p_{k,i}; weight c_k = 1/n_k."""

    points: tuple[complex, ...]

    def __post_init__(self):
        pts = tuple(require_finite(p, "layer point") for p in self.points)
        if not pts:
            raise UsageError("a layer needs at least one point")
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                if pts[i] == pts[j]:
                    raise UsageError(f"duplicate point {pts[i]} within a layer")
        object.__setattr__(self, "points", pts)

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def weight(self) -> float:
        return 1.0 / len(self.points)

    def centroid(self) -> complex:
        return sum(self.points, 0j) / len(self.points)

    def translated(self, shift: complex) -> "Layer":
        return Layer(tuple(p + shift for p in self.points))


def _check_disjoint(a: Sequence[complex], b: Sequence[complex], what: str) -> None:
    for p in a:
        for q in b:
            if p == q:
                raise UsageError(f"coincident points {p} {what}")


@dataclass(frozen=True)
class FiniteBlock:
    """Layers k = 0..height-1 plus translation C = p_{height,1} - p_{0,1}.

    Layer 0 has exactly one point; the closing layer {p_{0,1} + C} must be
    disjoint from the top stored layer.
    """

    layers: tuple[Layer, ...]
    translation: complex

    def __post_init__(self):
        layers = tuple(self.layers)
        if not layers:
            raise UsageError("a block needs at least one layer")
        if layers[0].size != 1:
            raise UsageError("layer 0 must contain exactly one point")
        C = require_finite(self.translation, "translation")
        if C == 0:
            raise UsageError("translation must be nonzero")
        closing = layers[0].points[0] + C
        for a, b in zip(layers, layers[1:]):
            _check_disjoint(a.points, b.points, "in consecutive layers")
        _check_disjoint(layers[-1].points, (closing,), "between top layer and closing point")
        object.__setattr__(self, "layers", layers)
        object.__setattr__(self, "translation", C)

    @property
    def height(self) -> int:
        return len(self.layers)

    @property
    def opening_point(self) -> complex:
        return self.layers[0].points[0]

    @property
    def closing_point(self) -> complex:
        return self.opening_point + self.translation

    def translated(self, shift: complex) -> "FiniteBlock":
        return FiniteBlock(tuple(l.translated(shift) for l in self.layers), self.translation)


@dataclass(frozen=True)
class PeriodicConfiguration:
    """Doubly infinite stack generated by a block: p_{k+T,i} = p_{k,i} + C."""

    block: FiniteBlock

    @property
    def period(self) -> int:
        return self.block.height

    @property
    def translation(self) -> complex:
        return self.block.translation

    def layer_at(self, k: int) -> Layer:
        m, r = divmod(k, self.period)
        base = self.block.layers[r]
        if m == 0:
            return base
        return base.translated(m * self.translation)

    def size_at(self, k: int) -> int:
        return self.block.layers[k % self.period].size

    def weight_at(self, k: int) -> float:
        return 1.0 / self.size_at(k)

    def point(self, k: int, i: int) -> complex:
        """p_{k,i} with 1-based neck index i."""
        layer = self.layer_at(k)
        if not 1 <= i <= layer.size:
            raise UsageError(f"neck index {i} out of range for layer {k} (n={layer.size})")
        return layer.points[i - 1]


@dataclass(frozen=True)
class UCoordinates:
    """Per-period (l, u) data: l_k for k = 1..T, u_{k,i} (i >= 2) for k = 1..T.

    u_{k,1} = 0 by definition and is not stored. The last u tuple is empty
    because layer T is a one-point layer (the closing layer).
    """

    l: tuple[complex, ...]
    u: tuple[tuple[complex, ...], ...]

    def __post_init__(self):
        if len(self.l) != len(self.u):
            raise UsageError("l and u must cover the same layers 1..T")
        if not self.l:
            raise UsageError("empty coordinate data")
        if self.u[-1]:
            raise UsageError("layer T is a one-point layer; u_T must be empty")
        object.__setattr__(self, "l", tuple(complex(v) for v in self.l))
        object.__setattr__(self, "u", tuple(tuple(complex(v) for v in row) for row in self.u))

    @property
    def period(self) -> int:
        return len(self.l)

    def flat(self) -> list[complex]:
        """Sequence (l_1, u_{1,2..}, l_2, u_{2,2..}, ..., l_T)."""
        out: list[complex] = []
        for lk, uk in zip(self.l, self.u):
            out.append(lk)
            out.extend(uk)
        return out


def u_coords_from_points(config: PeriodicConfiguration) -> UCoordinates:
    """u_{k,i} = (-1)^k (p_{k,i} - p_{k,1}); l_k = (-1)^k (p_{k,1} - p_{k-1,1})."""
    T = config.period
    l = []
    u = []
    for k in range(1, T + 1):
        sign = (-1) ** k
        pk = config.layer_at(k).points
        pk1 = config.layer_at(k - 1).points
        l.append(sign * (pk[0] - pk1[0]))
        u.append(tuple(sign * (p - pk[0]) for p in pk[1:]))
    return UCoordinates(tuple(l), tuple(u))


def points_from_u(u: UCoordinates, gauge: complex = 0j) -> PeriodicConfiguration:
    """Rebuild the periodic configuration; `gauge` fixes p_{0,1}."""
    T = u.period
    p_first = [complex(gauge)]
    for k in range(1, T + 1):
        p_first.append(p_first[k - 1] + (-1) ** k * u.l[k - 1])
    layers = []
    for k in range(T):
        if k == 0:
            layers.append(Layer((p_first[0],)))
        else:
            sign = (-1) ** k
            pts = [p_first[k]] + [p_first[k] + sign * v for v in u.u[k - 1]]
            layers.append(Layer(tuple(pts)))
    C = p_first[T] - p_first[0]
    return PeriodicConfiguration(FiniteBlock(tuple(layers), C))


@dataclass(frozen=True)
class WindowedConfiguration:
    """Finite stack of blocks in p-space; a truncated (quasi-)periodic window."""

    blocks: tuple[FiniteBlock, ...]
    layers: tuple[Layer, ...] = field(init=False)

    def __post_init__(self):
        blocks = tuple(self.blocks)
        if not blocks:
            raise UsageError("a window needs at least one block")
        layers: list[Layer] = []
        shift = 0j
        prev_top: Layer | None = None
        for blk in blocks:
            shifted = blk.translated(shift) if shift != 0 else blk
            if prev_top is not None:
                _check_disjoint(prev_top.points, shifted.layers[0].points, "at a block junction")
            layers.extend(shifted.layers)
            prev_top = shifted.layers[-1]
            shift += blk.translation
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "layers", tuple(layers))

    @property
    def height(self) -> int:
        return len(self.layers)

    @property
    def total_translation(self) -> complex:
        return sum((b.translation for b in self.blocks), 0j)

    def layer_at(self, k: int) -> Layer:
        if not 0 <= k < self.height:
            raise UsageError(f"layer {k} outside window 0..{self.height - 1}")
        return self.layers[k]


def concat_blocks(blocks: Sequence[FiniteBlock]) -> WindowedConfiguration:
    """p-space stacking: block m is translated by the sum of the previous
    translations, so each closing point becomes the next opening point."""
    return WindowedConfiguration(tuple(blocks))


def repeat_block(block: FiniteBlock, m: int) -> WindowedConfiguration:
    if m < 1:
        raise UsageError("repeat count must be >= 1")
    return WindowedConfiguration((block,) * m)


@dataclass(frozen=True)
class ConcatComparison:
    """Printed sign-rule reconstruction vs p-space stacking."""

    window: WindowedConfiguration
    per_layer_deviation: tuple[float, ...]
    max_deviation: float
    u_period: int
    notes: tuple[str, ...]


def concat_paper_rule(block: FiniteBlock, m_count: int) -> ConcatComparison:
    """Apply the printed parity cases for l and u over m = 0..m_count-1 and
    reconstruct points; report the deviation from concat_blocks.

    Printed rule: l_{mh+k} = l_k when h is odd, (-1)^m l_k when h is even;
    u_{mh+k,i} = u_{k,i} when h is even, (-1)^m u_{k,i} when h is odd.
    p-space stacking is the authoritative semantics; this exists to record
    the discrepancy, not to resolve it.
    """
    if m_count < 1:
        raise UsageError("m_count must be >= 1")
    h = block.height
    base = u_coords_from_points(PeriodicConfiguration(block))
    reference = repeat_block(block, m_count)

    # Global U over K = 1..m_count*h following the printed cases.
    def l_global(K: int) -> complex:
        m, k = divmod(K - 1, h)
        lk = base.l[k]
        return lk if h % 2 == 1 else (-1) ** m * lk

    def u_global(K: int) -> tuple[complex, ...]:
        m, k = divmod(K - 1, h)
        uk = base.u[k]
        return uk if h % 2 == 0 else tuple((-1) ** m * v for v in uk)

    p_first = [block.opening_point]
    for K in range(1, m_count * h + 1):
        p_first.append(p_first[K - 1] + (-1) ** K * l_global(K))
    layers = [Layer((p_first[0],))]
    for K in range(1, m_count * h + 1):
        sign = (-1) ** K
        pts = [p_first[K]] + [p_first[K] + sign * v for v in u_global(K)]
        layers.append(Layer(tuple(pts)))

    deviations = []
    for k in range(reference.height):
        ref = reference.layer_at(k).points
        got = layers[k].points
        if len(ref) != len(got):
            deviations.append(math.inf)
        else:
            deviations.append(max(abs(a - b) for a, b in zip(got, ref)))

    # Smallest period of the p-space U sequence (l_{k+T'} = l_k, u likewise);
    # 2h always works because p_{k+2h,i} = p_{k,i} + 2C.
    extended = u_coords_from_points(
        PeriodicConfiguration(FiniteBlock(reference.layers[: 2 * h], 2 * block.translation))
        if reference.height >= 2 * h
        else PeriodicConfiguration(block)
    )
    u_period = 2 * h
    for cand in range(1, 2 * h):
        if 2 * h % cand:
            continue
        ok = all(
            extended.l[(k + cand) % (2 * h)] == extended.l[k]
            and extended.u[(k + cand) % (2 * h)] == extended.u[k]
            for k in range(2 * h)
        )
        if ok:
            u_period = cand
            break

    notes = []
    max_dev = max(deviations) if deviations else 0.0
    if max_dev > DEFAULT_TOLERANCE.zero_abs:
        notes.append(
            "printed sign-rule reconstruction deviates from p-space stacking; "
            "p-space is authoritative"
        )
    notes.append(f"p-space U sequence has period {u_period}")
    return ConcatComparison(
        window=reference,
        per_layer_deviation=tuple(deviations),
        max_deviation=max_dev,
        u_period=u_period,
        notes=tuple(notes),
    )


@dataclass(frozen=True)
class AdmissibilityReport:
    """Boundedness / finiteness / centroid checks for a periodic stack."""

    sizes_bounded: bool
    max_layer_size: int
    u_value_set: tuple[complex, ...]
    u_values_finite: bool
    centroids: tuple[complex, ...]
    centroid_condition: bool
    failing_layers: tuple[int, ...]
    notes: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return self.sizes_bounded and self.u_values_finite and self.centroid_condition


def theorem1_hypotheses(
    config: PeriodicConfiguration, tol: TolerancePolicy = DEFAULT_TOLERANCE
) -> AdmissibilityReport:
    """Check the standing hypotheses on a periodic stack.

    (1) layer sizes bounded (always true for a periodic stack),
    (2) the U sequence takes finitely many values (values over 2T reported;
        for odd T the sign of l and u flips after one period),
    (3) consecutive layer centroids differ: the source text omits the
        summation on one side, so the centroid reading is adopted.
    """
    T = config.period
    sizes = [config.size_at(k) for k in range(T)]
    double = PeriodicConfiguration(
        FiniteBlock(
            tuple(config.layer_at(k) for k in range(2 * T)),
            2 * config.translation,
        )
    )
    values = u_coords_from_points(double).flat()
    seen: list[complex] = []
    for v in values:
        if not any(abs(v - w) <= tol.zero_abs for w in seen):
            seen.append(v)

    centroids = [config.layer_at(k).centroid() for k in range(T + 1)]
    failing = tuple(
        k for k in range(1, T + 1) if abs(centroids[k] - centroids[k - 1]) <= tol.zero_abs
    )
    notes = ("centroid reading adopted for the consecutive-layer condition",)
    return AdmissibilityReport(
        sizes_bounded=True,
        max_layer_size=max(sizes),
        u_value_set=tuple(seen),
        u_values_finite=True,
        centroids=tuple(centroids),
        centroid_condition=not failing,
        failing_layers=failing,
        notes=notes,
    )


# ---------------------------------------------------------------------------
# Built-in families


def height2_block(n: int) -> FiniteBlock:
    """Layers {0} and {i + cot(j pi/(n+1)) : j = 1..n}, translation 2i."""
    if n < 1:
        raise UsageError("height2 preset requires n >= 1")
    pts = tuple(1j + 1.0 / math.tan(j * math.pi / (n + 1)) for j in range(1, n + 1))
    return FiniteBlock((Layer((0j,)), Layer(pts)), 2j)


def height3_block() -> FiniteBlock:
    """Layers {0}, {-+sqrt2/2 + i}, {-+sqrt2/2 + 2i}, translation 3i."""
    s = math.sqrt(2) / 2
    return FiniteBlock(
        (Layer((0j,)), Layer((-s + 1j, s + 1j)), Layer((-s + 2j, s + 2j))),
        3j,
    )


def chain_block(h: int, a: complex) -> FiniteBlock:
    """h one-point layers p_{k,1} = k a, translation h a."""
    if h < 1:
        raise UsageError("chain preset requires h >= 1")
    a = complex(a)
    if a == 0:
        raise UsageError("chain preset requires a != 0")
    return FiniteBlock(tuple(Layer((k * a,)) for k in range(h)), h * a)


PRESET_NAMES = ("height2", "height3", "chain")


def preset(name: str, **params) -> FiniteBlock:
    if name == "height2":
        return height2_block(int(params.pop("n", 2)))
    if name == "height3":
        if params:
            raise UsageError(f"height3 takes no parameters, got {sorted(params)}")
        return height3_block()
    if name == "chain":
        return chain_block(int(params.pop("h", 1)), complex(params.pop("a", 1.0)))
    raise UsageError(f"unknown preset {name!r} (expected one of {PRESET_NAMES})")


def _parse_complex(text: str) -> complex:
    cleaned = text.strip().replace("i", "j").replace(" ", "")
    try:
        return complex(cleaned)
    except ValueError as exc:
        raise UsageError(f"cannot parse complex number from {text!r}") from exc


def parse_preset(spec: str) -> FiniteBlock:
    """Parse strings like 'height2:n=4', 'height3', 'chain:h=1,a=1+0i'."""
    name, _, tail = spec.partition(":")
    name = name.strip()
    params: dict = {}
    if tail:
        for item in tail.split(","):
            key, sep, value = item.partition("=")
            if not sep:
                raise UsageError(f"malformed preset parameter {item!r}")
            key = key.strip()
            value = value.strip()
            if key in ("n", "h"):
                try:
                    params[key] = int(value)
                except ValueError as exc:
                    raise UsageError(f"parameter {key} must be an integer, got {value!r}") from exc
            elif key == "a":
                params[key] = _parse_complex(value)
            else:
                raise UsageError(f"unknown preset parameter {key!r}")
    return preset(name, **params)


# ---------------------------------------------------------------------------
# JSON schema


def block_to_json(block: FiniteBlock) -> dict:
    return {
        "schema": CONFIG_SCHEMA,
        "block": {
            "layers": [
                {"points": [[p.real, p.imag] for p in layer.points]}
                for layer in block.layers
            ],
            "translation": [block.translation.real, block.translation.imag],
        },
    }


def block_from_json(data: dict) -> FiniteBlock:
    if not isinstance(data, dict):
        raise UsageError("configuration JSON must be an object")
    if data.get("schema") != CONFIG_SCHEMA:
        raise UsageError(f"unsupported config schema {data.get('schema')!r}")
    try:
        raw = data["block"]
        layers = tuple(
            Layer(tuple(complex(re, im) for re, im in layer["points"]))
            for layer in raw["layers"]
        )
        tre, tim = raw["translation"]
        return FiniteBlock(layers, complex(tre, tim))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"malformed configuration JSON: {exc}") from exc


def load_block(path) -> FiniteBlock:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read configuration file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"configuration file {path} is not valid JSON: {exc}") from exc
    return block_from_json(data)
