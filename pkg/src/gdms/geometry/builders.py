"""Example systems: Cantor, golden mean, affine Markov, Markov interval maps,
and inverse branches of z**2 + c."""

from __future__ import annotations

import math
import random
from fractions import Fraction
from typing import Optional, Sequence

from ..errors import ConstraintViolation, InvalidInput
from ..rational import Number, to_fraction
from ..symbolic import DEFAULT_CYLINDER_CAP, Subshift
from .julia import JuliaNumerics, julia_samples
from .maps import AffineMap, JuliaBranch
from .system import Annulus, GdmsSystem, Interval

UNIT = Interval(Fraction(0), Fraction(1))


def _auto_lambdas(ratios, lambda1=None, lambda2=None):
    lo, hi = min(ratios), max(ratios)
    lam1 = to_fraction(lambda1) if lambda1 is not None else lo / 2
    lam2 = to_fraction(lambda2) if lambda2 is not None else (hi + 1) / 2
    return lam1, lam2


def affine_markov_system(
    subshift: Subshift,
    maps: Sequence[tuple[Number, Number]],
    edges: Optional[dict] = None,
    space: Interval = UNIT,
    lambda1=None,
    lambda2=None,
    name: str = "affine",
    labels=None,
    validate: bool = True,
) -> GdmsSystem:
    """Affine system from ``(scale, offset)`` pairs.

    ``edges`` maps ``(i, j)`` to ``(scale, offset)``; a missing admissible
    edge defaults to f_j.
    """
    if len(maps) != subshift.q:
        raise InvalidInput(f"need {subshift.q} first-letter maps, got {len(maps)}")
    first = tuple(AffineMap(to_fraction(s), to_fraction(o)) for s, o in maps)
    edges = dict(edges or {})
    edge_maps = {}
    for i, j in subshift.edges():
        if (i, j) in edges:
            s, o = edges.pop((i, j))
            edge_maps[(i, j)] = AffineMap(to_fraction(s), to_fraction(o))
        else:
            edge_maps[(i, j)] = first[j]
    if edges:
        raise InvalidInput(f"edge maps given for inadmissible transitions {sorted(edges)}")
    for f in list(first) + list(edge_maps.values()):
        if f.scale == 0:
            raise ConstraintViolation("contraction", "zero scale")
    ratios = [f.ratio for f in first] + [f.ratio for f in edge_maps.values()]
    lam1, lam2 = _auto_lambdas(ratios, lambda1, lambda2)
    system = GdmsSystem(name, subshift, first, edge_maps, lam1, lam2, space, labels=labels)
    return system.validate() if validate else system


def cantor_system(cap: int = DEFAULT_CYLINDER_CAP) -> GdmsSystem:
    """Middle-third Cantor set: f_0(x) = x/3, f_1(x) = x/3 + 2/3.

    Symbols 0 and 1 carry the ternary-digit labels 0 and 2.
    """
    third = Fraction(1, 3)
    return affine_markov_system(
        Subshift(2, ((True, True), (True, True)), cap),
        [(third, 0), (third, 2 * third)],
        name="cantor",
        labels=(0, 2),
    )


def golden_mean_system(
    r0: Number = Fraction(1, 3),
    r1: Number = Fraction(1, 3),
    offsets: Sequence[Number] = (0, Fraction(2, 3)),
    cap: int = DEFAULT_CYLINDER_CAP,
    **kw,
) -> GdmsSystem:
    """Golden-mean shift (no ``1 -> 1``) with f_i(x) = r_i x + offset_i."""
    A = ((True, True), (True, False))
    return affine_markov_system(
        Subshift(2, A, cap),
        [(r0, offsets[0]), (r1, offsets[1])],
        name="golden",
        **kw,
    )


def random_affine_markov_system(q: int, seed: int, cap: int = DEFAULT_CYLINDER_CAP) -> GdmsSystem:
    """Random transitive affine Markov system with positive entropy and
    distinct edge maps.

    [0, 1] is cut into ``q`` slots separated by gaps; every map into symbol
    j lands in slot j, which gives the open-set condition at all
    generations. Scales are rationals with denominator 60.
    """
    if q < 2:
        raise InvalidInput("random system needs q >= 2")
    rng = random.Random(seed)
    A = [[False] * q for _ in range(q)]
    perm = list(range(q))
    rng.shuffle(perm)
    for k in range(q):
        A[perm[k]][perm[(k + 1) % q]] = True
    for i in range(q):
        for j in range(q):
            if rng.random() < 0.5:
                A[i][j] = True
    if all(sum(row) == 1 for row in A):
        # a bare cycle has zero entropy; one self-loop makes it positive
        A[perm[0]][perm[0]] = True
    subshift = Subshift(q, tuple(tuple(r) for r in A), cap)
    slot = Fraction(1, 2 * q - 1)

    def into_slot(j):
        width = slot * Fraction(rng.randint(30, 57), 60)
        start = 2 * j * slot + (slot - width) * Fraction(rng.randint(0, 10), 10)
        if rng.random() < 0.3:
            return (-width, start + width)
        return (width, start)

    maps = [into_slot(j) for j in range(q)]
    edges = {(i, j): into_slot(j) for i, j in subshift.edges() if rng.random() < 0.6}
    return affine_markov_system(subshift, maps, edges, name=f"random-affine(q={q},seed={seed})")


def markov_interval_map_system(
    intervals: Sequence[tuple[Number, Number]],
    slopes: Sequence[Number],
    images: Optional[Sequence[tuple[Number, Number]]] = None,
    cap: int = DEFAULT_CYLINDER_CAP,
) -> GdmsSystem:
    """Inverse branches of a piecewise-linear Markov interval map.

    T is linear with slope ``slopes[k]`` on ``intervals[k]`` and maps it onto
    ``images[k]`` (default: the hull of all intervals, i.e. full branches).
    The transition ``k -> l`` is allowed when interval l lies in T(I_k).
    With X the hull, f_k maps X onto I_k and
    f_{k,l} = f_k^{-1} o T_k^{-1} o f_l, so cylinder ``k1...kn`` is
    ``T_k1^{-1} ... T_k(n-1)^{-1}(I_kn)``.
    """
    ivs = [(to_fraction(a), to_fraction(b)) for a, b in intervals]
    sl = [to_fraction(s) for s in slopes]
    if len(ivs) != len(sl) or not ivs:
        raise InvalidInput("need one slope per interval")
    for a, b in ivs:
        if not b > a:
            raise InvalidInput(f"degenerate interval [{a}, {b}]")
    order = sorted(ivs)
    for (a0, b0), (a1, b1) in zip(order, order[1:]):
        if b0 > a1:
            raise ConstraintViolation("open-set", "partition intervals overlap")
    x0, x1 = order[0][0], order[-1][1]
    hull = x1 - x0
    if images is None:
        imgs = [(x0, x1)] * len(ivs)
    else:
        imgs = [(to_fraction(c), to_fraction(d)) for c, d in images]
    q = len(ivs)
    for k, ((a, b), s, (c, d)) in enumerate(zip(ivs, sl, imgs)):
        if abs(s) <= 1:
            raise ConstraintViolation("contraction", f"branch {k} is not expanding (slope {s})")
        if abs(s) * (b - a) != d - c:
            raise InvalidInput(f"branch {k}: slope {s} does not map [{a}, {b}] onto [{c}, {d}]")
    A = [[False] * q for _ in range(q)]
    for k, (c, d) in enumerate(imgs):
        for l, (a, b) in enumerate(ivs):
            if c <= a and b <= d:
                A[k][l] = True
            elif a < d and c < b:
                raise ConstraintViolation("markov", f"T(I_{k}) cuts interval {l}")
    try:
        subshift = Subshift(q, tuple(tuple(r) for r in A), cap)
    except InvalidInput as exc:
        raise ConstraintViolation("transitivity", str(exc)) from None

    def onto(a, b, s):
        # X -> [a, b] preserving the orientation of the branch
        scale = (b - a) / hull
        return AffineMap(scale, a - scale * x0) if s > 0 else AffineMap(-scale, b + scale * x0)

    def t_inverse(k):
        (a, _), s, (c, d) = ivs[k], sl[k], imgs[k]
        start = c if s > 0 else d
        return AffineMap(1 / s, a - start / s)

    first = [onto(a, b, s) for (a, b), s in zip(ivs, sl)]
    edges = {}
    for i, j in subshift.edges():
        g = first[i].inverse().compose(t_inverse(i)).compose(first[j])
        edges[(i, j)] = (g.scale, g.offset)
    return affine_markov_system(
        subshift,
        [(f.scale, f.offset) for f in first],
        edges,
        space=Interval(x0, x1),
        name="interval-map",
    )


def julia_system(c, ring: Optional[tuple[float, float]] = None) -> GdmsSystem:
    """Inverse branches of z**2 + c on an annulus around the Julia set.

    The branch cut is the ray from c along the positive reals; it meets the
    annulus in a forward-invariant slit, so both branches stay continuous
    on the slit annulus. That only works for real c (complex conjugation
    symmetry keeps the cut invariant), and the annulus must map into itself,
    which forces |c| < 1/4 here. Other parameters are refused.
    """
    c = complex(c)
    if abs(c.imag) > 0:
        raise ConstraintViolation(
            "open-set", f"c={c}: branch of sqrt(z - c) is discontinuous on X for non-real c (cut not invariant)"
        )
    a = abs(c.real)
    if not a < 0.25:
        raise ConstraintViolation(
            "open-set", f"c={c.real}: no origin-centred annulus is mapped into itself by the inverse branches"
        )
    root = math.sqrt(1 - 4 * a)
    in_lo = max((1 - root) / 2, a + 0.25)
    in_hi = (1 + root) / 2
    out_lo = (1 + math.sqrt(1 + 4 * a)) / 2
    if ring is None:
        radii = abs(julia_samples(c, 12))
        r_min, r_max = float(radii.min()), float(radii.max())
        in_hi = min(in_hi, r_min)
        if not in_lo < in_hi:
            raise ConstraintViolation("contraction", f"c={c.real}: annulus too thin for contracting branches")
        r_in = max(in_lo + 0.5 * (in_hi - in_lo), in_hi - 0.1)
        r_out = max(out_lo, r_max) * 1.05
    else:
        r_in, r_out = ring
        if not (in_lo < r_in <= in_hi and r_out >= out_lo):
            raise ConstraintViolation("open-set", f"annulus {ring} is not mapped into itself")
    space = Annulus(r_in, r_out)
    sup_d = 0.5 / math.sqrt(r_in - a)
    inf_d = 0.5 / math.sqrt(r_out + a)
    lam1, lam2 = inf_d / 2, (sup_d + 1) / 2
    if not lam2 < 1:
        raise ConstraintViolation("contraction", "inverse branches are not contracting on X")
    numerics = JuliaNumerics(c, space)
    kappa, _ = numerics.kappa(6)
    maps = (JuliaBranch(c, 1), JuliaBranch(c, -1))
    subshift = Subshift.full(2)
    edges = {(i, j): maps[j] for i, j in subshift.edges()}
    return GdmsSystem(
        f"julia(c={c.real:g})",
        subshift,
        maps,
        edges,
        lam1,
        lam2,
        space,
        alpha=1.0,
        kappa=kappa,
        numeric=numerics,
    )
