"""Finite birelational Chellas models.

A model has finitely many worlds ``0..n-1``, an intuitionistic preorder,
a monotone valuation, and one accessibility relation per set of worlds.
Sets of worlds are bitmasks.  A relation is stored as a tuple holding
the successor mask of each world; sets without an entry have the empty
relation.
"""

from __future__ import annotations

import enum
import itertools
import json
import random
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from .formula import And, Atom, Bot, CondBox, CondDiam, Formula, Imp, Or, atoms, is_diamond_free


class Clause(enum.Enum):
    LOCAL = "local"
    GLOBAL = "global"


@dataclass(frozen=True)
class SatProfile:
    box: Clause
    diam: Optional[Clause]


WEISS_PROFILE = SatProfile(Clause.LOCAL, None)
OLKHOVIKOV_PROFILE = SatProfile(Clause.GLOBAL, Clause.LOCAL)
CCM_PROFILE = SatProfile(Clause.GLOBAL, Clause.GLOBAL)


class ModelClass(enum.Enum):
    BASIC = "basic"
    WEISS = "weiss"
    OLKHOVIKOV = "olkhovikov"
    CCM = "ccm"
    CCM_ID = "ccm_id"
    CCM_MP = "ccm_mp"
    CCM_MPID = "ccm_mpid"

    @property
    def conditions(self) -> tuple[str, ...]:
        return _CONDITIONS[self]

    @property
    def profile(self) -> SatProfile:
        if self is ModelClass.WEISS:
            return WEISS_PROFILE
        if self is ModelClass.OLKHOVIKOV:
            return OLKHOVIKOV_PROFILE
        return CCM_PROFILE

    @classmethod
    def parse(cls, text: str) -> "ModelClass":
        try:
            return cls(text.strip().lower().replace("-", "_"))
        except ValueError:
            names = ", ".join(c.value for c in cls)
            raise ValueError(f"unknown model class {text!r} (expected one of {names})") from None


_CONDITIONS = {
    ModelClass.BASIC: (),
    ModelClass.WEISS: ("LC",),
    ModelClass.OLKHOVIKOV: ("RC", "CR"),
    ModelClass.CCM: (),
    ModelClass.CCM_ID: ("id",),
    ModelClass.CCM_MP: ("mp",),
    ModelClass.CCM_MPID: ("id", "mp"),
}


def logic_class(logic) -> Optional[ModelClass]:
    """The model class characterising a logic, or None when there is none here."""
    from .sequent.calculus import LogicId

    return {
        LogicId.CONSTCKBOX: ModelClass.WEISS,
        LogicId.CONSTCK: ModelClass.CCM,
        LogicId.CCKID: ModelClass.CCM_ID,
        LogicId.CCKMP: ModelClass.CCM_MP,
        LogicId.CCKMPID: ModelClass.CCM_MPID,
        LogicId.INTCK: ModelClass.OLKHOVIKOV,
    }.get(LogicId(logic))


class ProfileError(ValueError):
    pass


class ModelFormatError(ValueError):
    pass


def _bits(mask: int) -> Iterator[int]:
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def _mask(worlds: Iterable[int]) -> int:
    m = 0
    for w in worlds:
        m |= 1 << w
    return m


@dataclass(frozen=True)
class Model:
    size: int
    up: tuple[int, ...]
    val: tuple[frozenset, ...]
    rel: tuple[tuple[int, tuple[int, ...]], ...] = ()
    _index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValueError("a model needs at least one world")
        if len(self.up) != self.size or len(self.val) != self.size:
            raise ValueError("preorder and valuation must cover every world")
        full = (1 << self.size) - 1
        index = {}
        for x, succ in self.rel:
            if x & ~full or len(succ) != self.size or any(s & ~full for s in succ):
                raise ValueError("relation mentions a world outside the model")
            index[x] = succ
        object.__setattr__(self, "rel", tuple(sorted((x, s) for x, s in index.items() if any(s))))
        object.__setattr__(self, "_index", {x: s for x, s in self.rel})

    @classmethod
    def build(
        cls,
        size: int,
        leq: Iterable[tuple[int, int]] = (),
        rel: Mapping[Iterable[int], Iterable[tuple[int, int]]] | Iterable = (),
        val: Mapping[int, Iterable[str]] = {},
    ) -> "Model":
        """Construct from pairs; the preorder gets its reflexive pairs added."""
        up = [1 << w for w in range(size)]
        for a, b in leq:
            up[a] |= 1 << b
        items = rel.items() if isinstance(rel, Mapping) else rel
        relations = []
        for x, pairs in items:
            succ = [0] * size
            for a, b in pairs:
                succ[a] |= 1 << b
            relations.append((_mask(x), tuple(succ)))
        vals = tuple(frozenset(val.get(w, ())) for w in range(size))
        return cls(size, tuple(up), vals, tuple(relations))

    @property
    def full(self) -> int:
        return (1 << self.size) - 1

    def successors(self, x: int) -> tuple[int, ...]:
        return self._index.get(x) or (0,) * self.size

    def leq_pairs(self) -> list[tuple[int, int]]:
        return [(a, b) for a in range(self.size) for b in _bits(self.up[a])]

    def relation_pairs(self, x: int) -> list[tuple[int, int]]:
        s = self.successors(x)
        return [(a, b) for a in range(self.size) for b in _bits(s[a])]

    # ------------------------------------------------------------- formats

    def to_text(self) -> str:
        lines = [f"worlds: {self.size}"]
        lines.append("leq: " + " ".join(f"({a},{b})" for a, b in self.leq_pairs() if a != b))
        for x, _ in self.rel:
            ws = ",".join(map(str, _bits(x)))
            pairs = " ".join(f"({a},{b})" for a, b in self.relation_pairs(x))
            lines.append(f"rel[{{{ws}}}]: {pairs}")
        for w in range(self.size):
            lines.append(f"val({w}): " + " ".join(sorted(self.val[w])))
        return "\n".join(line.rstrip() for line in lines) + "\n"

    def to_json(self) -> dict:
        return {
            "worlds": self.size,
            "leq": [[a, b] for a, b in self.leq_pairs()],
            "rel": [
                {"set": list(_bits(x)), "pairs": [[a, b] for a, b in self.relation_pairs(x)]}
                for x, _ in self.rel
            ],
            "val": [sorted(v) for v in self.val],
        }

    @classmethod
    def from_json(cls, obj) -> "Model":
        if isinstance(obj, str):
            obj = json.loads(obj)
        try:
            n = int(obj["worlds"])
            leq = [tuple(p) for p in obj.get("leq", [])]
            rel = [(tuple(r["set"]), [tuple(p) for p in r["pairs"]]) for r in obj.get("rel", [])]
            val = {w: atoms for w, atoms in enumerate(obj.get("val", []))}
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelFormatError(f"bad model JSON: {exc}") from None
        _check_worlds(n, leq, rel, val)
        return cls.build(n, leq, rel, val)


_PAIR = re.compile(r"\(\s*(\d+)\s*,\s*(\d+)\s*\)")
_LINE = re.compile(r"^(worlds|leq|rel\[\{([\d,\s]*)\}\]|val\((\d+)\))\s*:(.*)$")


def _pairs(text: str, lineno: int) -> list[tuple[int, int]]:
    found = _PAIR.findall(text)
    if _PAIR.sub("", text).strip():
        raise ModelFormatError(f"line {lineno}: expected pairs like (0,1)")
    return [(int(a), int(b)) for a, b in found]


def _check_worlds(n, leq, rel, val) -> None:
    if n < 1:
        raise ModelFormatError("worlds must be at least 1")
    ws = [w for p in leq for w in p]
    for x, pairs in rel:
        ws += list(x) + [w for p in pairs for w in p]
    ws += list(val)
    bad = [w for w in ws if not 0 <= int(w) < n]
    if bad:
        raise ModelFormatError(f"world {bad[0]} out of range")


def parse_model(text: str) -> Model:
    """Read the line format written by :meth:`Model.to_text`.

    Lines starting with ``#`` and blank lines are ignored.
    """
    n = None
    leq: list = []
    rel: list = []
    val: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _LINE.match(line)
        if not m:
            raise ModelFormatError(f"line {lineno}: cannot read {line!r}")
        head, body = m.group(1), m.group(4).strip()
        if head == "worlds":
            if not body.isdigit():
                raise ModelFormatError(f"line {lineno}: worlds needs a number")
            n = int(body)
        elif head == "leq":
            leq += _pairs(body, lineno)
        elif head.startswith("rel"):
            members = [int(t) for t in m.group(2).replace(",", " ").split()]
            rel.append((tuple(members), _pairs(body, lineno)))
        else:
            val[int(m.group(3))] = body.split()
    if n is None:
        raise ModelFormatError("missing 'worlds:' line")
    _check_worlds(n, leq, rel, val)
    return Model.build(n, leq, rel, val)


# ------------------------------------------------------------ frame checks


@dataclass(frozen=True)
class FrameReport:
    ok: bool
    condition: Optional[str] = None
    witness: Optional[tuple] = None

    def __bool__(self) -> bool:
        return self.ok


def _well_formed(m: Model) -> Optional[tuple[str, tuple]]:
    for w in range(m.size):
        if not m.up[w] >> w & 1:
            return "reflexive", (w,)
        for v in _bits(m.up[w]):
            if m.up[v] & ~m.up[w]:
                u = next(_bits(m.up[v] & ~m.up[w]))
                return "transitive", (w, v, u)
            if not m.val[w] <= m.val[v]:
                return "monotone", (w, v)
    return None


def _condition_witness(m: Model, cond: str, x: int, succ: Sequence[int]) -> Optional[tuple]:
    n, up = m.size, m.up
    down = [_mask(a for a in range(n) if up[a] >> b & 1) for b in range(n)]
    xs = frozenset(_bits(x))
    for w in range(n):
        if cond == "LC":
            for w2 in _bits(up[w]):
                for v in _bits(succ[w2]):
                    if not succ[w] & down[v]:
                        return (w, w2, v, xs)
        elif cond == "RC":
            for v in _bits(succ[w]):
                for v2 in _bits(up[v]):
                    if not any(succ[w2] >> v2 & 1 for w2 in _bits(up[w])):
                        return (w, v, v2, xs)
        elif cond == "CR":
            for w2 in _bits(up[w]):
                for v in _bits(succ[w]):
                    if not succ[w2] & up[v]:
                        return (w, w2, v, xs)
        elif cond == "id":
            if succ[w] & ~x:
                return (w, next(_bits(succ[w] & ~x)), xs)
        elif cond == "mp":
            if x >> w & 1 and not succ[w] >> w & 1:
                return (w, xs)
    return None


def check_frame(m: Model, cls: ModelClass) -> FrameReport:
    """Check well-formedness and the conditions of ``cls`` over every set of worlds.

    Witnesses: LC (w, w', v, X), RC (w, v, v', X), CR (w, w', v, X),
    id (w, v, X), mp (w, X).
    """
    bad = _well_formed(m)
    if bad:
        return FrameReport(False, *bad)
    conds = ModelClass(cls).conditions
    if not conds:
        return FrameReport(True)
    for x in range(1 << m.size):
        succ = m.successors(x)
        for cond in conds:
            wit = _condition_witness(m, cond, x, succ)
            if wit is not None:
                return FrameReport(False, cond, wit)
    return FrameReport(True)


# ------------------------------------------------------------ satisfaction


class _NeedRelation(Exception):
    def __init__(self, x: int):
        self.x = x


class _Evaluator:
    def __init__(self, m: Model, profile: SatProfile, lookup=None):
        self.m = m
        self.profile = profile
        self.lookup = lookup or m.successors
        self.memo: dict[Formula, int] = {}

    def ext(self, f: Formula) -> int:
        hit = self.memo.get(f)
        if hit is not None:
            return hit
        m = self.m
        full = m.full
        if isinstance(f, Atom):
            r = _mask(w for w in range(m.size) if f.name in m.val[w])
        elif isinstance(f, Bot):
            r = 0
        elif isinstance(f, And):
            r = self.ext(f.left) & self.ext(f.right)
        elif isinstance(f, Or):
            r = self.ext(f.left) | self.ext(f.right)
        elif isinstance(f, Imp):
            bad = self.ext(f.left) & ~self.ext(f.right) & full
            r = _mask(w for w in range(m.size) if not m.up[w] & bad)
        elif isinstance(f, CondBox):
            succ = self.lookup(self.ext(f.left))
            bad = ~self.ext(f.right) & full
            local = _mask(w for w in range(m.size) if not succ[w] & bad)
            r = local if self.profile.box is Clause.LOCAL else self._everywhere_above(local)
        elif isinstance(f, CondDiam):
            if self.profile.diam is None:
                raise ProfileError("this profile has no clause for might-conditionals")
            succ = self.lookup(self.ext(f.left))
            good = self.ext(f.right)
            local = _mask(w for w in range(m.size) if succ[w] & good)
            r = local if self.profile.diam is Clause.LOCAL else self._everywhere_above(local)
        else:
            raise TypeError(f"not a formula: {f!r}")
        self.memo[f] = r
        return r

    def _everywhere_above(self, mask: int) -> int:
        return _mask(w for w in range(self.m.size) if self.m.up[w] & ~mask == 0)


def _check_profile(f: Formula, profile: SatProfile) -> None:
    if profile.diam is None and not is_diamond_free(f):
        raise ProfileError("might-conditionals are not interpreted under this profile")


def truth_set(m: Model, f: Formula, profile: SatProfile = CCM_PROFILE) -> frozenset[int]:
    _check_profile(f, profile)
    return frozenset(_bits(_Evaluator(m, profile).ext(f)))


def satisfies(m: Model, w: int, f: Formula, profile: SatProfile = CCM_PROFILE) -> bool:
    if not 0 <= w < m.size:
        raise ValueError(f"no world {w}")
    _check_profile(f, profile)
    return bool(_Evaluator(m, profile).ext(f) >> w & 1)


def valid_in(m: Model, f: Formula, profile: SatProfile = CCM_PROFILE) -> bool:
    _check_profile(f, profile)
    return _Evaluator(m, profile).ext(f) == m.full


def hereditary_check(m: Model, profile: SatProfile, f: Formula) -> bool:
    _check_profile(f, profile)
    e = _Evaluator(m, profile).ext(f)
    return all(m.up[w] & ~e == 0 for w in _bits(e))


# ------------------------------------------------------------ generation


def _repair(size: int, up: list[int], val: list[set], rels: dict[int, list[int]], conds) -> bool:
    """Close under the class conditions by adding pairs; False if the cap is hit."""
    for w in range(size):
        for v in _bits(up[w]):
            val[v] |= val[w]
    cap = size * size * (1 << size)
    for x, succ in rels.items():
        for _ in range(cap + 1):
            changed = False
            for w in range(size):
                if "mp" in conds and x >> w & 1 and not succ[w] >> w & 1:
                    succ[w] |= 1 << w
                    changed = True
                for w2 in _bits(up[w]):
                    if "LC" in conds:
                        # w <= w2 R v needs w R v' <= v; take v' = v.
                        for v in _bits(succ[w2]):
                            if not any(succ[w] >> u & 1 and up[u] >> v & 1 for u in range(size)):
                                succ[w] |= 1 << v
                                changed = True
                    if "CR" in conds:
                        # w <= w2 and w R v need w2 R v' >= v; take v' = v.
                        for v in _bits(succ[w]):
                            if not succ[w2] & up[v]:
                                succ[w2] |= 1 << v
                                changed = True
                if "RC" in conds:
                    # w R v <= v2 needs w <= w2 R v2; take w2 = w.
                    for v in _bits(succ[w]):
                        for v2 in _bits(up[v]):
                            if not any(succ[u] >> v2 & 1 for u in _bits(up[w])):
                                succ[w] |= 1 << v2
                                changed = True
            if not changed:
                break
        else:
            return False
    return True


def repair_model(m: Model, cls: ModelClass) -> Model:
    """Close ``m`` into a model of ``cls`` by adding pairs and atoms only.

    The preorder is closed reflexively and transitively first.  (id) cannot
    be reached by adding pairs, so pairs leaving the selecting set are an
    error rather than something to repair.
    """
    conds = ModelClass(cls).conditions
    n = m.size
    up = list(m.up)
    for _ in range(n):
        for w in range(n):
            up[w] |= 1 << w
            for v in _bits(up[w]):
                up[w] |= up[v]
    val = [set(v) for v in m.val]
    rels = {x: list(m.successors(x)) for x in range(1 << n)}
    if "id" in conds:
        bad = _first(w for x, s in rels.items() for w in range(n) if s[w] & ~x)
        if bad is not None:
            raise ValueError("a relation leaves its selecting set; (id) cannot be repaired")
    if not _repair(n, up, val, rels, conds):
        raise RuntimeError("frame repair did not converge")  # pragma: no cover
    return Model(n, tuple(up), tuple(frozenset(v) for v in val), tuple((x, tuple(s)) for x, s in rels.items()))


def _first(it):
    return next(iter(it), None)


MAX_RANDOM_WORLDS = 8


def random_model(
    cls: ModelClass,
    max_worlds: int,
    seed: int,
    atoms: Sequence[str] = ("p", "q", "r"),
) -> Model:
    """A random model of ``cls`` with between 1 and ``max_worlds`` worlds.

    Every set of worlds gets its own random relation, then the preorder is
    closed, the valuation made monotone and the relations closed under the
    class conditions by adding pairs.  For (id) the random pairs are drawn
    inside the selecting set, which no later repair step leaves.
    """
    cls = ModelClass(cls)
    if max_worlds < 1:
        raise ValueError("max_worlds must be at least 1")
    if max_worlds > MAX_RANDOM_WORLDS:
        raise ValueError(f"max_worlds above {MAX_RANDOM_WORLDS} is not supported")
    rng = random.Random(seed)
    conds = cls.conditions
    for _ in range(100):
        n = rng.randint(1, max_worlds)
        up = [1 << w for w in range(n)]
        order = list(range(n))
        density = rng.random() * 0.6
        for a in range(n):
            for b in range(a + 1, n):
                if rng.random() < density:
                    up[order[a]] |= 1 << order[b]
        for _ in range(n):
            for w in range(n):
                for v in _bits(up[w]):
                    up[w] |= up[v]
        val = [{a for a in atoms if rng.random() < 0.35} for _ in range(n)]
        rels: dict[int, list[int]] = {}
        for x in range(1 << n):
            if rng.random() < 0.3:
                rels[x] = [0] * n
                continue
            target = x if "id" in conds else (1 << n) - 1
            p = rng.random() * 0.5
            rels[x] = [_mask(v for v in _bits(target) if rng.random() < p) for _ in range(n)]
        if _repair(n, up, val, rels, conds):
            m = Model(n, tuple(up), tuple(frozenset(v) for v in val), tuple((x, tuple(s)) for x, s in rels.items()))
            if check_frame(m, cls):
                return m
    raise RuntimeError("frame repair did not converge")  # pragma: no cover


# ------------------------------------------------------------ countermodels


def _orders(n: int) -> Iterator[list[int]]:
    """Partial orders on 0..n-1 that only go upwards in the numbering.

    Every finite partial order has such a labelling, so up to isomorphism
    nothing is missed.
    """
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    for chosen in itertools.product((False, True), repeat=len(pairs)):
        up = [1 << w for w in range(n)]
        for (a, b), on in zip(pairs, chosen):
            if on:
                up[a] |= 1 << b
        if all(up[v] & ~up[w] == 0 for w in range(n) for v in _bits(up[w])):
            yield up


def _up_sets(n: int, up: list[int]) -> list[int]:
    return [s for s in range(1 << n) if all(up[w] & ~s == 0 for w in _bits(s))]


def _candidates(n: int, up: list[int], x: int, conds) -> list[tuple[int, ...]]:
    full = (1 << n) - 1
    options = []
    for w in range(n):
        allowed = x if "id" in conds else full
        forced = (1 << w) if "mp" in conds and x >> w & 1 else 0
        options.append([s for s in range(1 << n) if s & ~allowed == 0 and s & forced == forced])
    out = []
    probe = Model(n, tuple(up), (frozenset(),) * n)
    checks = [c for c in conds if c in ("LC", "RC", "CR")]
    for succ in itertools.product(*options):
        if all(_condition_witness(probe, c, x, succ) is None for c in checks):
            out.append(succ)
    return out


def _complete(n: int, up: list[int], val, rels: dict[int, tuple], conds) -> Model:
    """Fill sets that were never queried with their least admissible relation."""
    full = dict(rels)
    if "mp" in conds:
        for x in range(1 << n):
            if x not in full:
                full[x] = tuple((1 << w) if x >> w & 1 else 0 for w in range(n))
    return Model(n, tuple(up), tuple(val), tuple(full.items()))


def find_countermodel(
    f: Formula,
    cls: ModelClass = ModelClass.CCM,
    profile: Optional[SatProfile] = None,
    max_worlds: int = 3,
) -> Optional[tuple[Model, int]]:
    """Exhaustive search for a model of ``cls`` with a world falsifying ``f``.

    Models are enumerated by size: partial orders numbered upwards, every
    monotone valuation of the atoms of ``f``, and for each set of worlds
    that turns up as the truth set of a conditional antecedent every
    relation meeting the class conditions.  All other sets keep their
    least admissible relation.  Preorders with distinct equivalent worlds
    are not enumerated.  None only means nothing was found in this space.
    """
    cls = ModelClass(cls)
    profile = profile or cls.profile
    _check_profile(f, profile)
    if max_worlds < 1:
        raise ValueError("max_worlds must be at least 1")
    conds = cls.conditions
    names = sorted(atoms(f))
    for n in range(1, max_worlds + 1):
        full = (1 << n) - 1
        for up in _orders(n):
            ups = _up_sets(n, up)
            cand_cache: dict[int, list] = {}
            for choice in itertools.product(ups, repeat=len(names)):
                val = [frozenset(a for a, s in zip(names, choice) if s >> w & 1) for w in range(n)]
                base = Model(n, tuple(up), tuple(val))
                found = _search_relations(f, base, profile, conds, {}, cand_cache)
                if found is not None:
                    rels, e = found
                    w = next(_bits(full & ~e))
                    return _complete(n, up, val, rels, conds), w
    return None


def _search_relations(f, base: Model, profile, conds, rels: dict, cache: dict):
    n = base.size

    def lookup(x: int):
        if x in rels:
            return rels[x]
        raise _NeedRelation(x)

    try:
        e = _Evaluator(base, profile, lookup).ext(f)
    except _NeedRelation as need:
        x = need.x
        if x not in cache:
            cache[x] = _candidates(n, list(base.up), x, conds)
        for succ in cache[x]:
            rels[x] = succ
            r = _search_relations(f, base, profile, conds, rels, cache)
            if r is not None:
                return r
        del rels[x]
        return None
    if e != base.full:
        return dict(rels), e
    return None
