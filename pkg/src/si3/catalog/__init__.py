"""The catalog of nondegenerate systems and separable-coordinate conditions.

Data lives in a versioned plain-text file (``data/catalog.txt``) written in the
expression grammar.  ``SI3_CATALOG`` points the loader at another file.
"""
from __future__ import annotations

import configparser
import os
import re
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

from ..algebra import Poly, RatFn, parse_expr
from ..mechanics import KillingTensor, Symmetry, bd_residuals, reconstruct_w

DATA_FILE = Path(__file__).with_name("data") / "catalog.txt"
SUPPORTED_VERSIONS = (3,)

# derivative slots used by the condition sets: name -> multi-index
SLOTS = {
    "V": (0, 0, 0),
    "Vx": (1, 0, 0), "Vy": (0, 1, 0), "Vz": (0, 0, 1),
    "Vxx": (2, 0, 0), "Vyy": (0, 2, 0), "Vzz": (0, 0, 2),
    "Vxy": (1, 1, 0), "Vxz": (1, 0, 1), "Vyz": (0, 1, 1),
}


class UnknownSystem(KeyError):
    pass


class CatalogError(ValueError):
    pass


@dataclass
class SystemRecord:
    name: str
    label: str
    potential: RatFn
    tensors: list
    sources: list
    sum_x2: RatFn
    table_x: list
    table_y: list
    d_x: int
    d_y: int
    expected_invariants: tuple
    separability: frozenset
    variants: tuple = ()
    also_separates: frozenset = frozenset()
    protocol_scale: tuple | None = None     # (parameter, momentum) scales for random draws
    _syms: list | None = field(default=None, repr=False)

    @property
    def symmetry_basis(self):
        """The six basis symmetries, scalar parts reconstructed on first use."""
        if self._syms is None:
            self._syms = [Symmetry(t, reconstruct_w(t, self.potential), src)
                          for t, src in zip(self.tensors, self.sources)]
        return self._syms


@dataclass
class Variant:
    name: str
    system: str
    potential: RatFn
    map_kind: str
    map_data: object


@dataclass
class PDEConditionSet:
    name: str
    conditions: list          # list of {slot: RatFn}
    tensors: list = field(default_factory=list)
    printed: list = field(default_factory=list)


@dataclass
class Erratum:
    key: str
    where: str
    printed: str
    resolution: str


@dataclass
class Catalog:
    version: int
    systems: dict
    variants: dict
    families: dict
    errata: list
    path: str


# -- loading -------------------------------------------------------------------

def _expander(macros):
    def expand(text):
        for _ in range(8):
            new = re.sub(r"\b[A-Z][A-Z0-9]*\b",
                         lambda m: f"({macros[m.group(0)]})" if m.group(0) in macros else m.group(0),
                         text)
            if new == text:
                return new
            text = new
        raise CatalogError("macro expansion does not terminate")
    return expand


def _parse(expand, text, where):
    try:
        return parse_expr(expand(text))
    except ValueError as e:
        raise CatalogError(f"{where}: {e}") from None


def _split(text, sep=";"):
    return [s.strip() for s in text.split(sep) if s.strip()]


def _condition(expand, text, where):
    out = {}
    for piece in _split(text, "|"):
        slot, _, coef = piece.partition(":")
        slot = slot.strip()
        if slot not in SLOTS:
            raise CatalogError(f"{where}: unknown slot {slot!r}")
        out[slot] = _parse(expand, coef, where)
    return out


def _numbered(sec, prefix):
    keys = [k for k in sec if re.fullmatch(prefix + r"\d+", k)]
    return [sec[k] for k in sorted(keys, key=lambda k: int(k[len(prefix):]))]


def _pattern(text):
    marks = text.split()
    if len(marks) != 6 or any(m not in ("0", "-") for m in marks):
        raise CatalogError(f"invariant pattern must be six of 0/-: {text!r}")
    return tuple(m == "0" for m in marks)


def load_catalog(path=None) -> Catalog:
    path = Path(path or os.environ.get("SI3_CATALOG") or DATA_FILE)
    return _load(str(path.resolve()))


@lru_cache(maxsize=4)
def _load(path):
    cp = configparser.ConfigParser(interpolation=None, comment_prefixes=("#",),
                                   inline_comment_prefixes=None)
    cp.optionxform = str
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except OSError as e:
        raise CatalogError(f"cannot read catalog {path}: {e}") from None
    head = cp["catalog"]
    version = int(head["version"])
    if version not in SUPPORTED_VERSIONS:
        raise CatalogError(f"unsupported catalog version {version}")
    expand = _expander(dict(cp["macros"]) if cp.has_section("macros") else {})

    systems, variants, families, errata = {}, {}, {}, []
    for name in head["systems"].split():
        sec = cp[f"system {name}"]
        where = f"system {name}"
        srcs = _numbered(sec, "sym")
        tensors = [KillingTensor.from_quadratic(_parse(expand, s, where)) for s in srcs]
        systems[name] = SystemRecord(
            name=name,
            label=sec.get("label", ""),
            potential=_parse(expand, sec["potential"], where),
            tensors=tensors,
            sources=srcs,
            sum_x2=_parse(expand, sec["sum_x2"], where),
            table_x=[_parse(expand, s, where) for s in _split(sec["table_x"])],
            table_y=[_parse(expand, s, where) for s in _split(sec["table_y"])],
            d_x=int(sec["d_x"]),
            d_y=int(sec["d_y"]),
            expected_invariants=_pattern(sec["invariants"]),
            separability=frozenset(sec.get("separates", "").split()),
            variants=tuple(sec.get("variants", "").split()),
            also_separates=frozenset(sec.get("also_separates", "").split()),
            protocol_scale=tuple(float(v) for v in sec["protocol_scale"].split())
            if "protocol_scale" in sec else None,
        )
    for sname in cp.sections():
        if sname.startswith("variant "):
            sec = cp[sname]
            name = sname.split(None, 1)[1]
            kind, data = _map(expand, sec["map"], sname)
            variants[name] = Variant(name, sec["system"], _parse(expand, sec["potential"], sname),
                                     kind, data)
        elif sname.startswith("erratum "):
            sec = cp[sname]
            errata.append(Erratum(sname.split(None, 1)[1], sec["where"], sec["printed"],
                                  sec["resolution"]))
    for name in head["families"].split():
        sec = cp[f"family {name}"]
        where = f"family {name}"
        families[name] = PDEConditionSet(
            name=name,
            conditions=[_condition(expand, c, where) for c in _numbered(sec, "cond")],
            tensors=[KillingTensor.from_quadratic(_parse(expand, t, where))
                     for t in _numbered(sec, "tensor")],
            printed=[_condition(expand, c, where) for c in _numbered(sec, "printed")],
        )
    return Catalog(version, systems, variants, families, errata, path)


def _map(expand, text, where):
    text = text.strip()
    if text.startswith("complex-xy-reflection"):
        # x + i*y -> t*(x - i*y), x - i*y -> (x + i*y)/t, for a complex number t
        spec = text.split(None, 1)[1]
        base, _, root = spec.partition("^(1/3)*")
        t = complex(float(base) ** (1 / 3)) * (1j if root.strip() == "i" else 1)
        return "reflection", t
    return "linear", [_parse(expand, s, where) for s in _split(text)]


def get_system(name, catalog=None) -> SystemRecord:
    cat = catalog or load_catalog()
    try:
        return cat.systems[name]
    except KeyError:
        raise UnknownSystem(name) from None


def system_names(catalog=None):
    return list((catalog or load_catalog()).systems)


# -- separable-coordinate conditions ---------------------------------------------

class _Jet:
    """Memoized partial derivatives of one potential."""

    def __init__(self, V):
        self.V = RatFn.coerce(V)
        self.memo = {(0, 0, 0): self.V}

    def __call__(self, m):
        if m not in self.memo:
            v = next(k for k in range(3) if m[k])
            lower = list(m)
            lower[v] -= 1
            self.memo[m] = self(tuple(lower)).diff(v)
        return self.memo[m]


def apply_condition(cond, V):
    jet = V if isinstance(V, _Jet) else _Jet(V)
    out = RatFn(Poly())
    for slot, coef in cond.items():
        out = out + coef * jet(SLOTS[slot])
    return out


def check_pde(V, fam: PDEConditionSet) -> bool:
    """True iff every condition of the family vanishes identically for V."""
    jet = _Jet(V)
    if not all(apply_condition(c, jet).is_zero() for c in fam.conditions):
        return False
    return all(r.is_zero() for t in fam.tensors for r in bd_residuals(t, jet.V))


def separability_matrix(catalog=None, include_variants=True):
    """{system: {family: bool}}; a system counts when its stored potential or
    one of its orientation variants satisfies the family's conditions."""
    cat = catalog or load_catalog()
    out = {}
    for name, rec in cat.systems.items():
        pots = [rec.potential]
        if include_variants:
            pots += [cat.variants[v].potential for v in rec.variants]
        out[name] = {f: any(check_pde(V, fam) for V in pots) for f, fam in cat.families.items()}
    return out


def empty_families(matrix):
    fams = next(iter(matrix.values())).keys() if matrix else ()
    return [f for f in fams if not any(row[f] for row in matrix.values())]


# -- orientation variants ----------------------------------------------------------

def _components(V):
    from ..mechanics import split_parameters
    parts = split_parameters(V)
    return [parts.get(p) for p in (6, 7, 8, 9)]


def variant_equivalent(var: Variant, catalog=None, samples=12, seed=1):
    """Whether the variant's parameter components span the same space as the
    system's components pulled back through the stated map.

    Linear maps with field coefficients are checked exactly; the complex
    reflection is checked by least squares at sample points.
    """
    import numpy as np

    cat = catalog or load_catalog()
    base = cat.systems[var.system].potential
    if var.map_kind == "linear":
        X, Y, Z = var.map_data
        pulled = base.subs({0: X.to_poly(), 1: Y.to_poly(), 2: Z.to_poly()})
        from ..algebra.linalg import rank
        from ..algebra.ratfn import common_denominator
        a, b = _components(pulled), _components(var.potential)
        if any(c is None for c in a + b):
            return False
        _, nums = common_denominator(a + b)
        return rank(nums) == 4 and rank(nums[:4]) == 4 and rank(nums[4:]) == 4
    t = var.map_data
    rng = np.random.default_rng(seed)
    fa = [c.eval_complex for c in _components(base)]
    fb = [c.eval_complex for c in _components(var.potential)]
    rows_a, rows_b = [], []
    for _ in range(samples):
        x, y, z = rng.uniform(0.5, 1.5, 3) + 1j * rng.uniform(-0.5, 0.5, 3)
        w, wb = x + 1j * y, x - 1j * y
        w2, wb2 = t * wb, w / t
        X, Y = (w2 + wb2) / 2, (w2 - wb2) / 2j
        rows_a.append([f([X, Y, z]) for f in fa])
        rows_b.append([f([x, y, z]) for f in fb])
    A, B = np.array(rows_a), np.array(rows_b)
    coef, *_ = np.linalg.lstsq(B, A, rcond=None)
    resid = np.linalg.norm(B @ coef - A) / max(1.0, np.linalg.norm(A))
    return bool(resid < 1e-9 and np.linalg.matrix_rank(coef, tol=1e-9) == 4)


__all__ = [
    "Catalog", "CatalogError", "Erratum", "PDEConditionSet", "SystemRecord", "UnknownSystem",
    "Variant", "apply_condition", "check_pde", "empty_families", "get_system",
    "load_catalog", "separability_matrix", "system_names", "variant_equivalent",
]
