"""Finite cohomology model of a fibered surface.

A model is a graded super-commutative algebra H = H^0 ⊕ ... ⊕ H^4 with a
two-step extra grading k ∈ {0,1,2} on each piece, a canonical class K in
degree 2, and a forgetful map ι from the compactly-supported side H_c into
H.  H_c is not independent data: it is the graded dual of H (basis β^i dual
to the model basis β_i, with deg β^i = 4 - deg β_i and k'(β^i) = 2 - k(β_i)),
and its H-module structure is derived by adjointness against the cup product.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

from .errors import ModelError
from .exact import ONE, Matrix, SparseVec, rat, rat_str

TOP_DEGREE = 4
G_LENGTH = 2


@dataclass(frozen=True)
class BasisClass:
    id: int
    label: str
    d: int
    k: int

    @property
    def parity(self) -> int:
        return self.d % 2


@dataclass(frozen=True)
class CompactClass:
    """Element of H_c in the dual basis: index i carries the functional dual to β_i."""

    coords: SparseVec

    def is_zero(self) -> bool:
        return self.coords.is_zero()

    def scale(self, c) -> "CompactClass":
        return CompactClass(self.coords.scale(c))

    def __add__(self, other: "CompactClass") -> "CompactClass":
        return CompactClass(self.coords + other.coords)


class SurfaceModel:
    """Immutable-after-construction surface cohomology model with internal caches."""

    def __init__(
        self,
        basis: list[BasisClass],
        cup: dict[tuple[int, int], SparseVec],
        K: SparseVec | None = None,
        iota: Matrix | None = None,
        name: str | None = None,
    ):
        self.name = name
        self.basis = list(basis)
        dim = len(self.basis)
        for pos, b in enumerate(self.basis):
            if b.id != pos:
                raise ModelError(f"basis ids must be consecutive from 0; got {b.id} at {pos}")
        self.K = K if K is not None else SparseVec()
        for i in self.K.support():
            if i >= dim:
                raise ModelError(f"K coordinate index {i} out of range")
            if self.basis[i].d != 2:
                raise ModelError(f"K must be supported in degree 2; class {i} has d={self.basis[i].d}")
        self.iota = iota if iota is not None else Matrix.zero(dim, dim)
        if self.iota.ncols != dim or self.iota.nrows != dim:
            raise ModelError("iota matrix must be square of the basis dimension")
        units = [b.id for b in self.basis if b.d == 0]
        self._unit = units[0] if units else None
        # full structure-constant table; file data carries i <= j only, the
        # rest is derived by super-commutativity, missing unit rows by the
        # unit law, everything else defaults to zero
        self._cup: dict[tuple[int, int], SparseVec] = {}
        for (i, j), v in cup.items():
            if not (0 <= i < dim and 0 <= j < dim):
                raise ModelError(f"cup indices ({i},{j}) out of range")
            for m in v.support():
                if m >= dim:
                    raise ModelError(f"cup({i},{j}) target index {m} out of range")
            if i > j:
                raise ModelError(f"cup entries must be stored with i <= j; got ({i},{j})")
        for i in range(dim):
            for j in range(i, dim):
                if (i, j) in cup:
                    v = cup[(i, j)]
                elif self._unit is not None and i == self._unit:
                    v = SparseVec.unit(j)
                elif self._unit is not None and j == self._unit:
                    v = SparseVec.unit(i)
                else:
                    v = SparseVec()
                self._cup[(i, j)] = v
                if i != j:
                    sign = -ONE if (self.basis[i].parity and self.basis[j].parity) else ONE
                    self._cup[(j, i)] = v.scale(sign)
        self._caches: dict = {}
        self._strong_mult: bool | None = None

    # ---- basic structure ----

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def unit_index(self) -> int:
        if self._unit is None:
            raise ModelError("model has no degree-0 class")
        return self._unit

    def cls(self, i: int) -> BasisClass:
        return self.basis[i]

    def parity(self, i: int) -> int:
        return self.basis[i].parity

    def by_label(self, label: str) -> BasisClass:
        for b in self.basis:
            if b.label == label:
                return b
        raise ModelError(f"unknown class label {label!r}")

    def basis_vec(self, i: int) -> SparseVec:
        return SparseVec.unit(i)

    def unit_vec(self) -> SparseVec:
        return SparseVec.unit(self.unit_index)

    def classes_of_degree(self, d: int) -> list[BasisClass]:
        return [b for b in self.basis if b.d == d]

    def cache(self, kind: str) -> dict:
        return self._caches.setdefault(kind, {})

    # ---- degree bookkeeping ----

    def coh_degrees(self, v: SparseVec) -> set[int]:
        return {self.basis[i].d for i in v.entries}

    def g_degrees(self, v: SparseVec) -> set[int]:
        return {self.basis[i].k for i in v.entries}

    def degree_of(self, v: SparseVec) -> int | None:
        ds = self.coh_degrees(v)
        return ds.pop() if len(ds) == 1 else None

    def g_of(self, v: SparseVec) -> int | None:
        ks = self.g_degrees(v)
        return ks.pop() if len(ks) == 1 else None

    def parity_of(self, v: SparseVec) -> int | None:
        ps = {self.basis[i].parity for i in v.entries}
        return ps.pop() if len(ps) == 1 else None

    def dual_degree(self, i: int) -> int:
        return TOP_DEGREE - self.basis[i].d

    def dual_g(self, i: int) -> int:
        return G_LENGTH - self.basis[i].k

    def compact_degrees(self, xi: CompactClass) -> set[int]:
        return {self.dual_degree(i) for i in xi.coords.entries}

    def compact_g_degrees(self, xi: CompactClass) -> set[int]:
        return {self.dual_g(i) for i in xi.coords.entries}

    def K_g(self) -> int | None:
        """G-degree of the canonical class; None when K = 0."""
        if self.K.is_zero():
            return None
        return self.g_of(self.K)

    def K_in_g1(self) -> bool:
        """True when K is zero or pure of G-degree <= 1."""
        g = self.K_g()
        return g is None or g <= 1

    # ---- products and pairings ----

    def cup_basis(self, i: int, j: int) -> SparseVec:
        return self._cup[(i, j)]

    def cup(self, a: SparseVec, b: SparseVec) -> SparseVec:
        out = SparseVec()
        for i, ca in a.entries.items():
            for j, cb in b.entries.items():
                out.iadd_scaled(self._cup[(i, j)], ca * cb)
        return out

    def pair(self, a: SparseVec, xi: CompactClass) -> rat:
        """Poincaré pairing in the written order ∫ a·ξ; pair(β_i, β^j) = δ_ij."""
        return a.dot(xi.coords)

    def pair_cf(self, xi: CompactClass, a: SparseVec) -> rat:
        """The compact-first pairing ∫ ξ·a = (-1)^{|ξ||a|} ∫ a·ξ, componentwise."""
        total = rat(0)
        for i, c in xi.coords.entries.items():
            ai = a.get(i)
            if ai:
                term = ai * c
                total += -term if self.basis[i].parity else term
        return total

    def integral(self, xi: CompactClass) -> rat:
        """Evaluation of the degree-4 part of ξ against the unit."""
        return xi.coords.get(self.unit_index)

    def module_mul(self, a: SparseVec, xi: CompactClass) -> CompactClass:
        """The product a·ξ ∈ H_c, characterized by ∫ b·(a·ξ) = ∫ (b·a)·ξ for all b."""
        out = SparseVec()
        for j in range(self.dim):
            c = self.pair(self.cup(SparseVec.unit(j), a), xi)
            if c:
                out.add_entry(j, c)
        return CompactClass(out)

    def compact_mul(self, xi: CompactClass, a: SparseVec) -> CompactClass:
        """The product ξ·a ∈ H_c in the compact-first order (Koszul-twisted module action)."""
        out = SparseVec()
        for p_xi in (0, 1):
            part_xi = CompactClass(
                SparseVec({i: c for i, c in xi.coords.entries.items() if self.basis[i].parity == p_xi})
            )
            if part_xi.is_zero():
                continue
            for p_a in (0, 1):
                part_a = SparseVec(
                    {i: c for i, c in a.entries.items() if self.basis[i].parity == p_a}
                )
                if part_a.is_zero():
                    continue
                term = self.module_mul(part_a, part_xi)
                out.iadd_scaled(term.coords, -ONE if (p_xi and p_a) else ONE)
        return CompactClass(out)

    def iota_apply(self, xi: CompactClass) -> SparseVec:
        return self.iota.apply(xi.coords)

    def dual_basis(self) -> list[tuple[BasisClass, CompactClass]]:
        return [(b, CompactClass(SparseVec.unit(b.id))) for b in self.basis]

    # ---- strong multiplicativity ----

    @property
    def strongly_multiplicative(self) -> bool:
        if self._strong_mult is None:
            ok = True
            for i in range(self.dim):
                for j in range(self.dim):
                    v = self._cup[(i, j)]
                    want = self.basis[i].k + self.basis[j].k
                    if any(self.basis[m].k != want for m in v.entries):
                        ok = False
                        break
                if not ok:
                    break
            self._strong_mult = ok
        return self._strong_mult

    # ---- serialization ----

    def to_json_dict(self) -> dict:
        cup_rows = []
        for i in range(self.dim):
            for j in range(i, self.dim):
                v = self._cup[(i, j)]
                if not v.is_zero():
                    cup_rows.append(
                        {
                            "i": i,
                            "j": j,
                            "terms": [{"m": m, "coeff": rat_str(c)} for m, c in v.items_sorted()],
                        }
                    )
        iota_rows = []
        for i in range(self.dim):
            col = self.iota.column(i)
            if not col.is_zero():
                iota_rows.append(
                    {
                        "from_dual_of": i,
                        "terms": [{"m": m, "coeff": rat_str(c)} for m, c in col.items_sorted()],
                    }
                )
        out = {
            "basis": [{"label": b.label, "d": b.d, "k": b.k} for b in self.basis],
            "cup": cup_rows,
            "K": [{"m": m, "coeff": rat_str(c)} for m, c in self.K.items_sorted()],
            "iota": iota_rows,
        }
        if self.name:
            out["name"] = self.name
        return out

    @classmethod
    def from_json_dict(cls, data: dict) -> "SurfaceModel":
        try:
            basis = [
                BasisClass(i, str(b["label"]), int(b["d"]), int(b["k"]))
                for i, b in enumerate(data["basis"])
            ]
            cup = {}
            for row in data.get("cup", []):
                v = SparseVec()
                for t in row["terms"]:
                    v.add_entry(int(t["m"]), rat(t["coeff"]))
                cup[(int(row["i"]), int(row["j"]))] = v
            K = SparseVec()
            for t in data.get("K", []):
                K.add_entry(int(t["m"]), rat(t["coeff"]))
            dim = len(basis)
            iota = Matrix.zero(dim, dim)
            for row in data.get("iota", []):
                i = int(row["from_dual_of"])
                if i >= dim:
                    raise ModelError(f"iota dual index {i} out of range")
                for t in row["terms"]:
                    iota.cols[i].add_entry(int(t["m"]), rat(t["coeff"]))
        except (KeyError, TypeError, ValueError) as e:
            raise ModelError(f"malformed model document: {e}") from e
        return cls(basis, cup, K, iota, name=data.get("name"))

    @classmethod
    def load(cls, path) -> "SurfaceModel":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json_dict(json.load(fh))

    def dump(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(self.to_json_dict(), sort_keys=True, separators=(",", ":")))
            fh.write("\n")


# ---- validation ----


@dataclass
class CheckResult:
    name: str
    ok: bool
    witnesses: list = field(default_factory=list)


@dataclass
class ValidationReport:
    checks: list[CheckResult]
    strongly_multiplicative: bool

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def check(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json_dict(self) -> dict:
        return {
            "ok": self.ok,
            "strongly_multiplicative_G": self.strongly_multiplicative,
            "checks": [
                {"name": c.name, "ok": c.ok, "witnesses": c.witnesses} for c in self.checks
            ],
        }

    def to_text(self) -> str:
        lines = []
        for c in self.checks:
            lines.append(f"[{'ok' if c.ok else 'FAIL'}] {c.name}")
            for w in c.witnesses[:5]:
                lines.append(f"       witness: {w}")
        lines.append(f"strongly_multiplicative_G: {self.strongly_multiplicative}")
        lines.append("valid" if self.ok else "INVALID")
        return "\n".join(lines)


def validate_model(m: SurfaceModel, witness_cap: int = 25) -> ValidationReport:
    """Check every structural invariant, each failure with a concrete witness."""
    checks: list[CheckResult] = []

    def add(name):
        c = CheckResult(name, True)
        checks.append(c)
        return c

    def fail(c, witness):
        c.ok = False
        if len(c.witnesses) < witness_cap:
            c.witnesses.append(witness)

    lbl = lambda i: m.basis[i].label

    c = add("unit: single degree-0 class with k = 0")
    units = m.classes_of_degree(0)
    if len(units) != 1:
        fail(c, {"degree0_classes": [b.label for b in units]})
    elif units[0].k != 0:
        fail(c, {"unit": units[0].label, "k": units[0].k})

    c = add("basis degrees in range")
    for b in m.basis:
        if not (0 <= b.d <= TOP_DEGREE) or not (0 <= b.k <= G_LENGTH):
            fail(c, {"class": b.label, "d": b.d, "k": b.k})

    c = add("super-commutativity")
    for i in range(m.dim):
        for j in range(i, m.dim):
            sign = -ONE if (m.parity(i) and m.parity(j)) else ONE
            if m.cup_basis(j, i) != m.cup_basis(i, j).scale(sign):
                fail(c, {"pair": (lbl(i), lbl(j))})

    c = add("cup degree additivity")
    for i in range(m.dim):
        for j in range(m.dim):
            want = m.basis[i].d + m.basis[j].d
            for t in m.cup_basis(i, j).support():
                if m.basis[t].d != want:
                    fail(c, {"pair": (lbl(i), lbl(j)), "term": lbl(t), "d": m.basis[t].d, "expected": want})

    c = add("unit law")
    if units and len(units) == 1:
        u = units[0].id
        for j in range(m.dim):
            if m.cup_basis(u, j) != SparseVec.unit(j) or m.cup_basis(j, u) != SparseVec.unit(j):
                fail(c, {"class": lbl(j)})

    c = add("associativity on basis triples")
    for i in range(m.dim):
        for j in range(m.dim):
            ij = m.cup_basis(i, j)
            for k in range(m.dim):
                left = m.cup(ij, SparseVec.unit(k))
                right = m.cup(SparseVec.unit(i), m.cup_basis(j, k))
                if left != right:
                    fail(c, {"triple": (lbl(i), lbl(j), lbl(k))})

    c = add("K supported in degree 2")
    for i in m.K.support():
        if m.basis[i].d != 2:
            fail(c, {"class": lbl(i), "d": m.basis[i].d})

    c = add("iota degree and G compatibility")
    for i in range(m.dim):
        img = m.iota.column(i)
        for t in img.support():
            if m.basis[t].d != m.dual_degree(i):
                fail(c, {"dual_of": lbl(i), "term": lbl(t), "d": m.basis[t].d, "expected": m.dual_degree(i)})
            if m.basis[t].k != m.dual_g(i):
                fail(c, {"dual_of": lbl(i), "term": lbl(t), "k": m.basis[t].k, "expected": m.dual_g(i)})

    c = add("iota is a module map")
    for a in range(m.dim):
        av = SparseVec.unit(a)
        for i in range(m.dim):
            xi = CompactClass(SparseVec.unit(i))
            left = m.iota_apply(m.module_mul(av, xi))
            right = m.cup(av, m.iota_apply(xi))
            if left != right:
                fail(c, {"a": lbl(a), "dual_of": lbl(i)})

    return ValidationReport(checks=checks, strongly_multiplicative=m.strongly_multiplicative)


# ---- bundled fixtures ----


def fixture_path(name: str):
    return resources.files("hilbfock.fixtures").joinpath(name)


def fixture_model(name: str) -> SurfaceModel:
    """Load a bundled model by short name ('M_E' or 'M_2')."""
    with resources.files("hilbfock.fixtures").joinpath(f"{name}.json").open("r") as fh:
        return SurfaceModel.from_json_dict(json.load(fh))
