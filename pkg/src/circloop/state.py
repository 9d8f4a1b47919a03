"""Mutable supplier binding with its LCA memo and bitset table."""

from __future__ import annotations

import numpy as np

from .bitsets import BitsetTable, bitset_values
from .economy import Economy
from .lca import TOL, lca_table


class AuditError(AssertionError):
    pass


class Configuration:
    """Chosen supplier for every input slot of an economy.

    ``chosen`` is indexed by global slot (see ``Economy.slot_offsets``).

    LCA rows are memoized per product. A move patches its owner's row and
    marks every transitive user dirty; dirty rows are recomputed from their
    suppliers the next time they are read. Invariant: the users of a dirty
    product are dirty too, so marking can stop at the first dirty user.

    While moves are outstanding, every memo write is journaled as
    ``(product, old row, was dirty)`` so undo can roll the memo back exactly.

    A configuration has a single writer; give each search worker its own
    ``copy()``.
    """

    def __init__(self, economy: Economy, audit: bool = False):
        self.economy = economy
        self.chosen: list[int] = list(economy.slot_default)
        self.users: list[set[int]] = [set() for _ in economy.products]
        # user_owners[p][a]: how many slots of product a are bound to p.
        self.user_owners: list[dict[int, int]] = [{} for _ in economy.products]
        owner = economy.slot_owner
        for g, s in enumerate(self.chosen):
            self.users[s].add(g)
            self.user_owners[s][owner[g]] = self.user_owners[s].get(owner[g], 0) + 1
        self.version = 0
        self.lca_rows = lca_table(economy, self.chosen)
        self.dirty: set[int] = set()
        self.journal: list[tuple[int, np.ndarray, bool]] = []
        self.bitsets = BitsetTable(self)
        self.undo_stack: list = []
        self.audit_enabled = audit

    def copy(self) -> Configuration:
        """Independent clone with the same binding and caches (empty undo stack)."""
        other = object.__new__(Configuration)
        other.economy = self.economy
        other.chosen = list(self.chosen)
        other.users = [set(u) for u in self.users]
        other.user_owners = [dict(u) for u in self.user_owners]
        other.version = self.version
        other.lca_rows = self.lca_rows.copy()
        other.dirty = set(self.dirty)
        other.journal = []
        other.bitsets = object.__new__(BitsetTable)
        other.bitsets.config = other
        other.bitsets.bits = list(self.bitsets.bits)
        other.bitsets.version = self.bitsets.version
        other.undo_stack = []
        other.audit_enabled = self.audit_enabled
        return other

    def commit(self) -> None:
        """Make the applied moves permanent: drop undo tokens and the memo journal."""
        self.undo_stack.clear()
        self.journal.clear()

    def rebind(self, g: int, old: int, new: int) -> None:
        """Point global slot ``g`` from supplier ``old`` to ``new`` (reverse indexes only)."""
        self.chosen[g] = new
        self.users[old].discard(g)
        self.users[new].add(g)
        a = self.economy.slot_owner[g]
        counts = self.user_owners[old]
        if counts[a] == 1:
            del counts[a]
        else:
            counts[a] -= 1
        counts = self.user_owners[new]
        counts[a] = counts.get(a, 0) + 1

    def supplier(self, product_id: int, slot_index: int) -> int:
        return self.chosen[self.economy.global_slot(product_id, slot_index)]

    def chosen_map(self) -> dict[tuple[int, int], int]:
        owner = self.economy.slot_owner
        off = self.economy.slot_offsets
        return {(owner[g], g - off[owner[g]]): s for g, s in enumerate(self.chosen)}

    def _recompute(self, rows: np.ndarray, p: int) -> None:
        econ = self.economy
        qty = econ.slot_quantity
        chosen = self.chosen
        acc = np.zeros(econ.n_indicators)
        for g in range(econ.slot_offsets[p], econ.slot_offsets[p + 1]):
            acc += qty[g] * rows[chosen[g]]
        overhead = econ.products[p].direct_overhead
        acc[0] += overhead[0]
        acc[1] += overhead[1]
        rows[p] = acc

    def lca(self, product_id: int) -> np.ndarray:
        """Up-to-date LCA row of a product (a view into the memo)."""
        if product_id in self.dirty:
            self.refresh(product_id)
        return self.lca_rows[product_id]

    def refresh(self, product_id: int) -> None:
        """Recompute the dirty part of ``product_id``'s supplier closure."""
        dirty = self.dirty
        off = self.economy.slot_offsets
        chosen = self.chosen
        todo = []
        seen = set()
        stack = [product_id]
        while stack:
            p = stack.pop()
            if p in seen or p not in dirty:
                continue
            seen.add(p)
            todo.append(p)
            stack.extend(chosen[g] for g in range(off[p], off[p + 1]))
        if not todo:
            return
        self._refresh(todo)

    def refresh_all(self) -> None:
        self._refresh(list(self.dirty))

    def _refresh(self, todo: list[int]) -> None:
        todo.sort(key=self.economy.topological_rank.__getitem__)
        rows = self.lca_rows
        if self.undo_stack:
            self.journal.extend((p, rows[p].copy(), True) for p in todo)
        for p in todo:
            self._recompute(rows, p)
        self.dirty.difference_update(todo)

    def resolved_rows(self) -> np.ndarray:
        """Copy of the memo with dirty rows recomputed; leaves the memo untouched."""
        rows = self.lca_rows.copy()
        for p in sorted(self.dirty, key=self.economy.topological_rank.__getitem__):
            self._recompute(rows, p)
        return rows

    def snapshot(self) -> tuple:
        """Hashable fingerprint of binding, resolved LCA values and bitsets."""
        return (tuple(self.chosen), self.resolved_rows().tobytes(), tuple(self.bitsets.bits))

    def slot_violations(self) -> list[str]:
        """Binding invariants: same feature set as the default, strictly lower level."""
        econ = self.economy
        out = []
        for g, s in enumerate(self.chosen):
            owner = econ.products[econ.slot_owner[g]]
            default = econ.products[econ.slot_default[g]]
            sup = econ.products[s]
            if sup.features != default.features:
                out.append(f"product {owner.name}: slot bound to {sup.name} with different features")
            if sup.level >= owner.level:
                out.append(f"product {owner.name}: slot bound to {sup.name} at level {sup.level}")
        return out

    def audit(self) -> None:
        """Compare every cache against a from-scratch recomputation (read-only)."""
        econ = self.economy
        fresh = lca_table(econ, self.chosen)
        err = np.abs(fresh - self.resolved_rows())
        if err.size and err.max() > TOL:
            p = int(np.unravel_index(err.argmax(), err.shape)[0])
            raise AuditError(f"LCA memo drift at product {econ.products[p].name}: {err.max():.3g}")
        slot_owner = econ.slot_owner
        for p in self.dirty:
            for g in self.users[p]:
                if slot_owner[g] not in self.dirty:
                    raise AuditError(f"product {econ.products[slot_owner[g]].name} is clean above a dirty supplier")
        bits = bitset_values(econ, self.chosen)
        if bits != self.bitsets.bits:
            p = next(i for i, (a, b) in enumerate(zip(bits, self.bitsets.bits)) if a != b)
            raise AuditError(f"bitset mismatch at product {econ.products[p].name}")
        if self.bitsets.version != self.version:
            raise AuditError("bitset table version out of step")
        users = [set() for _ in econ.products]
        owners = [{} for _ in econ.products]
        for g, s in enumerate(self.chosen):
            users[s].add(g)
            owners[s][slot_owner[g]] = owners[s].get(slot_owner[g], 0) + 1
        if users != self.users or owners != self.user_owners:
            raise AuditError("reverse-edge index out of step")

    def rebuild(self) -> None:
        """Drop incremental state and recompute all caches from the binding."""
        self.commit()
        self.lca_rows = lca_table(self.economy, self.chosen)
        self.dirty.clear()
        self.bitsets.bits = bitset_values(self.economy, self.chosen)
        self.bitsets.version = self.version
