"""Pre-product replacement moves: generation, make/unmake, perft."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .economy import Demand, Economy, EconomyError
from .lca import LcaVector, lca_apply_replacement
from .state import Configuration


class IllegalMoveError(ValueError):
    pass


class UndoOrderError(RuntimeError):
    pass


@dataclass(frozen=True, order=True)
class Move:
    """Rebind one input slot of ``owner`` from supplier ``from_id`` to ``to_id``."""

    owner: int
    slot_index: int
    from_id: int
    to_id: int

    def describe(self, economy: Economy) -> str:
        names = [p.name for p in economy.products]
        return f"{names[self.owner]}.slot{self.slot_index}: {names[self.from_id]}->{names[self.to_id]}"


@dataclass
class UndoToken:
    move: Move
    slot: int
    journal_len: int
    marked: list[int] = field(default_factory=list)
    bits_old: dict[int, int] = field(default_factory=dict)


def demand_closure(economy: Economy, chosen, demand: Demand) -> set[int]:
    """Products transitively required by the positive demand entries."""
    off = economy.slot_offsets
    seen: set[int] = set()
    stack = demand.roots()
    while stack:
        p = stack.pop()
        if p in seen:
            continue
        seen.add(p)
        for g in range(off[p], off[p + 1]):
            s = chosen[g]
            if s not in seen:
                stack.append(s)
    return seen


def legal_moves(economy: Economy, config: Configuration, demand: Demand) -> list[Move]:
    closure = demand_closure(economy, config.chosen, demand)
    off = economy.slot_offsets
    chosen = config.chosen
    moves = []
    for owner in sorted(closure):
        for g in range(off[owner], off[owner + 1]):
            cur = chosen[g]
            for y in economy.slot_options(g):
                if y != cur:
                    moves.append(Move(owner, g - off[owner], cur, y))
    return moves


def _check_legal(economy: Economy, config: Configuration, move: Move) -> int:
    try:
        g = economy.global_slot(move.owner, move.slot_index)
        economy.product(move.to_id)
    except EconomyError as exc:
        raise IllegalMoveError(str(exc)) from None
    name = economy.products[move.owner].name
    if config.chosen[g] != move.from_id:
        raise IllegalMoveError(f"{name}.slot{move.slot_index} is bound to a different supplier")
    if move.to_id == move.from_id:
        raise IllegalMoveError(f"{name}.slot{move.slot_index}: null move")
    target = economy.products[move.to_id]
    if target.features != economy.products[move.from_id].features:
        raise IllegalMoveError(f"{name}.slot{move.slot_index}: {target.name} has different features")
    if target.level >= economy.products[move.owner].level:
        raise IllegalMoveError(f"{name}.slot{move.slot_index}: {target.name} violates the level rule")
    return g


def _mark_users_dirty(config: Configuration, product_id: int) -> list[int]:
    """Dirty every transitive user of ``product_id``; returns the newly dirtied ids.

    The walk stops at users that are already dirty, since theirs are too.
    """
    user_owners = config.user_owners
    dirty = config.dirty
    marked: list[int] = []
    frontier = user_owners[product_id].keys() - dirty
    while frontier:
        dirty |= frontier
        marked.extend(frontier)
        nxt: set[int] = set()
        for p in frontier:
            nxt.update(user_owners[p])
        nxt -= dirty
        frontier = nxt
    return marked


def apply_move(config: Configuration, move: Move) -> UndoToken:
    """Rebind a slot, patch the owner's LCA and dirty its users.

    The state is untouched if the move is illegal.
    """
    economy = config.economy
    g = _check_legal(economy, config, move)
    owner, x, y = move.owner, move.from_id, move.to_id
    if not config.undo_stack:
        config.journal.clear()
    token = UndoToken(move, g, len(config.journal))
    config.undo_stack.append(token)

    if owner not in config.dirty:
        lx = LcaVector(config.lca(x))
        ly = LcaVector(config.lca(y))
        rows = config.lca_rows
        old = rows[owner].copy()
        config.journal.append((owner, old, False))
        rows[owner] = lca_apply_replacement(LcaVector(old), economy.slot_quantity[g], lx, ly).values
        token.marked = _mark_users_dirty(config, owner)
    config.rebind(g, x, y)

    config.version += 1
    token.bits_old = config.bitsets.propagate(owner)
    config.bitsets.version = config.version
    if config.audit_enabled:
        config.audit()
    return token


def undo_move(config: Configuration, token: UndoToken) -> None:
    """Restore the exact state preceding ``token``'s move (strict LIFO).

    Binding, bitsets and the LCA memo (rows and dirty flags) come back
    bit-for-bit, including rows refreshed by reads since the move.
    """
    if not config.undo_stack or config.undo_stack[-1] is not token:
        raise UndoOrderError("undo must reverse the most recent move first")
    config.undo_stack.pop()
    move = token.move
    config.rebind(token.slot, move.to_id, move.from_id)

    journal = config.journal
    rows = config.lca_rows
    dirty = config.dirty
    while len(journal) > token.journal_len:
        p, old, was_dirty = journal.pop()
        rows[p] = old
        if was_dirty:
            dirty.add(p)
        else:
            dirty.discard(p)
    dirty.difference_update(token.marked)

    bits = config.bitsets.bits
    for p, v in token.bits_old.items():
        bits[p] = v
    config.version += 1
    config.bitsets.version = config.version
    if config.audit_enabled:
        config.audit()


def perft(economy: Economy, config: Configuration, demand: Demand, depth: int) -> int:
    """Count legal move sequences of exactly ``depth`` moves."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if depth == 0:
        return 1
    moves = legal_moves(economy, config, demand)
    if depth == 1:
        return len(moves)
    total = 0
    for m in moves:
        token = apply_move(config, m)
        total += perft(economy, config, demand, depth - 1)
        undo_move(config, token)
    return total


def canonical_moves(economy: Economy, config: Configuration, demand: Demand) -> tuple[Move, ...]:
    """Move list from the default binding to ``config``, restricted to reachable slots.

    Ordered users-before-suppliers so that each move is legal when replayed.
    """
    closure = demand_closure(economy, config.chosen, demand)
    off = economy.slot_offsets
    default = economy.slot_default
    levels = economy.levels
    out = []
    for owner in sorted(closure, key=lambda p: (-levels[p], p)):
        for g in range(off[owner], off[owner + 1]):
            if config.chosen[g] != default[g]:
                out.append(Move(owner, g - off[owner], default[g], config.chosen[g]))
    return tuple(out)


def replay(economy: Economy, moves, audit: bool = False) -> Configuration:
    config = Configuration(economy, audit=audit)
    for m in moves:
        apply_move(config, m)
    config.commit()
    return config
