"""Exact cover via Algorithm X with dancing links.

Rows are arbitrary hashable identifiers, columns are the universe elements.
Rows that would need to cover a column twice (duplicate entries) can never
appear in a solution and are rejected up front by the caller.
"""

from __future__ import annotations

from typing import Hashable, Iterable, Optional, Sequence


class _Node:
    __slots__ = ("left", "right", "up", "down", "column", "row_id")

    def __init__(self):
        self.left = self.right = self.up = self.down = self
        self.column: "_Column" = None  # type: ignore[assignment]
        self.row_id: Hashable = None


class _Column(_Node):
    __slots__ = ("size", "name")

    def __init__(self, name: Hashable):
        super().__init__()
        self.column = self
        self.size = 0
        self.name = name


class ExactCover:
    """Dancing-links matrix; ``solve`` finds one cover and counts search nodes."""

    def __init__(self, universe: Iterable[Hashable]):
        self.header = _Column("#")
        self.columns: dict[Hashable, _Column] = {}
        for name in universe:
            col = _Column(name)
            col.left = self.header.left
            col.right = self.header
            self.header.left.right = col
            self.header.left = col
            self.columns[name] = col
        self.nodes_explored = 0

    def add_row(self, row_id: Hashable, entries: Sequence[Hashable]) -> None:
        if len(set(entries)) != len(entries):
            raise ValueError(f"row {row_id!r} repeats a column; it can never be chosen")
        first: Optional[_Node] = None
        for name in entries:
            col = self.columns[name]
            node = _Node()
            node.column = col
            node.row_id = row_id
            node.down = col
            node.up = col.up
            col.up.down = node
            col.up = node
            col.size += 1
            if first is None:
                first = node
            else:
                node.left = first.left
                node.right = first
                first.left.right = node
                first.left = node

    def _cover(self, col: _Column) -> None:
        col.right.left = col.left
        col.left.right = col.right
        i = col.down
        while i is not col:
            j = i.right
            while j is not i:
                j.down.up = j.up
                j.up.down = j.down
                j.column.size -= 1
                j = j.right
            i = i.down

    def _uncover(self, col: _Column) -> None:
        i = col.up
        while i is not col:
            j = i.left
            while j is not i:
                j.column.size += 1
                j.down.up = j
                j.up.down = j
                j = j.left
            i = i.up
        col.right.left = col
        col.left.right = col

    def solve(self, budget: Optional[int] = None) -> Optional[list[Hashable]]:
        """One exact cover as a list of row ids, or None if none exists.

        Raises RuntimeError when the node budget is exhausted before the
        search completes.
        """
        solution: list[Hashable] = []
        found = self._search(solution, budget)
        return list(solution) if found else None

    def _search(self, solution: list[Hashable], budget: Optional[int]) -> bool:
        if self.header.right is self.header:
            return True
        self.nodes_explored += 1
        if budget is not None and self.nodes_explored > budget:
            raise RuntimeError("exact cover search budget exhausted")
        col = self.header.right
        best = col
        while col is not self.header:
            if col.size < best.size:
                best = col
            col = col.right
        if best.size == 0:
            return False
        self._cover(best)
        r = best.down
        while r is not best:
            solution.append(r.row_id)
            j = r.right
            while j is not r:
                self._cover(j.column)
                j = j.right
            if self._search(solution, budget):
                return True
            j = r.left
            while j is not r:
                self._uncover(j.column)
                j = j.left
            solution.pop()
            r = r.down
        self._uncover(best)
        return False


def solve_exact_cover(
    universe: Iterable[Hashable],
    rows: dict[Hashable, Sequence[Hashable]],
    budget: Optional[int] = None,
) -> tuple[Optional[list[Hashable]], int]:
    """Convenience wrapper: returns (solution row ids or None, nodes explored)."""
    dlx = ExactCover(universe)
    for row_id, entries in rows.items():
        dlx.add_row(row_id, entries)
    solution = dlx.solve(budget=budget)
    return solution, dlx.nodes_explored
