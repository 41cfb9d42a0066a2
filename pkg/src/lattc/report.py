"""Per-definition assumption reports: what a definition uses vs. mentions.

An occurrence counts as a *use* when it sits in a term position that the
definition itself computes with: outside types, outside the refuted
scrutinee of ``absurd``, and not inside an application argument annotated
with extensions beyond the definition's own level (such an argument is
merely passed along).  Everything else is a *mention*.  Uses propagate
through references to other definitions; a referenced definition's
mentions, and anything it has when referenced from a type, stay mentions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from lattc import usage
from lattc.errors import UnknownName
from lattc.lattice import LatticeConfig, format_level


@dataclass(frozen=True)
class AssumptionReport:
    level: frozenset
    term_uses: frozenset = frozenset()
    type_mentions: frozenset = frozenset()


def compute_report(env, cfg: LatticeConfig, d, level: frozenset) -> AssumptionReport:
    uses: set[str] = set()
    mentions: set[str] = set()
    if d.kind == "postulate":
        uses.add(d.name)

    occs = usage.scan(env, cfg, d.type, types=True)
    if d.body is not None:
        occs += usage.scan(env, cfg, d.body)

    for occ in occs:
        if occ.kind not in ("gated", "global"):
            continue
        used = occ.in_term and occ.granted <= level
        if occ.kind == "gated":
            (uses if used else mentions).add(occ.item)
            continue
        entry = env.get(occ.item)
        if entry is None:
            continue
        own = entry.report.term_uses if entry.report is not None else frozenset()
        theirs = entry.report.type_mentions if entry.report is not None else frozenset()
        if entry.kind == "postulate":
            own = own | {entry.name}
        (uses if used else mentions).update(own)
        mentions.update(theirs)

    return AssumptionReport(level, frozenset(uses), frozenset(mentions - uses))


def assumptions(env, name: str) -> AssumptionReport:
    entry = env.get(name)
    if entry is None:
        raise UnknownName(f"no definition named {name!r}")
    return entry.report


def _items(ids) -> str:
    return ", ".join(sorted(ids)) if ids else "(none)"


def as_dict(r: AssumptionReport) -> dict:
    return {"level": sorted(r.level), "term_uses": sorted(r.term_uses),
            "type_mentions": sorted(r.type_mentions)}


def render(r: AssumptionReport, format: str = "text") -> str:
    if format == "json":
        return json.dumps(as_dict(r), separators=(",", ":"))
    if format != "text":
        raise ValueError(f"unknown report format {format!r}")
    return (f"level: {format_level(r.level)}\n"
            f"term uses: {_items(r.term_uses)}\n"
            f"type mentions: {_items(r.type_mentions)}")


@dataclass(frozen=True)
class AuditEntry:
    name: str
    report: AssumptionReport
    assertions: tuple = ()

    @property
    def failures(self) -> int:
        return sum(1 for a in self.assertions if not a.ok)


def audit_module(env, decls) -> list[AuditEntry]:
    """One entry per checked definition of ``decls`` with its assertions."""
    from lattc.elaborate import check_assertion

    asserted: dict[str, list] = {}
    for d in decls:
        if d.kind == "assert_level" and d.name in env:
            asserted.setdefault(d.name, []).append(check_assertion(env, d))
    out = []
    for d in decls:
        if d.kind == "assert_level" or d.name not in env:
            continue
        out.append(AuditEntry(d.name, env.get(d.name).report, tuple(asserted.get(d.name, ()))))
    return out
