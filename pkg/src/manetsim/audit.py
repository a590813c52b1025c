"""Post-run trace audits.

Every check parses the rendered trace (never the simulator's internal
state), so it verifies what the run actually emitted:

  * energy conservation: per-node charge lines sum exactly to the ledger,
    and no node ever overdraws its battery;
  * request-flood conformance: per (src, seq), transmission counts and the
    duplicate-forwarding conditions;
  * data-packet conservation: each generated packet ends in exactly one
    terminal outcome;
  * bottleneck-energy consistency: each logged candidate's minimum battery
    level equals the minimum of the residuals its forwarders stamped;
  * selection replay: rerunning selection over the logged candidate rows
    reproduces the logged primary/alternate choice.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .energy import to_j
from .meadsr import select_alternate, select_primary
from .tables import RouteCandidate
from .trace import TERMINAL_CAUSES, parse_header, parse_route


@dataclass
class ParsedTrace:
    header: dict[str, str]
    charges: dict[int, int] = field(default_factory=dict)
    rreq_rx: dict[tuple, list] = field(default_factory=dict)   # (node,src,seq) -> [(from,rec)]
    rreq_tx: dict[tuple, list] = field(default_factory=dict)   # (node,src,seq) -> [rec]
    rreq_dst: dict[tuple, int] = field(default_factory=dict)   # (src,seq) -> dst
    enq_res: dict[tuple, int] = field(default_factory=dict)    # (node,src,seq,rec) -> residual
    gen_uids: dict[int, int] = field(default_factory=dict)     # uid -> count
    terminals: dict[int, list] = field(default_factory=dict)   # uid -> [event-or-cause]
    aud_rows: dict[tuple, list] = field(default_factory=dict)  # (node,src,seq) -> [RouteCandidate]
    sel_rows: dict[tuple, tuple] = field(default_factory=dict)  # (node,src,seq) -> (prim, alt)
    control_tx: int = 0
    generated: int = 0
    delivered: int = 0


def _v(token: str) -> str:
    return token[token.index("=") + 1:]


def parse_trace(lines: list[str]) -> ParsedTrace:
    """Single pass over the trace; token positions are fixed per event type."""
    out = ParsedTrace(parse_header(lines))
    for line in lines:
        if line.startswith("#"):
            continue
        tok = line.split(" ")
        ev = tok[1]
        if ev == "e=chg":
            node = int(_v(tok[2]))
            out.charges[node] = out.charges.get(node, 0) + int(_v(tok[4]))
        elif ev == "e=tx":
            if tok[3] != "k=data":
                out.control_tx += 1
            if tok[3] == "k=rreq":
                key = (int(_v(tok[4])), int(_v(tok[8])), int(_v(tok[9])))
                out.rreq_tx.setdefault(key, []).append(parse_route(_v(tok[10])))
                out.rreq_dst[(key[1], key[2])] = int(_v(tok[11]))
        elif ev == "e=rx":
            if tok[3] == "k=rreq":
                key = (int(_v(tok[4])), int(_v(tok[7])), int(_v(tok[8])))
                out.rreq_rx.setdefault(key, []).append(
                    (int(_v(tok[5])), parse_route(_v(tok[9]))))
        elif ev == "e=enq":
            key = (int(_v(tok[4])), int(_v(tok[5])), int(_v(tok[6])),
                   parse_route(_v(tok[7])))
            out.enq_res[key] = int(_v(tok[9]))
        elif ev == "e=gen":
            out.generated += 1
            uid = int(_v(tok[7]))
            out.gen_uids[uid] = out.gen_uids.get(uid, 0) + 1
        elif ev == "e=deliver":
            out.delivered += 1
            out.terminals.setdefault(int(_v(tok[6])), []).append("deliver")
        elif ev == "e=drop":
            cause = _v(tok[5])
            if tok[3] == "k=data" and cause in TERMINAL_CAUSES:
                out.terminals.setdefault(int(_v(tok[7])), []).append(cause)
        elif ev == "e=aud":
            key = (int(_v(tok[2])), int(_v(tok[3])), int(_v(tok[4])))
            route = parse_route(_v(tok[5]))
            raw = _v(tok[6])
            if raw == "inf":
                mbl, mbl_fj = math.inf, None
            else:
                mbl_fj = int(raw)
                mbl = to_j(mbl_fj)
            out.aud_rows.setdefault(key, []).append(
                RouteCandidate(key[1], key[2], route, mbl, int(_v(tok[7])), mbl_fj))
        elif ev == "e=sel":
            key = (int(_v(tok[2])), int(_v(tok[3])), int(_v(tok[4])))
            raw = _v(tok[6])
            alt = None if raw == "-" else parse_route(raw)
            out.sel_rows[key] = (parse_route(_v(tok[5])), alt)
    return out


def check_energy_conservation(parsed: ParsedTrace, consumed_fj: list[int],
                              initial_fj: list[int]) -> list[str]:
    problems = []
    for node, consumed in enumerate(consumed_fj):
        traced = parsed.charges.get(node, 0)
        if traced != consumed:
            problems.append(
                f"node {node}: trace charges {traced} fJ != ledger consumed {consumed} fJ")
        if consumed > initial_fj[node]:
            problems.append(f"node {node}: consumed {consumed} exceeds initial {initial_fj[node]}")
    for node in parsed.charges:
        if node >= len(consumed_fj):
            problems.append(f"charge recorded for unknown node {node}")
    return problems


def check_duplicate_rule(parsed: ParsedTrace) -> list[str]:
    """Per (src, seq): transmission budgets and duplicate-forward conditions."""
    protocol = parsed.header.get("protocol", "")
    mea = protocol == "mea-dsr"
    limit = 2 if mea else 1
    problems = []
    keys = set(parsed.rreq_tx) | set(parsed.rreq_rx)
    for key in keys:
        node, src, seq = key
        txs = parsed.rreq_tx.get(key, [])
        if node == src:
            if any(rec != () for rec in txs):
                problems.append(f"{key}: originator transmitted a forwarded copy")
            if len(txs) > 1:
                problems.append(f"{key}: originator transmitted {len(txs)} copies")
            continue
        dst = parsed.rreq_dst.get((src, seq))
        if node == dst:
            if txs:
                problems.append(f"{key}: destination forwarded a request")
            continue
        if len(txs) > limit:
            problems.append(f"{key}: {len(txs)} copies transmitted (limit {limit})")
        allowed = _allowed_forwards(node, parsed.rreq_rx.get(key, []), mea)
        for rec in txs:
            if rec not in allowed:
                problems.append(f"{key}: transmitted copy {rec} violates the forwarding rule")
    return problems


def _allowed_forwards(node: int, rxs: list, mea: bool) -> set:
    """Records this node was entitled to transmit, replayed from its receptions."""
    allowed = set()
    first_from = first_hop = None
    duplicate_spent = False
    for from_node, rec in rxs:
        hop = len(rec) + 1
        if first_from is None:
            first_from, first_hop = from_node, hop
            if node not in rec:
                allowed.add(rec + (node,))
            continue
        if not mea or duplicate_spent:
            continue
        if from_node != first_from and hop <= first_hop and node not in rec:
            allowed.add(rec + (node,))
            duplicate_spent = True
    return allowed


def check_packet_conservation(parsed: ParsedTrace) -> list[str]:
    problems = []
    for uid, count in parsed.gen_uids.items():
        if count != 1:
            problems.append(f"packet {uid}: generated {count} times")
        ends = parsed.terminals.get(uid, [])
        if len(ends) != 1:
            problems.append(f"packet {uid}: terminal outcomes {ends or 'missing'}")
    for uid in parsed.terminals:
        if uid not in parsed.gen_uids:
            problems.append(f"packet {uid}: terminal outcome without generation")
    return problems


def check_min_bat_lev(parsed: ParsedTrace) -> list[str]:
    """Each candidate's bottleneck equals the min of its forwarders' stamps."""
    problems = []
    for (node, src, seq), rows in parsed.aud_rows.items():
        for cand in rows:
            inner = cand.route[1:-1]
            if not inner:
                if cand.mbl_fj is not None:
                    problems.append(f"{(src, seq)}: direct route {cand.route} carries "
                                    f"a bottleneck value")
                continue
            stamps = []
            for i, hop in enumerate(inner, start=1):
                key = (hop, src, seq, cand.route[1:i + 1])
                res = parsed.enq_res.get(key)
                if res is None:
                    problems.append(f"{(src, seq)}: no forwarding stamp for {hop} "
                                    f"on {cand.route}")
                    break
                stamps.append(res)
            else:
                if cand.mbl_fj != min(stamps):
                    problems.append(
                        f"{(src, seq)}: candidate {cand.route} bottleneck {cand.mbl_fj} "
                        f"!= min stamp {min(stamps)}")
    return problems


def check_selection_replay(parsed: ParsedTrace, pick_primary=select_primary,
                           pick_alternate=select_alternate) -> list[str]:
    """Reselect from the logged candidate rows and compare with the logged choice."""
    problems = []
    for key, rows in parsed.aud_rows.items():
        logged = parsed.sel_rows.get(key)
        if logged is None:
            problems.append(f"{key}: candidates logged but no selection record")
            continue
        primary = pick_primary(rows)
        alternate = pick_alternate(rows, primary)
        want_alt = alternate.route if alternate is not None else None
        if (primary.route, want_alt) != logged:
            problems.append(f"{key}: replayed ({primary.route}, {want_alt}) != logged {logged}")
    for key in parsed.sel_rows:
        if key not in parsed.aud_rows:
            problems.append(f"{key}: selection without candidate rows")
    return problems


def metrics_from_parsed(parsed: ParsedTrace):
    """Recompute the run report purely from parsed trace content."""
    from .metrics import Counters, compute_metrics

    node_count = int(parsed.header["nodes"])
    initial_fj = [int(parsed.header["initial_fj"])] * node_count
    consumed_fj = [parsed.charges.get(node, 0) for node in range(node_count)]
    counters = Counters(parsed.control_tx, parsed.generated, parsed.delivered)
    return compute_metrics(counters, consumed_fj, initial_fj)


def audit_run(lines: list[str], consumed_fj: list[int], initial_fj: list[int]) -> list[str]:
    """All structural audits over one run's trace; empty result means clean.

    Findings are prefixed with the audit that raised them (energy / flood /
    packets / bottleneck / selection) so callers can attribute them.
    """
    return audit_parsed(parse_trace(lines), consumed_fj, initial_fj)


def audit_parsed(parsed: ParsedTrace, consumed_fj: list[int],
                 initial_fj: list[int]) -> list[str]:
    problems = []
    problems += [f"energy: {p}" for p in
                 check_energy_conservation(parsed, consumed_fj, initial_fj)]
    problems += [f"flood: {p}" for p in check_duplicate_rule(parsed)]
    problems += [f"packets: {p}" for p in check_packet_conservation(parsed)]
    if parsed.header.get("protocol") == "mea-dsr":
        problems += [f"bottleneck: {p}" for p in check_min_bat_lev(parsed)]
        problems += [f"selection: {p}" for p in check_selection_replay(parsed)]
    return problems
