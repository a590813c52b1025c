"""Line-based run trace.

One line per packet event plus energy-charge, selection-audit and selection
lines. Every numeric field is an integer (nanoseconds, femtojoules, ids,
bytes), so a trace is byte-identical across reruns of the same (scenario,
seed) pair. Fields are space-separated key=value tokens; the leading tokens
are always t= and e=.

Events: gen, enq, tx, rx, drop, deliver (packet lifecycle), chg (energy
charge), aud (one candidate row at selection time), sel (selection result).
Header lines start with '# ' and carry run parameters needed for replay.
"""
from __future__ import annotations

GEN = "gen"
ENQ = "enq"
TX = "tx"
RX = "rx"
DROP = "drop"
DELIVER = "deliver"
CHG = "chg"
AUD = "aud"
SEL = "sel"

# terminal drop causes for a data packet (exactly one per generated packet,
# together with deliver); the rest are frame-level, non-terminal causes
TERMINAL_CAUSES = frozenset({
    "queue-overflow", "salvage-exhausted", "link-break", "link-break-no-salvage",
    "buffer-expired", "run-end", "depleted",
})
FRAME_CAUSES = frozenset({"collision", "loss", "rx-depleted"})


def fmt_route(route) -> str:
    return "|".join(map(str, route)) if route else "-"


def parse_route(text: str) -> tuple[int, ...]:
    return () if text == "-" else tuple(int(x) for x in text.split("|"))


class Trace:
    """Append-only list of rendered trace lines."""

    def __init__(self, protocol: str) -> None:
        self.protocol = protocol
        self.lines: list[str] = []
        self._p = f"p={protocol}"

    def header(self, **fields) -> None:
        body = " ".join(f"{k}={v}" for k, v in fields.items())
        self.lines.append(f"# {body}")

    def gen(self, t: int, node: int, flow: int, uid: int, dst: int, size: int) -> None:
        self.lines.append(f"t={t} e=gen {self._p} k=data n={node} d={dst} f={flow} u={uid} sz={size}")

    def enq_rreq(self, t: int, node: int, src: int, seq: int, record, mbl_fj, res_fj: int) -> None:
        mbl = "-" if mbl_fj is None else mbl_fj
        self.lines.append(
            f"t={t} e=enq {self._p} k=rreq n={node} s={src} q={seq} rec={fmt_route(record)} mbl={mbl} res={res_fj}"
        )

    def tx(self, t: int, node: int, kind: str, to, size: int, attempt: int, ident: str) -> None:
        dest = "-" if to is None else to
        self.lines.append(
            f"t={t} e=tx {self._p} k={kind} n={node} to={dest} sz={size} at={attempt} {ident}"
        )

    def rx(self, t: int, node: int, kind: str, from_node: int, size: int, ident: str) -> None:
        self.lines.append(
            f"t={t} e=rx {self._p} k={kind} n={node} fr={from_node} sz={size} {ident}"
        )

    def drop(self, t: int, node: int, kind: str, cause: str, ident: str) -> None:
        self.lines.append(f"t={t} e=drop {self._p} k={kind} n={node} cause={cause} {ident}")

    def deliver(self, t: int, node: int, flow: int, uid: int, size: int) -> None:
        self.lines.append(f"t={t} e=deliver {self._p} k=data n={node} f={flow} u={uid} sz={size}")

    def charge(self, t: int, node: int, way: str, fj: int) -> None:
        self.lines.append(f"t={t} e=chg n={node} w={way} fj={fj}")

    def audit_candidate(self, t: int, node: int, cand) -> None:
        mbl = "inf" if cand.mbl_fj is None else cand.mbl_fj
        self.lines.append(
            f"t={t} e=aud n={node} s={cand.src} q={cand.seq} rec={fmt_route(cand.route)} "
            f"mbl={mbl} arr={cand.arrival_time}"
        )

    def selection(self, t: int, node: int, src: int, seq: int, primary, alternate) -> None:
        alt = fmt_route(alternate.route) if alternate is not None else "-"
        self.lines.append(
            f"t={t} e=sel n={node} s={src} q={seq} prim={fmt_route(primary.route)} alt={alt}"
        )

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


def ident_ctrl(src: int, seq: int, record=None) -> str:
    if record is None:
        return f"s={src} q={seq}"
    return f"s={src} q={seq} rec={fmt_route(record)}"


def ident_data(flow: int, uid: int) -> str:
    return f"f={flow} u={uid}"


def parse_line(line: str) -> dict[str, str]:
    """Parse one trace line into a field dict ('' key holds header text)."""
    if line.startswith("#"):
        return {"": line[1:].strip()}
    out = {}
    for token in line.split(" "):
        k, _, v = token.partition("=")
        out[k] = v
    return out


def parse_header(lines) -> dict[str, str]:
    fields: dict[str, str] = {}
    for line in lines:
        if not line.startswith("# "):
            break
        for token in line[2:].split(" "):
            k, _, v = token.partition("=")
            fields[k] = v
    return fields
