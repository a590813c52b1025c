"""Scenario files, defaults, validation, and the standard sweep suites.

A scenario is structured YAML (JSON works too) with explicit keys; unknown
keys are rejected. A stable digest of the canonicalized scenario names its
output artifacts. The sweep builder produces the mobility / density /
traffic suites, optionally shrunk by a scale factor for desk-scale runs
(arena sides, node counts, run length, pause times and the traffic start
window scale; transmission range, rates and session counts do not).
"""
from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass, field, replace

import yaml

from .airlink import LinkLayerConfig
from .dsr import DsrConfig
from .energy import EnergyModel
from .meadsr import MeaDsrConfig
from .mobility import Arena
from .packets import PacketSizes

DSR = "dsr"
MEA_DSR = "mea-dsr"
PROTOCOLS = (DSR, MEA_DSR)

SPEED_CLASSES = {
    "low": (0.5, 1.0),
    "moderate": (5.0, 10.0),
    "high": (20.0, 25.0),
}

MOBILITY_PAUSE = "mobility-pause"
NODE_DENSITY = "node-density"
SEND_RATE = "send-rate"
SESSION_COUNT = "session-count"
AXES = (MOBILITY_PAUSE, NODE_DENSITY, SEND_RATE, SESSION_COUNT)


class ScenarioError(Exception):
    pass


class ScenarioFormatError(ScenarioError):
    """The file is not well-formed structured text."""


class UnknownKeyError(ScenarioError):
    """The file names a key the schema does not define."""


class ScenarioValueError(ScenarioError):
    """A value violates a scenario invariant."""


@dataclass(frozen=True)
class MobilityConfig:
    pause_s: float = 100.0
    speed: tuple[float, float] = SPEED_CLASSES["moderate"]

    def __post_init__(self):
        if self.pause_s < 0:
            raise ScenarioValueError(f"pause time must be >= 0, got {self.pause_s}")
        lo, hi = self.speed
        if not (0 < lo <= hi):
            raise ScenarioValueError(f"speed interval must be positive and ordered, got {self.speed}")


@dataclass(frozen=True)
class TrafficConfig:
    sessions: int = 10
    rate: float = 4.0
    payload: int = 512
    start_window_s: float = 120.0

    def __post_init__(self):
        if self.sessions < 0:
            raise ScenarioValueError("session count must be >= 0 (0 disables traffic)")
        if self.rate <= 0:
            raise ScenarioValueError("send rate must be positive")
        if self.payload <= 0:
            raise ScenarioValueError("payload must be positive")
        if self.start_window_s < 0:
            raise ScenarioValueError("start window must be >= 0")


@dataclass(frozen=True)
class EnergyConfig:
    initial_j: float = 100.0
    tx_power_w: float = 1.4
    rx_power_w: float = 1.0
    overhearing: bool = False

    def __post_init__(self):
        if self.initial_j <= 0:
            raise ScenarioValueError("initial energy must be positive")
        if self.tx_power_w <= 0 or self.rx_power_w <= 0:
            raise ScenarioValueError("tx/rx power must be positive")

    def model(self) -> EnergyModel:
        return EnergyModel(self.tx_power_w, self.rx_power_w, self.overhearing)


@dataclass(frozen=True)
class Scenario:
    name: str = "scenario"
    node_count: int = 50
    run_length_s: float = 600.0
    protocol: str = MEA_DSR
    arena: Arena = field(default_factory=lambda: Arena(1000.0, 1000.0, 250.0))
    mobility: MobilityConfig = field(default_factory=MobilityConfig)
    traffic: TrafficConfig = field(default_factory=TrafficConfig)
    energy: EnergyConfig = field(default_factory=EnergyConfig)
    link: LinkLayerConfig = field(default_factory=LinkLayerConfig)
    dsr: DsrConfig = field(default_factory=DsrConfig)
    mea: MeaDsrConfig = field(default_factory=MeaDsrConfig)
    sizes: PacketSizes = field(default_factory=PacketSizes)
    send_buffer_timeout_s: float = 30.0
    backoff_initial_s: float = 0.5
    backoff_cap_s: float = 10.0
    seeds: tuple[int, ...] = (1,)

    def __post_init__(self):
        if self.node_count < 2:
            raise ScenarioValueError("need at least two nodes")
        if self.run_length_s <= 0:
            raise ScenarioValueError("run length must be positive")
        if self.protocol not in PROTOCOLS:
            raise ScenarioValueError(f"unknown protocol {self.protocol!r}; pick one of {PROTOCOLS}")
        if not self.seeds:
            raise ScenarioValueError("need at least one seed")

    def with_protocol(self, protocol: str) -> "Scenario":
        return replace(self, protocol=protocol)

    def config_hash(self) -> str:
        """Stable digest of everything except the seed list."""
        payload = asdict(self)
        payload.pop("seeds")
        canon = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:12]


def _speed_interval(value) -> tuple[float, float]:
    if isinstance(value, str):
        if value not in SPEED_CLASSES:
            raise ScenarioValueError(
                f"unknown speed class {value!r}; pick one of {sorted(SPEED_CLASSES)}")
        return SPEED_CLASSES[value]
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return float(value[0]), float(value[1])
    raise ScenarioValueError(f"speed must be a class name or [lo, hi], got {value!r}")


def _take(section: dict, known: dict, where: str) -> dict:
    """Map file keys to constructor kwargs, rejecting unknown ones."""
    out = {}
    for key, value in section.items():
        if key not in known:
            raise UnknownKeyError(f"unknown key {key!r} in {where} (known: {sorted(known)})")
        attr, convert = known[key]
        out[attr] = convert(value) if convert else value
    return out


def scenario_from_dict(raw: dict, name: str = "scenario") -> Scenario:
    if not isinstance(raw, dict):
        raise ScenarioFormatError(f"scenario must be a mapping, got {type(raw).__name__}")
    top = {
        "name": ("name", str),
        "nodes": ("node_count", int),
        "run_length": ("run_length_s", float),
        "protocol": ("protocol", str),
        "send_buffer_timeout": ("send_buffer_timeout_s", float),
        "backoff_initial": ("backoff_initial_s", float),
        "backoff_cap": ("backoff_cap_s", float),
        "seeds": ("seeds", lambda v: tuple(int(s) for s in v)),
    }
    sections = {
        "arena": (Arena, {
            "width": ("width", float), "height": ("height", float),
            "range": ("tx_range", float),
        }),
        "mobility": (MobilityConfig, {
            "pause": ("pause_s", float), "speed": ("speed", _speed_interval),
        }),
        "traffic": (TrafficConfig, {
            "sessions": ("sessions", int), "rate": ("rate", float),
            "payload": ("payload", int), "start_window": ("start_window_s", float),
        }),
        "energy": (EnergyConfig, {
            "initial": ("initial_j", float), "tx_power": ("tx_power_w", float),
            "rx_power": ("rx_power_w", float), "overhearing": ("overhearing", bool),
        }),
        "link": (LinkLayerConfig, {
            "bandwidth": ("bandwidth_bps", int), "queue": ("queue_capacity", int),
            "retries": ("mac_retries", int), "jitter": ("broadcast_jitter_max_s", float),
            "retry_backoff": ("retry_backoff_max_s", float),
            "interference": ("interference_mode", str), "loss": ("loss_probability", float),
        }),
        "dsr": (DsrConfig, {
            "max_salvage": ("max_salvage_count", int),
            "reply_from_cache": ("reply_from_cache", bool),
        }),
        "meadsr": (MeaDsrConfig, {
            "wait_time": ("wait_time_s", float),
            "alternate_rrep": ("alternate_rrep", bool),
        }),
        "sizes": (PacketSizes, {
            "rreq_base": ("rreq_base", int), "rrep_base": ("rrep_base", int),
            "rerr": ("rerr", int), "data_base": ("data_base", int),
            "per_hop": ("per_hop", int), "min_energy_field": ("min_energy_field", int),
        }),
    }
    section_attr = {"meadsr": "mea"}
    kwargs = {"name": name}
    for key, value in raw.items():
        if key in top:
            attr, convert = top[key]
            try:
                kwargs[attr] = convert(value)
            except (TypeError, ValueError) as exc:
                raise ScenarioValueError(f"bad value for {key!r}: {value!r} ({exc})") from None
        elif key in sections:
            cls, known = sections[key]
            if not isinstance(value, dict):
                raise ScenarioFormatError(f"section {key!r} must be a mapping")
            try:
                obj = cls(**_take(value, known, f"section {key!r}"))
            except ValueError as exc:  # invariant checks inside the config classes
                raise ScenarioValueError(str(exc)) from None
            kwargs[section_attr.get(key, key)] = obj
        else:
            raise UnknownKeyError(
                f"unknown top-level key {key!r} (known: {sorted(list(top) + list(sections))})")
    return Scenario(**kwargs)


def load_scenario(path) -> Scenario:
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        raise ScenarioFormatError(f"{path}: not well-formed: {exc}") from None
    if raw is None:
        raise ScenarioFormatError(f"{path}: empty scenario file")
    name = os.path.splitext(os.path.basename(str(path)))[0]
    return scenario_from_dict(raw, name=name)


# -- sweep suites -----------------------------------------------------------------

@dataclass(frozen=True)
class SweepSuite:
    axis: str
    scale: float
    points: tuple[Scenario, ...]


PAUSE_POINTS_S = (0, 100, 200, 300, 400, 500, 600)
DENSITY_POINTS = (50, 60, 70, 80, 90, 100)
RATE_POINTS = (2, 4, 6, 8, 10, 12)
SESSION_POINTS = (10, 15, 20, 25, 30, 35, 40)


def _base(scale: float, seeds: tuple[int, ...]) -> Scenario:
    return Scenario(
        node_count=max(2, round(50 * scale)),
        run_length_s=600.0 * scale,
        arena=Arena(1000.0 * scale, 1000.0 * scale, 250.0),
        mobility=MobilityConfig(pause_s=100.0 * scale),
        traffic=TrafficConfig(start_window_s=120.0 * scale),
        seeds=seeds,
    )


def build_suite(axis: str, scale: float = 1.0, seeds: tuple[int, ...] = (1,)) -> SweepSuite:
    """Enumerate the scenario points for one sweep axis.

    mobility-pause: pause times stepped over the whole run for each of the
    three speed classes; node-density: node counts at a fixed moderate
    profile; send-rate and session-count: the traffic sweeps.
    """
    if axis not in AXES:
        raise ScenarioValueError(f"unknown axis {axis!r}; pick one of {AXES}")
    if scale <= 0:
        raise ScenarioValueError("scale must be positive")
    base = _base(scale, seeds)
    points: list[Scenario] = []
    if axis == MOBILITY_PAUSE:
        for speed_name in ("low", "moderate", "high"):
            for pause in PAUSE_POINTS_S:
                points.append(replace(
                    base,
                    name=f"pause{round(pause * scale)}-{speed_name}",
                    mobility=MobilityConfig(pause_s=pause * scale,
                                            speed=SPEED_CLASSES[speed_name]),
                ))
    elif axis == NODE_DENSITY:
        for nodes in DENSITY_POINTS:
            points.append(replace(
                base, name=f"nodes{max(2, round(nodes * scale))}",
                node_count=max(2, round(nodes * scale)),
            ))
    elif axis == SEND_RATE:
        for rate in RATE_POINTS:
            points.append(replace(
                base, name=f"rate{rate}",
                traffic=replace(base.traffic, rate=float(rate)),
            ))
    else:
        for sessions in SESSION_POINTS:
            points.append(replace(
                base, name=f"sessions{sessions}",
                traffic=replace(base.traffic, sessions=sessions),
            ))
    return SweepSuite(axis, scale, tuple(points))
