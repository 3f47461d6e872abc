"""
Scenario configuration for the 5G/IoT network simulator.
"""

import dataclasses
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Mapping

from floodlab.utils.exceptions import ConfigError, TopologyError


class Scenario(str, Enum):
    NORMAL = "normal"
    DDOS = "ddos"

    @property
    def label(self) -> int:
        """Class label of records produced by this scenario (1 = DDoS)."""
        return 1 if self is Scenario.DDOS else 0


@dataclass(frozen=True)
class LinkParams:
    bandwidth_bps: float
    prop_delay_s: float
    queue_capacity_pkts: int = 100


# link classes of the star-of-stars topology
LINK_CLASSES = ("ue_gnb", "gnb_core", "bgcell_core", "core_router", "host_router")


def default_links() -> Dict[str, LinkParams]:
    """
    Link defaults.

    The gNodeB backhaul (10 Mbps) is the bottleneck shared by pings and the
    flood; core to router (20 Mbps) saturates under 3 x 8 Mbps of flood.
    """
    return {
        "ue_gnb": LinkParams(20e6, 0.005),
        "gnb_core": LinkParams(10e6, 0.002),
        "bgcell_core": LinkParams(100e6, 0.002),
        "core_router": LinkParams(20e6, 0.002),
        "host_router": LinkParams(100e6, 0.001),
    }


@dataclass(frozen=True)
class ScenarioConfig:
    """
    Everything a simulation run depends on.

    Attributes:
        scenario (Scenario): NORMAL (pings only) or DDOS (pings plus host floods).
        duration_s (float): Application run time in simulation seconds.
        seed (int): Seed for ping start offsets and peer selection.
        n_ue (int): Number of user equipments.
        n_hosts (int): Number of hosts behind the router.
        flood_size_bytes (int): Size of each flood datagram.
        flood_interval_s (float): Gap between flood sends per host.
        ping_size_bytes (int): Size of echo requests and replies.
        ping_interval_s (float): Gap between echo requests per UE.
        icmp_size_bytes (int): Size of ICMP port-unreachable errors.
        icmp_unreachable (bool): UEs answer flood datagrams with ICMP errors.
        flood_spoof_source (bool): Flood datagrams carry another UE as reply address.
        record_interval_s (float): Statistic window length.
        drain_s (float): Extra time after duration_s for in-flight packets.
        links (Dict[str, LinkParams]): Parameters per link class.
    """

    scenario: Scenario = Scenario.NORMAL
    duration_s: float = 60.0
    seed: int = 0
    n_ue: int = 100
    n_hosts: int = 3
    flood_size_bytes: int = 1000
    flood_interval_s: float = 0.001
    ping_size_bytes: int = 64
    ping_interval_s: float = 1.0
    icmp_size_bytes: int = 56
    icmp_unreachable: bool = True
    flood_spoof_source: bool = True
    record_interval_s: float = 1.0
    drain_s: float = 1.0
    links: Dict[str, LinkParams] = field(default_factory=default_links)

    def __post_init__(self):
        object.__setattr__(self, "scenario", Scenario(self.scenario))

    @property
    def label(self) -> int:
        return self.scenario.label

    def validate(self) -> "ScenarioConfig":
        """
        Check the configuration.

        Returns:
            ScenarioConfig: self, for chaining.

        Raises:
            TopologyError: Fewer than two UEs, negative host count or an unusable link.
            ConfigError: Any other out of range value.
        """
        if self.n_ue < 2:
            raise TopologyError(f"n_ue must be at least 2 for ping pairs, got {self.n_ue}")
        if self.n_hosts < 0:
            raise TopologyError(f"n_hosts must be non-negative, got {self.n_hosts}")
        if self.scenario is Scenario.DDOS and self.n_hosts < 1:
            raise ConfigError("the ddos scenario needs at least one host")
        for name in ("duration_s", "flood_interval_s", "ping_interval_s", "record_interval_s"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.drain_s < 0:
            raise ConfigError(f"drain_s must be non-negative, got {self.drain_s}")
        for name in ("flood_size_bytes", "ping_size_bytes", "icmp_size_bytes"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        missing = set(LINK_CLASSES) - set(self.links)
        if missing:
            raise TopologyError(f"missing link parameters for {sorted(missing)}")
        for name, params in self.links.items():
            if params.queue_capacity_pkts <= 0:
                raise TopologyError(f"link {name} has zero queue capacity")
            if params.bandwidth_bps <= 0:
                raise TopologyError(f"link {name} has non-positive bandwidth")
            if params.prop_delay_s < 0:
                raise TopologyError(f"link {name} has negative propagation delay")
        return self

    def replace(self, **changes: Any) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> Dict[str, Any]:
        out = {
            f.name: getattr(self, f.name)
            for f in dataclasses.fields(self)
            if f.name != "links"
        }
        out["scenario"] = self.scenario.value
        out["links"] = {k: dataclasses.asdict(v) for k, v in self.links.items()}
        return out

    @classmethod
    def from_dict(cls, values: Mapping[str, Any]) -> "ScenarioConfig":
        """
        Build a config from a (possibly partial) mapping, as read from a config file.

        Link parameters may be given per class and per field; anything not
        given keeps its default.

        Raises:
            ConfigError: Unknown keys or an unknown scenario name.
        """
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise ConfigError(f"unknown scenario keys: {sorted(unknown)}")
        kwargs = dict(values)
        if "scenario" in kwargs and not isinstance(kwargs["scenario"], Scenario):
            try:
                kwargs["scenario"] = Scenario(str(kwargs["scenario"]).lower())
            except ValueError:
                raise ConfigError(f"unknown scenario {kwargs['scenario']!r}") from None
        if "links" in kwargs:
            kwargs["links"] = _merge_links(kwargs["links"])
        return cls(**kwargs)


def _merge_links(overrides: Mapping[str, Any]) -> Dict[str, LinkParams]:
    links = default_links()
    link_fields = {f.name for f in dataclasses.fields(LinkParams)}
    for name, values in (overrides or {}).items():
        if name not in links:
            raise ConfigError(f"unknown link class {name!r}, expected one of {LINK_CLASSES}")
        if isinstance(values, LinkParams):
            links[name] = values
            continue
        unknown = set(values) - link_fields
        if unknown:
            raise ConfigError(f"unknown keys for link {name}: {sorted(unknown)}")
        links[name] = dataclasses.replace(links[name], **values)
    return links
