"""
Star-of-stars 5G topology: UEs on a gNodeB, gNodeB and backgroundCell on the
core, core on the router, hosts on the router.
"""

from collections import deque
from dataclasses import dataclass
from enum import Enum
from ipaddress import IPv4Address, ip_network
from typing import Any, Dict, List, NamedTuple, Tuple

from loguru import logger

from floodlab.simcore.config import LinkParams, ScenarioConfig
from floodlab.utils.exceptions import TopologyError


class NodeKind(str, Enum):
    UE = "ue"
    GNODEB = "gnb"
    BACKGROUND_CELL = "backgroundCell"
    ROUTER = "router"
    HOST = "host"
    CORE = "core"


# kinds that exist once and are named without an index
_SINGLETONS = (NodeKind.CORE, NodeKind.GNODEB, NodeKind.BACKGROUND_CELL, NodeKind.ROUTER)

_SUBNETS = {
    NodeKind.CORE: ip_network("10.0.0.0/24"),
    NodeKind.GNODEB: ip_network("10.0.1.0/24"),
    NodeKind.BACKGROUND_CELL: ip_network("10.0.2.0/24"),
    NodeKind.ROUTER: ip_network("10.0.3.0/24"),
    NodeKind.UE: ip_network("10.1.0.0/16"),
    NodeKind.HOST: ip_network("10.2.0.0/16"),
}


class NodeId(NamedTuple):
    """
    A node of the topology.

    index is unique across the topology; ordinal counts within the kind.
    """

    index: int
    kind: NodeKind
    ordinal: int = 0

    @property
    def module(self) -> str:
        if self.kind in _SINGLETONS:
            return f"net.{self.kind.value}"
        return f"net.{self.kind.value}[{self.ordinal}]"


@dataclass(frozen=True)
class Link:
    index: int
    a: NodeId
    b: NodeId
    bandwidth_bps: float
    prop_delay_s: float
    queue_capacity_pkts: int


class Topology:
    """
    Nodes, links, addresses and static routes of one simulated network.

    Paths are shortest paths over the (tree shaped) adjacency, except that
    UE to UE traffic is anchored at the core like 5G user-plane traffic.
    """

    def __init__(self, nodes: List[NodeId], links: List[Link]):
        self.nodes = nodes
        self.links = links
        # per node: (neighbor index, link index, direction); order fixes interface numbers
        self.adjacency: List[List[Tuple[int, int, int]]] = [[] for _ in nodes]
        for link in links:
            self.adjacency[link.a.index].append((link.b.index, link.index, 0))
            self.adjacency[link.b.index].append((link.a.index, link.index, 1))
        self._interfaces: Dict[Tuple[int, int], Tuple[int, int, int]] = {}
        for node_index, neighbors in enumerate(self.adjacency):
            for iface, (neighbor, link_index, direction) in enumerate(neighbors):
                self._interfaces[(node_index, neighbor)] = (link_index, direction, iface)
        self.addresses: Dict[int, IPv4Address] = {}
        for node in nodes:
            subnet = _SUBNETS[node.kind]
            self.addresses[node.index] = subnet[node.ordinal + 1]
        self._next_hop = self._compute_next_hops()
        self._paths: Dict[Tuple[int, int], Tuple[int, ...]] = {}

    def of_kind(self, kind: NodeKind) -> List[NodeId]:
        return [n for n in self.nodes if n.kind is kind]

    @property
    def ues(self) -> List[NodeId]:
        return self.of_kind(NodeKind.UE)

    @property
    def hosts(self) -> List[NodeId]:
        return self.of_kind(NodeKind.HOST)

    def node(self, kind: NodeKind, ordinal: int = 0) -> NodeId:
        for n in self.nodes:
            if n.kind is kind and n.ordinal == ordinal:
                return n
        raise KeyError(f"no node {kind.value}[{ordinal}]")

    def interface(self, node: int, neighbor: int) -> Tuple[int, int, int]:
        """(link index, direction, interface number) for the hop node -> neighbor."""
        return self._interfaces[(node, neighbor)]

    def _compute_next_hops(self) -> List[List[int]]:
        # BFS from every destination; next_hop[src][dst]
        n = len(self.nodes)
        next_hop = [[-1] * n for _ in range(n)]
        for dst in range(n):
            next_hop[dst][dst] = dst
            frontier = deque([dst])
            while frontier:
                current = frontier.popleft()
                for neighbor, _, _ in self.adjacency[current]:
                    if next_hop[neighbor][dst] == -1:
                        next_hop[neighbor][dst] = current
                        frontier.append(neighbor)
        return next_hop

    def is_connected(self) -> bool:
        return all(hop != -1 for row in self._next_hop for hop in row)

    def shortest_path(self, src: int, dst: int) -> Tuple[int, ...]:
        path = [src]
        while path[-1] != dst:
            hop = self._next_hop[path[-1]][dst]
            if hop == -1:
                raise TopologyError(f"{self.nodes[dst].module} unreachable from {self.nodes[src].module}")
            path.append(hop)
        return tuple(path)

    def path(self, src: int, dst: int) -> Tuple[int, ...]:
        """Node indices visited from src to dst, both included."""
        key = (src, dst)
        cached = self._paths.get(key)
        if cached is not None:
            return cached
        if (
            src != dst
            and self.nodes[src].kind is NodeKind.UE
            and self.nodes[dst].kind is NodeKind.UE
        ):
            core = self.node(NodeKind.CORE).index
            up = self.shortest_path(src, core)
            down = self.shortest_path(core, dst)
            path = up + down[1:]
        else:
            path = self.shortest_path(src, dst)
        self._paths[key] = path
        return path

    def describe(self) -> Dict[str, Any]:
        """
        Dump addresses, links and routing tables, like a network configurator would.

        Returns:
            Dict[str, Any]: JSON serialisable description.
        """
        nodes = [
            {
                "module": node.module,
                "kind": node.kind.value,
                "address": str(self.addresses[node.index]),
            }
            for node in self.nodes
        ]
        links = [
            {
                "a": link.a.module,
                "b": link.b.module,
                "bandwidth_bps": link.bandwidth_bps,
                "prop_delay_s": link.prop_delay_s,
                "queue_capacity_pkts": link.queue_capacity_pkts,
            }
            for link in self.links
        ]
        routes = {}
        for src in self.nodes:
            table = {}
            for dst in self.nodes:
                if dst.index == src.index:
                    continue
                hop = self.path(src.index, dst.index)[1]
                table[str(self.addresses[dst.index])] = self.nodes[hop].module
            routes[src.module] = table
        return {"nodes": nodes, "links": links, "routes": routes}


def build_topology(config: ScenarioConfig) -> Topology:
    """
    Build the network for a scenario.

    Args:
        config (ScenarioConfig): Node counts and link parameters.

    Returns:
        Topology: n_ue + n_hosts + 4 nodes (core, gNodeB, backgroundCell, router).

    Raises:
        TopologyError: Fewer than two UEs or an unusable link.
    """
    config.validate()

    nodes: List[NodeId] = []

    def add(kind: NodeKind, ordinal: int = 0) -> NodeId:
        node = NodeId(len(nodes), kind, ordinal)
        nodes.append(node)
        return node

    core = add(NodeKind.CORE)
    gnb = add(NodeKind.GNODEB)
    bgcell = add(NodeKind.BACKGROUND_CELL)
    router = add(NodeKind.ROUTER)
    ues = [add(NodeKind.UE, i) for i in range(config.n_ue)]
    hosts = [add(NodeKind.HOST, j) for j in range(config.n_hosts)]

    links: List[Link] = []

    def connect(a: NodeId, b: NodeId, params: LinkParams) -> None:
        links.append(
            Link(
                len(links),
                a,
                b,
                float(params.bandwidth_bps),
                float(params.prop_delay_s),
                int(params.queue_capacity_pkts),
            )
        )

    for ue in ues:
        connect(ue, gnb, config.links["ue_gnb"])
    connect(gnb, core, config.links["gnb_core"])
    connect(bgcell, core, config.links["bgcell_core"])
    connect(core, router, config.links["core_router"])
    for host in hosts:
        connect(host, router, config.links["host_router"])

    topology = Topology(nodes, links)
    if not topology.is_connected():
        raise TopologyError("generated topology is not connected")
    logger.debug(f"Built topology with {len(nodes)} nodes and {len(links)} links")
    return topology
