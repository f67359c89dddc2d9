"""Minimal proactive link-state stack on top of the event engine.

Periodic Hellos drive the adjacency state machines, periodic TC messages are
flooded so every node learns the topology, routes are shortest hop count, and
data packets are unicast hop by hop with a radio check on every hop. There
is no MAC layer and no link-layer retransmission: a packet sent over a link
that is still believed valid but is physically out of range is lost.
"""

from __future__ import annotations

import enum
import hashlib
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Mapping

from . import adjacency as adj
from .engine import EventHandle, EventKind, EventQueue, RngStreams
from .mobility import ConfigError, Scenario, distance
from .radio import Dropped, reception_decision, rx_power

DELIVERY_DELAY = 1e-6  # s
MIN_DISTANCE = 0.1  # m, keeps path loss finite when the mobile passes over a relay

HELLO_HEADER_BYTES = 16
TC_HEADER_BYTES = 16
ADDRESS_BYTES = 4
DATA_HEADER_BYTES = 20


class Algorithm(str, enum.Enum):
    LOSS = "loss"
    SIGNAL = "signal"


@dataclass(frozen=True)
class TimingParams:
    hello_interval: float = 2.0
    hello_jitter_max: float = 0.5
    tc_interval: float = 5.0
    neighbor_hold_time: float = 6.0
    topology_hold_time: float = 15.0
    miss_timeout_factor: float = 1.5
    ttl: int = 32

    def validate(self) -> None:
        for name in ("hello_interval", "tc_interval", "neighbor_hold_time", "topology_hold_time"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"timing.{name}", "must be > 0")
        if not 0 <= self.hello_jitter_max < self.hello_interval:
            raise ConfigError("timing.hello_jitter_max", "must be in [0, hello_interval)")
        if not self.miss_timeout_factor >= 1:
            raise ConfigError("timing.miss_timeout_factor", "must be >= 1")
        if self.ttl < 1:
            raise ConfigError("timing.ttl", "must be >= 1")


@dataclass(frozen=True)
class HelloMsg:
    originator: int
    seq: int
    heard_neighbors: tuple[int, ...]

    @property
    def size_bytes(self) -> int:
        return HELLO_HEADER_BYTES + ADDRESS_BYTES * len(self.heard_neighbors)


@dataclass(frozen=True)
class TcMsg:
    originator: int
    seq: int
    advertised_links: tuple[int, ...]
    sent_at: float = 0.0

    @property
    def size_bytes(self) -> int:
        return TC_HEADER_BYTES + ADDRESS_BYTES * len(self.advertised_links)


@dataclass(frozen=True)
class DataPacket:
    uid: int
    source: int
    destination: int
    created_at: float
    payload_bytes: int
    ttl: int


@dataclass(frozen=True)
class Route:
    next_hop: int
    hop_count: int


RoutingTable = dict[int, Route]


def compute_routes(
    root: int,
    own_links: Iterable[int],
    advertised: Mapping[int, Iterable[int]] | None = None,
) -> RoutingTable:
    """Shortest-hop routes from ``root``.

    ``own_links`` are the root's usable neighbors; ``advertised`` maps each
    TC originator to the neighbors it advertises (treated as undirected).
    Links touching the root are taken only from ``own_links``. Among equal
    hop counts the smallest next-hop id wins.
    """
    graph: dict[int, set[int]] = {}
    for orig, links in (advertised or {}).items():
        if orig == root:
            continue
        for v in links:
            if v == root or v == orig:
                continue
            graph.setdefault(orig, set()).add(v)
            graph.setdefault(v, set()).add(orig)

    dist = {root: 0}
    table: RoutingTable = {}
    frontier = []
    for n in sorted(set(own_links)):
        if n == root:
            continue
        dist[n] = 1
        table[n] = Route(n, 1)
        frontier.append(n)
    hops = 1
    while frontier:
        nxt = []
        for u in frontier:
            via = table[u].next_hop
            for v in sorted(graph.get(u, ())):
                if v not in dist:
                    dist[v] = hops + 1
                    table[v] = Route(via, hops + 1)
                    nxt.append(v)
                elif dist[v] == hops + 1 and via < table[v].next_hop:
                    table[v] = Route(via, hops + 1)
        frontier = sorted(nxt)
        hops += 1
    return table


@dataclass
class TopologyEntry:
    seq: int
    links: tuple[int, ...]
    received_at: float


@dataclass
class NodeState:
    node_id: int
    entries: dict[int, adj.LinkEntry] = field(default_factory=dict)
    miss_timers: dict[int, EventHandle] = field(default_factory=dict)
    topology: dict[int, TopologyEntry] = field(default_factory=dict)
    seen_tc: set[tuple[int, int]] = field(default_factory=set)
    routes: RoutingTable = field(default_factory=dict)
    routes_expire_at: float = float("inf")
    hello_seq: int = 0
    tc_seq: int = 0
    active: bool = True

    def usable_neighbors(self) -> list[int]:
        return sorted(n for n, e in self.entries.items() if e.usable)

    def heard_neighbors(self) -> tuple[int, ...]:
        return tuple(sorted(n for n, e in self.entries.items() if e.status is not adj.LinkStatus.INVALID))


@dataclass
class LinkChange:
    t: float
    node: int
    neighbor: int
    kind: str


class Network:
    """One simulation run: node states, the event queue and per-run counters."""

    def __init__(
        self,
        scenario: Scenario,
        algorithm: Algorithm,
        loss_params: adj.LossHysteresisParams,
        signal_params: adj.SignalHysteresisParams,
        seed: int,
        record_trace: bool = False,
        traffic: bool = True,
    ):
        self.scenario = scenario
        self.timing: TimingParams = scenario.timing
        self.algorithm = Algorithm(algorithm)
        self.loss_params = loss_params
        self.signal_params = signal_params
        self.rng = RngStreams(seed)
        self.queue = EventQueue()
        self.nodes = [NodeState(i) for i in range(scenario.n_nodes)]
        self.counters: Counter[str] = Counter()
        self.link_changes: list[LinkChange] = []
        self.trace: list[str] | None = [] if record_trace else None
        self._hash = hashlib.sha256()
        self._next_uid = 0
        self._traffic = traffic
        self._started = False

    @property
    def now(self) -> float:
        return self.queue.now

    @property
    def quality_params(self):
        return self.loss_params if self.algorithm is Algorithm.LOSS else self.signal_params

    # -- bookkeeping ---------------------------------------------------------

    def log(self, node: int | None, kind: str, details: str = "") -> None:
        line = f"{self.now:.9f},{'' if node is None else node},{kind},{details}"
        self._hash.update(line.encode())
        self._hash.update(b"\n")
        if self.trace is not None:
            self.trace.append(line)

    def trace_hash(self) -> str:
        return self._hash.hexdigest()

    def distance(self, a: int, b: int, t: float | None = None) -> float:
        t = self.now if t is None else t
        d = distance(self.scenario.position(a, t), self.scenario.position(b, t))
        return max(d, MIN_DISTANCE)

    def _radio(self, sender: int, receiver: int, purpose: str):
        p = self.scenario.radio
        power = rx_power(p, self.distance(sender, receiver))
        return reception_decision(
            p,
            power,
            self.rng.stream(f"shadow_{purpose}", receiver),
            self.rng.stream(f"loss_{purpose}", receiver),
        )

    # -- lifecycle -----------------------------------------------------------

    def start(self) -> None:
        if self._started:
            return
        self._started = True
        tm = self.timing
        for n in self.nodes:
            jitter = self.rng.stream("jitter", n.node_id).uniform(0.0, tm.hello_jitter_max)
            self.queue.schedule(tm.hello_interval - jitter, EventKind.HELLO_EMIT, self.emit_hello, n.node_id, node=n.node_id)
            self.queue.schedule(tm.tc_interval, EventKind.TC_EMIT, self.emit_tc, n.node_id, node=n.node_id)
        tr = self.scenario.traffic
        if self._traffic and tr.start_time < self.scenario.end_time:
            self.queue.schedule(tr.start_time, EventKind.TRAFFIC_GEN, self.generate_data, 0, node=self.scenario.source)

    def run(self, t_end: float | None = None) -> int:
        self.start()
        return self.queue.run_until(self.scenario.end_time if t_end is None else t_end)

    def stop_node(self, node: int) -> None:
        """Silence a node: it stops sending anything from now on."""
        self.nodes[node].active = False
        self.log(node, "NodeStopped")

    # -- Hello ---------------------------------------------------------------

    def emit_hello(self, node: int) -> None:
        st = self.nodes[node]
        tm = self.timing
        jitter = self.rng.stream("jitter", node).uniform(0.0, tm.hello_jitter_max)
        self.queue.schedule(self.now + tm.hello_interval - jitter, EventKind.HELLO_EMIT, self.emit_hello, node, node=node)
        if not st.active:
            return
        st.hello_seq += 1
        msg = HelloMsg(node, st.hello_seq, st.heard_neighbors())
        self.counters["hello_tx"] += 1
        self.counters["control_tx"] += 1
        self.counters["control_bytes"] += msg.size_bytes
        self.log(node, "HelloEmit", f"seq={msg.seq} heard={'|'.join(map(str, msg.heard_neighbors))}")
        for other in range(len(self.nodes)):
            if other == node:
                continue
            outcome = self._radio(node, other, "ctrl")
            if isinstance(outcome, Dropped):
                continue
            self.queue.schedule(
                self.now + DELIVERY_DELAY, EventKind.DELIVERY, self.process_hello,
                other, msg, outcome.effective_power, node=other,
            )

    def process_hello(self, node: int, msg: HelloMsg, power: float) -> adj.LinkEvent:
        st = self.nodes[node]
        src = msg.originator
        now = self.now
        entry = st.entries.get(src)
        was_usable = entry is not None and entry.usable
        if entry is None:
            entry = adj.create_entry(src, self.quality_params, now, st.entries)
            self.log(node, "NeighborCreated", f"nbr={src}")
        if self.algorithm is Algorithm.LOSS:
            entry, ev = adj.loss_on_hello(entry, self.loss_params, now)
            entry = replace(entry, last_ss=power)
        else:
            entry, ev = adj.signal_on_hello(entry, power, self.signal_params, now)
        entry = replace(entry, symmetric=node in msg.heard_neighbors)
        st.entries[src] = entry
        self.log(node, "HelloRecv", f"from={src} ss={power:.6f} q={entry.link_quality:.12g} status={entry.status.value}")
        self._record(node, ev)
        self._arm_miss_timer(node, src, now + self.timing.miss_timeout_factor * self.timing.hello_interval)
        if was_usable != entry.usable:
            self.recompute(node)
        return ev

    def _record(self, node: int, ev: adj.LinkEvent) -> None:
        if ev.changed:
            self.link_changes.append(LinkChange(self.now, node, ev.neighbor, ev.kind.value))
            self.log(node, ev.kind.value, f"nbr={ev.neighbor}")

    def _arm_miss_timer(self, node: int, nbr: int, at: float) -> None:
        st = self.nodes[node]
        old = st.miss_timers.get(nbr)
        if old is not None:
            self.queue.cancel(old)
        st.miss_timers[nbr] = self.queue.schedule(at, EventKind.HELLO_MISS_CHECK, self.hello_miss, node, nbr, node=node)

    def hello_miss(self, node: int, nbr: int) -> None:
        st = self.nodes[node]
        entry = st.entries.get(nbr)
        if entry is None:
            return
        was_usable = entry.usable
        if self.algorithm is Algorithm.LOSS:
            entry, ev = adj.loss_on_miss(entry, self.loss_params, self.now)
        else:
            entry, ev = adj.on_hello_miss_signal(entry, self.signal_params, self.now)
        self.log(node, "HelloMiss", f"nbr={nbr} q={entry.link_quality:.12g}")
        self._record(node, ev)
        if adj.expire_entry(entry, self.now, self.timing.neighbor_hold_time) is adj.Expiry.REMOVE:
            del st.entries[nbr]
            del st.miss_timers[nbr]
            self.log(node, "NeighborExpired", f"nbr={nbr}")
            if was_usable:
                self.link_changes.append(LinkChange(self.now, node, nbr, "Expired"))
            self.recompute(node)
            return
        st.entries[nbr] = entry
        self._arm_miss_timer(node, nbr, self.now + self.timing.hello_interval)
        if was_usable != entry.usable:
            self.recompute(node)

    # -- topology control ----------------------------------------------------

    def emit_tc(self, node: int) -> int:
        """Originate a TC if the node has any neighbor record; return transmissions made."""
        st = self.nodes[node]
        self.queue.schedule(self.now + self.timing.tc_interval, EventKind.TC_EMIT, self.emit_tc, node, node=node)
        if not st.active or not st.entries:
            return 0
        st.tc_seq += 1
        msg = TcMsg(node, st.tc_seq, tuple(st.usable_neighbors()), self.now)
        st.seen_tc.add((node, msg.seq))
        self._broadcast_tc(node, msg)
        return 1

    def _broadcast_tc(self, node: int, msg: TcMsg) -> None:
        self.counters["tc_tx"] += 1
        self.counters["control_tx"] += 1
        self.counters["control_bytes"] += msg.size_bytes
        self.log(node, "TcTx", f"orig={msg.originator} seq={msg.seq}")
        for other in range(len(self.nodes)):
            if other == node:
                continue
            outcome = self._radio(node, other, "ctrl")
            if isinstance(outcome, Dropped):
                continue
            self.queue.schedule(self.now + DELIVERY_DELAY, EventKind.DELIVERY, self.process_tc, other, msg, node=other)

    def process_tc(self, node: int, msg: TcMsg) -> None:
        st = self.nodes[node]
        key = (msg.originator, msg.seq)
        if key in st.seen_tc:
            return
        st.seen_tc.add(key)
        cur = st.topology.get(msg.originator)
        if msg.originator != node and (cur is None or msg.seq > cur.seq):
            st.topology[msg.originator] = TopologyEntry(msg.seq, msg.advertised_links, self.now)
            if cur is None or cur.links != msg.advertised_links:
                self.recompute(node)
        if st.active:
            self._broadcast_tc(node, msg)

    # -- routes and data -----------------------------------------------------

    def recompute(self, node: int) -> None:
        st = self.nodes[node]
        horizon = self.now - self.timing.topology_hold_time
        for orig in [o for o, t in st.topology.items() if t.received_at < horizon]:
            del st.topology[orig]
        advertised = {o: t.links for o, t in st.topology.items()}
        st.routes = compute_routes(node, st.usable_neighbors(), advertised)
        st.routes_expire_at = min(
            (t.received_at + self.timing.topology_hold_time for t in st.topology.values()),
            default=float("inf"),
        )

    def generate_data(self, k: int) -> None:
        tr = self.scenario.traffic
        src = self.scenario.source
        nxt = tr.start_time + (k + 1) / tr.packets_per_second
        if nxt < self.scenario.end_time:
            self.queue.schedule(nxt, EventKind.TRAFFIC_GEN, self.generate_data, k + 1, node=src)
        if not self.nodes[src].active:
            return
        pkt = DataPacket(self._next_uid, src, self.scenario.sink, self.now, tr.payload_bytes, self.timing.ttl)
        self._next_uid += 1
        self.counters["data_sent"] += 1
        self.log(src, "DataGen", f"uid={pkt.uid}")
        self.forward(src, pkt)

    def forward(self, node: int, pkt: DataPacket) -> str:
        """Send ``pkt`` one hop toward its destination; return what happened."""
        st = self.nodes[node]
        if self.now > st.routes_expire_at:
            self.recompute(node)
        route = st.routes.get(pkt.destination)
        if route is None:
            return self._drop(node, pkt, "NoRoute")
        if pkt.ttl <= 0:
            return self._drop(node, pkt, "TtlExpired")
        pkt = replace(pkt, ttl=pkt.ttl - 1)
        outcome = self._radio(node, route.next_hop, "data")
        self.counters["data_tx"] += 1
        if isinstance(outcome, Dropped):
            return self._drop(node, pkt, outcome.reason.value, route.next_hop)
        self.queue.schedule(self.now + DELIVERY_DELAY, EventKind.DELIVERY, self.receive_data, route.next_hop, pkt, node=route.next_hop)
        self.log(node, "DataTx", f"uid={pkt.uid} to={route.next_hop}")
        return "Sent"

    def _drop(self, node: int, pkt: DataPacket, reason: str, to: int | None = None) -> str:
        self.counters[f"drop_{reason}"] += 1
        self.log(node, "DataDrop", f"uid={pkt.uid} reason={reason}" + ("" if to is None else f" to={to}"))
        return reason

    def receive_data(self, node: int, pkt: DataPacket) -> None:
        if pkt.destination == node:
            self.counters["data_received"] += 1
            self.log(node, "DataRecv", f"uid={pkt.uid}")
            return
        self.forward(node, pkt)
