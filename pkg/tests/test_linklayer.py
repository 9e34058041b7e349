"""Link-layer tests: queues, congestion, delivery and overhearing."""

from rismsim.config import ScenarioConfig
from rismsim.core import Scheduler
from rismsim.linklayer import LinkLayer
from rismsim.metrics import Metrics
from rismsim.mobility import Mobility, Segment
from rismsim.packets import ADDRESSED, BROADCAST, DATA, RREQ, Packet


class StubNode:
    def __init__(self, node_id):
        self.node_id = node_id
        self.received = []
        self.overheard = []
        self.failed = []

    def receive(self, frame, kind=ADDRESSED):
        self.received.append((frame, kind))

    def overhear(self, frame):
        self.overheard.append(frame)

    def on_unicast_failed(self, frame):
        self.failed.append(frame)


def build(positions, protocol="rism", **cfg_kw):
    cfg = ScenarioConfig(nodes=len(positions), protocol=protocol, **cfg_kw)
    from rismsim.core import RngStreams
    streams = RngStreams(1)
    mob = Mobility(cfg, streams.scenario, streams.mobility)
    for node, (x, y) in enumerate(positions):
        mob._segments[node] = [Segment(0.0, cfg.duration, x, y, x, y, 0.0)]
        mob._starts[node] = [0.0]
        mob._cursor[node] = 0
    sched = Scheduler()
    link = LinkLayer(sched, mob, cfg, Metrics())
    nodes = [StubNode(i) for i in range(len(positions))]
    for n in nodes:
        link.register_node(n)
    return sched, link, nodes


def data(seq=1, size=64):
    return Packet(DATA, origin=0, final_dest=2, seq=seq, payload_size=size)


def test_congestion_parameter_values():
    sched, link, nodes = build([(0, 0), (100, 0)])
    assert link.congestion_parameter(0) == 0.0
    for i in range(5):
        link.send(0, 1, data(seq=i))
    assert link.congestion_parameter(0) == 5 / 50
    for i in range(5, 50):
        link.send(0, 1, data(seq=i))
    assert link.congestion_parameter(0) == 1.0


def test_overflow_returns_false_and_counts_queue_drop():
    sched, link, nodes = build([(0, 0), (100, 0)])
    for i in range(50):
        assert link.send(0, 1, data(seq=i))
    overflow = data(seq=50)
    link.metrics.record_sent(overflow)
    assert not link.send(0, 1, overflow)
    assert link.metrics.drops["queue"] == 1


def test_service_time_from_link_rate():
    sched, link, nodes = build([(0, 0), (100, 0)])
    # 64 B payload + 24 B overhead at 2 Mbps.
    assert link.service_time(data()) == (64 + 24) * 8 / 2e6
    rreq = Packet(RREQ, origin=0, final_dest=1)
    assert link.service_time(rreq) == (32 + 24) * 8 / 2e6


def test_fifo_serialization_of_deliveries():
    sched, link, nodes = build([(0, 0), (100, 0)])
    link.send(0, 1, data(seq=1))
    link.send(0, 1, data(seq=2))
    per_frame = link.service_time(data()) + link.cfg.propagation_delay
    sched.run_until(per_frame * 1.5)
    assert [f.packet.seq for f, _ in nodes[1].received] == [1]
    sched.run_until(per_frame * 2.5)
    assert [f.packet.seq for f, _ in nodes[1].received] == [1, 2]


def test_chain_topology_delivery_and_no_out_of_range_overhear():
    # A(0) - B(250) - C(500): A and C mutually out of range.
    sched, link, nodes = build([(0, 0), (250, 0), (500, 0)])
    link.send(0, 1, data())
    sched.run_until(1.0)
    assert len(nodes[1].received) == 1
    assert nodes[2].received == []
    assert nodes[2].overheard == []


def test_promiscuous_copy_within_range():
    sched, link, nodes = build([(0, 0), (100, 0), (50, 80)])
    link.send(0, 1, data())
    sched.run_until(1.0)
    assert len(nodes[1].received) == 1
    assert len(nodes[2].overheard) == 1
    assert nodes[2].received == []


def test_no_promiscuous_mode_in_defenseless_protocol():
    sched, link, nodes = build([(0, 0), (100, 0), (50, 80)], protocol="dsr")
    link.send(0, 1, data())
    sched.run_until(1.0)
    assert len(nodes[1].received) == 1
    assert nodes[2].overheard == []


def test_broadcast_addressed_to_all_neighbors():
    sched, link, nodes = build([(0, 0), (100, 0), (50, 80), (900, 900)])
    pkt = Packet(RREQ, origin=0, final_dest=3, route_record=(0,))
    link.send(0, BROADCAST, pkt)
    sched.run_until(1.0)
    assert len(nodes[1].received) == 1
    assert len(nodes[2].received) == 1
    assert nodes[3].received == []


def test_unicast_to_out_of_range_dest_is_silent_loss_with_callback():
    sched, link, nodes = build([(0, 0), (600, 0), (50, 80)])
    link.send(0, 1, data())
    sched.run_until(1.0)
    assert nodes[1].received == []
    assert len(nodes[0].failed) == 1
    # Remaining neighbors still overhear the doomed frame.
    assert len(nodes[2].overheard) == 1
