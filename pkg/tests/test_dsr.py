"""Routing behavior: discovery, avoid lists, caching, route errors."""

from conftest import make_sim, trace_records

from rismsim.dsr import Node, RouteCacheEntry
from rismsim.packets import RREQ, Frame, Packet

CHAIN = [(0.0, 0.0), (200.0, 0.0), (400.0, 0.0)]
# A diamond: 0 can reach 3 via 1 or via 2; 0 and 3 out of mutual range.
DIAMOND = [(0.0, 0.0), (200.0, 0.0), (0.0, 200.0), (200.0, 200.0)]


def test_chain_discovery_delivers_data():
    sim = make_sim(CHAIN, connections=[(0, 2, 0.0)], duration=10.0)
    result = sim.run()
    assert result.report.pdr > 0.95
    assert sim.nodes[0].best_route(2) == (0, 1, 2)


def test_rreq_avoid_list_reflects_faulty_list():
    sim = make_sim(CHAIN, connections=[], duration=1.0)
    sim.run()
    origin = sim.nodes[0]
    origin.ids.table.declare(9, now=0.0)  # a fictitious known-bad node
    sent = []
    sim.link.send = lambda tx, dest, pkt: sent.append(pkt) or True
    origin._originate_rreq(2, 0.5)
    assert sent[0].kind == RREQ
    assert sent[0].avoid_list == frozenset({9})


def test_honest_node_drops_rreq_naming_it():
    sim = make_sim(CHAIN, connections=[], duration=1.0)
    sim.run()
    relay = sim.nodes[1]
    rreq = Packet(RREQ, origin=0, final_dest=2, rreq_id=7,
                  route_record=(0,), avoid_list=frozenset({1}))
    relay.receive(Frame(0, -1, rreq, 0.0))
    assert trace_records(sim, "rreq-drop", node=1)


def test_forwarded_rreq_merges_faulty_list():
    sim = make_sim(DIAMOND, connections=[], duration=1.0)
    sim.run()
    relay = sim.nodes[1]
    relay.ids.table.declare(9, now=0.0)
    sent = []
    sim.link.send = lambda tx, dest, pkt: sent.append(pkt) or True
    rreq = Packet(RREQ, origin=0, final_dest=3, rreq_id=3,
                  route_record=(0,), avoid_list=frozenset({8}))
    relay.receive(Frame(0, -1, rreq, 0.0))
    fwd = [p for p in sent if p.kind == RREQ]
    assert len(fwd) == 1
    assert fwd[0].avoid_list == frozenset({8, 9})
    assert fwd[0].route_record == (0, 1)


def test_duplicate_rreq_forwarded_once():
    sim = make_sim(DIAMOND, connections=[], duration=1.0)
    sim.run()
    relay = sim.nodes[1]
    sent = []
    sim.link.send = lambda tx, dest, pkt: sent.append(pkt) or True
    rreq = Packet(RREQ, origin=0, final_dest=3, rreq_id=5, route_record=(0,))
    relay.receive(Frame(0, -1, rreq, 0.0))
    relay.receive(Frame(2, -1, rreq, 0.0))
    assert len([p for p in sent if p.kind == RREQ]) == 1


def test_rreq_with_self_in_route_record_dropped():
    sim = make_sim(DIAMOND, connections=[], duration=1.0)
    sim.run()
    relay = sim.nodes[1]
    sent = []
    sim.link.send = lambda tx, dest, pkt: sent.append(pkt) or True
    rreq = Packet(RREQ, origin=0, final_dest=3, rreq_id=6,
                  route_record=(0, 1, 2))
    relay.receive(Frame(2, -1, rreq, 0.0))
    assert sent == []


def test_destination_replies_with_accumulated_route():
    sim = make_sim(CHAIN, connections=[], duration=1.0)
    sim.run()
    dest = sim.nodes[2]
    sent = []
    sim.link.send = lambda tx, dest_, pkt: sent.append((dest_, pkt)) or True
    rreq = Packet(RREQ, origin=0, final_dest=2, rreq_id=1,
                  route_record=(0, 1))
    dest.receive(Frame(1, -1, rreq, 0.0))
    (link_dest, rrep), = sent
    assert rrep.kind == "RREP"
    assert rrep.source_route == (0, 1, 2)
    assert link_dest == 1  # unicast back along the reversed record


def test_purge_link_removes_exact_consecutive_pair_only():
    sim = make_sim(CHAIN, connections=[], duration=1.0, trace=False)
    sim.run()
    node = sim.nodes[0]
    node.route_cache = [RouteCacheEntry((0, 1, 2), 0.0),
                        RouteCacheEntry((0, 2, 1), 0.0),
                        RouteCacheEntry((0, 1), 0.0)]
    node.purge_link(1, 2)
    assert [e.path for e in node.route_cache] == [(0, 2, 1), (0, 1)]


def test_purge_node_keeps_routes_ending_at_subject():
    sim = make_sim(CHAIN, connections=[], duration=1.0, trace=False)
    sim.run()
    node = sim.nodes[0]
    node.route_cache = [RouteCacheEntry((0, 1, 2), 0.0),
                        RouteCacheEntry((0, 2, 1), 0.0)]
    node.purge_node(1)
    # (0,1,2) uses 1 as a relay: purged.  (0,2,1) merely ends at 1: kept.
    assert [e.path for e in node.route_cache] == [(0, 2, 1)]


def test_cached_route_never_contains_malicious_relay():
    sim = make_sim(DIAMOND, connections=[], duration=1.0, trace=False)
    sim.run()
    node = sim.nodes[0]
    node.ids.table.declare(1, now=0.0)
    node.add_route((0, 1, 3))
    assert node.route_cache == []
    node.add_route((0, 2, 3))
    assert [e.path for e in node.route_cache] == [(0, 2, 3)]


def test_route_selection_prefers_clean_path():
    sim = make_sim(DIAMOND, connections=[], duration=1.0, trace=False)
    sim.run()
    node = sim.nodes[0]
    node.ids.table.record(1).rating = -15.0  # suspicious relay
    node.add_route((0, 1, 3))
    node.add_route((0, 2, 3))
    assert node.best_route(3) == (0, 2, 3)


def test_recent_route_wins_ties():
    sim = make_sim(DIAMOND, connections=[], duration=1.0, trace=False)
    sim.run()
    node = sim.nodes[0]
    node.add_route((0, 1, 3))
    node.route_cache[0].learned_at = 0.0
    node.add_route((0, 2, 3))
    node.route_cache[1].learned_at = 1.0
    assert node.best_route(3) == (0, 2, 3)


def test_malicious_node_drops_data_but_forwards_control():
    sim = make_sim(CHAIN, malicious={1}, connections=[(0, 2, 0.0)],
                   duration=20.0, malicious_drop_probability=1.0,
                   protocol="dsr", malicious_sources=True)
    result = sim.run()
    assert result.report.data_received == 0
    assert result.report.drops_by_cause["behavior"] > 0
    # Control kept flowing: the route was discovered through the dropper.
    assert sim.nodes[0].best_route(2) == (0, 1, 2)


def test_rerr_reaches_origin_and_triggers_rediscovery():
    # Start with a working chain, then teleport the relay out of range.
    sim = make_sim(CHAIN, connections=[(0, 2, 0.0)], duration=30.0)
    from rismsim.mobility import Segment

    def break_link():
        sim.mobility._segments[1] = [
            Segment(0.0, sim.cfg.duration, 900.0, 900.0, 900.0, 900.0, 0.0)]
        sim.mobility._starts[1] = [0.0]
        sim.mobility._cursor[1] = 0

    sim.sched.schedule(10.0, "teleport", break_link)
    result = sim.run()
    # Deliveries up to the break, link-loss drops after it, and the origin
    # keeps retrying discovery (node 2 is unreachable afterwards).
    assert result.report.data_received > 30
    assert result.report.drops_by_cause["linkloss"] >= 1
    rreqs = trace_records(sim, "rreq", node=0)
    assert any(t > 10.0 for t, _, _, _ in rreqs)


def test_defenseless_avoid_lists_stay_empty():
    sim = make_sim(DIAMOND, connections=[(0, 3, 0.0)], duration=10.0,
                   protocol="dsr")
    sim.run()
    # Without the IDS no node has a faulty list, so no RREQ carries names.
    assert all(node.faulty == set() for node in sim.nodes.values())
