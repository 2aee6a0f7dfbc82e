import threading

import pytest

from gesturebot.bus import BusError, MessageBus


@pytest.fixture
def bus():
    return MessageBus()


class TestPublish:
    def test_no_subscribers_ok(self, bus):
        assert bus.publish("robot/state", {"x": 1}) == 1

    def test_seq_increments(self, bus):
        a = bus.publish("robot/state", {})
        b = bus.publish("robot/state", {})
        assert b == a + 1

    def test_unknown_topic(self, bus):
        with pytest.raises(BusError):
            bus.publish("nope", {})
        with pytest.raises(BusError):
            bus.subscribe("nope")

    def test_schema_enforced(self):
        bus = MessageBus(schema={"robot/state": dict})
        with pytest.raises(BusError):
            bus.publish("robot/state", "not a dict")

    def test_counting_oracle(self, bus):
        sub = bus.subscribe("robot/state", maxsize=20000)
        for i in range(10_000):
            bus.publish("robot/state", {"i": i})
        msgs = sub.drain()
        assert len(msgs) == 10_000
        assert [m.seq for m in msgs] == list(range(1, 10_001))


class TestSubscribe:
    def test_no_replay(self, bus):
        bus.publish("robot/state", {"early": True})
        sub = bus.subscribe("robot/state")
        assert sub.drain() == []

    def test_drop_oldest_arithmetic(self, bus):
        sub = bus.subscribe("robot/state", maxsize=64)
        for i in range(1000):
            bus.publish("robot/state", {"i": i})
        msgs = sub.drain()
        assert sub.dropped == 936
        assert len(msgs) == 64
        assert [m.payload["i"] for m in msgs] == list(range(936, 1000))
        assert sub.delivered + sub.dropped == bus.published_count("robot/state")

    def test_fanout_identical(self, bus):
        a = bus.subscribe("robot/state", maxsize=128)
        b = bus.subscribe("robot/state", maxsize=128)
        for i in range(100):
            bus.publish("robot/state", {"i": i})
        assert [m.seq for m in a.drain()] == [m.seq for m in b.drain()]

    def test_no_cross_talk(self, bus):
        state = bus.subscribe("robot/state")
        bus.publish("safety/events", {"reasons": []})
        assert state.drain() == []

    def test_fifo_under_concurrency(self, bus):
        sub = bus.subscribe("robot/state", maxsize=1 << 16)
        n_threads, per_thread = 8, 500

        def producer():
            for _ in range(per_thread):
                bus.publish("robot/state", {})

        threads = [threading.Thread(target=producer) for _ in range(n_threads)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        seqs = [m.seq for m in sub.drain()]
        assert seqs == sorted(seqs)
        assert len(seqs) == n_threads * per_thread

    def test_blocking_get(self, bus):
        sub = bus.subscribe("robot/state")
        got = []

        def consumer():
            got.append(sub.get(timeout=2.0))

        t = threading.Thread(target=consumer)
        t.start()
        bus.publish("robot/state", {"hello": 1})
        t.join()
        assert got[0].payload == {"hello": 1}
