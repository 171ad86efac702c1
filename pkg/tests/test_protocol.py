import random

import pytest

from dbwsim.errors import EncodeError
from dbwsim.protocol import (CAPTURE_RX, CAPTURE_TX, Endpoint, FrameKind,
                             LinkConfig, TapPipe, WireFrame, capture_line,
                             decode, encode, parse_capture_line, pipe_pair)


class TestEncode:
    def test_speed_command_form(self):
        assert encode(WireFrame.speed_cmd(210)) == b"FA:210\n"

    def test_battery_query(self):
        assert encode(WireFrame.battery_query()) == b"BV\n"

    def test_heartbeat(self):
        assert encode(WireFrame.heartbeat(1500)) == b"HB:1500\n"

    def test_battery_reply(self):
        assert encode(WireFrame.battery_reply(2400)) == b"BV:2400\n"

    def test_single_terminator_printable_ascii(self):
        for frame in (WireFrame.speed_cmd(0), WireFrame.steer_cmd(2500),
                      WireFrame.battery_query(), WireFrame.heartbeat(0)):
            data = encode(frame)
            assert data.count(b"\n") == 1 and data.endswith(b"\n")
            assert all(0x20 <= b < 0x7F for b in data[:-1])

    def test_invariant_violations_raise(self):
        with pytest.raises(EncodeError):
            encode(WireFrame.speed_cmd(256))
        with pytest.raises(EncodeError):
            encode(WireFrame.steer_cmd(999))
        with pytest.raises(EncodeError):
            encode(WireFrame.heartbeat(-1))
        with pytest.raises(EncodeError):
            encode(WireFrame.malformed("junk"))


class TestDecode:
    def test_speed_endpoint(self):
        frame = decode(b"FA:170\n", Endpoint.SPEED_CONTROLLER)
        assert frame == WireFrame.speed_cmd(170)

    def test_steering_endpoint(self):
        frame = decode(b"FA:1900\n", Endpoint.STEERING_CONTROLLER)
        assert frame == WireFrame.steer_cmd(1900)

    def test_endpoint_keeps_ranges_apart(self):
        # A steering count must never be taken for a speed byte.
        assert decode(b"FA:1900\n", Endpoint.SPEED_CONTROLLER).kind \
            is FrameKind.MALFORMED
        assert decode(b"FA:170\n", Endpoint.STEERING_CONTROLLER).kind \
            is FrameKind.MALFORMED

    def test_out_of_range_steering(self):
        assert decode(b"FA:9999\n", Endpoint.STEERING_CONTROLLER).kind \
            is FrameKind.MALFORMED

    def test_malformed_preserves_raw(self):
        frame = decode(b"FX:20\n", Endpoint.SPEED_CONTROLLER)
        assert frame.kind is FrameKind.MALFORMED
        assert frame.raw == "FX:20"

    def test_non_ascii_is_malformed(self):
        assert decode(b"\xff\xfe\n", Endpoint.SPEED_CONTROLLER).kind \
            is FrameKind.MALFORMED

    def test_signs_and_spaces_rejected(self):
        for line in (b"FA:-5\n", b"FA: 170\n", b"FA:170 \n", b"fa:170\n",
                     b"FA:\n", b"HB:-1\n", b"BV:1.5\n"):
            assert decode(line, Endpoint.SPEED_CONTROLLER).kind \
                is FrameKind.MALFORMED, line


def random_frame(rng) -> WireFrame:
    kind = rng.randrange(5)
    if kind == 0:
        return WireFrame.speed_cmd(rng.randrange(256))
    if kind == 1:
        return WireFrame.steer_cmd(rng.randrange(1000, 2501))
    if kind == 2:
        return WireFrame.battery_query()
    if kind == 3:
        return WireFrame.battery_reply(rng.randrange(5000))
    return WireFrame.heartbeat(rng.randrange(10 ** 9))


def endpoint_for(frame: WireFrame) -> Endpoint:
    return Endpoint.STEERING_CONTROLLER if frame.kind is FrameKind.STEER_CMD \
        else Endpoint.SPEED_CONTROLLER


class TestRoundTrip:
    def test_edge_frames(self):
        for frame in (WireFrame.speed_cmd(80), WireFrame.speed_cmd(0),
                      WireFrame.speed_cmd(255), WireFrame.steer_cmd(1000),
                      WireFrame.steer_cmd(2500), WireFrame.heartbeat(0)):
            assert decode(encode(frame), endpoint_for(frame)) == frame

    def test_random_frames(self):
        rng = random.Random(1234)
        for _ in range(10_000):
            frame = random_frame(rng)
            assert decode(encode(frame), endpoint_for(frame)) == frame

    def test_decode_is_total_under_fuzz(self):
        rng = random.Random(99)
        for _ in range(100_000):
            n = rng.randrange(0, 24)
            line = bytes(rng.randrange(256) for _ in range(n)) + b"\n"
            for endpoint in Endpoint:
                frame = decode(line, endpoint)
                assert isinstance(frame, WireFrame)

    def test_stateless_across_lines(self):
        # A malformed line must not disturb the next decode.
        decode(b"FA:12junk\n", Endpoint.SPEED_CONTROLLER)
        assert decode(b"FA:12\n", Endpoint.SPEED_CONTROLLER) == \
            WireFrame.speed_cmd(12)


class TestLinkConfig:
    def test_default_baud_preserved(self):
        assert LinkConfig().baud == 112_000

    def test_rejects_bad_baud(self):
        with pytest.raises(ValueError):
            LinkConfig(baud=0)


class TestPipes:
    def test_duplex(self):
        a, b = pipe_pair()
        a.send_line(b"FA:170\n")
        b.send_line(b"BV:2400\n")
        assert b.poll_lines() == [b"FA:170\n"]
        assert a.poll_lines() == [b"BV:2400\n"]
        assert b.poll_lines() == []

    def test_close(self):
        a, _ = pipe_pair()
        a.close()
        with pytest.raises(ConnectionError):
            a.send_line(b"x\n")


class TestCapture:
    def test_format(self):
        line = capture_line(CAPTURE_TX, 0.01234, WireFrame.speed_cmd(170))
        assert line == "> 0.01234 FA:170"

    def test_parse_round_trip(self):
        direction, t, body = parse_capture_line("< 1.50000 BV:2399")
        assert direction == CAPTURE_RX
        assert t == pytest.approx(1.5)
        assert body == "BV:2399"

    def test_parse_rejects_junk(self):
        with pytest.raises(ValueError):
            parse_capture_line("FA:170")

    def test_tap_records_both_directions(self):
        a, b = pipe_pair()
        lines = []
        clock = iter([0.0, 0.01, 0.02, 0.03]).__next__
        tap = TapPipe(a, clock, lines)
        tap.send_line(b"FA:170\n")
        b.send_line(b"BV:2400\n")
        tap.poll_lines()
        assert lines == ["> 0.00000 FA:170", "< 0.01000 BV:2400"]
