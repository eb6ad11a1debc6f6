import io

import numpy as np
import pytest

from csagg.errors import ConfigError, DimensionError, TraceFormatError
from csagg.graph import RiderPositions, knn_graph
from csagg.mobility import (
    PelotonParams,
    RaceTrace,
    ingest_trace,
    read_velocity_csv,
    simulate_race,
    velocities,
    write_trace_csv,
    write_velocity_csv,
)


def quiet_params(**kw):
    defaults = dict(
        n=10,
        duration=50.0,
        separation_gain=0.0,
        alignment_gain=0.0,
        cohesion_gain=0.0,
        breakaway_rate=0.0,
        speed_jitter=0.0,
    )
    defaults.update(kw)
    return PelotonParams(**defaults)


class TestSimulateRace:
    def test_trivial_dynamics_reduce_to_profile(self):
        trace = simulate_race(quiet_params())
        for frame in velocities(trace):
            assert np.abs(frame.x - 10.0).max() <= 1e-9

    def test_velocity_spread_contracts(self):
        # alignment/cohesion contract: initial speed spread does not grow
        params = PelotonParams(breakaway_rate=0.0, speed_jitter=1.0, duration=400.0)
        vels = velocities(simulate_race(params))
        assert vels[299].x.std() <= vels[0].x.std()

    def test_race_scale_run(self):
        params = PelotonParams(breakaway_rate=0.0)  # n=130, 780 s, dt=1 s
        trace = simulate_race(params)
        assert len(trace.frames) == 780
        assert trace.n == 130
        vels = velocities(trace)
        idx = 400
        graph = knn_graph(trace.frames[idx], 10)
        diffs = [abs(vels[idx].x[i] - vels[idx].x[j]) for i, j in graph.edges]
        assert np.median(diffs) < 0.5

    def test_deterministic_bit_identical(self):
        params = PelotonParams(n=20, duration=40.0, seed=99)
        a = simulate_race(params)
        b = simulate_race(params)
        for fa, fb in zip(a.frames, b.frames):
            assert np.array_equal(fa.pos, fb.pos)

    def test_lateral_corridor(self):
        trace = simulate_race(PelotonParams(n=40, duration=200.0, separation_gain=5.0))
        for frame in trace.frames:
            assert np.abs(frame.pos[:, 1]).max() <= 5.0

    def test_euler_round_trip(self):
        trace = simulate_race(PelotonParams(n=30, duration=300.0))
        vels = velocities(trace)
        s = trace.frames[0].pos[:, 0].copy()
        for i, frame in enumerate(trace.frames[1:]):
            s = s + trace.dt * vels[i].x
            assert np.abs(s - frame.pos[:, 0]).max() <= 1e-9

    def test_cohesion_knob_shrinks_peloton(self):
        def mean_length(gain, seed):
            trace = simulate_race(
                PelotonParams(duration=200.0, cohesion_gain=gain, seed=seed)
            )
            spans = [
                np.percentile(f.pos[:, 0], 95) - np.percentile(f.pos[:, 0], 5)
                for f in trace.frames
            ]
            return np.mean(spans)

        low = np.mean([mean_length(0.02, s) for s in range(10)])
        high = np.mean([mean_length(0.10, s) for s in range(10)])
        assert high <= low

    def test_breakaways_fire(self):
        params = PelotonParams(n=30, duration=200.0, breakaway_rate=0.01, breakaway_boost=4.0)
        vels = velocities(simulate_race(params))
        peak = max(frame.x.max() for frame in vels)
        assert peak > 11.0

    def test_invalid_params(self):
        with pytest.raises(ConfigError):
            simulate_race(PelotonParams(n=0))
        with pytest.raises(ConfigError):
            simulate_race(PelotonParams(dt=-1.0))
        with pytest.raises(ConfigError):
            simulate_race(PelotonParams(separation_gain=-1.0))


class TestVelocities:
    def _trace(self, dt, *s_frames):
        frames = tuple(
            RiderPositions(time=i * dt, pos=[[s, 0.0] for s in frame])
            for i, frame in enumerate(s_frames)
        )
        return RaceTrace(dt=dt, frames=frames)

    def test_simple_displacement(self):
        vels = velocities(self._trace(1.0, [0.0], [10.0]))
        assert vels[0].x == pytest.approx([10.0])

    def test_stationary(self):
        vels = velocities(self._trace(1.0, [5.0], [5.0]))
        assert vels[0].x == pytest.approx([0.0])

    def test_dt_two(self):
        vels = velocities(self._trace(2.0, [100.0], [130.0]))
        assert vels[0].x == pytest.approx([15.0])

    def test_single_frame_rejected(self):
        with pytest.raises(DimensionError):
            velocities(self._trace(1.0, [0.0]))


GOOD_CSV = """time_s,rider_id,s_m,d_m
0.0,0,0.0,0.0
0.0,1,5.0,1.0
1.0,0,10.0,0.0
1.0,1,15.0,1.0
2.0,0,20.0,0.0
2.0,1,25.0,1.0
"""


class TestIngestTrace:
    def test_well_formed(self):
        trace = ingest_trace(io.StringIO(GOOD_CSV), dt=1.0)
        assert trace.n == 2
        assert len(trace.frames) == 3
        assert trace.frames[1].pos[1] == pytest.approx([15.0, 1.0])

    def test_duplicate_cell(self):
        bad = GOOD_CSV + "0.0,1,9.0,9.0\n"
        with pytest.raises(TraceFormatError, match="line 8.*duplicate"):
            ingest_trace(io.StringIO(bad), dt=1.0)

    def test_grid_gap(self):
        rows = [r for r in GOOD_CSV.splitlines() if not r.startswith("1.0,1")]
        with pytest.raises(TraceFormatError, match="missing cell"):
            ingest_trace(io.StringIO("\n".join(rows) + "\n"), dt=1.0)

    def test_time_gap(self):
        bad = GOOD_CSV.replace("2.0,", "3.0,")
        with pytest.raises(TraceFormatError, match="grid gap"):
            ingest_trace(io.StringIO(bad), dt=1.0)

    def test_malformed_row(self):
        bad = GOOD_CSV.replace("1.0,0,10.0,0.0", "1.0,0,banana,0.0")
        with pytest.raises(TraceFormatError, match="line 4"):
            ingest_trace(io.StringIO(bad), dt=1.0)

    def test_bad_header(self):
        with pytest.raises(TraceFormatError, match="line 1"):
            ingest_trace(io.StringIO("a,b,c,d\n"), dt=1.0)

    def test_round_trip_through_writer(self):
        trace = simulate_race(quiet_params(n=3, duration=5.0))
        buf = io.StringIO()
        write_trace_csv(trace, buf)
        buf.seek(0)
        back = ingest_trace(buf, dt=1.0)
        assert back.n == trace.n
        assert len(back.frames) == len(trace.frames)
        for fa, fb in zip(trace.frames, back.frames):
            assert np.array_equal(fa.pos, fb.pos)  # repr round-trips exactly


class TestVelocityCsv:
    def test_round_trip(self):
        trace = simulate_race(quiet_params(n=3, duration=5.0))
        vels = velocities(trace)
        buf = io.StringIO()
        write_velocity_csv(vels, buf)
        buf.seek(0)
        back = read_velocity_csv(buf)
        assert len(back) == len(vels)
        for fa, fb in zip(vels, back):
            assert np.array_equal(fa.x, fb.x)
