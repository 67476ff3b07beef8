import numpy as np
import pytest

from helpers import dyadic_setting, oracle_assign, oracle_insertion, random_instance, random_stop_point
from stopsim.demand import DROPOFF, PICKUP, StopPoint
from stopsim.dispatch import Assignment, Rejection, assign_request, insertion_cost
from stopsim.geometry import GridWorld, build_stop_lattice
from stopsim.scheduling import (
    KinematicsConfig,
    Schedule,
    VehicleState,
    is_feasible,
)

class TestInsertionCost:
    def test_empty_schedule_costs_both_legs(self):
        world = GridWorld(area_width=3500, area_height=3500)
        lattice = build_stop_lattice(world, 700)
        kin = KinematicsConfig()
        state = VehicleState(0, location=0, clock=100.0)
        pickup = StopPoint(0, 100.0, 1200.0, PICKUP, 1)
        # stop 3500 m away: 2800 east + 700 north of stop 0
        dropoff_loc = 1 * 5 + 4  # row 1, col 4 -> (3150, 1050)
        drive = (
            abs(lattice.xs[dropoff_loc] - lattice.xs[0])
            + abs(lattice.ys[dropoff_loc] - lattice.ys[0])
        )
        assert drive == 3500.0
        dropoff = StopPoint(dropoff_loc, 100.0 + 360.0, 1200.0, DROPOFF, 1)
        plan = insertion_cost(state, pickup, dropoff, kin, world, lattice)
        assert plan is not None
        assert (plan.pickup_position, plan.dropoff_position) == (1, 2)
        assert plan.cost == pytest.approx(5.0 + 360.0 + 11.5 + 10.0)

    def test_expired_pickup_window_is_infeasible(self):
        world, lattice, kin = dyadic_setting()
        state = VehicleState(0, location=0, clock=1000.0)
        pickup = StopPoint(1, 0.0, 500.0, PICKUP, 1)  # window closed at t=500
        dropoff = StopPoint(2, 0.0, 5000.0, DROPOFF, 1)
        assert insertion_cost(state, pickup, dropoff, kin, world, lattice) is None

    def test_malformed_pair_rejected(self):
        world, lattice, kin = dyadic_setting()
        state = VehicleState(0, location=0)
        a = StopPoint(0, 0.0, 100.0, PICKUP, 1)
        b = StopPoint(1, 0.0, 100.0, DROPOFF, 2)
        with pytest.raises(ValueError):
            insertion_cost(state, a, b, kin, world, lattice)
        with pytest.raises(ValueError):
            insertion_cost(state, b, a, kin, world, lattice)

    def test_matches_oracle_on_random_schedules(self):
        world, lattice, kin = dyadic_setting()
        rng = np.random.default_rng(2024)
        feasible = 0
        for _ in range(1500):
            fleet, pickup, dropoff = random_instance(rng, lattice, kin, world, max_vehicles=1, max_stops=6)
            state = fleet[0]
            got = insertion_cost(state, pickup, dropoff, kin, world, lattice)
            expected = oracle_insertion(state, pickup, dropoff, kin, world, lattice)
            if expected is None:
                assert got is None
            else:
                cost, i, j = expected
                assert got is not None
                assert (got.pickup_position, got.dropoff_position) == (i, j)
                assert got.cost == cost  # exact: dyadic arithmetic
                feasible += 1
        assert feasible > 100

    def test_matches_oracle_on_continuous_coordinates(self):
        world = GridWorld(area_width=1700, area_height=1300)
        lattice = build_stop_lattice(world, 260)
        kin = KinematicsConfig(capacity=5)
        rng = np.random.default_rng(77)
        for _ in range(400):
            n = int(rng.integers(0, 6))
            stops = tuple(
                StopPoint(
                    int(rng.integers(0, len(lattice))),
                    float(rng.uniform(0, 1500)),
                    float(rng.uniform(100, 900)),
                    PICKUP if rng.integers(0, 2) else DROPOFF,
                    100 + k,
                )
                for k in range(n)
            )
            state = VehicleState(
                0,
                location=int(rng.integers(0, len(lattice))),
                clock=float(rng.uniform(0, 400)),
                onboard=int(rng.integers(0, 3)),
                schedule=Schedule(stops),
            )
            pickup = StopPoint(int(rng.integers(0, len(lattice))), float(rng.uniform(0, 800)), float(rng.uniform(200, 1200)), PICKUP, 7)
            dropoff = StopPoint(int(rng.integers(0, len(lattice))), float(rng.uniform(0, 1500)), float(rng.uniform(200, 1200)), DROPOFF, 7)
            got = insertion_cost(state, pickup, dropoff, kin, world, lattice)
            expected = oracle_insertion(state, pickup, dropoff, kin, world, lattice)
            if expected is None:
                assert got is None
            else:
                assert got is not None
                assert got.cost == pytest.approx(expected[0], abs=1e-9)
                assert (got.pickup_position, got.dropoff_position) == expected[1:]


class TestAssignRequest:
    def test_single_feasible_vehicle_wins(self):
        world, lattice, kin = dyadic_setting()
        fleet = [VehicleState(0, location=0, clock=0.0)]
        pickup = StopPoint(1, 0.0, 2000.0, PICKUP, 3)
        dropoff = StopPoint(2, 0.0, 4000.0, DROPOFF, 3)
        result = assign_request(fleet, pickup, dropoff, kin, world, lattice)
        assert isinstance(result, Assignment)
        assert result.vehicle_id == 0
        assert result.pickup_position < result.dropoff_position
        assert [sp.request_id for sp in result.new_schedule] == [3, 3]

    def test_colocated_vehicle_beats_distant_one(self):
        world = GridWorld(area_width=6000, area_height=6000)
        lattice = build_stop_lattice(world, 1000)
        kin = KinematicsConfig()
        pickup_stop = 0
        far_stop = len(lattice) - 1
        fleet = [
            VehicleState(0, location=far_stop, clock=0.0),
            VehicleState(1, location=pickup_stop, clock=0.0),
        ]
        pickup = StopPoint(pickup_stop, 0.0, 1200.0, PICKUP, 9)
        dropoff = StopPoint(7, 0.0, 5000.0, DROPOFF, 9)
        result = assign_request(fleet, pickup, dropoff, kin, world, lattice)
        assert isinstance(result, Assignment)
        assert result.vehicle_id == 1

    def test_all_windows_violated_rejects(self):
        world, lattice, kin = dyadic_setting()
        fleet = [VehicleState(v, location=v, clock=5000.0) for v in range(3)]
        pickup = StopPoint(1, 0.0, 100.0, PICKUP, 4)
        dropoff = StopPoint(2, 0.0, 100.0, DROPOFF, 4)
        result = assign_request(fleet, pickup, dropoff, kin, world, lattice)
        assert isinstance(result, Rejection)
        assert result.request_id == 4
        assert result.reason == "all-vehicles-infeasible"

    def test_empty_fleet_rejected(self):
        world, lattice, kin = dyadic_setting()
        pickup = StopPoint(1, 0.0, 100.0, PICKUP, 4)
        dropoff = StopPoint(2, 0.0, 100.0, DROPOFF, 4)
        with pytest.raises(ValueError):
            assign_request([], pickup, dropoff, kin, world, lattice)

    def test_matches_fleet_oracle(self):
        world, lattice, kin = dyadic_setting()
        rng = np.random.default_rng(31)
        assigned = 0
        for _ in range(400):
            fleet, pickup, dropoff = random_instance(rng, lattice, kin, world)
            result = assign_request(fleet, pickup, dropoff, kin, world, lattice)
            expected = oracle_assign(fleet, pickup, dropoff, kin, world, lattice)
            if expected is None:
                assert isinstance(result, Rejection)
            else:
                _, vid, i, j, cost = expected
                assert isinstance(result, Assignment)
                assert result.vehicle_id == vid
                assert (result.pickup_position, result.dropoff_position) == (i, j)
                assert result.cost == cost
                assigned += 1
        assert assigned > 50

    def test_new_schedule_is_feasible_and_removal_recovers_prior(self):
        world, lattice, kin = dyadic_setting()
        rng = np.random.default_rng(99)
        checked = 0
        for _ in range(300):
            # schedules built with generous windows are feasible by construction
            fleet = []
            for vid in range(int(rng.integers(1, 4))):
                n = int(rng.integers(0, 5))
                stops = tuple(
                    StopPoint(int(rng.integers(0, len(lattice))), 0.0, 1e7, PICKUP, 50 + k)
                    for k in range(n)
                )
                fleet.append(VehicleState(vid, location=int(rng.integers(0, len(lattice))), schedule=Schedule(stops)))
            t_pick = float(rng.integers(0, 400)) / 4.0
            pickup = StopPoint(int(rng.integers(0, len(lattice))), t_pick, 4000.0, PICKUP, 7)
            dropoff = StopPoint(
                int(rng.integers(0, len(lattice))), t_pick + float(rng.integers(0, 1600)) / 4.0, 4000.0, DROPOFF, 7
            )
            result = assign_request(fleet, pickup, dropoff, kin, world, lattice)
            if isinstance(result, Rejection):
                continue
            winner = fleet[result.vehicle_id]
            assert is_feasible(winner, result.new_schedule, kin, world, lattice)
            stops = list(result.new_schedule.stops)
            del stops[result.dropoff_position - 1]
            del stops[result.pickup_position - 1]
            assert tuple(stops) == winner.schedule.stops
            checked += 1
        assert checked > 50

    def test_extra_vehicle_never_increases_winning_cost(self):
        world, lattice, kin = dyadic_setting()
        rng = np.random.default_rng(13)
        for _ in range(200):
            fleet, pickup, dropoff = random_instance(rng, lattice, kin, world, max_vehicles=3)
            extra = VehicleState(
                vehicle_id=len(fleet),
                location=int(rng.integers(0, len(lattice))),
                clock=float(rng.integers(0, 2000)) / 4.0,
            )
            before = assign_request(fleet, pickup, dropoff, kin, world, lattice)
            after = assign_request(fleet + [extra], pickup, dropoff, kin, world, lattice)
            if isinstance(before, Assignment):
                assert isinstance(after, Assignment)
                assert after.cost <= before.cost
