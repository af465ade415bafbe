"""State containers, schedules, and the measurement index enumeration."""

import math

import numpy as np
import pytest

from dephasim.errors import ComplexityError, ConfigError
from dephasim.qubits import (
    BASIS,
    HARD_CAP_MEASUREMENTS,
    MeasurementSchedule,
    TwoQubitPureState,
    basis_index,
    enumerate_index_terms,
    segment_grid,
    segment_split,
    state_bell,
    state_product_x,
)


class TestTwoQubitPureState:
    def test_basis_index_roundtrip(self):
        for i, (k, l) in enumerate(BASIS):
            assert basis_index(k, l) == i
        with pytest.raises(ConfigError):
            basis_index(0, 1)

    def test_norm_enforced(self):
        with pytest.raises(ConfigError):
            TwoQubitPureState((1.0, 1.0, 0.0, 0.0))
        with pytest.raises(ConfigError):
            TwoQubitPureState((1.0, 0.0, 0.0))

    def test_normalized_constructor(self):
        psi = TwoQubitPureState.normalized([3.0, 0.0, 0.0, 4.0j])
        assert psi.amplitudes[0] == pytest.approx(0.6)
        assert psi.amplitudes[3] == pytest.approx(0.8j)
        with pytest.raises(ConfigError):
            TwoQubitPureState.normalized([0.0, 0.0, 0.0, 0.0])

    def test_projector(self):
        p = state_bell().projector()
        assert np.allclose(p, p.conj().T)
        assert np.trace(p) == pytest.approx(1.0)
        assert np.allclose(p @ p, p)

    def test_prepared_states(self):
        assert np.allclose(state_product_x().vector, 0.5)
        v = state_bell().vector
        assert v[1] == v[2] == 0.0
        assert abs(v[0]) == pytest.approx(1.0 / math.sqrt(2.0))


class TestSchedule:
    def test_validation(self):
        good = dict(tau=1.0, n_measurements=2, t_max=3.0, dt=0.01)
        MeasurementSchedule(**good)
        for key, bad in [("tau", 0.0), ("dt", -0.1), ("t_max", 0.0), ("n_measurements", -1)]:
            with pytest.raises(ConfigError):
                MeasurementSchedule(**{**good, key: bad})

    def test_hard_cap(self):
        with pytest.raises(ComplexityError):
            MeasurementSchedule(tau=1.0, n_measurements=HARD_CAP_MEASUREMENTS + 1,
                                t_max=10.0, dt=0.1)


class TestSegmentSplit:
    def test_dyadic_multiples_land_exactly(self):
        tau = 0.75  # n * tau exactly representable
        for n in range(1, 9):
            got_n, tp = segment_split(n * tau, tau)
            assert got_n == n
            assert tp == 0.0

    def test_generic_tau_remainder_is_tiny(self):
        tau = 0.7
        for n in range(1, 9):
            got_n, tp = segment_split(n * tau, tau)
            # float(n * tau) differs from the exact product by <= 1 ulp, so
            # the exact remainder is either ~0 or ~tau
            assert min(tp, tau - tp) < 1e-12
            assert got_n in (n, n - 1)

    def test_interior_points(self):
        n, tp = segment_split(2.35, 1.0)
        assert n == 2
        assert tp == pytest.approx(0.35)

    def test_negative_time_rejected(self):
        with pytest.raises(ConfigError):
            segment_split(-0.1, 1.0)


class TestSegmentGrid:
    def test_aligned_grid_reuses_t_prime_ladder(self):
        t, seg, tp = segment_grid(1.0, 3.0, 0.01)
        assert len(t) == 301
        assert t[0] == 0.0 and t[-1] == pytest.approx(3.0)
        # every segment's t' ladder is the identical array
        first = tp[seg == 0]
        for n in (1, 2):
            inner = tp[seg == n]
            assert np.array_equal(inner, first[: len(inner)])
        # measurement instants sit at t' = 0 exactly
        assert np.all(tp[np.isin(t, [1.0, 2.0, 3.0])] == 0.0)

    def test_unaligned_grid_still_consistent(self):
        t, seg, tp = segment_grid(0.7, 2.0, 0.03)
        assert np.all(np.diff(t) > 0)
        assert np.allclose(seg * 0.7 + tp, t, atol=1e-12)

    def test_validation(self):
        with pytest.raises(ConfigError):
            segment_grid(0.0, 1.0, 0.1)
        with pytest.raises(ConfigError):
            segment_grid(1.0, 0.05, 0.1)


class TestEnumeration:
    def test_counts_and_uniqueness(self):
        for n in (0, 1, 2):
            terms = list(enumerate_index_terms(n))
            assert len(terms) == 16**n
            assert len(set(terms)) == len(terms)

    def test_n3_count(self):
        count = sum(1 for _ in enumerate_index_terms(3))
        assert count == 4096

    def test_digit_order_big_endian(self):
        terms = list(enumerate_index_terms(2))
        # assignment 0: both measurements at (BASIS[0], BASIS[0])
        assert terms[0] == (((1, 1), (1, 1)), ((1, 1), (1, 1)))
        # assignment 1 increments the LAST measurement's primed row first
        assert terms[1] == (((1, 1), (1, 1)), ((1, 1), (1, -1)))
        # assignment 16 carries into measurement 1 (most significant digit)
        assert terms[16] == (((1, 1), (1, -1)), ((1, 1), (1, 1)))
        # within a digit the unprimed row is the high crumb
        assert terms[4] == (((1, 1), (1, 1)), ((1, -1), (1, 1)))

    def test_cap(self):
        with pytest.raises(ComplexityError):
            next(enumerate_index_terms(HARD_CAP_MEASUREMENTS + 1))
        with pytest.raises(ConfigError):
            next(enumerate_index_terms(-1))
