"""
Tests for single-dipole fitting and dipolarity

@TEST:DIP-FIT
"""

import numpy as np
import pytest

TRUE_POSITION = (15.0, -10.0, 40.0)
TRUE_MOMENT = (0.4, 1.0, -0.6)


@pytest.mark.unit
class TestFitDipole:
    """Grid scan plus Nelder-Mead refinement."""

    def test_self_consistent_fit(self, cap32, head):
        """
        @TEST:DIP-FIT-001
        A forward map is fitted back to its own dipole
        """
        from dipfit.domain import Dipole, FitOptions
        from dipfit.services.fitting import fit_dipole
        from dipfit.services.forward import forward_potential

        V = forward_potential(Dipole(position=TRUE_POSITION, moment=TRUE_MOMENT), cap32, head)
        fit = fit_dipole(V, cap32, head, FitOptions(grid_spacing=12.0))
        assert fit.rv < 1e-5
        assert np.linalg.norm(np.subtract(fit.dipole.position, TRUE_POSITION)) < 1.0
        assert np.allclose(fit.dipole.moment, TRUE_MOMENT, atol=0.05)
        assert fit.boundary is False

    def test_scale_invariance(self, cap32, head, rng, fast_fit_options):
        """
        @TEST:DIP-FIT-002
        Scaling a map scales the moment and keeps rv and position
        """
        from dipfit.services.fitting import fit_dipole

        v = rng.standard_normal(32)
        a = fit_dipole(v, cap32, head, fast_fit_options)
        b = fit_dipole(2.0 * v, cap32, head, fast_fit_options)
        assert b.rv == pytest.approx(a.rv, abs=1e-12)
        assert np.allclose(b.dipole.position, a.dipole.position)
        assert np.allclose(b.dipole.moment, 2.0 * np.asarray(a.dipole.moment))

    def test_zero_map(self, cap32, head, fast_fit_options):
        """
        @TEST:DIP-FIT-003
        A constant map vanishes under the average reference
        """
        from core.exceptions import UndefinedResidualVarianceError
        from dipfit.services.fitting import fit_dipole

        with pytest.raises(UndefinedResidualVarianceError) as exc:
            fit_dipole(np.full(32, 3.0), cap32, head, fast_fit_options)
        assert exc.value.code == 'DIP-003'

    def test_map_length_mismatch(self, cap32, head, fast_fit_options):
        """
        @TEST:DIP-FIT-004
        """
        from core.exceptions import ShapeMismatchError
        from dipfit.services.fitting import fit_dipole

        with pytest.raises(ShapeMismatchError):
            fit_dipole(np.ones(31), cap32, head, fast_fit_options)

    def test_residual_variance(self):
        """
        @TEST:DIP-FIT-005
        """
        from dipfit.services.fitting import residual_variance

        v = np.array([1.0, -1.0, 2.0, -2.0])
        assert residual_variance(v, v) == 0.0
        assert residual_variance(v, np.zeros(4)) == 1.0
        assert residual_variance(v, 0.5 * v) == pytest.approx(0.25)

    def test_search_grid(self, head):
        """
        @TEST:DIP-FIT-006
        Grid contains the origin and stays inside the search bound
        """
        from dipfit.services.fitting import search_grid

        grid = search_grid(head, 8.0, 0.95)
        assert np.any(np.all(grid == 0.0, axis=1))
        assert np.max(np.linalg.norm(grid, axis=1)) <= 0.95 * 71.0

    @pytest.mark.slow
    def test_noisy_maps_envelope(self, head, fast_fit_options):
        """
        @TEST:DIP-FIT-013
        100 seeded dipoles with white noise at 10% of the map norm:
        rv in [0.005, 0.05] and position error below 8 mm
        """
        from dipfit.domain import Dipole
        from dipfit.services.fitting import fit_dipole
        from dipfit.services.forward import average_reference, forward_potential
        from dipfit.services.montage_io import cap_montage

        montage = cap_montage(64, radius=head.outer_radius)
        rng = np.random.default_rng(2024)
        for trial in range(100):
            direction = rng.standard_normal(3)
            position = direction / np.linalg.norm(direction) * rng.uniform(0.3, 0.7) * head.radii[0]
            moment = rng.standard_normal(3)
            V = forward_potential(Dipole(position=tuple(position), moment=tuple(moment)), montage, head)
            noise = average_reference(rng.standard_normal(V.shape[0]))
            noise *= 0.1 * np.linalg.norm(V) / np.linalg.norm(noise)

            fit = fit_dipole(V + noise, montage, head, fast_fit_options)
            assert 0.005 <= fit.rv <= 0.05, f'trial {trial}: rv {fit.rv:.4f}'
            assert np.linalg.norm(np.subtract(fit.dipole.position, position)) < 8.0, f'trial {trial}'


@pytest.mark.unit
class TestDipolarity:
    """ND% curves."""

    def test_exact_dipole_maps(self, cap32, head, fast_fit_options):
        """
        @TEST:DIP-FIT-007
        Maps generated by dipoles are all near-dipolar
        """
        from dipfit.domain import Dipole
        from dipfit.services.dipolarity import fit_maps
        from dipfit.services.forward import forward_potential

        dipoles = [Dipole(position=TRUE_POSITION, moment=TRUE_MOMENT),
                   Dipole(position=(-30.0, 20.0, 20.0), moment=(1.0, 0.0, 0.0)),
                   Dipole(position=(0.0, 35.0, 10.0), moment=(0.0, 0.3, 1.0))]
        maps = np.column_stack([forward_potential(d, cap32, head) for d in dipoles])
        report = fit_maps(maps, cap32, head, thresholds=(0.01, 0.05), opts=fast_fit_options)
        assert report.nd_percent(0.05) == 100.0
        assert report.failed_components == ()

    def test_random_maps_are_not_dipolar(self, cap32, head, rng, fast_fit_options):
        """
        @TEST:DIP-FIT-008
        """
        from dipfit.services.dipolarity import fit_maps

        report = fit_maps(rng.standard_normal((32, 4)), cap32, head, thresholds=(0.05, 0.40),
                          opts=fast_fit_options)
        assert report.nd_percent(0.05) == 0.0
        assert all(rv > 0.05 for rv in report.rv)

    def test_failed_fit_counts_as_non_dipolar(self, cap32, head, fast_fit_options):
        """
        @TEST:DIP-FIT-009
        """
        from dipfit.domain import Dipole
        from dipfit.services.dipolarity import fit_maps
        from dipfit.services.forward import forward_potential

        good = forward_potential(Dipole(position=TRUE_POSITION, moment=TRUE_MOMENT), cap32, head)
        maps = np.column_stack([good, np.ones(32)])
        report = fit_maps(maps, cap32, head, thresholds=(0.05,), opts=fast_fit_options)
        assert report.nd_percent(0.05) == 50.0
        assert report.failed_components == (1,)
        assert report.rv[1] is None
        assert report.errors[0]['error_code'] == 'DIP-003'

    def test_threads_keep_order(self, cap32, head, rng, fast_fit_options):
        """
        @TEST:DIP-FIT-010
        """
        from dipfit.services.dipolarity import fit_maps

        maps = rng.standard_normal((32, 3))
        serial = fit_maps(maps, cap32, head, thresholds=(0.05,), opts=fast_fit_options)
        parallel = fit_maps(maps, cap32, head, thresholds=(0.05,), opts=fast_fit_options, threads=3)
        assert serial.rv == parallel.rv

    def test_curve_frame(self):
        """
        @TEST:DIP-FIT-011
        rv strictly below the threshold counts
        """
        from dipfit.domain import DipolarityReport

        report = DipolarityReport(rv=(0.01, 0.05, None, 0.2), thresholds=(0.05, 0.10, 0.25))
        assert report.curve == {0.05: 25.0, 0.10: 50.0, 0.25: 75.0}
        frame = report.curve_frame('ica')
        assert list(frame.columns) == ['threshold', 'ica']
        assert frame['ica'].tolist() == [25.0, 50.0, 75.0]

    def test_raw_data_baseline(self, head, fast_fit_options):
        """
        @TEST:DIP-FIT-012
        Raw time points of a dipolar mixture are less dipolar than the source maps
        """
        from dipfit.services.dipolarity import fit_maps, raw_data_dipolarity
        from dipfit.services.montage_io import cap_montage
        from signals.domain import SynthSpec
        from signals.services.synthesis import synth_dataset

        dataset, truth = synth_dataset(SynthSpec(n_sources=12, n_samples=2000, source_kinds=('gaussian',),
                                                 mixing='dipolar', seed=2))
        montage = cap_montage(12, radius=head.outer_radius)
        raw = raw_data_dipolarity(dataset, montage, head, n_maps=20, seed=1,
                                  thresholds=(0.05,), opts=fast_fit_options)
        sources = fit_maps(truth.mixing_matrix, montage, head, thresholds=(0.05,), opts=fast_fit_options)

        assert raw.n_components == 20
        assert sources.nd_percent(0.05) == 100.0
        assert raw.nd_percent(0.05) < sources.nd_percent(0.05)
        assert np.median([rv for rv in raw.rv if rv is not None]) > 10 * np.median(sources.rv)
