import json
import math

import numpy as np
import pytest

from pcwdesign.compound import (
    CSV_COLUMNS,
    RNG_IDENTITY,
    CompoundDesign,
    PerturbationConfig,
    PerturbationMode,
    build_compound,
    compensate_bias,
    compound_peak,
    run_perturbation,
    sensitivity,
)
from pcwdesign.errors import DomainError, InfeasibleDesignError
from pcwdesign.heuristic import LatticeSpec, peak_wavelength

from conftest import REF_A, REF_H, REF_LAMBDA


@pytest.fixture(scope="module")
def uniform_compound():
    return build_compound(REF_A, REF_A, REF_LAMBDA, REF_LAMBDA, REF_H)


class TestCompoundPeak:
    @pytest.mark.parametrize(
        "l1,l2", [(925, 925), (920, 930), (915, 935), (905, 945), (930, 920), (945, 905)]
    )
    def test_table_pairings(self, l1, l2):
        assert compound_peak(l1, l2) == 925

    def test_domain(self):
        with pytest.raises(DomainError):
            compound_peak(0, 925)


class TestBuild:
    def test_degenerate(self, uniform_compound, reference_design):
        c = uniform_compound
        assert c.half_1 == c.half_2
        assert c.half_1.r == pytest.approx(reference_design.r, abs=1e-9)
        assert c.predicted_peak == REF_LAMBDA

    def test_distinct_periods(self, compound_233_238):
        c = compound_233_238
        assert c.half_1.r == pytest.approx(77.2266, abs=1e-3)
        assert c.half_2.r == pytest.approx(82.2359, abs=1e-3)
        assert c.predicted_peak == REF_LAMBDA

    def test_swap(self, compound_233_238):
        s = compound_233_238.swapped()
        assert s.predicted_peak == compound_233_238.predicted_peak
        assert s.half_1 == compound_233_238.half_2

    def test_split_targets(self):
        c = build_compound(REF_A, REF_A, 920.0, 930.0, REF_H)
        assert c.half_1.r > c.half_2.r  # radius falls with target wavelength
        assert c.predicted_peak == 925.0

    def test_failure_names_half(self):
        with pytest.raises(InfeasibleDesignError) as exc:
            build_compound(REF_A, 150.0, REF_LAMBDA, REF_LAMBDA, REF_H)
        assert "half_2" in str(exc.value)
        assert exc.value.quantity.startswith("half_2")

    def test_dict_roundtrip(self, compound_233_238):
        back = CompoundDesign.from_dict(json.loads(json.dumps(compound_233_238.to_dict())))
        assert back == compound_233_238


class TestBias:
    def test_zero_bias(self, reference_design):
        spec = compensate_bias(REF_A, REF_LAMBDA, REF_H)
        assert spec.r == pytest.approx(reference_design.r, abs=1e-9)

    def test_compensated_geometry_lands_on_target(self):
        drawn = compensate_bias(REF_A, REF_LAMBDA, REF_H, bias_a=2.0, bias_r=3.0)
        fabricated = LatticeSpec(drawn.a + 2.0, drawn.r + 3.0, drawn.h)
        assert peak_wavelength(fabricated) == pytest.approx(REF_LAMBDA, abs=1e-6)


class TestConfig:
    @pytest.mark.parametrize(
        "kw",
        [dict(delta_r_max=-1), dict(n_runs=0), dict(holes_per_half=0), dict(seed=-1),
         dict(success_window=-0.1), dict(mode="bogus")],
    )
    def test_invalid(self, kw):
        with pytest.raises((DomainError, ValueError)):
            PerturbationConfig(**kw)

    def test_defaults_follow_protocol(self):
        cfg = PerturbationConfig()
        assert (cfg.delta_r_max, cfg.n_runs, cfg.holes_per_half, cfg.success_window) == (10, 100, 100, 1.5)
        assert cfg.mode is PerturbationMode.PER_HOLE_MEAN


class TestPerturbation:
    def test_no_perturbation(self, compound_233_238):
        rep = run_perturbation(compound_233_238, PerturbationConfig(delta_r_max=0, n_runs=20))
        assert rep.success_fraction == 1.0
        assert all(r.compound_peak == compound_233_238.predicted_peak for r in rep.per_run)
        assert rep.std_shift == 0.0 and rep.mean_shift == 0.0

    def test_deterministic(self, compound_233_238):
        cfg = PerturbationConfig(n_runs=30, seed=1234)
        a = run_perturbation(compound_233_238, cfg)
        b = run_perturbation(compound_233_238, cfg)
        assert a.to_json() == b.to_json()
        assert a.to_csv() == b.to_csv()

    def test_seed_matters(self, compound_233_238):
        a = run_perturbation(compound_233_238, PerturbationConfig(n_runs=5, seed=1))
        b = run_perturbation(compound_233_238, PerturbationConfig(n_runs=5, seed=2))
        assert a.to_csv() != b.to_csv()

    def test_run_prefix_stable(self, compound_233_238):
        # per-run substreams: a shorter ensemble is a prefix of a longer one
        short = run_perturbation(compound_233_238, PerturbationConfig(n_runs=10, seed=7))
        long = run_perturbation(compound_233_238, PerturbationConfig(n_runs=25, seed=7))
        assert short.per_run == long.per_run[:10]

    def test_report_structure(self, compound_233_238):
        rep = run_perturbation(compound_233_238, PerturbationConfig(n_runs=40, seed=3))
        assert len(rep.per_run) == 40
        assert 0.0 <= rep.success_fraction <= 1.0
        ok = [r for r in rep.per_run if r.ok]
        for r in ok:
            assert r.compound_peak == 0.5 * (r.peak_1 + r.peak_2)
        assert np.mean([r.compound_peak for r in ok]) == pytest.approx(
            np.mean([0.5 * (r.peak_1 + r.peak_2) for r in ok]), abs=1e-12
        )
        hits = sum(abs(r.compound_peak - rep.target) <= 1.5 for r in ok)
        assert rep.success_fraction == hits / 40
        d = rep.to_dict()
        assert d["rng"] == RNG_IDENTITY and d["seed"] == 3
        assert "not modelled" in d["notes"]
        lines = rep.to_csv().splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == 41

    def test_window_monotone(self, compound_233_238):
        rep = run_perturbation(compound_233_238, PerturbationConfig(n_runs=60, seed=5))
        fr = [rep.success_fraction_for(w) for w in (0.0, 0.5, 1.0, 1.5, 3.0, 10.0, 100.0)]
        assert all(b >= a for a, b in zip(fr, fr[1:]))
        assert rep.success_fraction_for(1.5) == rep.success_fraction

    def test_per_hole_mean_narrower_than_single(self, uniform_compound):
        mean_mode = run_perturbation(uniform_compound, PerturbationConfig(n_runs=200, seed=9))
        single = run_perturbation(
            uniform_compound, PerturbationConfig(n_runs=200, seed=9, mode="per-half-single")
        )
        # averaging 100 holes shrinks the effective radius spread by about 10x
        assert mean_mode.std_shift < 0.2 * single.std_shift

    def test_effective_radius_spread(self, uniform_compound):
        rep = run_perturbation(uniform_compound, PerturbationConfig(n_runs=400, seed=11))
        d = np.array([r.effective_r_1 for r in rep.per_run]) - uniform_compound.half_1.r
        expected = 10 / math.sqrt(3) / math.sqrt(100)
        assert np.std(d, ddof=1) == pytest.approx(expected, rel=0.15)
        assert np.all(np.abs(d) <= 10)

    def test_averaging_inequality_small_ensemble(self, compound_233_238):
        n = 500
        rep = run_perturbation(compound_233_238, PerturbationConfig(n_runs=n, seed=21))
        bound = 0.5 * (rep.std_peak_1 + rep.std_peak_2)
        se = bound / math.sqrt(2 * (n - 1))
        assert rep.std_shift <= bound + 3 * se


class TestSensitivity:
    def test_sign_and_magnitude(self, reference_design):
        s = sensitivity(reference_design.spec, REF_LAMBDA)
        assert s < 0
        assert s == pytest.approx(-4.06, abs=0.1)

    def test_second_order(self, reference_design):
        spec = reference_design.spec
        s1, s2, s4 = (sensitivity(spec, REF_LAMBDA, dr) for dr in (1.0, 0.5, 0.25))
        # central difference: error shrinks by about 4x per halving
        e1, e2 = abs(s1 - s4), abs(s2 - s4)
        assert e2 < 0.5 * e1 or e1 < 1e-6

    def test_matches_monte_carlo(self, uniform_compound):
        cfg = PerturbationConfig(n_runs=800, seed=4, mode="per-half-single")
        rep = run_perturbation(uniform_compound, cfg)
        s = sensitivity(uniform_compound.half_1, REF_LAMBDA)
        eff = np.array([r.effective_r_1 for r in rep.per_run if r.ok]) - uniform_compound.half_1.r
        predicted = abs(s) * np.std(eff, ddof=1)
        assert rep.std_peak_1 == pytest.approx(predicted, rel=0.2)

    def test_infeasible_stencil(self, reference_design):
        with pytest.raises(InfeasibleDesignError) as exc:
            sensitivity(reference_design.spec, REF_LAMBDA, dr=37.0)
        assert exc.value.quantity == "stencil"

    def test_bad_step(self, reference_design):
        with pytest.raises(DomainError):
            sensitivity(reference_design.spec, REF_LAMBDA, dr=0)
