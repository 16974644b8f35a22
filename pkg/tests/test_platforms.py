import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from encost.errors import (
    CatalogFormatError,
    DegenerateFitError,
    InsufficientDataError,
    InvalidArgumentError,
)
from encost.platforms import (
    MeasurementSample,
    PlatformProfile,
    RawPlatformConstants,
    builtin_catalog,
    derive_energy_parameters,
    dump_catalog,
    fit_parameters,
    from_roofline,
    load_catalog,
    parse_catalog,
    profile_from_raw,
)

positive = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False, allow_infinity=False)


def make_raw(p_sta=1.0, p_op=1.0, p_io=1.0, f=1.0, m=1.0, freq=1e9, **kw):
    return RawPlatformConstants(
        static_power=p_sta,
        dynamic_power_per_op=p_op,
        dynamic_power_per_io=p_io,
        cycles_per_op=f,
        cycles_per_cacheline=m,
        frequency=freq,
        **kw,
    )


class TestDeriveEnergyParameters:
    def test_unit_case(self):
        # 1 W everywhere, one cycle each, 1 GHz -> 1 nJ each
        assert derive_energy_parameters(make_raw()) == (1.0, 1.0, 1.0, 1.0)

    def test_symmetry_when_op_equals_static(self):
        raw = make_raw(p_sta=3.5, p_op=3.5, p_io=7.0, f=4.0, m=4.0)
        eps_op, eps_io, pi_op, pi_io = derive_energy_parameters(raw)
        assert eps_op == pi_op
        assert pi_io == pi_op  # F == M makes both static terms equal too

    def test_hand_evaluated_case(self):
        raw = make_raw(p_sta=10.0, p_op=2.0, p_io=20.0, f=1.0, m=10.0, freq=2e9)
        eps_op, eps_io, pi_op, pi_io = derive_energy_parameters(raw)
        assert (eps_op, eps_io, pi_op, pi_io) == (1.0, 100.0, 5.0, 50.0)

    @pytest.mark.parametrize("field", [
        "static_power", "dynamic_power_per_op", "dynamic_power_per_io",
        "cycles_per_op", "cycles_per_cacheline", "frequency",
    ])
    def test_nonpositive_field_rejected(self, field):
        kw = dict(p_sta=1.0, p_op=1.0, p_io=1.0, f=1.0, m=1.0, freq=1e9)
        alias = {"static_power": "p_sta", "dynamic_power_per_op": "p_op",
                 "dynamic_power_per_io": "p_io", "cycles_per_op": "f",
                 "cycles_per_cacheline": "m", "frequency": "freq"}
        kw[alias[field]] = 0.0
        with pytest.raises(InvalidArgumentError, match=field):
            make_raw(**kw)

    def test_line_larger_than_cache_rejected(self):
        with pytest.raises(InvalidArgumentError):
            make_raw(cacheline_elements=64, private_cache_elements=32)

    @given(p_sta=positive, p_op=positive, p_io=positive, f=positive, m=positive,
           freq=st.floats(min_value=1e6, max_value=1e10))
    def test_derived_profile_always_valid(self, p_sta, p_op, p_io, f, m, freq):
        raw = make_raw(p_sta=p_sta, p_op=p_op, p_io=p_io, f=f, m=m, freq=freq)
        profile = profile_from_raw("test", "synthetic", raw)
        assert profile.raw is raw  # consistency check in __post_init__ passed

    def test_inconsistent_profile_rejected(self):
        raw = make_raw(p_sta=10.0, p_op=2.0, p_io=20.0, f=1.0, m=10.0, freq=2e9)
        with pytest.raises(InvalidArgumentError, match="eps_op"):
            PlatformProfile(name="bad", processor="", eps_op=2.0, eps_io=100.0,
                            pi_op=5.0, pi_io=50.0, raw=raw)


class TestFromRoofline:
    def test_hand_evaluated_case(self):
        p = from_roofline(energy_per_flop=2.0, energy_per_byte=0.5, constant_power=10.0,
                          time_per_flop=1e-9, time_per_byte=4e-9, cacheline_bytes=64)
        assert (p.eps_op, p.eps_io, p.pi_op, p.pi_io) == (2.0, 32.0, 10.0, 2560.0)
        assert p.cacheline_elements == 8

    def test_matches_kepler_titan_catalog_row(self, catalog_by_name):
        # invert the published Kepler GTX Titan parameters through the conversion
        titan = catalog_by_name["Kepler GTX Titan"]
        p = from_roofline(
            energy_per_flop=0.094,
            energy_per_byte=17.09 / 64,
            constant_power=1.0,
            time_per_flop=0.077e-9,
            time_per_byte=32.94e-9 / 64,
            cacheline_bytes=64,
        )
        assert p.eps_op == pytest.approx(titan.eps_op, rel=1e-12)
        assert p.eps_io == pytest.approx(titan.eps_io, rel=1e-12)
        assert p.pi_op == pytest.approx(titan.pi_op, rel=1e-12)
        assert p.pi_io == pytest.approx(titan.pi_io, rel=1e-12)

    def test_zero_power_rejected(self):
        with pytest.raises(InvalidArgumentError):
            from_roofline(energy_per_flop=1.0, energy_per_byte=1.0, constant_power=0.0,
                          time_per_flop=1e-9, time_per_byte=1e-9, cacheline_bytes=64)

    @given(e_flop=positive, e_byte=positive, power=positive, k=positive)
    @settings(max_examples=50)
    def test_homogeneous_in_energy_inputs(self, e_flop, e_byte, power, k):
        base = from_roofline(e_flop, e_byte, power, 1e-9, 4e-9, 64)
        scaled = from_roofline(k * e_flop, k * e_byte, k * power, 1e-9, 4e-9, 64)
        assert scaled.eps_op == pytest.approx(k * base.eps_op, rel=1e-12)
        assert scaled.eps_io == pytest.approx(k * base.eps_io, rel=1e-12)
        assert scaled.pi_op == pytest.approx(k * base.pi_op, rel=1e-12)
        assert scaled.pi_io == pytest.approx(k * base.pi_io, rel=1e-12)


def synth_samples(eps_op, eps_io, static_power, count, seed, noise=0.0):
    # Benchmark-style design: counts chosen so the three energy terms have
    # comparable magnitude, otherwise the small ones drown in the noise.
    rng = np.random.default_rng(seed)
    work = rng.uniform(0.1, 10.0, size=count) / eps_op
    io = rng.uniform(0.1, 10.0, size=count) / eps_io
    duration = rng.uniform(0.1, 10.0, size=count) / static_power
    energy = eps_op * work + eps_io * io + static_power * duration
    if noise:
        energy = energy * (1.0 + noise * rng.standard_normal(count))
    return [MeasurementSample(w, i, d, e) for w, i, d, e in zip(work, io, duration, energy)]


class TestFitParameters:
    def test_hand_solved_three_by_three(self):
        samples = [
            MeasurementSample(work=1, io=0, duration=1, energy=3),
            MeasurementSample(work=0, io=1, duration=1, energy=4),
            MeasurementSample(work=0, io=0, duration=1, energy=2),
        ]
        fit = fit_parameters(samples)
        assert fit.eps_op == pytest.approx(1.0, rel=1e-12)
        assert fit.eps_io == pytest.approx(2.0, rel=1e-12)
        assert fit.static_power == pytest.approx(2.0, rel=1e-12)
        assert fit.residual == pytest.approx(0.0, abs=1e-18)

    @given(eps_op=positive, eps_io=positive, static_power=positive,
           seed=st.integers(0, 2**31 - 1))
    @settings(max_examples=100, deadline=None)
    def test_noiseless_round_trip(self, eps_op, eps_io, static_power, seed):
        fit = fit_parameters(synth_samples(eps_op, eps_io, static_power, 12, seed))
        assert fit.eps_op == pytest.approx(eps_op, rel=1e-6)
        assert fit.eps_io == pytest.approx(eps_io, rel=1e-6)
        assert fit.static_power == pytest.approx(static_power, rel=1e-6)

    def test_noisy_xeon_recovery_within_five_percent(self, xeon):
        # SI units: nJ -> J per event, plus an assumed 85 W static draw
        eps_op, eps_io, p_sta = xeon.eps_op * 1e-9, xeon.eps_io * 1e-9, 85.0
        fit = fit_parameters(synth_samples(eps_op, eps_io, p_sta, 100, seed=7, noise=0.01))
        assert fit.eps_op == pytest.approx(eps_op, rel=0.05)
        assert fit.eps_io == pytest.approx(eps_io, rel=0.05)
        assert fit.static_power == pytest.approx(p_sta, rel=0.05)

    def test_too_few_samples(self):
        samples = synth_samples(1.0, 2.0, 3.0, 2, seed=0)
        with pytest.raises(InsufficientDataError):
            fit_parameters(samples)

    def test_rank_deficient_design(self):
        # io always zero -> only two independent columns
        samples = [MeasurementSample(w, 0.0, 1.0, w + 2.0) for w in (1.0, 2.0, 3.0, 4.0)]
        with pytest.raises(DegenerateFitError):
            fit_parameters(samples)

    def test_sample_validation(self):
        with pytest.raises(InvalidArgumentError):
            MeasurementSample(work=1.0, io=1.0, duration=0.0, energy=1.0)
        with pytest.raises(InvalidArgumentError):
            MeasurementSample(work=-1.0, io=1.0, duration=1.0, energy=1.0)


class TestBuiltinCatalog:
    def test_eleven_platforms(self):
        assert len(builtin_catalog()) == 11

    def test_xeon_row(self, xeon):
        assert (xeon.eps_op, xeon.pi_op, xeon.eps_io, xeon.pi_io) == (0.263, 0.108, 8.86, 23.29)
        assert xeon.core_count == 24

    def test_xeon_phi_knc_row(self, catalog_by_name):
        knc = catalog_by_name["XeonPhi KNC"]
        assert (knc.eps_op, knc.pi_op, knc.eps_io, knc.pi_io) == (0.012, 0.178, 8.70, 63.65)
        assert knc.core_count is None

    def test_core_counts_only_on_fitted_platforms(self, catalog_by_name):
        with_cores = {name: p.core_count for name, p in catalog_by_name.items()
                      if p.core_count is not None}
        assert with_cores == {"Xeon": 24, "Xeon-Phi": 57}

    def test_line_transfer_always_costlier_than_op(self):
        for p in builtin_catalog():
            assert p.eps_io > p.eps_op, p.name

    def test_names_unique(self):
        names = [p.name for p in builtin_catalog()]
        assert len(names) == len(set(names))


class TestCatalogFile:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "platforms.cat"
        path.write_text(dump_catalog(builtin_catalog()), encoding="utf-8")
        again = load_catalog(path)
        assert again == builtin_catalog()

    def test_dump_is_bit_stable(self):
        assert dump_catalog(builtin_catalog()) == dump_catalog(builtin_catalog())

    def test_missing_field_named(self):
        text = "[thing]\nprocessor = x\neps_op_nJ = 1.0\n"
        with pytest.raises(CatalogFormatError, match="eps_io_nJ"):
            parse_catalog(text)

    def test_unknown_field_named(self):
        text = ("[thing]\neps_op_nJ = 1\neps_io_nJ = 2\npi_op_nJ = 3\npi_io_nJ = 4\n"
                "volts = 12\n")
        with pytest.raises(CatalogFormatError, match="volts"):
            parse_catalog(text)

    def test_non_numeric_value_named(self):
        text = "[thing]\neps_op_nJ = fast\neps_io_nJ = 2\npi_op_nJ = 3\npi_io_nJ = 4\n"
        with pytest.raises(CatalogFormatError, match="eps_op_nJ"):
            parse_catalog(text)

    def test_negative_parameter_rejected(self):
        text = "[thing]\neps_op_nJ = -1\neps_io_nJ = 2\npi_op_nJ = 3\npi_io_nJ = 4\n"
        with pytest.raises(CatalogFormatError, match="thing"):
            parse_catalog(text)
