from __future__ import annotations

import csv
import io
import math

import pytest
from hypothesis import given, strategies as st

from ntnsim import scenario
from ntnsim.errors import DomainError
from ntnsim.linkbudget import (
    BOLTZMANN_DBW_K_HZ,
    LossBreakdown,
    budget_csv,
    compute_budget,
    format_budget,
    fspl_db,
    g_over_t_dbk,
    snr_db,
    system_noise_temp_k,
    total_eirp_dbw,
)

TABLE_FSPL = {"sc9": 159.1, "sc6": 179.1, "sc4": 190.6, "sc1": 210.6}
TABLE_SNR = {"sc9": 6.6, "sc6": 8.5, "sc4": 0.0, "sc1": 11.6}


def linear_snr_oracle(eirp_dbw_mhz, bw_mhz, gain_dbi, nf_db, ta_k, d_km, f_ghz, extra_db):
    """Same budget evaluated in watts and kelvin instead of decibels."""
    eirp_w = 10 ** (eirp_dbw_mhz / 10) * bw_mhz
    gain = 10 ** (gain_dbi / 10)
    temp = ta_k + 290 * (10 ** (nf_db / 10) - 1)
    wavelength_m = 0.299792458 / f_ghz
    friis = (wavelength_m / (4 * math.pi * d_km * 1e3)) ** 2
    k = 10 ** (-228.6 / 10)
    signal = eirp_w * friis * gain / 10 ** (extra_db / 10)
    noise = k * temp * bw_mhz * 1e6
    return 10 * math.log10(signal / noise)


def test_fspl_examples():
    assert fspl_db(1.0, 1.0) == pytest.approx(92.45, abs=1e-12)
    assert fspl_db(1075.1, 2.0) == pytest.approx(159.1, abs=0.05)
    assert fspl_db(40316.0, 20.0) == pytest.approx(210.6, abs=0.05)


@pytest.mark.parametrize("args", [(0.0, 2.0), (100.0, 0.0), (-1.0, 2.0)])
def test_fspl_rejects_non_positive(args):
    with pytest.raises(DomainError):
        fspl_db(*args)


def test_eirp_examples():
    assert total_eirp_dbw(34.0, 1.0) == 34.0
    assert total_eirp_dbw(34.0, 30.0) == pytest.approx(48.77, abs=0.01)
    assert total_eirp_dbw(4.0, 400.0) == pytest.approx(30.02, abs=0.01)
    with pytest.raises(DomainError):
        total_eirp_dbw(34.0, 0.0)


def test_noise_temperature_examples():
    assert system_noise_temp_k(0.0, 290.0) == 290.0
    assert system_noise_temp_k(7.0, 290.0) == pytest.approx(1452.7, abs=1.0)
    assert system_noise_temp_k(1.2, 150.0) == pytest.approx(242.2, abs=1.0)
    assert g_over_t_dbk(39.7, system_noise_temp_k(1.2, 150.0)) == pytest.approx(15.86, abs=0.01)
    with pytest.raises(DomainError):
        system_noise_temp_k(-0.1, 290.0)


def test_snr_boltzmann_only():
    assert snr_db(0.0, 0.0, 0.0, 1.0) == pytest.approx(228.6, abs=1e-12)


@pytest.mark.parametrize("sid", scenario.BUILTIN_IDS)
def test_presets_hit_table(sid):
    b = scenario.resolve(scenario.builtin(sid)).budget
    assert abs(b.fspl_db - TABLE_FSPL[sid]) <= 0.05
    assert abs(b.snr_db - TABLE_SNR[sid]) <= 0.3


@pytest.mark.parametrize("sid", scenario.BUILTIN_IDS)
def test_presets_match_linear_oracle(sid):
    cfg = scenario.builtin(sid)
    b = scenario.resolve(cfg).budget
    expected = linear_snr_oracle(
        cfg.sat_eirp_density_dbw_mhz,
        cfg.bandwidth_mhz,
        cfg.ue_antenna.boresight_gain_dbi,
        cfg.ue_noise_figure_db,
        cfg.antenna_temp_k,
        b.slant_range_km,
        cfg.carrier_freq_ghz,
        cfg.losses.excess_db,
    )
    # the decibel FSPL constant 92.45 is rounded, hence a few mdB of slack
    assert b.snr_db == pytest.approx(expected, abs=0.01)


finite = st.floats(-50, 50)


@given(eirp=finite, gt=finite, pl=st.floats(100, 250), delta=st.floats(0.01, 20))
def test_snr_slopes(eirp, gt, pl, delta):
    base = snr_db(eirp, gt, pl, 1e6)
    assert snr_db(eirp + delta, gt, pl, 1e6) - base == pytest.approx(delta, abs=1e-9)
    assert snr_db(eirp, gt + delta, pl, 1e6) - base == pytest.approx(delta, abs=1e-9)
    assert snr_db(eirp, gt, pl + delta, 1e6) - base == pytest.approx(-delta, abs=1e-9)
    assert snr_db(eirp, gt, pl, 1e6 * 10 ** (delta / 10)) - base == pytest.approx(-delta, abs=1e-9)


@pytest.mark.parametrize("component", ["atmospheric_db", "scintillation_db", "shadowing_db", "additional_db"])
def test_snr_decreasing_in_each_loss(component):
    kw = dict(
        slant_range_km=1075.1, carrier_freq_ghz=2.0, bandwidth_mhz=30.0,
        eirp_density_dbw_mhz=34.0, ue_gain_dbi=0.0, noise_figure_db=7.0, antenna_temp_k=290.0,
    )
    base = compute_budget(losses=LossBreakdown(), **kw).snr_db
    more = compute_budget(losses=LossBreakdown(**{component: 1.5}), **kw).snr_db
    assert more - base == pytest.approx(-1.5, abs=1e-9)


@pytest.mark.parametrize("sid", scenario.BUILTIN_IDS)
def test_budget_round_trip(sid):
    b = scenario.resolve(scenario.builtin(sid)).budget
    assert b.recompute_snr_db() == pytest.approx(b.snr_db, abs=1e-9)
    assert b.total_pl_db == pytest.approx(b.fspl_db + b.losses.excess_db, abs=1e-12)
    assert b.g_over_t_dbk == pytest.approx(b.ue_gain_dbi - 10 * math.log10(b.system_temp_k), abs=1e-12)


def test_losses_reject_negative():
    with pytest.raises(DomainError):
        LossBreakdown(atmospheric_db=-0.1)


def test_budget_csv_and_table():
    b = scenario.resolve(scenario.builtin("sc9")).budget
    rows = list(csv.reader(io.StringIO(budget_csv(b))))
    assert rows[0] == ["component", "value", "unit"]
    values = {name: float(v) for name, v, _ in rows[1:]}
    assert values["snr"] == b.snr_db
    assert values["fspl"] == b.fspl_db
    assert values["boltzmann"] == BOLTZMANN_DBW_K_HZ
    text = format_budget(b, "sc9")
    assert text.startswith("sc9\n") and "total_path_loss" in text
