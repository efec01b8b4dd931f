# Bundled scenarios for the back-to-back, 20 km and 80 km links, each with the
# equalizer off and on. Values are partial config documents merged onto the
# defaults by src.scenarios.config_loader.

# Received optical power after the VOA; keeps the receiver thermal-noise limited
RX_POWER_DBM = -11.7

PRESET_SYMBOLS = 200_000

_BASE = {
    "schema_version": 1,
    "n_symbols": PRESET_SYMBOLS,
    "seed": 2024,
    "laser": {"power_dbm": 13.4, "wavelength_nm": 1550.0, "linewidth_hz": 100e3},
    "driver": {"f3db_hz": 7e9, "gain": 1.0},
    "receiver": {"rx_power_dbm": RX_POWER_DBM, "agc_target_vpp": 0.4},
}


def _preset(name: str, length_km: float, equalizer: bool, edfa: bool = False) -> dict:
    doc = {key: (dict(value) if isinstance(value, dict) else value) for key, value in _BASE.items()}
    doc["name"] = name
    doc["fiber"] = {"length_km": length_km}
    doc["equalizer"] = {"enabled": equalizer}
    if edfa:
        doc["edfa"] = {"enabled": True, "gain_db": 16.0, "noise_figure_db": 5.0}
    return doc


PRESETS = {
    "b2b": _preset("b2b", 0.0, equalizer=False),
    "b2b-eq": _preset("b2b-eq", 0.0, equalizer=True),
    "l20km": _preset("l20km", 20.0, equalizer=False),
    "l20km-eq": _preset("l20km-eq", 20.0, equalizer=True),
    "l80km": _preset("l80km", 80.0, equalizer=False, edfa=True),
    "l80km-eq": _preset("l80km-eq", 80.0, equalizer=True, edfa=True),
}

PRESET_DESCRIPTIONS = {
    "b2b": "Back-to-back, 7 GHz driver roll-off, equalizer off",
    "b2b-eq": "Back-to-back, 7 GHz driver roll-off, CMA equalizer on",
    "l20km": "20 km SSMF, equalizer off",
    "l20km-eq": "20 km SSMF, CMA equalizer on",
    "l80km": "80 km SSMF with 16 dB EDFA, equalizer off",
    "l80km-eq": "80 km SSMF with 16 dB EDFA, CMA equalizer on",
}
