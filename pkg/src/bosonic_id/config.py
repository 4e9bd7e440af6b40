"""Plain-text key=value config files for channel parameters and simulation runs.

Lines are ``key = value``; blank lines and ``#`` comments are skipped.
Validation collects every bad field before raising, so one round trip fixes
a broken file.
"""

from dataclasses import dataclass
from pathlib import Path

from .channel import BroadcastParams


class ConfigError(ValueError):
    """One or more config fields failed validation; message lists all."""


def parse_kv_file(path) -> dict:
    pairs = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        pairs[key.strip()] = value.strip()
    return pairs


def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


@dataclass(frozen=True)
class ChannelConfig:
    params: BroadcastParams
    L: int


def load_channel_config(path) -> ChannelConfig:
    """Read tau1, tau2, N1, N2, E, L and the beam_splitter flag."""
    pairs = parse_kv_file(path)
    problems = []
    values = {}
    for key in ("tau1", "tau2", "N1", "N2", "E"):
        if key not in pairs:
            problems.append(f"missing field {key}")
            continue
        try:
            values[key] = float(pairs[key])
        except ValueError:
            problems.append(f"field {key}: not a number ({pairs[key]!r})")
    try:
        values["L"] = int(pairs["L"])
        if values["L"] < 1:
            problems.append(f"field L: must be >= 1, got {values['L']}")
    except KeyError:
        problems.append("missing field L")
    except ValueError:
        problems.append(f"field L: not an integer ({pairs.get('L')!r})")
    beam = False
    if "beam_splitter" in pairs:
        try:
            beam = _parse_bool(pairs["beam_splitter"])
        except ValueError as err:
            problems.append(f"field beam_splitter: {err}")
    unknown = set(pairs) - {"tau1", "tau2", "N1", "N2", "E", "L", "beam_splitter"}
    for key in sorted(unknown):
        problems.append(f"unknown field {key}")
    if not problems:
        try:
            params = BroadcastParams(
                tau1=values["tau1"], tau2=values["tau2"],
                N1=values["N1"], N2=values["N2"], E=values["E"],
                beam_splitter=beam,
            )
        except ValueError as err:
            problems.append(str(err))
    if problems:
        raise ConfigError(f"{path}: " + "; ".join(problems))
    return ChannelConfig(params=params, L=values["L"])


SIM_FLOAT_FIELDS = ("pool_rate", "bin_rate1", "bin_rate2", "id_rate1", "id_rate2",
                    "mu", "delta", "eta")
SIM_INT_FIELDS = ("n", "L", "M1", "M2", "trials", "constellation_size")


@dataclass(frozen=True)
class SimSpec:
    """Everything one identification-code simulation needs besides the seed."""

    n: int
    pool_rate: float
    bin_rate1: float
    bin_rate2: float
    id_rate1: float
    id_rate2: float
    mu: float
    delta: float
    eta: float
    L: int
    M1: int
    M2: int
    trials: int
    constellation_size: int
    constellation_scheme: str
    channel: ChannelConfig
    pessimistic_default: bool = True


def load_sim_spec(path) -> SimSpec:
    """Read a simulation spec; the channel field points at a channel config."""
    pairs = parse_kv_file(path)
    problems = []
    values = {}
    for key in SIM_FLOAT_FIELDS:
        if key not in pairs:
            problems.append(f"missing field {key}")
            continue
        try:
            values[key] = float(pairs[key])
        except ValueError:
            problems.append(f"field {key}: not a number ({pairs[key]!r})")
    for key in SIM_INT_FIELDS:
        if key not in pairs:
            problems.append(f"missing field {key}")
            continue
        try:
            values[key] = int(pairs[key])
            if values[key] < 1:
                problems.append(f"field {key}: must be >= 1, got {values[key]}")
        except ValueError:
            problems.append(f"field {key}: not an integer ({pairs[key]!r})")
    scheme = pairs.get("constellation_scheme", "grid")
    if scheme not in ("grid", "rings"):
        problems.append(f"field constellation_scheme: unknown scheme {scheme!r}")
    pessimistic = True
    if "pessimistic_default" in pairs:
        try:
            pessimistic = _parse_bool(pairs["pessimistic_default"])
        except ValueError as err:
            problems.append(f"field pessimistic_default: {err}")
    channel_cfg = None
    if "channel" not in pairs:
        problems.append("missing field channel (path to channel config)")
    else:
        channel_path = Path(pairs["channel"])
        if not channel_path.is_absolute():
            channel_path = Path(path).parent / channel_path
        try:
            channel_cfg = load_channel_config(channel_path)
        except (ConfigError, FileNotFoundError) as err:
            problems.append(f"field channel: {err}")
    known = set(SIM_FLOAT_FIELDS) | set(SIM_INT_FIELDS) | {
        "channel", "constellation_scheme", "pessimistic_default"}
    for key in sorted(set(pairs) - known):
        problems.append(f"unknown field {key}")
    if problems:
        raise ConfigError(f"{path}: " + "; ".join(problems))
    return SimSpec(
        n=values["n"], pool_rate=values["pool_rate"],
        bin_rate1=values["bin_rate1"], bin_rate2=values["bin_rate2"],
        id_rate1=values["id_rate1"], id_rate2=values["id_rate2"],
        mu=values["mu"], delta=values["delta"], eta=values["eta"],
        L=values["L"], M1=values["M1"], M2=values["M2"],
        trials=values["trials"],
        constellation_size=values["constellation_size"],
        constellation_scheme=scheme,
        channel=channel_cfg,
        pessimistic_default=pessimistic,
    )
