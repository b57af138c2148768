"""YAML configuration: Hz-valued device parameters, nested sections, line-numbered errors.

Layout::

    device:    f_m, gamma_m, kappa_ex_e, kappa_int_e, kappa_ex_o, kappa_B_o,
               kappa_int_o, delta_e, delta_o (all Hz), epsilon, epsilon_lo
    coupling:  per port, one of  gamma_<p> (target damping, Hz),
               g_<p> (pump-enhanced coupling, Hz), or
               vacuum_coupling_<p> (Hz) together with pump_amplitude_<p>
    bath:      temperature (K) or n_th_m, plus n_th_e, n_th_o
    chain:     measurement-chain settings for the dsp/feedforward layers
    scenarios: per-scenario knobs, keyed by scenario name

Overrides use dotted paths into this tree (``device.epsilon=0.9``).
"""

from __future__ import annotations

import copy
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import yaml

from .params import TWO_PI, ConverterParams, ParameterError, bose_occupancy, coupling_for_damping

_HZ_DEVICE = ("gamma_m", "kappa_ex_e", "kappa_int_e", "kappa_ex_o", "kappa_B_o",
              "kappa_int_o", "delta_e", "delta_o")
_PLAIN_DEVICE = ("epsilon", "epsilon_lo")
_KNOWN_SECTIONS = ("device", "coupling", "bath", "chain", "scenarios")


class _Loader(yaml.SafeLoader):
    """SafeLoader that also reads exponent floats without a sign or dot (1e6, 2.3e6)."""


_Loader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(r"""^[-+]?(?:[0-9][0-9_]*)(?:\.[0-9_]*)?(?:[eE][-+]?[0-9]+)$"""),
    list("-+0123456789"),
)


class ConfigError(ValueError):
    """Invalid configuration; the message carries the source line when known."""


@dataclass
class Config:
    data: dict
    source: str = "<memory>"
    lines: dict[str, int] = field(default_factory=dict)

    def where(self, dotted: str) -> str:
        # fall back to the closest enclosing key that has a line
        key = dotted
        while key:
            if key in self.lines:
                return f"{self.source}:{self.lines[key]}"
            key = key.rpartition(".")[0]
        return self.source

    def error(self, dotted: str, msg: str) -> ConfigError:
        return ConfigError(f"{self.where(dotted)}: {dotted}: {msg}")

    def get(self, dotted: str, default: Any = None) -> Any:
        node: Any = self.data
        for part in dotted.split("."):
            if not isinstance(node, dict) or part not in node:
                return default
            node = node[part]
        return node

    def section(self, name: str) -> dict:
        sec = self.data.get(name) or {}
        if not isinstance(sec, dict):
            raise self.error(name, "must be a mapping")
        return sec

    def scenario(self, name: str) -> dict:
        return dict(self.section("scenarios").get(name) or {})


def _to_python(node: yaml.Node, prefix: str, lines: dict[str, int], source: str):
    if isinstance(node, yaml.MappingNode):
        out = {}
        for knode, vnode in node.value:
            key = yaml.load(yaml.serialize(knode), Loader=_Loader)
            key = str(key)
            dotted = f"{prefix}.{key}" if prefix else key
            lines[dotted] = knode.start_mark.line + 1
            out[key] = _to_python(vnode, dotted, lines, source)
        return out
    if isinstance(node, yaml.SequenceNode):
        return [_to_python(v, f"{prefix}[{i}]", lines, source) for i, v in enumerate(node.value)]
    return yaml.load(yaml.serialize(node), Loader=_Loader)


def parse_config(text: str, source: str = "<memory>") -> Config:
    try:
        root = yaml.compose(text, Loader=_Loader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = f":{mark.line + 1}" if mark is not None else ""
        raise ConfigError(f"{source}{line}: malformed YAML: {exc}") from None
    lines: dict[str, int] = {}
    data = {} if root is None else _to_python(root, "", lines, source)
    if not isinstance(data, dict):
        raise ConfigError(f"{source}:1: top level must be a mapping")
    cfg = Config(data=data, source=source, lines=lines)
    for key in data:
        if key not in _KNOWN_SECTIONS:
            raise cfg.error(key, f"unknown section (expected one of {', '.join(_KNOWN_SECTIONS)})")
    return cfg


def load_config(path: str | Path | None = None) -> Config:
    """Load a config file; ``None`` gives the bundled device defaults."""
    if path is None:
        text = resources.files("optoconv").joinpath("configs/device.yaml").read_text()
        return parse_config(text, source="device.yaml")
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"{p}: cannot read config: {exc.strerror}") from None
    return parse_config(text, source=str(p))


def apply_overrides(cfg: Config, overrides: list[str]) -> Config:
    """Return a copy with ``a.b.c=value`` overrides applied (values parsed as YAML)."""
    data = copy.deepcopy(cfg.data)
    lines = dict(cfg.lines)
    for item in overrides:
        key, sep, raw = item.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"override {item!r}: expected key=value")
        try:
            value = yaml.load(raw, Loader=_Loader)
        except yaml.YAMLError:
            raise ConfigError(f"override {item!r}: value is not valid YAML") from None
        parts = key.split(".")
        if parts[0] not in _KNOWN_SECTIONS:
            raise ConfigError(f"override {item!r}: unknown section {parts[0]!r}")
        node = data
        for part in parts[:-1]:
            nxt = node.setdefault(part, {})
            if not isinstance(nxt, dict):
                raise ConfigError(f"override {item!r}: {part!r} is not a section")
            node = nxt
        node[parts[-1]] = value
        lines.pop(key, None)
    return Config(data=data, source=cfg.source, lines=lines)


def _number(cfg: Config, dotted: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise cfg.error(dotted, f"expected a number, got {value!r}")
    return float(value)


def _resolve_coupling(cfg: Config, base: ConverterParams, which: str) -> float:
    sec = cfg.section("coupling")
    options = [k for k in (f"gamma_{which}", f"g_{which}", f"vacuum_coupling_{which}")
               if sec.get(k) is not None]
    if len(options) != 1:
        raise cfg.error("coupling", f"port '{which}' needs exactly one of gamma_{which}, "
                        f"g_{which}, vacuum_coupling_{which} (found {options or 'none'})")
    key = options[0]
    dotted = f"coupling.{key}"
    value = _number(cfg, dotted, sec[key])
    if key.startswith("gamma_"):
        try:
            return coupling_for_damping(base, which, TWO_PI * value)
        except ParameterError as exc:
            raise cfg.error(dotted, str(exc)) from None
    if key.startswith("g_"):
        return TWO_PI * value
    amp_key = f"pump_amplitude_{which}"
    if amp_key not in sec:
        raise cfg.error(dotted, f"needs {amp_key} alongside it")
    return TWO_PI * value * _number(cfg, f"coupling.{amp_key}", sec[amp_key])


def converter_params(cfg: Config) -> ConverterParams:
    """Build validated ConverterParams, converting Hz to rad/s."""
    dev = cfg.section("device")
    bath = cfg.section("bath")
    kwargs: dict[str, float] = {}
    if "f_m" not in dev:
        raise cfg.error("device", "missing f_m")
    kwargs["omega_m"] = TWO_PI * _number(cfg, "device.f_m", dev["f_m"])
    for name in _HZ_DEVICE:
        if name not in dev:
            raise cfg.error("device", f"missing {name}")
        kwargs[name] = TWO_PI * _number(cfg, f"device.{name}", dev[name])
    for name in _PLAIN_DEVICE:
        if name in dev:
            kwargs[name] = _number(cfg, f"device.{name}", dev[name])
    unknown = set(dev) - {"f_m", *_HZ_DEVICE, *_PLAIN_DEVICE}
    if unknown:
        key = sorted(unknown)[0]
        raise cfg.error(f"device.{key}", "unknown device parameter")

    if "temperature" in bath and "n_th_m" in bath:
        raise cfg.error("bath", "give either temperature or n_th_m, not both")
    for name in ("n_th_m", "n_th_e", "n_th_o"):
        if name in bath:
            kwargs[name] = _number(cfg, f"bath.{name}", bath[name])

    def build(**extra) -> ConverterParams:
        try:
            return ConverterParams(g_e=0.0, g_o=0.0, **{**kwargs, **extra})
        except ParameterError as exc:
            # point at the offending field where possible
            msg = str(exc)
            name = msg.split(" ", 1)[0]
            for sec in ("device", "bath"):
                if name in cfg.section(sec):
                    raise cfg.error(f"{sec}.{name}", msg) from None
            if name == "omega_m":
                raise cfg.error("device.f_m", msg) from None
            raise cfg.error("device", msg) from None

    base = build()
    if "temperature" in bath:
        t = _number(cfg, "bath.temperature", bath["temperature"])
        try:
            base = base.replace(n_th_m=bose_occupancy(base.omega_m, t))
        except ParameterError as exc:
            raise cfg.error("bath.temperature", str(exc)) from None
    g_e = _resolve_coupling(cfg, base, "e")
    g_o = _resolve_coupling(cfg, base, "o")
    try:
        return base.replace(g_e=g_e, g_o=g_o)
    except ParameterError as exc:
        raise cfg.error("coupling", str(exc)) from None
