"""TOML scenario files.

A scenario names exactly one problem family:

    [ellsberg]  alpha, eps, c, sigma
    [test]      beta, a, b, m_lo, m_hi, c (or c_hat), sigma
    [model] + [prior] + [payoffs]   the general form

plus optional [simulation], [sweep], [value] and [output] tables.  Writing a
parsed scenario back out is canonical, so serialize -> parse -> serialize is
byte-identical.
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from typing import Optional

import tomlkit
from tomlkit.exceptions import TOMLKitError

from .core import ModelParams, Payoffs, PriorInterval, Problem


class ScenarioError(ValueError):
    """The scenario file is malformed or inconsistent."""


@dataclass(frozen=True)
class EllsbergSpec:
    alpha: float
    eps: float
    c: float
    sigma: float = 1.0

    def problem(self):
        return Problem.ellsberg(self.alpha, self.eps, self.c, self.sigma)


@dataclass(frozen=True)
class TestSpec:
    beta: float
    a: float
    b: float
    m_lo: float
    m_hi: float
    c: Optional[float] = None
    c_hat: Optional[float] = None
    sigma: float = 1.0

    def cost(self):
        if self.c is not None:
            return self.c
        return self.c_hat * self.beta**2 / (2.0 * self.sigma**2)

    def problem(self):
        return Problem.hypothesis_test(self.beta, self.a, self.b, self.m_lo, self.m_hi, self.cost(), self.sigma)


@dataclass(frozen=True)
class GeneralSpec:
    theta0: float
    theta1: float
    sigma: float
    c: float
    m_lo: float
    m_hi: float
    u00: float
    u01: float
    u10: float
    u11: float
    u2: float

    def problem(self):
        return Problem(
            ModelParams(self.theta0, self.theta1, self.sigma, self.c),
            PriorInterval(self.m_lo, self.m_hi),
            Payoffs(self.u00, self.u01, self.u10, self.u11, self.u2),
        )


@dataclass(frozen=True)
class SimulationSpec:
    measure: str = "theta"
    theta: float = 0.0
    dt: float = 1e-4
    t_max: Optional[float] = None
    paths: int = 10_000
    seed: int = 0
    bridge: bool = True
    trace: Optional[str] = None


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: tuple


@dataclass(frozen=True)
class ValueSpec:
    t: float = 0.0
    z_min: Optional[float] = None
    z_max: Optional[float] = None
    n: int = 201


@dataclass(frozen=True)
class OutputSpec:
    path: Optional[str] = None
    format: Optional[str] = None


@dataclass(frozen=True)
class Scenario:
    family: object
    simulation: SimulationSpec = field(default_factory=SimulationSpec)
    sweep: Optional[SweepSpec] = None
    value: ValueSpec = field(default_factory=ValueSpec)
    output: OutputSpec = field(default_factory=OutputSpec)

    def problem(self):
        return self.family.problem()


_SIM_MEASURES = ("theta", "worst")
_SWEEP_PARAMS = ("eps", "c", "alpha", "u2")
_FORMATS = ("json", "csv")


def _take(cls, table, name):
    table = dict(table)
    known = {f.name for f in fields(cls)}
    extra = set(table) - known
    if extra:
        raise ScenarioError(f"unknown keys in [{name}]: {sorted(extra)}")
    kwargs = {}
    for f in fields(cls):
        if f.name not in table:
            continue
        v = table[f.name]
        if isinstance(v, bool) and f.type not in ("bool",):
            raise ScenarioError(f"[{name}].{f.name} must not be a boolean")
        if f.type in ("float", "Optional[float]"):
            if not isinstance(v, (int, float)):
                raise ScenarioError(f"[{name}].{f.name} must be a number")
            v = float(v)
        elif f.type == "int" and not isinstance(v, int):
            raise ScenarioError(f"[{name}].{f.name} must be an integer")
        elif f.type == "bool" and not isinstance(v, bool):
            raise ScenarioError(f"[{name}].{f.name} must be true or false")
        elif f.type in ("str", "Optional[str]") and not isinstance(v, str):
            raise ScenarioError(f"[{name}].{f.name} must be a string")
        kwargs[f.name] = v
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ScenarioError(f"[{name}]: {exc}") from None


def parse(text) -> Scenario:
    try:
        doc = tomlkit.parse(text).unwrap()
    except TOMLKitError as exc:
        raise ScenarioError(f"invalid TOML: {exc}") from None

    allowed = {"ellsberg", "test", "model", "prior", "payoffs", "simulation", "sweep", "value", "output"}
    extra = set(doc) - allowed
    if extra:
        raise ScenarioError(f"unknown tables: {sorted(extra)}")
    general = [k for k in ("model", "prior", "payoffs") if k in doc]
    families = [k for k in ("ellsberg", "test") if k in doc] + (["general"] if general else [])
    if len(families) != 1:
        raise ScenarioError(f"exactly one problem family is required, found {families or 'none'}")

    if "ellsberg" in doc:
        fam = _take(EllsbergSpec, doc["ellsberg"], "ellsberg")
    elif "test" in doc:
        fam = _take(TestSpec, doc["test"], "test")
        if (fam.c is None) == (fam.c_hat is None):
            raise ScenarioError("[test] needs exactly one of c and c_hat")
    else:
        if len(general) != 3:
            raise ScenarioError("the general form needs [model], [prior] and [payoffs]")
        merged = {}
        for k in general:
            clash = set(merged) & set(doc[k])
            if clash:
                raise ScenarioError(f"duplicate keys {sorted(clash)}")
            merged.update(doc[k])
        fam = _take(GeneralSpec, merged, "model/prior/payoffs")

    sc = Scenario(fam)
    if "simulation" in doc:
        sim = _take(SimulationSpec, doc["simulation"], "simulation")
        if sim.measure not in _SIM_MEASURES:
            raise ScenarioError(f"[simulation].measure must be one of {_SIM_MEASURES}")
        sc = replace(sc, simulation=sim)
    if "sweep" in doc:
        sw = dict(doc["sweep"])
        vals = sw.get("values")
        if not isinstance(vals, list) or not vals or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in vals):
            raise ScenarioError("[sweep].values must be a non-empty list of numbers")
        if sw.get("parameter") not in _SWEEP_PARAMS:
            raise ScenarioError(f"[sweep].parameter must be one of {_SWEEP_PARAMS}")
        if set(sw) - {"parameter", "values"}:
            raise ScenarioError("unknown keys in [sweep]")
        sc = replace(sc, sweep=SweepSpec(sw["parameter"], tuple(float(v) for v in vals)))
    if "value" in doc:
        sc = replace(sc, value=_take(ValueSpec, doc["value"], "value"))
    if "output" in doc:
        out = _take(OutputSpec, doc["output"], "output")
        if out.format is not None and out.format not in _FORMATS:
            raise ScenarioError(f"[output].format must be one of {_FORMATS}")
        sc = replace(sc, output=out)
    return sc


def load(path) -> Scenario:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse(fh.read())
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc}") from None


def _table(obj, keys=None):
    t = tomlkit.table()
    for f in fields(obj):
        if keys is not None and f.name not in keys:
            continue
        v = getattr(obj, f.name)
        if v is None:
            continue
        t.add(f.name, list(v) if isinstance(v, tuple) else v)
    return t


def serialize(sc: Scenario) -> str:
    doc = tomlkit.document()
    fam = sc.family
    if isinstance(fam, EllsbergSpec):
        doc.add("ellsberg", _table(fam))
    elif isinstance(fam, TestSpec):
        doc.add("test", _table(fam))
    else:
        doc.add("model", _table(fam, ("theta0", "theta1", "sigma", "c")))
        doc.add("prior", _table(fam, ("m_lo", "m_hi")))
        doc.add("payoffs", _table(fam, ("u00", "u01", "u10", "u11", "u2")))
    doc.add("simulation", _table(sc.simulation))
    if sc.sweep is not None:
        doc.add("sweep", _table(sc.sweep))
    doc.add("value", _table(sc.value))
    out = _table(sc.output)
    if len(out):
        doc.add("output", out)
    return tomlkit.dumps(doc)
