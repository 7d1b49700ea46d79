"""Scenario configuration files: strict INI parsing plus semantic validation.

Parsing problems (unknown sections or keys, missing sections, malformed
values) raise ConfigError and name the offender.  Model-level problems
(assumption violations, MLRP failures, incompatible profile/scheme pairs)
are returned by validate_scenario as plain messages.
"""

from __future__ import annotations

import configparser
from pathlib import Path

from .engine import ScenarioSpec
from .observation import Complete, CustomStochastic, Endogenous, Line, Star, parse_capacity
from .payoffs import (
    PayoffSpec,
    conformity_threshold,
    linear_payoff,
    separation_payoff,
    tabulated_payoff,
    validate_assumptions,
)
from .presets import preset
from .signals import (
    BoundedMixture,
    LinearSymmetric,
    SignalStructure,
    UnclassifiedBeliefsError,
    check_mlrp,
    classify_beliefs,
    load_tabulated,
)
from .strategies import (
    CutoffCoordination,
    DelegateObserver,
    EndogenousCutoff,
    FixedAction,
    NoInteriorCutoffError,
    PrivateSignalSymmetric,
    SeparationSplit,
    TruthSeeking,
    limit_cutoff,
)


class ConfigError(ValueError):
    """Malformed scenario configuration; message names the offender."""


_ALLOWED_KEYS = {
    "scenario": {"preset"},
    "signal": {"family", "lambda", "table_state0", "table_state1", "grid_size"},
    "payoff": {"kind", "base", "match_bonus", "conformity_step", "match_step", "kappa", "table_path"},
    "observation": {"scheme", "patterns", "cost", "capacity"},
    "strategy": {"profile", "epsilon", "action", "punish", "max_iter", "tol"},
    "simulation": {"sizes", "horizon", "replications", "seed", "herd_window", "forced_state", "label"},
}


def _read_ini(text: str) -> dict[str, dict[str, str]]:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config parse error: {exc}") from exc
    if parser.defaults():
        key = next(iter(parser.defaults()))
        raise ConfigError(f"unknown section 'DEFAULT' (key {key!r})")
    data: dict[str, dict[str, str]] = {}
    for section in parser.sections():
        if section not in _ALLOWED_KEYS:
            raise ConfigError(f"unknown section [{section}]")
        allowed = _ALLOWED_KEYS[section]
        body = {}
        for key, value in parser.items(section):
            if key not in allowed:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
            body[key] = value.strip()
        data[section] = body
    return data


class _Section:
    def __init__(self, name: str, body: dict[str, str]):
        self.name = name
        self.body = dict(body)

    def take(self, key: str, default=None, required: bool = False) -> str | None:
        if key in self.body:
            return self.body.pop(key)
        if required:
            raise ConfigError(f"missing key {key!r} in section [{self.name}]")
        return default

    def reject_leftovers(self, context: str) -> None:
        if self.body:
            key = next(iter(self.body))
            raise ConfigError(f"key {key!r} in section [{self.name}] does not apply to {context}")


def _as_float(section: str, key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"key {key!r} in section [{section}] is not a number: {raw!r}") from None


def _as_int(section: str, key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"key {key!r} in section [{section}] is not an integer: {raw!r}") from None


def _as_bool(section: str, key: str, raw: str) -> bool:
    low = raw.lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"key {key!r} in section [{section}] is not a boolean: {raw!r}")


def _build_signal(body: dict[str, str]) -> SignalStructure:
    sec = _Section("signal", body)
    family = sec.take("family", required=True)
    if family == "linear_symmetric":
        sec.reject_leftovers("linear_symmetric")
        return SignalStructure(LinearSymmetric())
    if family == "bounded_mixture":
        lam = _as_float("signal", "lambda", sec.take("lambda", required=True))
        sec.reject_leftovers("bounded_mixture")
        return SignalStructure(BoundedMixture(lam))
    if family == "tabulated":
        path0 = sec.take("table_state0", required=True)
        path1 = sec.take("table_state1", required=True)
        grid = sec.take("grid_size")
        grid_size = _as_int("signal", "grid_size", grid) if grid is not None else 257
        sec.reject_leftovers("tabulated")
        try:
            return SignalStructure(load_tabulated(path0, path1, grid_size=grid_size))
        except OSError as exc:
            raise ConfigError(f"signal table unreadable: {exc}") from exc
    raise ConfigError(f"unknown signal family {family!r}")


def _build_payoff(body: dict[str, str] | None) -> PayoffSpec:
    if body is None:
        return linear_payoff(0.1, 1.0, 0.25)
    sec = _Section("payoff", body)
    kind = sec.take("kind", default="linear")
    if kind == "linear":
        base = _as_float("payoff", "base", sec.take("base", "0.1"))
        bonus = _as_float("payoff", "match_bonus", sec.take("match_bonus", "1.0"))
        step = _as_float("payoff", "conformity_step", sec.take("conformity_step", "0.25"))
        mstep = _as_float("payoff", "match_step", sec.take("match_step", "0.0"))
        sec.reject_leftovers("linear payoffs")
        return linear_payoff(base, bonus, step, match_step=mstep)
    if kind == "separation":
        kappa = _as_float("payoff", "kappa", sec.take("kappa", "2.0"))
        bonus = _as_float("payoff", "match_bonus", sec.take("match_bonus", "1.0"))
        sec.reject_leftovers("separation payoffs")
        return separation_payoff(kappa=kappa, match_bonus=bonus)
    if kind == "table":
        path = sec.take("table_path", required=True)
        sec.reject_leftovers("table payoffs")
        return _load_payoff_table(path)
    raise ConfigError(f"unknown payoff kind {kind!r}")


def _load_payoff_table(path: str) -> PayoffSpec:
    rows = []
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"payoff table unreadable: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 4:
            raise ConfigError(f"payoff table line {lineno}: expected theta,action,m,value")
        try:
            rows.append((int(parts[0]), int(parts[1]), int(parts[2]), float(parts[3])))
        except ValueError:
            raise ConfigError(f"payoff table line {lineno}: bad literal") from None
    if not rows:
        raise ConfigError("payoff table is empty")
    m_cap = max(r[2] for r in rows)
    table = [[[None] * m_cap for _ in range(2)] for _ in range(2)]
    for theta, a, m, v in rows:
        if theta not in (0, 1) or a not in (0, 1) or not 1 <= m <= m_cap:
            raise ConfigError(f"payoff table entry ({theta},{a},{m}) out of range")
        table[theta][a][m - 1] = v
    for theta in (0, 1):
        for a in (0, 1):
            for m in range(m_cap):
                if table[theta][a][m] is None:
                    raise ConfigError(f"payoff table missing entry ({theta},{a},{m + 1})")
    return tabulated_payoff(table)


def _build_scheme(body: dict[str, str]):
    sec = _Section("observation", body)
    scheme = sec.take("scheme", required=True)
    if scheme in ("complete", "line", "star"):
        sec.reject_leftovers(scheme)
        return {"complete": Complete, "line": Line, "star": Star}[scheme]()
    if scheme == "custom":
        raw = sec.take("patterns", required=True)
        sec.reject_leftovers("custom")
        entries = []
        for item in raw.split(","):
            item = item.strip()
            if "@" not in item:
                raise ConfigError(f"custom pattern {item!r} needs the form pattern@probability")
            pat, prob = item.rsplit("@", 1)
            entries.append((pat.strip(), _as_float("observation", "patterns", prob)))
        try:
            return CustomStochastic(tuple(entries))
        except ValueError as exc:
            raise ConfigError(f"custom patterns invalid: {exc}") from exc
    if scheme == "endogenous":
        cost = _as_float("observation", "cost", sec.take("cost", required=True))
        raw_cap = sec.take("capacity", required=True)
        sec.reject_leftovers("endogenous")
        try:
            capacity = parse_capacity(raw_cap)
        except ValueError as exc:
            raise ConfigError(f"capacity invalid: {exc}") from exc
        try:
            return Endogenous(cost=cost, capacity=capacity)
        except ValueError as exc:
            raise ConfigError(f"endogenous scheme invalid: {exc}") from exc
    raise ConfigError(f"unknown observation scheme {scheme!r}")


def _build_profile(body: dict[str, str]):
    sec = _Section("strategy", body)
    profile = sec.take("profile", required=True)
    if profile == "truth_seeking":
        sec.reject_leftovers("truth_seeking")
        return TruthSeeking()
    if profile == "fixed_action":
        action = _as_int("strategy", "action", sec.take("action", required=True))
        if action not in (0, 1):
            raise ConfigError("key 'action' in section [strategy] must be 0 or 1")
        sec.reject_leftovers("fixed_action")
        return FixedAction(action)
    if profile == "cutoff_coordination":
        eps = _as_float("strategy", "epsilon", sec.take("epsilon", required=True))
        sec.reject_leftovers("cutoff_coordination")
        return CutoffCoordination(epsilon=eps)
    if profile == "delegate_observer":
        punish = sec.take("punish")
        sec.reject_leftovers("delegate_observer")
        return DelegateObserver(punish=_as_bool("strategy", "punish", punish) if punish else True)
    if profile == "endogenous_cutoff":
        sec.reject_leftovers("endogenous_cutoff")
        return EndogenousCutoff()
    if profile == "separation_split":
        sec.reject_leftovers("separation_split")
        return SeparationSplit()
    if profile == "private_signal_symmetric":
        max_iter = sec.take("max_iter")
        tol = sec.take("tol")
        sec.reject_leftovers("private_signal_symmetric")
        return PrivateSignalSymmetric(
            max_iter=_as_int("strategy", "max_iter", max_iter) if max_iter else 500,
            tol=_as_float("strategy", "tol", tol) if tol else 1e-8,
        )
    raise ConfigError(f"unknown strategy profile {profile!r}")


def _parse_sizes(raw: str) -> tuple[tuple[int, float], ...]:
    out = []
    for item in raw.split(","):
        item = item.strip()
        if ":" not in item:
            raise ConfigError(f"size entry {item!r} needs the form size:probability")
        q, p = item.split(":", 1)
        out.append((_as_int("simulation", "sizes", q), _as_float("simulation", "sizes", p)))
    return tuple(out)


def parse_config_text(text: str, default_label: str = "scenario") -> ScenarioSpec:
    """Build a ScenarioSpec from config text; ConfigError on parse problems."""
    data = _read_ini(text)

    if "scenario" in data:
        sec = _Section("scenario", data.pop("scenario"))
        name = sec.take("preset", required=True)
        sec.reject_leftovers("preset selection")
        extra = [s for s in data if s != "simulation"]
        if extra:
            raise ConfigError(
                f"section [{extra[0]}] not allowed alongside a preset; override via [simulation]"
            )
        try:
            spec = preset(name)
        except KeyError as exc:
            raise ConfigError(str(exc.args[0])) from None
        return _apply_simulation(spec, data.get("simulation"), allow_partial=True)

    for required in ("signal", "observation", "strategy", "simulation"):
        if required not in data:
            raise ConfigError(f"missing section [{required}]")

    structure = _build_signal(data["signal"])
    payoff = _build_payoff(data.get("payoff"))
    scheme = _build_scheme(data["observation"])
    profile = _build_profile(data["strategy"])

    sim = _Section("simulation", data["simulation"])
    sizes = _parse_sizes(sim.take("sizes", required=True))
    horizon = _as_int("simulation", "horizon", sim.take("horizon", required=True))
    replications = _as_int("simulation", "replications", sim.take("replications", required=True))
    seed = _as_int("simulation", "seed", sim.take("seed", "0"))
    herd_window = _as_int("simulation", "herd_window", sim.take("herd_window", "50"))
    forced_raw = sim.take("forced_state")
    forced = _as_int("simulation", "forced_state", forced_raw) if forced_raw is not None else None
    label = sim.take("label", default_label)
    sim.reject_leftovers("simulation settings")

    return ScenarioSpec(
        structure=structure,
        payoff=payoff,
        scheme=scheme,
        profile=profile,
        sizes=sizes,
        horizon=horizon,
        replications=replications,
        seed=seed,
        herd_window=herd_window,
        forced_state=forced,
        label=label,
    )


def _apply_simulation(spec: ScenarioSpec, body: dict[str, str] | None, allow_partial: bool) -> ScenarioSpec:
    if body is None:
        return spec
    from dataclasses import replace

    sec = _Section("simulation", body)
    updates = {}
    for key, conv in (
        ("horizon", _as_int),
        ("replications", _as_int),
        ("seed", _as_int),
        ("herd_window", _as_int),
        ("forced_state", _as_int),
    ):
        raw = sec.take(key)
        if raw is not None:
            updates[key] = conv("simulation", key, raw)
    raw = sec.take("label")
    if raw is not None:
        updates["label"] = raw
    raw = sec.take("sizes")
    if raw is not None:
        updates["sizes"] = _parse_sizes(raw)
    sec.reject_leftovers("simulation overrides")
    return replace(spec, **updates)


def parse_config(path) -> ScenarioSpec:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"config unreadable: {exc}") from exc
    return parse_config_text(text, default_label=Path(path).stem)


def validate_scenario(spec: ScenarioSpec) -> list[str]:
    """Model-level checks; empty list means the scenario is runnable."""
    problems: list[str] = []

    report = validate_assumptions(spec.payoff)
    coordination_profiles = (TruthSeeking, FixedAction, CutoffCoordination,
                             DelegateObserver, EndogenousCutoff, PrivateSignalSymmetric)
    if isinstance(spec.profile, SeparationSplit):
        if report.direction != "decreasing":
            problems.append(
                "separation profiles need payoffs strictly decreasing in the head count"
            )
        problems.extend(v for v in report.violations if not v.startswith("assumption 3"))
    elif isinstance(spec.profile, coordination_profiles):
        problems.extend(report.violations)
        if report.passed and report.direction != "increasing":
            problems.append("coordination profiles need payoffs strictly increasing in the head count")

    for q in sorted({q for q, _ in spec.sizes}):
        mlrp = check_mlrp(spec.structure, q)
        if not mlrp.passed:
            s_lo, _, r_lo, r_hi = mlrp.witness
            problems.append(
                f"MLRP fails for the size-{q} family: "
                f"ratio falls {r_lo:.6g} -> {r_hi:.6g} near s={s_lo:.6g}"
            )

    try:
        classify_beliefs(spec.structure, [q for q, _ in spec.sizes])
    except UnclassifiedBeliefsError as exc:
        problems.append(str(exc))

    if isinstance(spec.profile, CutoffCoordination) and report.passed and report.direction == "increasing":
        qhat = conformity_threshold(spec.payoff)
        small = [q for q, _ in spec.sizes if q < qhat]
        if small:
            problems.append(
                f"cutoff coordination needs sizes at or above the conformity threshold {qhat}; got {small}"
            )
    if isinstance(spec.profile, EndogenousCutoff):
        if not isinstance(spec.scheme, Endogenous):
            problems.append("the endogenous-cutoff profile needs an endogenous observation scheme")
        else:
            for q, _ in spec.sizes:
                try:
                    limit_cutoff(spec.structure, spec.payoff, spec.scheme.cost, q)
                except NoInteriorCutoffError as exc:
                    problems.append(f"size {q}: {exc}")
    if isinstance(spec.profile, DelegateObserver) and not isinstance(spec.scheme, (Endogenous, Line)):
        problems.append("delegate profiles need an endogenous scheme or a line")
    if isinstance(spec.profile, SeparationSplit) and not isinstance(spec.scheme, Complete):
        problems.append("separation profiles need complete observation")
    if isinstance(spec.profile, PrivateSignalSymmetric) and not isinstance(spec.scheme, Line):
        problems.append("private-signal profiles run on the line")
    return problems
