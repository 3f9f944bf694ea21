"""Scenario files: schema, validation, parsing and emission.

A scenario is a JSON document declaring agents (holdings, per-class
requirements with optional bands, attributes, strategy profile), the
substitution policy, entitlement rules, optional reservoir holdings and the
simulation config. Parsing validates structure and cross-references and
reports a locus path ("rules[2].giver.ids[0]") with every error; emission
produces a canonical form that round-trips.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Mapping

from .classify import SasState, SufficiencyBand
from .engine import SimConfig, StopCondition
from .entitlement import EntitlementRule, EntitlementType, PartyMatch, TransferSpec
from .errors import DanglingReference, DuplicateId, SchemaError
from .multiset import Multiset
from .population import RESERVOIR_ID, Agent, Population, Requirement, make_reservoir
from .resources import ResourceClass, ResourceItem, SubstitutionEntry, SubstitutionPolicy
from .strategy import (
    AdjustRequirement,
    DestroyResources,
    EffectPrimitive,
    GiveAway,
    HoardResources,
    Invest,
    ProposeExchange,
    Stance,
    StrategyProfile,
)

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Scenario:
    name: str
    description: str = ""
    config: SimConfig = field(default_factory=SimConfig)
    policy: SubstitutionPolicy = field(default_factory=SubstitutionPolicy)
    agents: tuple[Agent, ...] = ()
    reservoir: Agent | None = None
    rules: tuple[EntitlementRule, ...] = ()

    def build_population(self) -> Population:
        return Population(agents=self.agents, rules=self.rules, reservoir=self.reservoir)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "description": self.description,
            "config": self.config.to_dict(),
            "substitutions": [
                {
                    "class": e.resource_class.value,
                    "from_kind": e.from_kind,
                    "to_kind": e.to_kind,
                    "context": e.context,
                }
                for e in sorted(self.policy.entries())
            ],
            "agents": [_agent_to_dict(a) for a in self.agents],
            "reservoir": _items_to_list(self.reservoir.resources) if self.reservoir else None,
            "rules": [_rule_to_dict(r) for r in self.rules],
        }


def emit_scenario(scenario: Scenario) -> str:
    return json.dumps(scenario.to_dict(), indent=2, sort_keys=True) + "\n"


def parse_scenario(text: str) -> Scenario:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as error:
        raise SchemaError("$", f"not valid JSON: {error}") from error
    if not isinstance(raw, dict):
        raise SchemaError("$", "scenario must be a JSON object")
    version = raw.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaError("schema_version", f"expected {SCHEMA_VERSION}, got {version!r}")

    name = _expect_str(raw, "name", "name")
    description = str(raw.get("description", ""))
    config = _parse_config(raw.get("config", {}))
    policy = _parse_policy(raw.get("substitutions", []))
    agents = tuple(
        _parse_agent(entry, f"agents[{i}]") for i, entry in enumerate(_expect_list(raw, "agents", "agents"))
    )
    reservoir = None
    if raw.get("reservoir") is not None:
        reservoir = make_reservoir(_parse_items(raw["reservoir"], "reservoir"))
    rules = tuple(
        _parse_rule(entry, f"rules[{i}]") for i, entry in enumerate(raw.get("rules", []))
    )

    scenario = Scenario(
        name=name,
        description=description,
        config=config,
        policy=policy,
        agents=agents,
        reservoir=reservoir,
        rules=rules,
    )
    _validate_references(scenario)
    return scenario


def load_scenario(path) -> Scenario:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_scenario(handle.read())


# --- serialization helpers ----------------------------------------------------


def _items_to_list(bag: Multiset) -> list[dict]:
    return [
        {
            "class": item.resource_class.value,
            "kind": item.kind,
            "quality": sorted(item.quality_tags),
            "count": count,
        }
        for item, count in sorted(bag.items(), key=lambda p: p[0].sort_key())
    ]


def _band_to_dict(band: SufficiencyBand | None) -> dict | None:
    if band is None:
        return None
    return {"lower": band.lower, "upper": band.upper}


def _match_to_dict(match: PartyMatch) -> dict:
    out: dict[str, Any] = {}
    if match.ids is not None:
        out["ids"] = sorted(match.ids)
    if match.attrs_equal:
        out["attrs_equal"] = dict(match.attrs_equal)
    if match.attrs_min:
        out["attrs_min"] = dict(match.attrs_min)
    return out


def _spec_to_dict(spec: TransferSpec | None) -> dict | None:
    if spec is None:
        return None
    return {"class": spec.resource_class.value, "kind": spec.kind, "count": spec.count}


def _effect_to_dict(effect: EffectPrimitive) -> dict:
    if isinstance(effect, AdjustRequirement):
        return {
            "effect": "adjust_requirement",
            "class": effect.resource_class.value if effect.resource_class else None,
            "delta": effect.delta,
            "band": _band_to_dict(effect.band),
        }
    if isinstance(effect, DestroyResources):
        return {
            "effect": "destroy_resources",
            "class": effect.resource_class.value if effect.resource_class else None,
            "kind": effect.kind,
            "count": effect.count,
        }
    if isinstance(effect, HoardResources):
        return {
            "effect": "hoard_resources",
            "class": effect.resource_class.value if effect.resource_class else None,
        }
    if isinstance(effect, ProposeExchange):
        return {"effect": "propose_exchange", "mode": effect.mode, "rule_id": effect.rule_id}
    if isinstance(effect, Invest):
        return {
            "effect": "invest",
            "give": _spec_to_dict(effect.give),
            "receive": _spec_to_dict(effect.receive),
            "maturity": effect.maturity,
            "counterparty": effect.counterparty,
        }
    if isinstance(effect, GiveAway):
        return {
            "effect": "give_away",
            "class": effect.resource_class.value if effect.resource_class else None,
            "kind": effect.kind,
            "count": effect.count,
            "recipient": effect.recipient,
        }
    raise TypeError(f"unknown effect {effect!r}")


def _profile_to_dict(profile: StrategyProfile | None) -> dict | None:
    if profile is None:
        return None
    return {
        "stance": profile.stance.value if profile.stance else None,
        "stance_by_state": {s.value: st.value for s, st in sorted(profile.stance_by_state.items())},
        "stance_weights": (
            {s.value: w for s, w in sorted(profile.stance_weights.items())}
            if profile.stance_weights
            else None
        ),
        "respond_to": sorted(s.value for s in profile.respond_to),
        "salience": [c.value for c in profile.salience_classes],
        "cells": [
            {
                "stance": stance.value,
                "state": state.value,
                "effects": [_effect_to_dict(e) for e in effects],
            }
            for (stance, state), effects in sorted(
                profile.cell_effects.items(), key=lambda kv: (kv[0][0].value, kv[0][1].value)
            )
        ],
    }


def _agent_to_dict(agent: Agent) -> dict:
    return {
        "id": agent.id,
        "attributes": dict(agent.attributes),
        "resources": _items_to_list(agent.resources),
        "requirements": [
            {
                "class": resource_class.value,
                "items": [
                    {"kind": item.kind, "quality": sorted(item.quality_tags), "count": count}
                    for item, count in sorted(
                        requirement.items.items(), key=lambda p: p[0].sort_key()
                    )
                ],
                "band": _band_to_dict(requirement.band),
            }
            for resource_class, requirement in sorted(
                agent.requirements.items(), key=lambda kv: kv[0].value
            )
        ],
        "strategy": _profile_to_dict(agent.strategy),
    }


def _rule_to_dict(rule: EntitlementRule) -> dict:
    return {
        "id": rule.id,
        "type": rule.etype.value,
        "giver": _match_to_dict(rule.giver_match),
        "receiver": _match_to_dict(rule.receiver_match),
        "give": _spec_to_dict(rule.give),
        "receive": _spec_to_dict(rule.receive),
        "legitimate": rule.legitimate,
        "capacity": rule.capacity,
        "enabled": rule.enabled,
    }


# --- parsing helpers ----------------------------------------------------------


def _expect_str(obj: Mapping, key: str, locus: str) -> str:
    value = obj.get(key)
    if not isinstance(value, str) or not value:
        raise SchemaError(locus, f"expected a non-empty string, got {value!r}")
    return value


def _expect_list(obj: Mapping, key: str, locus: str) -> list:
    value = obj.get(key)
    if not isinstance(value, list):
        raise SchemaError(locus, f"expected a list, got {value!r}")
    return value


def _expect_int(value: Any, locus: str, minimum: int | None = None) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise SchemaError(locus, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise SchemaError(locus, f"expected >= {minimum}, got {value}")
    return value


def _parse_class(value: Any, locus: str) -> ResourceClass:
    try:
        return ResourceClass(value)
    except ValueError:
        raise SchemaError(locus, f"unknown resource class {value!r}") from None


def _parse_state(value: Any, locus: str) -> SasState:
    try:
        state = SasState(value)
    except ValueError:
        raise SchemaError(locus, f"unknown state {value!r}") from None
    if state is SasState.UNDEFINED:
        raise SchemaError(locus, "the undefined state cannot be referenced here")
    return state


def _parse_stance(value: Any, locus: str) -> Stance:
    try:
        return Stance(value)
    except ValueError:
        raise SchemaError(locus, f"unknown stance {value!r}") from None


def _parse_band(value: Any, locus: str) -> SufficiencyBand | None:
    if value is None:
        return None
    if not isinstance(value, dict):
        raise SchemaError(locus, f"expected a band object, got {value!r}")
    lower = _expect_int(value.get("lower"), f"{locus}.lower", minimum=0)
    upper = value.get("upper")
    if upper is not None:
        upper = _expect_int(upper, f"{locus}.upper", minimum=0)
    if upper is not None and upper < lower:
        raise SchemaError(locus, f"band upper {upper} below lower {lower}")
    return SufficiencyBand(lower=lower, upper=upper)


def _parse_config(raw: Any) -> SimConfig:
    if not isinstance(raw, dict):
        raise SchemaError("config", f"expected an object, got {raw!r}")
    stop_conditions = []
    for i, entry in enumerate(raw.get("stop_conditions", [])):
        locus = f"config.stop_conditions[{i}]"
        if not isinstance(entry, dict) or "all_agents" not in entry:
            raise SchemaError(locus, "expected {'all_agents': {'class': ..., 'state': ...}}")
        inner = entry["all_agents"]
        stop_conditions.append(
            StopCondition(
                resource_class=_parse_class(inner.get("class"), f"{locus}.class"),
                state=_parse_state(inner.get("state"), f"{locus}.state"),
            )
        )
    system_bands = {}
    for class_name, band_raw in (raw.get("system_bands") or {}).items():
        locus = f"config.system_bands.{class_name}"
        band = _parse_band(band_raw, locus)
        if band is None:
            raise SchemaError(locus, "system band cannot be null")
        system_bands[_parse_class(class_name, locus)] = band
    mode = raw.get("mode", "raw")
    if mode not in ("raw", "coverage"):
        raise SchemaError("config.mode", f"expected 'raw' or 'coverage', got {mode!r}")
    seed = raw.get("seed", 0)
    _expect_int(seed, "config.seed", minimum=0)
    ticks = raw.get("ticks", 1)
    _expect_int(ticks, "config.ticks", minimum=1)
    context = raw.get("context", "default")
    if not isinstance(context, str) or not context:
        raise SchemaError("config.context", f"expected a non-empty string, got {context!r}")
    return SimConfig(
        ticks=ticks,
        seed=seed,
        mode=mode,
        partial_commit=bool(raw.get("partial_commit", False)),
        context=context,
        stop_conditions=tuple(stop_conditions),
        system_bands=system_bands,
    )


def _parse_policy(raw: Any) -> SubstitutionPolicy:
    if not isinstance(raw, list):
        raise SchemaError("substitutions", f"expected a list, got {raw!r}")
    entries = []
    for i, entry in enumerate(raw):
        locus = f"substitutions[{i}]"
        if not isinstance(entry, dict):
            raise SchemaError(locus, f"expected an object, got {entry!r}")
        entries.append(
            SubstitutionEntry(
                resource_class=_parse_class(entry.get("class"), f"{locus}.class"),
                from_kind=_expect_str(entry, "from_kind", f"{locus}.from_kind"),
                to_kind=_expect_str(entry, "to_kind", f"{locus}.to_kind"),
                context=str(entry.get("context", "default")),
            )
        )
    return SubstitutionPolicy(entries)


def _parse_items(raw: Any, locus: str, fixed_class: ResourceClass | None = None) -> Multiset:
    if not isinstance(raw, list):
        raise SchemaError(locus, f"expected a list of items, got {raw!r}")
    bag = Multiset()
    for i, entry in enumerate(raw):
        entry_locus = f"{locus}[{i}]"
        if not isinstance(entry, dict):
            raise SchemaError(entry_locus, f"expected an item object, got {entry!r}")
        if fixed_class is None:
            resource_class = _parse_class(entry.get("class"), f"{entry_locus}.class")
        else:
            resource_class = fixed_class
        kind = _expect_str(entry, "kind", f"{entry_locus}.kind")
        count = _expect_int(entry.get("count", 1), f"{entry_locus}.count", minimum=1)
        quality = entry.get("quality", [])
        if not isinstance(quality, list) or not all(isinstance(q, str) for q in quality):
            raise SchemaError(f"{entry_locus}.quality", "expected a list of strings")
        bag = bag.add(ResourceItem(resource_class, kind, frozenset(quality)), count)
    return bag


def _parse_effect(raw: Any, locus: str) -> EffectPrimitive:
    if not isinstance(raw, dict):
        raise SchemaError(locus, f"expected an effect object, got {raw!r}")
    kind = raw.get("effect")
    optional_class = (
        _parse_class(raw["class"], f"{locus}.class") if raw.get("class") is not None else None
    )
    if kind == "adjust_requirement":
        delta = raw.get("delta")
        if delta is not None and (not isinstance(delta, int) or isinstance(delta, bool)):
            raise SchemaError(f"{locus}.delta", f"expected an integer, got {delta!r}")
        return AdjustRequirement(
            resource_class=optional_class,
            delta=delta,
            band=_parse_band(raw.get("band"), f"{locus}.band"),
        )
    if kind == "destroy_resources":
        return DestroyResources(
            resource_class=optional_class,
            kind=raw.get("kind"),
            count=_expect_int(raw.get("count", 1), f"{locus}.count", minimum=1),
        )
    if kind == "hoard_resources":
        return HoardResources(resource_class=optional_class)
    if kind == "propose_exchange":
        mode = raw.get("mode", "acquire")
        if mode not in ("acquire", "dispose"):
            raise SchemaError(f"{locus}.mode", f"expected 'acquire' or 'dispose', got {mode!r}")
        rule_id = raw.get("rule_id")
        if rule_id is not None and not isinstance(rule_id, str):
            raise SchemaError(f"{locus}.rule_id", f"expected a string, got {rule_id!r}")
        return ProposeExchange(mode=mode, rule_id=rule_id)
    if kind == "invest":
        give = _parse_spec(raw.get("give"), f"{locus}.give")
        receive = _parse_spec(raw.get("receive"), f"{locus}.receive")
        if give is None or receive is None:
            raise SchemaError(locus, "invest needs both give and receive specs")
        counterparty = raw.get("counterparty")
        if counterparty is not None and not isinstance(counterparty, str):
            raise SchemaError(f"{locus}.counterparty", f"expected a string, got {counterparty!r}")
        return Invest(
            give=give,
            receive=receive,
            maturity=_expect_int(raw.get("maturity"), f"{locus}.maturity", minimum=1),
            counterparty=counterparty,
        )
    if kind == "give_away":
        recipient = raw.get("recipient")
        if recipient is not None and not isinstance(recipient, str):
            raise SchemaError(f"{locus}.recipient", f"expected a string, got {recipient!r}")
        item_kind = raw.get("kind")
        if item_kind is not None and not isinstance(item_kind, str):
            raise SchemaError(f"{locus}.kind", f"expected a string, got {item_kind!r}")
        return GiveAway(
            resource_class=optional_class,
            kind=item_kind,
            count=_expect_int(raw.get("count", 1), f"{locus}.count", minimum=1),
            recipient=recipient,
        )
    raise SchemaError(f"{locus}.effect", f"unknown effect {kind!r}")


def _parse_profile(raw: Any, locus: str) -> StrategyProfile | None:
    if raw is None:
        return None
    if not isinstance(raw, dict):
        raise SchemaError(locus, f"expected a strategy object, got {raw!r}")
    stance = None
    if raw.get("stance") is not None:
        stance = _parse_stance(raw["stance"], f"{locus}.stance")
    stance_by_state = {
        _parse_state(state, f"{locus}.stance_by_state"): _parse_stance(
            st, f"{locus}.stance_by_state.{state}"
        )
        for state, st in (raw.get("stance_by_state") or {}).items()
    }
    stance_weights = None
    if raw.get("stance_weights") is not None:
        weights = raw["stance_weights"]
        if not isinstance(weights, dict):
            raise SchemaError(f"{locus}.stance_weights", "expected an object")
        stance_weights = {}
        for name, weight in weights.items():
            if not isinstance(weight, (int, float)) or weight < 0:
                raise SchemaError(
                    f"{locus}.stance_weights.{name}", f"expected a non-negative number, got {weight!r}"
                )
            stance_weights[_parse_stance(name, f"{locus}.stance_weights.{name}")] = float(weight)
    respond_raw = raw.get("respond_to")
    if respond_raw is None:
        respond_to = frozenset({SasState.SCARCITY, SasState.ABUNDANCE})
    else:
        if not isinstance(respond_raw, list):
            raise SchemaError(f"{locus}.respond_to", "expected a list of states")
        respond_to = frozenset(
            _parse_state(s, f"{locus}.respond_to[{i}]") for i, s in enumerate(respond_raw)
        )
    salience_raw = raw.get("salience")
    if salience_raw is None:
        salience = StrategyProfile().salience_classes
    else:
        if not isinstance(salience_raw, list):
            raise SchemaError(f"{locus}.salience", "expected a list of classes")
        salience = tuple(
            _parse_class(c, f"{locus}.salience[{i}]") for i, c in enumerate(salience_raw)
        )
        if len(set(salience)) != len(ResourceClass):
            raise SchemaError(f"{locus}.salience", "must list each resource class exactly once")
    cell_effects = {}
    for i, cell in enumerate(raw.get("cells") or []):
        cell_locus = f"{locus}.cells[{i}]"
        if not isinstance(cell, dict):
            raise SchemaError(cell_locus, f"expected an object, got {cell!r}")
        key = (
            _parse_stance(cell.get("stance"), f"{cell_locus}.stance"),
            _parse_state(cell.get("state"), f"{cell_locus}.state"),
        )
        effects = tuple(
            _parse_effect(e, f"{cell_locus}.effects[{j}]")
            for j, e in enumerate(cell.get("effects") or [])
        )
        cell_effects[key] = effects
    return StrategyProfile(
        stance=stance,
        stance_by_state=stance_by_state,
        stance_weights=stance_weights,
        respond_to=respond_to,
        salience_classes=salience,
        cell_effects=cell_effects,
    )


def _parse_agent(raw: Any, locus: str) -> Agent:
    if not isinstance(raw, dict):
        raise SchemaError(locus, f"expected an agent object, got {raw!r}")
    agent_id = _expect_str(raw, "id", f"{locus}.id")
    if agent_id == RESERVOIR_ID:
        raise SchemaError(f"{locus}.id", f"{RESERVOIR_ID!r} is reserved for the reservoir")
    attributes = raw.get("attributes", {})
    if not isinstance(attributes, dict):
        raise SchemaError(f"{locus}.attributes", f"expected an object, got {attributes!r}")
    for key, value in attributes.items():
        if not isinstance(value, (str, int, float, bool)):
            raise SchemaError(f"{locus}.attributes.{key}", f"unsupported value {value!r}")
    resources = _parse_items(raw.get("resources", []), f"{locus}.resources")
    requirements: dict[ResourceClass, Requirement] = {}
    for i, entry in enumerate(raw.get("requirements", [])):
        entry_locus = f"{locus}.requirements[{i}]"
        if not isinstance(entry, dict):
            raise SchemaError(entry_locus, f"expected an object, got {entry!r}")
        resource_class = _parse_class(entry.get("class"), f"{entry_locus}.class")
        if resource_class in requirements:
            raise SchemaError(
                f"{entry_locus}.class", f"requirement for {resource_class.value} declared twice"
            )
        items = _parse_items(entry.get("items", []), f"{entry_locus}.items", fixed_class=resource_class)
        band = _parse_band(entry.get("band"), f"{entry_locus}.band")
        requirements[resource_class] = Requirement(items=items, band=band)
    strategy = _parse_profile(raw.get("strategy"), f"{locus}.strategy")
    return Agent(
        id=agent_id,
        attributes=attributes,
        resources=resources,
        requirements=requirements,
        strategy=strategy,
    )


def _parse_spec(raw: Any, locus: str) -> TransferSpec | None:
    if raw is None:
        return None
    if not isinstance(raw, dict):
        raise SchemaError(locus, f"expected a transfer spec, got {raw!r}")
    return TransferSpec(
        resource_class=_parse_class(raw.get("class"), f"{locus}.class"),
        kind=_expect_str(raw, "kind", f"{locus}.kind"),
        count=_expect_int(raw.get("count", 1), f"{locus}.count", minimum=1),
    )


def _parse_match(raw: Any, locus: str) -> PartyMatch:
    if raw is None:
        return PartyMatch()
    if not isinstance(raw, dict):
        raise SchemaError(locus, f"expected a party match object, got {raw!r}")
    ids = None
    if raw.get("ids") is not None:
        raw_ids = raw["ids"]
        if not isinstance(raw_ids, list) or not all(isinstance(i, str) for i in raw_ids):
            raise SchemaError(f"{locus}.ids", "expected a list of strings")
        ids = frozenset(raw_ids)
    attrs_equal = raw.get("attrs_equal")
    if attrs_equal is not None and not isinstance(attrs_equal, dict):
        raise SchemaError(f"{locus}.attrs_equal", "expected an object")
    attrs_min = raw.get("attrs_min")
    if attrs_min is not None:
        if not isinstance(attrs_min, dict) or not all(
            isinstance(v, (int, float)) for v in attrs_min.values()
        ):
            raise SchemaError(f"{locus}.attrs_min", "expected an object of numbers")
    return PartyMatch(ids=ids, attrs_equal=attrs_equal, attrs_min=attrs_min)


def _parse_rule(raw: Any, locus: str) -> EntitlementRule:
    if not isinstance(raw, dict):
        raise SchemaError(locus, f"expected a rule object, got {raw!r}")
    rule_id = _expect_str(raw, "id", f"{locus}.id")
    try:
        etype = EntitlementType(raw.get("type"))
    except ValueError:
        raise SchemaError(f"{locus}.type", f"unknown entitlement type {raw.get('type')!r}") from None
    capacity = raw.get("capacity")
    if capacity is not None:
        capacity = _expect_int(capacity, f"{locus}.capacity", minimum=1)
    try:
        return EntitlementRule(
            id=rule_id,
            etype=etype,
            giver_match=_parse_match(raw.get("giver"), f"{locus}.giver"),
            receiver_match=_parse_match(raw.get("receiver"), f"{locus}.receiver"),
            give=_parse_spec(raw.get("give"), f"{locus}.give"),
            receive=_parse_spec(raw.get("receive"), f"{locus}.receive"),
            legitimate=bool(raw.get("legitimate", True)),
            capacity=capacity,
            enabled=bool(raw.get("enabled", True)),
        )
    except ValueError as error:
        raise SchemaError(locus, str(error)) from None


# --- cross-reference validation ------------------------------------------------


def _validate_references(scenario: Scenario) -> None:
    seen_agents: set[str] = set()
    for i, agent in enumerate(scenario.agents):
        if agent.id in seen_agents:
            raise DuplicateId(f"agents[{i}].id", f"agent id {agent.id!r} declared twice")
        seen_agents.add(agent.id)
    known = set(seen_agents)
    if scenario.reservoir is not None:
        known.add(RESERVOIR_ID)

    seen_rules: set[str] = set()
    for i, rule in enumerate(scenario.rules):
        if rule.id in seen_rules:
            raise DuplicateId(f"rules[{i}].id", f"rule id {rule.id!r} declared twice")
        seen_rules.add(rule.id)
        for side, match in (("giver", rule.giver_match), ("receiver", rule.receiver_match)):
            for party in sorted(match.ids or ()):
                if party not in known:
                    raise DanglingReference(
                        f"rules[{i}].{side}.ids", f"unknown party {party!r}"
                    )

    for i, agent in enumerate(scenario.agents):
        if agent.strategy is None:
            continue
        for (stance, state), effects in agent.strategy.cell_effects.items():
            for j, effect in enumerate(effects):
                locus = f"agents[{i}].strategy.cells[{stance.value}:{state.value}].effects[{j}]"
                if isinstance(effect, ProposeExchange) and effect.rule_id is not None:
                    if effect.rule_id not in seen_rules:
                        raise DanglingReference(locus, f"unknown rule {effect.rule_id!r}")
                if isinstance(effect, Invest) and effect.counterparty is not None:
                    if effect.counterparty not in known:
                        raise DanglingReference(locus, f"unknown counterparty {effect.counterparty!r}")
                if isinstance(effect, GiveAway) and effect.recipient is not None:
                    if effect.recipient not in seen_agents:
                        raise DanglingReference(locus, f"unknown recipient {effect.recipient!r}")
