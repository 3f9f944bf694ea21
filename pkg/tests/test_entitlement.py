import random

import pytest

from sasim.entitlement import (
    GIVER_TO_RECEIVER,
    RECEIVER_TO_GIVER,
    EntitlementRule,
    EntitlementType,
    FailureReason,
    OutcomeStatus,
    PartyMatch,
    TransferSpec,
    apply,
    evaluate,
    evaluate_with_system,
)
from sasim.errors import NonMatchingParties, NoReservoir, SelfExchange, StaleOutcome
from sasim.multiset import Multiset
from sasim.population import Agent, Population, Requirement, make_reservoir
from sasim.resources import ResourceClass, ResourceItem

GOODS = ResourceClass.GOODS
MONEY = ResourceClass.MONEY
STATUS = ResourceClass.STATUS


def bag(*entries):
    counts = {}
    for resource_class, kind, count in entries:
        counts[ResourceItem(resource_class, kind)] = count
    return Multiset(counts)


def richard_pair():
    richard = Agent(
        id="richard",
        resources=bag((STATUS, "kingship", 1)),
        requirements={
            GOODS: Requirement(items=bag((GOODS, "horse", 1))),
            STATUS: Requirement(),
        },
    )
    horseman = Agent(id="horseman", resources=bag((GOODS, "horse", 1)))
    rule = EntitlementRule(
        id="kingdom_for_horse",
        etype=EntitlementType.TRADE,
        give=TransferSpec(STATUS, "kingship", 1),
        receive=TransferSpec(GOODS, "horse", 1),
    )
    return rule, horseman, richard


class TestRuleShapes:
    def test_trade_needs_both_specs(self):
        with pytest.raises(ValueError):
            EntitlementRule(id="t", etype=EntitlementType.TRADE, give=TransferSpec(GOODS, "x", 1))

    def test_gift_has_no_give(self):
        with pytest.raises(ValueError):
            EntitlementRule(
                id="g",
                etype=EntitlementType.GIFT,
                give=TransferSpec(GOODS, "x", 1),
                receive=TransferSpec(GOODS, "x", 1),
            )

    def test_extraction_has_no_receive(self):
        with pytest.raises(ValueError):
            EntitlementRule(
                id="e",
                etype=EntitlementType.EXTRACTION,
                give=TransferSpec(GOODS, "x", 1),
                receive=TransferSpec(GOODS, "x", 1),
            )

    def test_counts_positive(self):
        with pytest.raises(ValueError):
            TransferSpec(GOODS, "x", 0)


class TestEvaluate:
    def test_kingdom_for_horse_succeeds_with_both_transfers(self):
        rule, horseman, richard = richard_pair()
        outcome = evaluate(rule, giver=horseman, receiver=richard)
        assert outcome.status is OutcomeStatus.SUCCESS
        directions = sorted(t.direction for t in outcome.transfers)
        assert directions == [GIVER_TO_RECEIVER, RECEIVER_TO_GIVER]
        moved = {(t.item.kind, t.from_id, t.to_id) for t in outcome.transfers}
        assert ("horse", "horseman", "richard") in moved
        assert ("kingship", "richard", "horseman") in moved

    def test_investment_trade_reaches_sufficiency(self):
        investor = Agent(
            id="investor",
            resources=bag((GOODS, "porcelain", 1), (GOODS, "copper", 1), (GOODS, "silk", 1)),
            requirements={
                GOODS: Requirement(items=bag((GOODS, "porcelain", 1), (GOODS, "copper", 1)))
            },
        )
        merchant = Agent(
            id="merchant", resources=bag((ResourceClass.SERVICE, "promise", 1))
        )
        rule = EntitlementRule(
            id="invest",
            etype=EntitlementType.TRADE,
            give=TransferSpec(GOODS, "silk", 1),
            receive=TransferSpec(ResourceClass.SERVICE, "promise", 1),
        )
        outcome = evaluate(rule, giver=merchant, receiver=investor)
        assert outcome.succeeded
        pop = apply(outcome, Population(agents=(investor, merchant)))
        assert pop.agent("investor").resources_in(GOODS) == bag(
            (GOODS, "porcelain", 1), (GOODS, "copper", 1)
        )

    def test_cash_gated_trade_fails_without_cash(self):
        starving = Agent(
            id="starving", requirements={GOODS: Requirement(items=bag((GOODS, "food", 1)))}
        )
        vendor = Agent(id="vendor", resources=bag((GOODS, "food", 5)))
        rule = EntitlementRule(
            id="buy_food",
            etype=EntitlementType.TRADE,
            give=TransferSpec(MONEY, "cash", 1),
            receive=TransferSpec(GOODS, "food", 1),
        )
        outcome = evaluate(rule, giver=vendor, receiver=starving)
        assert outcome.status is OutcomeStatus.FAILURE
        assert outcome.failure_reason is FailureReason.INSUFFICIENT_HOLDINGS
        assert outcome.transfers == ()

    def test_design_flaw_when_rule_works_but_falls_short(self):
        hungry = Agent(
            id="hungry", requirements={GOODS: Requirement(items=bag((GOODS, "food", 3)))}
        )
        pool = Agent(id="pool", resources=bag((GOODS, "food", 5)))
        coupon = EntitlementRule(
            id="coupon", etype=EntitlementType.GIFT, receive=TransferSpec(GOODS, "food", 1)
        )
        outcome = evaluate(coupon, giver=pool, receiver=hungry)
        assert outcome.status is OutcomeStatus.FAILURE
        assert outcome.failure_reason is FailureReason.DESIGN_FLAW
        assert len(outcome.transfers) == 1

    def test_self_exchange_rejected(self):
        rule, _, richard = richard_pair()
        with pytest.raises(SelfExchange):
            evaluate(rule, giver=richard, receiver=richard)

    def test_party_predicates_enforced(self):
        rule, horseman, richard = richard_pair()
        gated = EntitlementRule(
            id="gated",
            etype=EntitlementType.TRADE,
            giver_match=PartyMatch(ids=frozenset({"somebody_else"})),
            give=rule.give,
            receive=rule.receive,
        )
        with pytest.raises(NonMatchingParties):
            evaluate(gated, giver=horseman, receiver=richard)

    def test_attribute_gate(self):
        rule = EntitlementRule(
            id="wealth_gate",
            etype=EntitlementType.GIFT,
            receiver_match=PartyMatch(attrs_min={"wealth": 1}),
            receive=TransferSpec(GOODS, "food", 1),
        )
        poor = Agent(id="poor", attributes={"wealth": 0})
        pool = Agent(id="pool", resources=bag((GOODS, "food", 2)))
        with pytest.raises(NonMatchingParties):
            evaluate(rule, giver=pool, receiver=poor)

    def test_evaluate_is_pure(self):
        rule, horseman, richard = richard_pair()
        assert evaluate(rule, giver=horseman, receiver=richard) == evaluate(
            rule, giver=horseman, receiver=richard
        )
        assert richard.resources == bag((STATUS, "kingship", 1))

    def test_illegitimate_use_is_flagged(self):
        rule, horseman, richard = richard_pair()
        shady = EntitlementRule(
            id="coup",
            etype=EntitlementType.TRADE,
            give=rule.give,
            receive=rule.receive,
            legitimate=False,
        )
        outcome = evaluate(shady, giver=horseman, receiver=richard)
        assert outcome.succeeded and outcome.illegitimate

    def test_illegitimate_failure_reads_as_rule_violation(self):
        violent = EntitlementRule(
            id="raid",
            etype=EntitlementType.TRADE,
            give=TransferSpec(MONEY, "cash", 1),
            receive=TransferSpec(GOODS, "food", 1),
            legitimate=False,
        )
        poor = Agent(id="poor")
        vendor = Agent(id="vendor", resources=bag((GOODS, "food", 1)))
        outcome = evaluate(violent, giver=vendor, receiver=poor)
        assert outcome.failure_reason is FailureReason.RULE_VIOLATION

    def test_partial_ratio_is_exact_at_awkward_fractions(self):
        # 5 of 7 coins held: exactly 5 coins and 5 rations move, no float
        # drift flooring the binding side short.
        buyer = Agent(id="buyer", resources=bag((MONEY, "cash", 5)))
        vendor = Agent(id="vendor", resources=bag((GOODS, "food", 9)))
        rule = EntitlementRule(
            id="bulk",
            etype=EntitlementType.TRADE,
            give=TransferSpec(MONEY, "cash", 7),
            receive=TransferSpec(GOODS, "food", 7),
        )
        outcome = evaluate(rule, giver=vendor, receiver=buyer, partial=True)
        moved = {(t.item.kind, t.count) for t in outcome.transfers}
        assert moved == {("cash", 5), ("food", 5)}

    def test_partial_lists_proportional_transfers(self):
        buyer = Agent(
            id="buyer",
            resources=bag((MONEY, "cash", 1)),
            requirements={GOODS: Requirement(items=bag((GOODS, "food", 2)))},
        )
        vendor = Agent(id="vendor", resources=bag((GOODS, "food", 5)))
        rule = EntitlementRule(
            id="bulk",
            etype=EntitlementType.TRADE,
            give=TransferSpec(MONEY, "cash", 2),
            receive=TransferSpec(GOODS, "food", 2),
        )
        strict = evaluate(rule, giver=vendor, receiver=buyer)
        assert strict.transfers == ()
        lenient = evaluate(rule, giver=vendor, receiver=buyer, partial=True)
        moved = {(t.item.kind, t.count) for t in lenient.transfers}
        assert moved == {("cash", 1), ("food", 1)}
        assert lenient.status is OutcomeStatus.FAILURE

    def test_ownership_asserts_without_transfer(self):
        owner = Agent(id="owner", resources=bag((GOODS, "land", 1)))
        deed = EntitlementRule(
            id="deed",
            etype=EntitlementType.OWNERSHIP,
            receiver_match=PartyMatch(ids=frozenset({"owner"})),
        )
        outcome = evaluate(deed, giver=owner, receiver=owner)
        assert outcome.succeeded
        assert outcome.transfers == ()


class TestApply:
    def test_richard_trade_moves_holdings(self):
        rule, horseman, richard = richard_pair()
        pop = Population(agents=(richard, horseman), rules=(rule,))
        outcome = evaluate(rule, giver=horseman, receiver=richard)
        updated = apply(outcome, pop)
        assert updated.agent("richard").resources == bag((GOODS, "horse", 1))
        assert updated.agent("horseman").resources == bag((STATUS, "kingship", 1))

    def test_zero_transfer_outcome_is_identity(self):
        owner = Agent(id="owner", resources=bag((GOODS, "land", 1)))
        deed = EntitlementRule(id="deed", etype=EntitlementType.OWNERSHIP)
        outcome = evaluate(deed, giver=owner, receiver=owner)
        pop = Population(agents=(owner,))
        assert apply(outcome, pop).agent("owner").resources == owner.resources

    def test_failure_not_committed_without_flag(self):
        starving = Agent(id="starving")
        vendor = Agent(id="vendor", resources=bag((GOODS, "food", 1)))
        rule = EntitlementRule(
            id="buy",
            etype=EntitlementType.TRADE,
            give=TransferSpec(MONEY, "cash", 1),
            receive=TransferSpec(GOODS, "food", 1),
        )
        outcome = evaluate(rule, giver=vendor, receiver=starving)
        with pytest.raises(StaleOutcome):
            apply(outcome, Population(agents=(starving, vendor)))

    def test_stale_outcome_detected(self):
        rule, horseman, richard = richard_pair()
        outcome = evaluate(rule, giver=horseman, receiver=richard)
        emptied = horseman.with_resources(Multiset())
        pop = Population(agents=(richard, emptied))
        with pytest.raises(StaleOutcome):
            apply(outcome, pop)


class TestSystemExchange:
    def test_welfare_coupon_from_reservoir(self):
        agent = Agent(
            id="poor", requirements={GOODS: Requirement(items=bag((GOODS, "food", 1)))}
        )
        pop = Population(agents=(agent,), reservoir=make_reservoir(bag((GOODS, "food", 6))))
        coupon = EntitlementRule(
            id="coupon", etype=EntitlementType.GIFT, receive=TransferSpec(GOODS, "food", 1)
        )
        outcome = evaluate_with_system(coupon, agent, pop)
        assert outcome.succeeded
        updated = apply(outcome, pop)
        assert updated.agent("poor").resources == bag((GOODS, "food", 1))
        assert updated.reservoir.resources == bag((GOODS, "food", 5))

    def test_empty_reservoir_gift_fails(self):
        agent = Agent(id="poor")
        pop = Population(agents=(agent,), reservoir=make_reservoir(Multiset()))
        coupon = EntitlementRule(
            id="coupon", etype=EntitlementType.GIFT, receive=TransferSpec(GOODS, "food", 1)
        )
        outcome = evaluate_with_system(coupon, agent, pop)
        assert outcome.status is OutcomeStatus.FAILURE
        assert outcome.failure_reason is FailureReason.INSUFFICIENT_HOLDINGS

    def test_extraction_reverses_direction(self):
        farmer = Agent(id="farmer", resources=bag((GOODS, "food", 3)))
        pop = Population(agents=(farmer,), reservoir=make_reservoir(Multiset()))
        tithe = EntitlementRule(
            id="tithe", etype=EntitlementType.EXTRACTION, give=TransferSpec(GOODS, "food", 1)
        )
        outcome = evaluate_with_system(tithe, farmer, pop)
        assert outcome.succeeded
        (transfer,) = outcome.transfers
        assert transfer.direction == RECEIVER_TO_GIVER
        assert (transfer.from_id, transfer.to_id) == ("farmer", "reservoir")
        updated = apply(outcome, pop)
        assert updated.reservoir.resources == bag((GOODS, "food", 1))
        assert updated.agent("farmer").resources == bag((GOODS, "food", 2))

    def test_no_reservoir(self):
        agent = Agent(id="poor")
        pop = Population(agents=(agent,))
        coupon = EntitlementRule(
            id="coupon", etype=EntitlementType.GIFT, receive=TransferSpec(GOODS, "food", 1)
        )
        with pytest.raises(NoReservoir):
            evaluate_with_system(coupon, agent, pop)


def test_success_implies_requested_class_is_covered():
    # After a committed success, the receiver's requested class classifies as
    # sufficiency or abundance; a zero-transfer failure leaves it unchanged.
    from sasim.classify import SasState, classify_agent

    rng = random.Random(41)
    kinds = [(GOODS, "food"), (GOODS, "silk"), (MONEY, "cash")]
    for _ in range(500):
        receiver = Agent(
            id="receiver",
            resources=Multiset(
                {ResourceItem(c, k): rng.randint(0, 2) for c, k in kinds if rng.random() < 0.7}
            ),
            requirements={
                GOODS: Requirement(
                    items=Multiset({ResourceItem(GOODS, "food"): rng.randint(0, 3)})
                )
            },
        )
        giver = Agent(
            id="giver",
            resources=Multiset({ResourceItem(GOODS, "food"): rng.randint(0, 3)}),
        )
        rule = EntitlementRule(
            id="r",
            etype=EntitlementType.GIFT,
            receive=TransferSpec(GOODS, "food", rng.randint(1, 2)),
        )
        before = classify_agent(receiver)[GOODS]
        outcome = evaluate(rule, giver=giver, receiver=receiver)
        if outcome.succeeded:
            pop = apply(outcome, Population(agents=(receiver, giver)))
            after = classify_agent(pop.agent("receiver"))[GOODS]
            assert after in (SasState.SUFFICIENCY, SasState.ABUNDANCE)
        elif not outcome.transfers:
            assert classify_agent(receiver)[GOODS] is before


def _system_totals(pop):
    totals = {}
    for holder in pop.holders():
        for item, count in holder.resources.items():
            key = (item.resource_class, item.kind)
            totals[key] = totals.get(key, 0) + count
    return totals


def test_random_conserving_sequences_preserve_totals():
    rng = random.Random(99)
    kinds = ["food", "silk", "cash"]
    classes = [GOODS, GOODS, MONEY]
    for _ in range(500):
        agents = tuple(
            Agent(
                id=f"a{i}",
                resources=Multiset(
                    {
                        ResourceItem(c, k): rng.randint(0, 3)
                        for c, k in zip(classes, kinds)
                    }
                ),
            )
            for i in range(rng.randint(2, 4))
        )
        pop = Population(agents=agents, reservoir=make_reservoir(bag((GOODS, "food", 2))))
        before = _system_totals(pop)
        for _ in range(rng.randint(1, 4)):
            etype = rng.choice(
                [EntitlementType.TRADE, EntitlementType.GIFT, EntitlementType.EXTRACTION]
            )
            i_class, i_kind = rng.choice(list(zip(classes, kinds)))
            spec = TransferSpec(i_class, i_kind, rng.randint(1, 2))
            other_class, other_kind = rng.choice(list(zip(classes, kinds)))
            other = TransferSpec(other_class, other_kind, rng.randint(1, 2))
            if etype is EntitlementType.TRADE:
                rule = EntitlementRule(id="r", etype=etype, give=spec, receive=other)
            elif etype is EntitlementType.GIFT:
                rule = EntitlementRule(id="r", etype=etype, receive=spec)
            else:
                rule = EntitlementRule(id="r", etype=etype, give=spec)
            holders = list(pop.holders())
            giver, receiver = rng.sample(holders, 2)
            outcome = evaluate(rule, giver=giver, receiver=receiver, partial=rng.random() < 0.5)
            if outcome.succeeded or outcome.transfers:
                pop = apply(outcome, pop, allow_failure=not outcome.succeeded)
        assert _system_totals(pop) == before
