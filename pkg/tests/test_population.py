import random

import pytest

from sasim.classify import CrossState, SasState
from sasim.fixtures import famine
from sasim.multiset import Multiset
from sasim.population import (
    Agent,
    Population,
    Requirement,
    aggregate,
    make_reservoir,
    snapshot_states,
)
from sasim.resources import ResourceClass, ResourceItem

GOODS = ResourceClass.GOODS


def food(count):
    return Multiset({ResourceItem(GOODS, "food"): count})


class TestPopulationInvariants:
    def test_needs_an_agent(self):
        with pytest.raises(ValueError):
            Population(agents=())

    def test_duplicate_agent_ids_rejected(self):
        with pytest.raises(ValueError):
            Population(agents=(Agent(id="a"), Agent(id="a")))

    def test_reserved_id_rejected(self):
        with pytest.raises(ValueError):
            Population(agents=(Agent(id="reservoir"),))

    def test_reservoir_must_use_reserved_id(self):
        with pytest.raises(ValueError):
            Population(agents=(Agent(id="a"),), reservoir=Agent(id="pool"))

    def test_reservoir_holds_no_requirements(self):
        hungry_pool = Agent(
            id="reservoir", requirements={GOODS: Requirement(items=food(1))}
        )
        with pytest.raises(ValueError):
            Population(agents=(Agent(id="a"),), reservoir=hungry_pool)


class TestAggregate:
    def test_two_agents_sum(self):
        pop = Population(
            agents=(Agent(id="a", resources=food(1)), Agent(id="b", resources=food(2)))
        )
        view = aggregate(pop)
        assert view.aggregate_resources[GOODS] == food(3)

    def test_single_agent_equals_own_sets(self):
        agent = Agent(
            id="solo", resources=food(2), requirements={GOODS: Requirement(items=food(1))}
        )
        view = aggregate(Population(agents=(agent,)))
        assert view.aggregate_resources[GOODS] == food(2)
        assert view.aggregate_requirements[GOODS] == food(1)

    def test_reservoir_counts_toward_resources_only(self):
        pop = Population(
            agents=(Agent(id="a", requirements={GOODS: Requirement(items=food(1))}),),
            reservoir=make_reservoir(food(5)),
        )
        view = aggregate(pop)
        assert view.aggregate_resources[GOODS] == food(5)
        assert view.aggregate_requirements[GOODS] == food(1)

    def test_famine_fixture_totals(self):
        pop = famine().build_population()
        view = aggregate(pop)
        assert view.aggregate_requirements[GOODS].cardinality == 10
        assert view.aggregate_resources[GOODS].cardinality == 16

    def test_removing_an_agent_subtracts_its_bags(self):
        rng = random.Random(3)
        kinds = ["food", "silk", "tool"]
        for _ in range(200):
            agents = [
                Agent(
                    id=f"a{i}",
                    resources=Multiset(
                        {ResourceItem(GOODS, k): rng.randint(0, 3) for k in kinds}
                    ),
                )
                for i in range(rng.randint(2, 5))
            ]
            full = aggregate(Population(agents=tuple(agents)))
            removed = agents[0]
            rest = aggregate(Population(agents=tuple(agents[1:])))
            for kind in kinds:
                item = ResourceItem(GOODS, kind)
                assert full.aggregate_resources[GOODS].count(item) == rest.aggregate_resources[
                    GOODS
                ].count(item) + removed.resources.count(item)


class TestSnapshotStates:
    def test_famine_starving_agent_is_quasi_scarce(self):
        snapshot = snapshot_states(famine().build_population())
        destitute = snapshot.agents["destitute"][GOODS]
        assert destitute.sas is SasState.SCARCITY
        assert destitute.cross is CrossState.QUASI_SCARCITY

    def test_famine_fed_agent_is_quasi_sufficient(self):
        snapshot = snapshot_states(famine().build_population())
        fed = snapshot.agents["villager_1"][GOODS]
        assert fed.sas is SasState.SUFFICIENCY
        assert fed.cross is CrossState.QUASI_SUFFICIENCY

    def test_single_agent_population_is_always_absolute(self):
        agent = Agent(
            id="solo", resources=food(2), requirements={GOODS: Requirement(items=food(1))}
        )
        snapshot = snapshot_states(Population(agents=(agent,)))
        for state in snapshot.agents["solo"].values():
            assert state.cross in (
                CrossState.ABSOLUTE_SCARCITY,
                CrossState.ABSOLUTE_ABUNDANCE,
                CrossState.ABSOLUTE_SUFFICIENCY,
                CrossState.UNDEFINED,
            )

    def test_undeclared_class_stays_undefined_at_both_levels(self):
        snapshot = snapshot_states(Population(agents=(Agent(id="a", resources=food(1)),)))
        assert snapshot.system[GOODS] is SasState.UNDEFINED
        assert snapshot.agents["a"][GOODS].sas is SasState.UNDEFINED
        assert snapshot.agents["a"][GOODS].cross is CrossState.UNDEFINED

    def test_single_agent_with_band_still_mirrors_the_system(self):
        # The system comparison point is the sum of declared optimal ranges,
        # so a one-agent system can never diverge from its agent.
        from sasim.classify import SufficiencyBand

        agent = Agent(
            id="solo",
            resources=food(3),
            requirements={
                GOODS: Requirement(items=food(2), band=SufficiencyBand(1, 4))
            },
        )
        snapshot = snapshot_states(Population(agents=(agent,)))
        assert snapshot.system[GOODS] is SasState.SUFFICIENCY
        assert snapshot.agents["solo"][GOODS].cross is CrossState.ABSOLUTE_SUFFICIENCY

    def test_band_free_population_reduces_to_exact_equality(self):
        agents = (
            Agent(id="a", resources=food(2), requirements={GOODS: Requirement(items=food(1))}),
            Agent(id="b", requirements={GOODS: Requirement(items=food(1))}),
        )
        snapshot = snapshot_states(Population(agents=agents))
        assert snapshot.system[GOODS] is SasState.SUFFICIENCY  # R_s 2 == A_s 2

    def test_scenario_system_band_overrides_the_aggregate(self):
        from sasim.classify import SufficiencyBand

        agents = (
            Agent(id="a", resources=food(2), requirements={GOODS: Requirement(items=food(1))}),
        )
        snapshot = snapshot_states(
            Population(agents=agents), system_bands={GOODS: SufficiencyBand(0, None)}
        )
        assert snapshot.system[GOODS] is SasState.SUFFICIENCY
