import json

from dialaug.corpus import corpus_from_json
from dialaug.mining import MiningConfig, index_by_function, mine_pairs, orphan_turns
from dialaug.synth import ENTITIES, synth_corpus, synth_database


class TestShape:
    def test_requested_size(self, synth30):
        assert len(synth30.dialogs) == 30
        assert all(len(d.turns) == 2 for d in synth30.dialogs)

    def test_validates_as_canonical_corpus(self, synth30):
        # round-tripping through JSON re-runs full schema validation
        clone = corpus_from_json(json.loads(json.dumps(synth30.to_json())))
        assert clone.to_json() == synth30.to_json()

    def test_database_covers_every_entity(self):
        db = synth_database()
        names = {r["name"] for r in db}
        assert names == {n for group in ENTITIES.values() for n in group}
        assert all(set(r) == {"domain", "name", "food", "area"} for r in db)

    def test_delexicalization_present(self, synth30):
        turn1, turn2 = synth30.dialogs[0].turns
        assert "[food]" in turn1.user_delex.tokens
        assert "[area]" in turn1.user_delex.tokens
        assert "[name]" in turn1.response_delex.tokens
        assert "[name]" in turn2.response_delex.tokens


class TestGoals:
    def test_every_goal_satisfiable(self, synth30):
        db = synth_database()
        for dialog in synth30.dialogs:
            constraints = dialog.goal.constraints
            assert constraints, dialog.dialog_id
            matches = [
                r for r in db
                if all(r.get(slot) == value for (_, slot), value in constraints.items())
            ]
            assert matches, dialog.dialog_id

    def test_goal_requests_name(self, synth30):
        for dialog in synth30.dialogs:
            assert ("restaurant", "name") in dialog.goal.requested

    def test_final_state_matches_goal(self, synth30):
        for dialog in synth30.dialogs:
            final = dialog.turns[-1].state.informed
            assert final == dialog.goal.constraints


class TestDeterminism:
    def test_same_seed_identical(self, synth30):
        again = synth_corpus(30, seed=0)
        assert again.to_json() == synth30.to_json()

    def test_different_seed_differs(self, synth30):
        other = synth_corpus(30, seed=1)
        assert other.to_json() != synth30.to_json()


class TestMinability:
    """The corpus exists to exercise the miner: buckets must have real variety."""

    def test_mining_yields_pairs_without_orphans(self, synth30):
        cfg = MiningConfig()
        pairs = mine_pairs(synth30, cfg)
        assert pairs
        assert not any(p.relaxed for p in pairs)
        assert orphan_turns(synth30, pairs, cfg.include_requested_slots) == []

    def test_both_turn_roles_covered(self, synth30):
        pairs = mine_pairs(synth30, MiningConfig())
        covered_turns = {p.src for p in pairs}
        assert any(t == 1 for _, t in covered_turns)
        assert any(t == 2 for _, t in covered_turns)

    def test_buckets_group_by_dialog_function(self, synth30):
        index = index_by_function(synth30, include_requested=True)
        assert len(index) >= 2
        assert all(len(refs) >= 2 for refs in index.values())


class TestDbBuckets:
    def test_two_entity_combinations_fill_bucket_two(self, synth30):
        from dialaug.augment import build_instances

        instances = build_instances(synth30, pairs=None, paraphrase_source="none", epoch_seed=0)
        buckets = {inst.db_bucket for inst in instances}
        assert buckets == {1, 2}
