import json

import pytest

from signlookup.errors import (
    NotFound,
    SelectionError,
    SessionConflict,
    SessionExpired,
)
from signlookup.matcher import Candidate, CandidateList, QueryMode, VariantScore
from signlookup.sessions import (
    ConfirmationStats,
    SessionState,
    SessionStore,
    StatsLog,
)


def candidates_fixture() -> CandidateList:
    def cand(entry, gloss, score, variants):
        return Candidate(entry, gloss, score, tuple(VariantScore(*v) for v in variants))

    return CandidateList(
        (
            cand("e-dance", "DANCE", 0.1, [("v-dance", "DANCE", 0.1)]),
            cand(
                "e-honor",
                "HONOR",
                0.2,
                [("v-honor", "HONOR", 0.2), ("v-honor2", "HONOR-2", 0.3)],
            ),
            cand("e-stir", "STIR", 0.4, [("v-stir", "STIR", 0.4)]),
        ),
        QueryMode.CITATION,
    )


class FakeClock:
    def __init__(self):
        self.now = 1000.0

    def __call__(self):
        return self.now


class TestSessionStore:
    def test_create_pending_with_unguessable_token(self):
        store = SessionStore()
        s1 = store.create(candidates_fixture(), QueryMode.CITATION)
        s2 = store.create(candidates_fixture(), QueryMode.CITATION)
        assert s1.state is SessionState.PENDING
        assert s1.token != s2.token
        assert len(s1.token) >= 22  # 128 bits of urlsafe base64

    def test_confirm_rank_records_stats(self):
        store = SessionStore()
        session = store.create(candidates_fixture(), QueryMode.CITATION)
        outcome = store.confirm(session.token, 1, "v-dance")
        assert outcome.entry_id == "e-dance"
        assert session.state is SessionState.CONFIRMED
        assert session.confirmed_rank == 1
        assert session.confirmed_variant == "v-dance"
        assert store.stats.counts["citation"]["1"] == 1

    def test_confirm_none_records_stats(self):
        store = SessionStore()
        session = store.create(candidates_fixture(), QueryMode.SEGMENTED)
        store.reject_none(session.token)
        assert session.state is SessionState.REJECTED_NONE
        assert store.stats.counts["segmented"]["none"] == 1

    def test_second_confirm_conflicts(self):
        store = SessionStore()
        session = store.create(candidates_fixture(), QueryMode.CITATION)
        store.confirm(session.token, 1, "v-dance")
        with pytest.raises(SessionConflict):
            store.confirm(session.token, 1, "v-dance")
        with pytest.raises(SessionConflict):
            store.reject_none(session.token)
        assert store.stats.total() == 1  # exactly one increment

    def test_variant_must_belong_to_selected_rank(self):
        store = SessionStore()
        session = store.create(candidates_fixture(), QueryMode.CITATION)
        with pytest.raises(SelectionError):
            store.confirm(session.token, 1, "v-honor")
        with pytest.raises(SelectionError):
            store.confirm(session.token, 9, "v-dance")
        assert session.state is SessionState.PENDING
        assert store.stats.total() == 0

    def test_multi_variant_rank_accepts_either_variant(self):
        store = SessionStore()
        session = store.create(candidates_fixture(), QueryMode.CITATION)
        outcome = store.confirm(session.token, 2, "v-honor2")
        assert outcome.entry_id == "e-honor"
        assert store.stats.counts["citation"]["2"] == 1

    def test_unknown_token(self):
        store = SessionStore()
        with pytest.raises(NotFound):
            store.confirm("nope", 1, "v")
        with pytest.raises(NotFound):
            store.get("nope")

    def test_expiry_blocks_confirmation_and_stats(self):
        clock = FakeClock()
        store = SessionStore(ttl_s=60.0, clock=clock)
        session = store.create(candidates_fixture(), QueryMode.CITATION)
        clock.now += 61.0
        with pytest.raises(SessionExpired):
            store.confirm(session.token, 1, "v-dance")
        assert session.state is SessionState.EXPIRED
        assert store.stats.total() == 0
        # terminal: a later confirm is still rejected, never counted
        with pytest.raises(SessionExpired):
            store.reject_none(session.token)
        assert store.stats.total() == 0

    def test_pending_within_ttl_not_expired(self):
        clock = FakeClock()
        store = SessionStore(ttl_s=60.0, clock=clock)
        session = store.create(candidates_fixture(), QueryMode.CITATION)
        clock.now += 59.0
        store.confirm(session.token, 1, "v-dance")
        assert session.state is SessionState.CONFIRMED


class TestStats:
    def test_snapshot_counts_and_totals(self):
        stats = ConfirmationStats()
        stats.record(QueryMode.CITATION, "1")
        stats.record(QueryMode.CITATION, "1")
        stats.record(QueryMode.CITATION, "3")
        stats.record(QueryMode.SEGMENTED, "none")
        snap = stats.snapshot()
        assert snap["citation"]["1"] == 2
        assert snap["citation"]["3"] == 1
        assert snap["citation"]["total"] == 3
        assert snap["segmented"]["none"] == 1
        assert snap["total"] == 4

    def test_unknown_outcome_rejected(self):
        stats = ConfirmationStats()
        with pytest.raises(ValueError):
            stats.record(QueryMode.CITATION, "6")

    def test_log_replay_round_trip(self, tmp_path):
        log_path = tmp_path / "confirmations.jsonl"
        log = StatsLog(log_path)
        store = SessionStore(stats_log=log)
        for rank_choice in (1, 1, 3):
            session = store.create(candidates_fixture(), QueryMode.CITATION)
            variant = session.candidates.candidates[rank_choice - 1].variants[0].variant_id
            store.confirm(session.token, rank_choice, variant)
        session = store.create(candidates_fixture(), QueryMode.SEGMENTED)
        store.reject_none(session.token)

        replayed = StatsLog(log_path).replay()
        assert replayed.snapshot() == store.stats.snapshot()
        assert json.dumps(replayed.snapshot(), sort_keys=True) == json.dumps(
            store.stats.snapshot(), sort_keys=True
        )

    def test_replay_ignores_torn_tail(self, tmp_path):
        log_path = tmp_path / "confirmations.jsonl"
        log = StatsLog(log_path)
        log.append(QueryMode.CITATION, "2", "tok")
        with open(log_path, "a", encoding="utf-8") as fh:
            fh.write('{"sign_type": "citation", "outco')  # crash mid-write
        replayed = StatsLog(log_path).replay()
        assert replayed.counts["citation"]["2"] == 1
        assert replayed.total() == 1

    def test_empty_log_replays_to_zeros(self, tmp_path):
        stats = StatsLog(tmp_path / "missing.jsonl").replay()
        assert stats.total() == 0
