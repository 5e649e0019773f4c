"""LinkageStore: idempotent appends, blobs, queries, crash recovery."""

from __future__ import annotations

import hashlib
import json

import pytest

from conftest import simple_features
from fablink.errors import ValidationError
from fablink.store.records import (
    Article,
    ConflictError,
    DesignVariant,
    Feedback,
    IntegrityError,
    MachineEvent,
    MachineStatus,
    NotFoundError,
    ProcessOutcome,
    User,
    record_from_json_obj,
)
from fablink.store.store import LinkageStore
from fablink.telemetry.protocol import event, status


def article(article_id="a1", ts=1000):
    return Article(article_id=article_id, name="Part", material="steel", created_ts_ms=ts)


def variant(store, variant_id="v1", article_id="a1", ts=2000, data=b"dummy", **kw):
    return DesignVariant(
        variant_id=variant_id,
        article_id=article_id,
        step_blob_hash=store.put_blob(data),
        features=simple_features(),
        created_ts_ms=ts,
        uploaded_by="dana",
        **kw,
    )


def machine_event(seq=1, ts=100, machine_id="m1", article_id="a1",
                  event_type="job_start", ingest=5000, **kw):
    return MachineEvent(machine_id=machine_id, seq=seq, ts_ms=ts,
                        article_id=article_id, event_type=event_type,
                        ingest_ts_ms=ingest, **kw)


def machine_status(seq=1, ts=100, machine_id="m1", article_id="a1",
                   power=800.0, wear=0.0, state="idle", ingest=5000):
    return MachineStatus(machine_id=machine_id, seq=seq, ts_ms=ts,
                         article_id=article_id, power_w=power,
                         tool_wear=wear, state=state, ingest_ts_ms=ingest)


# ------------------------------------------------------------------ appends


def test_append_returns_record_id(store):
    assert store.append_record(article()) == "a1"
    assert store.append_record(machine_event(seq=5)) == "m1:5"


def test_append_is_idempotent_on_identical_content(store):
    store.append_record(article())
    store.append_record(article())  # exact duplicate is a no-op
    path = store.data_dir / "cad" / "records.ndjson"
    assert len(path.read_text().splitlines()) == 1


def test_append_conflicts_on_same_key_different_content(store):
    store.append_record(article())
    clash = Article(article_id="a1", name="Other", material="steel", created_ts_ms=1000)
    with pytest.raises(ConflictError, match="different content"):
        store.append_record(clash)


def test_ingest_ts_is_not_part_of_record_identity(store):
    store.append_record(machine_event(ingest=5000))
    store.append_record(machine_event(ingest=9999))  # volatile field only
    assert store.events[("m1", 1)].ingest_ts_ms == 5000
    changed = machine_event(ingest=9999, ts=777)
    with pytest.raises(ConflictError):
        store.append_record(changed)


def test_variant_requires_known_article(store):
    with pytest.raises(IntegrityError, match="unknown article_id"):
        store.append_record(variant(store))


def test_variant_requires_stored_blob(store):
    store.append_record(article())
    ghost = DesignVariant(
        variant_id="v1", article_id="a1", step_blob_hash="0" * 64,
        features=simple_features(), created_ts_ms=2000, uploaded_by="dana",
    )
    with pytest.raises(IntegrityError, match="blob store"):
        store.append_record(ghost)


def test_feedback_requires_known_article(store):
    fb = Feedback(feedback_id="f1", article_id="nope", reporter="mia",
                  category="process", severity="minor", text="", created_ts_ms=1)
    with pytest.raises(IntegrityError, match="unknown article_id"):
        store.append_record(fb)


# -------------------------------------------------------------------- blobs


def test_blob_roundtrip(store):
    data = b"ISO-10303-21; pretend"
    digest = store.put_blob(data)
    assert digest == hashlib.sha256(data).hexdigest()
    assert store.has_blob(digest)
    assert store.get_blob(digest) == data
    assert store.put_blob(data) == digest  # re-put is a no-op
    assert not store.has_blob("f" * 64)
    with pytest.raises(NotFoundError):
        store.get_blob("f" * 64)


def test_blob_corruption_detected_on_read(store):
    digest = store.put_blob(b"original")
    (store.data_dir / "cad" / "blobs" / f"{digest}.step").write_bytes(b"tampered")
    with pytest.raises(IntegrityError, match="does not match"):
        store.get_blob(digest)


# ---------------------------------------------------------- telemetry sink


def test_wire_sink_dedupes_on_key_only(store):
    msg = event("m1", 1, 100, "a1", "job_start")
    assert store.add_machine_event(msg, 5000) is True
    assert store.add_machine_event(msg, 6000) is False
    # recycled content under the same key is still just a duplicate
    other = event("m1", 1, 999, "a1", "job_end")
    assert store.add_machine_event(other, 7000) is False
    assert store.events[("m1", 1)].event_type == "job_start"


def test_wire_sink_key_space_spans_both_kinds(store):
    assert store.add_machine_event(event("m1", 1, 100, "a1", "job_start"), 0) is True
    st = status("m1", 1, 100, "a1", power_w=1.0, tool_wear=0.0, state="idle")
    assert store.add_machine_status(st, 0) is False
    assert ("m1", 1) not in store.statuses


# ------------------------------------------------------------------ queries


def test_queries_sorted_and_filtered(store):
    store.append_record(article("a1"))
    store.append_record(article("a2"))
    store.append_record(variant(store, "v-late", "a1", ts=3000, data=b"x"))
    store.append_record(variant(store, "v-early", "a1", ts=1000, data=b"y"))
    store.append_record(variant(store, "v-other", "a2", ts=500, data=b"z"))
    assert [a.article_id for a in store.list_articles()] == ["a1", "a2"]
    assert [v.variant_id for v in store.variants_for("a1")] == ["v-early", "v-late"]

    store.append_record(machine_event(seq=2, ts=200))
    store.append_record(machine_event(seq=1, ts=100, event_type="job_end"))
    store.append_record(machine_event(seq=1, ts=100, machine_id="m0"))
    store.append_record(machine_event(seq=9, ts=50, article_id="a2"))
    assert [(e.ts_ms, e.machine_id) for e in store.events_for("a1")] == [
        (100, "m0"), (100, "m1"), (200, "m1"),
    ]

    store.append_record(machine_status(seq=21, ts=300))
    store.append_record(machine_status(seq=20, ts=150))
    assert [s.seq for s in store.statuses_for("a1")] == [20, 21]

    fb1 = Feedback(feedback_id="fb-b", article_id="a1", reporter="mia",
                   category="process", severity="minor", text="", created_ts_ms=10)
    fb2 = Feedback(feedback_id="fb-a", article_id="a1", reporter="mia",
                   category="surface", severity="major", text="", created_ts_ms=10)
    store.append_record(fb1)
    store.append_record(fb2)
    assert [f.feedback_id for f in store.feedback_for("a1")] == ["fb-a", "fb-b"]


def test_get_article_not_found(store):
    with pytest.raises(NotFoundError, match="no article"):
        store.get_article("ghost")
    with pytest.raises(NotFoundError):
        store.query_by_article("ghost")


def test_latest_status_and_machine_ids(store):
    store.append_record(article())
    store.append_record(machine_status(seq=1, ts=100, power=1.0))
    store.append_record(machine_status(seq=2, ts=300, power=2.0))
    store.append_record(machine_status(seq=3, ts=200, power=3.0))
    assert store.latest_status("m1").power_w == 2.0  # ts wins over seq
    # tie on ts resolved by seq
    store.append_record(machine_status(seq=4, ts=300, power=4.0))
    assert store.latest_status("m1").power_w == 4.0
    store.append_record(machine_status(seq=1, machine_id="zeta"))
    store.append_record(machine_status(seq=1, machine_id="alpha"))
    assert store.machine_ids() == ["alpha", "m1", "zeta"]
    with pytest.raises(NotFoundError, match="no status"):
        store.latest_status("ghost")


def test_unknown_article_ids(store):
    store.append_record(article("known"))
    store.append_record(machine_event(seq=1, article_id="known"))
    store.append_record(machine_event(seq=2, article_id="phantom-b"))
    store.append_record(machine_status(seq=3, article_id="phantom-a"))
    assert store.unknown_article_ids() == ["phantom-a", "phantom-b"]


# -------------------------------------------------------------------- users


def test_users_roundtrip(store):
    tok = hashlib.sha256(b"secret").hexdigest()
    u = User(user_id="dana", role="designer", token_sha256=tok, created_ts_ms=1)
    store.append_record(u)
    assert store.get_user("dana") == u
    assert store.user_by_token_sha256(tok) == u
    assert store.user_by_token_sha256("0" * 64) is None
    store.append_record(User(user_id="abe", role="admin",
                             token_sha256=hashlib.sha256(b"x").hexdigest(),
                             created_ts_ms=2))
    assert [x.user_id for x in store.list_users()] == ["abe", "dana"]
    with pytest.raises(NotFoundError):
        store.get_user("ghost")
    clash = User(user_id="dana", role="admin", token_sha256=tok, created_ts_ms=1)
    with pytest.raises(ConflictError):
        store.append_record(clash)


# ----------------------------------------------------------------- recovery


def populate(store):
    store.append_record(article("a1"))
    store.append_record(article("a2", ts=1500))
    store.append_record(variant(store, "v1", "a1", data=b"one"))
    store.append_record(variant(store, "v2", "a2", data=b"two",
                                thickness_override=3.5))
    for seq, (ts, et) in enumerate(
        [(100, "job_start"), (400, "job_end"), (500, "error")], start=1
    ):
        store.append_record(machine_event(seq=seq, ts=ts, event_type=et))
    for seq, ts in enumerate((100, 200, 300, 400), start=10):
        store.append_record(machine_status(
            seq=seq, ts=ts, power=800.0 + seq, wear=seq / 100.0,
            state="processing"))
    store.append_record(Feedback(
        feedback_id="fb1", article_id="a1", reporter="mia",
        category="process", severity="scrap", text="warped", created_ts_ms=600))
    store.append_record(User(
        user_id="abe", role="admin",
        token_sha256=hashlib.sha256(b"t").hexdigest(), created_ts_ms=1))


def test_reopen_reproduces_queries(store):
    populate(store)
    before = {aid: store.query_by_article(aid) for aid in ("a1", "a2")}
    users_before = store.list_users()
    data_dir = store.data_dir
    store.close()

    with LinkageStore(data_dir) as reopened:
        for aid in ("a1", "a2"):
            assert reopened.query_by_article(aid) == before[aid]
        assert reopened.list_users() == users_before


def test_rebuild_skips_torn_and_foreign_lines(store):
    populate(store)
    expected = store.events_for("a1")
    data_dir = store.data_dir
    store.close()

    with open(data_dir / "process" / "events.ndjson", "a", encoding="utf-8") as f:
        f.write('{"schema":"r1","kind":"event","machine_id":"m9","se')  # torn
        f.write("\n\n")
        f.write('{"schema":"r0","kind":"event"}\n')  # wrong schema
        f.write('{"schema":"r1","kind":"mystery"}\n')  # unknown kind
        f.write('{"schema":"r1","kind":"event","machine_id":"m9"}\n')  # missing fields
        f.write("[1,2,3]\n")  # not an object

    with LinkageStore(data_dir) as reopened:
        assert reopened.events_for("a1") == expected
        assert ("m9", 1) not in reopened.events


def test_lock_excludes_second_opener(store):
    with pytest.raises(ConflictError, match="locked"):
        LinkageStore(store.data_dir)
    data_dir = store.data_dir
    store.close()
    with LinkageStore(data_dir):  # released lock can be re-taken
        pass


# --------------------------------------------------------------- validation


@pytest.mark.parametrize(
    "build",
    [
        lambda: Article(article_id="has space", name="n", material="m", created_ts_ms=0),
        lambda: Article(article_id="a", name="n", material="m", created_ts_ms=-1),
        lambda: Feedback(feedback_id="f", article_id="a", reporter="r",
                         category="process", severity="catastrophic", text="",
                         created_ts_ms=0),
        lambda: Feedback(feedback_id="f", article_id="a", reporter="r",
                         category="vibes", severity="minor", text="", created_ts_ms=0),
        lambda: User(user_id="u", role="wizard", token_sha256="0" * 64, created_ts_ms=0),
        lambda: User(user_id="u", role="admin", token_sha256="XYZ", created_ts_ms=0),
        lambda: machine_event(seq=0),
        lambda: machine_event(event_type="meltdown"),
        lambda: machine_status(wear=1.5),
        lambda: machine_status(power=-1.0),
        lambda: machine_status(state="berserk"),
    ],
)
def test_record_validation_rejects(build):
    with pytest.raises(ValidationError):
        build()


def test_process_outcome_invariant():
    with pytest.raises(ValidationError, match="complete outcome"):
        ProcessOutcome(article_id="a", job_index=0, machine_id="m",
                       production_time_s=0.0, energy_wh=1.0, tool_wear_delta=0.0,
                       error_count=0, complete=True, start_ts_ms=0, end_ts_ms=1)
    incomplete = ProcessOutcome(article_id="a", job_index=0, machine_id="m",
                                production_time_s=0.0, energy_wh=0.0,
                                tool_wear_delta=0.0, error_count=0,
                                complete=False, start_ts_ms=0, end_ts_ms=None)
    assert incomplete.to_json_obj()["end_ts_ms"] is None


def test_record_from_json_obj_errors():
    with pytest.raises(ValidationError, match="JSON object"):
        record_from_json_obj([1, 2])
    with pytest.raises(ValidationError, match="schema"):
        record_from_json_obj({"schema": "r2", "kind": "article"})
    with pytest.raises(ValidationError, match="unknown record kind"):
        record_from_json_obj({"schema": "r1", "kind": "gadget"})
    with pytest.raises(ValidationError, match="missing field 'name'"):
        record_from_json_obj({"schema": "r1", "kind": "article", "article_id": "a"})


def test_record_json_round_trip(store):
    populate(store)
    for mapping in (store.articles, store.variants, store.events,
                    store.statuses, store.feedback, store.users):
        for record in mapping.values():
            rebuilt = record_from_json_obj(
                json.loads(json.dumps(record.to_json_obj())))
            assert rebuilt == record
