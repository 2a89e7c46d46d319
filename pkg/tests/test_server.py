import json

import pytest
from fastapi.testclient import TestClient

from gohr.server import create_app


@pytest.fixture()
def client():
    return TestClient(create_app())


def test_create_episode_returns_board(client):
    r = client.post("/episodes", json={"rule": "quadNearby", "n": 9, "mode": "all", "seed": 5})
    assert r.status_code == 201
    body = r.json()
    assert body["session_id"] == "s1"
    assert body["seed"] == 5
    assert len(body["board"]["pieces"]) == 9
    assert body["board"]["move_count"] == 0 and body["board"]["finish_code"] == 0
    piece = body["board"]["pieces"][0]
    assert set(piece) == {"id", "color", "shape", "col", "row"}


def test_unknown_rule_400_bad_config_422(client):
    assert client.post("/episodes", json={"rule": "nope"}).status_code == 400
    assert client.post("/episodes", json={}).status_code == 422
    assert client.post("/episodes", json={"rule": "ordL1", "trial_list": "ordL1"}).status_code == 422
    assert client.post("/episodes", json={"rule": "ordL1", "n": 40, "mode": "train"}).status_code == 422


def test_seed_generated_and_echoed_when_absent(client):
    r = client.post("/episodes", json={"rule": "ordL1"})
    assert r.status_code == 201
    assert isinstance(r.json()["seed"], int)


def test_move_passthrough_codes(client):
    r = client.post("/episodes", json={"rule": "cm_RBKY", "seed": 3})
    sid = r.json()["session_id"]
    pieces = r.json()["board"]["pieces"]
    cmap = {"red": 0, "blue": 1, "black": 2, "yellow": 3}
    piece = pieces[0]
    wrong = (cmap[piece["color"]] + 1) % 4
    deny = client.post(f"/episodes/{sid}/moves", json={"piece_id": piece["id"], "bucket": wrong})
    assert deny.status_code == 200
    assert deny.json()["response_code"] == 4 and deny.json()["reward"] == -1
    ok = client.post(f"/episodes/{sid}/moves", json={"piece_id": piece["id"], "bucket": cmap[piece["color"]]})
    assert ok.json()["response_code"] == 0 and ok.json()["reward"] == 0
    assert ok.json()["move_count"] == 2
    assert len(ok.json()["board"]["pieces"]) == 8


def test_immovable_code_7(client):
    r = client.post("/episodes", json={"rule": "ordL1", "seed": 4})
    sid = r.json()["session_id"]
    pieces = r.json()["board"]["pieces"]
    # reading-first piece: max row, then min col; pick any other piece
    first = sorted(pieces, key=lambda p: (-p["row"], p["col"]))[0]
    stuck = next(p for p in pieces if p["id"] != first["id"])
    out = client.post(f"/episodes/{sid}/moves", json={"piece_id": stuck["id"], "bucket": 0})
    assert out.json()["response_code"] == 7


def test_move_errors(client):
    r = client.post("/episodes", json={"rule": "quadNearby", "seed": 6})
    sid = r.json()["session_id"]
    assert client.post("/episodes/zzz/moves", json={"piece_id": 1, "bucket": 0}).status_code == 404
    assert client.post(f"/episodes/{sid}/moves", json={"piece_id": 77, "bucket": 0}).status_code == 422


def test_finished_episode_409_and_get_state(client):
    r = client.post("/episodes", json={"rule": "quadNearby", "n": 1, "seed": 7})
    sid = r.json()["session_id"]
    piece = r.json()["board"]["pieces"][0]
    quadrant = 0 if piece["row"] >= 4 and piece["col"] <= 3 else 1 if piece["row"] >= 4 else 3 if piece["col"] <= 3 else 2
    done = client.post(f"/episodes/{sid}/moves", json={"piece_id": piece["id"], "bucket": quadrant})
    assert done.json()["finish_code"] == 1
    state = client.get(f"/episodes/{sid}").json()
    assert state["board"]["finish_code"] == 1
    again = client.post(f"/episodes/{sid}/moves", json={"piece_id": piece["id"], "bucket": 0})
    assert again.status_code == 409


def test_rules_catalog_lists_22_with_tags(client):
    r = client.get("/rules")
    rules = r.json()["rules"]
    assert len(rules) == 22
    by_name = {e["name"]: e["tags"] for e in rules}
    assert by_name["cm_RBKY"] == ["Feature_to_bucket_mapping"]
    assert set(by_name["cw_qn2"]) == {"Bucket_ordering", "Quadrant_to_bucket_mapping"}
    assert "col1Ord_KRBY" not in by_name


def test_hidden_rule_contract_for_humans():
    app = create_app(debug=True)
    client = TestClient(app)
    r = client.post("/episodes", json={"rule": "cm_RBKY", "client": "human", "n": 1, "seed": 8})
    body = r.json()
    assert "rule" not in body  # never leaked during play
    sid = body["session_id"]
    assert "rule" not in client.get(f"/episodes/{sid}").json()
    piece = body["board"]["pieces"][0]
    cmap = {"red": 0, "blue": 1, "black": 2, "yellow": 3}
    client.post(f"/episodes/{sid}/moves", json={"piece_id": piece["id"], "bucket": cmap[piece["color"]]})
    after = client.get(f"/episodes/{sid}").json()
    assert after["rule"] == "cm_RBKY"  # debug reveal, post-episode only
    assert "description" in after["rule_description"] or after["rule_description"]


def test_human_session_without_debug_never_reveals():
    client = TestClient(create_app(debug=False))
    r = client.post("/episodes", json={"rule": "cm_RBKY", "client": "human", "n": 1, "seed": 8})
    sid = r.json()["session_id"]
    piece = r.json()["board"]["pieces"][0]
    cmap = {"red": 0, "blue": 1, "black": 2, "yellow": 3}
    client.post(f"/episodes/{sid}/moves", json={"piece_id": piece["id"], "bucket": cmap[piece["color"]]})
    assert "rule" not in client.get(f"/episodes/{sid}").json()


def test_trial_list_session_and_advance(client):
    r = client.post("/episodes", json={"trial_list": "cm_RBKY\ncm_RBKY:cw_0123", "seed": 9})
    body = r.json()
    assert body["phase"] == 1 and body["phases_total"] == 2
    assert body["rule"] == "cm_RBKY"
    sid = body["session_id"]
    adv = client.post(f"/episodes/{sid}/advance")
    assert adv.status_code == 200
    assert adv.json()["phase"] == 2 and adv.json()["rule"] == "cw_0123"
    assert len(adv.json()["board"]["pieces"]) == 9
    assert client.post(f"/episodes/{sid}/advance").status_code == 409


def test_advance_without_trial_list_409(client):
    r = client.post("/episodes", json={"rule": "ordL1", "seed": 10})
    assert client.post(f"/episodes/{r.json()['session_id']}/advance").status_code == 409


def test_restart_gives_fresh_board(client):
    r = client.post("/episodes", json={"rule": "quadNearby", "seed": 11})
    sid = r.json()["session_id"]
    first = r.json()["board"]["pieces"]
    second = client.post(f"/episodes/{sid}/restart").json()["board"]["pieces"]
    assert first != second


def test_replay_reproduces_identical_responses(tmp_path):
    log_path = tmp_path / "requests.jsonl"
    app = create_app(log_path=str(log_path))
    client = TestClient(app)
    r = client.post("/episodes", json={"rule": "cm_RBKY", "seed": 42})
    sid = r.json()["session_id"]
    pieces = r.json()["board"]["pieces"]
    cmap = {"red": 0, "blue": 1, "black": 2, "yellow": 3}
    for piece in pieces[:5]:
        client.post(f"/episodes/{sid}/moves", json={"piece_id": piece["id"], "bucket": cmap[piece["color"]]})
    client.post(f"/episodes/{sid}/moves", json={"piece_id": pieces[6]["id"], "bucket": (cmap[pieces[6]["color"]] + 1) % 4})

    recorded = [json.loads(line) for line in log_path.read_text().splitlines()]
    fresh = TestClient(create_app())
    for entry in recorded:
        req = entry["request"]
        if req["op"] == "create":
            got = fresh.post("/episodes", json={k: v for k, v in req.items() if k != "op"}).json()
        else:
            got = fresh.post(
                f"/episodes/{req['session_id']}/moves",
                json={"piece_id": req["piece_id"], "bucket": req["bucket"]},
            ).json()
        assert got == entry["response"]
