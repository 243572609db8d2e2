from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from evenhole.generators import cycle_graph, long_pyramid, tight_chromatic_graph
from evenhole.graphio import serialize_graph
from evenhole.service.app import app
from evenhole.service.schemas import GraphPayload

client = TestClient(app)


def payload(g):
    return GraphPayload.from_graph(g).model_dump()


def test_health():
    assert client.get("/health").json() == {"status": "ok"}


def test_check_c4_reports_even_hole():
    r = client.post("/check", json={"graph": payload(cycle_graph(4))})
    assert r.status_code == 200
    doc = r.json()
    assert not doc["even_hole_free"]
    assert len(doc["even_hole"]) == 4
    assert not doc["in_class"]


def test_check_tight_family_in_class():
    g = tight_chromatic_graph(4).graph
    r = client.post("/check", json={"graph": payload(g), "oracle": False})
    doc = r.json()
    assert doc["in_class"] and doc["even_hole_free"] and doc["star_cutset"] is None


def test_check_oracle_flag_small():
    r = client.post("/check", json={"graph": payload(cycle_graph(5)), "oracle": True})
    assert r.json()["oracle_checked"]


def test_color_endpoint():
    g = long_pyramid(3, 3, 3).graph
    r = client.post("/color", json={"graph": payload(g)})
    assert r.status_code == 200
    doc = r.json()
    assert doc["within_bound"]
    assert doc["colors_used"] <= doc["clique_number"] + 1
    assert sorted(doc["order"]) == list(range(g.n))


def test_color_rejects_out_of_class():
    r = client.post("/color", json={"graph": payload(cycle_graph(4))})
    assert r.status_code == 409
    assert r.json()["detail"]["error"] == "out_of_class"


def test_rankdec_endpoint():
    g = tight_chromatic_graph(3).graph
    r = client.post("/rankdec", json={"graph": payload(g), "oracle": True})
    assert r.status_code == 200
    doc = r.json()
    assert doc["width"] <= 3 and doc["within_bound"]
    assert doc["exact_rank_width"] is not None and doc["exact_rank_width"] <= doc["width"]
    assert len(doc["leaf_map"]) == g.n


def test_generate_endpoint_families():
    r = client.post("/generate", json={"family": "tight_chromatic", "params": {"k": 5}})
    doc = r.json()
    assert doc["graph"]["n"] == 23
    assert doc["names"]["a1"] == 0
    r = client.post("/generate", json={"family": "long_pyramid", "params": {"l1": 2, "l2": 2, "l3": 2}})
    assert r.json()["graph"]["n"] == 7
    r = client.post("/generate", json={"family": "composed", "seed": 3})
    assert 15 <= r.json()["graph"]["n"] <= 60


def test_generate_bad_family_and_params():
    assert client.post("/generate", json={"family": "nonsense"}).status_code == 400
    assert (
        client.post("/generate", json={"family": "long_pyramid", "params": {"l1": 1, "l2": 2, "l3": 3}}).status_code
        == 400
    )


def test_decomposition_endpoint():
    from tests.instances import composed_ext_pyramid

    g, _ = composed_ext_pyramid()
    r = client.post("/decomposition", json=payload(g))
    doc = r.json()
    assert doc["vertices"] == g.n and len(doc["children"]) == 2


def test_validation_errors_are_4xx():
    r = client.post("/check", json={"graph": {"n": -1, "edges": []}})
    assert r.status_code == 422
    r = client.post("/check", json={"graph": {"n": 2, "edges": [[0, 5]]}})
    assert r.status_code == 400
