import pytest
from fastapi.testclient import TestClient

from mi_rewrite.models.discriminator import ReflectionDiscriminator
from mi_rewrite.models.generator import FillGenerator, build_training_example
from mi_rewrite.models.scorer import ReflectionScorer
from mi_rewrite.pipeline import RewritePipeline
from mi_rewrite.service import create_app
from mi_rewrite.synthetic import generate_pair_corpus
from mi_rewrite.templating import make_template


@pytest.fixture(scope="module")
def pipeline():
    corpus = generate_pair_corpus(n_groups=16, seed=41, ambiguous_rate=0.0)
    pairs = [(ex.prompt, ex.response) for ex in corpus]
    labels = [ex.reflection_label for ex in corpus]
    disc = ReflectionDiscriminator(epochs=4, seed=0).fit(pairs, labels)
    scorer = ReflectionScorer(epochs=4, seed=0).fit(pairs, labels)

    def extractor(prompt, source, content_weight):
        return make_template(disc.extract_attention(prompt, source), content_weight)

    examples = [
        build_training_example(ex, use_paraphrase=False, extractor=extractor)
        for ex in corpus
        if ex.reflection_label in ("SR", "CR")
    ]
    gen = FillGenerator(epochs=4, seed=0, batch_size=16).fit(examples)
    return RewritePipeline(disc, scorer, gen)


@pytest.fixture(scope="module")
def client(pipeline):
    return TestClient(create_app(pipeline=pipeline))


@pytest.fixture()
def bare_client():
    return TestClient(create_app())


BODY = {
    "prompt": "I keep putting off my homework until late.",
    "response": "You should just start earlier every day.",
}


def test_healthz_reports_loaded_models(client):
    data = client.get("/healthz").json()
    assert data["status"] == "ok"
    assert data["models"] == {"discriminator": True, "scorer": True, "generator": True}


def test_healthz_with_nothing_loaded(bare_client):
    data = bare_client.get("/healthz").json()
    assert data["status"] == "ok"
    assert set(data["models"].values()) == {False}


def test_rewrite_round_trip(client):
    resp = client.post("/v1/rewrite", json=BODY)
    assert resp.status_code == 200
    result = resp.json()["result"]
    assert 1 <= len(result["attempts"]) <= 5
    assert result["stopped_reason"] in {"IMPROVED", "BUDGET_EXHAUSTED", "NOOP_TEMPLATE"}
    for attempt in result["attempts"]:
        assert set(attempt) == {"content_weight", "template", "candidate", "score"}


def test_rewrite_is_idempotent(client):
    first = client.post("/v1/rewrite", json=BODY).json()
    second = client.post("/v1/rewrite", json=BODY).json()
    assert first == second


def test_rewrite_seed_option_accepted(client):
    resp = client.post("/v1/rewrite", json={**BODY, "options": {"seed": 7}})
    assert resp.status_code == 200


def test_score_round_trip(client):
    resp = client.post("/v1/score", json=BODY)
    assert resp.status_code == 200
    data = resp.json()
    assert data["label"] in {"NR", "SR", "CR"}
    assert abs(sum(data["probabilities"].values()) - 1.0) < 1e-6
    assert 0.0 <= data["score"] <= 1.0


def test_malformed_body_is_400(client):
    resp = client.post("/v1/rewrite", content=b"{not json", headers={"content-type": "application/json"})
    assert resp.status_code == 400
    body = resp.json()
    assert body["code"] == "malformed" and body["message"]


def test_non_object_body_is_400(client):
    resp = client.post("/v1/rewrite", json=[1, 2])
    assert resp.status_code == 400


def test_wrong_type_field_is_400_with_field(client):
    resp = client.post("/v1/score", json={"prompt": 3, "response": "x"})
    assert resp.status_code == 400
    assert resp.json()["field"] == "prompt"


def test_empty_field_is_422_with_field(client):
    for field in ("prompt", "response"):
        body = dict(BODY)
        body[field] = "   "
        resp = client.post("/v1/rewrite", json=body)
        assert resp.status_code == 422
        payload = resp.json()
        assert payload["code"] == "empty_field"
        assert payload["field"] == field


def test_unloaded_service_is_503(bare_client):
    for path in ("/v1/rewrite", "/v1/score"):
        resp = bare_client.post(path, json=BODY)
        assert resp.status_code == 503
        assert resp.json()["code"] == "models_not_loaded"


def test_unloadable_config_starts_but_serves_503(tmp_path):
    cfg = tmp_path / "pipeline.json"
    cfg.write_text('{"discriminator": "missing", "scorer": "missing", "generator": "missing"}')
    client = TestClient(create_app(cfg))
    assert client.get("/healthz").json()["models"]["generator"] is False
    assert client.post("/v1/rewrite", json=BODY).status_code == 503


def test_bad_seed_option_is_400(client):
    resp = client.post("/v1/rewrite", json={**BODY, "options": {"seed": "many"}})
    assert resp.status_code == 400
