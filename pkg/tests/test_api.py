import pytest
from fastapi.testclient import TestClient

from freqinfl.main import app, jobs
from freqinfl.splitter import write_split

client = TestClient(app)

TAG = "VERB|Tense=Past"


@pytest.fixture(autouse=True)
def clear_jobs():
    jobs.clear()
    yield
    jobs.clear()


def test_evaluate_endpoint():
    response = client.post("/evaluate/", json={
        "gold": [{"lemma": "walk", "tag": TAG, "form": "walked", "count": 3},
                 {"lemma": "sing", "tag": TAG, "form": "sang", "count": 1}],
        "predictions": [{"lemma": "walk", "tag": TAG, "prediction": "walked"},
                        {"lemma": "sing", "tag": TAG, "prediction": "singed"}],
    })
    assert response.status_code == 200
    body = response.json()
    assert body["type_acc"] == 0.5
    assert body["token_acc"] == 0.75
    assert (body["items"], body["tokens"]) == (2, 4)


def test_evaluate_missing_prediction():
    response = client.post("/evaluate/", json={
        "gold": [{"lemma": "walk", "tag": TAG, "form": "walked"}],
        "predictions": [],
    })
    assert response.status_code == 400
    assert "missing" in response.json()["detail"]


def test_evaluate_malformed_tag():
    response = client.post("/evaluate/", json={
        "gold": [{"lemma": "walk", "tag": "no-separator", "form": "walked"}],
        "predictions": [{"lemma": "walk", "tag": "no-separator", "prediction": "walked"}],
    })
    assert response.status_code == 400


def test_sweep_job_completes(tmp_path, separation_split):
    split_dir = tmp_path / "synthetic"
    write_split(separation_split, str(split_dir))
    response = client.post("/sweep/", json={
        "job_id": "job-1", "language": "synthetic", "split_dir": str(split_dir),
        "temperatures": [0.0, 0.3, 1.0], "output_dir": str(tmp_path / "out"),
    })
    assert response.status_code == 200
    assert response.json()["job_id"] == "job-1"

    status = client.get("/status/job-1").json()
    assert status["status"] == "complete"
    result = status["result"]
    assert result["tau_best"] == 0.3
    assert result["test"]["tau-best"]["token_acc"] == pytest.approx(100 / 101)
    assert set(result["dev"]) == {"0.0", "0.3", "1.0"}
    assert (tmp_path / "out" / "results.tsv").is_file()


def test_sweep_job_reports_numeric_error(tmp_path, separation_split):
    split_dir = tmp_path / "synthetic"
    write_split(separation_split, str(split_dir))
    client.post("/sweep/", json={"job_id": "job-2", "split_dir": str(split_dir), "temperatures": [400.0]})
    status = client.get("/status/job-2").json()
    assert status["status"] == "error"
    assert status["exit_code"] == 3


def test_sweep_rejects_running_job():
    jobs["busy"] = {"status": "processing", "result": None}
    response = client.post("/sweep/", json={"job_id": "busy", "split_dir": "/nowhere"})
    assert response.status_code == 409


def test_sweep_needs_data():
    response = client.post("/sweep/", json={"job_id": "job-3"})
    assert response.status_code == 422


def test_unknown_job():
    assert client.get("/status/nope").status_code == 404


def test_sweep_job_with_unwritable_output_can_be_resubmitted(tmp_path, separation_split):
    split_dir = tmp_path / "synthetic"
    write_split(separation_split, str(split_dir))
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory", encoding="utf-8")
    request = {"job_id": "job-4", "split_dir": str(split_dir), "temperatures": [0.0],
               "output_dir": str(blocker / "out")}
    client.post("/sweep/", json=request)
    status = client.get("/status/job-4").json()
    assert status["status"] == "error"
    assert status["exit_code"] == 2
    assert client.post("/sweep/", json=request).status_code == 200


def test_sweep_job_with_copy_model(tmp_path, separation_split):
    split_dir = tmp_path / "synthetic"
    write_split(separation_split, str(split_dir))
    client.post("/sweep/", json={"job_id": "job-5", "split_dir": str(split_dir), "temperatures": [0.0],
                                 "model": "copy"})
    status = client.get("/status/job-5").json()
    assert status["status"] == "complete"
    assert status["result"]["test"]["copy"] == status["result"]["test"]["tau-best"]
