# Smoke tests for the python bindings: scalar math, AUC, and a tiny
# generate / train / evaluate round trip.

import json
import math

import pytest

umil = pytest.importorskip("umil")

SMALL_CONFIG = json.dumps(
    {
        "seed": 5,
        "epochs_mil": 4,
        "epochs_umil": 2,
        "lr_base": 0.01,
        "warmup_epochs": 1,
        "encoder_hidden_dims": [8],
        "encoder_output_dim": 6,
        "n_train_normal": 6,
        "n_train_abnormal": 6,
        "n_test_normal": 3,
        "n_test_abnormal": 3,
        "snippets_per_video": 12,
        "frames_per_fine_snippet": 2,
        "anomaly_len_min": 2,
        "anomaly_len_max": 5,
    }
)


def test_scalar_math():
    assert umil.sigmoid(0.0) == 0.5
    assert umil.sigmoid(math.log(3.0)) == pytest.approx(0.75, abs=1e-12)
    q1, q2 = umil.softmax2(math.log(3.0), 0.0)
    assert (q1, q2) == (pytest.approx(0.75), pytest.approx(0.25))
    assert umil.bce(0.5, 1.0) == pytest.approx(math.log(2.0))
    assert umil.binary_entropy(0.5) == pytest.approx(math.log(2.0))


def test_cosine_warmup_lr():
    assert umil.cosine_warmup_lr(0.0, 0.1, 5, 40) == 0.0
    mid = (5 / 40 + 1.0) / 2.0
    assert umil.cosine_warmup_lr(mid, 0.1, 5, 40) == pytest.approx(0.05)


def test_roc_auc():
    auc, points = umil.roc_auc([0.9, 0.8, 0.3, 0.1], [1, 1, 0, 0])
    assert auc == 1.0
    assert points[0] == (0.0, 0.0)
    assert points[-1] == (1.0, 1.0)
    auc_ties, _ = umil.roc_auc([0.5, 0.5], [1, 0])
    assert auc_ties == pytest.approx(0.5)


def test_default_config_round_trips():
    cfg = json.loads(umil.default_config())
    assert cfg["batch_size"] == 8
    assert cfg["epochs_mil"] == 30
    assert cfg["alpha"] == 0.1


def test_generate_train_evaluate(tmp_path):
    ds = tmp_path / "ds"
    out = tmp_path / "out"
    umil.generate_dataset(SMALL_CONFIG, str(ds))
    assert (ds / "manifest.json").exists()
    assert umil.oracle_bayes_auc(str(ds)) > 0.5

    result = umil.train(SMALL_CONFIG, str(ds), str(out))
    assert 0.0 < result["auc_overall"] <= 1.0
    assert "mil_auc_overall" in result
    assert (out / "checkpoint_umil.json").exists()

    metrics = json.loads(
        umil.evaluate_checkpoint(str(out / "checkpoint_umil.json"), str(ds))
    )
    stored = json.loads((out / "metrics.json").read_text())
    assert metrics["auc_overall"] == stored["auc_overall"]


def test_train_is_deterministic(tmp_path):
    ds = tmp_path / "ds"
    umil.generate_dataset(SMALL_CONFIG, str(ds))
    r1 = umil.train(SMALL_CONFIG, str(ds), str(tmp_path / "o1"))
    r2 = umil.train(SMALL_CONFIG, str(ds), str(tmp_path / "o2"))
    assert r1["auc_overall"] == r2["auc_overall"]
    a = (tmp_path / "o1" / "metrics.json").read_bytes()
    b = (tmp_path / "o2" / "metrics.json").read_bytes()
    assert a == b


def test_bad_config_raises(tmp_path):
    with pytest.raises(Exception) as exc:
        umil.generate_dataset('{"learn_rate": 0.1}', str(tmp_path / "ds"))
    assert "learn_rate" in str(exc.value)
