# Copyright 2026 The tabmia Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Smoke tests for the python bindings."""

import json

import numpy as np
import pytest

import tabmia


def test_schedule_recurrence():
    sched = tabmia.NoiseSchedule.cosine(64, 0.008)
    assert sched.timesteps == 64
    assert sched.alpha_bar(0) == 1.0
    prev = 1.0
    for t in range(1, 65):
        bar = sched.alpha_bar(t)
        assert bar == pytest.approx(prev * sched.alpha(t), rel=1e-15)
        assert bar < prev
        prev = bar
    with pytest.raises(ValueError):
        sched.beta(0)


def test_denoiser_shapes_and_determinism():
    sched = tabmia.NoiseSchedule.linear(32, 1e-3, 0.2)
    model_a = tabmia.Denoiser(3, [8, 8], 4, seed=7, schedule=sched)
    model_b = tabmia.Denoiser(3, [8, 8], 4, seed=7, schedule=sched)
    np.testing.assert_array_equal(model_a.get_parameters(),
                                  model_b.get_parameters())
    xt = np.random.default_rng(0).normal(size=(5, 3))
    out = model_a.predict(xt, 3)
    assert out.shape == (5, 3)


def test_zeroed_output_layer_gives_zero_terror():
    sched = tabmia.NoiseSchedule.linear(32, 1e-3, 0.2)
    model = tabmia.Denoiser(2, [6], 4, seed=1, schedule=sched)
    params = model.get_parameters()
    layout = {name: (off, rows, cols) for name, off, rows, cols
              in model.parameter_layout()}
    for name in ("layer1.weight", "layer1.bias"):
        off, rows, cols = layout[name]
        params[off:off + rows * cols] = 0.0
    model.set_parameters(params)

    rows = np.random.default_rng(1).normal(size=(4, 2))
    errors, totals = tabmia.t_error_matrix(model, rows, [1, 1, 0, 0], t=5)
    assert errors.shape == (4, 2)
    np.testing.assert_allclose(totals, 0.0, atol=1e-12)


def test_training_reduces_loss():
    sched = tabmia.NoiseSchedule.linear(32, 1e-3, 0.2)
    model = tabmia.Denoiser(2, [16], 8, seed=3, schedule=sched)
    data = np.random.default_rng(2).normal(size=(64, 2))
    trace, steps = tabmia.train_denoiser(model, data, batch_size=32,
                                         epochs=100, seed=5)
    assert steps == 200
    assert trace[-1] < trace[0]
    samples = tabmia.sample_rows(model, 16, 9)
    assert samples.shape == (16, 2)


def test_roc_and_attacks_on_toy_scores():
    report = tabmia.roc(np.array([0.9, 0.8, 0.1, 0.2]), [1, 1, 0, 0])
    assert report["auc"] == 1.0
    assert report["tpr_at"][0.01] == 1.0

    rng = np.random.default_rng(3)
    errors = np.abs(rng.normal(size=(80, 4)))
    errors[:40] *= 0.1  # members have visibly smaller residuals
    labels = [1] * 40 + [0] * 40
    stat = tabmia.stat_attack(errors, labels, calibration_fraction=0.3,
                              seed=11)
    scores = np.asarray(stat["scores"])
    stat_roc = tabmia.roc(scores, labels, higher_is_member=False)
    assert stat_roc["auc"] > 0.9

    nn = tabmia.nn_attack(errors, labels, epochs=150, seed=11, channels=4,
                          blocks=1)
    nn_roc = tabmia.roc(np.asarray(nn["heldout_scores"]),
                        nn["heldout_labels"])
    assert nn_roc["auc"] > 0.8


def test_dcr_member_copy_is_one():
    rng = np.random.default_rng(4)
    member = rng.normal(size=(20, 3))
    far = member + 500.0
    report = tabmia.dcr_score(member, member, far, seed=1)
    assert report["dcr_score"] == 1.0


def test_pipeline_end_to_end(tmp_path):
    rng = np.random.default_rng(5)
    csv = tmp_path / "data.csv"
    with open(csv, "w") as fh:
        fh.write("a,b\n")
        for _ in range(60):
            fh.write(f"{rng.normal():.6f},{rng.normal() * 2 + 1:.6f}\n")
    schema = tmp_path / "schema.json"
    schema.write_text(json.dumps({"columns": [
        {"name": "a", "kind": "numerical"},
        {"name": "b", "kind": "numerical"},
    ]}))
    config = {
        "data_csv": str(csv),
        "schema": str(schema),
        "member_fraction": 0.8,
        "seed": 7,
        "schedule": {"kind": "linear", "timesteps": 12, "beta_start": 1e-3,
                     "beta_end": 0.2},
        "denoiser": {"hidden": [8], "embed_dim": 4,
                     "train": {"batch_size": 32, "epochs": 2}},
        "attack": {"kind": "stat", "t": 4,
                   "stat_calibration_fraction": 0.3},
        "report": {"ratio_timesteps": {"start": 2, "stop": 6, "step": 2}},
        "n_samples": 5,
    }
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps(config))
    run_dir = tmp_path / "run"
    tabmia.run_pipeline(str(config_path), str(run_dir))
    metrics = json.loads((run_dir / "report" / "metrics.json").read_text())
    assert "auc" in metrics
    assert (run_dir / "report" / "roc.csv").exists()
