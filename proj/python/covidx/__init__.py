# Copyright 2026 The COVIDX Authors.
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Three-phase chest X-ray triage: healthy, pneumonia, COVID-19 severity."""

import json as _json

import numpy as _np

from covidx import _covidx
from covidx._covidx import CovidxError, f1_score, kfold, pr_auc, roc_auc, stratified_split

__all__ = [
    "Bundle",
    "CovidxError",
    "Model",
    "baseline_features",
    "f1_score",
    "kfold",
    "pr_auc",
    "preprocess",
    "roc_auc",
    "stratified_split",
    "train",
    "write_synthetic_dataset",
]


def _prep(prep):
    return "" if prep is None else _json.dumps(prep)


def preprocess(image: bytes, prep: dict | None = None) -> _np.ndarray:
    """Decoded, resized, denoised and stretched luminance image."""
    return _covidx.preprocess(image, _prep(prep))


def baseline_features(image: bytes, prep: dict | None = None) -> _np.ndarray:
    return _np.asarray(_covidx.baseline_features(image, _prep(prep)))


class Model:
    """A single fitted learner; config is e.g. {"learner": "svm", "C": 1}."""

    def __init__(self, X, y, config: dict):
        X = _np.ascontiguousarray(X, dtype=_np.float64)
        self._m = _covidx.Model(X, list(map(int, y)), _json.dumps(config))

    def scores(self, X):
        return _np.asarray(self._m.scores(_np.ascontiguousarray(X, dtype=_np.float64)))

    def labels(self, X):
        return _np.asarray(self._m.labels(_np.ascontiguousarray(X, dtype=_np.float64)))

    def __repr__(self):
        return self._m.describe()


class Bundle:
    """A loaded .covidx model bundle."""

    def __init__(self, path):
        self._b = _covidx.Bundle(str(path))

    @property
    def digest(self) -> str:
        return self._b.digest

    @property
    def manifest(self) -> dict:
        return _json.loads(self._b.manifest())

    def predict(self, image: bytes) -> dict:
        return _json.loads(self._b.predict(image))

    def evaluate(self, root) -> dict:
        return _json.loads(self._b.evaluate(str(root)))


def train(config, seed: int | None = None) -> dict:
    """Runs a full training from a JSON config file; returns the report."""
    return _json.loads(_covidx.train(str(config), seed))


def write_synthetic_dataset(root, per_class=60, covid_high=30, size=96, seed=0) -> None:
    _covidx.write_synthetic_dataset(str(root), per_class, covid_high, size, seed)
