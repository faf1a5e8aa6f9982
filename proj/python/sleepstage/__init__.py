# Copyright 2026 The Sleepstage Authors.
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

"""EEG sleep-stage features, reduction, classifiers and metrics."""

from sleepstage._core import (
    NUM_FEATURES,
    STAGES,
    Basis,
    Model,
    SleepstageError,
    bench,
    feature_names,
    featurize,
    fit,
    metrics,
    pca,
    read_dataset,
    split,
    svd,
    synthesize,
)

__all__ = [
    "NUM_FEATURES",
    "STAGES",
    "Basis",
    "Model",
    "SleepstageError",
    "bench",
    "feature_names",
    "featurize",
    "fit",
    "metrics",
    "pca",
    "read_dataset",
    "split",
    "svd",
    "synthesize",
]
