# Copyright 2026 The gorag Authors
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
"""Graph-based online retrieval for dynamic few-shot text classification."""

import json
import os

from ._core import (
    DisconnectedGraphError,
    Error,
    Graph,
    InvariantError,
    ParseError,
    TransportError,
    __version__,
    _run,
    _steiner_candidates,
    _steiner_exact,
    compute_metrics,
    normalize_phrase,
    synth,
    tokenize,
)

__all__ = [
    "DisconnectedGraphError",
    "Error",
    "Graph",
    "InvariantError",
    "ParseError",
    "TransportError",
    "__version__",
    "compute_metrics",
    "normalize_phrase",
    "run",
    "steiner_candidates",
    "steiner_exact",
    "synth",
    "tokenize",
]


def steiner_candidates(graph, keywords, paths="mst", unit_weights=False):
    """Candidate labels and the Steiner tree for a list of query keywords."""
    return json.loads(_steiner_candidates(graph, list(keywords), paths, unit_weights))


def steiner_exact(graph, keywords, unit_weights=False):
    """Optimal tree; only for graphs of at most 16 nodes."""
    return json.loads(_steiner_exact(graph, list(keywords), unit_weights))


def run(config, base_dir=""):
    """Runs a multi-round evaluation.

    `config` is a dict in the run-config schema or a path to a config file.
    Returns (complete, report) where report is the parsed report.json.
    """
    if isinstance(config, (str, os.PathLike)):
        path = os.fspath(config)
        with open(path, encoding="utf-8") as f:
            text = f.read()
        base_dir = base_dir or os.path.dirname(os.path.abspath(path))
    else:
        text = json.dumps(config)
    complete, report = _run(text, base_dir)
    return complete, json.loads(report)
