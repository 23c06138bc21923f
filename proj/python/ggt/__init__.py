# Copyright 2026 The GGT Authors.
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

"""Graph-guided testing: pruned-model ensembles for adversarial sample detection."""

import json as _json

from ._ggt import (  # noqa: F401
    DetectorCalibration,
    GgtError,
    RelationalGraph,
    aspl,
    auroc,
    calibrate,
    config_json,
    dsd,
    generate_regular_graph,
    graph_from_edges,
    graph_from_json,
    lcr,
    regulate_aspl,
    render_report,
    sprt,
)
from ._ggt import reproduce as _reproduce


def config(profile="smoke", overlay=None):
    """Resolved experiment config as a dict."""
    return _json.loads(config_json(profile, _json.dumps(overlay) if overlay else ""))


def reproduce(profile="smoke", overlay=None):
    """Runs every stage and returns the report as a dict."""
    return _json.loads(_reproduce(profile, _json.dumps(overlay) if overlay else ""))
