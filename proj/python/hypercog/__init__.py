# Copyright 2026 The Hypercog Authors
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

"""Hypergame lane-change planning with inverse learning of driver weights."""

from hypercog._hypercog import (
    builtin_config,
    euler_step,
    linearize_discrete,
    metrics_columns,
    run_offline,
    run_online,
    solve_game,
    solve_qp,
    success_rate,
    timing,
    validate_config,
)

__all__ = [
    "builtin_config",
    "euler_step",
    "linearize_discrete",
    "metrics_columns",
    "run_offline",
    "run_online",
    "solve_game",
    "solve_qp",
    "success_rate",
    "timing",
    "validate_config",
]
