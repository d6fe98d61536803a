# Copyright 2026 The gnsstopo Authors
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

"""Solves LP files with HiGHS and prints `path status objective` per file.

Exits 77 when highspy is not importable so callers can skip.
"""

import sys

try:
    import highspy
except ImportError:
    sys.exit(77)

for path in sys.argv[1:]:
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("time_limit", 120.0)
    if h.readModel(path) != highspy.HighsStatus.kOk:
        print(path, "unreadable", "nan")
        continue
    h.run()
    status = h.getModelStatus()
    if status == highspy.HighsModelStatus.kOptimal:
        print(path, "optimal", repr(h.getInfo().objective_function_value))
    elif status == highspy.HighsModelStatus.kInfeasible:
        print(path, "infeasible", "nan")
    else:
        print(path, "other", "nan")
