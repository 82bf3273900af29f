"""Shared numeric fixtures for the worked example used across the suite."""

from cplan.cbr import Objectives, QualitySituation
from cplan.mcdm import CriteriaSet, EvaluationTable

RCT = CriteriaSet(("Risk", "Cost", "Time"))

ALTERNATIVES = ("S1", "S2", "S3", "S4")

# Local priorities of the four control scenarios on Risk / Cost / Time.
REFERENCE_ROWS = (
    (0.664, 0.042, 0.036),
    (0.043, 0.592, 0.627),
    (0.088, 0.270, 0.212),
    (0.205, 0.096, 0.125),
)

TARGET_SCORES = (0.291, 0.329, 0.170, 0.155)
EXPECTED_RANKS = (2, 1, 3, 4)

# Quality situation entered on the situation screen of the walkthrough.
ENTRY_SITUATION = QualitySituation(cp=1.2, cpk=1.2, ncr=10, encr=3)

# Query that triggers the automatic recommendation, and the reconstructed
# source case behind it (distance 8.25 at p=1 with unit weights).
AUTO_QUERY = QualitySituation(cp=0.9, cpk=1.0, ncr=47, encr=10)
AUTO_SOURCE = QualitySituation(cp=0.95, cpk=1.2, ncr=39, encr=10)
AUTO_DISTANCE = 8.25
AUTO_SCENARIO = "S3"

EXPECTED_OBJECTIVES = Objectives(cp=1.0, cpk=1.2, ncr=15, encr=3)


def reference_table() -> EvaluationTable:
    return EvaluationTable(criteria=RCT, alternatives=ALTERNATIVES, rows=REFERENCE_ROWS)
