"""
Transaction templates and their execution paths.

Templates are symbolic: ids are content digests, scripts are fragment trees and
witnesses are constraint sets rather than byte stacks.
"""

from src.txmodel.paths import (
    OutputResolver,
    Secrets,
    WitnessPermutation,
    earliest_broadcast,
    output_sat,
    path_controlled,
    path_owned,
    permutations,
)
from src.txmodel.template import OutputRef, TxInput, TxOutput, TxTemplate

__all__ = [
    "OutputRef",
    "OutputResolver",
    "Secrets",
    "TxInput",
    "TxOutput",
    "TxTemplate",
    "WitnessPermutation",
    "earliest_broadcast",
    "output_sat",
    "path_controlled",
    "path_owned",
    "permutations",
]
