"""ofdkit: ontology-aware functional dependencies end to end.

Discovery of synonym/inheritance dependencies from data, a linear-time
inference engine over their axioms, and a joint data/ontology repair
search producing Pareto-minimal repair pairs.
"""

from .inference import Ofd, OfdSet, closure, implies, minimal_cover, parse_ofd, parse_ofd_text
from .ontology import Ontology, load_ontology, load_ontology_text
from .relation import RelationInstance, load_csv, load_csv_text

__version__ = "0.1.0"

__all__ = [
    "Ofd",
    "OfdSet",
    "Ontology",
    "RelationInstance",
    "closure",
    "implies",
    "load_csv",
    "load_csv_text",
    "load_ontology",
    "load_ontology_text",
    "minimal_cover",
    "parse_ofd",
    "parse_ofd_text",
]
