"""Mining OA-biclusters and prime-based n-clusters in multimodal networks."""

from .clustering import (ClusterCollection, NCluster, OnlineClusters, SweepReport, SweepRow,
                         deduplicate, default_grid, filter_density, filter_weak, finalize, mine,
                         mine_online, online_from_context, sweep, weak_test)
from .concepts import (NConcept, concept_cliques, concept_covered, mine_dyadic_concepts,
                       mine_nadic_concepts_bruteforce)
from .context import NContext, box_density, closure, count_mass, galois, prime_element
from .errors import (ArityError, ElementError, EncodingError, MMClustError, ParseError,
                     SchemaError, SizeGuardError)
from .onemode import SimpleGraph, cc_density_pair, graph_to_context, local_cc
from .quality import (coverage_concepts, coverage_mode, coverage_tuples, density_histogram,
                      diversity, g_score, local_modularity, measure, stability)

__version__ = "0.1.0"

__all__ = [n for n in dir() if not n.startswith("_")]
