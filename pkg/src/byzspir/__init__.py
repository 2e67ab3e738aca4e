"""Symmetric PIR against limited-knowledge Byzantine servers, with epsilon error."""
from .field import Field, invert, solve, vandermonde
from .scheme import (AnswerSet, Dataset, Model, QueryArtifacts, SchemeParams, accounting,
                     build_generators, build_x_matrix, capacity,
                     capacity_omniscient_zero_error, generate_answers, generate_queries)
from .hashing import (HashBundle, answer_hashes, build_p_matrix, forgery_bound,
                      message_hashes, scheme_error_bound, verify)
from .decoder import enumerate_candidates, extract_message, filter_by_hashes
from .sim import run_experiment, run_trial

__version__ = "0.1.0"
