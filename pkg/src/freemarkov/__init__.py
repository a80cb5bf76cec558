"""Free Markov categories as combinatorial string diagrams.

Diagrams over a free signature are compared by normalizing with the
counit and discard rules and then canonicalizing the remaining copy trees.
On top of that sit causal effects over ordered DAGs, refinements along DAG
homomorphisms, and interventions.
"""
from .signature import (DagHom, OrderedDag, Signature, SignatureError, compose_homs,
                        is_singular, validate_dag, validate_hom, validate_signature,
                        word, word_concat)
from .diagram import (BOUNDARY, Builder, Diagram, DiagramError, Disc, Dup, Gen, atom,
                      compose, cut, factor_through_layers, identity, isomorphic, layer,
                      node_poset, symmetry, tensor, well_formed)
from .surgery import (Match, SubDiagram, Template, apply_surgery, equivalent_bfs,
                      find_matches, is_normal, sharp_layer)
from .markov import (congruence_form, congruence_invariants, disc_word, dup_word,
                     equivalent, is_markov_minimal, markov_congruent, markov_templates,
                     normalize, quasi_terminal_set)
from .effects import (EffectSpec, effect, map_effect, multiplier_power,
                      multiplier_singular, restrict_dag, split_point, twist)
from .causal import (CausalModel, Refinement, cau, causal_effect, check_cond_preserve,
                     check_functoriality, intervene, preimage_word, refine)
from .syntax import ParseError, parse_term, print_term, read_term
from .dot import to_dot

__all__ = [name for name in dir() if not name.startswith("_")]
