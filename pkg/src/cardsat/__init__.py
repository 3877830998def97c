"""Cardinality-minimal and -maximal model reasoning over propositional formulas.

Literals are signed integers in DIMACS style: ``3`` is x3, ``-3`` its negation.
"""

from .logic import (Assignment, BooleanRelation, CnfFormula, ConstraintFormula, ContractError,
                    Graph, RefusalError, VariableOrder, all_models, evaluate, to_cnf)
from .sat import CardinalityBound, get_oracle, horn_min_model, sat, sat_with_bound, solve_2sat
from .optsat import (OptAnswer, OptQuery, brute_force_card_max, brute_force_card_min,
                     card_max_sat, card_min_sat, lex_max_model, log_lex_max_sat,
                     width2affine_card_min_sat)
from .revision import (RevisionInstance, dalal_implication, dalal_model_check, dalal_revise,
                       satoh_implication, satoh_minimality_check_poly, satoh_model_check,
                       satoh_revise)
from .abduction import Pap, brute_force_relevance, is_solution, leq_relevance, relevance
from .clones import classify_language, closure_report, is_polymorphism, r4p

__all__ = [
    "Assignment", "BooleanRelation", "CnfFormula", "ConstraintFormula", "ContractError", "Graph",
    "RefusalError", "VariableOrder", "all_models", "evaluate", "to_cnf",
    "CardinalityBound", "get_oracle", "horn_min_model", "sat", "sat_with_bound", "solve_2sat",
    "OptAnswer", "OptQuery", "brute_force_card_max", "brute_force_card_min", "card_max_sat",
    "card_min_sat", "lex_max_model", "log_lex_max_sat", "width2affine_card_min_sat",
    "RevisionInstance", "dalal_implication", "dalal_model_check", "dalal_revise",
    "satoh_implication", "satoh_minimality_check_poly", "satoh_model_check", "satoh_revise",
    "Pap", "brute_force_relevance", "is_solution", "leq_relevance", "relevance",
    "classify_language", "closure_report", "is_polymorphism", "r4p",
]
