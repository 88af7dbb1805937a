"""Search for chains of mutation operators that turn a fixed program into a buggy one."""

from .minilang import Ast, Node, NodeKind, ParseError, canonical_hash, parse, pretty_print
from .mutops import (
    EXTENDED,
    PITEST,
    CandidatePool,
    MutationApplication,
    OperatorName,
    OperatorSet,
    StaleApplication,
    apply,
    build_pool,
    enumerate_applications,
    operator_set,
)
from .search import (
    MutationPath,
    SearchBudget,
    SearchResult,
    Status,
    bfs_oracle,
    classify,
    find_mutation_path,
)
from .treediff import DiffResult, EditOp, InvalidScript, SizeLimit, ast_diff, replay

__version__ = "0.1.0"
