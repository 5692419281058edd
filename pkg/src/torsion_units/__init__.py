"""HeLP (Luthar-Passi) constraints on torsion units of integral group rings."""
from __future__ import annotations

from .chartab import (BrauerTable, CharacterTable, TableError, load_brauer, load_bundled,
                      load_table)
from .cyclotomics import Cyclotomic
from .lutharpassi import (FULL, AugTuple, CaseAssignment, ConstraintSystem, Selection,
                          build_system, load_selections, mu_form, support_classes)
from .solver import UnboundedError, bound_variables, enumerate_solutions, is_feasible
from .zassenhaus import (Budget, OrderVerdict, SpectrumReport, admissible_tuples,
                         kimmerle_check, order_spectrum, prime_graph_of_group, run_kimmerle,
                         zc_verdict)

__version__ = "0.1.0"
