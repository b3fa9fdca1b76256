"""Finite boolean algebras, Stone duality, boolean valued models, and the
stonean sheafification bridge between them."""

from . import balg, bridge, bvm, jsonio, logic, sheaf, topo
from .balg import BAHom, BoolAlg, Elem, Filter, mk_powerset, quotient, stone_space, ultrafilters
from .bvm import (BVModel, BVMorphism, TarskiModel, eval_formula, has_mixing,
                  is_full, product_model, quotient_model, satisfies,
                  tarski_quotient, ultraproduct, validate)
from .logic import Formula, Signature, free_vars, parse, print_formula, substitute
from .sheaf import (EtaleSpace, Presheaf, gamma0, gamma1, is_separated,
                    is_stonean_sheaf, is_topological_sheaf, lambda0, lambda1,
                    sheafify)
from .topo import (ContMap, FinPoset, FinTop, boolean_completion, clop_algebra,
                   down_topology, induced_ro_hom, is_extremally_disconnected,
                   ro_algebra)
from .bridge import (L, R, adjunction_witness, fullness_via_sections,
                     mixify, mixing_iff_sheaf, phi_bundle)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
