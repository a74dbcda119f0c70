"""Exact computations with Lubin-Tate formal groups and rank-one (phi, Gamma)-modules."""
from .errors import *  # noqa: F401,F403
from .ff import FFElem, FiniteFieldSpec  # noqa: F401
from .padic import LocalFieldSpec, OFElem, Val, hensel_lift, make_local_field, teichmuller  # noqa: F401
from .series import TruncatedSeries  # noqa: F401
from .formal_group import LTGroup, lt_isomorphism, tamper, verify_axioms, verify_isomorphism  # noqa: F401
from .tower import (  # noqa: F401
    TowerField,
    eisenstein_step,
    galois_apply,
    norm_to_base,
    reciprocity_conjugacy,
    torsion_check,
)
from .rings import AFElem, AFRing, EFElem, EFRing, af_frobenius, af_gamma, ef_frobenius, ef_root, v_E  # noqa: F401
from .descent import (  # noqa: F401
    CharacterEta,
    RankOneModule,
    character_descent,
    cyclotomic_data,
    descent_ring,
    enumerate_characters,
    forward_certificate,
    lemma_LT4_solve_modp,
    lemma_LT5_descent,
    lt5_certified,
    rank1_module,
    solve_phi_fixed_modp,
    verify_module,
)
from .kernel import available_backends, get_backend, set_backend  # noqa: F401

__version__ = "0.1.0"
