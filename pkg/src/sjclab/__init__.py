"""Verification laboratory for super J-holomorphic curve computations.

Subpackages:

* :mod:`sjclab.grassmann` -- exact finitely generated Grassmann algebra;
* :mod:`sjclab.superfield` -- symbolic superfields on the flat patch and
  the flat-model first-order system;
* :mod:`sjclab.targets` -- almost Kahler target models;
* :mod:`sjclab.spin`, :mod:`sjclab.patch`, :mod:`sjclab.fields`,
  :mod:`sjclab.components`, :mod:`sjclab.fierz`, :mod:`sjclab.energy` --
  the component-field calculus on the periodic patch;
* :mod:`sjclab.indexlab` -- discretized operators with index bookkeeping;
* :mod:`sjclab.classify`, :mod:`sjclab.suites`, :mod:`sjclab.cli` --
  classification, batch suites and the command line.
"""

from .grassmann import GrassmannElement, gr_body_soul, gr_left_derive, gr_mul, gr_parity
from .superfield import (
    FlatTargetJ,
    PolyFn,
    SuperField,
    apply_D,
    apply_D3,
    apply_D4,
    apply_Dbar,
    berezin_top,
    components_from_complex,
    flat_sjc_residual,
    holomorphy_equivalence_check,
)
from .targets import (
    AlmostKahlerModel,
    make_const_hsc,
    make_flat,
    make_fs_cp1,
    make_model,
    nabla_bar,
    sectional_value,
    validate_model,
)
from .classify import (
    BochnerInput,
    BochnerVerdicts,
    ModuliDimQuery,
    ModuliDimensions,
    bochner_classify,
    moduli_dimension,
)
from .indexlab import (
    IndexReport,
    OperatorMatrix,
    adjoint_relation_check,
    bochner_gap,
    build_dbar_sphere,
    build_dirac10_sphere,
    build_dirac_torus,
    dirac10_index,
    h_oracle,
    numeric_index,
    riemann_roch,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
