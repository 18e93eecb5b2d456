"""fixleads: fixpoint verification of ensures and leads-to liveness
properties for finite guarded event systems, under minimal-progress and
weak-fairness scheduling, cross-validated by an independent trace oracle."""

__version__ = "0.1.0"

from .certificates import (
    Basic,
    CertificateError,
    Disj,
    Trans,
    cert_from_json,
    cert_to_json,
    check_certificate,
    derive_certificate_mp,
    derive_certificate_wf,
)
from .dsl import DslError, Elaborated, Property, SpecAst, elaborate, load_file, parse, print_spec
from .events import Event, EventSystem, ModelError, event_transformer, system_choice
from .exprs import EvalError, eval_bool, eval_expr, to_text
from .mp import ensures_mp, leadsto_mp, leadsto_mp_si, mp_step, rule_mp_variant
from .oracle import (
    Counterexample,
    oracle_mp,
    oracle_reachable,
    oracle_wf,
    validate_counterexample,
)
from .states import (
    DEFAULT_STATE_CAP,
    SpaceError,
    SpaceMismatch,
    StateSet,
    StateSpace,
    VarDecl,
    enumerate_space,
    eval_pred,
)
from .transformers import (
    Choice,
    Dovetail,
    FixpointError,
    Guard,
    IterateTrace,
    Precond,
    Rel,
    Seq,
    Skip,
    apply,
    gfp,
    grd,
    lfp,
    liberal,
    pre,
)
from .variants import VariantError, VariantFn, check_variant_theorem
from .verdicts import SelfCheckDefect, Verdict
from .wf import (
    ensures_wf,
    fair_loop,
    fair_loop_liberal,
    fair_loop_termination,
    leadsto_wf,
    leadsto_wf_si,
    rule_wf_to_mp,
    wf_step,
)

__all__ = [name for name in dir() if not name.startswith("_")]
