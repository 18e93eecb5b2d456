"""Certificate derivation, checking, serialization, and mutation robustness."""

import pytest

from fixleads.certificates import (
    Basic,
    CertificateError,
    Disj,
    Trans,
    cert_from_json,
    cert_to_json,
    check_certificate,
    conclusion,
    derive_certificate_mp,
    derive_certificate_wf,
)
from fixleads.mp import leadsto_mp
from fixleads.wf import leadsto_wf

from conftest import xs


def _leaves(cert):
    if isinstance(cert, Basic):
        return [cert]
    if isinstance(cert, Trans):
        return _leaves(cert.left) + _leaves(cert.right)
    return [leaf for part in cert.parts for leaf in _leaves(part)]


def test_derive_mp_mono3(mono3):
    a, b = xs(mono3, 0), xs(mono3, 2)
    v = leadsto_mp(mono3, a, b)
    cert = derive_certificate_mp(mono3, a, b, v.trace)
    assert check_certificate(mono3, cert, (a, b), "mp")
    p, q = conclusion(cert)
    assert a.is_subset(p) and q.mask == b.mask
    # chain length bounded by the trace length
    assert len(_leaves(cert)) <= len(v.trace.steps)


def test_derive_mp_trivial_inclusion(mono3):
    a = xs(mono3, 2)
    v = leadsto_mp(mono3, a, a)
    cert = derive_certificate_mp(mono3, a, a, v.trace)
    assert isinstance(cert, Basic)
    assert check_certificate(mono3, cert, (a, a), "mp")


def test_derive_mp_rejects_claims_outside_fixpoint(idle):
    a, b = xs(idle, 0), xs(idle, 1)
    v = leadsto_mp(idle, a, b)
    assert not v.holds
    with pytest.raises(CertificateError):
        derive_certificate_mp(idle, a, b, v.trace)


def test_derive_wf_idle(idle):
    a, b = xs(idle, 0), xs(idle, 1)
    v = leadsto_wf(idle, a, b)
    cert = derive_certificate_wf(idle, a, b, v.trace)
    assert check_certificate(idle, cert, (a, b), "wf")
    assert any(isinstance(n, Disj) for n in _walk(cert))


def test_derive_wf_rejects_cycle3(cycle3):
    a, b = xs(cycle3, 0), xs(cycle3, 2)
    v = leadsto_wf(cycle3, a, b)
    with pytest.raises(CertificateError):
        derive_certificate_wf(cycle3, a, b, v.trace)


def _walk(cert):
    yield cert
    if isinstance(cert, Trans):
        yield from _walk(cert.left)
        yield from _walk(cert.right)
    elif isinstance(cert, Disj):
        for part in cert.parts:
            yield from _walk(part)


def test_single_leaf_inclusion_accepted(mono3):
    a = xs(mono3, 1)
    cert = Basic(a, xs(mono3, 1, 2), "mp")
    assert check_certificate(mono3, cert, (a, xs(mono3, 1, 2)), "mp")


def test_checker_rejects_mismatches(mono3):
    a, b = xs(mono3, 0), xs(mono3, 2)
    cert = derive_certificate_mp(mono3, a, b, leadsto_mp(mono3, a, b).trace)
    # claim with a different target set
    assert not check_certificate(mono3, cert, (a, xs(mono3, 1)), "mp")
    # claim under the wrong assumption
    assert not check_certificate(mono3, cert, (a, b), "wf")
    # broken transitivity composition
    bad = Trans(Basic(a, b, "mp"), Basic(xs(mono3, 1), b, "mp"))
    assert not check_certificate(mono3, bad, (a, b), "mp")
    # empty disjunction
    assert not check_certificate(mono3, Disj((), b), (a, b), "mp")


def test_json_round_trip(idle, mono3):
    for sys_, assumption in ((mono3, "mp"), (idle, "wf")):
        a = xs(sys_, 0)
        b = xs(sys_, 2) if assumption == "mp" else xs(sys_, 1)
        trace = (leadsto_mp if assumption == "mp" else leadsto_wf)(sys_, a, b).trace
        derive = derive_certificate_mp if assumption == "mp" else derive_certificate_wf
        cert = derive(sys_, a, b, trace)
        data = cert_to_json(cert)
        assert data["schema"] == 1
        assert data["rule"] in ("SBR", "STR", "SDR")
        back = cert_from_json(sys_.space, data)
        assert check_certificate(sys_, back, (a, b), assumption)
        assert cert_to_json(back) == data


def test_unknown_schema_rejected(mono3):
    with pytest.raises(CertificateError):
        cert_from_json(mono3.space, {"schema": 99, "rule": "SBR"})
    with pytest.raises(CertificateError):
        cert_from_json(mono3.space, {"schema": 1, "rule": "XYZ"})


def _mutate_leaf(space, cert, target, grow_p):
    """Rebuild the tree with one leaf's p enlarged or q shrunk by one state."""
    if isinstance(cert, Basic):
        if cert is target:
            if grow_p is not None:
                return Basic(cert.p | grow_p, cert.q, cert.assumption, cert.helpful)
            drop = next(iter(cert.q), None)
            if drop is None:
                return cert
            return Basic(cert.p, cert.q - space.from_indices([drop]),
                         cert.assumption, cert.helpful)
        return cert
    if isinstance(cert, Trans):
        return Trans(_mutate_leaf(space, cert.left, target, grow_p),
                     _mutate_leaf(space, cert.right, target, grow_p))
    return Disj(tuple(_mutate_leaf(space, p, target, grow_p) for p in cert.parts),
                cert.q)


def test_mutations_never_crash_and_usually_reject(mono3, idle):
    """Acceptance-style mutation check on the two fixture certificates."""
    from fixleads.certificates import _leaf_ok

    for sys_, assumption in ((mono3, "mp"), (idle, "wf")):
        a = xs(sys_, 0)
        b = xs(sys_, 2) if assumption == "mp" else xs(sys_, 1)
        trace = (leadsto_mp if assumption == "mp" else leadsto_wf)(sys_, a, b).trace
        derive = derive_certificate_mp if assumption == "mp" else derive_certificate_wf
        cert = derive(sys_, a, b, trace)
        for leaf in _leaves(cert):
            for idx in sys_.space.universe():
                extra = sys_.space.from_indices([idx])
                mutated = _mutate_leaf(sys_.space, cert, leaf, extra)
                ok = check_certificate(sys_, mutated, (a, b), assumption)
                if ok:
                    # acceptance may survive only if every leaf still ensures
                    for m_leaf in _leaves(mutated):
                        assert _leaf_ok(sys_, m_leaf)
