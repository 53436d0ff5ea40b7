import math
import numpy as np

from needleperc import geometry, formulas
from needleperc.formulas import ThreeStateParams, h_units, _two_group_delta, _group_excess
from needleperc.geometry import DirPair

def mk(a_ratio, b_ratio, alpha=0.7, beta=2.0, r0=0.3, probs=(1/3, 1/3, 1/3)):
    sg = math.sin(beta - alpha)
    sb = math.sin(beta)
    sa = math.sin(alpha)
    h0 = r0 / sg
    return ThreeStateParams(alpha, beta, r0, a_ratio * h0 * sb, b_ratio * h0 * sa, *probs)

P = mk(3.0, 1.2)
hu = h_units(P)
dirs = P.dirs
sa, sb, sg = math.sin(P.alpha), math.sin(P.beta), math.sin(dirs.gap)

def from_h(ha_val, hb_val):
    cb_, ca_ = math.cos(P.beta), math.cos(P.alpha)
    A = np.array([[1/sg, -cb_/(sb*sg)], [-1/sg, ca_/(sa*sg)]])
    x = np.linalg.solve(A, np.array([ha_val, hb_val]))
    return (float(x[0]), float(x[1]))

def probe(tag, ca, cb):
    exact = _two_group_delta(ca, cb, (0.0, 0.0), P, hu)
    exc_a = _group_excess(DirPair(0.0, P.alpha), P.r0, P.r_alpha - 0.5*hu.h_beta*sb, ca)
    exc_b = _group_excess(DirPair(0.0, P.beta), 0.5*hu.h_beta*sg, 0.5*P.r_beta, cb)
    core = (exc_a + exc_b) / hu.c
    print(f"{tag}: exact={exact:.8f} core={core:.8f} diff={exact-core:+.3e}")
    return exact, core

# scaling test: single free point in group A along h_alpha only
print("== A-group point along h_alpha (hb=0) ==")
for t in (0.04, 0.02, 0.01, 0.005):
    ca = [from_h(t*hu.h0, 0.0), (0.0, 0.0)]
    e, c = probe(f"t={t}", ca, [(0.0, 0.0)])
print("== A-group point along h_beta only ==")
for t in (0.04, 0.02, 0.01, 0.005):
    ca = [from_h(0.0, t*hu.h0), (0.0, 0.0)]
    e, c = probe(f"t={t}", ca, [(0.0, 0.0)])
    print(f"    Mb(x)^2 = {(t*hu.h0)**2:.3e}, half = {0.5*(t*hu.h0)**2:.3e}")
print("== B-group point along h_alpha only ==")
for t in (0.04, 0.02, 0.01, 0.005):
    cb = [from_h(t*hu.h0, 0.0), (0.0, 0.0)]
    e, c = probe(f"t={t}", [(0.0, 0.0)], cb)
    print(f"    Ma(y)^2 = {(t*hu.h0)**2:.3e}, half = {0.5*(t*hu.h0)**2:.3e}")
print("== B-group point along h_beta only ==")
for t in (0.04, 0.02, 0.01, 0.005):
    cb = [from_h(0.0, t*hu.h0), (0.0, 0.0)]
    e, c = probe(f"t={t}", [(0.0, 0.0)], cb)
print("== B-group point along h_beta NEGATIVE ==")
for t in (0.04, 0.02, 0.01):
    cb = [from_h(0.0, -t*hu.h0), (0.0, 0.0)]
    e, c = probe(f"t={t}", [(0.0, 0.0)], cb)
print("== A-group point along h_alpha NEGATIVE ==")
for t in (0.04, 0.02):
    ca = [from_h(-t*hu.h0, 0.0), (0.0, 0.0)]
    e, c = probe(f"t={t}", ca, [(0.0, 0.0)])
