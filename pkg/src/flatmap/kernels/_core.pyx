# cython: language_level=3
# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend: tape evaluation and adaptive segment quadrature.

Semantics are identical to the fallback in pure.py; see that module for the
contract.  Complex arithmetic is spelled out on (re, im) doubles with the
same formulas CPython uses (naive multiply, Smith's division), so the two
backends agree to the last few ulps.
"""

import numpy as np

from .tape import PanelLimitError, TapeEvalError
from . import tape as _t

name = "compiled"

cdef extern from "math.h" nogil:
    double exp(double)
    double sin(double)
    double cos(double)
    double sinh(double)
    double cosh(double)
    double fabs(double)
    double hypot(double, double)
    bint isfinite(double)

cdef enum:
    OP_LIT = 0
    OP_VAR = 1
    OP_ADD = 2
    OP_SUB = 3
    OP_MUL = 4
    OP_DIV = 5
    OP_POW = 6
    OP_NEG = 7
    OP_EXP = 8
    OP_SIN = 9
    OP_COS = 10

cdef enum:
    ERR_DIV_ZERO = 1
    ERR_NONFINITE = 2

# opcode values are shared with tape.py; fail loudly if they ever drift
assert OP_LIT == _t.OP_LIT and OP_VAR == _t.OP_VAR and OP_ADD == _t.OP_ADD
assert OP_SUB == _t.OP_SUB and OP_MUL == _t.OP_MUL and OP_DIV == _t.OP_DIV
assert OP_POW == _t.OP_POW and OP_NEG == _t.OP_NEG and OP_EXP == _t.OP_EXP
assert OP_SIN == _t.OP_SIN and OP_COS == _t.OP_COS
assert ERR_DIV_ZERO == _t.ERR_DIV_ZERO and ERR_NONFINITE == _t.ERR_NONFINITE

cdef double[7] _X7 = [
    -0.9491079123427585245262, -0.7415311855993944398639,
    -0.4058451513773971669066, 0.0,
    0.4058451513773971669066, 0.7415311855993944398639,
    0.9491079123427585245262]
cdef double[7] _W7 = [
    0.1294849661688696932706, 0.2797053914892766679015,
    0.3818300505051189449504, 0.4179591836734693877551,
    0.3818300505051189449504, 0.2797053914892766679015,
    0.1294849661688696932706]
cdef double[15] _X15 = [
    -0.9879925180204854284896, -0.9372733924007059043078,
    -0.8482065834104272162006, -0.7244177313601700474162,
    -0.5709721726085388475372, -0.3941513470775633698972,
    -0.2011940939974345223006, 0.0,
    0.2011940939974345223006, 0.3941513470775633698972,
    0.5709721726085388475372, 0.7244177313601700474162,
    0.8482065834104272162006, 0.9372733924007059043078,
    0.9879925180204854284896]
cdef double[15] _W15 = [
    0.03075324199611726835463, 0.07036604748810812470927,
    0.1071592204671719350119, 0.1395706779261543144478,
    0.1662692058169939335532, 0.1861610000155622110268,
    0.1984314853271115764561, 0.2025782419255612728806,
    0.1984314853271115764561, 0.1861610000155622110268,
    0.1662692058169939335532, 0.1395706779261543144478,
    0.1071592204671719350119, 0.07036604748810812470927,
    0.03075324199611726835463]


def gauss_tables():
    """Node/weight tables, exported so tests can check them against nodes.py."""
    return ([_X7[i] for i in range(7)], [_W7[i] for i in range(7)],
            [_X15[i] for i in range(15)], [_W15[i] for i in range(15)])


cdef int _eval(const int* ops, const int* a0, const int* a1,
               const double* lre, const double* lim, int n,
               double zre, double zim,
               double* rre, double* rim,
               double* out_re, double* out_im, int* err_slot) nogil:
    cdef int k, op, e
    cdef double ar, ai, br, bi, vr, vi, m, ratio, den, tr
    for k in range(n):
        op = ops[k]
        if op == OP_VAR:
            vr = zre
            vi = zim
        elif op == OP_LIT:
            vr = lre[k]
            vi = lim[k]
        elif op == OP_ADD:
            vr = rre[a0[k]] + rre[a1[k]]
            vi = rim[a0[k]] + rim[a1[k]]
        elif op == OP_SUB:
            vr = rre[a0[k]] - rre[a1[k]]
            vi = rim[a0[k]] - rim[a1[k]]
        elif op == OP_MUL:
            ar = rre[a0[k]]
            ai = rim[a0[k]]
            br = rre[a1[k]]
            bi = rim[a1[k]]
            vr = ar * br - ai * bi
            vi = ar * bi + ai * br
        elif op == OP_DIV:
            ar = rre[a0[k]]
            ai = rim[a0[k]]
            br = rre[a1[k]]
            bi = rim[a1[k]]
            if br == 0.0 and bi == 0.0:
                err_slot[0] = k
                return ERR_DIV_ZERO
            if fabs(br) >= fabs(bi):
                ratio = bi / br
                den = br + bi * ratio
                vr = (ar + ai * ratio) / den
                vi = (ai - ar * ratio) / den
            else:
                ratio = br / bi
                den = br * ratio + bi
                vr = (ar * ratio + ai) / den
                vi = (ai * ratio - ar) / den
        elif op == OP_POW:
            br = rre[a0[k]]
            bi = rim[a0[k]]
            vr = 1.0
            vi = 0.0
            e = a1[k]
            while e:
                if e & 1:
                    tr = vr * br - vi * bi
                    vi = vr * bi + vi * br
                    vr = tr
                e >>= 1
                if e:
                    tr = br * br - bi * bi
                    bi = br * bi + bi * br
                    br = tr
        elif op == OP_NEG:
            vr = -rre[a0[k]]
            vi = -rim[a0[k]]
        elif op == OP_EXP:
            m = exp(rre[a0[k]])
            vr = m * cos(rim[a0[k]])
            vi = m * sin(rim[a0[k]])
        elif op == OP_SIN:
            ar = rre[a0[k]]
            ai = rim[a0[k]]
            vr = sin(ar) * cosh(ai)
            vi = cos(ar) * sinh(ai)
        else:
            ar = rre[a0[k]]
            ai = rim[a0[k]]
            vr = cos(ar) * cosh(ai)
            vi = -sin(ar) * sinh(ai)
        if not (isfinite(vr) and isfinite(vi)):
            err_slot[0] = k
            return ERR_NONFINITE
        rre[k] = vr
        rim[k] = vi
    out_re[0] = rre[n - 1]
    out_im[0] = rim[n - 1]
    return 0


cdef class _TapeView:
    """C-contiguous views of a Tape's arrays plus scratch registers."""
    cdef const int[::1] ops
    cdef const int[::1] arg0
    cdef const int[::1] arg1
    cdef const double[::1] lre
    cdef const double[::1] lim
    cdef double[::1] sre
    cdef double[::1] sim
    cdef int n

    def __init__(self, tape):
        self.ops = np.ascontiguousarray(tape.ops, dtype=np.int32)
        self.arg0 = np.ascontiguousarray(tape.arg0, dtype=np.int32)
        self.arg1 = np.ascontiguousarray(tape.arg1, dtype=np.int32)
        self.lre = np.ascontiguousarray(tape.lit_re, dtype=np.float64)
        self.lim = np.ascontiguousarray(tape.lit_im, dtype=np.float64)
        self.n = self.ops.shape[0]
        self.sre = np.empty(self.n, dtype=np.float64)
        self.sim = np.empty(self.n, dtype=np.float64)


def eval_tape(tape, z):
    """Single-point tape evaluation; raises TapeEvalError on bad arithmetic."""
    cdef _TapeView tv = _TapeView(tape)
    cdef double zre = z.real, zim = z.imag
    cdef double out_re = 0.0, out_im = 0.0
    cdef int err_slot = -1
    cdef int status
    with nogil:
        status = _eval(&tv.ops[0], &tv.arg0[0], &tv.arg1[0],
                       &tv.lre[0], &tv.lim[0], tv.n, zre, zim,
                       &tv.sre[0], &tv.sim[0], &out_re, &out_im, &err_slot)
    if status != 0:
        raise TapeEvalError(status, err_slot)
    return complex(out_re, out_im)


cdef int _panel(_TapeView tv, double z0re, double z0im, double dre, double dim,
                double a, double b,
                double* i15re, double* i15im, double* i7re, double* i7im,
                int* err_slot) nogil:
    cdef double c = 0.5 * (a + b)
    cdef double h = 0.5 * (b - a)
    cdef double acc15r = 0.0, acc15i = 0.0, acc7r = 0.0, acc7i = 0.0
    cdef double t, xre, xim, wr, wi, m, vr, vi
    cdef int i, status
    for i in range(15):
        t = c + h * _X15[i]
        xre = z0re + t * dre
        xim = z0im + t * dim
        status = _eval(&tv.ops[0], &tv.arg0[0], &tv.arg1[0],
                       &tv.lre[0], &tv.lim[0], tv.n, xre, xim,
                       &tv.sre[0], &tv.sim[0], &wr, &wi, err_slot)
        if status != 0:
            return status
        m = exp(wr)
        vr = m * cos(wi)
        vi = m * sin(wi)
        if not (isfinite(vr) and isfinite(vi)):
            err_slot[0] = -1
            return ERR_NONFINITE
        acc15r += _W15[i] * vr
        acc15i += _W15[i] * vi
    for i in range(7):
        t = c + h * _X7[i]
        xre = z0re + t * dre
        xim = z0im + t * dim
        status = _eval(&tv.ops[0], &tv.arg0[0], &tv.arg1[0],
                       &tv.lre[0], &tv.lim[0], tv.n, xre, xim,
                       &tv.sre[0], &tv.sim[0], &wr, &wi, err_slot)
        if status != 0:
            return status
        m = exp(wr)
        vr = m * cos(wi)
        vi = m * sin(wi)
        if not (isfinite(vr) and isfinite(vi)):
            err_slot[0] = -1
            return ERR_NONFINITE
        acc7r += _W7[i] * vr
        acc7i += _W7[i] * vi
    i15re[0] = h * acc15r
    i15im[0] = h * acc15i
    i7re[0] = h * acc7r
    i7im[0] = h * acc7i
    return 0


def integrate_segment_exp(tape, z0, z1, double rel_tol, double abs_tol,
                          int max_panels):
    """Adaptive ∫ exp(f) over the straight segment z0 -> z1 (see pure.py)."""
    cdef _TapeView tv = _TapeView(tape)
    cdef double z0re = z0.real, z0im = z0.imag
    cdef double dre = z1.real - z0re, dim = z1.imag - z0im
    if dre == 0.0 and dim == 0.0:
        return 0j, 0.0, 0
    cdef double abs_d = hypot(dre, dim)
    cdef double sa[256]
    cdef double sb[256]
    cdef int sp = 1
    cdef double totr = 0.0, toti = 0.0, err_sum = 0.0
    cdef double tol = -1.0
    cdef int panels = 0
    cdef bint exhausted = False
    cdef double a, b, mid, err
    cdef double i15r = 0.0, i15i = 0.0, i7r = 0.0, i7i = 0.0
    cdef int err_slot = -1
    cdef int status = 0
    sa[0] = 0.0
    sb[0] = 1.0
    with nogil:
        while sp > 0:
            sp -= 1
            a = sa[sp]
            b = sb[sp]
            status = _panel(tv, z0re, z0im, dre, dim, a, b,
                            &i15r, &i15i, &i7r, &i7i, &err_slot)
            if status != 0:
                break
            panels += 1
            if tol < 0.0:
                err = hypot(i15r, i15i) * abs_d  # |first estimate|
                tol = abs_tol if abs_tol > rel_tol * err else rel_tol * err
            err = hypot(i15r - i7r, i15i - i7i) * abs_d
            if err <= tol * (b - a) or exhausted:
                totr += i15r
                toti += i15i
                err_sum += err
            elif panels >= max_panels or sp >= 254:
                exhausted = True
                totr += i15r
                toti += i15i
                err_sum += err
            else:
                mid = 0.5 * (a + b)
                sa[sp] = mid
                sb[sp] = b
                sp += 1
                sa[sp] = a
                sb[sp] = mid
                sp += 1
    if status != 0:
        raise TapeEvalError(status, err_slot)
    value = complex(dre * totr - dim * toti, dre * toti + dim * totr)
    if exhausted:
        raise PanelLimitError(value, err_sum, panels)
    return value, err_sum, panels
