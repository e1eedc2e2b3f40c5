"""Exact ||.||_h and ||.||_{h,*} of P1 hat functions on the d=1, n=2 Kuhn mesh.

State test function v: hat at (x, t) = (1/2, 1); adjoint test function q: hat at (1/2, 0).
Every triangle has diameter sqrt(2)/2, so lambda_K = theta / 2 everywhere.
Prints values frozen into test_estimate.cpp.
"""
from fractions import Fraction as F
import sympy as sp

x, t = sp.symbols("x t")
h = F(1, 2)
varrho = F(1, 2)
lam = F(1, 10) * F(1, 2)  # theta = 0.1, h_K^2 = 1/2

triangles = []
for i in range(2):
    for j in range(2):
        a = (i * h, j * h)
        b = ((i + 1) * h, j * h)
        c = ((i + 1) * h, (j + 1) * h)
        d = (i * h, (j + 1) * h)
        triangles += [(a, b, c), (a, d, c)]


def hat_on(tri, node):
    """Linear function equal to 1 at `node`, 0 at the other vertices; None if node is not a vertex."""
    if node not in tri:
        return None
    cx, ct, c0 = sp.symbols("cx ct c0")
    f = cx * x + ct * t + c0
    eqs = [f.subs({x: sp.Rational(p[0]), t: sp.Rational(p[1])}) - (1 if p == node else 0) for p in tri]
    return f.subs(sp.solve(eqs, [cx, ct, c0]))


def integrate_triangle(expr, tri):
    (x0, t0), (x1, t1), (x2, t2) = [(sp.Rational(p[0]), sp.Rational(p[1])) for p in tri]
    s, r = sp.symbols("s r")
    X = x0 + s * (x1 - x0) + r * (x2 - x0)
    T = t0 + s * (t1 - t0) + r * (t2 - t0)
    jac = abs((x1 - x0) * (t2 - t0) - (x2 - x0) * (t1 - t0))
    g = expr.subs({x: X, t: T}, simultaneous=True)
    return sp.integrate(sp.integrate(g * jac, (r, 0, 1 - s)), (s, 0, 1))


def volume_terms(node):
    grad = dt = l2 = sp.Integer(0)
    for tri in triangles:
        f = hat_on(tri, node)
        if f is None:
            continue
        grad += integrate_triangle(sp.diff(f, x) ** 2, tri)
        dt += integrate_triangle(sp.diff(f, t) ** 2, tri)
        l2 += integrate_triangle(f ** 2, tri)
    return grad, dt, l2


def trace(node, time):
    # hat restricted to the line t = time: 1D hat of width h around x = 1/2
    return sp.integrate((1 - abs(x - sp.Rational(1, 2)) / sp.Rational(h)) ** 2, (x, 0, 1))


v_node = (F(1, 2), F(1))
q_node = (F(1, 2), F(0))
vg, vt, vl = volume_terms(v_node)
qg, qt, ql = volume_terms(q_node)
terms = [
    varrho * trace(v_node, 1),
    varrho * vg,
    varrho * lam * vt,
    trace(q_node, 0),
    qg,
    lam * qt,
]
terms = [sp.nsimplify(s) for s in terms]
norm2 = sum(terms)
star2 = norm2 + ((varrho + 1) / lam + lam) * vl + (2 / lam + lam) * ql
print("terms", [str(s) for s in terms])
print("norm_h^2 =", norm2, "=", sp.N(norm2, 17))
print("norm_h   =", sp.N(sp.sqrt(norm2), 17))
print("star^2   =", sp.nsimplify(star2), "=", sp.N(star2, 17))
print("star     =", sp.N(sp.sqrt(star2), 17))
