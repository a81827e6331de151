"""Built-in verification battery, stored as problem-file text."""
from __future__ import annotations

from .problem import ProblemFile, parse_problem


def _a_series(k: int) -> str:
    """``w = x^{k+1}`` with every Koszul factorization ``koszul(x^a, x^{k+1-a})``."""
    lines = [f"name A{k}", "ring x", f"w = x^{k + 1}"]
    lines += [f"mf K{a} = koszul(x^{a}, x^{k + 1 - a})" for a in range(1, k + 1)]
    lines += ["mf S1 = shift(K1)", "verify K1 K1"]
    if k >= 2:
        lines += [f"verify K1 K{k}", "verify K2 S1"]
    return "\n".join(lines)


_PROBLEMS = [
    _a_series(1),
    _a_series(2),
    _a_series(3),
    _a_series(4),
    _a_series(5),
    """
    name A1 contractible summand
    ring x
    w = x^2
    mf P = koszul(x, x)
    mf C = koszul(1, x^2)
    mf PC = sum(P, C)
    verify PC P
    verify C P
    """,
    """
    name xy
    ring x, y
    w = x*y
    mf K = koszul(x, y)
    mf L = koszul(y, x)
    mf KK = sum(K, K)
    verify K K
    verify K L
    mf S = shift(K)
    verify KK S
    """,
    """
    name Fermat cubic, two variables
    ring x, y
    w = x^3 + y^3
    mf F = koszul(x + y, x^2 - x*y + y^2)
    mf T = tensor(koszul(x, x^2), koszul(y, y^2))
    mf S = shift(F)
    mf FF = sum(F, F)
    verify F F
    verify F T
    verify T T
    verify F S
    verify FF F
    """,
    """
    name Fermat cubic, three variables
    ring x, y, z
    w = x^3 + y^3 + z^3
    mf T = tensor(tensor(koszul(x, x^2), koszul(y, y^2)), koszul(z, z^2))
    mf G = tensor(koszul(x + y, x^2 - x*y + y^2), koszul(z, z^2))
    verify T T
    verify G T
    """,
    """
    name D4
    ring x, y
    w = x^3 + x*y^2
    mf E = explicit{d1=[[x, y], [-x*y, x^2]], d0=[[x^2, -y], [x*y, x]]}
    mf R = koszul(x, x^2 + y^2)
    verify E E
    verify R R
    verify R E
    """,
    """
    name Knoerrer x^2 + y^2
    ring x, y
    w = x^2 + y^2
    mf T = tensor(koszul(x, x), koszul(y, y))
    verify T T
    """,
    """
    name Knoerrer x^2 + y^2 + z^2
    ring x, y, z
    w = x^2 + y^2 + z^2
    mf T = tensor(tensor(koszul(x, x), koszul(y, y)), koszul(z, z))
    verify T T
    """,
    """
    name Knoerrer x^3 + y*z
    ring x, y, z
    w = x^3 + y*z
    mf T = tensor(koszul(x, x^2), koszul(y, z))
    verify T T
    """,
    # Cardy cases with closed endomorphisms other than the identity.
    """
    name A3 odd classes
    ring x
    w = x^4
    mf P = koszul(x^2, x^2)
    endo a of P = [[0, 1], [-1, 0]]
    cardy a a
    """,
    """
    name A5 odd classes
    ring x
    w = x^6
    mf P = koszul(x^2, x^4)
    mf Q = koszul(x^4, x^2)
    endo a of P = [[0, 1], [-x^2, 0]]
    mf M = koszul(x^3, x^3)
    endo b of Q = [[0, x^2], [-1, 0]]
    endo c of M = [[0, 1], [-1, 0]]
    cardy a b
    cardy b a
    cardy c c
    """,
    """
    name A4 odd classes
    ring x
    w = x^5
    mf P = koszul(x^2, x^3)
    mf Q = koszul(x^3, x^2)
    endo a of P = [[0, 1], [-x, 0]]
    endo b of Q = [[0, x], [-1, 0]]
    cardy a b
    """,
    """
    name A2 odd class
    ring x
    w = x^3
    mf P = koszul(x, x^2)
    endo a of P = [[0, 1], [-x, 0]]
    endo b of P = [[0, x], [-x^2, 0]]
    cardy a a
    cardy a b
    """,
    """
    name D4 summand projectors
    ring x, y
    w = x^3 + x*y^2
    mf E = explicit{d1=[[x, y], [-x*y, x^2]], d0=[[x^2, -y], [x*y, x]]}
    mf R = koszul(x, x^2 + y^2)
    mf M = sum(R, E)
    endo pR of M = [[1,0,0,0,0,0],[0,0,0,0,0,0],[0,0,0,0,0,0],[0,0,0,1,0,0],[0,0,0,0,0,0],[0,0,0,0,0,0]]
    endo pE of M = [[0,0,0,0,0,0],[0,1,0,0,0,0],[0,0,1,0,0,0],[0,0,0,0,0,0],[0,0,0,0,1,0],[0,0,0,0,0,1]]
    cardy pR pR
    cardy pR pE
    """,
    """
    name Fermat cubic summand projectors
    ring x, y
    w = x^3 + y^3
    mf F = koszul(x + y, x^2 - x*y + y^2)
    mf S = shift(F)
    mf M = sum(F, S)
    endo p of M = [[1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 0]]
    endo q of M = [[0, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 1]]
    endo x1 of F = [[x, 0], [0, x]]
    endo y1 of F = [[y, 0], [0, y]]
    cardy p q
    cardy p p
    cardy x1 y1
    """,
]


def builtin_battery() -> list[ProblemFile]:
    return [parse_problem(text) for text in _PROBLEMS]


def battery_texts() -> list[str]:
    return list(_PROBLEMS)
