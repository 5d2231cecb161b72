"""Symbolic Christoffel symbols and Riemann tensors for catalog metrics.

Writes geometry_reference.hpp with values at fixed chart points, using
  Gamma^l_{mn} = 1/2 g^{lk} (d_m g_{nk} + d_n g_{mk} - d_k g_{mn})
  R^k_{lmn}    = d_m Gamma^k_{nl} - d_n Gamma^k_{ml}
                 + Gamma^k_{me} Gamma^e_{nl} - Gamma^k_{ne} Gamma^e_{ml}
"""
import sympy as sp

X = sp.symbols("x0:4")
ETA = sp.diag(1, -1, -1, -1)


def flrw(a0=1, k=sp.Rational(1, 10)):
    a = a0 + k * X[0]
    return sp.diag(1, -a**2, -a**2, -a**2)


def conformal(w=sp.Rational(1, 5)):
    phi = X[0]**2 / 2 - sp.Rational(3, 10) * X[1] * X[2] + sp.Rational(1, 5) * X[3] + sp.Rational(1, 10) * X[0] * X[3]
    return sp.exp(2 * w * phi) * ETA


def christoffel(g):
    gi = g.inv()
    return [[[sp.simplify(sum(gi[l, k] * (sp.diff(g[n, k], X[m]) + sp.diff(g[m, k], X[n]) - sp.diff(g[m, n], X[k]))
                              for k in range(4)) / 2)
              for n in range(4)] for m in range(4)] for l in range(4)]


def riemann(gam):
    return [[[[sp.diff(gam[k][n][l], X[m]) - sp.diff(gam[k][m][l], X[n])
               + sum(gam[k][m][e] * gam[e][n][l] - gam[k][n][e] * gam[e][m][l] for e in range(4))
               for n in range(4)] for m in range(4)] for l in range(4)] for k in range(4)]


def flat(values, point):
    sub = dict(zip(X, point))
    return [float(sp.N(v.subs(sub), 30)) for v in values]


def emit(name, g, points, out):
    gam = christoffel(g)
    rie = riemann(gam)
    gam_list = [gam[l][m][n] for l in range(4) for m in range(4) for n in range(4)]
    rie_list = [rie[k][l][m][n] for k in range(4) for l in range(4) for m in range(4) for n in range(4)]
    for tag, p in points:
        out.append(f"// {name} at x = {tuple(float(c) for c in p)}")
        out.append(f"inline constexpr double k{name}Point{tag}[4] = {{{', '.join(repr(float(c)) for c in p)}}};")
        out.append(f"inline constexpr double k{name}Christoffel{tag}[64] = {{")
        out.append(",\n".join("    " + repr(v) for v in flat(gam_list, p)) + "};")
        out.append(f"inline constexpr double k{name}Riemann{tag}[256] = {{")
        out.append(",\n".join("    " + repr(v) for v in flat(rie_list, p)) + "};")


if __name__ == "__main__":
    out = ["#pragma once", "", "// Generated by geometry_oracle.py. Layouts: Gamma[l][m][n], R[k][l][m][n].", "",
           "namespace tdirac::reference {", ""]
    emit("Flrw", flrw(), [("A", (0, 0, 0, 0)), ("B", (sp.Rational(1, 2), sp.Rational(-3, 10), sp.Rational(1, 5), 0)),
                          ("C", (sp.Rational(-7, 10), 0, 0, sp.Rational(1, 2)))], out)
    emit("Conformal", conformal(), [("A", (sp.Rational(3, 10), sp.Rational(-1, 5), sp.Rational(2, 5), sp.Rational(1, 10)))], out)
    out += ["", "}  // namespace tdirac::reference", ""]
    with open("geometry_reference.hpp", "w") as f:
        f.write("\n".join(out))
