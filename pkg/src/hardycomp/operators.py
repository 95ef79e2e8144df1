"""Finite sections of composition, multiplication and transformation operators.

All sections are written in the orthonormal basis e_n = z**n / beta_n of
H^2_beta, so entry (i, j) of an operator with monomial-basis matrix P is
P[i, j] * beta_i / beta_j.  The ratio is formed by division, which keeps
diagonal scalings exactly 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import flint
import numpy as np
import scipy.linalg

from .exact import GaussianRational, mul_low_pair, to_flint
from .matrix import OperatorMatrix, exact_zeros
from .series import (
    TruncatedSeries,
    blaschke_taylor,
    mobius_taylor,
    polynomial,
    sup_on_disk,
)
from .weights import WeightSequence, diagonal_entries, dirichlet, dn1, growth_order, hardy, tilde_lift

SYMBOL_TOL = 1e-9
DENSE_LIMIT = 512
# composition sections have clustered top singular values, where power
# iteration stalls; dense SVD stays cheaper well past 512
AUTO_DENSE_LIMIT = 4096
POWER_TOL = 1e-10
POWER_MAXITER = 10_000


def _ratio(row_b: np.ndarray, col_s: np.ndarray) -> np.ndarray:
    return row_b[:, None] / col_s[None, :]


def _power_columns(g: TruncatedSeries, n: int, cols: int) -> np.ndarray:
    """Monomial coefficients of g**j (rows 0..n-1) for j < cols."""
    gc = g.truncate(n - 1).to_numpy()
    out = np.zeros((n, cols), dtype=complex)
    p = np.zeros(n, dtype=complex)
    p[0] = 1.0
    for j in range(cols):
        out[:, j] = p
        if j + 1 < cols:
            p = np.convolve(p, gc)[:n]
    return out


def _exact_power_columns(g: TruncatedSeries, n: int, cols: int) -> list:
    gp = to_flint(g.coeffs[:n])
    p = (flint.fmpq_poly([1]), flint.fmpq_poly())
    out = []
    for j in range(cols):
        out.append(p)
        if j + 1 < cols:
            p = mul_low_pair(p, gp, n)
    return out


def _pair_to_column(p, n: int) -> list:
    re, im = p[0].coeffs(), p[1].coeffs()
    col = []
    for k in range(n):
        a = Fraction(int(re[k].p), int(re[k].q)) if k < len(re) else Fraction(0)
        b = Fraction(int(im[k].p), int(im[k].q)) if k < len(im) else Fraction(0)
        col.append(GaussianRational(a, b))
    return col


def check_symbol(g: TruncatedSeries, tol: float = SYMBOL_TOL) -> float:
    s = sup_on_disk(g)
    if s > 1 + tol:
        raise ValueError(f"symbol does not map the disk into its closure: sup |g| ~ {s:.6g}")
    return s


def composition_section(
    g: TruncatedSeries, w: WeightSequence, n: int, cols: int | None = None, check: bool = True
) -> OperatorMatrix:
    """N x cols block of C_g: entry (i, j) = beta_i [z^i] g^j / beta_j.

    Exact symbols on exactly-weighted spaces give exact object entries.
    """
    cols = n if cols is None else cols
    if check:
        check_symbol(g)
    meta = {"kind": "composition", "weights": w.label, "N": n}
    if g.exact and w.has_exact:
        A = exact_zeros(n, cols)
        beta = [w.exact_beta(k) for k in range(max(n, cols))]
        for j, p in enumerate(_exact_power_columns(g, n, cols)):
            for i, v in enumerate(_pair_to_column(p, n)):
                if not v.is_zero():
                    A[i, j] = v * (beta[i] / beta[j])
        return OperatorMatrix(A, w.label, meta)
    b = w.betas(max(n, cols))
    P = _power_columns(g, n, cols)
    return OperatorMatrix(P * _ratio(b[:n], b[:cols]), w.label, meta)


def multiplication_section(g: TruncatedSeries, w: WeightSequence, n: int) -> OperatorMatrix:
    """Lower-triangular section of M_g: entry (i, j) = beta_i g_(i-j) / beta_j."""
    c = g.truncate(n - 1).to_numpy()
    T = scipy.linalg.toeplitz(c, np.zeros(n, dtype=complex))
    b = w.betas(n)
    return OperatorMatrix(T * _ratio(b, b), w.label, {"kind": "multiplication", "weights": w.label, "N": n})


def transformation_section(
    F: Sequence[TruncatedSeries], w: WeightSequence, n: int, col_scale: np.ndarray | None = None
) -> OperatorMatrix:
    """Columns are the functions of F in the e_n basis.

    Column j is divided by ``col_scale[j]`` (default beta_j), so the list
    {g**j} reproduces ``composition_section``.
    """
    X = _monomial_columns(F, n)
    b = w.betas(max(n, len(F)))
    s = b[: len(F)] if col_scale is None else np.asarray(col_scale, dtype=float)
    if s.shape != (len(F),):
        raise ValueError("col_scale must have one entry per function")
    return OperatorMatrix(X * _ratio(b[:n], s), w.label, {"kind": "transformation", "weights": w.label, "N": n})


def _monomial_columns(F: Sequence[TruncatedSeries], n: int) -> np.ndarray:
    X = np.zeros((n, len(F)), dtype=complex)
    for j, f in enumerate(F):
        if f.degree + 1 < n:
            raise ValueError(f"function {j} has {f.degree + 1} coefficients, need {n}")
        X[:, j] = f.to_numpy()[:n]
    return X


def gram_section(F: Sequence[TruncatedSeries], w: WeightSequence, n: int) -> OperatorMatrix:
    """Entry (i, j) = <f_j, f_i> = sum_k beta_k^2 f_j(k) conj(f_i(k)) over k < n."""
    X = _monomial_columns(F, n)
    b2 = w.betas(n) ** 2
    G = X.conj().T @ (b2[:, None] * X)
    return OperatorMatrix(G, w.label, {"kind": "gram", "weights": w.label, "N": n})


# -- D_tm ---------------------------------------------------------------------


def dtm_block(w_n: float, z0: complex) -> np.ndarray:
    z0 = complex(z0)
    return np.array([[1.0, np.conj(z0) / w_n], [w_n * z0, 1.0]], dtype=complex)


def dtm_section(w: WeightSequence, z0: complex, n: int) -> OperatorMatrix:
    """Block diagonal of D_1, ..., D_{n/2} with D_k = [[1, conj(z0)/w_k], [w_k z0, 1]]."""
    if abs(complex(z0)) >= 1:
        raise ValueError("|z0| must be < 1")
    if n % 2:
        raise ValueError("D_tm sections need even size")
    ws = w.weights(n // 2)
    A = np.zeros((n, n), dtype=complex)
    for k in range(n // 2):
        A[2 * k : 2 * k + 2, 2 * k : 2 * k + 2] = dtm_block(ws[k], z0)
    return OperatorMatrix(A, "pairs", {"kind": "D_tm", "weights": w.label, "z0": complex(z0), "N": n})


def dn_block_eigs(w_n: float, z0: complex) -> tuple[float, float]:
    """Eigenvalues (larger, smaller) of D_n^* D_n from its trace and determinant.

    trace = 2 + (w^2 + w^-2)|z0|^2 and det = (1 - |z0|^2)^2.
    """
    a2 = abs(complex(z0)) ** 2
    tr = 2.0 + (w_n**2 + w_n**-2) * a2
    det = (1.0 - a2) ** 2
    disc = math.sqrt(max(0.0, tr * tr - 4.0 * det))
    return (tr + disc) / 2.0, (tr - disc) / 2.0


# -- norms and spectra -------------------------------------------------------


def _array(A) -> np.ndarray:
    return A.to_numpy() if isinstance(A, OperatorMatrix) else np.asarray(A, dtype=complex)


def op_norm(A, method: str = "auto") -> float:
    """Largest singular value.

    ``method="power"`` runs power iteration on A^H A (tolerance 1e-10, at most
    1e4 steps) and falls back to a dense SVD if it does not converge;
    ``"auto"`` is dense up to 4096 and power iteration beyond.
    """
    M = _array(A)
    if method == "dense" or (method == "auto" and max(M.shape) <= AUTO_DENSE_LIMIT):
        return float(scipy.linalg.svdvals(M)[0]) if M.size else 0.0
    est = _power_norm(M)
    if est is None:
        return float(scipy.linalg.svdvals(M)[0])
    return est


def _power_norm(M: np.ndarray) -> float | None:
    x = np.ones(M.shape[1], dtype=complex) / math.sqrt(M.shape[1])
    lam = 0.0
    for _ in range(POWER_MAXITER):
        y = M.conj().T @ (M @ x)
        new = float(np.linalg.norm(y))
        if new == 0.0:
            return 0.0
        x = y / new
        if abs(new - lam) <= POWER_TOL * new:
            return math.sqrt(new)
        lam = new
    return None


def smallest_sv(A, cols: int | None = None) -> float:
    M = _array(A)
    cols = M.shape[1] if cols is None else cols
    return float(scipy.linalg.svdvals(M[:, :cols]).min())


def eigenvalues(A) -> np.ndarray:
    return scipy.linalg.eigvals(_array(A))


# -- the pair identity for disk automorphisms ------------------------------


def pair_columns(z0, n: int, pairs: int, second: str = "phi", exact: bool = False):
    """Interleaved columns (B^k, h B^k) for k < pairs, with B = z phi_{z0}.

    ``second`` selects h = phi_{z0} or h = z.  Float mode returns an n x 2p
    array; exact mode returns the list of (re, im) FLINT pairs.
    """
    B = blaschke_taylor([0, z0], 0.0, n - 1, exact)
    h = mobius_taylor(z0, 0.0, n - 1, exact) if second == "phi" else polynomial([0, 1], n - 1, exact)
    if exact:
        bp, hp = to_flint(B.coeffs), to_flint(h.coeffs)
        p = (flint.fmpq_poly([1]), flint.fmpq_poly())
        cols = []
        for k in range(pairs):
            cols.append(p)
            cols.append(mul_low_pair(p, hp, n))
            if k + 1 < pairs:
                p = mul_low_pair(p, bp, n)
        return cols
    P = _power_columns(B, n, pairs)
    hc = h.to_numpy()
    X = np.zeros((n, 2 * pairs), dtype=complex)
    for k in range(pairs):
        X[:, 2 * k] = P[:, k]
        X[:, 2 * k + 1] = np.convolve(P[:, k], hc)[:n]
    return X


def order_scale(w: WeightSequence, pairs: int) -> np.ndarray:
    """Column scaling (beta_k, beta_{k+1}) for pair k."""
    b = w.betas(pairs + 1)
    s = np.empty(2 * pairs)
    s[0::2] = b[:pairs]
    s[1::2] = b[1 : pairs + 1]
    return s


def pair_scale(w: WeightSequence, pairs: int) -> np.ndarray:
    """Column scaling (beta_k, beta_k) for pair k."""
    return np.repeat(w.betas(pairs), 2)


@dataclass(frozen=True)
class F2Report:
    residual: float
    z0: complex
    n: int
    m: int
    weights: str
    exact: bool
    convention: str
    tolerance: float | None = None
    log10_residual: float | None = None

    @property
    def passed(self) -> bool:
        return self.tolerance is None or self.residual < self.tolerance

    def to_json(self) -> dict:
        return {
            "suite": "f2",
            "residual": self.residual,
            "z0": [self.z0.real, self.z0.imag],
            "N": self.n,
            "block": self.m,
            "weights": self.weights,
            "exact": self.exact,
            "convention": self.convention,
            "log10_residual": self.log10_residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


def _gram_exact(cols: list, n: int, convention: str):
    """Exact Gram matrix of FLINT column pairs (rows k < n).

    Returns integer matrices (real, imag) and per-column denominators d, so
    that entry (i, j) is (real + i imag)[i, j] / (d_i d_j).  Working on
    numerators keeps the product inside fmpz_mat, which is far faster than
    rational matrix arithmetic at N in the thousands.
    """
    k = len(cols)
    dens, re_rows, im_rows = [], [], []
    for pr, pi in cols:
        d = math.lcm(int(pr.denom()), int(pi.denom()))
        dens.append(d)
        for poly, rows in ((pr, re_rows), (pi, im_rows)):
            scale = d // int(poly.denom())
            c = [int(x) * scale for x in poly.numer().coeffs()[:n]]
            rows.append(c + [0] * (n - len(c)))
    R = flint.fmpz_mat(n, k, [re_rows[j][i] for i in range(n) for j in range(k)])
    Rt = R.transpose()
    if not any(any(r) for r in im_rows):
        return Rt * R, None, dens
    I_ = flint.fmpz_mat(n, k, [im_rows[j][i] for i in range(n) for j in range(k)])
    It = I_.transpose()
    real = Rt * R + It * I_
    imag = Rt * I_ - It * R if convention == "adjoint" else It * R - Rt * I_
    return real, imag, dens


def _log_residuals_exact(gram, target: list) -> np.ndarray:
    """Natural log of |G_ij - T_ij| for the exact Gram triple and rational target."""
    real, imag, dens = gram
    k = len(dens)
    out = np.full((k, k), -np.inf)
    for i in range(k):
        for j in range(k):
            t = target[i][j]
            q = math.lcm(t.re.denominator, t.im.denominator)
            dd = dens[i] * dens[j]
            nr = int(real[i, j]) * q - t.re.numerator * (q // t.re.denominator) * dd
            gi = int(imag[i, j]) if imag is not None else 0
            ni = gi * q - t.im.numerator * (q // t.im.denominator) * dd
            a2 = nr * nr + ni * ni
            if a2:
                out[i, j] = math.log(a2) / 2 - math.log(dd * q)
    return out


def verify_f2(
    w: WeightSequence,
    z0,
    n: int,
    m: int,
    exact: bool = False,
    convention: str = "adjoint",
    tolerance: float | None = None,
) -> F2Report:
    """Residual of the pair identity on the leading 2m x 2m block.

    Columns are (B^k, phi B^k) for k < m in the monomial basis, rows k < n.
    The product S (X* X) S^-1, with S the order scaling (beta_k, beta_{k+1}),
    is compared with D_tm.  ``convention="adjoint"`` takes X* as the
    conjugate transpose; ``"gram"`` uses entries <x_i, x_j> instead, which
    differs from the adjoint only for non-real z0.

    In exact mode the Gram matrix and the unscaled target are rational, so the
    residual is pure truncation tail; only the final scaling is in floats.
    """
    if abs(complex(z0)) >= 1:
        raise ValueError("|z0| must be < 1")
    if convention not in ("adjoint", "gram"):
        raise ValueError("convention must be 'adjoint' or 'gram'")
    if 4 * m > n:
        raise ValueError(f"block 2m = {2 * m} too large for N = {n}; need 4m <= N")
    s = order_scale(w, m)
    ratio = _ratio(s, s)
    if exact:
        zq = GaussianRational.coerce(z0)
        gram = _gram_exact(pair_columns(zq, n, m, exact=True), n, convention)
        logdiff = _log_residuals_exact(gram, dtm_target_exact(zq, m))
        log_res = float(np.max(np.log(ratio) + logdiff))
        residual = math.exp(log_res) if log_res > -745 else 0.0
        log10 = log_res / math.log(10) if np.isfinite(log_res) else -math.inf
        return F2Report(residual, complex(z0), n, m, w.label, exact, convention, tolerance, log10)
    else:
        X = pair_columns(complex(z0), n, m)
        G = X.conj().T @ X if convention == "adjoint" else X.T @ X.conj()
        prod = ratio * G
        residual = float(np.max(np.abs(prod - dtm_section(w, z0, 2 * m).entries)))
    return F2Report(residual, complex(z0), n, m, w.label, exact, convention, tolerance)


def dtm_target_exact(z0: GaussianRational, m: int) -> list:
    """D_tm on the Hardy weights (all w_k = 1), as exact entries."""
    zero, one = GaussianRational(0), GaussianRational(1)
    T = [[zero] * (2 * m) for _ in range(2 * m)]
    for k in range(m):
        T[2 * k][2 * k] = one
        T[2 * k + 1][2 * k + 1] = one
        T[2 * k][2 * k + 1] = z0.conjugate()
        T[2 * k + 1][2 * k] = z0
    return T


# -- bound checks ----------------------------------------------------------------

BOUND_RTOL = 1e-12


@dataclass(frozen=True)
class BoundReport:
    formula_id: str
    params: dict
    lhs: float
    rhs: float
    slack: float = field(init=False)
    passed: bool = field(init=False)

    def __post_init__(self):
        slack = self.rhs - self.lhs
        object.__setattr__(self, "slack", slack)
        object.__setattr__(self, "passed", bool(slack >= -BOUND_RTOL * max(1.0, abs(self.rhs))))

    def to_json(self) -> dict:
        return {
            "formula_id": self.formula_id,
            "params": {k: _jsonable(v) for k, v in self.params.items()},
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "pass": self.passed,
        }


def _jsonable(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, WeightSequence):
        return v.label
    return v


SUP_PROBE = 100_000


def _sup_w_pair(w: WeightSequence, probe: int = SUP_PROBE) -> float:
    ws = w.weights(probe)
    return float(np.max(ws**2 + ws**-2))


def _blocks(w_n, w, n):
    if w_n is not None:
        return [float(w_n)]
    return list(w.weights(n // 2))


def _bound_a(z0, w=None, w_n=None, n=256, corrected=False):
    """Norm bounds for D_tm (or a single block when ``w_n`` is given)."""
    a2 = abs(complex(z0)) ** 2
    sup = (w_n**2 + w_n**-2) if w_n is not None else _sup_w_pair(w)
    base = 2.0 if corrected else 1.0
    rhs_norm = math.sqrt(base + a2 * sup)
    rhs_inv = rhs_norm / (1.0 - a2)
    eig = [dn_block_eigs(x, z0) for x in _blocks(w_n, w, n)]
    lhs_norm = max(math.sqrt(e[0]) for e in eig)
    lhs_inv = max(1.0 / math.sqrt(e[1]) for e in eig)
    tag = "a-trace" if corrected else "a"
    params = {"z0": complex(z0), "weights": w.label if w is not None else None, "w_n": w_n, "N": n}
    return [
        BoundReport(f"{tag}.inverse", params, lhs_inv, rhs_inv),
        BoundReport(f"{tag}.norm", params, lhs_norm, rhs_norm),
    ]


def _bound_b(z0, w, n=256):
    """Gram sandwich for the pair systems in beta and in the inverse weights."""
    pairs = n // 2
    winv = w.inverse()
    params = {"z0": complex(z0), "weights": w.label, "N": n}
    B = blaschke_taylor([0, z0], 0.0, n - 1)
    b = w.betas(n)
    XF_mono = _power_columns(B, n, pairs)
    XF = op_norm(XF_mono * _ratio(b, b[:pairs]))
    X1 = op_norm(pair_columns(z0, n, pairs, "z") * _ratio(b, pair_scale(w, pairs)))
    Mz = op_norm(multiplication_section(polynomial([0, 1]), w, n))
    bi = winv.betas(n)
    XFi = op_norm(XF_mono * _ratio(bi, bi[:pairs]))
    X2 = op_norm(pair_columns(z0, n, pairs, "phi") * _ratio(bi, pair_scale(winv, pairs)))
    Mphi = op_norm(multiplication_section(mobius_taylor(z0, 0.0, n - 1), winv, n))
    return [
        BoundReport("b.lower", params, XF, X1),
        BoundReport("b.upper", params, X1, (1 + Mz) * XF),
        BoundReport("b.inverse_lower", params, XFi, X2),
        BoundReport("b.inverse_upper", params, X2, (1 + Mphi) * XFi),
    ]


def _bound_c(z0, w, n=256, power=3):
    order = growth_order(w)
    a = abs(complex(z0))
    params = {"z0": complex(z0), "weights": w.label, "N": n, "power": power, "growth_order": order}
    zk = op_norm(multiplication_section(polynomial([0] * power + [1]), w, n))
    kern = op_norm(multiplication_section(TruncatedSeries(np.conj(complex(z0)) ** np.arange(n)), w, n))
    phi = op_norm(multiplication_section(mobius_taylor(z0, 0.0, n - 1), w, n))
    return [
        BoundReport("c.power", params, zk, float(math.comb(order + power, power))),
        BoundReport("c.kernel", params, kern, 1.0 / (1.0 - a) ** (order + 1)),
        BoundReport("c.automorphism", params, phi, (order + 2) / (1.0 - a) ** (order + 1)),
    ]


def _bound_d(z0, w, n=256, probe=10_000):
    params = {"z0": complex(z0), "weights": w.label, "N": n}
    B = blaschke_taylor([0, z0], 0.0, n)
    lhs = op_norm(composition_section(B.truncate(n - 1), tilde_lift(w), n))
    dwt = float(np.max(diagonal_entries("D_wtilde", w, probe)))
    mb = op_norm(multiplication_section(B.derivative(), w, n))
    cb = op_norm(composition_section(B.truncate(n - 1), w, n))
    return [BoundReport("d", params, lhs, dwt * mb * cb)]


def dominates(w: WeightSequence, w2: WeightSequence, probe: int = 10_000) -> bool:
    """True when w_k >= w2_k at every probed k."""
    return bool(np.all(w.weights(probe) >= w2.weights(probe) * (1 - 1e-15)))


def _bound_e(z0, w, w_small, n=256):
    if not dominates(w, w_small):
        raise ValueError(f"{w.label} does not dominate {w_small.label}")
    params = {"z0": complex(z0), "weights": w.label, "dominated": w_small.label, "N": n}
    B = blaschke_taylor([0, z0], 0.0, n - 1)
    big = op_norm(composition_section(B, w, n))
    small = op_norm(composition_section(B, w_small, n))
    return [BoundReport("e", params, small, big)]


def _bound_f(z0, w, n=256):
    pairs = n // 2
    winv = w.inverse()
    params = {"z0": complex(z0), "weights": w.label, "N": n}
    lhs = op_norm(composition_section(mobius_taylor(z0, 0.0, n - 1), w, n))
    b, bi = w.betas(n), winv.betas(n)
    X1 = op_norm(pair_columns(z0, n, pairs, "z") * _ratio(b, order_scale(w, pairs)))
    X2 = op_norm(pair_columns(z0, n, pairs, "phi") * _ratio(bi, order_scale(winv, pairs)))
    inv = max(1.0 / math.sqrt(dn_block_eigs(x, z0)[1]) for x in w.weights(SUP_PROBE))
    return [BoundReport("f", params, lhs, X1 * X2 * inv)]


FORMULAS = {
    "a": _bound_a,
    "a-trace": lambda z0, w=None, w_n=None, n=256: _bound_a(z0, w, w_n, n, corrected=True),
    "b": _bound_b,
    "c": _bound_c,
    "d": _bound_d,
    "e": _bound_e,
    "f": _bound_f,
}


def check_bounds(formula_id: str, **params) -> list[BoundReport]:
    """Evaluate one bound family; returns one report per inequality."""
    try:
        fn = FORMULAS[formula_id]
    except KeyError:
        raise ValueError(f"unknown formula id {formula_id!r}; expected one of {sorted(FORMULAS)}") from None
    return fn(**params)


DEFAULT_Z0 = (0.2, 0.4, 0.6)


def default_weights() -> list[WeightSequence]:
    return [hardy(), dirichlet(1.0), dn1(2)]


def bounds_grid(formulas: Sequence[str] = ("a", "b", "c", "d", "e", "f"), n: int = 256) -> list[BoundReport]:
    """All reports over z0 in {0.2, 0.4, 0.6} and the hardy / dirichlet 1 / dn1 2 weights."""
    ws = default_weights()
    out = []
    for fid in formulas:
        for z0 in DEFAULT_Z0:
            for w in ws:
                if fid == "e":
                    for w2 in ws:
                        if w2 is not w and dominates(w, w2):
                            out += check_bounds("e", z0=z0, w=w, w_small=w2, n=n)
                else:
                    out += check_bounds(fid, z0=z0, w=w, n=n)
    return out
