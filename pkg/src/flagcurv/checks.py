"""Registered property checks, one per documented module invariant.

Every check takes a :class:`~flagcurv.harness.SuiteConfig` and returns
``(max_residual, trials)``.  Trial ``i`` draws its random data from
``default_rng([seed + i, tag])``, so results do not depend on execution order.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

from . import forms, grassmann, liealg, lorentz, qmat, quat
from .forms import CurvePatch, Partition
from .grassmann import BlockedGroupElement, GrassmannPoint
from .harness import SuiteConfig, check
from .qmat import QMatrix, SpAlgebraElement, SpElement, embed, frobenius, q_inverse
from .quat import Quaternion

GRASSMANN_PAIRS = [(1, 1), (1, 2), (2, 2), (2, 3)]
TORSION_PAIRS = [(1, 1), (2, 2)]
LIE_PAIRS = [(1, 1), (1, 2), (2, 2)]
CURVATURE_PARTITIONS = [(1, 1), (1, 3), (2, 2), (1, 1, 2)]
MC2_PARTITIONS = {2: [(1, 1), (2,), (1, 1)], 3: [(1, 2), (2, 1), (1, 1, 1)], 4: [(1, 3), (2, 2), (1, 1, 2)]}
PATCH_SPEED = 0.1
EXACT_FAIL = math.inf


def _rng(cfg: SuiteConfig, i: int, tag: int = 0) -> np.random.Generator:
    return np.random.default_rng([cfg.seed + i, tag])


def _sub(cfg: SuiteConfig, i: int, tag: int) -> list[int]:
    """Seed for library constructors that take their own seed."""
    return [cfg.seed + i, tag]


def _rel(err: float, scale: float) -> float:
    return err / max(scale, 1e-300)


# quat ---------------------------------------------------------------------


def _fq(rng) -> Quaternion:
    return Quaternion.from_array(rng.standard_normal(4))


def _xq(rng) -> Quaternion:
    return Quaternion.exact(*(Fraction(int(rng.integers(-50, 51)), int(rng.integers(1, 20))) for _ in range(4)))


def _qdiff(a: Quaternion, b: Quaternion) -> float:
    return float(np.linalg.norm(a.as_array() - b.as_array()))


def _qnorm(a: Quaternion) -> float:
    return float(np.linalg.norm(a.as_array()))


@check("quat.norm_multiplicative", 1e-14)
def _(cfg):
    worst = 0.0
    for i in range(cfg.trials):
        rng = _rng(cfg, i)
        a, b = _fq(rng), _fq(rng)
        lhs, rhs = quat.norm2(a * b), quat.norm2(a) * quat.norm2(b)
        worst = max(worst, _rel(abs(lhs - rhs), rhs))
        a, b = _xq(rng), _xq(rng)
        if quat.norm2(a * b) != quat.norm2(a) * quat.norm2(b):
            return EXACT_FAIL, i + 1
    return worst, cfg.trials


@check("quat.det_is_norm2", 1e-13)
def _(cfg):
    worst = 0.0
    for i in range(cfg.trials):
        rng = _rng(cfg, i)
        q = _fq(rng)
        det = quat.to_m2c(q).det()
        worst = max(worst, _rel(abs(det - quat.norm2(q)), quat.norm2(q)))
        q = _xq(rng)
        det = quat.to_m2c(q).det()
        if det.y != 0 or det.x != quat.norm2(q):
            return EXACT_FAIL, i + 1
    return worst, cfg.trials


@check("quat.associativity_distributivity", 0.0)
def _(cfg):
    for i in range(cfg.trials):
        rng = _rng(cfg, i)
        a, b, c = _xq(rng), _xq(rng), _xq(rng)
        if (a * b) * c != a * (b * c) or a * (b + c) != a * b + a * c or (a + b) * c != a * c + b * c:
            return EXACT_FAIL, i + 1
    return 0.0, cfg.trials


_JM = np.array([[0, 1], [-1, 0]], dtype=complex)


@check("quat.conj_is_j_transpose_j", 1e-13)
def _(cfg):
    worst = 0.0
    for i in range(cfg.trials):
        rng = _rng(cfg, i)
        # integer components keep the complex arithmetic exact; the float draw is relative
        for q, exact in ((Quaternion(*map(float, rng.integers(-9, 10, 4))), True), (_fq(rng), False)):
            m = quat.to_m2c(q).matrix()
            lhs = quat.to_m2c(quat.conj(q)).matrix()
            rhs = _JM.T @ m.T @ _JM
            err = float(np.abs(lhs - rhs).max())
            if exact and err:
                return EXACT_FAIL, i + 1
            worst = max(worst, _rel(err, float(np.abs(m).max())))
    return worst, cfg.trials


@check("quat.conj_antihomomorphism", 1e-13)
def _(cfg):
    worst = 0.0
    for i in range(cfg.trials):
        rng = _rng(cfg, i)
        a, b = _fq(rng), _fq(rng)
        lhs = quat.conj(a * b)
        worst = max(worst, _rel(_qdiff(lhs, quat.conj(b) * quat.conj(a)), _qnorm(lhs)))
        a, b = _xq(rng), _xq(rng)
        if quat.conj(a * b) != quat.conj(b) * quat.conj(a):
            return EXACT_FAIL, i + 1
    return worst, cfg.trials


def _exact_matmul(x, y):
    return [[x[r][0] * y[0][c] + x[r][1] * y[1][c] for c in range(2)] for r in range(2)]


@check("quat.m2c_homomorphism", 1e-13)
def _(cfg):
    worst = 0.0
    for i in range(cfg.trials):
        rng = _rng(cfg, i)
        a, b = _fq(rng), _fq(rng)
        lhs = quat.to_m2c(a * b).matrix()
        rhs = quat.to_m2c(a).matrix() @ quat.to_m2c(b).matrix()
        worst = max(worst, _rel(float(np.abs(lhs - rhs).max()), float(np.abs(lhs).max())))
        a, b = _xq(rng), _xq(rng)
        if quat.to_m2c(a * b).matrix() != _exact_matmul(quat.to_m2c(a).matrix(), quat.to_m2c(b).matrix()):
            return EXACT_FAIL, i + 1
    return worst, cfg.trials


@check("quat.j_conjugate_involution", 0.0)
def _(cfg):
    for i in range(cfg.trials):
        rng = _rng(cfg, i)
        q = _xq(rng)
        if quat.j_conjugate(quat.j_conjugate(q)) != q:
            return EXACT_FAIL, i + 1
        m = quat.to_m2c(q).matrix()
        mj = quat.to_m2c(quat.j_conjugate(q)).matrix()
        if any(mj[r][c] != quat._cconj(m[r][c]) for r in range(2) for c in range(2)):
            return EXACT_FAIL, i + 1
    return 0.0, cfg.trials


# qmat ---------------------------------------------------------------------


def _qm(rng, r: int, c: int) -> QMatrix:
    return QMatrix(rng.standard_normal((r, c, 4)))


def _zrel(a: np.ndarray, b: np.ndarray) -> float:
    return _rel(float(np.linalg.norm(a - b)), float(np.linalg.norm(b)))


@check("qmat.embed_homomorphism", 1e-12)
def _(cfg):
    worst = 0.0
    for i in range(cfg.trials):
        rng = _rng(cfg, i)
        r, m, c = (int(x) for x in rng.integers(1, cfg.N_max + 1, 3))
        a, a2, b = _qm(rng, r, m), _qm(rng, r, m), _qm(rng, m, c)
        sq = _qm(rng, m, m) + QMatrix.identity(m) * 3.0
        if unembed_roundtrip_fails(a):
            return EXACT_FAIL, i + 1
        worst = max(
            worst,
            _zrel(embed(a @ b), embed(a) @ embed(b)),
            _zrel(embed(a + a2), embed(a) + embed(a2)),
            _zrel(embed(a.H), embed(a).conj().T),
            _zrel(embed(q_inverse(sq)), np.linalg.inv(embed(sq))),
        )
    return worst, cfg.trials


def unembed_roundtrip_fails(a: QMatrix) -> bool:
    return not np.array_equal(qmat.unembed(embed(a)).data, a.data)


@check("qmat.sp_closure", qmat.UNITARITY_TOL)
def _(cfg):
    worst = 0.0
    for i in range(cfg.trials):
        n = 1 + i % cfg.N_max
        g = qmat.random_sp(n, _sub(cfg, i, 0)) @ qmat.random_sp(n, _sub(cfg, i, 1))
        worst = max(worst, frobenius(g.mat @ g.mat.H - QMatrix.identity(n)))
    return worst, cfg.trials


@check("qmat.sp_algebra_commutator_closure", 1e-12)
def _(cfg):
    worst = 0.0
    for i in range(cfg.trials):
        n = 1 + i % cfg.N_max
        a = qmat.random_skew(n, _sub(cfg, i, 0)).mat
        b = qmat.random_skew(n, _sub(cfg, i, 1)).mat
        c = a @ b - b @ a
        worst = max(worst, _rel(frobenius(c + c.H), max(1.0, frobenius(c))))
        SpAlgebraElement.project(c)
    return worst, cfg.trials


def _partitions_upto(N_max: int):
    return [p for p in CURVATURE_PARTITIONS if sum(p) <= N_max] or [(1,)]


@check("qmat.expm_block_diagonal", 1e-12)
def _(cfg):
    worst = 0.0
    parts = _partitions_upto(cfg.N_max)
    for i in range(cfg.trials):
        p = Partition(parts[i % len(parts)])
        a = forms.block_diagonal([qmat.random_skew(k, _sub(cfg, i, mu)).mat for mu, k in enumerate(p.parts)])
        e = qmat.q_expm(SpAlgebraElement(a)).mat
        for mu, nu in itertools.permutations(range(1, p.m + 1), 2):
            worst = max(worst, frobenius(p.block(e, mu, nu)))
    return worst, cfg.trials


@check("qmat.expm_one_parameter_group", 1e-12)
def _(cfg):
    worst = 0.0
    for i in range(cfg.trials):
        rng = _rng(cfg, i)
        n = 1 + i % cfg.N_max
        a = qmat.random_skew(n, _sub(cfg, i, 1))
        s, t = rng.uniform(-1, 1, 2)
        lhs = qmat.q_expm(a * (s + t)).mat
        rhs = (qmat.q_expm(a * s) @ qmat.q_expm(a * t)).mat
        worst = max(worst, frobenius(lhs - rhs))
    return worst, cfg.trials


# grassmann ----------------------------------------------------------------


def _blocked(cfg, i, k, n, tag=0) -> BlockedGroupElement:
    return BlockedGroupElement.split(qmat.random_sp(k + n, _sub(cfg, i, 100 + tag)), k)


def _point(cfg, i, k, n, tag=50) -> GrassmannPoint:
    g = qmat.random_sp(k + n, _sub(cfg, i, tag))
    return grassmann.grassmann_from_stiefel(grassmann.stiefel_from_group(g, k))


def _grassmann_trials(cfg):
    for k, n in cfg.kn_pairs(GRASSMANN_PAIRS):
        for i in range(cfg.trials):
            yield i, k, n


def _count(cfg, pairs) -> int:
    return cfg.trials * len(cfg.kn_pairs(pairs))


@check("grassmann.chart_identity", 1e-9)
def _(cfg):
    worst = 0.0
    for i, k, n in _grassmann_trials(cfg):
        x = grassmann.stiefel_from_group(qmat.random_sp(k + n, _sub(cfg, i, 0)), k)
        y = grassmann.grassmann_from_stiefel(x)
        worst = max(worst, frobenius(grassmann.one_plus_yy(y.Y) - q_inverse(x.Xk.H @ x.Xk)))
    return worst, _count(cfg, GRASSMANN_PAIRS)


@check("grassmann.lft_closed_forms_agree", 1e-9)
def _(cfg):
    worst = 0.0
    for i, k, n in _grassmann_trials(cfg):
        g, Y = _blocked(cfg, i, k, n), _point(cfg, i, k, n).Y
        right = (g.A @ Y + g.B) @ q_inverse(g.C @ Y + g.D)
        left = q_inverse(g.A.H - Y @ g.B.H) @ (Y @ g.D.H - g.C.H)
        worst = max(worst, _rel(frobenius(left - right), max(1.0, frobenius(right))))
    return worst, _count(cfg, GRASSMANN_PAIRS)


@check("grassmann.lft_action_axioms", 1e-9)
def _(cfg):
    worst = 0.0
    for i, k, n in _grassmann_trials(cfg):
        g1, g2, y = _blocked(cfg, i, k, n, 0), _blocked(cfg, i, k, n, 1), _point(cfg, i, k, n)
        e = BlockedGroupElement.split(SpElement.identity(k + n), k)
        worst = max(worst, frobenius(grassmann.lft_apply(e, y).Y - y.Y))
        lhs = grassmann.lft_apply(g2, grassmann.lft_apply(g1, y)).Y
        rhs = grassmann.lft_apply(g2 @ g1, y).Y
        worst = max(worst, _rel(frobenius(lhs - rhs), max(1.0, frobenius(rhs))))
    return worst, _count(cfg, GRASSMANN_PAIRS)


@check("grassmann.origin_image", 1e-10)
def _(cfg):
    worst = 0.0
    for i, k, n in _grassmann_trials(cfg):
        g = _blocked(cfg, i, k, n)
        img = grassmann.lft_apply(g, GrassmannPoint.origin(k, n)).Y
        bd = g.B @ q_inverse(g.D)
        ac = -(q_inverse(g.A.H) @ g.C.H)
        worst = max(worst, frobenius(img - bd), frobenius(bd - ac))
    return worst, _count(cfg, GRASSMANN_PAIRS)


@check("grassmann.one_plus_yy_ge_one", 1e-10)
def _(cfg):
    worst = 0.0
    for i, k, n in _grassmann_trials(cfg):
        y = _point(cfg, i, k, n)
        lam = float(np.linalg.eigvalsh(embed(grassmann.one_plus_yy(y.Y))).min())
        worst = max(worst, 1.0 - lam)
    return worst, _count(cfg, GRASSMANN_PAIRS)


@check("grassmann.metric_invariance", 1e-9)
def _(cfg):
    worst = 0.0
    for i, k, n in _grassmann_trials(cfg):
        g, y = _blocked(cfg, i, k, n), _point(cfg, i, k, n)
        u, v = qmat.random_tangent(k, n, _sub(cfg, i, 1)), qmat.random_tangent(k, n, _sub(cfg, i, 2))
        y2 = grassmann.lft_apply(g, y)
        u2, v2 = grassmann.lft_pushforward(g, y, u), grassmann.lft_pushforward(g, y, v)
        before = grassmann.metric_eval(y, u, v)
        after = grassmann.metric_eval(y2, u2, v2)
        scale = math.sqrt(grassmann.metric_eval(y, u, u) * grassmann.metric_eval(y, v, v))
        worst = max(worst, _rel(abs(after - before), scale))
    return worst, _count(cfg, GRASSMANN_PAIRS)


@check("grassmann.metric_connection_form", 1e-9)
def _(cfg):
    worst = 0.0
    for i, k, n in _grassmann_trials(cfg):
        g = _blocked(cfg, i, k, n)
        dg = g.assemble() @ qmat.random_skew(k + n, _sub(cfg, i, 3)).mat
        u = forms.chart_velocity(g, dg)
        w = forms.omega12(g, u)
        ds2 = grassmann.metric_eval(grassmann.chart_point(g), u, u)
        worst = max(worst, _rel(abs(ds2 - (w @ w.H).real_trace()), ds2))
    return worst, _count(cfg, GRASSMANN_PAIRS)


@check("grassmann.pushforward_linear", 1e-12)
def _(cfg):
    worst = 0.0
    for i, k, n in _grassmann_trials(cfg):
        rng = _rng(cfg, i)
        g, y = _blocked(cfg, i, k, n), _point(cfg, i, k, n)
        u, v = qmat.random_tangent(k, n, _sub(cfg, i, 1)), qmat.random_tangent(k, n, _sub(cfg, i, 2))
        a, b = rng.standard_normal(2)
        lhs = grassmann.lft_pushforward(g, y, u * a + v * b)
        rhs = grassmann.lft_pushforward(g, y, u) * a + grassmann.lft_pushforward(g, y, v) * b
        worst = max(worst, _rel(frobenius(lhs - rhs), max(1.0, frobenius(rhs))))
    return worst, _count(cfg, GRASSMANN_PAIRS)


@check("grassmann.pushforward_companions", 1e-9)
def _(cfg):
    worst = 0.0
    for i, k, n in _grassmann_trials(cfg):
        g, y = _blocked(cfg, i, k, n), _point(cfg, i, k, n)
        Y, Y2 = y.Y, grassmann.lft_apply(g, y).Y
        left = q_inverse(g.A.H - Y @ g.B.H)
        right = q_inverse(g.C @ Y + g.D)
        first = left @ grassmann.one_plus_yy(Y) @ left.H
        second = right.H @ grassmann.one_plus_ystar_y(Y) @ right
        worst = max(
            worst,
            _rel(frobenius(grassmann.one_plus_yy(Y2) - first), frobenius(first)),
            _rel(frobenius(grassmann.one_plus_ystar_y(Y2) - second), frobenius(second)),
        )
    return worst, _count(cfg, GRASSMANN_PAIRS)


@check("grassmann.dimension_counts", 0.0)
def _(cfg):
    bad = 0
    pairs = [(k, n) for n in range(1, 5) for k in range(1, n + 1)]
    for k, n in pairs:
        d = grassmann.dimensions(k, n)
        bad += (d.dim_Y, d.dim_X, d.dim_fiber) != (4 * k * n, 4 * k * n + 2 * k * k + k, k * (2 * k + 1))
        bad += d.dim_X - d.dim_fiber != d.dim_Y
        bad += qmat.sp_dimension(k) != d.dim_fiber
        bad += qmat.sp_dimension(k + n) != (k + n) * (2 * (k + n) + 1)
    return float(bad), len(pairs)


# forms --------------------------------------------------------------------


def random_patch(N: int, seed, speed: float = PATCH_SPEED) -> CurvePatch:
    """Seeded patch with a random base point and slow one-parameter directions."""
    base = list(seed) if isinstance(seed, (list, tuple)) else [seed]
    return CurvePatch(
        qmat.random_sp(N, base + [0]),
        qmat.random_skew(N, base + [1], scale=speed),
        qmat.random_skew(N, base + [2], scale=speed),
    )


def _steps(h: float) -> tuple[float, float]:
    return (h, h / 2) if h / 2 >= forms.FD_MIN else (2 * h, h)


@check("forms.mc2_second_order", 0.5)
def _(cfg):
    worst, count = 0.0, 0
    h1, h2 = _steps(cfg.fd_step)
    for N, parts in MC2_PARTITIONS.items():
        if N > cfg.N_max:
            continue
        for j, parts_j in enumerate(parts):
            patch, p = random_patch(N, _sub(cfg, j, N)), Partition(parts_j)
            ratio = forms.mc2_residual(patch, p, h1) / forms.mc2_residual(patch, p, h2)
            worst = max(worst, abs(ratio - 4))
            count += 1
    return worst, count


def _curv_partitions(cfg):
    return [Partition(p) for p in CURVATURE_PARTITIONS if sum(p) <= cfg.N_max]


@check("forms.block_curvature_matches_fd", 10.0)
def _(cfg):
    worst, count = 0.0, 0
    for p in _curv_partitions(cfg):
        for i in range(3):
            patch = random_patch(p.N, _sub(cfg, i, 10 + p.N))
            mc2 = forms.mc2_residual(patch, p, cfg.fd_step)
            for mu in range(1, p.m + 1):
                alg = forms.curvature_block(patch, p, mu).value
                fd = forms.obstruction_fd(patch, p, mu, cfg.fd_step)
                worst = max(worst, frobenius(alg - fd) / mc2)
            count += 1
    return worst, count


@check("forms.block_sum_consistency", 1e-5)
def _(cfg):
    worst, count = 0.0, 0
    for p in _curv_partitions(cfg):
        for i in range(3):
            patch = random_patch(p.N, _sub(cfg, i, 20 + p.N))
            blocks = [forms.mc2_block_residual(patch, p, mu, nu, cfg.fd_step) for mu in range(1, p.m + 1) for nu in range(1, p.m + 1)]
            assembled = math.sqrt(sum(b * b for b in blocks))
            obstruction = max(
                frobenius(forms.obstruction_fd(patch, p, mu, cfg.fd_step) - forms.curvature_block(patch, p, mu).value)
                for mu in range(1, p.m + 1)
            )
            worst = max(worst, assembled, obstruction)
            count += 1
    return worst, count


@check("forms.offdiag_structure_equation", 1e-5)
def _(cfg):
    worst = 0.0
    pairs = cfg.kn_pairs(GRASSMANN_PAIRS)
    for k, n in pairs:
        for i in range(3):
            patch = random_patch(k + n, _sub(cfg, i, 30 + k + n))
            worst = max(worst, forms.mc2_block_residual(patch, Partition((k, n)), 1, 2, cfg.fd_step))
    return worst, 3 * len(pairs)


def _sign_twist(k: int, n: int) -> QMatrix:
    return forms.block_diagonal([QMatrix.identity(k), QMatrix.identity(n) * -1.0])


@check("forms.w12_chart_relation", 1e-9)
def _(cfg):
    worst = 0.0
    for i, k, n in _grassmann_trials(cfg):
        g = _blocked(cfg, i, k, n)
        dg = g.assemble() @ qmat.random_skew(k + n, _sub(cfg, i, 3)).mat
        u = forms.chart_velocity(g, dg)
        w = forms.omega12(g, u)
        S = _sign_twist(k, n)
        twisted = SpElement(S @ g.assemble() @ S)
        conn = forms.connection_eval(twisted, S @ dg @ S, Partition((k, n))).block(1, 2)
        scale = max(1.0, frobenius(w))
        worst = max(worst, _rel(frobenius(g.A.H @ u @ g.D + w), scale), _rel(frobenius(conn - w), scale))
    return worst, _count(cfg, GRASSMANN_PAIRS)


@check("forms.two_form_skew", 1e-12)
def _(cfg):
    worst = 0.0
    for i, k, n in _grassmann_trials(cfg):
        g = _blocked(cfg, i, k, n)
        y = grassmann.chart_point(g)
        u, v = qmat.random_tangent(k, n, _sub(cfg, i, 1)), qmat.random_tangent(k, n, _sub(cfg, i, 2))
        uv, vu = forms.curvature_closed_form(g, y, u, v), forms.curvature_closed_form(g, y, v, u)
        for a, b in zip(uv, vu):
            scale = max(1.0, frobenius(a.value))
            worst = max(worst, _rel(a.skew_error(), scale), _rel(frobenius(a.value + b.value), scale))
        if i < 3 and k + n <= cfg.N_max:
            patch = random_patch(k + n, _sub(cfg, i, 40))
            swapped = CurvePatch(patch.g0, patch.b_alg, patch.a_alg)
            p = Partition((k, n))
            for mu in (1, 2):
                a, b = forms.curvature_block(patch, p, mu), forms.curvature_block(swapped, p, mu)
                worst = max(worst, a.skew_error(), frobenius(a.value + b.value))
    return worst, _count(cfg, GRASSMANN_PAIRS)


def ym_group_element(q: Quaternion) -> BlockedGroupElement:
    """Element of Sp(2) with real scalar diagonal blocks whose chart point is ``q``."""
    a = 1.0 / math.sqrt(1.0 + quat.norm2(q))
    one = QMatrix.identity(1)
    qm = QMatrix.scalar(q)
    return BlockedGroupElement(one * a, qm * a, qm.H * -a, one * a)


@check("forms.ym_matches_closed_form", 1e-9)
def _(cfg):
    worst = 0.0
    for i in range(cfg.trials):
        rng = _rng(cfg, i)
        q, u, v = (Quaternion.from_array(rng.standard_normal(4)) for _ in range(3))
        g = ym_group_element(q)
        y = grassmann.chart_point(g)
        om1, om2 = forms.curvature_closed_form(g, y, QMatrix.scalar(u), QMatrix.scalar(v))
        ym1, ym2 = forms.ym_curvature(q, u, v)
        for closed, ym in ((om1, ym1), (om2, ym2)):
            got = closed.value.data[0, 0]
            worst = max(worst, _rel(float(np.linalg.norm(got - ym.as_array())), _qnorm(ym)))
    return worst, cfg.trials


@check("forms.torsion_identity", 1e-9)
def _(cfg):
    worst = 0.0
    pairs = cfg.kn_pairs(TORSION_PAIRS)
    for k, n in pairs:
        for i in range(cfg.trials):
            g = _blocked(cfg, i, k, n)
            y = grassmann.chart_point(g)
            u, v, w = (qmat.random_tangent(k, n, _sub(cfg, i, t)) for t in (1, 2, 3))
            worst = max(worst, forms.torsion_identity_residual(g, y, u, v, w))
    return worst, cfg.trials * len(pairs)


@check("forms.gauge_tensoriality", 1e-5)
def _(cfg):
    worst = 0.0
    parts = _curv_partitions(cfg) or [Partition((1, 1))]
    for i in range(cfg.trials):
        p = parts[i % len(parts)]
        patch = random_patch(p.N, _sub(cfg, i, 60))
        h = SpElement(forms.block_diagonal([qmat.random_sp(k, _sub(cfg, i, 61 + mu)).mat for mu, k in enumerate(p.parts)]))
        moved = patch.right_translate(h)
        omega = forms.block_diagonal([forms.curvature_block(patch, p, mu).value for mu in range(1, p.m + 1)])
        recomputed = forms.block_diagonal([forms.obstruction_fd(moved, p, mu, cfg.fd_step) for mu in range(1, p.m + 1)])
        worst = max(worst, frobenius(recomputed - forms.gauge_transform(omega, h, p)))
    return worst, cfg.trials


@check("forms.hodge_duality", 1e-12)
def _(cfg):
    worst = 0.0
    for i in range(cfg.trials):
        q = Quaternion.from_array(_rng(cfg, i).standard_normal(4)) if i else Quaternion(0.0, 0.0, 0.0, 0.0)
        signs = []
        for which in (0, 1):
            form = lambda a, b, w=which: forms.ym_curvature(q, a, b)[w]  # noqa: E731
            s = forms.hodge_duality_sign(form)
            F = np.array([[form(a, b).as_array() for b in (quat.ONE, quat.I, quat.J, quat.K)] for a in (quat.ONE, quat.I, quat.J, quat.K)])
            for c in (1, 2, 3):
                worst = max(worst, float(np.abs(forms.hodge_star(F[..., c]) - s * F[..., c]).max()))
            signs.append(s)
        if signs[0] != -signs[1]:
            return EXACT_FAIL, i + 1
    return worst, cfg.trials


# liealg -------------------------------------------------------------------


def _lie_pairs(cfg):
    return cfg.kn_pairs(LIE_PAIRS)


@check("liealg.commutator_table", 0.0)
def _(cfg):
    worst, count = Fraction(0), 0
    for k, n in _lie_pairs(cfg):
        rep = liealg.full_table_check(k, n, degree=2, n_random=20, seed=cfg.seed)
        worst = max([worst, rep.symmetric_form_residual, *rep.residuals.values()])
        count += len(rep.residuals)
    return float(worst), count


@check("liealg.conjugate_derivative_rule", 0.0)
def _(cfg):
    bad = 0
    for k, n in _lie_pairs(cfg):
        bad += sum(liealg.index_map_residuals(liealg.ring_make(k, n)))
    return float(bad), len(_lie_pairs(cfg))


@check("liealg.generator_skewness", 0.0)
def _(cfg):
    bad = sum(liealg.skewness_failures(liealg.ring_make(k, n)) for k, n in _lie_pairs(cfg))
    return float(bad), len(_lie_pairs(cfg))


@check("liealg.generated_rank", 0.0)
def _(cfg):
    worst = 0
    for k, n in _lie_pairs(cfg):
        j = k + n
        worst = max(worst, abs(liealg.generated_rank(k, n) - j * (2 * j + 1)))
    return float(worst), len(_lie_pairs(cfg))


@check("liealg.negative_control", 0.0)
def _(cfg):
    tried, missed = liealg.negative_control(1, 1)
    return float(missed), tried


@check("liealg.weights", 0.0)
def _(cfg):
    bad, count = 0, 0
    for k, n in cfg.kn_pairs([(1, 1), (1, 2)]):
        rep = liealg.weight_check(k, n)
        bad += rep.eigen_failures + rep.shift_failures
        count += rep.shifts_checked
    return float(bad), count


# lorentz ------------------------------------------------------------------


def _hermitian(x: np.ndarray) -> np.ndarray:
    return np.einsum("m,mab->ab", x, lorentz.PAULI)


@check("lorentz.event_det_invariance", 1e-12)
def _(cfg):
    worst = 0.0
    for i in range(cfg.trials):
        rng = _rng(cfg, i)
        L = lorentz.random_sl2c(_sub(cfg, i, 1))
        ev = lorentz.Event(*rng.standard_normal(4))
        det0 = np.linalg.det(ev.m2c())
        det1 = np.linalg.det(lorentz.act_on_event(L, ev))
        worst = max(worst, _rel(abs(det1 - det0), abs(det0)))
        # light cone: a null event stays null
        xs = rng.standard_normal(3)
        null = np.concatenate([[np.linalg.norm(xs)], xs])
        img = L.m @ _hermitian(null) @ L.m.conj().T
        scale = float(np.abs(img).max()) ** 2
        worst = max(worst, _rel(abs(np.linalg.det(img)), scale))
    return worst, cfg.trials


@check("lorentz.lorentz_group_membership", 1e-10)
def _(cfg):
    worst = 0.0
    for i in range(cfg.trials):
        rho, lam, tau = lorentz.polar_decompose(lorentz.random_sl2c(_sub(cfg, i, 1)))
        L = rho @ lorentz.SL2C.boost(lam) @ tau
        lam_mat = lorentz.sl2c_to_lorentz(L)
        if not np.array_equal(lam_mat, lorentz.sl2c_to_lorentz(-L)):
            return EXACT_FAIL, i + 1
        scale = float(np.abs(lam_mat).max()) ** 2
        worst = max(
            worst,
            _rel(float(np.abs(lam_mat.T @ lorentz.MINKOWSKI @ lam_mat - lorentz.MINKOWSKI).max()), scale),
            _rel(abs(np.linalg.det(lam_mat) - 1.0), scale**2),
            max(0.0, 1.0 - lam_mat[0, 0]),
        )
    return worst, cfg.trials


@check("lorentz.boost_cross_ratio", 1e-12)
def _(cfg):
    worst = 0.0
    for i in range(cfg.trials):
        rng = _rng(cfg, i)
        vs = np.linspace(-0.8, 0.8, 4) + rng.uniform(-0.05, 0.05, 4)
        lam = float(np.exp(rng.uniform(-0.5, 0.5)))
        before = lorentz.cross_ratio(*vs)
        after = lorentz.cross_ratio(*(lorentz.boost_velocity(lam, v) for v in vs))
        worst = max(worst, _rel(abs(after - before), abs(before)))
    return worst, cfg.trials


@check("lorentz.boost_fixed_points", 1e-12)
def _(cfg):
    worst = 0.0
    grid = np.linspace(-0.9, 0.9, 7)
    for i in range(cfg.trials):
        rng = _rng(cfg, i)
        l1, l2 = np.exp(rng.uniform(-1, 1, 2))
        if lorentz.boost_velocity(l1, 1.0) != 1.0 or lorentz.boost_velocity(l1, -1.0) != -1.0:
            return EXACT_FAIL, i + 1
        C, _ = lorentz.boost_coefficients(l1)
        vh = lorentz.boost_velocity(l1, 0.0)
        worst = max(worst, _rel(abs(C - 1 / math.sqrt(1 - vh * vh)), C))
        for v in grid:
            composed = lorentz.boost_velocity(l1, lorentz.boost_velocity(l2, v))
            worst = max(worst, abs(composed - lorentz.boost_velocity(l1 * l2, v)))
    return worst, cfg.trials


@check("lorentz.projections_in_ball", 1e-12)
def _(cfg):
    worst = 0.0
    for i in range(cfg.trials):
        rng = _rng(cfg, i)
        d = rng.standard_normal(3)
        d /= np.linalg.norm(d)
        r = float(rng.uniform(0.1, 5.0))
        # hyperboloid a = 1 and the light cone a = 0
        y0 = math.sqrt(1 + r * r) * rng.choice([-1, 1])
        b = lorentz.hyperboloid_project(y0, r * d, 1.0)
        worst = max(worst, abs(b.norm2 - (abs(y0) - 1) / (abs(y0) + 1)), max(0.0, b.norm2 - 1))
        worst = max(worst, abs(lorentz.hyperboloid_project(-r, r * d, 0.0).norm2 - 1))
        # sphere of radius bb, and its equator
        bb = float(rng.uniform(0.5, 3.0))
        x0 = float(rng.uniform(-bb, bb))
        s = lorentz.sphere_project(x0, math.sqrt(bb * bb - x0 * x0) * d, bb)
        worst = max(worst, abs(s.norm2 - (bb - abs(x0)) / (bb + abs(x0))), max(0.0, s.norm2 - 1))
        worst = max(worst, abs(lorentz.sphere_project(0.0, bb * d, bb).norm2 - 1))
    return worst, cfg.trials


def smooth_potential(x: np.ndarray) -> np.ndarray:
    """A non-polynomial test potential."""
    t, a, b, c = x
    return np.array([np.sin(a) * np.cos(t), np.sin(b * t), np.cos(c + a), np.exp(0.3 * b) * np.sin(t)])


def _em_vector(f: lorentz.EMFields) -> np.ndarray:
    return np.concatenate([[f.f], f.E, f.B])


@check("lorentz.em_second_order", 0.5)
def _(cfg):
    worst = 0.0
    for i in range(3):
        point = _rng(cfg, i).uniform(-1, 1, 4)
        h = 4e-3
        f1, f2, f3 = (_em_vector(lorentz.em_decompose(smooth_potential, point, s)) for s in (h, h / 2, h / 4))
        ratio = np.linalg.norm(f1 - f2) / np.linalg.norm(f2 - f3)
        worst = max(worst, abs(ratio - 4))
    return worst, 3


@check("lorentz.em_examples", 1e-8)
def _(cfg):
    point = _rng(cfg, 0).uniform(-1, 1, 4)
    step = cfg.fd_step
    mag = lorentz.em_decompose(lambda x: np.array([0, -x[2] / 2, x[1] / 2, 0]), point, step)
    ele = lorentz.em_decompose(lambda x: np.array([0, x[0], 0, 0]), point, step)
    const = lorentz.em_decompose(lambda x: np.array([1.0, 2.0, 3.0, 4.0]), point, step)
    return max(
        float(np.abs(_em_vector(mag) - [0, 0, 0, 0, 0, 0, 1]).max()),
        float(np.abs(_em_vector(ele) - [0, -1, 0, 0, 0, 0, 0]).max()),
        float(np.abs(_em_vector(const)).max()),
    ), 3
