"""Finite-difference verification of reverse-mode gradients.

The checker compares every requested parameter component's analytic
gradient against a central difference ``(f(x+h) - f(x-h)) / 2h`` and
reports the per-parameter maximum of

    |g_ad - g_fd| / max(1, |g_fd|)

so tiny gradients are compared absolutely and large ones relatively.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .. import prng
from ..errors import ContractError, DeterminismError
from .tensor import Tape, Tensor, backward


@dataclass
class ParamCheck:
    name: str
    max_rel_error: float
    n_checked: int
    worst_index: int


@dataclass
class GradCheckReport:
    h: float
    tol: float
    passed: bool
    max_rel_error: float
    params: list[ParamCheck] = field(default_factory=list)

    def summary(self) -> str:
        lines = [
            f"grad_check: h={self.h:g} tol={self.tol:g} "
            f"max_rel_error={self.max_rel_error:.3e} "
            f"{'PASS' if self.passed else 'FAIL'}"
        ]
        for p in self.params:
            lines.append(
                f"  {p.name:<32s} max_rel={p.max_rel_error:.3e} "
                f"(n={p.n_checked})"
            )
        return "\n".join(lines)


def grad_check(
    f: Callable[[], Tensor],
    params: dict[str, Tensor],
    h: float = 1e-3,
    tol: float = 1e-2,
    max_components: int | None = None,
    seed: int = 0,
) -> GradCheckReport:
    """Check analytic gradients of ``f`` w.r.t. ``params`` against central FD.

    ``f`` must be a deterministic closure over ``params`` returning a
    scalar Tensor (disable dropout).  Determinism is verified by double
    evaluation before any differencing.  ``max_components`` caps the number
    of components checked per parameter (a seed-fixed subsample); by
    default every component is checked.
    """
    if not params:
        raise ContractError("no parameters to check")

    def eval_plain() -> float:
        return f().item()

    v1, v2 = eval_plain(), eval_plain()
    if v1 != v2:
        raise DeterminismError(
            f"f() is not deterministic ({v1!r} != {v2!r}); "
            "disable dropout or fix the PRNG stream"
        )

    with Tape():
        loss = f()
        grads = backward(loss, params)

    report = GradCheckReport(h=h, tol=tol, passed=True, max_rel_error=0.0)
    for name, p in params.items():
        flat = p.data.reshape(-1)
        g_ad = grads[name].data.reshape(-1)
        n = flat.size
        if max_components is not None and n > max_components:
            idx = prng.stream(seed, "gradcheck", name).choice(
                n, size=max_components, replace=False
            )
            idx = np.sort(idx)
        else:
            idx = np.arange(n)
        worst = 0.0
        worst_i = -1
        for i in idx:
            keep = flat[i]
            flat[i] = keep + h
            f_plus = eval_plain()
            flat[i] = keep - h
            f_minus = eval_plain()
            flat[i] = keep
            g_fd = (f_plus - f_minus) / (2.0 * h)
            err = abs(float(g_ad[i]) - g_fd) / max(1.0, abs(g_fd))
            if err > worst:
                worst, worst_i = err, int(i)
        report.params.append(ParamCheck(name, worst, len(idx), worst_i))
        report.max_rel_error = max(report.max_rel_error, worst)
    report.passed = report.max_rel_error < tol
    return report
