"""Method parameters: interface penalty and stabilization weights."""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial


@dataclass(frozen=True)
class MethodParams:
    """Penalty and stabilization constants.

    ``beta`` is the dimensionless interface penalty; ``c_bulk[l-1]`` and
    ``c_skel[l-1]`` weight the order-l derivative-jump terms. Zero
    stabilization constants switch the ghost penalties off (used by the
    robustness experiments). Quadrature orders default to 2p+1 when unset.
    """

    beta: float
    c_bulk: tuple[float, ...]
    c_skel: tuple[float, ...]
    quad_order_bulk: int | None = None
    quad_order_segment: int | None = None

    def __post_init__(self):
        if self.beta <= 0.0:
            raise ValueError("beta must be positive")
        if any(c < 0.0 for c in self.c_bulk) or any(c < 0.0 for c in self.c_skel):
            raise ValueError("stabilization constants must be >= 0")

    @staticmethod
    def default(
        p: int,
        p_skeleton: int | None = None,
        beta: float | None = None,
        c_scale: float = 1.0,
        quad_order_bulk: int | None = None,
        quad_order_segment: int | None = None,
    ) -> "MethodParams":
        """Defaults beta = 10 p^2 and c_l = 1e-3 / l! for l = 1..p.

        ``c_scale`` rescales every stabilization constant; 0 disables the
        ghost penalties entirely.
        """
        p_max = max(p, p_skeleton or p)
        cs = tuple(c_scale * 1e-3 / factorial(l) for l in range(1, p_max + 1))
        return MethodParams(
            beta=float(beta) if beta is not None else 10.0 * p * p,
            c_bulk=cs,
            c_skel=cs,
            quad_order_bulk=quad_order_bulk,
            quad_order_segment=quad_order_segment,
        )
