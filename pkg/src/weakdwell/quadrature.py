"""Adaptive Simpson quadrature for smooth scalar integrands."""
import math

from .errors import QuadratureNonConvergence


def adaptive_simpson(func, a, b, tol=1e-10, max_depth=40):
    """Integrate ``func`` over ``[a, b]`` to absolute tolerance ``tol``.

    Each panel is split until the two-half Simpson estimate agrees with the
    whole-panel estimate to ``15 * tol_local``; the accepted value carries the
    Richardson correction ``(S_halves - S_whole) / 15``. The tolerance is
    halved at each split so the panel errors sum to at most ``tol``.

    Raises
    ------
    QuadratureNonConvergence
        If any panel still fails the test at ``max_depth`` splits.
    """
    if a == b:
        return 0.0
    if b < a:
        return -adaptive_simpson(func, b, a, tol, max_depth)

    fa, fb = func(a), func(b)
    m = 0.5 * (a + b)
    fm = func(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    # explicit stack keeps deep refinement off the interpreter recursion limit
    total = 0.0
    compensation = 0.0
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        lo, hi, f_lo, f_mid, f_hi, estimate, local_tol, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        left_mid = 0.5 * (lo + mid)
        right_mid = 0.5 * (mid + hi)
        f_lm, f_rm = func(left_mid), func(right_mid)
        left = (mid - lo) / 6.0 * (f_lo + 4.0 * f_lm + f_mid)
        right = (hi - mid) / 6.0 * (f_mid + 4.0 * f_rm + f_hi)
        delta = left + right - estimate
        if abs(delta) <= 15.0 * local_tol:
            # Kahan summation of accepted panels
            y = left + right + delta / 15.0 - compensation
            s = total + y
            compensation = (s - total) - y
            total = s
            continue
        if depth >= max_depth:
            raise QuadratureNonConvergence(
                f"no convergence on [{lo}, {hi}] after {max_depth} subdivisions"
            )
        half_tol = 0.5 * local_tol
        stack.append((mid, hi, f_mid, f_rm, f_hi, right, half_tol, depth + 1))
        stack.append((lo, mid, f_lo, f_lm, f_mid, left, half_tol, depth + 1))
    if not math.isfinite(total):
        raise QuadratureNonConvergence("integral is not finite")
    return total
