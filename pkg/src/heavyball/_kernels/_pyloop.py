"""Pure-numpy implementation of the stochastic heavy-ball chunk loop."""
import numpy as np


def hb_chunk(x, v, lam, cubic, alpha, eps, sigma1, sigma2, z2, z1, f_stop):
    """Advance the stochastic heavy-ball iteration through one noise chunk.

    Runs ``z2.shape[0]`` iterations in place on ``x`` and ``v``:

        v <- (1 - alpha*eps) v - eps (grad f(x) + sigma2 * z2[i])
        x <- x + eps (v + sigma1 * z1[i])

    where f is the diagonal quadratic x'Lx/2 (``cubic=False``) or the
    cubic-regularized x'Lx + |x|^3 (``cubic=True``), L = diag(lam).

    Returns the 0-based index of the first iteration after which
    f(x) < f_stop, or -1 if the chunk completes without hitting.
    ``z1`` is only read when sigma1 != 0.
    """
    a = 1.0 - alpha * eps
    n = z2.shape[0]
    for i in range(n):
        if cubic:
            g = (2.0 * lam + 3.0 * np.linalg.norm(x)) * x
        else:
            g = lam * x
        v[:] = a * v - eps * (g + sigma2 * z2[i])
        if sigma1 != 0.0:
            x[:] = x + eps * (v + sigma1 * z1[i])
        else:
            x[:] = x + eps * v
        if cubic:
            fval = lam @ (x * x) + np.linalg.norm(x) ** 3
        else:
            fval = 0.5 * (lam @ (x * x))
        if fval < f_stop:
            return i
    return -1
