"""Independent reference constructions used only by the tests.

None of these call into the code paths they check: Poisson tails are summed
term by term, loss is built from Kraus operators, partial traces loop over
basis indices, and correlators are assembled entry by entry.
"""

import itertools
import math

import numpy as np


def poisson_tail_sum(alpha, cutoff, terms=400):
    lam = alpha * alpha
    total = 0.0
    for n in range(cutoff + 1, cutoff + 1 + terms):
        total += math.exp(-lam + n * math.log(lam) - math.lgamma(n + 1)) if lam > 0 else 0.0
    return total


def coherent_vector(alpha, cutoff):
    return np.array(
        [math.exp(-alpha * alpha / 2) * alpha**n / math.sqrt(math.factorial(n)) for n in range(cutoff + 1)],
        dtype=complex,
    )


def coherent_overlap(a, b):
    """<b|a> for real amplitudes."""
    return math.exp(-((a - b) ** 2) / 2)


def loss_kraus(cutoff, T):
    """K_k = sqrt((1-T)^k / k!) T^(n/2) a^k on a truncated mode."""
    a = np.diag(np.sqrt(np.arange(1, cutoff + 1, dtype=float)), k=1)
    tn = np.diag(T ** (np.arange(cutoff + 1) / 2.0))
    ops = []
    ak = np.eye(cutoff + 1)
    for k in range(cutoff + 1):
        ops.append(math.sqrt((1 - T) ** k / math.factorial(k)) * tn @ ak)
        ak = ak @ a
    return ops


def apply_kraus(matrix, dims, mode, kraus):
    """sum_k K_k rho K_k^dag with K_k embedded on ``mode`` by explicit Kronecker products."""
    out = np.zeros_like(matrix)
    for K in kraus:
        parts = [np.eye(d) for d in dims]
        parts[mode] = K
        full = parts[0]
        for p in parts[1:]:
            full = np.kron(full, p)
        out += full @ matrix @ full.conj().T
    return out


def partial_trace_loops(matrix, dims, keep):
    """Reference partial trace by summing over every basis index."""
    keep = sorted(keep)
    traced = [i for i in range(len(dims)) if i not in keep]
    kdims = [dims[i] for i in keep]
    tdims = [dims[i] for i in traced]
    dk = int(np.prod(kdims))
    out = np.zeros((dk, dk), dtype=complex)

    def flat(local):
        return int(np.ravel_multi_index(tuple(local), dims))

    for ki in itertools.product(*[range(d) for d in kdims]):
        for kj in itertools.product(*[range(d) for d in kdims]):
            s = 0.0
            for t in itertools.product(*[range(d) for d in tdims]):
                li = [0] * len(dims)
                lj = [0] * len(dims)
                for pos, m in enumerate(keep):
                    li[m], lj[m] = ki[pos], kj[pos]
                for pos, m in enumerate(traced):
                    li[m] = lj[m] = t[pos]
                s += matrix[flat(li), flat(lj)]
            out[np.ravel_multi_index(ki, kdims), np.ravel_multi_index(kj, kdims)] = s
    return out


def random_density(dim, rng, rank=None):
    rank = rank or dim
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    m = g @ g.conj().T
    return m / np.trace(m).real


def bell_state_matrix(R):
    """(1-R)|Psi-><Psi-| + R|Psi+><Psi+| written entry by entry in |HH>,|HV>,|VH>,|VV>."""
    m = np.zeros((4, 4), dtype=complex)
    m[1, 1] = m[2, 2] = 0.5
    m[1, 2] = m[2, 1] = R - 0.5
    return m
