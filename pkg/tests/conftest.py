"""Shared test helpers: seeded random states and an independent brute-force
discord reference.

The grid oracle below deliberately avoids every code path of the library
implementation (closed-form 2x2 eigenvalues, complement block instead of a
second projector sandwich) so that agreement between the two is meaningful.
"""

from __future__ import annotations

import math

import numpy as np
import pytest


def ginibre_density(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Random full-rank density matrix, Hilbert-Schmidt distributed."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def haar_pure(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def haar_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def grid_discord_oracle(rho: np.ndarray, n_theta: int, n_phi: int,
                        base: float = 2.0) -> float:
    """Brute-force discord of a two-qubit state over a regular measurement grid.

    Measurements are rank-1 projectors on the first qubit parametrized by
    theta in [0, pi] (inclusive) and phi in [0, 2*pi) on a product grid.
    All 2x2 spectra come from the trace/determinant closed form.
    """
    rho = np.asarray(rho, dtype=complex)
    blocks = rho.reshape(2, 2, 2, 2)            # [s, e, s', e']
    B = blocks.transpose(0, 2, 1, 3)            # [s, s', e, e']
    rho_e = B[0, 0] + B[1, 1]
    rho_s = np.trace(blocks, axis1=1, axis2=3)
    ln_base = math.log(base)

    thetas = np.linspace(0.0, np.pi, n_theta)
    phis = np.linspace(0.0, 2.0 * np.pi, n_phi, endpoint=False)
    c = np.cos(thetas / 2.0)[:, None]
    s = np.sin(thetas / 2.0)[:, None]
    cs = c * s
    ph = np.exp(1j * phis)[None, :]

    def cond_term(m00, m01, m10, m11):
        # sum_i w_i(-log w_i) + p log p for one unnormalized block, in nats
        p = (m00 + m11).real
        det = (m00 * m11 - m01 * m10).real
        half = p / 2.0
        r = np.sqrt(np.clip(half * half - det, 0.0, None))
        out = np.zeros_like(p)
        for w in (half + r, half - r):
            w = np.clip(w, 0.0, None)
            out -= np.where(w > 1e-300, w * np.log(w), 0.0)
        out += np.where(p > 1e-300, p * np.log(p), 0.0)
        return out

    m0 = {}
    for a in range(2):
        for b in range(2):
            m0[a, b] = (c * c * B[0, 0, a, b] + s * s * B[1, 1, a, b]
                        + cs * (ph * B[0, 1, a, b] + np.conj(ph) * B[1, 0, a, b]))
    term = cond_term(m0[0, 0], m0[0, 1], m0[1, 0], m0[1, 1])
    term += cond_term(rho_e[0, 0] - m0[0, 0], rho_e[0, 1] - m0[0, 1],
                      rho_e[1, 0] - m0[1, 0], rho_e[1, 1] - m0[1, 1])
    best = float(term.min()) / ln_base

    def ent2(mat):
        tr = np.trace(mat).real
        det = np.linalg.det(mat).real
        r = math.sqrt(max(tr * tr / 4.0 - det, 0.0))
        out = 0.0
        for w in (tr / 2.0 + r, tr / 2.0 - r):
            if w > 1e-15:
                out -= w * math.log(w)
        return out / ln_base

    w_se = np.linalg.eigvalsh(rho)
    s_se = -sum(float(w) * math.log(float(w)) for w in w_se if w > 1e-15) / ln_base
    return ent2(rho_s) - s_se + best


# ---------------------------------------------------------------------------
# Acceptance reporting: every criterion records one PASS/FAIL line, echoed in
# the terminal summary so the outcome is visible regardless of capture mode.

def pytest_configure(config):
    config._acceptance_lines = []


@pytest.fixture(scope="session")
def acceptance(request):
    lines = request.config._acceptance_lines

    def record(num: int, ok: bool, detail: str) -> bool:
        line = f"[acceptance] criterion {num}: {'PASS' if ok else 'FAIL'} - {detail}"
        lines.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
