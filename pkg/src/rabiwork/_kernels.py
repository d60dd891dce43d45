"""Compiled inner loops for the cached-propagator integrator.

Both kernels advance a state through a run of steps, applying for each step
two cached half-step unitaries (indices jr, jl into the propagator table)
followed by exact diagonal sigma_z phase corrections for the off-grid drive
residuals, and stream the work integrand into a composite-Simpson
accumulator carried across calls.

carry layout: [w_even, y_panel_start, y_panel_mid, have_mid_flag].
"""

import numba as nb
import numpy as np


@nb.njit(cache=True, fastmath=False)
def advance_columns(units, jr, jl, dfr, dfl, wdot, half, h, data, szd, nf, carry):
    """Sqrt-weighted pure columns (pure state: a single column)."""
    n = len(jr)
    w_even, y0, y1 = carry[0], carry[1], carry[2]
    have_mid = int(carry[3])
    dim = data.shape[0]
    ncols = data.shape[1]
    for i in range(n):
        tmp = np.dot(units[jr[i]], data)
        ph = np.exp(-1j * half * dfr[i])
        phc = np.conj(ph)
        for r in range(nf):
            for c in range(ncols):
                tmp[r, c] *= phc
        for r in range(nf, dim):
            for c in range(ncols):
                tmp[r, c] *= ph
        data = np.dot(units[jl[i]], tmp)
        ph = np.exp(-1j * half * dfl[i])
        phc = np.conj(ph)
        for r in range(nf):
            for c in range(ncols):
                data[r, c] *= phc
        for r in range(nf, dim):
            for c in range(ncols):
                data[r, c] *= ph
        szv = 0.0
        for r in range(dim):
            acc = 0.0
            for c in range(ncols):
                v = data[r, c]
                acc += v.real * v.real + v.imag * v.imag
            szv += szd[r] * acc
        y2 = wdot[i] * 0.5 * szv
        if have_mid == 1:
            w_even += h / 3.0 * (y0 + 4.0 * y1 + y2)
            y0 = y2
            have_mid = 0
        else:
            y1 = y2
            have_mid = 1
    carry[0], carry[1], carry[2], carry[3] = w_even, y0, y1, float(have_mid)
    return data


@nb.njit(cache=True, fastmath=False)
def advance_density(units, jr, jl, dfr, dfl, wdot, half, h, rho, szd, nf, carry):
    """Full density matrix: unitary sandwich only (dissipation is applied
    between kernel calls)."""
    n = len(jr)
    w_even, y0, y1 = carry[0], carry[1], carry[2]
    have_mid = int(carry[3])
    dim = rho.shape[0]
    for i in range(n):
        step = np.dot(units[jl[i]], units[jr[i]])
        tmp = np.dot(step, rho)
        rho = np.dot(tmp, np.conj(step).T)
        ph = np.exp(1j * h * (dfr[i] + dfl[i]))
        phc = np.conj(ph)
        for r in range(nf):
            for c in range(nf, dim):
                rho[r, c] *= ph
        for r in range(nf, dim):
            for c in range(nf):
                rho[r, c] *= phc
        szv = 0.0
        for r in range(dim):
            szv += szd[r] * rho[r, r].real
        y2 = wdot[i] * 0.5 * szv
        if have_mid == 1:
            w_even += h / 3.0 * (y0 + 4.0 * y1 + y2)
            y0 = y2
            have_mid = 0
        else:
            y1 = y2
            have_mid = 1
    carry[0], carry[1], carry[2], carry[3] = w_even, y0, y1, float(have_mid)
    return rho


def carry_value(carry, h) -> float:
    """Running integral consistent with the streaming accumulator: exact
    Simpson at even step counts, trapezoid-corrected at odd ones."""
    if int(carry[3]) == 1:
        return carry[0] + 0.5 * h * (carry[1] + carry[2])
    return carry[0]
