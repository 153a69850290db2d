"""Matplotlib figure rendering for the CLI report paths.

Every function writes a PNG next to the delimited output and returns the
path. Rendering is headless (Agg); no interactive windows are opened.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_profile(grid, values, params, path):
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 5), sharex=True)
    ax1.plot(grid.x, np.abs(values), "k-", lw=1.2, label="|u|")
    ax1.plot(grid.x, np.real(values), "C0-", lw=0.8, label="Re u")
    ax1.plot(grid.x, np.imag(values), "C3-", lw=0.8, label="Im u")
    ax1.set_ylabel("profile")
    ax1.legend(loc="upper right", fontsize=8)
    ax1.set_title(f"sigma={params.sigma:g}, omega={params.omega:g}, c={params.c:g}")
    ax2.semilogy(grid.x, np.abs(values) + 1e-300, "k-", lw=0.8)
    ax2.set_ylabel("|u| (log)")
    ax2.set_xlabel("x")
    return _save(fig, path)


def plot_threshold_root(zs, fvals, z0, sigma, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(zs, fvals, "C0-", lw=1.0)
    ax.axhline(0.0, color="k", lw=0.6)
    ax.axvline(z0, color="C3", ls="--", lw=0.8, label=f"z0 = {z0:.6f}")
    ax.set_xlabel("z")
    ax.set_ylabel("degeneracy indicator")
    ax.set_title(f"sigma = {sigma:g}")
    ax.legend()
    return _save(fig, path)


def plot_determinant_scan(cs, dets, c_crit, sigma, omega, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(cs, dets, "C0-", lw=1.0)
    ax.axhline(0.0, color="k", lw=0.6)
    ax.axvline(c_crit, color="C3", ls="--", lw=0.8, label=f"c_crit = {c_crit:.6f}")
    ax.set_xlabel("c")
    ax.set_ylabel("det of the action Hessian")
    ax.set_title(f"sigma = {sigma:g}, omega = {omega:g}")
    ax.legend()
    return _save(fig, path)


def plot_run_series(records, path, eps0=None):
    t = np.array([r["t"] for r in records])
    fig, axes = plt.subplots(2, 2, figsize=(10, 7))
    ax = axes[0, 0]
    if "orbit_dist" in records[0]:
        ax.plot(t, [r["orbit_dist"] for r in records], "C0-", label="orbit distance")
    if eps0 is not None:
        ax.axhline(eps0, color="C3", ls="--", lw=0.8, label="exit threshold")
    ax.set_xlabel("t"); ax.set_ylabel("H1 distance"); ax.legend(fontsize=8)
    ax = axes[0, 1]
    if "lambda" in records[0]:
        ax.plot(t, [r["lambda"] for r in records], "C1-", label="lambda")
    if "eps_h1" in records[0]:
        ax.plot(t, [r["eps_h1"] for r in records], "C2-", label="||eps||_H1")
    ax.set_xlabel("t"); ax.legend(fontsize=8)
    ax = axes[1, 0]
    if "I" in records[0]:
        ax.plot(t, [r["I"] for r in records], "C0-", label="I")
        ax.plot(t, [r["I1"] for r in records], "C1:", lw=0.8, label="I1")
        ax.plot(t, [r["I2"] for r in records], "C2:", lw=0.8, label="I2")
    ax.set_xlabel("t"); ax.set_ylabel("virial functionals"); ax.legend(fontsize=8)
    ax = axes[1, 1]
    for key, style in (("M", "C0-"), ("P", "C1-"), ("E", "C2-")):
        if key in records[0]:
            base = records[0][key]
            drift = [abs(r[key] - base) / max(abs(base), 1e-30) for r in records]
            ax.semilogy(t, np.array(drift) + 1e-17, style, lw=0.9, label=f"{key} drift")
    ax.set_xlabel("t"); ax.set_ylabel("relative drift"); ax.legend(fontsize=8)
    return _save(fig, path)


def plot_sweep_summary(rows, path):
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    d1s = [r["delta1"] for r in rows]
    ax1.loglog(d1s, [r["escape_time"] if r["escaped"] else np.nan for r in rows],
               "C0o-", label="escape time")
    ax1.set_xlabel("delta1"); ax1.set_ylabel("t_exit"); ax1.legend(fontsize=8)
    ax2.loglog(d1s, [r["a_u0"] for r in rows], "C1o-", label="A(u0)")
    ax2.loglog(d1s, [r["a_u0_predicted"] for r in rows], "k--", lw=0.8,
               label="leading-order prediction")
    ax2.set_xlabel("delta1"); ax2.legend(fontsize=8)
    return _save(fig, path)
