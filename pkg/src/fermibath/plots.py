"""Matplotlib rendering of the CLI tables.

Figures are written next to the delimited output; every number shown is
taken from the already-computed rows, so plots never recompute physics.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def _column(rows, name):
    return [r[name] for r in rows]


def plot_evolution(rows, columns, path, title=""):
    times = _column(rows, "time")
    has_oracle = "n_oracle" in columns
    fig, (ax0, ax1) = plt.subplots(2, 1, figsize=(7.0, 7.5), sharex=True)

    ax0.plot(times, _column(rows, "n_exact"), "-", lw=1.8, label="n(t) exact")
    ax0.plot(times, _column(rows, "n_weak_coupling"), "--", lw=1.4,
             label="n(t) weak coupling")
    if has_oracle:
        ax0.plot(times, _column(rows, "n_oracle"), ":", lw=1.8,
                 label="n(t) discrete-bath oracle")
    ax0.set_ylabel("occupation n(t)")
    ax0.legend(frameon=False)
    if title:
        ax0.set_title(title)

    ax1.plot(times, _column(rows, "lambda"), "-", lw=1.6, label=r"$\lambda(t)$")
    ax1.plot(times, _column(rows, "D_plus"), "--", lw=1.4, label=r"$D_{+}(t)$")
    ax1.plot(times, _column(rows, "D_minus"), "-.", lw=1.4, label=r"$D_{-}(t)$")
    ax1.set_xlabel(r"time  (MeV$^{-1}$)")
    ax1.set_ylabel("transport  (MeV)")
    ax1.legend(frameon=False)

    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_scan(rows, columns, scan_variable, path, title=""):
    x = _column(rows, scan_variable)
    fig, (ax0, ax1) = plt.subplots(2, 1, figsize=(7.0, 7.5), sharex=True)

    ax0.plot(x, _column(rows, "n_inf_fermi"), "-", lw=1.8, label="n(inf) Fermi")
    ax0.plot(x, _column(rows, "n_inf_bose"), "--", lw=1.8, label="n(inf) Bose")
    ax0.plot(x, _column(rows, "fermi_dirac"), ":", lw=1.2, label="Fermi-Dirac")
    ax0.plot(x, _column(rows, "bose_einstein"), ":", lw=1.2, label="Bose-Einstein")
    ax0.set_yscale("log")
    ax0.set_ylabel("asymptotic occupation")
    ax0.legend(frameon=False, fontsize=9)
    if title:
        ax0.set_title(title)

    ax1.plot(x, _column(rows, "ratio_fermi_bose"), "-", lw=1.8,
             label="n_F(inf) / n_B(inf)")
    ax1.plot(x, _column(rows, "tanh_ratio"), "--", lw=1.2,
             label="thermal ratio tanh")
    ax1.set_xlabel(scan_variable)
    ax1.set_ylabel("ratio")
    ax1.legend(frameon=False, fontsize=9)

    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_oracle_compare(rows, columns, path, title=""):
    times = _column(rows, "time")
    fig, (ax0, ax1) = plt.subplots(2, 1, figsize=(7.0, 7.0), sharex=True)
    ax0.plot(times, _column(rows, "n_analytic"), "-", lw=1.8, label="analytic")
    ax0.plot(times, _column(rows, "n_oracle"), "--", lw=1.6, label="oracle")
    ax0.set_ylabel("occupation n(t)")
    ax0.legend(frameon=False)
    if title:
        ax0.set_title(title)
    ax1.semilogy(times[1:], [max(v, 1e-18) for v in _column(rows, "abs_error")[1:]],
                 "-", lw=1.4)
    ax1.set_xlabel(r"time  (MeV$^{-1}$)")
    ax1.set_ylabel("|analytic - oracle|")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_kernel(rows, columns, path, title=""):
    times = _column(rows, "time")
    fig, ax = plt.subplots(figsize=(6.5, 4.2))
    ax.plot(times, _column(rows, "kernel"), "-", lw=1.8, label="K(t)")
    ax.plot(times, _column(rows, "kernel_integral"), "--", lw=1.5,
            label="integral of K")
    ax.set_xlabel(r"time  (MeV$^{-1}$)")
    ax.legend(frameon=False)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
