"""Static figures written next to the CSV/JSON outputs (PNG, Agg backend)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .manifold import canonicalize, disc_project  # noqa: E402


def _grid(count: int):
    cols = int(np.ceil(np.sqrt(count)))
    rows = int(np.ceil(count / cols))
    fig, axes = plt.subplots(rows, cols, figsize=(2.6 * cols, 2.6 * rows), squeeze=False)
    for ax in axes.ravel()[count:]:
        ax.axis("off")
    return fig, axes.ravel()


def disc_figure(path, dirs, ellipses=None, title: str = "") -> None:
    """One moduli disc per rotor, with the fitted half-ellipse when available."""
    xy = disc_project(canonicalize(np.asarray(dirs, dtype=float)))
    n = xy.shape[1]
    fig, axes = _grid(n)
    rim = np.linspace(0, 2 * np.pi, 200)
    for i in range(n):
        ax = axes[i]
        ax.plot(np.cos(rim), np.sin(rim), color="0.7", lw=0.8)
        ax.scatter(xy[:, i, 0], xy[:, i, 1], s=4, color="tab:blue")
        if ellipses is not None:
            psi, b = ellipses.psi[i], np.cos(ellipses.eta[i])
            t = np.linspace(0, np.pi, 100)
            # half with the bulge toward (sin psi, -cos psi)
            ex, ey = np.cos(t), -b * np.sin(t)
            ax.plot(ex * np.cos(psi) - ey * np.sin(psi), ex * np.sin(psi) + ey * np.cos(psi),
                    color="tab:red", lw=1.0)
        ax.set_aspect("equal")
        ax.set_xlim(-1.05, 1.05)
        ax.set_ylim(-1.05, 1.05)
        ax.set_xticks([])
        ax.set_yticks([])
        ax.set_title(f"rotor {i + 1}", fontsize=8)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def scatter_figure(path, phases, labels, title: str = "") -> None:
    """Phase of every rotor against rotor 1, coloured by branch."""
    phases = np.asarray(phases, dtype=float) / np.pi
    n = phases.shape[1]
    fig, axes = _grid(n - 1)
    for i in range(1, n):
        ax = axes[i - 1]
        ax.scatter(phases[:, 0], phases[:, i], c=labels, s=4, cmap="tab10", vmin=-1, vmax=9)
        ax.set_xlim(0, 1)
        ax.set_ylim(0, 1)
        ax.set_xlabel(r"$\theta_1/\pi$", fontsize=8)
        ax.set_ylabel(rf"$\theta_{{{i + 1}}}/\pi$", fontsize=8)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def sensitivity_figure(path, rows) -> None:
    r = np.array([x.ratio for x in rows])
    fig, (a1, a2) = plt.subplots(1, 2, figsize=(8, 3))
    a1.semilogx(r, [x.kappa for x in rows], marker=".")
    a1.set_xlabel(r"$L_c/R$")
    a1.set_ylabel(r"$\kappa$")
    a2.semilogx(r, [x.sigma_min for x in rows], marker=".")
    a2.set_xlabel(r"$L_c/R$")
    a2.set_ylabel(r"$\sigma_{min}$")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def trajectory_figure(path, rows) -> None:
    fig, (a1, a2) = plt.subplots(1, 2, figsize=(8, 3))
    for kind, style in (("branch", "-"), ("decoherent", "--"), ("random", ":")):
        sel = [x for x in rows if x.kind == kind]
        if not sel:
            continue
        lam = np.array([x.lam for x in sel]) / np.pi
        a1.plot(lam, np.array([x.singular_values for x in sel]), style, lw=1)
        a2.semilogy(lam, [x.kappa for x in sel], style, label=kind)
    a1.set_xlabel(r"$\lambda/\pi$")
    a1.set_ylabel(r"$\sigma_k$")
    a2.set_xlabel(r"$\lambda/\pi$")
    a2.set_ylabel(r"$\kappa$")
    a2.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
