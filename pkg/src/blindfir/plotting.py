"""Line plots built purely from a results CSV."""
from __future__ import annotations

from pathlib import Path

from .evaluation import read_results_csv


def plot_results_csv(csv_path, out_path=None, title: str | None = None) -> Path:
    """Draw MSE curves from ``csv_path`` and save them as a PNG.

    With a single SNR and several channel angles the x axis is delta (MSE
    versus delta); otherwise it is SNR, one line per method, window length
    and delta.
    """
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    csv_path = Path(csv_path)
    out_path = Path(out_path) if out_path else csv_path.with_suffix(".png")
    rows = read_results_csv(csv_path)
    if not rows:
        raise ValueError(f"{csv_path} has no result rows")

    snrs = sorted({r["snr_db"] for r in rows})
    deltas = sorted({r["delta"] for r in rows if r["delta"] is not None})
    windows = sorted({r["M"] for r in rows})
    versus_delta = len(snrs) == 1 and len(deltas) > 1

    lines: dict[str, list[tuple[float, float]]] = {}
    for r in rows:
        parts = [r["method"]]
        if len(windows) > 1:
            parts.append(f"M={r['M']}")
        if versus_delta:
            x = r["delta"]
        else:
            x = r["snr_db"]
            if len(deltas) > 1:
                parts.append(f"delta={r['delta']:.4g}")
        lines.setdefault(", ".join(parts), []).append((x, r["mse_db"]))

    fig, ax = plt.subplots(figsize=(6, 4.2))
    for label, pts in lines.items():
        pts.sort()
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o" if "SSS" in label else "s",
                linestyle="-" if "SSS" in label else "--", label=label)
    if versus_delta:
        ax.set_xscale("log")
        ax.set_xlabel("delta (rad)")
        ax.set_title(title or f"MSE versus delta, SNR = {snrs[0]:g} dB")
    else:
        ax.set_xlabel("SNR (dB)")
        ax.set_title(title or "MSE versus SNR")
    ax.set_ylabel("MSE (dB)")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return out_path
