"""Log-log SVG plots of sweep results."""
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_STYLE = {"svg.hashsalt": "emscale", "svg.fonttype": "none", "path.simplify": False}


def _series(rows, quantity):
    series = {}
    for r in rows:
        if not r.feasible:
            continue
        value = getattr(r, quantity)
        if value > 0:
            series.setdefault((r.technology, r.q_mode), []).append((r.d, value))
    return {k: sorted(v) for k, v in series.items()}


def plot_sweep(rows, path, quantity="p_load", ylabel="Load power (W)", show_max=True):
    """Write one labelled poly-line per (technology, Q mode) series to ``path`` as SVG.

    With ``show_max`` the theoretical maximum power of each Q mode is drawn
    dashed for reference.
    """
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(6.4, 4.8))
        for (tech, mode), pts in _series(rows, quantity).items():
            d, y = zip(*pts)
            ax.plot([v * 1e3 for v in d], y, marker="o", label=f"{tech}, Q {mode}")
        if show_max:
            for (tech, mode), pts in _series(rows, "p_max").items():
                if tech != rows[0].technology:
                    continue
                d, y = zip(*pts)
                ax.plot([v * 1e3 for v in d], y, linestyle="--", color="black",
                        linewidth=0.8, label=f"maximum, Q {mode}")
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("Generator dimension (mm)")
        ax.set_ylabel(ylabel)
        ax.grid(True, which="both", linewidth=0.3)
        ax.legend(fontsize="small")
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
