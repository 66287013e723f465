"""Optional figure rendering for analysis reports.

Writes PNG charts plus a delimited summary.csv next to them.  Only
imported when the CLI is asked for figures, so matplotlib stays an
optional runtime dependency of the report path.
"""

from __future__ import annotations

import csv
import os
from fractions import Fraction


def render_figures(report, outdir):
    """Render charts for one analysis report; returns the files written."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    os.makedirs(outdir, exist_ok=True)
    written = []
    written.append(_exponents_figure(report, outdir, plt))
    written.append(_residue_figure(report, outdir, plt))
    fig = _residual_figure(report, outdir, plt)
    if fig:
        written.append(fig)
    written.append(_summary_csv(report, outdir))
    return written


def _points(report):
    return report["input"]["points"]


def _exponents_figure(report, outdir, plt):
    fig, ax = plt.subplots(figsize=(6, 4))
    pts = _points(report)
    for i, pt in enumerate(pts):
        values = [float(Fraction(e)) for e in pt["exponents"]]
        ax.plot([i] * len(values), values, "o", markersize=7)
    ax.set_xticks(range(len(pts)))
    ax.set_xticklabels([pt["location"] for pt in pts])
    ax.set_xlabel("singular point")
    ax.set_ylabel("exponent")
    ax.set_title(
        f"local exponents (rank {report['input']['rank']}, "
        f"p = {report['input']['prime']})"
    )
    ax.grid(True, alpha=0.3)
    path = os.path.join(outdir, "exponents.png")
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path


def _residue_figure(report, outdir, plt):
    import math

    p = report["input"]["prime"]
    pts = _points(report)
    classes = {}
    cond = report.get("conditions") or {}
    # recompute the display classes from the witnesses-free data we have:
    # place each point on the circle of residue classes 0..p-1 plus inf
    from .fuchsian import SingularPoint
    from .conditions import residue_class

    slots = [str(i) for i in range(p)] + ["inf"]
    angle = {c: 2 * math.pi * i / len(slots) for i, c in enumerate(slots)}
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.add_patch(plt.Circle((0, 0), 1.0, fill=False, alpha=0.4))
    for c in slots:
        x, y = math.cos(angle[c]), math.sin(angle[c])
        ax.annotate(c, (1.15 * x, 1.15 * y), ha="center", va="center",
                    fontsize=8, alpha=0.6)
    for pt in pts:
        cls = str(residue_class(SingularPoint.parse(pt["location"]), p))
        classes.setdefault(cls, []).append(pt["location"])
    for cls, members in classes.items():
        x, y = math.cos(angle[cls]), math.sin(angle[cls])
        color = "tab:red" if len(members) > 1 else "tab:blue"
        ax.plot([x], [y], "o", color=color, markersize=10)
        ax.annotate(",".join(members), (0.8 * x, 0.8 * y),
                    ha="center", va="center", fontsize=9)
    c1 = cond.get("c1", {})
    status = "pass" if c1.get("pass") else "FAIL"
    ax.set_title(f"residue disks mod {p} (c1 {status})")
    ax.set_xlim(-1.4, 1.4)
    ax.set_ylim(-1.4, 1.4)
    ax.set_aspect("equal")
    ax.axis("off")
    path = os.path.join(outdir, "residue_disks.png")
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path


def _residual_figure(report, outdir, plt):
    frob = report.get("frobenius")
    if not frob or not frob.get("per_point"):
        return None
    entries = frob["per_point"]
    labels = [e["point"] for e in entries]
    digits = report["input"]["precision"]["p_digits"]
    cap = digits + 5
    values = [
        cap if e["residual_valuation"] == "inf" else e["residual_valuation"]
        for e in entries
    ]
    thresholds = [
        cap if e["threshold"] == "inf" else e["threshold"] for e in entries
    ]
    fig, ax = plt.subplots(figsize=(6, 4))
    xs = range(len(entries))
    ax.bar(xs, values, color="tab:blue", alpha=0.75,
           label="residual valuation")
    ax.plot(xs, thresholds, "r_", markersize=24, label="threshold")
    for x, e in zip(xs, entries):
        if e["residual_valuation"] == "inf":
            ax.annotate("exact", (x, cap), ha="center", va="bottom")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(labels)
    ax.set_xlabel("singular point")
    ax.set_ylabel("p-adic valuation")
    ax.set_title(f"base-change residual per point (method {frob['method']})")
    ax.legend(loc="lower right")
    path = os.path.join(outdir, "residual_profile.png")
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path


def _summary_csv(report, outdir):
    path = os.path.join(outdir, "summary.csv")
    coh = report.get("cohomology") or {}
    h0 = {e["point"]: e["value"] for e in coh.get("local_h0", [])}
    res = {e["point"]: e["resonant"] for e in coh.get("resonance_flags", [])}
    frob = report.get("frobenius") or {}
    residuals = {
        e["point"]: e["residual_valuation"]
        for e in frob.get("per_point", [])
    }
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["point", "exponents", "local_h0_end", "resonant",
             "residual_valuation"]
        )
        for pt in _points(report):
            loc = pt["location"]
            writer.writerow(
                [
                    loc,
                    " ".join(pt["exponents"]),
                    h0.get(loc, ""),
                    res.get(loc, ""),
                    residuals.get(loc, ""),
                ]
            )
    return path
