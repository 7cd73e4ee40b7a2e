"""Text, JSON and radar-CSV renderings of certification reports."""
from __future__ import annotations

import csv
import io
import json
from typing import Sequence

from .hypotheses import CertificationReport


def _fmt(p: float) -> str:
    return "1" if p == 1.0 else f"{p:.4e}"


def pvalue_table(rows: Sequence[tuple[str, CertificationReport]]) -> str:
    """One row per dataset, one column per hypothesis plus the null hypothesis."""
    labels = [r.hypothesis.label for r in rows[0][1].results] + ["H_null"]
    body = [[name] + [_fmt(r.bound) for r in rep.results] + [_fmt(rep.null_bound.exact)] for name, rep in rows]
    header = ["dataset"] + labels
    widths = [max(len(str(x[i])) for x in [header] + body) for i in range(len(header))]
    line = lambda cells: " | ".join(str(c).ljust(w) for c, w in zip(cells, widths))
    out = [line(header), "-+-".join("-" * w for w in widths)]
    out += [line(b) for b in body]
    return "\n".join(out)


def render_text(rows: Sequence[tuple[str, CertificationReport]]) -> str:
    parts = ["Upper bounds on the p-values", "", pvalue_table(rows), ""]
    for name, rep in rows:
        mode = "exact expectations" if rep.exact else "sampled"
        parts.append(f"[{name}] decision: {rep.decision}"
                     + (f" {rep.accepted}" if rep.accepted else "")
                     + (f" (qualifying: {', '.join(rep.qualifying)})" if rep.decision == "ambiguous" else "")
                     + f"  mu={rep.mu}  M={rep.M}  ({mode})")
        for res in rep.results:
            parts.append(f"  {res.hypothesis.label}: bound {_fmt(res.bound)}")
            for cond, st in zip(res.hypothesis.conditions, res.statistics):
                parts.append(f"    {cond.describe():<60s} d = {st.d:+.6f}")
        parts.append(f"  H_null: bound {_fmt(rep.null_bound.exact)} (simplified {_fmt(rep.null_bound.simplified)})")
        parts.append("")
    return "\n".join(parts)


def report_dict(rep: CertificationReport) -> dict:
    return {
        "decision": rep.decision,
        "accepted": rep.accepted,
        "qualifying": rep.qualifying,
        "mu": rep.mu,
        "M": rep.M,
        "exact": rep.exact,
        "hypotheses": [
            {
                "label": res.hypothesis.label,
                "blocks": [list(b.indices) for b in res.hypothesis.partition.blocks],
                "pvalue_bound": res.bound,
                "conditions": [
                    {
                        "block": list(st.block.indices),
                        "phase": st.phase.symbol,
                        "condition": cond.describe(),
                        "fidelity": st.fidelity,
                        "superset_max": st.superset_max,
                        "argmax": None if st.argmax is None
                        else {"block": list(st.argmax[0].indices), "phase": st.argmax[1].symbol},
                        "d": st.d,
                        "mu": st.mu,
                    }
                    for cond, st in zip(res.hypothesis.conditions, res.statistics)
                ],
            }
            for res in rep.results
        ],
        "null": {"pvalue_bound": rep.null_bound.exact, "simplified_bound": rep.null_bound.simplified},
        "fidelities": [
            {"subset": list(s.indices), "phase": p.symbol, "D": f.diagonal, "A": f.antidiagonal,
             "F": f.fidelity, "mu": f.mu}
            for (s, p), f in sorted(rep.fidelities.items(), key=lambda kv: (kv[0][0].sort_key(), -int(kv[0][1])))
        ],
    }


def render_json(rows: Sequence[tuple[str, CertificationReport]]) -> str:
    doc = {"format": "topocert-report", "version": 1,
           "datasets": [{"name": name, **report_dict(rep)} for name, rep in rows]}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def render_radar_csv(rep: CertificationReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["label", "kind", "value"])
    for label, kind, value in rep.radar_rows():
        w.writerow([label, kind, repr(float(value))])
    return buf.getvalue()
