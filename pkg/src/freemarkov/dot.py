"""Graphviz export.  Output depends only on the diagram, so it is byte-stable."""
from __future__ import annotations

from typing import List

from .diagram import BOUNDARY, Diagram


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(d: Diagram, name: str = "diagram") -> str:
    lines: List[str] = [f"digraph {_quote(name)} {{", "  rankdir=BT;",
                        "  node [fontname=\"Helvetica\"];"]
    if d.dom:
        lines.append("  { rank=min; " + " ".join(
            f"d{i} [shape=point, xlabel={_quote(f'd{i}:{a}')}];"
            for i, a in enumerate(d.dom)) + " }")
    if d.cod:
        lines.append("  { rank=max; " + " ".join(
            f"c{j} [shape=point, xlabel={_quote(f'c{j}:{a}')}];"
            for j, a in enumerate(d.cod)) + " }")
    for x, v in enumerate(d.nodes):
        shape = "box" if type(v).__name__ == "Gen" else "ellipse"
        lines.append(f"  n{x} [label={_quote(str(v))}, shape={shape}];")

    def src_name(p):
        return f"d{p[1]}" if p[0] == BOUNDARY else f"n{p[0]}"

    def tgt_name(p):
        return f"c{p[1]}" if p[0] == BOUNDARY else f"n{p[0]}"

    for t, s in sorted(d.wiring.items()):
        attrs = [f"label={_quote(d.source_letter(s))}"]
        if s[0] != BOUNDARY:
            attrs.append(f"taillabel={_quote(str(s[1]))}")
        if t[0] != BOUNDARY:
            attrs.append(f"headlabel={_quote(str(t[1]))}")
        lines.append(f"  {src_name(s)} -> {tgt_name(t)} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
