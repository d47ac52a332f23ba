"""JSON readers and writers for groups, graphs of groups, actions and cone problems."""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional, Union

from .cone import ConeProblem
from .errors import NotAnAction
from .gog import AlmostAction, GraphOfGroups, check_almost_action, validate_gog
from .groups import FiniteAction, FiniteGroup, action_from_generators, validate_group
from .perms import identity

PathLike = Union[str, Path]


def read_json(path: PathLike) -> Any:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def write_json(path: Optional[PathLike], data: Any) -> str:
    text = json.dumps(data, indent=2, sort_keys=False) + "\n"
    if path is not None and str(path) != "-":
        Path(path).write_text(text, encoding="utf-8")
    return text


# ---------------------------------------------------------------------------
# groups


def group_from_json(data: dict) -> tuple[FiniteGroup, list[int]]:
    """The group plus ``relabel[old index] = new index`` (the identity moves to 0)."""
    table = data["table"]
    if "order" in data and int(data["order"]) != len(table):
        raise ValueError(f"order {data['order']} but table has {len(table)} rows")
    labels = data.get("labels")
    g = validate_group(table, labels)
    n = len(table)
    e = next(i for i in range(n) if [int(x) for x in table[i]] == list(range(n)))
    relabel = list(range(n))
    relabel[0], relabel[e] = e, 0
    return g, relabel


def _load_group(ref, base: Path) -> tuple[FiniteGroup, list[int], list[str]]:
    data = read_json(base / ref) if isinstance(ref, str) else ref
    g, relabel = group_from_json(data)
    raw_labels = [str(x) for x in data.get("labels", [str(i) for i in range(len(relabel))])]
    return g, relabel, raw_labels


def _element(x, raw_labels: list[str]) -> int:
    if isinstance(x, str):
        try:
            return raw_labels.index(x)
        except ValueError:
            raise ValueError(f"unknown element label {x!r}") from None
    return int(x)


# ---------------------------------------------------------------------------
# graphs of groups


def gog_from_json(data: dict, base: PathLike = ".") -> GraphOfGroups:
    """Groups may be inline objects or paths relative to ``base``."""
    base = Path(base)
    vgroups: dict[int, FiniteGroup] = {}
    vinfo = {}
    for entry in data["vertices"]:
        vid = int(entry["id"])
        g, relabel, raw = _load_group(entry["group"], base)
        vgroups[vid] = g
        vinfo[vid] = (relabel, raw)
    edges = []
    for entry in data["edges"]:
        g, src_relabel, src_raw = _load_group(entry["edge_group"], base)
        tgt_relabel, tgt_raw = vinfo[int(entry["terminus"])]
        raw_image = [_element(x, tgt_raw) for x in entry["inclusion_to_terminus"]]
        if len(raw_image) != g.order:
            raise ValueError(f"edge {entry['id']}: inclusion has {len(raw_image)} entries, edge group order {g.order}")
        image = [0] * g.order
        for old, img in enumerate(raw_image):
            image[src_relabel[old]] = tgt_relabel[img]
        edges.append(
            {
                "id": int(entry["id"]),
                "bar": int(entry["bar"]),
                "origin": int(entry["origin"]),
                "terminus": int(entry["terminus"]),
                "edge_group": g,
                "inclusion_to_terminus": image,
            }
        )
    return validate_gog(vgroups, edges, tree=data.get("tree"), orientation=data.get("orientation"), name=data.get("name", ""))


def load_gog(path: PathLike) -> GraphOfGroups:
    """A file path, or the name of a built-in graph of groups."""
    p = Path(path)
    if not p.exists():
        from . import zoo

        try:
            return zoo.by_name(str(path))
        except KeyError:
            raise FileNotFoundError(f"{path}: no such file or built-in graph of groups") from None
    return gog_from_json(read_json(p), p.parent)


# ---------------------------------------------------------------------------
# actions


def vertex_generator_name(v: int, label: str) -> str:
    return f"v{v}:{label}"


def letter_name(e: int) -> str:
    return f"s{e}"


def action_to_json(rho: AlmostAction) -> dict:
    """``{"degree", "generators"}`` listing every vertex-group element and stable letter."""
    gens: dict[str, list[int]] = {}
    for v in rho.gog.vertices:
        g = rho.vertex_actions[v].group
        for k in g.elements:
            gens[vertex_generator_name(v, g.labels[k])] = list(rho.vertex_actions[v].perms[k])
    for e in rho.gog.oriented_edges:
        gens[letter_name(e)] = list(rho.stable_letters[e])
    return {"degree": rho.degree, "generators": gens}


def action_from_json(gog: GraphOfGroups, data: dict) -> AlmostAction:
    """Vertex actions are closed from whichever elements are listed.

    Tree letters left out default to the identity; every other stable letter
    must be present.
    """
    n = int(data["degree"])
    gens = data["generators"]
    per_vertex: dict[int, dict[int, list[int]]] = {v: {} for v in gog.vertices}
    letters: dict[int, tuple[int, ...]] = {}
    for name, perm in gens.items():
        if name.startswith("v") and ":" in name:
            head, label = name[1:].split(":", 1)
            v = int(head)
            if v not in per_vertex:
                raise NotAnAction(f"generator {name!r}: no vertex {v}")
            per_vertex[v][gog.vertex_groups[v].label_index(label)] = [int(x) for x in perm]
        elif name.startswith("s"):
            e = int(name[1:])
            if e not in gog.oriented_edges:
                raise NotAnAction(f"generator {name!r}: {e} is not an oriented edge")
            letters[e] = tuple(int(x) for x in perm)
        else:
            raise NotAnAction(f"unrecognised generator name {name!r}")
    actions = {}
    for v in gog.vertices:
        g = gog.vertex_groups[v]
        images = {k: p for k, p in per_vertex[v].items() if k != 0}
        if g.order == 1:
            actions[v] = FiniteAction(g, (identity(n),))
        else:
            actions[v] = action_from_generators(g, n, images)
            if 0 in per_vertex[v] and tuple(per_vertex[v][0]) != identity(n):
                raise NotAnAction(f"vertex {v}: identity element acts nontrivially")
    for e in gog.oriented_edges:
        if e not in letters:
            if not gog.in_tree(e):
                raise NotAnAction(f"missing stable letter s{e}")
            letters[e] = identity(n)
    rho = AlmostAction(gog, n, actions, letters)
    check_almost_action(rho)
    return rho


def load_action(gog: GraphOfGroups, path: PathLike) -> AlmostAction:
    return action_from_json(gog, read_json(path))


# ---------------------------------------------------------------------------
# cone problems


def _weights(descriptors, count: int) -> tuple[int, ...]:
    if descriptors is None:
        return tuple([1] * count)
    if len(descriptors) != count:
        raise ValueError("basis descriptor count differs from dimension")
    return tuple(int(d.get("degree", 1)) for d in descriptors)


def cone_problem_from_json(data: dict) -> ConeProblem:
    """``{"matrix", "lambda", "source_basis"?, "target_basis"?, "source_scale"?, "target_scale"?}``.

    Basis descriptors carry a ``degree`` that becomes the coordinate weight;
    without them every weight is 1.
    """
    matrix = tuple(tuple(int(x) for x in row) for row in data["matrix"])
    lam = tuple(int(x) for x in data["lambda"])
    return ConeProblem(
        matrix=matrix,
        source_weights=_weights(data.get("source_basis"), len(lam)),
        target_weights=_weights(data.get("target_basis"), len(matrix)),
        lam=lam,
        source_scale=Fraction(str(data.get("source_scale", 1))),
        target_scale=Fraction(str(data.get("target_scale", 1))),
    )
