"""Plain-text formats: ``.umap`` (one-face maps), ``.emap`` (flag systems), ``.kmap``.

``.umap``::

    umap <n> <root_side> <+|->
    <a> <b> <s|t>            one line per glued pair, 1 <= a < b <= 2n
    labels <l_1> ... <l_v>   optional, tour order of first visit

``.emap``::

    emap <flag_count> <root_flag>
    tau0: <images of flags 0 .. flag_count-1>
    tau1: ...
    tau2: ...

``.kmap`` holds a map with ``k`` ordered faces, a delayed-source block, or
both::

    kmap <n> <k>
    faces <size_1> ... <size_k>    sides numbered face after face
    roots <r_1> ... <r_k>          optional; 1-based root side inside each face
    <a> <b> <s|t>
    labels <c_1> ... <c_2n>        label at the start of every side
    sources
    <vertex> <delay> <flag>        one line per source

Blank lines and ``#`` comments are ignored.
"""

from __future__ import annotations

from .errors import InputError
from .multipoint import DelayedSources, KRootedMap
from .surface_core import EmbeddedMap, UnicellularMap


def _lines(text):
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(line)
    return out


def _ints(tokens, what):
    try:
        return [int(x) for x in tokens]
    except ValueError as exc:
        raise InputError(f"{what}: expected integers") from exc


def _pair(line):
    parts = line.split()
    if len(parts) != 3 or parts[2] not in ("s", "t"):
        raise InputError(f"bad pair line {line!r}; expected 'a b s' or 'a b t'")
    a, b = _ints(parts[:2], "pair")
    return a, b, parts[2] == "t"


# --- umap -------------------------------------------------------------------


def format_umap(u):
    orient = "+" if u.root_orient == 1 else "-"
    out = [f"umap {u.n} {u.root_side} {orient}"]
    for a, b, t in u.pairs:
        out.append(f"{a} {b} {'t' if t else 's'}")
    if u.labels is not None:
        out.append("labels " + " ".join(str(x) for x in u.labels))
    return "\n".join(out) + "\n"


def parse_umap(text):
    lines = _lines(text)
    if not lines:
        raise InputError("empty .umap input")
    head = lines[0].split()
    if len(head) != 4 or head[0] != "umap" or head[3] not in ("+", "-"):
        raise InputError("first line must be 'umap <n> <root_side> <+|->'")
    n, root_side = _ints(head[1:3], "umap header")
    pairs = []
    labels = None
    for line in lines[1:]:
        if line.startswith("labels"):
            labels = tuple(_ints(line.split()[1:], "labels"))
        else:
            pairs.append(_pair(line))
    if len(pairs) != n:
        raise InputError(f"expected {n} pairs, found {len(pairs)}")
    return UnicellularMap(n, tuple(pairs), root_side, 1 if head[3] == "+" else -1, labels)


# --- emap -------------------------------------------------------------------


def format_emap(m):
    out = [f"emap {m.size} {m.root}"]
    for name, t in (("tau0", m.tau0), ("tau1", m.tau1), ("tau2", m.tau2)):
        out.append(f"{name}: " + " ".join(str(x) for x in t))
    return "\n".join(out) + "\n"


def parse_emap(text):
    lines = _lines(text)
    if len(lines) != 4:
        raise InputError(".emap needs a header and three permutation lines")
    head = lines[0].split()
    if len(head) != 3 or head[0] != "emap":
        raise InputError("first line must be 'emap <flag_count> <root_flag>'")
    size, root = _ints(head[1:], "emap header")
    perms = {}
    for line in lines[1:]:
        name, _, rest = line.partition(":")
        name = name.strip()
        if name not in ("tau0", "tau1", "tau2"):
            raise InputError(f"unknown permutation {name!r}")
        vals = _ints(rest.split(), name)
        if len(vals) != size:
            raise InputError(f"{name} lists {len(vals)} images for {size} flags")
        perms[name] = tuple(vals)
    if set(perms) != {"tau0", "tau1", "tau2"}:
        raise InputError("tau0, tau1 and tau2 are all required")
    return EmbeddedMap(perms["tau0"], perms["tau1"], perms["tau2"], root)


# --- kmap -------------------------------------------------------------------


def format_kmap(mk=None, sources=None):
    n = mk.n_edges if mk is not None else 0
    k = mk.k if mk is not None else sources.k
    out = [f"kmap {n} {k}"]
    if mk is not None:
        out.append("faces " + " ".join(str(x) for x in mk.face_sizes))
        for s, t in enumerate(mk.mate):
            if s < t:
                out.append(f"{s + 1} {t + 1} {'t' if mk.twisted[s] else 's'}")
        out.append("labels " + " ".join(str(x) for x in mk.corner_labels))
    if sources is not None:
        if sources.corners is None:
            raise InputError("sources need marked flags to be written")
        out.append("sources")
        for w, d, f in zip(sources.vertices, sources.delays, sources.corners):
            out.append(f"{w} {d} {f}")
    return "\n".join(out) + "\n"


def parse_kmap(text):
    """Returns ``(KRootedMap or None, DelayedSources or None)``."""
    lines = _lines(text)
    if not lines:
        raise InputError("empty .kmap input")
    head = lines[0].split()
    if len(head) != 3 or head[0] != "kmap":
        raise InputError("first line must be 'kmap <n> <k>'")
    n, k = _ints(head[1:], "kmap header")
    sizes = roots = labels = None
    pairs = []
    src = None
    for line in lines[1:]:
        word = line.split()[0]
        if src is not None:
            src.append(_ints(line.split(), "source line"))
        elif word == "faces":
            sizes = _ints(line.split()[1:], "faces")
        elif word == "roots":
            roots = _ints(line.split()[1:], "roots")
        elif word == "labels":
            labels = _ints(line.split()[1:], "labels")
        elif word == "sources":
            src = []
        else:
            pairs.append(_pair(line))
    mk = None
    if n > 0:
        if sizes is None or len(sizes) != k or sum(sizes) != 2 * n:
            raise InputError(f"faces line must list {k} sizes summing to {2 * n}")
        if len(pairs) != n or labels is None or len(labels) != 2 * n:
            raise InputError(f"expected {n} pairs and {2 * n} corner labels")
        mate = [-1] * (2 * n)
        tw = [False] * (2 * n)
        for a, b, t in pairs:
            if not (1 <= a <= 2 * n and 1 <= b <= 2 * n) or a == b:
                raise InputError(f"pair ({a}, {b}) out of range")
            if mate[a - 1] >= 0 or mate[b - 1] >= 0:
                raise InputError(f"side used twice in pair ({a}, {b})")
            mate[a - 1], mate[b - 1] = b - 1, a - 1
            tw[a - 1] = tw[b - 1] = t
        mk = KRootedMap(tuple(sizes), tuple(mate), tuple(tw), tuple(labels))
        if roots is not None:
            if len(roots) != k:
                raise InputError("roots line must list one side per face")
            m = mk.embedded
            flags = []
            for j, (b, size) in enumerate(zip(mk.first_sides, sizes)):
                if not 1 <= roots[j] <= size:
                    raise InputError(f"root {roots[j]} outside face {j + 1}")
                flags.append(2 * (b + roots[j] - 1))
            mk = KRootedMap.from_embedded(m, flags, mk.vertex_labels())
    sources = None
    if src is not None:
        if any(len(x) != 3 for x in src) or len(src) != k:
            raise InputError(f"sources block needs {k} lines 'vertex delay flag'")
        sources = DelayedSources(
            tuple(x[0] for x in src), tuple(x[1] for x in src), tuple(x[2] for x in src)
        )
    if mk is None and sources is None:
        raise InputError(".kmap holds neither a map nor sources")
    return mk, sources


def read_file(path, parser):
    with open(path, encoding="utf-8") as fh:
        return parser(fh.read())


def write_file(path, text):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
