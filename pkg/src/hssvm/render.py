"""Deterministic SVG rendering: up-right path ensembles (edge thickness =
multiplicity, circled nonempty vertices) and occupancy heat maps of large
six-vertex samples.

All output is plain SVG text assembled in a fixed order from a fixed seed,
so identical inputs give byte-identical documents.
"""

import random

from .model import Configuration

# A hand-specified ensemble of four up-right paths on an 8 x 6 grid: two
# enter from the left (rows 1 and 2), two from the bottom (columns 2 and 5).
# Exactly nine vertices are used by more than one path and get the large
# circle marker.
FIG_PATHS = (
    ((0, 2), (1, 2), (2, 2), (2, 3), (3, 3), (4, 3), (4, 4), (4, 5), (4, 6)),
    ((0, 1), (1, 1), (2, 1), (2, 2), (3, 2), (4, 2), (4, 3), (5, 3), (5, 4),
     (6, 4), (6, 5), (6, 6)),
    ((2, 0), (2, 1), (2, 2), (3, 2), (4, 2), (5, 2), (6, 2), (6, 3), (6, 4),
     (7, 4), (7, 5), (7, 6)),
    ((5, 0), (5, 1), (6, 1), (6, 2), (7, 2), (7, 3), (7, 4), (7, 5), (7, 6)),
)


def path_multiplicities(paths):
    """(edge -> multiplicity, vertex -> multiplicity) for an ensemble.

    Edges are ((x1,y1),(x2,y2)) unit steps; a vertex is counted once per
    path that passes through it.
    """
    edges = {}
    vertices = {}
    for path in paths:
        for a, b in zip(path, path[1:]):
            if (b[0] - a[0], b[1] - a[1]) not in ((1, 0), (0, 1)):
                raise ValueError("paths must take unit up-right steps")
            edges[(a, b)] = edges.get((a, b), 0) + 1
        # the last point is where the path leaves the picture, not a vertex
        for v in path[:-1]:
            vertices[v] = vertices.get(v, 0) + 1
    return edges, vertices


def _svg_open(width, height):
    return ['<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" '
            'viewBox="0 0 %d %d">' % (width, height, width, height)]


def _grid_lines(nx, ny, cell, pad):
    out = ['<g stroke="#cccccc" stroke-width="1">']
    for x in range(nx + 1):
        px = pad + x * cell
        out.append('<line x1="%d" y1="%d" x2="%d" y2="%d"/>'
                   % (px, pad, px, pad + ny * cell))
    for y in range(ny + 1):
        py = pad + y * cell
        out.append('<line x1="%d" y1="%d" x2="%d" y2="%d"/>'
                   % (pad, py, pad + nx * cell, py))
    out.append('</g>')
    return out


def render_path_ensemble(paths=FIG_PATHS, cell=48, pad=24):
    """SVG document for an up-right path ensemble.

    Edge stroke width grows with multiplicity; vertices used by one path get
    a small circle, vertices shared by several paths a large one (class
    "multi", so they are countable in the document).
    """
    edges, vertices = path_multiplicities(paths)
    nx = max([v[0] for p in paths for v in p], default=1)
    ny = max([v[1] for p in paths for v in p], default=1)
    height = pad * 2 + ny * cell

    def pt(v):
        return pad + v[0] * cell, height - pad - v[1] * cell

    out = _svg_open(pad * 2 + nx * cell, height)
    out += _grid_lines(nx, ny, cell, pad)
    out.append('<g stroke="#1f4e79" fill="none" stroke-linecap="round">')
    for (a, b) in sorted(edges):
        mult = edges[(a, b)]
        (x1, y1), (x2, y2) = pt(a), pt(b)
        out.append('<line x1="%d" y1="%d" x2="%d" y2="%d" '
                   'stroke-width="%d"/>' % (x1, y1, x2, y2, 2 + 3 * mult))
    out.append('</g>')
    out.append('<g fill="none" stroke="#c00000" stroke-width="2">')
    for v in sorted(vertices):
        x, y = pt(v)
        if vertices[v] > 1:
            out.append('<circle class="multi" cx="%d" cy="%d" r="%d"/>'
                       % (x, y, cell // 3))
        else:
            out.append('<circle cx="%d" cy="%d" r="%d"/>' % (x, y, cell // 6))
    out.append('</g>')
    out.append('</svg>')
    return "\n".join(out) + "\n"


def render_configuration(config, cell=48, pad=24, X_max=None):
    """Grid row with one disc per column, radius growing with occupancy.

    An empty configuration renders the bare grid.
    """
    occ = config.occupancy if isinstance(config, Configuration) else dict(config)
    nx = max([X_max or 0] + list(occ) + [8])
    out = _svg_open(pad * 2 + nx * cell, pad * 2 + cell)
    out += _grid_lines(nx, 1, cell, pad)
    out.append('<g fill="#1f4e79">')
    for x in sorted(occ):
        if occ[x]:
            r = min(cell // 2 - 2, 4 + 4 * occ[x])
            out.append('<circle cx="%d" cy="%d" r="%d"/>'
                       % (pad + x * cell, pad + cell // 2, r))
    out.append('</g>')
    out.append('</svg>')
    return "\n".join(out) + "\n"


def sample_six_vertex(size, b1, b2, seed):
    """Height field of a stochastic six-vertex sample on a size x size box.

    Paths enter from the left at every row.  At each vertex with one
    incoming arrow, a vertical arrow continues up with probability b1 and a
    horizontal one continues right with probability b2; two incoming arrows
    pass through.  Returns rows[y][x] = number of paths crossing row y at
    columns <= x+1 (the height profile along the row), y, x zero-based.
    """
    rng = random.Random(seed)
    v_out = [0] * size  # vertical arrow leaving column x upward
    rows = []
    for y in range(size):
        h = 1  # a path enters this row from the left boundary
        profile = []
        acc = 0
        for x in range(size):
            v = v_out[x]
            if v == 1 and h == 0:
                if rng.random() < b1:
                    v, h = 1, 0
                else:
                    v, h = 0, 1
            elif v == 0 and h == 1:
                if rng.random() < b2:
                    v, h = 0, 1
                else:
                    v, h = 1, 0
            v_out[x] = v
            acc += v
            profile.append(acc)
        rows.append(profile)
    return rows


def render_heat_map(size, b1, b2, seed, scale=2):
    """SVG heat map of the six-vertex height density.

    Cell (x, y) is shaded by rows[y][x]/(y+1), the fraction of available
    paths already crossed; equal-shade runs along a row are merged into one
    rectangle, keeping the document compact.
    """
    rows = sample_six_vertex(size, b1, b2, seed)
    side = size * scale
    out = _svg_open(side, side)
    out.append('<rect width="%d" height="%d" fill="#ffffff"/>' % (side, side))
    for y in range(size):
        profile = rows[y]
        py = side - (y + 1) * scale
        x = 0
        while x < size:
            level = (255 * profile[x]) // (y + 1)
            x0 = x
            while x < size and (255 * profile[x]) // (y + 1) == level:
                x += 1
            shade = 255 - level
            out.append('<rect x="%d" y="%d" width="%d" height="%d" '
                       'fill="#%02x%02x%02x"/>'
                       % (x0 * scale, py, (x - x0) * scale, scale,
                          shade, shade, 255))
    out.append('</svg>')
    return "\n".join(out) + "\n"


def render_svg(sample, options=None):
    """Render a lattice sample to an SVG document string.

    sample may be: None or a Configuration (occupancy row; empty gives the
    bare grid), a sequence of up-right paths (ensemble drawing), or a dict
    {"model": "six_vertex", "size", "b1", "b2", "seed"} (heat map).
    """
    options = dict(options or {})
    if sample is None:
        sample = Configuration({})
    if isinstance(sample, Configuration):
        return render_configuration(sample, **options)
    if isinstance(sample, dict):
        if sample.get("model") != "six_vertex":
            raise ValueError("unknown sample model %r" % (sample.get("model"),))
        return render_heat_map(sample["size"], sample["b1"], sample["b2"],
                               sample.get("seed", 0), **options)
    return render_path_ensemble(tuple(tuple(map(tuple, p)) for p in sample),
                                **options)
