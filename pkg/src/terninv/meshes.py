"""Surface meshes of forms: icosphere sampling and Wavefront OBJ export.

A form f defines the closed surface {(x f(u), y f(u), z f(u)) : u on the
unit sphere}.  We sample unit directions on a subdivided icosahedron,
scale each vertex by the form value there, and export OBJ with faces
split into two material groups by the sign of f (negative-valued patches
pass through the origin, which is how the two-sided shape reads).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .forms import TernaryForm, evaluate


@dataclass
class MeshSample:
    vertices: list[tuple[float, float, float]]
    faces: list[tuple[int, int, int]]
    scalars: list[float]  # form value at the unit direction of each vertex


def icosphere(subdivisions: int = 4) -> tuple[list[tuple[float, float, float]], list[tuple[int, int, int]]]:
    """Unit-sphere triangulation: icosahedron with midpoint subdivision."""
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    raw = [
        (-1, phi, 0), (1, phi, 0), (-1, -phi, 0), (1, -phi, 0),
        (0, -1, phi), (0, 1, phi), (0, -1, -phi), (0, 1, -phi),
        (phi, 0, -1), (phi, 0, 1), (-phi, 0, -1), (-phi, 0, 1),
    ]

    def normalize(p):
        n = math.sqrt(p[0] ** 2 + p[1] ** 2 + p[2] ** 2)
        return (p[0] / n, p[1] / n, p[2] / n)

    vertices = [normalize(p) for p in raw]
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]

    for _ in range(subdivisions):
        midpoint: dict[tuple[int, int], int] = {}

        def mid(i, j):
            key = (min(i, j), max(i, j))
            idx = midpoint.get(key)
            if idx is None:
                a, b = vertices[i], vertices[j]
                vertices.append(normalize(((a[0] + b[0]) / 2,
                                           (a[1] + b[1]) / 2,
                                           (a[2] + b[2]) / 2)))
                idx = len(vertices) - 1
                midpoint[key] = idx
            return idx

        next_faces = []
        for i, j, k in faces:
            ij, jk, ki = mid(i, j), mid(j, k), mid(k, i)
            next_faces.extend([(i, ij, ki), (j, jk, ij), (k, ki, jk), (ij, jk, ki)])
        faces = next_faces
    return vertices, faces


def sample_surface(v: TernaryForm, subdivisions: int = 4) -> MeshSample:
    directions, faces = icosphere(subdivisions)
    scalars = [evaluate(v, u) for u in directions]
    vertices = [
        (u[0] * s, u[1] * s, u[2] * s) for u, s in zip(directions, scalars)
    ]
    return MeshSample(vertices, faces, scalars)


def write_obj(mesh: MeshSample, path: str) -> None:
    """OBJ export; faces grouped into positive/negative material groups."""
    pos_faces = []
    neg_faces = []
    for face in mesh.faces:
        total = sum(mesh.scalars[i] for i in face)
        (pos_faces if total >= 0 else neg_faces).append(face)
    with open(path, "w") as fh:
        fh.write("# ternary form surface\n")
        for x, y, z in mesh.vertices:
            fh.write(f"v {x:.9g} {y:.9g} {z:.9g}\n")
        for name, faces in (("positive", pos_faces), ("negative", neg_faces)):
            if not faces:
                continue
            fh.write(f"usemtl {name}\n")
            for i, j, k in faces:
                fh.write(f"f {i + 1} {j + 1} {k + 1}\n")
