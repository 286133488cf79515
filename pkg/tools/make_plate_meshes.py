"""Regenerate the packaged quarter-plate meshes under src/cosserat_dem/data/.

The shipped resolution (nr = nt = 128, grading 1.2) keeps radial cells
near-isotropic; strongly stretched boundary cells degrade the accuracy of
facet tractions paired with cell centers, which shows up directly in the
hole stress concentration.
"""

from pathlib import Path

from cosserat_dem.mesh import generate_quarter_plate_mesh, save_mesh_json

WIDTH = 16.2e-3
NR = NT = 128
GRADING = 1.2
RADII = {"plate_hole_small.json": 0.216e-3, "plate_hole_big.json": 0.864e-3}


def main():
    out = Path(__file__).resolve().parents[1] / "src" / "cosserat_dem" / "data"
    out.mkdir(parents=True, exist_ok=True)
    for name, radius in RADII.items():
        mesh = generate_quarter_plate_mesh(radius, WIDTH, NR, NT, grading=GRADING)
        save_mesh_json(mesh, out / name)
        print(f"{name}: {mesh.num_cells} cells, h={mesh.mesh_size:.3e}")


if __name__ == "__main__":
    main()
