"""lp-lab: lacunary Littlewood-Paley square functions on the torus."""
