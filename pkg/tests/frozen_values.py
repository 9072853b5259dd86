"""Oracle outputs frozen for regression; regenerate with tests/oracles.py helpers."""

# P_sameside from the brute-force tensor walk, keyed by (coin state, t)
TENSOR_SAMESIDE = {
    ("psi_plus", 10): 0.5351562499999982,
    ("psi_plus", 20): 0.5160574764595331,
    ("psi_minus", 10): 0.285156249999999,
    ("psi_minus", 20): 0.23485946655273274,
    ("phi_plus", 10): 0.7197875976562476,
    ("phi_plus", 20): 0.7660574764595315,
    ("phi_minus", 10): 0.46978759765624833,
    ("phi_minus", 20): 0.4848594665527309,
    ("LL", 10): 0.624999999999998,
    ("LL", 20): 0.6405990049533967,
}

# single-walker side probability p_minus from the explicit matrix-power walk
LINE_P_MINUS = {
    ("L", 50): 0.7499999999999918,
    ("R", 50): 0.2629895377517897,
    ("sym", 50): 0.5064947688758906,
}

# δ walk (bulk H⊗H, diag C_δ) from (1, i, -1, 1)/2 on the dense box, same-side mass at t = 30
DELTA_SAMESIDE_DIAGONAL_T30 = 0.5995242229253528
DELTA_SAMESIDE_AXIAL_T30 = 0.42575937062284824
