CHAUDHURI_ORIGINAL = "chaudhuri_original"
LAMBDA_OPTIMAL = "lambda_optimal"
MU_LAMBDA = "mu_lambda"
MU_LAMBDA_INFERIOR = "mu_lambda_inferior"
BARNI = "barni"
SEOL_CHEUN_AB = "seol_cheun_ab"

MANHATTAN = "manhattan"
EUCLIDEAN = "euclidean"
CHESSBOARD = "chessboard"

approximation_families = {
    CHAUDHURI_ORIGINAL,
    LAMBDA_OPTIMAL,
    MU_LAMBDA,
    MU_LAMBDA_INFERIOR,
    BARNI,
    SEOL_CHEUN_AB,
}

exact_families = {
    MANHATTAN,
    EUCLIDEAN,
    CHESSBOARD,
}

family_types = approximation_families | exact_families

# Short names accepted on the command line.
family_aliases = {
    "d1": MANHATTAN,
    "d2": EUCLIDEAN,
    "dinf": CHESSBOARD,
    "chaudhuri": CHAUDHURI_ORIGINAL,
    "lambda": LAMBDA_OPTIMAL,
    "mulambda": MU_LAMBDA,
    "mulambda-inferior": MU_LAMBDA_INFERIOR,
    "barni": BARNI,
    "ab": SEOL_CHEUN_AB,
}
