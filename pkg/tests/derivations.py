"""Textbook sequent derivations of the axioms, instantiated at p, q, r."""

from condikit.sequent import LogicId as L, SeqDerivation, parse_sequent


def node(seq: str, rule: str, *premises: SeqDerivation) -> SeqDerivation:
    return SeqDerivation(parse_sequent(seq), rule, tuple(premises))


def ident(f: str) -> SeqDerivation:
    return node(f"{f} => {f}", "init")


# Transcriptions of the textbook derivations, instantiated at p, q, r.

CM_BOX = node(
    "=> (p > q & r) -> (p > q) & (p > r)",
    "impR",
    node(
        "p > q & r => (p > q) & (p > r)",
        "andR",
        node("p > q & r => p > q", "cb", ident("p"), ident("p"),
             node("q & r => q", "andL", node("q, r => q", "init"))),
        node("p > q & r => p > r", "cb", ident("p"), ident("p"),
             node("q & r => r", "andL", node("q, r => r", "init"))),
    ),
)

CC_BOX = node(
    "=> (p > q) & (p > r) -> (p > q & r)",
    "impR",
    node(
        "(p > q) & (p > r) => p > q & r",
        "andL",
        node("p > q, p > r => p > q & r", "cb", ident("p"), ident("p"), ident("p"), ident("p"),
             node("q, r => q & r", "andR", node("q, r => q", "init"), node("q, r => r", "init"))),
    ),
)

CN_BOX = node("=> p > true", "cb", node("=> true", "impR", node("false => false", "botL")))

# The displayed tree labels this step cd; its shape is the cbd rule.
CN_DIA = node(
    "=> ~(p ?> false)",
    "impR",
    node("p ?> false => false", "cbd", node("false =>", "botL")),
)

CK_DIA = node(
    "=> (p > (q -> r)) -> (p ?> q) -> (p ?> r)",
    "impR",
    node(
        "p > (q -> r) => (p ?> q) -> (p ?> r)",
        "impR",
        node("p > (q -> r), p ?> q => p ?> r", "cd", ident("p"), ident("p"), ident("p"), ident("p"),
             node("q -> r, q => r", "impL", node("q -> r, q => q", "init"), node("r, q => r", "init"))),
    ),
)

ID_BOX = node("=> p > p", "cb_id", ident("p"))

MP_BOX = node(
    "=> (p > q) -> (p -> q)",
    "impR",
    node("p > q => p -> q", "impR",
         node("p > q, p => q", "mp_box", node("p > q, p => p", "init"), node("p > q, p, q => q", "init"))),
)

MP_DIA = node(
    "=> p & q -> (p ?> q)",
    "impR",
    node("p & q => p ?> q", "andL",
         node("p, q => p ?> q", "mp_dia", node("p, q => p", "init"), node("p, q => q", "init"))),
)

CEM_DIA = node(
    "=> (p ?> q) & (p ?> r) -> (p ?> q & r)",
    "impR",
    node(
        "(p ?> q) & (p ?> r) => p ?> q & r",
        "andL",
        node("p ?> q, p ?> r => p ?> q & r", "cd_cem", ident("p"), ident("p"), ident("p"), ident("p"),
             node("q, r => q & r", "andR", node("q, r => q", "init"), node("q, r => r", "init"))),
    ),
)

FIXTURES = [
    (CM_BOX, L.CONSTCKBOX),
    (CM_BOX, L.CONSTCK),
    (CC_BOX, L.CONSTCK),
    (CN_BOX, L.CONSTCKBOX),
    (CN_DIA, L.CONSTCK),
    (CK_DIA, L.CONSTCK),
    (ID_BOX, L.CCKID),
    (MP_BOX, L.CCKMP),
    (MP_DIA, L.CCKMP),
    (CEM_DIA, L.CCKCEM),
]
